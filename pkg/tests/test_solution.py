"""Unit tests for solution module."""

import math
import random
import unittest
from fractions import Fraction

from src.basis import Params, f_table
from src.exceptions import BranchHazardError, PreconditionError
from src.seriescore import RATIONAL, ComplexField
from src.solution import (
    assemble,
    eval_solution,
    jacobi_integral_check,
    jacobi_integral_values,
    normalization,
    prefactor,
    relative_residual,
    richardson_residual,
    s4_check,
    s4_inverse,
    s4_parameters,
    solve_coefficients,
    total_E,
)
from src.specfun import as_nome, jacobi_poly
from src.verification import sample_params


class TestAssemble(unittest.TestCase):
    """Test cases for assembling the polynomials P_n^(l)."""

    def setUp(self):
        """Set up test fixtures."""
        self.params = sample_params(random.Random(17))

    def test_normalization(self):
        """Test N_n = (n + g0 + g1)_n / (4^n (lam)_n)."""
        params = self.params
        self.assertEqual(normalization(0, params), 1)
        expected = (2 + params.g01) * (3 + params.g01) / (16 * params.lam * (params.lam + 1))
        self.assertEqual(normalization(2, params), expected)

    def test_order_zero_is_jacobi(self):
        """Test P_n^(0) is the Jacobi polynomial P_n^(g0-1/2, g1-1/2)."""
        half = Fraction(1, 2)
        for n in range(4):
            sol = assemble(n, self.params, 0)
            expected = jacobi_poly(n, self.params.g[0] - half, self.params.g[1] - half, RATIONAL)
            self.assertEqual(sol.polys[0], expected)

    def test_negative_mode_with_empty_window(self):
        """Test n = -1 at order zero gives vanishing polynomials."""
        sol = assemble(-1, self.params, 0)
        self.assertEqual(len(sol.polys), 1)
        self.assertFalse(sol.polys[0])

    def test_trivial_dual_couplings(self):
        """Test gt in {0, 1} leaves E = E^(0) and P_n^(l) = N_n f_n^(l)."""
        params = Params.from_dual((0, 1, 1, 0), Fraction(7, 10))
        sol = assemble(1, params, 3)
        self.assertEqual(sol.eigen.coefficients[1:], [0, 0, 0])
        basis = f_table(params, 3, -3, 4)
        for ell in range(4):
            self.assertEqual(sol.polys[ell], basis.f(1, ell) * sol.norm)

    def test_engines_assemble_alike(self):
        """Test the bridged second algorithm assembles the same polynomials."""
        direct = assemble(1, self.params, 3)
        bridged = assemble(1, self.params, 3, mode="bridge")
        self.assertEqual(direct.polys, bridged.polys)
        self.assertEqual(direct.eigen.coefficients, bridged.eigen.coefficients)

    def test_frozen_eigenvalue_modes(self):
        """Test alg2 reports the eigenvalue as its q = 0 value."""
        table, eigen = solve_coefficients(1, self.params, 2, "alg2")
        self.assertEqual(table.tag, "II")
        self.assertEqual(eigen.coefficients[1:], [0, 0])

    def test_unknown_mode(self):
        """Test an unknown engine name is refused."""
        with self.assertRaises(PreconditionError):
            solve_coefficients(0, self.params, 2, "alg3")

    def test_to_dict(self):
        """Test the serialized solution carries polynomials and eigenvalues."""
        data = assemble(1, self.params, 1).to_dict()
        self.assertEqual(data["n"], 1)
        self.assertEqual(data["N"], 1)
        self.assertEqual(data["mode"], "alg1")
        self.assertEqual(len(data["poly"]), 2)
        self.assertEqual(len(data["E_coeffs"]), 2)
        self.assertEqual(data["norm"], RATIONAL.serialize(normalization(1, self.params)))


class TestEvaluation(unittest.TestCase):
    """Test cases for evaluating psi_n and E_n."""

    def setUp(self):
        """Set up test fixtures."""
        self.field = ComplexField()
        self.static = Params.create([1.3, 0.45, 0.4, 0.9], 0, self.field)

    def test_total_energy_at_q0(self):
        """Test E_n at q = 0 is E^(0) - sum g(g-1)/12."""
        sol = assemble(1, self.static, 2)
        shift = sum(g * (g - 1) for g in self.static.g) / 12
        expected = (1 + (1.3 + 0.45) / 2) ** 2 - shift
        self.assertAlmostEqual(total_E(sol, 0.0), expected, places=12)

    def test_prefactor_trigonometric_limit(self):
        """Test the prefactor is sin(x/2)^g0 cos(x/2)^g1 at q = 0."""
        g = [2, 1, 0.5, 0.3]
        x = 0.7
        expected = math.sin(x / 2) ** 2 * math.cos(x / 2)
        self.assertAlmostEqual(prefactor(x, as_nome(0.0), g), expected, places=13)

    def test_prefactor_branch_hazard(self):
        """Test a non-integer power of a vanishing theta factor is refused."""
        with self.assertRaises(BranchHazardError):
            prefactor(1e-14, as_nome(0.01), [0.5, 1, 1, 1])

    def test_residual_trigonometric_limit(self):
        """Test the assembled solution solves the equation at large Im tau."""
        sol = assemble(2, self.static, 4)
        self.assertLess(relative_residual(sol, 1.1, 6j, 1e-3), 1e-7)

    def test_step_halving_separates_stencil_error(self):
        """Test step halving removes the h^4 error of a coarse stencil."""
        sol = assemble(2, self.static, 4)
        raw = relative_residual(sol, 1.1, 6j, 0.05)
        value, stencil = richardson_residual(sol, 1.1, 6j, 0.05)
        self.assertGreater(raw, 1e-9)
        self.assertLess(value, raw / 10)
        self.assertAlmostEqual(stencil / raw, 15 / 16, delta=0.1)

    def test_rescaling_identity(self):
        """Test omega1 = pi leaves psi and E unchanged."""
        sol = assemble(1, self.static, 2)
        plain = eval_solution(sol, 1.1, 1.2j)
        scaled = eval_solution(sol, 1.1, 1.2j, omega1=math.pi)
        self.assertAlmostEqual(plain[0], scaled[0], places=12)
        self.assertAlmostEqual(plain[1], scaled[1], places=12)


class TestPermutationSymmetry(unittest.TestCase):
    """Test cases for the kappa = 0 permutation symmetry."""

    def test_parameters_invert(self):
        """Test (c0, c1, c2, c3) determine the couplings."""
        g = (Fraction(14, 13), Fraction(28, 13), Fraction(16, 13), Fraction(44, 13))
        self.assertEqual(s4_inverse(s4_parameters(g)), g)

    def test_invariance_at_kappa_zero(self):
        """Test a transposition leaves the eigenvalue series unchanged."""
        params = sample_params(random.Random(5), kappa=0)
        self.assertEqual(s4_check(1, params, 3, (1, 0, 2, 3)), 0)
        self.assertEqual(s4_check(0, params, 3, (3, 2, 1, 0)), 0)

    def test_bad_permutation(self):
        """Test a sequence that is not a permutation is refused."""
        params = sample_params(random.Random(5), kappa=0)
        with self.assertRaises(PreconditionError):
            s4_check(0, params, 2, (0, 0, 1, 2))


class TestIntegralRepresentations(unittest.TestCase):
    """Test cases for the q = 0 integral representations."""

    def test_all_variants(self):
        """Test quadrature reproduces the Jacobi polynomials for each variant."""
        for variant in range(1, 5):
            for n in (0, 2, 3):
                self.assertTrue(jacobi_integral_check(variant, n, Fraction(3, 4), 0.3))

    def test_out_of_range(self):
        """Test unknown variants and negative degrees are refused."""
        with self.assertRaises(PreconditionError):
            jacobi_integral_values(5, 1, Fraction(1, 2), 0.3)
        with self.assertRaises(PreconditionError):
            jacobi_integral_values(1, -1, Fraction(1, 2), 0.3)


if __name__ == '__main__':
    unittest.main()
