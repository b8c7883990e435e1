"""Assembled solutions psi_n(x, tau), E_n and their numerical verification.

``assemble`` combines engine coefficients with basis tables into the
polynomials P_n^(l)(z). The remaining functions evaluate the solution at
points of the strip and check the defining equation, the kernel identity,
the differential-difference identity of the building blocks, the
permutation symmetry at kappa = 0 and the integral identities of the
Jacobi polynomials.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from .basis import Params, f_contour, f_table
from .engines import (
    DEFAULT_EPS_RES,
    WINDOW_EIGEN,
    CoeffTable,
    EigenSeries,
    alg1,
    alg2,
    bridge,
    thm1_eigen,
    thm2_table,
)
from .exceptions import BranchHazardError, PreconditionError
from .seriescore import (
    RATIONAL,
    ComplexField,
    QSeries,
    Scalar,
    ZPoly,
    pochhammer,
)
from .specfun import (
    HalfPeriods,
    Nome,
    as_nome,
    eta1_over_pi,
    jacobi_poly,
    scale_map,
    theta_hat,
    wp,
    wp_fourier,
    wp_scaled,
)


logger = logging.getLogger(__name__)

MODES = ("alg1", "alg2", "thm1", "thm2", "bridge")
ZERO_TOL = 1e-12
DEFAULT_STEP = 1e-3


@dataclass(frozen=True)
class SeriesSolution:
    """Truncated solution: P_n(z) = sum_l P_n^(l)(z) q^l and its eigenvalue series."""

    n: int
    params: Params
    order: int
    polys: Tuple[ZPoly, ...]
    eigen: EigenSeries
    norm: Scalar
    mode: str
    table: Optional[CoeffTable] = None

    def poly_value(self, z: complex, q: complex) -> complex:
        """sum_l P_n^(l)(z) q^l at a point."""
        total = 0j
        for poly in reversed(self.polys):
            total = total * q + complex(poly(z))
        return total

    def to_dict(self) -> Dict[str, Any]:
        field = self.params.field
        return {
            "n": self.n,
            "N": self.order,
            "mode": self.mode,
            "params": self.params.to_dict(),
            "norm": field.serialize(self.norm),
            "E_coeffs": [field.serialize(c) for c in self.eigen.coefficients],
            "poly": [[field.serialize(c) for c in p.coeffs] for p in self.polys],
        }


def normalization(n: int, params: Params) -> Scalar:
    """N_n = (n + g0 + g1)_n / (4^n (lam)_n).

    Raises:
        ScalarError: If (lam)_n vanishes
    """
    field = params.field
    numerator = pochhammer(n + params.g01, n, field) * field.coerce(Fraction(1, 4) ** n)
    return field.div(numerator, pochhammer(params.lam, n, field))


def solve_coefficients(
    n: int, params: Params, order: int, mode: str, eps_res: float = DEFAULT_EPS_RES
) -> Tuple[CoeffTable, EigenSeries]:
    """Run the engine named by ``mode`` on the assembly window.

    The second algorithm and the enumeration keep the eigenvalue at its
    q = 0 value; their series is returned as a constant.

    Raises:
        PreconditionError: If the mode is unknown or the engine refuses the couplings
    """
    if mode == "alg1":
        return alg1(n, params, order, eps_res=eps_res)
    if mode == "bridge":
        return bridge(alg2(n, params, order, eps_res=eps_res))
    if mode == "thm1":
        eigen, table = thm1_eigen(n, params, order, eps_res=eps_res)
        return table, eigen
    if mode in ("alg2", "thm2"):
        if mode == "alg2":
            table = alg2(n, params, order, eps_res=eps_res)
        else:
            table = thm2_table(n, params, order, eps_res=eps_res)
        frozen = QSeries.constant(table.couplings.e0, order, params.field)
        return table, EigenSeries(n, frozen)
    raise PreconditionError(f"Unknown mode: {mode}. Valid options are: {', '.join(MODES)}")


def assemble(
    n: int,
    params: Params,
    order: int,
    mode: str = "alg1",
    *,
    eps_res: float = DEFAULT_EPS_RES,
    margin: Optional[int] = None,
) -> SeriesSolution:
    """P_n^(l) = N_n sum_{l' <= l} sum_{m=-l'}^{n+l-l'} alpha^(l-l')(m) f_m^(l').

    Args:
        n: Mode index
        params: Couplings
        order: Truncation order N
        mode: Engine (alg1, alg2, thm1, thm2 or bridge)
        eps_res: Resonance threshold in float mode
        margin: Basis expansion margin passed to ``f_table``

    Returns:
        SeriesSolution holding P_n^(0..N)

    Raises:
        ResonanceError, PreconditionError, BasisWindowError, ScalarError
    """
    field = params.field
    table, eigen = solve_coefficients(n, params, order, mode, eps_res)
    norm = normalization(n, params)
    zero = ZPoly.zero(field)
    polys: List[ZPoly] = [zero] * (order + 1)

    m_lo, m_hi = -order, n + order
    if m_hi >= m_lo:
        basis = f_table(params, order, m_lo, m_hi, margin)
        for ell in range(order + 1):
            acc = zero
            for lower in range(ell + 1):
                j = ell - lower
                for m in range(-lower, n + j + 1):
                    coefficient = table.alpha(j, m)
                    if coefficient:
                        acc = acc + basis.f(m, lower) * coefficient
            polys[ell] = acc * norm
    else:
        logger.debug(f"Basis window [{m_lo}, {m_hi}] is empty; all polynomials vanish")

    return SeriesSolution(n, params, order, tuple(polys), eigen, norm, mode, table)


def total_E(sol: SeriesSolution, q0: Any) -> complex:
    """E_n = kappa^2 (1/12 - eta1/pi) - sum g(g-1) eta1/pi + E_n(q0)."""
    nome = as_nome(q0)
    to_c = sol.params.field.to_complex
    eta = eta1_over_pi(nome)
    kappa = to_c(sol.params.kappa)
    couplings = sum(to_c(g) * (to_c(g) - 1) for g in sol.params.g)
    series = sol.eigen.series.map(to_c, 0j).evaluate(nome.q)
    return kappa * kappa * (1 / 12 - eta) - couplings * eta + series


def _power(value: complex, exponent: complex) -> complex:
    """Principal power, refusing non-integer powers of near-zero values."""
    exponent = complex(exponent)
    if exponent == 0:
        return 1 + 0j
    integral = exponent.imag == 0 and float(exponent.real).is_integer()
    if value == 0:
        if exponent.real > 0:
            return 0j
        raise BranchHazardError("Non-positive power of a vanishing theta factor")
    if integral:
        return complex(value) ** int(exponent.real)
    if abs(value) < ZERO_TOL:
        raise BranchHazardError(f"Non-integer power {exponent} of a theta value near zero")
    return complex(value) ** exponent


def prefactor(x: complex, nome: Nome, g: Sequence[complex]) -> complex:
    """(2 q^(1/4))^(-g0-g1) prod theta_(nu+1)(x/2)^g_nu with the q^(1/4) factors cancelled."""
    value = complex(2) ** (-(g[0] + g[1]))
    for nu in range(4):
        value *= _power(theta_hat(nu + 1, x / 2, nome), g[nu])
    return value


def eval_psi(sol: SeriesSolution, x: complex, tau: complex) -> complex:
    """psi_n(x) at tau, with P_n truncated at order N.

    Raises:
        DomainError: If Im(tau) <= 0
        BranchHazardError: Near a theta zero under a non-integer power
    """
    nome = Nome.from_tau(tau)
    to_c = sol.params.field.to_complex
    g = [to_c(v) for v in sol.params.g]
    x = complex(x)
    return prefactor(x, nome, g) * sol.poly_value(cmath.cos(x), nome.q)


def second_difference(f: Callable[[complex], complex], x: complex, h: float) -> complex:
    """Fourth-order central stencil for f''."""
    return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h)


def first_difference(f: Callable[[complex], complex], t: complex, h: float) -> complex:
    """Fourth-order central stencil for f'."""
    return (-f(t + 2 * h) + 8 * f(t + h) - 8 * f(t - h) + f(t - 2 * h)) / (12 * h)


def potential(x: complex, tau: complex, g: Sequence[complex], omega1: Optional[complex] = None) -> complex:
    """sum_nu g_nu (g_nu - 1) wp(x + omega_nu), in the rescaled lattice when omega1 is given."""
    periods = HalfPeriods(complex(tau))
    scale = 1 if omega1 is None else math.pi / complex(omega1)
    total = 0j
    for nu in range(4):
        coupling = g[nu] * (g[nu] - 1)
        if coupling == 0:
            continue
        shifted = complex(x) + periods[nu] / scale
        if omega1 is None:
            total += coupling * wp(shifted, tau)
        else:
            total += coupling * wp_scaled(shifted, omega1, tau)
    return total


def _rescaled(
    sol: SeriesSolution, tau: complex, omega1: Optional[complex]
) -> Tuple[Callable[[complex], complex], complex]:
    def psi(x: complex) -> complex:
        return eval_psi(sol, x, tau)

    energy = total_E(sol, Nome.from_tau(tau))
    if omega1 is None:
        return psi, energy
    return scale_map(omega1, psi, energy)


def eval_solution(
    sol: SeriesSolution, x: complex, tau: complex, omega1: Optional[complex] = None
) -> Tuple[complex, complex]:
    """psi_n(x) and E_n at tau, in the rescaled variables when ``omega1`` is given."""
    psi, energy = _rescaled(sol, complex(tau), omega1)
    return psi(complex(x)), energy


def residual(
    sol: SeriesSolution,
    x: complex,
    tau: complex,
    h: float = DEFAULT_STEP,
    omega1: Optional[complex] = None,
) -> complex:
    """(i/pi) kappa d/dtau psi - psi'' + V psi - E psi by central differences.

    With ``omega1`` the equation is the rescaled one, (i pi / omega1^2) kappa d/dtau
    with the Weierstrass function of half periods (omega1, omega1 tau).

    Raises:
        DomainError: Near a pole of the potential
    """
    x, tau = complex(x), complex(tau)
    to_c = sol.params.field.to_complex
    g = [to_c(v) for v in sol.params.g]
    kappa = to_c(sol.params.kappa)
    scale = 1 if omega1 is None else math.pi / complex(omega1)

    psi, energy = _rescaled(sol, tau, omega1)
    center = psi(x)
    d2x = second_difference(psi, x, h)
    dtau = 0j
    if kappa:
        dtau = first_difference(lambda t: _rescaled(sol, t, omega1)[0](x), tau, h)
    return (
        1j / math.pi * scale * scale * kappa * dtau
        - d2x
        + potential(x, tau, g, omega1) * center
        - energy * center
    )


def relative_residual(
    sol: SeriesSolution,
    x: complex,
    tau: complex,
    h: float = DEFAULT_STEP,
    omega1: Optional[complex] = None,
) -> float:
    """|residual| / max(|E psi|, |psi|)."""
    return abs(residual(sol, x, tau, h, omega1)) / _residual_scale(sol, x, tau, omega1)


def richardson_residual(
    sol: SeriesSolution,
    x: complex,
    tau: complex,
    h: float = DEFAULT_STEP,
    omega1: Optional[complex] = None,
) -> Tuple[float, float]:
    """Relative residual with the h^4 stencil error removed by step halving.

    Returns:
        (|16 R(h/2) - R(h)| / 15, |R(h) - R(h/2)|), both relative to max(|E psi|, |psi|);
        the second is the stencil error left in R(h), rounding included
    """
    scale = _residual_scale(sol, x, tau, omega1)
    coarse = residual(sol, x, tau, h, omega1)
    fine = residual(sol, x, tau, h / 2, omega1)
    return abs(16 * fine - coarse) / 15 / scale, abs(coarse - fine) / scale


def _residual_scale(
    sol: SeriesSolution, x: complex, tau: complex, omega1: Optional[complex]
) -> float:
    psi, energy = _rescaled(sol, complex(tau), omega1)
    value = psi(complex(x))
    return max(abs(energy * value), abs(value), 1e-300)


def kernel_function(x: complex, y: complex, tau: complex, params: Params) -> complex:
    """K(x, y) = prod theta_(nu+1)(x/2)^g_nu theta_(nu+1)(y/2)^gt_nu / (theta_1((x+y)/2) theta_1((x-y)/2))^lam.

    The q^(1/4) factors of theta_1, theta_2 cancel between numerator and denominator.
    """
    nome = Nome.from_tau(tau)
    to_c = params.field.to_complex
    g = [to_c(v) for v in params.g]
    gt = [to_c(v) for v in params.gt]
    lam = to_c(params.lam)
    x, y = complex(x), complex(y)
    value = 1 + 0j
    for nu in range(4):
        value *= _power(theta_hat(nu + 1, x / 2, nome), g[nu])
        value *= _power(theta_hat(nu + 1, y / 2, nome), gt[nu])
    value /= _power(theta_hat(1, (x + y) / 2, nome), lam)
    value /= _power(theta_hat(1, (x - y) / 2, nome), lam)
    return value


def kernel_check(
    x: complex,
    y: complex,
    tau: complex,
    params: Params,
    h: float = DEFAULT_STEP,
    c11_shift: complex = 0,
) -> complex:
    """((i/pi) kappa d/dtau + H(x; g) - H(y; gt) - C11) K(x, y) with C11 = 2 kappa (1 - lam) eta1/pi.

    ``c11_shift`` is added to C11.
    """
    x, y, tau = complex(x), complex(y), complex(tau)
    to_c = params.field.to_complex
    g = [to_c(v) for v in params.g]
    gt = [to_c(v) for v in params.gt]
    kappa = to_c(params.kappa)
    lam = to_c(params.lam)

    k0 = kernel_function(x, y, tau, params)
    hx = -second_difference(lambda u: kernel_function(u, y, tau, params), x, h)
    hx += potential(x, tau, g) * k0
    hy = -second_difference(lambda u: kernel_function(x, u, tau, params), y, h)
    hy += potential(y, tau, gt) * k0
    dtau = 0j
    if kappa:
        dtau = first_difference(lambda t: kernel_function(x, y, t, params), tau, h)
    c11 = 2 * kappa * (1 - lam) * eta1_over_pi(Nome.from_tau(tau)) + c11_shift
    return 1j / math.pi * kappa * dtau + hx - hy - c11 * k0


def building_block(
    m: int, x: complex, tau: complex, params: Params, points: int = 512
) -> complex:
    """F_m(x) = (2 q^(1/4))^(-g0-g1) prod theta_(nu+1)(x/2)^g_nu f_m(cos x), f_m by quadrature."""
    nome = Nome.from_tau(tau)
    to_c = params.field.to_complex
    g = [to_c(v) for v in params.g]
    x = complex(x)
    return prefactor(x, nome, g) * f_contour(m, cmath.cos(x), nome, params, points)


def lemma_spot_check(
    n: int,
    params: Params,
    x: complex,
    tau: complex,
    *,
    h: float = DEFAULT_STEP,
    max_mu: int = 12,
    points: int = 512,
) -> complex:
    """((i/pi) kappa d/dtau + H(x)) F_n - (C0 + E_n^(0)) F_n + sum_{0<|mu|<=M} S_mu F_(n-mu).

    S_mu = sum_nu gt_nu (gt_nu - 1) (S_nu)_mu and
    C0 = kappa^2 (1/12 - eta1/pi) - sum g(g-1) eta1/pi. The result vanishes
    up to the cut |mu| <= M and the finite-difference error.
    """
    x, tau = complex(x), complex(tau)
    nome = Nome.from_tau(tau)
    to_c = params.field.to_complex
    g = [to_c(v) for v in params.g]
    gamma = [to_c(v) * (to_c(v) - 1) for v in params.gt]
    kappa = to_c(params.kappa)

    def block(m: int, xv: complex, tv: complex) -> complex:
        return building_block(m, xv, tv, params, points)

    center = block(n, x, tau)
    lhs = -second_difference(lambda u: block(n, u, tau), x, h) + potential(x, tau, g) * center
    if kappa:
        lhs += 1j / math.pi * kappa * first_difference(lambda t: block(n, x, t), tau, h)

    eta = eta1_over_pi(nome)
    c0 = kappa * kappa * (1 / 12 - eta) - sum(v * (v - 1) for v in g) * eta
    e0 = (n + (g[0] + g[1]) / 2) ** 2
    rhs = (c0 + e0) * center
    for mu in range(-max_mu, max_mu + 1):
        if mu == 0:
            continue
        s_mu = sum(gamma[nu] * wp_fourier(nu, mu, nome) for nu in range(4) if gamma[nu])
        if s_mu:
            rhs -= s_mu * block(n - mu, x, tau)
    return lhs - rhs


def s4_parameters(g: Sequence[Scalar]) -> Tuple[Scalar, Scalar, Scalar, Scalar]:
    """(c0, c1, c2, c3) = (g0+g2-1, g1+g3-1, g1-g3, g0-g2)."""
    return (g[0] + g[2] - 1, g[1] + g[3] - 1, g[1] - g[3], g[0] - g[2])


def s4_inverse(c: Sequence[Scalar]) -> Tuple[Scalar, Scalar, Scalar, Scalar]:
    """Couplings g0..g3 with the given (c0, c1, c2, c3)."""
    return (
        (c[0] + c[3] + 1) / 2,
        (c[1] + c[2] + 1) / 2,
        (c[0] - c[3] + 1) / 2,
        (c[1] - c[2] + 1) / 2,
    )


def s4_check(
    n: int,
    params: Params,
    order: int,
    permutation: Sequence[int],
    *,
    eps_res: float = DEFAULT_EPS_RES,
) -> Any:
    """max_l |E_n^(l) - E_n^(l)(sigma)| after permuting (c0, c1, c2, c3) by sigma.

    The invariance holds at kappa = 0; for kappa != 0 the deviation is
    generically nonzero.

    Raises:
        PreconditionError: If ``permutation`` is not a permutation of 0..3
        ResonanceError: If the permuted couplings are resonant
    """
    if sorted(permutation) != [0, 1, 2, 3]:
        raise PreconditionError(f"Not a permutation of 0..3: {list(permutation)}")
    c = s4_parameters(params.g)
    permuted = params.with_g(s4_inverse([c[i] for i in permutation]))
    _, base = alg1(n, params, order, window=WINDOW_EIGEN, eps_res=eps_res)
    _, other = alg1(n, permuted, order, window=WINDOW_EIGEN, eps_res=eps_res)
    field = params.field
    return max(
        field.deviation(a, b) for a, b in zip(base.coefficients, other.coefficients)
    )


# (gt0, gt1) and lam - g for the four integral representations
DUAL_PATTERNS = {
    1: ((0, 0), 0),
    2: ((1, 0), 1),
    3: ((0, 1), 1),
    4: ((1, 1), 1),
}


def jacobi_integral_values(
    variant: int, n: int, g: Any, z0: complex, points: int = 512
) -> Tuple[complex, complex]:
    """Both sides of an integral representation of P_n^(g0-1/2, g1-1/2)(z0).

    The left side is N_n f_n(z0) at q = 0 by contour quadrature, with
    (gt0, gt1, lam) = (0, 0, g), (1, 0, g+1), (0, 1, g+1) or (1, 1, g+1).

    Raises:
        PreconditionError: If the variant or n is out of range
    """
    if variant not in DUAL_PATTERNS:
        raise PreconditionError(f"Integral variant must be 1..4, got {variant}")
    if n < 0:
        raise PreconditionError(f"Integral representations need n >= 0, got {n}")
    field = RATIONAL if isinstance(g, (int, Fraction)) else ComplexField()
    (gt0, gt1), shift = DUAL_PATTERNS[variant]
    params = Params.from_dual((gt0, gt1, 0, 0), field.coerce(g) + shift, field)
    to_c = field.to_complex
    lhs = to_c(normalization(n, params)) * f_contour(n, complex(z0), 0, params, points)
    half = field.coerce(1) / 2
    poly = jacobi_poly(n, params.g[0] - half, params.g[1] - half, field)
    rhs = complex(poly(complex(z0)))
    return lhs, rhs


def jacobi_integral_check(
    variant: int, n: int, g: Any, z0: complex, tol: float = 1e-8, points: int = 512
) -> bool:
    """Whether quadrature and Jacobi polynomial agree to ``tol`` (relative to max(1, |P|))."""
    lhs, rhs = jacobi_integral_values(variant, n, g, z0, points)
    return abs(lhs - rhs) <= tol * max(1.0, abs(rhs))
