"""Elliptic and classical special functions.

Jacobi theta functions, the Theta products of the generating function, the
Weierstrass function with half periods (pi, pi*tau) and its Fourier data,
eta1/pi, the Euler product G, Jacobi and Gegenbauer polynomials, and the
rescaling to a general real half period omega1.

Numeric routines accept Python complex numbers or numpy arrays; the series
routines return ``QSeries`` over any ``ScalarField``.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple, Union

import numpy as np

from .exceptions import DomainError, ScalarError
from .seriescore import QSeries, ScalarField, ZPoly, pochhammer


logger = logging.getLogger(__name__)

THETA_TOL = 1e-18
WP_TOL = 1e-16
LATTICE_EPS = 1e-8
MAX_TERMS = 4000

ComplexLike = Union[complex, float, np.ndarray]


@dataclass(frozen=True)
class Nome:
    """The nome q = exp(i*pi*tau), optionally remembering tau to fix branches."""

    q: complex
    tau: Optional[complex] = None

    def __post_init__(self):
        if abs(self.q) >= 1:
            raise DomainError(f"Nome must satisfy |q| < 1, got {self.q}")
        if self.tau is not None and complex(self.tau).imag <= 0:
            raise DomainError(f"tau must lie in the upper half plane, got {self.tau}")

    @classmethod
    def from_tau(cls, tau: complex) -> "Nome":
        tau = complex(tau)
        if tau.imag <= 0:
            raise DomainError(f"tau must lie in the upper half plane, got {tau}")
        return cls(cmath.exp(1j * math.pi * tau), tau)

    @classmethod
    def from_q(cls, q: complex) -> "Nome":
        return cls(complex(q))

    def power(self, exponent: complex) -> complex:
        """q**exponent, on the branch exp(i*pi*tau*exponent) when tau is known."""
        if self.tau is not None:
            return cmath.exp(1j * math.pi * self.tau * exponent)
        if self.q == 0:
            return 0j if complex(exponent).real > 0 else 1 + 0j
        return complex(self.q) ** exponent

    def quarter(self) -> complex:
        return self.power(0.25)


def as_nome(q: Union[Nome, complex, float]) -> Nome:
    return q if isinstance(q, Nome) else Nome.from_q(q)


@dataclass(frozen=True)
class HalfPeriods:
    """Half periods omega_0..omega_3 = 0, pi, -pi-pi*tau, pi*tau."""

    tau: complex

    @property
    def omegas(self) -> Tuple[complex, complex, complex, complex]:
        tau = complex(self.tau)
        return (0j, complex(math.pi), -math.pi - math.pi * tau, math.pi * tau)

    def __getitem__(self, nu: int) -> complex:
        return self.omegas[nu]


def parity(k: int) -> int:
    """(-1)**k as an int, also for negative k."""
    return -1 if k % 2 else 1


def _finish(value: np.ndarray, scalar: bool):
    return complex(value) if scalar else value


def _converged(term: np.ndarray, total: np.ndarray, tol: float) -> bool:
    size = float(np.max(np.abs(total))) if np.size(total) else 0.0
    return float(np.max(np.abs(term))) <= tol * max(size, 1e-300)


def theta(nu: int, x: ComplexLike, q: Union[Nome, complex], *, reduced: bool = False):
    """Jacobi theta function theta_nu(x) with nome q.

    Args:
        nu: 1..4
        x: Argument (complex or numpy array)
        q: Nome or nome value
        reduced: For nu = 1, 2 divide out the factor q**(1/4)

    Returns:
        Value of the defining series, summed until terms fall below 1e-18 of the total

    Raises:
        DomainError: If |q| >= 1 or the series does not settle
    """
    if nu not in (1, 2, 3, 4):
        raise DomainError(f"Theta index must be 1..4, got {nu}")
    nome = as_nome(q)
    qq = complex(nome.q)
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=complex)

    if nu in (1, 2):
        total = np.zeros_like(x)
        for n in range(MAX_TERMS):
            weight = qq ** (n * (n + 1))
            if nu == 1:
                term = 2 * (-1) ** n * weight * np.sin((2 * n + 1) * x)
            else:
                term = 2 * weight * np.cos((2 * n + 1) * x)
            total = total + term
            if n > 0 and _converged(term, total, THETA_TOL):
                break
        else:
            raise DomainError(f"theta_{nu} series did not converge for q={qq}")
        if not reduced:
            total = total * nome.quarter()
        return _finish(total, scalar)

    total = np.ones_like(x)
    sign = -1 if nu == 4 else 1
    for n in range(1, MAX_TERMS):
        term = 2 * sign ** n * qq ** (n * n) * np.cos(2 * n * x)
        total = total + term
        if _converged(term, total, THETA_TOL):
            break
    else:
        raise DomainError(f"theta_{nu} series did not converge for q={qq}")
    return _finish(total, scalar)


def theta_hat(nu: int, x: ComplexLike, q: Union[Nome, complex]):
    """theta_nu with the q**(1/4) factor of theta_1, theta_2 removed."""
    return theta(nu, x, q, reduced=True)


def _q_orders(q: complex, scale: float) -> int:
    """Largest k with |q|**k * scale above the product cut-off."""
    if q == 0:
        return 0
    k = 0
    while abs(q) ** (k + 1) * scale >= THETA_TOL:
        k += 1
        if k > MAX_TERMS:
            raise DomainError(f"Product for q={q} does not settle")
    return k


def big_theta_nu_factors(nu: int, xi: ComplexLike, q: Union[Nome, complex]) -> List[np.ndarray]:
    """Individual factors of Theta_nu(xi); their product is ``big_theta_nu``."""
    if nu not in (1, 2, 3, 4):
        raise DomainError(f"Theta index must be 1..4, got {nu}")
    qq = complex(as_nome(q).q)
    xi = np.asarray(xi, dtype=complex)
    sign = 1 if nu in (1, 3) else -1
    spread = float(np.max(np.maximum(np.abs(xi), 1 / np.abs(xi))))
    kmax = _q_orders(qq, spread)
    factors: List[np.ndarray] = []
    if nu in (1, 2):
        factors.append(1 - sign * xi)
        for k in range(2, kmax + 1, 2):
            factors.append(1 - sign * qq ** k * xi)
            factors.append(1 - sign * qq ** k / xi)
    else:
        for k in range(1, kmax + 1, 2):
            factors.append(1 + sign * qq ** k * xi)
            factors.append(1 + sign * qq ** k / xi)
    return factors


def big_theta_nu(nu: int, xi: ComplexLike, q: Union[Nome, complex]):
    """Theta_1(xi) = (1-xi) prod (1-q^2n xi)(1-q^2n/xi); Theta_2(xi) = Theta_1(-xi);
    Theta_3(xi) = prod (1+q^(2n-1) xi)(1+q^(2n-1)/xi); Theta_4(xi) = Theta_3(-xi)."""
    scalar = np.ndim(xi) == 0
    result = np.ones_like(np.asarray(xi, dtype=complex))
    for factor in big_theta_nu_factors(nu, xi, q):
        result = result * factor
    return _finish(result, scalar)


def big_theta_factors(
    z: complex, xi: ComplexLike, q: Union[Nome, complex], *, split: bool = False
) -> List[np.ndarray]:
    """Factors of Theta(z, xi).

    With ``split`` every quadratic factor 1 - 2 a z xi + a^2 xi^2 is returned
    as the two linear factors (1 - a xi / r)(1 - a xi / r') where r, r' are
    the roots of r^2 - 2 z r + 1.
    """
    qq = complex(as_nome(q).q)
    z = complex(z)
    xi = np.asarray(xi, dtype=complex)
    spread = float(np.max(np.maximum(np.abs(xi), 1 / np.abs(xi)))) ** 2
    kmax = _q_orders(qq, spread)
    root = cmath.sqrt(z * z - 1)
    r_plus, r_minus = z + root, z - root
    factors: List[np.ndarray] = []

    def add(a: complex, var: np.ndarray) -> None:
        if split:
            factors.append(1 - a * var / r_plus)
            factors.append(1 - a * var / r_minus)
        else:
            factors.append(1 - 2 * a * z * var + a * a * var * var)

    add(1 + 0j, xi)
    for k in range(2, kmax + 1, 2):
        add(qq ** k, xi)
        add(qq ** k, 1 / xi)
    return factors


def big_theta(z: complex, xi: ComplexLike, q: Union[Nome, complex]):
    """Theta(z, xi) = (1 - 2 z xi + xi^2) prod (1 - 2 q^2n xi z + q^4n xi^2)(1 - 2 q^2n z/xi + q^4n/xi^2)."""
    scalar = np.ndim(xi) == 0
    result = np.ones_like(np.asarray(xi, dtype=complex))
    for factor in big_theta_factors(z, xi, q):
        result = result * factor
    return _finish(result, scalar)


def euler_G(q: Union[Nome, complex]) -> complex:
    """G = prod_{n>=1} (1 - q^2n)."""
    qq = complex(as_nome(q).q)
    result = 1 + 0j
    for k in range(2, _q_orders(qq, 1.0) + 1, 2):
        result *= 1 - qq ** k
    return result


def eta1_over_pi(q: Union[Nome, complex]) -> complex:
    """eta_1 / pi = 1/12 - sum_n 2 q^2n / (1 - q^2n)^2."""
    qq = complex(as_nome(q).q)
    total = 1 / 12 + 0j
    for k in range(2, _q_orders(qq, 1.0) + 1, 2):
        total -= 2 * qq ** k / (1 - qq ** k) ** 2
    return total


def eta1_over_pi_series(order: int, field: ScalarField) -> QSeries:
    """eta_1 / pi as a truncated q-series, expanding each q^2n/(1-q^2n)^2 = sum_j j q^(2nj)."""
    coeffs = [field.zero] * (order + 1)
    coeffs[0] = field.coerce(1) / 12
    for n in range(1, order // 2 + 1):
        for j in range(1, order // (2 * n) + 1):
            coeffs[2 * n * j] = coeffs[2 * n * j] - 2 * j
    return QSeries(coeffs, field)


def _check_lattice(x: complex, tau: complex) -> None:
    """Refuse x within LATTICE_EPS of 2*pi*(a + b*tau), a, b integers."""
    b = x.imag / (2 * math.pi * tau.imag)
    a = (x.real - 2 * math.pi * b * tau.real) / (2 * math.pi)
    for ai in (math.floor(a), math.ceil(a)):
        for bi in (math.floor(b), math.ceil(b)):
            if abs(x - 2 * math.pi * (ai + bi * tau)) < LATTICE_EPS:
                raise DomainError(f"x={x} lies on the period lattice of tau={tau}")


def wp(x: complex, tau: complex) -> complex:
    """Weierstrass function with half periods pi and pi*tau.

    Evaluated as -eta1/pi + sum_n 1/(4 sin^2((x + 2 n pi tau)/2)), summed
    symmetrically in n until the increments drop below 1e-16.

    Raises:
        DomainError: If Im(tau) <= 0 or x lies on the lattice
    """
    x = complex(x)
    tau = complex(tau)
    nome = Nome.from_tau(tau)
    _check_lattice(x, tau)
    total = -eta1_over_pi(nome) + 1 / (4 * cmath.sin(x / 2) ** 2)
    for n in range(1, MAX_TERMS):
        shift = 2 * n * math.pi * tau
        step = 1 / (4 * cmath.sin((x + shift) / 2) ** 2) + 1 / (4 * cmath.sin((x - shift) / 2) ** 2)
        total += step
        if abs(step) < WP_TOL * max(1.0, abs(total)):
            return total
    raise DomainError(f"Weierstrass sum did not settle at x={x}, tau={tau}")


def wp_scaled(x: complex, omega1: complex, tau: complex) -> complex:
    """Weierstrass function with half periods omega1 and omega1*tau."""
    if omega1 == 0:
        raise DomainError("omega1 must be nonzero")
    s = math.pi / complex(omega1)
    return s * s * wp(s * complex(x), tau)


def wp_fourier(nu: int, mu: int, q: Union[Nome, complex]) -> complex:
    """Fourier coefficient (S_nu)_mu of the shifted Weierstrass function."""
    if mu == 0:
        raise DomainError("Fourier index mu must be nonzero")
    if nu not in (0, 1, 2, 3):
        raise DomainError(f"Half period index must be 0..3, got {nu}")
    qq = complex(as_nome(q).q)
    m = abs(mu)
    shift = m - mu if nu in (0, 1) else m
    sign = parity(mu) if nu in (1, 2) else 1
    return sign * m * qq ** shift / (1 - qq ** (2 * m))


def wp_fourier_series(nu: int, mu: int, order: int, field: ScalarField) -> QSeries:
    """(S_nu)_mu as a truncated q-series: sign |mu| q^shift sum_j q^(2|mu|j).

    The mu = 0 mode is the constant -eta1/pi of the expansion and has no entry
    here; callers summing over mu skip it.

    Raises:
        DomainError: If mu is zero or nu is not 0..3
    """
    if mu == 0:
        raise DomainError("Fourier index mu must be nonzero")
    if nu not in (0, 1, 2, 3):
        raise DomainError(f"Half period index must be 0..3, got {nu}")
    m = abs(mu)
    shift = m - mu if nu in (0, 1) else m
    sign = parity(mu) if nu in (1, 2) else 1
    coeffs = [field.zero] * (order + 1)
    for power in range(shift, order + 1, 2 * m):
        coeffs[power] = field.coerce(sign * m)
    return QSeries(coeffs, field)


def wp_shifted_fourier(nu: int, x: complex, tau: complex) -> complex:
    """Weierstrass function at x + omega_nu from its Fourier expansion.

    -eta1/pi - sum_{mu != 0} (S_nu)_mu e^(i mu x), valid in the strip
    0 < Im x < 2 pi Im tau (nu = 0, 1) or |Im x| < pi Im tau (nu = 2, 3).

    Raises:
        DomainError: Outside the strip
    """
    x = complex(x)
    nome = Nome.from_tau(tau)
    height = math.pi * complex(tau).imag
    inside = 0 < x.imag < 2 * height if nu in (0, 1) else abs(x.imag) < height
    if not inside:
        raise DomainError(f"x={x} is outside the Fourier strip for half period {nu}")
    total = -eta1_over_pi(nome)
    for m in range(1, MAX_TERMS):
        step = -(
            wp_fourier(nu, m, nome) * cmath.exp(1j * m * x)
            + wp_fourier(nu, -m, nome) * cmath.exp(-1j * m * x)
        )
        total += step
        if m > 2 and abs(step) < WP_TOL * max(1.0, abs(total)):
            return total
    raise DomainError(f"Fourier series of the Weierstrass function did not settle at x={x}")


def jacobi_poly(n: int, alpha, beta, field: ScalarField) -> ZPoly:
    """Jacobi polynomial P_n^(alpha, beta)(z).

    sum_l (n+alpha+beta+1)_l (alpha+l+1)_(n-l) / (l! (n-l)!) ((z-1)/2)^l

    Raises:
        ScalarError: If n is negative
    """
    if n < 0:
        raise ScalarError(f"Jacobi polynomial degree must be non-negative, got {n}")
    half = ZPoly((field.coerce(-1) / 2, field.coerce(1) / 2), field)
    total = ZPoly.zero(field)
    power = ZPoly.constant(field.one, field)
    for ell in range(n + 1):
        weight = (
            pochhammer(n + alpha + beta + 1, ell, field)
            * pochhammer(alpha + ell + 1, n - ell, field)
            / (math.factorial(ell) * math.factorial(n - ell))
        )
        total = total + power * weight
        power = power * half
    return total


def gegenbauer(n: int, lam, field: ScalarField) -> ZPoly:
    """Gegenbauer polynomial C_n^(lam)(z).

    Uses C_n = (2 lam)_n / (lam + 1/2)_n P_n^(lam-1/2, lam-1/2) when the
    denominator is a unit, and the explicit power sum otherwise.
    """
    if n < 0:
        raise ScalarError(f"Gegenbauer polynomial degree must be non-negative, got {n}")
    half = field.coerce(1) / 2
    denominator = pochhammer(lam + half, n, field)
    if field.is_unit(denominator):
        ratio = pochhammer(2 * lam, n, field) / denominator
        return jacobi_poly(n, lam - half, lam - half, field) * ratio
    return gegenbauer_explicit(n, lam, field)


def gegenbauer_explicit(n: int, lam, field: ScalarField) -> ZPoly:
    """sum_k (-1)^k (lam)_(n-k) / (k! (n-2k)!) (2z)^(n-2k)."""
    coeffs = [field.zero] * (n + 1)
    for k in range(n // 2 + 1):
        power = n - 2 * k
        coeffs[power] = (
            (-1) ** k
            * pochhammer(lam, n - k, field)
            * 2 ** power
            / (math.factorial(k) * math.factorial(power))
        )
    return ZPoly(coeffs, field)


def scale_map(
    omega1: complex, psi: Callable[[complex], complex], energy: complex
) -> Tuple[Callable[[complex], complex], complex]:
    """Carry a solution for half period pi over to half period omega1.

    Returns:
        (x -> (pi/omega1)^(1/2) psi(pi x / omega1), (pi/omega1)^2 energy)

    Raises:
        DomainError: If omega1 vanishes
    """
    if omega1 == 0:
        raise DomainError("omega1 must be nonzero")
    s = math.pi / complex(omega1)
    root = cmath.sqrt(s)

    def scaled(x: complex) -> complex:
        return root * psi(s * x)

    return scaled, s * s * energy
