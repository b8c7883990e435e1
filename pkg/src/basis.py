"""Basis functions f_m(z) of the elliptic expansion.

The f_m are the Laurent coefficients in xi of

    prod_nu Theta_{nu+1}(xi)^{gt_nu} / Theta(z, xi)^lam,

expanded as power series in the nome q with polynomial coefficients in z.
``f_table`` is the authoritative expansion; ``f0_closed`` is an independent
closed form at q = 0 and ``f_contour`` a numeric contour-quadrature oracle.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field as dataclass_field
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from .exceptions import BasisWindowError, BranchHazardError, DomainError, PreconditionError
from .seriescore import (
    RATIONAL,
    LaurentXi,
    QSeries,
    Scalar,
    ScalarField,
    ZPoly,
    binomial,
    unit_pow,
)
from .specfun import Nome, as_nome, big_theta_factors, big_theta_nu_factors, gegenbauer


logger = logging.getLogger(__name__)

BRANCH_EPS = 1e-6


@dataclass(frozen=True)
class Params:
    """Couplings g_0..g_3 and kappa; lam and gt are always derived from them."""

    g: Tuple[Scalar, Scalar, Scalar, Scalar]
    kappa: Scalar
    field: ScalarField = RATIONAL

    @classmethod
    def create(cls, g: Sequence[Any], kappa: Any, field: ScalarField = RATIONAL) -> "Params":
        """Build parameters, converting every value into ``field``.

        Raises:
            PreconditionError: If not exactly four couplings are given
        """
        if len(g) != 4:
            raise PreconditionError(f"Expected four couplings g0..g3, got {len(g)}")
        return cls(tuple(field.coerce(v) for v in g), field.coerce(kappa), field)

    @classmethod
    def from_dual(cls, gt: Sequence[Any], lam: Any, field: ScalarField = RATIONAL) -> "Params":
        """Build parameters from the dual exponents gt_0..gt_3 and lam."""
        lam = field.coerce(lam)
        g = [lam - field.coerce(v) for v in gt]
        return cls.create(g, sum(g, field.zero) - 2 * lam, field)

    @property
    def lam(self) -> Scalar:
        return (sum(self.g, self.field.zero) - self.kappa) / 2

    @property
    def gt(self) -> Tuple[Scalar, Scalar, Scalar, Scalar]:
        lam = self.lam
        return tuple(lam - v for v in self.g)  # type: ignore[return-value]

    @property
    def g01(self) -> Scalar:
        return self.g[0] + self.g[1]

    def P(self, n: int) -> Scalar:
        """P = 2n + g0 + g1, the only way n enters the recursions."""
        return 2 * n + self.g01

    @property
    def minus_lam_in_n0(self) -> bool:
        return self.field.is_nonpositive_integer(self.lam)

    @property
    def minus_g01_in_n0(self) -> bool:
        return self.field.is_nonpositive_integer(self.g01)

    @property
    def kappa_is_zero(self) -> bool:
        return not self.field.is_unit(self.kappa)

    def with_g(self, g: Sequence[Any]) -> "Params":
        return Params.create(g, self.kappa, self.field)

    def with_kappa(self, kappa: Any) -> "Params":
        return Params.create(self.g, kappa, self.field)

    def in_field(self, field: ScalarField) -> "Params":
        """Same couplings in another scalar field (rational to complex)."""
        if field.exact:
            return Params.create(self.g, self.kappa, field)
        return Params.create([complex(v) for v in self.g], complex(self.kappa), field)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "g": [self.field.serialize(v) for v in self.g],
            "kappa": self.field.serialize(self.kappa),
            "lambda": self.field.serialize(self.lam),
            "scalar": self.field.name,
        }


@dataclass(frozen=True)
class BasisTable:
    """f_m^(l)(z) for m in [m_lo, m_hi], l <= order."""

    params: Params
    order: int
    m_lo: int
    m_hi: int
    series: Dict[int, QSeries] = dataclass_field(default_factory=dict)

    def f(self, m: int, ell: int) -> ZPoly:
        """The polynomial f_m^(ell).

        Raises:
            BasisWindowError: If m or ell lies outside the table
        """
        if not self.m_lo <= m <= self.m_hi or not 0 <= ell <= self.order:
            raise BasisWindowError(
                f"f_{m}^({ell}) outside table window [{self.m_lo}, {self.m_hi}], order {self.order}"
            )
        return self.series[m][ell]

    def evaluate(self, m: int, z0: complex, q0: complex) -> complex:
        """sum_l f_m^(l)(z0) q0^l."""
        total = 0j
        for ell in range(self.order, -1, -1):
            total = total * q0 + complex(self.f(m, ell)(z0))
        return total


def _poly_laurent(
    terms: Dict[Tuple[int, int], ZPoly], order: int, field: ScalarField
) -> LaurentXi:
    """LaurentXi from {(xi exponent, q power): polynomial}."""
    zero = ZPoly.zero(field)
    grouped: Dict[int, list] = {}
    for (m, power), coeff in terms.items():
        if power > order:
            continue
        grouped.setdefault(m, [zero] * (order + 1))
        grouped[m][power] = grouped[m][power] + coeff
    series = {m: QSeries(c, field, zero) for m, c in grouped.items()}
    return LaurentXi(series, order, field, zero)


def _seed(params: Params, order: int, top: int) -> LaurentXi:
    """q = 0 part (1 - xi)^gt0 (1 + xi)^gt1 (1 - 2 z xi + xi^2)^(-lam) for exponents 0..top."""
    field = params.field
    gt = params.gt
    lam = params.lam
    window = (0, top)
    one = ZPoly.constant(field.one, field)
    minus = _poly_laurent(
        {(j, 0): one * (binomial(gt[0], j, field) * (-1) ** j) for j in range(top + 1)},
        order, field,
    )
    plus = _poly_laurent(
        {(j, 0): one * binomial(gt[1], j, field) for j in range(top + 1)}, order, field
    )
    generating = _poly_laurent(
        {(j, 0): gegenbauer(j, lam, field) for j in range(top + 1)}, order, field
    )
    return minus.mul(plus, window).mul(generating, window)


def _carrier(params: Params, order: int) -> LaurentXi:
    """Product of every q-carrying factor of the generating function."""
    field = params.field
    gt = params.gt
    lam = params.lam
    one = ZPoly.constant(field.one, field)
    z = ZPoly.z(field)
    unit = _poly_laurent({(0, 0): one}, order, field)
    carrier = unit
    for k in range(1, order + 1):
        # even powers of q carry Theta_1, Theta_2; odd powers Theta_4, Theta_3
        plus, minus = (gt[0], gt[1]) if k % 2 == 0 else (gt[3], gt[2])
        for side in (1, -1):
            for sign, exponent in ((1, plus), (-1, minus)):
                if not exponent:
                    continue
                factor = _poly_laurent({(0, 0): one, (side, k): one * (-sign)}, order, field)
                carrier = carrier * unit_pow(factor, exponent)
        if k % 2 == 0 and lam:
            for side in (1, -1):
                factor = _poly_laurent(
                    {(0, 0): one, (side, k): z * (-2), (2 * side, 2 * k): one}, order, field
                )
                carrier = carrier * unit_pow(factor, -lam)
    return carrier


def f_table(
    params: Params, order: int, m_lo: int, m_hi: int, margin: Optional[int] = None
) -> BasisTable:
    """Expand the generating function into f_m^(l)(z), m_lo <= m <= m_hi, l <= order.

    Args:
        params: Couplings
        order: Truncation order N in q
        m_lo: Lowest xi exponent wanted
        m_hi: Highest xi exponent wanted
        margin: Extra room kept beyond the window (default 2N)

    Returns:
        BasisTable for the window

    Raises:
        BasisWindowError: If the window is empty, or the margin is too small to hold
            every contribution to a requested coefficient
    """
    if m_hi < m_lo:
        raise BasisWindowError(f"Empty basis window [{m_lo}, {m_hi}]")
    if order < 0:
        raise BasisWindowError(f"Truncation order must be non-negative, got {order}")
    margin = 2 * order if margin is None else margin
    field = params.field
    logger.debug(f"Expanding basis for m in [{m_lo}, {m_hi}], order {order}, margin {margin}")

    top = m_hi + margin
    zero = ZPoly.zero(field)
    if top >= 0:
        seed = _seed(params, order, top)
        # seed terms beyond top feed exponents up to top + order through the carrier
        if seed.clipped and margin < order:
            raise BasisWindowError(
                f"Margin {margin} drops {seed.clipped} contributions to the requested window; "
                f"need at least {order}"
            )
        product = seed.mul(_carrier(params, order), (m_lo, m_hi))
    else:
        product = LaurentXi({}, order, field, zero)

    series = {m: product[m] for m in range(m_lo, m_hi + 1)}
    return BasisTable(params, order, m_lo, m_hi, series)


def f0_closed(m: int, params: Params) -> ZPoly:
    """Closed form of f_m at q = 0.

    Sum over (nu1, nu2, m') with nu0 = m + m' - nu1 - 2 nu2 >= 0 and m' <= nu2 of
    binom(gt0, nu0) binom(gt1, nu1) binom(-lam, nu2) binom(nu2, m') (-1)^nu0 (-2z)^m'.
    """
    field = params.field
    if m < 0:
        return ZPoly.zero(field)
    gt = params.gt
    lam = params.lam
    coeffs = [field.zero] * (m + 1)
    for nu2 in range(m + 1):
        outer = binomial(-lam, nu2, field)
        if not outer:
            continue
        for nu1 in range(m - nu2 + 1):
            for mp in range(nu2 + 1):
                nu0 = m + mp - nu1 - 2 * nu2
                if nu0 < 0:
                    continue
                coeffs[mp] = coeffs[mp] + (
                    binomial(gt[0], nu0, field)
                    * binomial(gt[1], nu1, field)
                    * outer
                    * math.comb(nu2, mp)
                    * (-1) ** nu0
                    * (-2) ** mp
                )
    return ZPoly(coeffs, field)


def _principal_power(values: np.ndarray, exponent: complex) -> np.ndarray:
    """Principal-branch power of one factor sampled on the contour.

    Raises:
        BranchHazardError: If the factor comes near zero, or a non-integer power
            would leave the disc where the principal branch matches the binomial series
    """
    if float(np.min(np.abs(values))) < BRANCH_EPS:
        raise BranchHazardError("Generating-function factor vanishes on the contour")
    exponent = complex(exponent)
    if exponent.imag == 0 and float(exponent.real).is_integer():
        return values ** int(exponent.real)
    if float(np.max(np.abs(values - 1))) >= 1:
        raise BranchHazardError("Contour leaves the principal-branch disc of a factor")
    return np.power(values, exponent)


def generating_integrand(
    xi: np.ndarray, z0: complex, q0: Nome, gt: Sequence[complex], lam: complex
) -> np.ndarray:
    """prod Theta_{nu+1}(xi)^gt_nu / Theta(z0, xi)^lam sampled at ``xi``."""
    values = np.ones_like(xi, dtype=complex)
    for nu in range(4):
        if gt[nu] == 0:
            continue
        for factor in big_theta_nu_factors(nu + 1, xi, q0):
            values = values * _principal_power(factor, gt[nu])
    if lam != 0:
        for factor in big_theta_factors(z0, xi, q0, split=True):
            values = values * _principal_power(factor, -lam)
    return values


def contour_coefficient(values: np.ndarray, xi: np.ndarray, m: int) -> complex:
    """Trapezoid rule (1/K) sum_j xi_j^(-m) values_j on an equispaced circle."""
    return complex(np.mean(xi ** (-m) * values))


def contour_points(radius: float, points: int) -> np.ndarray:
    return radius * np.exp(2j * np.pi * np.arange(points) / points)


def f_contour(
    m: int,
    z0: complex,
    q0: Any,
    params: Params,
    points: int = 512,
    radius: Optional[float] = None,
) -> complex:
    """f_m(z0) at nome q0 by trapezoid quadrature on |xi| = R.

    Raises:
        DomainError: If R does not satisfy |q0| < R < 1
        BranchHazardError: If a factor of the integrand is near zero on the contour
    """
    nome = as_nome(q0)
    radius = max(0.5, (1 + abs(nome.q)) / 2) if radius is None else radius
    if not abs(nome.q) < radius < 1:
        raise DomainError(f"Contour radius {radius} must satisfy |q| < R < 1")
    to_c = params.field.to_complex
    xi = contour_points(radius, points)
    values = generating_integrand(
        xi, complex(z0), nome, [to_c(v) for v in params.gt], to_c(params.lam)
    )
    return contour_coefficient(values, xi, m)
