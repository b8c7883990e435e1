"""Solution engines for the expansion coefficients alpha_n^(l)(m) and eigenvalues.

Four engines produce the same data by different routes:

* ``alg1``: the recursion with eigenvalue corrections determined order by order,
  normalized by alpha_n^(l)(n) = delta(l, 0);
* ``alg2``: the recursion with the eigenvalue frozen at its q = 0 value, which
  needs kappa != 0 and normalizes only alpha_n^(0)(n) = 1;
* ``thm1_eigen``: the kappa = 0 fixed point E = Phi_n(E) on truncated q-series;
* ``thm2_alpha``: explicit enumeration of weighted step sequences for kappa != 0.

``bridge`` converts alg2 output into alg1 normalization. All recursions run
on offsets k = m - n over ``Couplings``: the data (P, gt(gt - 1), kappa) they
depend on.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field as dataclass_field
from typing import Dict, Iterator, List, Optional, Tuple

from .basis import Params
from .exceptions import (
    BasisWindowError,
    DomainError,
    HeunForgeError,
    PreconditionError,
    ResonanceError,
)
from .seriescore import QSeries, Scalar, ScalarField, qs_inv, resolvent
from .specfun import parity, wp_fourier_series


logger = logging.getLogger(__name__)

DEFAULT_EPS_RES = 1e-8

WINDOW_ASSEMBLY = "assembly"
WINDOW_EIGEN = "eigen"


@dataclass(frozen=True)
class Couplings:
    """Recursion data: P = 2n + g0 + g1, G_nu = gt_nu(gt_nu - 1) and kappa."""

    P: Scalar
    G: Tuple[Scalar, Scalar, Scalar, Scalar]
    kappa: Scalar
    field: ScalarField

    @classmethod
    def from_params(cls, n: int, params: Params) -> "Couplings":
        G = tuple(v * (v - 1) for v in params.gt)
        return cls(params.P(n), G, params.kappa, params.field)  # type: ignore[arg-type]

    def gamma(self, k: int, mu: int) -> Scalar:
        """gamma_k^mu: G0 + (-1)^mu G1 for even k, (-1)^mu G2 + G3 for odd k."""
        sign = parity(mu)
        if k % 2 == 0:
            return self.G[0] + sign * self.G[1]
        return sign * self.G[2] + self.G[3]

    def b(self, ell: int, k: int) -> Scalar:
        """b^(l)(k) = k(k + P) - kappa l."""
        return k * (k + self.P) - self.kappa * ell

    @property
    def e0(self) -> Scalar:
        """Zeroth eigenvalue (P/2)^2 = (n + (g0 + g1)/2)^2."""
        return self.P * self.P / 4

    def s_coeff(self, mu: int, ell: int) -> Scalar:
        """q^l coefficient of S_mu = sum_nu G_nu (S_nu)_mu."""
        zero = self.field.zero
        if mu == 0:
            return zero
        if ell == 0:
            return mu * self.gamma(0, mu) if mu > 0 else zero
        if ell % abs(mu):
            return zero
        return abs(mu) * self.gamma(ell // abs(mu), mu)

    def s_series(self, mu: int, order: int) -> QSeries:
        """S_mu as a truncated q-series built from the Fourier data of the shifted potentials.

        Only mu != 0 carries Fourier data; the walks of the fixed point never request S_0.

        Raises:
            DomainError: If mu is zero
        """
        if mu == 0:
            raise DomainError("S_mu is defined for mu != 0 only")
        total = QSeries.constant(self.field.zero, order, self.field)
        for nu in range(4):
            if self.G[nu]:
                total = total + wp_fourier_series(nu, mu, order, self.field).scale(self.G[nu])
        return total

    def swapped(self) -> "Couplings":
        """P -> -P with gamma_0 and gamma_1 exchanged."""
        return Couplings(-self.P, (self.G[3], self.G[2], self.G[1], self.G[0]), self.kappa, self.field)


def gamma_coeff(k: int, mu: int, params: Params) -> Scalar:
    """gamma_k^mu for the given couplings (independent of n)."""
    if k < 0:
        raise PreconditionError(f"gamma_k^mu needs k >= 0, got {k}")
    return Couplings.from_params(0, params).gamma(k, mu)


def b_denom(n: int, ell: int, k: int, params: Params) -> Scalar:
    """b_n^(l)(k) = k(k + 2n + g0 + g1) - kappa l."""
    return Couplings.from_params(n, params).b(ell, k)


@dataclass(frozen=True)
class ResonanceReport:
    """(order, mode) pairs whose denominator vanishes."""

    entries: Tuple[Tuple[int, int], ...] = ()

    def __bool__(self) -> bool:
        return bool(self.entries)

    def to_list(self) -> List[List[int]]:
        return [list(entry) for entry in self.entries]


@dataclass(frozen=True)
class EigenSeries:
    """Generalized eigenvalue corrections E_n^(l), l = 0..N."""

    n: int
    series: QSeries

    @property
    def e0(self) -> Scalar:
        return self.series[0]

    @property
    def coefficients(self) -> List[Scalar]:
        return list(self.series.coeffs)

    @property
    def order(self) -> int:
        return self.series.order


@dataclass(frozen=True)
class CoeffTable:
    """alpha_n^(l)(m) for l <= order and floor - (order - l) <= m <= n + l.

    ``tag`` is "I" (alpha^(l)(n) = delta(l, 0)) or "II" (only alpha^(0)(n) = 1).
    """

    n: int
    order: int
    tag: str
    couplings: Couplings
    floor: int
    values: Dict[Tuple[int, int], Scalar] = dataclass_field(default_factory=dict)

    @property
    def field(self) -> ScalarField:
        return self.couplings.field

    def m_lo(self, ell: int) -> int:
        return self.floor - (self.order - ell)

    def m_hi(self, ell: int) -> int:
        return self.n + ell

    def alpha(self, ell: int, m: int) -> Scalar:
        """alpha_n^(l)(m); zero above n + l.

        Raises:
            BasisWindowError: If m lies below the window of order l
        """
        if m > self.n + ell:
            return self.field.zero
        if m < self.m_lo(ell) or not 0 <= ell <= self.order:
            raise BasisWindowError(f"alpha^({ell})({m}) lies outside the computed window")
        return self.values[(ell, m)]

    def series_order(self, m: int) -> int:
        """Highest order l whose window still contains m."""
        return min(self.order, self.order + m - self.floor)

    def series(self, m: int) -> QSeries:
        """alpha_n(m) as a q-series, truncated where the windows end."""
        top = self.series_order(m)
        if top < 0:
            raise BasisWindowError(f"Mode {m} lies below every computed window")
        return QSeries([self.alpha(ell, m) for ell in range(top + 1)], self.field)

    def modes(self) -> range:
        return range(self.m_lo(0), self.n + self.order + 1)

    def scaled(self, factor: QSeries) -> "CoeffTable":
        """The table of C(q) alpha_n(m), a gauge transformation of the solution."""
        values: Dict[Tuple[int, int], Scalar] = {}
        for m in self.modes():
            top = self.series_order(m)
            product = self.series(m) * factor.truncate(top)
            for ell in range(top + 1):
                if m >= self.m_lo(ell) and m <= self.m_hi(ell):
                    values[(ell, m)] = product[ell]
        return CoeffTable(self.n, self.order, self.tag, self.couplings, self.floor, values)

    def entries(self) -> Iterator[Tuple[int, int, Scalar]]:
        for (ell, m) in sorted(self.values):
            yield ell, m, self.values[(ell, m)]


def check_preconditions(n: int, params: Params) -> None:
    """Refuse couplings where the normalization or the q = 0 solution breaks down.

    Raises:
        PreconditionError: If -lam is a non-negative integer and n > 0, or
            -(g0 + g1) is a non-negative integer and n < 0
    """
    if n > 0 and params.minus_lam_in_n0:
        raise PreconditionError(f"-lambda is a non-negative integer, mode n={n} is excluded")
    if n < 0 and params.minus_g01_in_n0:
        raise PreconditionError(f"-(g0+g1) is a non-negative integer, mode n={n} is excluded")


def _warn_outside_regime(params: Params) -> None:
    field = params.field
    if params.kappa_is_zero:
        if field.is_integer(params.g01):
            logger.warning("g0+g1 is an integer at kappa=0; results rely on nonzero denominators")
    elif field.is_real(params.kappa) or not field.is_real(params.g01):
        logger.warning(
            "Outside the regime Im(kappa) != 0 with real g0+g1; results rely on nonzero denominators"
        )


def _floor(n: int, window: str) -> int:
    if window == WINDOW_ASSEMBLY:
        return min(n, 0)
    if window == WINDOW_EIGEN:
        return n
    raise PreconditionError(f"Unknown window: {window}")


@dataclass
class RecursionResult:
    """Raw recursion output in offsets k = m - n."""

    values: Dict[Tuple[int, int], Scalar]
    eigen: List[Scalar]


def _scan(
    couplings: Couplings,
    order: int,
    k_floor: int,
    eps_res: float,
    include_origin: bool,
    n: int,
) -> None:
    """Collect every vanishing denominator of the window and abort if any.

    Raises:
        ResonanceError: If a needed denominator vanishes
    """
    bad = []
    for ell in range(order + 1):
        for k in range(ell, k_floor - (order - ell) - 1, -1):
            if k == 0 and (ell == 0 or not include_origin):
                continue
            if couplings.field.is_resonant(couplings.b(ell, k), eps_res):
                bad.append((ell, n + k))
    if bad:
        raise ResonanceError(ResonanceReport(tuple(bad)))


def run_recursion(
    couplings: Couplings,
    order: int,
    k_floor: int,
    *,
    fixed_eigenvalue: bool,
    eps_res: float = DEFAULT_EPS_RES,
    n: int = 0,
) -> RecursionResult:
    """Solve the differential-difference recursion on offsets.

    For each order l the offsets run from l down to k_floor - (N - l). For
    k != 0 (and, with a frozen eigenvalue, also k = 0 at l >= 1)

        b^(l)(k) a^(l)(k) = sum_{l'=1..l} E^(l') a^(l-l')(k)
                            + sum_{mu=1..l-k} mu gamma_0^mu a^(l)(k+mu)
                            + sum_{l'<l, mu>=1, j>=1, l=l'+j mu} mu gamma_j^mu
                              (a^(l')(k+mu) + a^(l')(k-mu)),

    and with free eigenvalue the k = 0 equation yields E^(l) since
    a^(l)(0) = delta(l, 0). The backward reach mu <= l - l' keeps every
    lookup inside the window of the lower order.

    Args:
        couplings: Recursion data
        order: Truncation order N
        k_floor: Offset floor; the window of order l starts at k_floor - (N - l)
        fixed_eigenvalue: Freeze E at (P/2)^2 (second algorithm)
        eps_res: Resonance threshold in float mode
        n: Mode index, only used to report resonances as absolute modes

    Raises:
        ResonanceError: If a denominator in the window vanishes
    """
    field = couplings.field
    zero = field.zero
    _scan(couplings, order, k_floor, eps_res, fixed_eigenvalue, n)
    values: Dict[Tuple[int, int], Scalar] = {}
    eigen = [zero] * (order + 1)
    eigen[0] = couplings.e0

    def value(ell: int, k: int) -> Scalar:
        if k > ell:
            return zero
        return values[(ell, k)]

    def coupling_sum(ell: int, k: int) -> Scalar:
        total = zero
        for mu in range(1, ell - k + 1):
            weight = couplings.gamma(0, mu)
            if weight:
                total = total + mu * weight * value(ell, k + mu)
        for lower in range(ell):
            gap = ell - lower
            for mu in range(1, gap + 1):
                for j in range(1, gap // mu + 1):
                    if ell != lower + j * mu:
                        continue
                    weight = couplings.gamma(j, mu)
                    if weight:
                        total = total + mu * weight * (value(lower, k + mu) + value(lower, k - mu))
        return total

    for ell in range(order + 1):
        for k in range(ell, k_floor - (order - ell) - 1, -1):
            if k == 0 and ell == 0:
                values[(0, 0)] = field.one
                continue
            if k == 0 and not fixed_eigenvalue:
                values[(ell, 0)] = zero
                eigen[ell] = -coupling_sum(ell, 0)
                continue
            numerator = coupling_sum(ell, k)
            if not fixed_eigenvalue:
                for lower in range(1, ell + 1):
                    if eigen[lower]:
                        numerator = numerator + eigen[lower] * value(ell - lower, k)
            values[(ell, k)] = field.div(numerator, couplings.b(ell, k))
    return RecursionResult(values, eigen)


def _table(
    n: int,
    order: int,
    tag: str,
    couplings: Couplings,
    floor: int,
    relative: Dict[Tuple[int, int], Scalar],
) -> CoeffTable:
    values = {(ell, n + k): v for (ell, k), v in relative.items()}
    return CoeffTable(n, order, tag, couplings, floor, values)


def alg1(
    n: int,
    params: Params,
    order: int,
    *,
    window: str = WINDOW_ASSEMBLY,
    eps_res: float = DEFAULT_EPS_RES,
) -> Tuple[CoeffTable, EigenSeries]:
    """First algorithm: coefficients and eigenvalue corrections order by order.

    Args:
        n: Mode index (any integer)
        params: Couplings
        order: Truncation order N
        window: "assembly" fills m >= min(n, 0) - (N - l), enough to assemble the
            polynomials; "eigen" fills only m >= n - (N - l), enough for the eigenvalue
        eps_res: Resonance threshold in float mode

    Returns:
        (CoeffTable tagged "I", EigenSeries)

    Raises:
        PreconditionError: On excluded couplings
        ResonanceError: If a denominator vanishes
    """
    check_preconditions(n, params)
    _warn_outside_regime(params)
    couplings = Couplings.from_params(n, params)
    floor = _floor(n, window)
    logger.debug(f"alg1: n={n}, order={order}, window floor {floor}")
    result = run_recursion(
        couplings, order, floor - n, fixed_eigenvalue=False, eps_res=eps_res, n=n
    )
    table = _table(n, order, "I", couplings, floor, result.values)
    return table, EigenSeries(n, QSeries(result.eigen, params.field))


def alg2(
    n: int,
    params: Params,
    order: int,
    *,
    window: str = WINDOW_ASSEMBLY,
    eps_res: float = DEFAULT_EPS_RES,
) -> CoeffTable:
    """Second algorithm: eigenvalue frozen at (n + (g0+g1)/2)^2, kappa != 0.

    The k = 0 equations at order l >= 1 use the denominator -kappa l.

    Raises:
        PreconditionError: If kappa vanishes or couplings are excluded
        ResonanceError: If a denominator vanishes
    """
    if params.kappa_is_zero:
        raise PreconditionError("The second algorithm needs kappa != 0")
    check_preconditions(n, params)
    _warn_outside_regime(params)
    couplings = Couplings.from_params(n, params)
    floor = _floor(n, window)
    logger.debug(f"alg2: n={n}, order={order}, window floor {floor}")
    result = run_recursion(
        couplings, order, floor - n, fixed_eigenvalue=True, eps_res=eps_res, n=n
    )
    return _table(n, order, "II", couplings, floor, result.values)


def bridge(table: CoeffTable) -> Tuple[CoeffTable, EigenSeries]:
    """Convert second-algorithm output to first-algorithm normalization.

    alpha^I(m) = alpha^II(m) / alpha^II(n) and
    E^I = E^(0) + kappa q d/dq alpha^II(n) / alpha^II(n).

    Raises:
        PreconditionError: If the table is not tagged "II"
        ScalarError: If alpha^II(n) has a non-unit constant term
    """
    if table.tag != "II":
        raise PreconditionError(f"bridge needs a table tagged II, got {table.tag}")
    couplings = table.couplings
    norm = table.series(table.n)
    inverse = qs_inv(norm)
    values: Dict[Tuple[int, int], Scalar] = {}
    for m in table.modes():
        top = table.series_order(m)
        ratio = table.series(m) * inverse.truncate(top)
        for ell in range(top + 1):
            if table.m_lo(ell) <= m <= table.m_hi(ell):
                values[(ell, m)] = ratio[ell]
    eigen = (norm.q_derivative() * inverse).scale(couplings.kappa) + couplings.e0
    bridged = CoeffTable(table.n, table.order, "I", couplings, table.floor, values)
    return bridged, EigenSeries(table.n, eigen)


@dataclass(frozen=True)
class PadeEigen:
    """E^(0) + kappa (a1 q + 2 a2 q^2) / (1 + a1 q) with a_l = alpha^II(l)(n)."""

    e0: Scalar
    kappa: Scalar
    a1: Scalar
    a2: Scalar
    field: ScalarField

    def __call__(self, q: Scalar) -> Scalar:
        return self.e0 + self.kappa * (self.a1 * q + 2 * self.a2 * q * q) / (1 + self.a1 * q)

    def series(self, order: int) -> QSeries:
        """Taylor expansion through q^order; agrees with the bridged eigenvalue through q^2."""
        field = self.field
        padding = [field.zero] * max(order - 1, 0)
        numerator = QSeries(([field.zero, self.a1, 2 * self.a2] + padding)[: order + 1], field)
        denominator = QSeries(([field.one, self.a1, field.zero] + padding)[: order + 1], field)
        return (numerator * qs_inv(denominator)).scale(self.kappa) + self.e0


def pade_eigen(table: CoeffTable) -> PadeEigen:
    """Rational [2/1] form of the bridged eigenvalue built from alpha^II(n) through q^2.

    Raises:
        PreconditionError: If the table is not tagged "II" or stops below order 2
    """
    if table.tag != "II":
        raise PreconditionError(f"pade_eigen needs a table tagged II, got {table.tag}")
    if table.order < 2:
        raise PreconditionError(f"pade_eigen needs order >= 2, got {table.order}")
    couplings = table.couplings
    norm = table.series(table.n)
    return PadeEigen(couplings.e0, couplings.kappa, norm[1], norm[2], couplings.field)


class _FixedPoint:
    """Truncated-series machinery for the kappa = 0 fixed point."""

    def __init__(self, couplings: Couplings, order: int):
        self.couplings = couplings
        self.order = order
        self.field = couplings.field
        self._s: Dict[int, QSeries] = {}

    def zero(self) -> QSeries:
        return QSeries.constant(self.field.zero, self.order, self.field)

    def s(self, mu: int) -> QSeries:
        """S_mu for mu != 0; callers never step in place, the constant part sits in E."""
        if mu not in self._s:
            self._s[mu] = self.couplings.s_series(mu, self.order)
        return self._s[mu]

    def resolvents(self, positions: range, energy: QSeries) -> Dict[int, QSeries]:
        return {k: resolvent(self.couplings.b(0, k), energy) for k in positions if k != 0}

    def phi(self, energy: QSeries) -> QSeries:
        """-sum over closed walks 0 -> p_1 -> ... -> 0 avoiding 0 in between.

        Each step mu carries S_mu, each intermediate offset p a resolvent
        1/(b(p) - E). Walks leave [-N, N] only at order > N, and use at most 2N steps.
        """
        order = self.order
        positions = range(-order, order + 1)
        res = self.resolvents(positions, energy)
        walks = {p: self.s(p) * res[p] for p in positions if p != 0}
        total = self.zero()
        for _ in range(2 * order):
            for p, w in walks.items():
                total = total + w * self.s(-p)
            extended: Dict[int, QSeries] = {}
            for target in positions:
                if target == 0:
                    continue
                acc = self.zero()
                for p, w in walks.items():
                    if p != target:
                        acc = acc + w * self.s(target - p)
                if not acc.is_zero():
                    extended[target] = acc * res[target]
            walks = {p: w for p, w in extended.items() if not w.is_zero()}
            if not walks:
                break
        return -total

    def coefficients(self, energy: QSeries, k_low: int) -> Dict[int, QSeries]:
        """alpha(k) = sum over walks k -> ... -> 0 with a resolvent at every offset before 0."""
        order = self.order
        positions = range(k_low - order, order + 1)
        res = self.resolvents(positions, energy)
        one = self.zero().unit()
        total: Dict[int, QSeries] = {k: self.zero() for k in positions}
        total[0] = one
        current = {0: one}
        for _ in range(len(positions) + 2 * order + 1):
            following: Dict[int, QSeries] = {}
            for k in positions:
                if k == 0:
                    continue
                acc = self.zero()
                for target, v in current.items():
                    if target != k:
                        acc = acc + self.s(target - k) * v
                if not acc.is_zero():
                    following[k] = res[k] * acc
            current = {k: v for k, v in following.items() if not v.is_zero()}
            if not current:
                break
            for k, v in current.items():
                total[k] = total[k] + v
        return total


def thm1_eigen(
    n: int, params: Params, order: int, *, eps_res: float = DEFAULT_EPS_RES
) -> Tuple[EigenSeries, CoeffTable]:
    """kappa = 0 eigenvalue as the fixed point of Phi_n, and the coefficients it induces.

    Starting from zero, N iterations of E <- Phi_n(E) fix one more q-order each;
    an extra iteration must reproduce the result.

    Raises:
        PreconditionError: If kappa != 0
        ResonanceError: If some b^(0)(k) in reach vanishes
        HeunForgeError: If the extra iteration changes the series
    """
    if not params.kappa_is_zero:
        raise PreconditionError("The fixed-point solution needs kappa = 0")
    check_preconditions(n, params)
    _warn_outside_regime(params)
    couplings = Couplings.from_params(n, params)
    floor = min(n, 0)
    k_low = floor - n - order
    bad = [
        (0, n + k)
        for k in range(k_low - order, order + 1)
        if k != 0 and params.field.is_resonant(couplings.b(0, k), eps_res)
    ]
    if bad:
        raise ResonanceError(ResonanceReport(tuple(bad)))

    solver = _FixedPoint(couplings, order)
    energy = solver.zero()
    for step in range(order):
        energy = solver.phi(energy)
        logger.debug(f"thm1: iteration {step + 1} -> {energy!r}")
    if not solver.phi(energy) == energy:
        raise HeunForgeError("Fixed-point iteration did not settle within the truncation order")

    series = solver.coefficients(energy, k_low)
    values: Dict[Tuple[int, int], Scalar] = {}
    for ell in range(order + 1):
        for k in range(floor - n - (order - ell), ell + 1):
            values[(ell, n + k)] = series[k][ell]
    table = CoeffTable(n, order, "I", couplings, floor, values)
    return EigenSeries(n, energy + couplings.e0), table


def thm2_alpha(
    n: int, m: int, ell: int, params: Params, *, eps_res: float = DEFAULT_EPS_RES
) -> Scalar:
    """alpha_n^(l)(m) for kappa != 0 by explicit enumeration of step sequences.

    A step (mu, j) moves the offset by mu. Steps with j = 0 need mu > 0 and
    weigh mu gamma_0^mu; steps with j >= 1 weigh |mu| gamma_j^mu and spend
    |mu| j of the order. Every offset visited before reaching (order 0, offset 0)
    divides by b^(remaining order)(offset). Offsets above the remaining order
    cannot return and are pruned.

    Raises:
        PreconditionError: If kappa vanishes
        ResonanceError: If a denominator vanishes on a contributing path
    """
    if params.kappa_is_zero:
        raise PreconditionError("The explicit enumeration needs kappa != 0")
    couplings = Couplings.from_params(n, params)
    field = params.field
    start = m - n
    if start > ell:
        return field.zero
    if ell == 0 and start == 0:
        return field.one

    def walk(remaining: int, offset: int, weight: Scalar) -> Scalar:
        if remaining == 0 and offset == 0:
            return weight
        denominator = couplings.b(remaining, offset)
        if field.is_resonant(denominator, eps_res):
            raise ResonanceError(ResonanceReport(((remaining, n + offset),)))
        weight = field.div(weight, denominator)
        total = field.zero
        for mu in range(1, remaining - offset + 1):
            step = couplings.gamma(0, mu)
            if step:
                total = total + walk(remaining, offset + mu, weight * mu * step)
        for j in range(1, remaining + 1):
            for size in range(1, remaining // j + 1):
                left = remaining - size * j
                for mu in (size, -size):
                    if offset + mu > left:
                        continue
                    step = couplings.gamma(j, mu)
                    if step:
                        total = total + walk(left, offset + mu, weight * size * step)
        return total

    return walk(ell, start, field.one)


def thm2_table(
    n: int, params: Params, order: int, *, eps_res: float = DEFAULT_EPS_RES
) -> CoeffTable:
    """Assembly-window table filled by ``thm2_alpha`` (normalized like the second algorithm)."""
    check_preconditions(n, params)
    couplings = Couplings.from_params(n, params)
    floor = min(n, 0)
    values = {
        (ell, m): thm2_alpha(n, m, ell, params, eps_res=eps_res)
        for ell in range(order + 1)
        for m in range(floor - (order - ell), n + ell + 1)
    }
    return CoeffTable(n, order, "II", couplings, floor, values)
