"""Explicit low-order results of the first algorithm.

Closed forms for the first and second order eigenvalue corrections and for
the coefficients a^(l)(k) = alpha_n^(l)(n + k) up to second order. They are
evaluated directly from gamma_k^mu and b^(l)(k), without running the
recursion, and serve as regression oracles for the engines.
"""

from typing import Dict, Tuple

from .basis import Params
from .engines import Couplings
from .seriescore import Scalar


def _terms(n: int, params: Params):
    couplings = Couplings.from_params(n, params)
    field = params.field

    def inv(value: Scalar) -> Scalar:
        return field.inv(value)

    return couplings, field, inv


def eigen_first(n: int, params: Params) -> Scalar:
    """E^(1) = gamma_0^1 gamma_1^1 (1/(P-1) - 1/(P+1-kappa))."""
    c, _, inv = _terms(n, params)
    P, kappa = c.P, c.kappa
    return c.gamma(0, 1) * c.gamma(1, 1) * (inv(P - 1) - inv(P + 1 - kappa))


def eigen_second(n: int, params: Params) -> Scalar:
    """Second order eigenvalue correction written in P = 2n + g0 + g1."""
    c, _, inv = _terms(n, params)
    P, k = c.P, c.kappa
    a1, b1 = c.gamma(0, 1), c.gamma(1, 1)
    a0, b0 = c.gamma(0, 0), c.gamma(1, 0)

    m2 = 2 * (P - 2)
    m1 = P - 1
    m1k = P - 1 + k
    p1k = P + 1 - k
    p12k = P + 1 - 2 * k
    p2k = 2 * (P + 2) - 2 * k

    total = a1 * a1 * (inv(m1) - inv(p12k))
    total += b1 * b1 * (inv(m1k) - inv(p1k))
    total += 4 * a0 * b0 * (inv(m2) - inv(p2k))
    total -= 2 * a1 * a1 * b0 * (
        inv(m2 * m1) - inv(m1 * p12k) + inv(p12k * p2k)
    )
    total -= 2 * a0 * b1 * b1 * (
        inv(m2 * m1k) - inv(m1k * p1k) + inv(p1k * p2k)
    )
    total -= a1 * a1 * b1 * b1 * (
        inv(m1k * m1 * m1)
        - inv(p12k * p1k * p1k)
        - inv(m1k * m1 * p1k)
        + inv(m1 * p1k * p12k)
        - inv(m2 * m1 * m1k)
        + inv(p1k * p12k * p2k)
    )
    return total


def low_order_coefficients(n: int, params: Params) -> Dict[Tuple[int, int], Scalar]:
    """a^(l)(k) for (l, k) in (0,-1), (0,-2), (0,-3), (1,1), (1,-1), (2,2), (2,1).

    Raises:
        ScalarError: If one of the denominators vanishes
    """
    c, _, inv = _terms(n, params)

    def b(ell: int, k: int) -> Scalar:
        return inv(c.b(ell, k))

    g01, g11 = c.gamma(0, 1), c.gamma(1, 1)
    g00, g10 = c.gamma(0, 0), c.gamma(1, 0)

    return {
        (0, -1): g01 * b(0, -1),
        (0, -2): (2 * g00 + g01 * g01 * b(0, -1)) * b(0, -2),
        (0, -3): g01 * b(0, -3) * (
            3
            + 2 * g00 * (b(0, -2) + b(0, -1))
            + g01 * g01 * b(0, -2) * b(0, -1)
        ),
        (1, 1): g11 * b(1, 1),
        (1, -1): g11 * b(1, -1) * (
            1
            + 2 * g00 * (b(0, -2) + b(1, 1))
            + g01 * g01 * b(0, -1) * (b(0, -2) - b(0, -1) - b(1, 1))
        ),
        (2, 2): (2 * g10 + g11 * g11 * b(1, 1)) * b(2, 2),
        (2, 1): g01 * b(2, 1) * (
            1
            + 2 * g10 * (b(0, -1) + b(2, 2))
            + g11 * g11 * (b(2, 2) * b(1, 1) - b(1, 1) * b(1, 1) - b(1, 1) * b(0, -1))
        ),
    }
