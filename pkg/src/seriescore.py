"""Scalar fields and truncated series arithmetic.

Every formula in heun-forge is evaluated over a ``ScalarField``: exact
rationals (``fractions.Fraction``) for ground-truth runs, or binary64
complex numbers with tolerance comparisons for point evaluation and complex
couplings. On top of the field sit three containers:

* ``ZPoly``: a polynomial in z = cos(x);
* ``QSeries``: a power series in the nome q truncated at order N, with
  scalar or ``ZPoly`` coefficients;
* ``LaurentXi``: a finite Laurent expansion in the generating-function
  variable xi whose coefficients are ``QSeries``.

All containers are immutable; every operation returns a new object.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .exceptions import ScalarError


logger = logging.getLogger(__name__)

Scalar = Union[Fraction, complex]


class ScalarField(ABC):
    """Arithmetic context shared by all series in one computation."""

    name = ""
    exact = False

    @property
    @abstractmethod
    def zero(self) -> Scalar:
        """Additive identity."""

    @property
    @abstractmethod
    def one(self) -> Scalar:
        """Multiplicative identity."""

    @abstractmethod
    def coerce(self, value: Any) -> Scalar:
        """Convert an int, Fraction, float, complex or string into a field element."""

    @abstractmethod
    def is_unit(self, value: Scalar) -> bool:
        """Whether ``value`` may be used as a divisor."""

    @abstractmethod
    def equal(self, a: Scalar, b: Scalar) -> bool:
        """Field equality (exact or toleranced)."""

    @abstractmethod
    def is_resonant(self, value: Scalar, eps_res: float) -> bool:
        """Whether a recursion denominator counts as vanishing."""

    @abstractmethod
    def is_integer(self, value: Scalar) -> bool:
        """Whether ``value`` is an integer (up to tolerance in float mode)."""

    @abstractmethod
    def is_real(self, value: Scalar) -> bool:
        """Whether ``value`` lies on the real axis."""

    @abstractmethod
    def serialize(self, value: Scalar) -> Any:
        """JSON-ready representation."""

    def is_nonpositive_integer(self, value: Scalar) -> bool:
        return self.is_integer(value) and complex(value).real < 0.5

    def div(self, a: Scalar, b: Scalar) -> Scalar:
        """Divide, refusing exact zeros and (in float mode) tiny divisors.

        Raises:
            ScalarError: If ``b`` is not a unit
        """
        if not self.is_unit(b):
            raise ScalarError(f"Division by a non-unit value {b!r} in {self.name} mode")
        return a / b

    def inv(self, b: Scalar) -> Scalar:
        return self.div(self.one, b)

    def deviation(self, a: Scalar, b: Scalar) -> Union[Fraction, float]:
        """|a - b| as an exact Fraction (rational mode) or a float."""
        return abs(a - b)

    def to_complex(self, value: Scalar) -> complex:
        return complex(value)


class RationalField(ScalarField):
    """Exact arithmetic over arbitrary-precision rationals."""

    name = "rational"
    exact = True

    @property
    def zero(self) -> Fraction:
        return Fraction(0)

    @property
    def one(self) -> Fraction:
        return Fraction(1)

    def coerce(self, value: Any) -> Fraction:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, bool):
            raise ScalarError(f"Cannot use a boolean as a rational value: {value!r}")
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, str):
            try:
                return Fraction(value.strip())
            except (ValueError, ZeroDivisionError) as e:
                raise ScalarError(f"Not a rational number: {value!r}") from e
        if isinstance(value, float) and value.is_integer():
            return Fraction(int(value))
        raise ScalarError(f"Rational mode requires exact inputs, got {value!r}")

    def is_unit(self, value: Scalar) -> bool:
        return value != 0

    def equal(self, a: Scalar, b: Scalar) -> bool:
        return a == b

    def is_resonant(self, value: Scalar, eps_res: float) -> bool:
        return value == 0

    def is_integer(self, value: Scalar) -> bool:
        return Fraction(value).denominator == 1

    def is_real(self, value: Scalar) -> bool:
        return True

    def is_nonpositive_integer(self, value: Scalar) -> bool:
        return self.is_integer(value) and value <= 0

    def serialize(self, value: Scalar) -> str:
        value = Fraction(value)
        return f"{value.numerator}/{value.denominator}"


class ComplexField(ScalarField):
    """Binary64 complex arithmetic with relative-tolerance equality."""

    name = "complex"
    exact = False

    def __init__(self, eps_eq: float = 1e-10, eps_div: float = 1e-12):
        self.eps_eq = eps_eq
        self.eps_div = eps_div

    @property
    def zero(self) -> complex:
        return 0j

    @property
    def one(self) -> complex:
        return 1 + 0j

    def coerce(self, value: Any) -> complex:
        if isinstance(value, complex):
            return value
        if isinstance(value, (int, float, Fraction)):
            return complex(value)
        if isinstance(value, str):
            text = value.strip().replace("i", "j")
            try:
                return complex(Fraction(text))
            except (ValueError, ZeroDivisionError):
                pass
            try:
                return complex(text)
            except ValueError as e:
                raise ScalarError(f"Not a complex number: {value!r}") from e
        raise ScalarError(f"Cannot convert {value!r} to a complex value")

    def is_unit(self, value: Scalar) -> bool:
        return abs(value) >= self.eps_div

    def equal(self, a: Scalar, b: Scalar) -> bool:
        return abs(a - b) <= self.eps_eq * max(1.0, abs(a), abs(b))

    def is_resonant(self, value: Scalar, eps_res: float) -> bool:
        return abs(value) < eps_res

    def is_integer(self, value: Scalar) -> bool:
        value = complex(value)
        nearest = round(value.real)
        return (
            abs(value.imag) <= self.eps_eq
            and abs(value.real - nearest) <= self.eps_eq * max(1.0, abs(value.real))
        )

    def is_real(self, value: Scalar) -> bool:
        return abs(complex(value).imag) <= self.eps_eq

    def serialize(self, value: Scalar) -> List[float]:
        value = complex(value)
        return [value.real, value.imag]


RATIONAL = RationalField()


def get_field(name: str, eps_eq: float = 1e-10, eps_div: float = 1e-12) -> ScalarField:
    """Return the scalar field for a mode name ("rational" or "complex").

    Raises:
        ScalarError: If the name is unknown
    """
    if name == "rational":
        return RATIONAL
    if name == "complex":
        return ComplexField(eps_eq=eps_eq, eps_div=eps_div)
    raise ScalarError(f"Unknown scalar mode: {name}. Valid options are: rational, complex")


def binomial(a: Scalar, k: int, field: ScalarField) -> Scalar:
    """Generalized binomial coefficient (a - k + 1)_k / k!."""
    if k < 0:
        return field.zero
    result = field.one
    for j in range(k):
        result = result * (a - j) / (j + 1)
    return result


def pochhammer(x: Scalar, n: int, field: ScalarField) -> Scalar:
    """Rising factorial (x)_n, extended to n < 0 by 1/((x-1)(x-2)...(x+n)).

    Raises:
        ScalarError: If a factor of the negative-n reciprocal product vanishes
    """
    result = field.one
    if n >= 0:
        for j in range(n):
            result = result * (x + j)
        return result
    for j in range(1, -n + 1):
        factor = x - j
        if not field.is_unit(factor):
            raise ScalarError(f"Pochhammer ({x})_{n} has a vanishing factor x-{j}")
        result = result * factor
    return field.inv(result)


class ZPoly:
    """Polynomial in z with coefficients in ascending powers."""

    __slots__ = ("field", "coeffs")

    def __init__(self, coeffs: Iterable[Scalar], field: ScalarField):
        values = list(coeffs)
        while values and not values[-1]:
            values.pop()
        self.field = field
        self.coeffs: Tuple[Scalar, ...] = tuple(values)

    @classmethod
    def zero(cls, field: ScalarField) -> "ZPoly":
        return cls((), field)

    @classmethod
    def constant(cls, value: Scalar, field: ScalarField) -> "ZPoly":
        return cls((value,), field)

    @classmethod
    def z(cls, field: ScalarField) -> "ZPoly":
        return cls((field.zero, field.one), field)

    @property
    def degree(self) -> int:
        """Degree, -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Scalar:
        return self.coeffs[-1] if self.coeffs else self.field.zero

    def __getitem__(self, power: int) -> Scalar:
        if 0 <= power < len(self.coeffs):
            return self.coeffs[power]
        return self.field.zero

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __add__(self, other: Any) -> "ZPoly":
        if isinstance(other, ZPoly):
            a, b = self.coeffs, other.coeffs
            if len(a) < len(b):
                a, b = b, a
            out = list(a)
            for i, c in enumerate(b):
                out[i] = out[i] + c
            return ZPoly(out, self.field)
        if not other:
            return self
        out = list(self.coeffs) or [self.field.zero]
        out[0] = out[0] + other
        return ZPoly(out, self.field)

    __radd__ = __add__

    def __neg__(self) -> "ZPoly":
        return ZPoly((-c for c in self.coeffs), self.field)

    def __sub__(self, other: Any) -> "ZPoly":
        return self + (-other)

    def __rsub__(self, other: Any) -> "ZPoly":
        return (-self) + other

    def __mul__(self, other: Any) -> "ZPoly":
        if isinstance(other, ZPoly):
            if not self.coeffs or not other.coeffs:
                return ZPoly.zero(self.field)
            out = [self.field.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                if not a:
                    continue
                for j, b in enumerate(other.coeffs):
                    if b:
                        out[i + j] = out[i + j] + a * b
            return ZPoly(out, self.field)
        if not other:
            return ZPoly.zero(self.field)
        return ZPoly((c * other for c in self.coeffs), self.field)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "ZPoly":
        result = ZPoly.constant(self.field.one, self.field)
        for _ in range(k):
            result = result * self
        return result

    def __call__(self, z: Any) -> Any:
        result = self.field.zero
        for c in reversed(self.coeffs):
            result = result * z + c
        return result

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, ZPoly):
            other = ZPoly.constant(other, self.field) if other else ZPoly.zero(self.field)
        size = max(len(self.coeffs), len(other.coeffs))
        return all(self.field.equal(self[k], other[k]) for k in range(size))

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"ZPoly({list(self.coeffs)!r})"


def _negligible(value: Any, field: ScalarField) -> bool:
    if isinstance(value, ZPoly):
        return all(not field.is_unit(c) for c in value.coeffs)
    return not field.is_unit(value)


def _coeff_equal(a: Any, b: Any, field: ScalarField) -> bool:
    if isinstance(a, ZPoly):
        return a == b
    if isinstance(b, ZPoly):
        return b == a
    return field.equal(a, b)


class QSeries:
    """Power series c_0 + c_1 q + ... + c_N q^N, truncated at order N."""

    __slots__ = ("coeffs", "field", "zero")

    def __init__(self, coeffs: Sequence[Any], field: ScalarField, zero: Any = None):
        if not coeffs:
            raise ScalarError("A QSeries needs at least the constant coefficient")
        self.coeffs: Tuple[Any, ...] = tuple(coeffs)
        self.field = field
        self.zero = field.zero if zero is None else zero

    @classmethod
    def constant(cls, value: Any, order: int, field: ScalarField, zero: Any = None) -> "QSeries":
        zero = field.zero if zero is None else zero
        return cls([value] + [zero] * order, field, zero)

    @classmethod
    def monomial(
        cls, value: Any, power: int, order: int, field: ScalarField, zero: Any = None
    ) -> "QSeries":
        zero = field.zero if zero is None else zero
        coeffs = [zero] * (order + 1)
        if power <= order:
            coeffs[power] = value
        return cls(coeffs, field, zero)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def valuation(self) -> int:
        """Index of the first nonzero coefficient (order + 1 for the zero series)."""
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        return len(self.coeffs)

    def __getitem__(self, k: int) -> Any:
        return self.coeffs[k]

    def unit(self) -> "QSeries":
        one = self.field.one
        if isinstance(self.zero, ZPoly):
            one = ZPoly.constant(one, self.field)
        return QSeries.constant(one, self.order, self.field, self.zero)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def _check(self, other: "QSeries") -> None:
        if self.order != other.order:
            raise ScalarError(
                f"Truncation orders differ: {self.order} and {other.order}"
            )

    def __add__(self, other: Any) -> "QSeries":
        if isinstance(other, QSeries):
            self._check(other)
            zero = self.zero if isinstance(self.zero, ZPoly) else other.zero
            return QSeries([a + b for a, b in zip(self.coeffs, other.coeffs)], self.field, zero)
        coeffs = list(self.coeffs)
        coeffs[0] = coeffs[0] + other
        return QSeries(coeffs, self.field, self.zero)

    __radd__ = __add__

    def __neg__(self) -> "QSeries":
        return QSeries([-c for c in self.coeffs], self.field, self.zero)

    def __sub__(self, other: Any) -> "QSeries":
        return self + (-other)

    def __rsub__(self, other: Any) -> "QSeries":
        return (-self) + other

    def __mul__(self, other: Any) -> "QSeries":
        if isinstance(other, QSeries):
            return qs_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other: Any) -> "QSeries":
        return self.scale(other)

    def scale(self, factor: Any) -> "QSeries":
        if not factor:
            return QSeries([self.zero] * len(self.coeffs), self.field, self.zero)
        return QSeries([c * factor for c in self.coeffs], self.field, self.zero)

    def truncate(self, order: int) -> "QSeries":
        if order > self.order:
            raise ScalarError(f"Cannot extend a series of order {self.order} to {order}")
        return QSeries(self.coeffs[: order + 1], self.field, self.zero)

    def q_derivative(self) -> "QSeries":
        """q d/dq, acting as k * c_k."""
        return QSeries([c * k for k, c in enumerate(self.coeffs)], self.field, self.zero)

    def evaluate(self, q: Any) -> Any:
        result = self.zero
        for c in reversed(self.coeffs):
            result = result * q + c
        return result

    def map(self, func, zero: Any = None) -> "QSeries":
        return QSeries([func(c) for c in self.coeffs], self.field, self.zero if zero is None else zero)

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, QSeries) or other.order != self.order:
            return False
        return all(_coeff_equal(a, b, self.field) for a, b in zip(self.coeffs, other.coeffs))

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"QSeries({list(self.coeffs)!r})"


def qs_mul(a: QSeries, b: QSeries) -> QSeries:
    """Cauchy product truncated at the common order.

    Raises:
        ScalarError: If the truncation orders differ
    """
    a._check(b)
    order = a.order
    zero = a.zero * b.zero
    out = [zero] * (order + 1)
    for i, ai in enumerate(a.coeffs):
        if not ai:
            continue
        for j in range(order + 1 - i):
            bj = b.coeffs[j]
            if bj:
                out[i + j] = out[i + j] + ai * bj
    return QSeries(out, a.field, zero)


def qs_inv(a: QSeries) -> QSeries:
    """Multiplicative inverse of a scalar series with unit constant term.

    Raises:
        ScalarError: If the constant term is not a unit or the coefficients are polynomials
    """
    if isinstance(a.zero, ZPoly):
        raise ScalarError("Only series with scalar coefficients can be inverted")
    field = a.field
    inv0 = field.inv(a.coeffs[0])
    out = [inv0]
    for k in range(1, a.order + 1):
        acc = field.zero
        for j in range(1, k + 1):
            if a.coeffs[j]:
                acc = acc + a.coeffs[j] * out[k - j]
        out.append(-acc * inv0)
    return QSeries(out, field)


def resolvent(b: Scalar, e: QSeries) -> QSeries:
    """Expansion of 1/(b - e) as sum_k e^k / b^(k+1) for e of positive valuation.

    Raises:
        ScalarError: If b vanishes or e has a nonzero constant term
    """
    field = e.field
    if not field.is_unit(b):
        raise ScalarError(f"Resolvent denominator {b!r} vanishes")
    if not _negligible(e.coeffs[0], field):
        raise ScalarError("Resolvent perturbation must vanish at q = 0")
    e = QSeries([field.zero] + list(e.coeffs[1:]), field)
    inv_b = field.inv(b)
    ratio = e.scale(inv_b)
    power = QSeries.constant(inv_b, e.order, field)
    total = power
    for _ in range(e.order):
        power = power * ratio
        if power.is_zero():
            break
        total = total + power
    return total


class LaurentXi:
    """Finite Laurent expansion sum_m c_m xi^m with QSeries coefficients.

    Only nonzero coefficients are stored. ``window`` bounds the exponents a
    product may keep; products landing outside are dropped and counted in
    ``clipped``.
    """

    __slots__ = ("terms", "order", "field", "coeff_zero", "window", "clipped")

    def __init__(
        self,
        terms: Dict[int, QSeries],
        order: int,
        field: ScalarField,
        coeff_zero: Any = None,
        window: Optional[Tuple[int, int]] = None,
        clipped: int = 0,
    ):
        self.order = order
        self.field = field
        self.coeff_zero = field.zero if coeff_zero is None else coeff_zero
        self.window = window
        self.clipped = clipped
        self.terms: Dict[int, QSeries] = {m: s for m, s in terms.items() if not s.is_zero()}
        for s in self.terms.values():
            if s.order != order:
                raise ScalarError(f"Coefficient of order {s.order} in a LaurentXi of order {order}")

    @property
    def m_lo(self) -> int:
        if self.window is not None:
            return self.window[0]
        return min(self.terms) if self.terms else 0

    @property
    def m_hi(self) -> int:
        if self.window is not None:
            return self.window[1]
        return max(self.terms) if self.terms else 0

    def _zero_series(self) -> QSeries:
        return QSeries.constant(self.coeff_zero, self.order, self.field, self.coeff_zero)

    def __getitem__(self, m: int) -> QSeries:
        return self.terms.get(m) or self._zero_series()

    def _like(self, terms: Dict[int, QSeries], clipped: int = 0) -> "LaurentXi":
        return LaurentXi(terms, self.order, self.field, self.coeff_zero, self.window, clipped)

    def unit(self) -> "LaurentXi":
        return self._like({0: self._zero_series().unit()})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "LaurentXi") -> "LaurentXi":
        terms = dict(self.terms)
        for m, s in other.terms.items():
            terms[m] = terms[m] + s if m in terms else s
        return self._like(terms, self.clipped + other.clipped)

    def __neg__(self) -> "LaurentXi":
        return self._like({m: -s for m, s in self.terms.items()}, self.clipped)

    def __sub__(self, other: "LaurentXi") -> "LaurentXi":
        return self + (-other)

    def scale(self, factor: Any) -> "LaurentXi":
        return self._like({m: s.scale(factor) for m, s in self.terms.items()}, self.clipped)

    def __mul__(self, other: "LaurentXi") -> "LaurentXi":
        return self.mul(other, self.window if self.window is not None else other.window)

    def mul(self, other: "LaurentXi", window: Optional[Tuple[int, int]] = None) -> "LaurentXi":
        """Product keeping exponents inside ``window`` (all exponents if None)."""
        terms: Dict[int, QSeries] = {}
        dropped = 0
        for m1, s1 in self.terms.items():
            for m2, s2 in other.terms.items():
                m = m1 + m2
                if window is not None and not window[0] <= m <= window[1]:
                    if s1.valuation + s2.valuation <= self.order:
                        dropped += 1
                    continue
                product = qs_mul(s1, s2)
                terms[m] = terms[m] + product if m in terms else product
        return LaurentXi(
            terms,
            self.order,
            self.field,
            self.coeff_zero,
            window,
            self.clipped + other.clipped + dropped,
        )

    def constant_terms_negligible(self) -> bool:
        """Whether every xi-coefficient vanishes at q = 0."""
        return all(_negligible(s.coeffs[0], self.field) for s in self.terms.values())

    def __repr__(self) -> str:
        return f"LaurentXi({self.terms!r})"


def unit_pow(f: Union[QSeries, LaurentXi], a: Scalar, field: Optional[ScalarField] = None):
    """Binomial expansion of (1 + u)^a where u vanishes at q = 0.

    Args:
        f: The factor 1 + u, a QSeries or a LaurentXi
        a: Exponent
        field: Scalar field (defaults to the factor's own)

    Returns:
        sum_k binom(a, k) u^k truncated at the factor's order

    Raises:
        ScalarError: If the constant part of f is not one
    """
    field = field or f.field
    unit = f.unit()
    u = f - unit
    if isinstance(u, QSeries):
        if not _negligible(u.coeffs[0], field):
            raise ScalarError("unit_pow needs a factor with constant term one")
        u = QSeries([u.zero] + list(u.coeffs[1:]), u.field, u.zero)
    elif not u.constant_terms_negligible():
        raise ScalarError("unit_pow needs a factor with constant term one")
    result = unit
    power = unit
    for k in range(1, f.order + 1):
        power = power * u
        if power.is_zero():
            break
        coefficient = binomial(a, k, field)
        if coefficient:
            result = result + power.scale(coefficient)
    return result
