"""Truncated power and Laurent series over pluggable coefficient rings.

One engine serves three coefficient rings: exact rationals, weight
polynomials, and high-precision complex numbers.  The same reversion, exp,
and residue code therefore runs both for exact identity checks and for the
numeric recursion on the spectral curve.

A series carries an explicit window [lo, order): coefficients for exponents
below lo are exactly zero, coefficients at or above `order` are unknown.
Truncation order is explicit state and every operation propagates it with
the min rule; nothing silently extends precision.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath

__all__ = [
    "AlgebraError",
    "RingMismatchError",
    "TruncationError",
    "RationalRing",
    "ComplexRing",
    "SeriesRing",
    "Series",
    "Poly",
]


class AlgebraError(ValueError):
    """Raised when a series operation violates its preconditions."""


class RingMismatchError(AlgebraError):
    pass


class TruncationError(AlgebraError):
    """Raised when a coefficient beyond the trusted window is requested."""


class RationalRing:
    zero = Fraction(0)
    one = Fraction(1)

    def from_rational(self, value):
        return Fraction(value)

    def is_zero(self, x) -> bool:
        return x == 0

    def invert(self, x):
        if x == 0:
            raise ZeroDivisionError("division by zero rational")
        return Fraction(1) / x

    def __eq__(self, other):
        return isinstance(other, RationalRing)

    def __repr__(self):
        return "RationalRing()"


class ComplexRing:
    """mpmath complex numbers; callers set the working precision via
    mpmath.workprec around whole computations."""

    def __init__(self, precision: int):
        if precision < 64:
            raise ValueError("precision must be at least 64 bits")
        self.precision = precision
        self.zero = mpmath.mpc(0)
        self.one = mpmath.mpc(1)

    def from_rational(self, value):
        value = Fraction(value)
        return mpmath.mpc(mpmath.mpf(value.numerator) / value.denominator)

    def is_zero(self, x) -> bool:
        return x == 0

    def invert(self, x):
        if x == 0:
            raise ZeroDivisionError("division by zero")
        return 1 / x

    def __eq__(self, other):
        return isinstance(other, ComplexRing) and other.precision == self.precision

    def __repr__(self):
        return f"ComplexRing({self.precision})"


class SeriesRing:
    """Use power series in one variable as the coefficients of another,
    giving the nested-univariate representation of multivariate series."""

    def __init__(self, inner, var: str, order: int):
        self.inner = inner
        self.var = var
        self.order = order
        self.zero = Series.zero(inner, var, order)
        self.one = Series.constant(inner, var, inner.one, order)

    def from_rational(self, value):
        return Series.constant(self.inner, self.var, self.inner.from_rational(value), self.order)

    def is_zero(self, x) -> bool:
        return all(self.inner.is_zero(c) for c in x.coeffs)

    def invert(self, x):
        return x.inverse()

    def __eq__(self, other):
        return (
            isinstance(other, SeriesRing)
            and other.inner == self.inner
            and other.var == self.var
            and other.order == self.order
        )

    def __repr__(self):
        return f"SeriesRing({self.inner!r}, {self.var!r}, {self.order})"


class Series:
    """Truncated Laurent series: sum of coeffs[k] * var**(lo + k) plus an
    unknown tail O(var**order)."""

    __slots__ = ("ring", "var", "lo", "coeffs", "order")

    def __init__(self, ring, var: str, lo: int, coeffs: list, order: int):
        if order - lo != len(coeffs):
            raise AlgebraError("window length inconsistent with coefficients")
        self.ring = ring
        self.var = var
        self.lo = lo
        self.coeffs = coeffs
        self.order = order

    # ------------------------------------------------------------------
    # constructors

    @classmethod
    def zero(cls, ring, var: str, order: int, lo: int = 0) -> "Series":
        lo = min(lo, order)
        return cls(ring, var, lo, [ring.zero] * (order - lo), order)

    @classmethod
    def constant(cls, ring, var: str, value, order: int) -> "Series":
        s = cls.zero(ring, var, order)
        if order > 0:
            s.coeffs[0] = value
        return s

    @classmethod
    def identity(cls, ring, var: str, order: int) -> "Series":
        """The series var itself."""
        s = cls.zero(ring, var, order)
        if order > 1:
            s.coeffs[1] = ring.one
        return s

    @classmethod
    def from_coeffs(cls, ring, var: str, coeffs: list, order: int, lo: int = 0) -> "Series":
        values = [ring.from_rational(c) if isinstance(c, (int, Fraction)) else c
                  for c in coeffs]
        if len(values) < order - lo:
            values = values + [ring.zero] * (order - lo - len(values))
        return cls(ring, var, lo, values[: order - lo], order)

    # ------------------------------------------------------------------
    # window management

    def _check(self, other: "Series") -> None:
        if self.var != other.var:
            raise RingMismatchError(f"variable mismatch: {self.var} vs {other.var}")
        if self.ring != other.ring:
            raise RingMismatchError("coefficient ring mismatch")

    def coefficient(self, exponent: int):
        if exponent >= self.order:
            raise TruncationError(
                f"coefficient of {self.var}^{exponent} beyond truncation order {self.order}"
            )
        if exponent < self.lo:
            return self.ring.zero
        return self.coeffs[exponent - self.lo]

    def residue(self):
        """Coefficient of exponent -1; zero when -1 lies outside the stored
        window (the caller owns window adequacy, this never raises)."""
        if self.lo > -1 or self.order <= -1:
            return self.ring.zero
        return self.coeffs[-1 - self.lo]

    def truncate(self, order: int) -> "Series":
        order = min(order, self.order)
        lo = min(self.lo, order)
        return Series(self.ring, self.var, lo, self.coeffs[: order - lo], order)

    def shift(self, k: int) -> "Series":
        """Multiply by var**k."""
        return Series(self.ring, self.var, self.lo + k, list(self.coeffs), self.order + k)

    def rename(self, var: str) -> "Series":
        """Same coefficients under a new variable tag (for reversion, whose
        output is a function of the original series' value)."""
        return Series(self.ring, var, self.lo, list(self.coeffs), self.order)

    def strip_leading(self, negligible) -> "Series":
        """Advance lo past coefficients deemed negligible by the predicate."""
        coeffs = list(self.coeffs)
        lo = self.lo
        while coeffs and negligible(coeffs[0]):
            coeffs.pop(0)
            lo += 1
        return Series(self.ring, self.var, lo, coeffs, self.order)

    def valuation(self) -> int:
        """Exponent of the first coefficient that is not exactly zero."""
        for k, c in enumerate(self.coeffs):
            if not self.ring.is_zero(c):
                return self.lo + k
        return self.order

    def is_zero(self) -> bool:
        return all(self.ring.is_zero(c) for c in self.coeffs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Series):
            return NotImplemented
        if self.var != other.var or self.ring != other.ring or self.order != other.order:
            return False
        lo = min(self.lo, other.lo)
        for e in range(lo, self.order):
            a = self.coeffs[e - self.lo] if e >= self.lo else self.ring.zero
            b = other.coeffs[e - other.lo] if e >= other.lo else other.ring.zero
            if not self.ring.is_zero(a - b):
                return False
        return True

    __hash__ = None

    # ------------------------------------------------------------------
    # ring operations

    def __add__(self, other: "Series") -> "Series":
        self._check(other)
        order = min(self.order, other.order)
        lo = min(self.lo, other.lo, order)
        coeffs = [self.ring.zero] * (order - lo)
        for src in (self, other):
            for k, c in enumerate(src.coeffs):
                e = src.lo + k
                if lo <= e < order:
                    coeffs[e - lo] = coeffs[e - lo] + c
        return Series(self.ring, self.var, lo, coeffs, order)

    def __neg__(self) -> "Series":
        return Series(self.ring, self.var, self.lo, [-c for c in self.coeffs], self.order)

    def __sub__(self, other: "Series") -> "Series":
        return self + (-other)

    def __mul__(self, other: "Series") -> "Series":
        self._check(other)
        lo = self.lo + other.lo
        order = min(self.lo + other.order, other.lo + self.order)
        n = max(order - lo, 0)
        coeffs = [self.ring.zero] * n
        zero = self.ring.is_zero
        for i, a in enumerate(self.coeffs):
            if zero(a):
                continue
            jmax = min(len(other.coeffs), n - i)
            for j in range(jmax):
                b = other.coeffs[j]
                if not zero(b):
                    coeffs[i + j] = coeffs[i + j] + a * b
        return Series(self.ring, self.var, min(lo, order), coeffs, order)

    def scale(self, value) -> "Series":
        if isinstance(value, (int, Fraction)):
            value = self.ring.from_rational(value)
        return Series(self.ring, self.var, self.lo, [c * value for c in self.coeffs], self.order)

    def div_scalar(self, value) -> "Series":
        if isinstance(value, (int, Fraction)):
            return self.scale(Fraction(1, 1) / Fraction(value))
        return self.scale(self.ring.invert(value))

    def inverse(self) -> "Series":
        """Multiplicative inverse; the lowest not-exactly-zero coefficient
        must be invertible (numeric series with below-noise heads must
        strip_leading with a tolerance first)."""
        self = self.strip_leading(self.ring.is_zero)
        if not self.coeffs:
            raise AlgebraError("division by series with zero leading coefficient")
        c0_inv = self.ring.invert(self.coeffs[0])
        n = len(self.coeffs)
        out = [self.ring.zero] * n
        out[0] = c0_inv
        for m in range(1, n):
            acc = self.ring.zero
            for k in range(1, m + 1):
                ck = self.coeffs[k]
                if not self.ring.is_zero(ck):
                    acc = acc + ck * out[m - k]
            out[m] = -(acc * c0_inv)
        return Series(self.ring, self.var, -self.lo, out, -self.lo + n)

    def __truediv__(self, other: "Series") -> "Series":
        return self * other.inverse()

    def pow_int(self, exponent: int) -> "Series":
        if exponent < 0:
            return self.inverse().pow_int(-exponent)
        if exponent == 0:
            return Series.constant(self.ring, self.var, self.ring.one,
                                   max(self.order - self.lo, 1))
        result = None
        base = self
        e = exponent
        while e:
            if e & 1:
                result = base if result is None else result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # ------------------------------------------------------------------
    # calculus

    def derivative(self) -> "Series":
        coeffs = []
        for k, c in enumerate(self.coeffs):
            e = self.lo + k
            coeffs.append(c * self.ring.from_rational(e))
        return Series(self.ring, self.var, self.lo - 1, coeffs, self.order - 1)

    def antiderivative(self) -> "Series":
        """Termwise integral with zero constant; requires a vanishing
        residue."""
        coeffs = []
        for k, c in enumerate(self.coeffs):
            e = self.lo + k
            if e == -1:
                if not self.ring.is_zero(c):
                    raise AlgebraError("cannot integrate a series with nonzero residue")
                coeffs.append(self.ring.zero)
            else:
                coeffs.append(c * self.ring.from_rational(Fraction(1, e + 1)))
        return Series(self.ring, self.var, self.lo + 1, coeffs, self.order + 1)

    def exp(self) -> "Series":
        """exp of a series with zero constant term and no negative part."""
        if self.lo < 0 and any(not self.ring.is_zero(c) for c in self.coeffs[: -self.lo]):
            raise AlgebraError("exp requires lowest exponent >= 1")
        if self.lo <= 0 and self.order > 0 and not self.ring.is_zero(self.coefficient(0)):
            raise AlgebraError("exp requires zero constant term")
        n = self.order
        if n <= 0:
            return Series.zero(self.ring, self.var, n)
        f = [self.coefficient(k) if k < n else self.ring.zero for k in range(n)]
        g = [self.ring.zero] * n
        g[0] = self.ring.one
        for m in range(1, n):
            acc = self.ring.zero
            for k in range(1, m + 1):
                if not self.ring.is_zero(f[k]):
                    acc = acc + (f[k] * g[m - k]) * self.ring.from_rational(k)
            g[m] = acc * self.ring.from_rational(Fraction(1, m))
        return Series(self.ring, self.var, 0, g, n)

    def log(self) -> "Series":
        """log of a series with constant term 1."""
        if self.lo > 0 or self.order <= 0:
            raise AlgebraError("log requires constant term 1")
        c0 = self.coefficient(0)
        if not self.ring.is_zero(c0 - self.ring.one):
            raise AlgebraError("log requires constant term 1")
        n = self.order
        f = [self.coefficient(k) for k in range(n)]
        h = [self.ring.zero] * n
        for m in range(1, n):
            acc = self.ring.zero
            for k in range(1, m):
                if not self.ring.is_zero(h[k]):
                    acc = acc + (h[k] * f[m - k]) * self.ring.from_rational(k)
            h[m] = f[m] - acc * self.ring.from_rational(Fraction(1, m))
        return Series(self.ring, self.var, 0, h, n)

    def sqrt_unit(self) -> "Series":
        """Square root of a series with constant term 1 (principal branch)."""
        return self.log().div_scalar(2).exp()

    # ------------------------------------------------------------------
    # composition and reversion

    def compose(self, inner: "Series") -> "Series":
        """Substitute `inner` (valuation >= 1) for this series' variable."""
        if inner.lo < 1 and any(not inner.ring.is_zero(c) for c in inner.coeffs[: 1 - inner.lo]):
            raise AlgebraError("composition requires inner valuation >= 1")
        if self.ring != inner.ring:
            raise RingMismatchError("coefficient ring mismatch in composition")
        self = self.strip_leading(self.ring.is_zero)
        # Horner over the stored window, from the top exponent down.
        result = Series.zero(inner.ring, inner.var, inner.order)
        for k in range(len(self.coeffs) - 1, -1, -1):
            result = result * inner
            c = self.coeffs[k]
            if not self.ring.is_zero(c):
                result = result + Series.constant(inner.ring, inner.var, c, result.order)
        if self.lo:
            result = result * inner.pow_int(self.lo)
        # The unknown tail of the outer series enters at inner.valuation() *
        # self.order, which bounds the trusted window from above.
        val = max(inner.valuation(), 1)
        return result.truncate(min(result.order, self.order * val))

    def reversion(self) -> "Series":
        """Compositional inverse of c1*var + O(var^2), via Newton iteration."""
        if self.lo > 1 or (self.lo <= 0 and self.order > 0 and
                           not self.ring.is_zero(self.coefficient(0))):
            raise AlgebraError("reversion requires a series with zero constant term")
        if self.order < 2:
            raise AlgebraError("reversion needs at least the linear coefficient")
        c1 = self.coefficient(1)
        if self.ring.is_zero(c1):
            raise AlgebraError("reversion requires an invertible linear coefficient")
        target = self.order
        ring, var = self.ring, self.var
        g = Series(ring, var, 0, [ring.zero, ring.invert(c1)], 2)
        known = 1  # g agrees with the true inverse through this exponent
        while known < target - 1:
            n = min(2 * known + 1, target)
            g = Series(ring, var, 0, g.coeffs + [ring.zero] * (n - g.order), n)
            f = self.truncate(n)
            err = f.compose(g) - Series.identity(ring, var, n)
            # err has valuation >= known + 1; dropping the head (mathematically
            # zero) keeps the Newton step accurate through exponent n - 1.
            err = Series(ring, var, known + 1, err.coeffs[known + 1 - err.lo:], err.order)
            corr = err * f.derivative().compose(g).inverse()
            step = g - corr
            coeffs = [step.coefficient(k) for k in range(n)]
            g = Series(ring, var, 0, coeffs, n)
            known = n - 1
        return g


class Poly:
    """Dense univariate polynomial over a ring; exact companion to Series
    for globally defined objects like P(z) and 1 - s z P'(z)."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring, coeffs: list):
        self.ring = ring
        self.coeffs = list(coeffs) if coeffs else [ring.zero]

    @classmethod
    def from_rationals(cls, ring, values: list) -> "Poly":
        return cls(ring, [ring.from_rational(v) for v in values])

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __add__(self, other: "Poly") -> "Poly":
        n = max(len(self.coeffs), len(other.coeffs))
        out = []
        for k in range(n):
            a = self.coeffs[k] if k < len(self.coeffs) else self.ring.zero
            b = other.coeffs[k] if k < len(other.coeffs) else self.ring.zero
            out.append(a + b)
        return Poly(self.ring, out)

    def __neg__(self) -> "Poly":
        return Poly(self.ring, [-c for c in self.coeffs])

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        out = [self.ring.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if self.ring.is_zero(a):
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(self.ring, out)

    def scale(self, value) -> "Poly":
        if isinstance(value, (int, Fraction)):
            value = self.ring.from_rational(value)
        return Poly(self.ring, [c * value for c in self.coeffs])

    def derivative(self) -> "Poly":
        if len(self.coeffs) == 1:
            return Poly(self.ring, [self.ring.zero])
        return Poly(self.ring, [
            self.coeffs[k] * self.ring.from_rational(k) for k in range(1, len(self.coeffs))
        ])

    def __call__(self, x):
        acc = self.ring.zero
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def shifted_series(self, a, var: str, order: int) -> "Series":
        """The Taylor expansion p(a + u) as a series in u (exact: p is a
        polynomial, so the window is only limited by `order`)."""
        au = Series.constant(self.ring, var, a, order) + Series.identity(self.ring, var, order)
        acc = Series.zero(self.ring, var, order)
        for c in reversed(self.coeffs):
            acc = acc * au + Series.constant(self.ring, var, c, order)
        return acc

    def to_series(self, var: str, order: int) -> "Series":
        return Series.from_coeffs(self.ring, var, list(self.coeffs), order)
