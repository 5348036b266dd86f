"""Numeric instantiation of the rational curve x = z exp(-s P(z)), y = P(z).

Branch points are the zeros of s z P'(z) - 1; each is assumed simple and
carries a local frame: the expansion of x at the point, the local involution
sigma exchanging the two sheets of x, and derived data consumed by the
residue recursion.  The module also hosts the x-inversion at the origin
(numeric and exact), the partition-sum coefficients of z^i = sum A_mu^i x^mu,
the phi basis spanning the space of loop-equation solutions, and exact
series checks of the closed forms for the (0,1) and (0,2) generating
functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .cutjoin import DHTable
from .pruning import p_series, x_of_z_series
from .series import AlgebraError, ComplexRing, Poly, Series, SeriesRing
from .weightpoly import WeightPolynomial, WeightPolyRing

__all__ = [
    "CurveSpec", "BranchPointData", "SpectralCurve", "DegenerateCurveError",
    "a_mu_coefficient", "invert_x_exact", "PhiBasis", "RationalOverW",
    "f01_check", "f02_check", "CheckReport",
]


class DegenerateCurveError(ValueError):
    """Coincident branch points: the simple-branch-point recursion does not
    apply."""


@dataclass(frozen=True)
class CurveSpec:
    """Numeric curve instance: degree, exact rational weights, and working
    precision in bits."""

    d: int
    q_values: tuple[Fraction, ...]
    s_value: Fraction
    precision: int = 256
    separation_rel: float = 1e-6

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be positive")
        if len(self.q_values) != self.d:
            raise ValueError("q_values must have length d")
        if self.q_values[-1] == 0:
            raise ValueError("q_d must be nonzero (P must have degree exactly d)")
        if self.s_value == 0:
            raise ValueError("s must be nonzero")
        if self.precision < 64:
            raise ValueError("precision must be at least 64 bits")

    @classmethod
    def make(cls, d: int, q_values, s_value, precision: int = 256, **kw) -> "CurveSpec":
        return cls(d, tuple(Fraction(v) for v in q_values), Fraction(s_value),
                   precision, **kw)


@dataclass
class BranchPointData:
    index: int
    a: object
    x_at: object                # x(a)
    x_series: Series            # x(a+u) as a series in u
    sigma: Series               # sigma(a+u) - a, linear coefficient -1
    sigma_prime: Series
    y_series: Series            # P(a+u)
    y_sigma: Series             # P(sigma(a+u))
    w_series: Series            # 1 - s z P'(z) at z = a+u (simple zero)


class SpectralCurve:
    def __init__(self, spec: CurveSpec):
        self.spec = spec
        self.prec = spec.precision
        self.ring = ComplexRing(self.prec)
        with mpmath.workprec(self.prec):
            self.s = self.ring.from_rational(spec.s_value)
            self.q = [self.ring.from_rational(v) for v in spec.q_values]
            # P(z) and w(z) = 1 - s z P'(z) as global polynomials
            self.P = Poly(self.ring, [self.ring.zero] + self.q)
            w_coeffs = [self.ring.one] + [
                -self.s * (i * self.q[i - 1]) for i in range(1, spec.d + 1)
            ]
            self.W = Poly(self.ring, w_coeffs)
        self._roots = None
        self._frames: dict[int, list[BranchPointData]] = {}
        self._zx_cache: dict[int, Series] = {}

    # ------------------------------------------------------------------
    # branch points

    def branch_points(self):
        """Roots of s z P'(z) = 1: double-precision companion-matrix seeds
        polished by Newton iteration at full precision."""
        if self._roots is not None:
            return self._roots
        with mpmath.workprec(self.prec):
            float_coeffs = [complex(c) for c in reversed(self.W.coeffs)]
            seeds = np.roots(np.array(float_coeffs, dtype=complex))
            wp = self.W.derivative()
            roots = []
            for seed in seeds:
                z = mpmath.mpc(seed)
                for _ in range(int(mpmath.log(self.prec, 2)) + 4):
                    z = z - self.W(z) / wp(z)
                roots.append(z)
            roots.sort(key=lambda r: (mpmath.re(r), mpmath.im(r)))
            scale = max(abs(r) for r in roots)
            # separation first: Newton converges only linearly on a multiple
            # root, so a residual check would misreport degeneracy
            for i in range(len(roots)):
                for j in range(i + 1, len(roots)):
                    if abs(roots[i] - roots[j]) < self.spec.separation_rel * scale:
                        raise DegenerateCurveError(
                            "coincident branch points; the curve is outside the "
                            "simple-branch-point regime"
                        )
            tol = mpmath.mpf(2) ** (-self.prec // 2)
            for r in roots:
                residual = abs(self.s * r * self.P.derivative()(r) - 1)
                if residual > tol:
                    raise ArithmeticError(
                        f"branch point failed to polish: residual {residual}"
                    )
            self._roots = roots
        return self._roots

    # ------------------------------------------------------------------
    # local frames

    def x_value(self, z):
        return z * mpmath.exp(-self.s * self.P(z))

    def negligible(self, scale=1):
        tol = mpmath.mpf(2) ** (-self.prec // 2) * scale
        return lambda c: abs(c) <= tol

    def frames(self, order: int) -> list[BranchPointData]:
        """Local data at every branch point; series windows cover exponents
        below `order`."""
        if order in self._frames:
            return self._frames[order]
        with mpmath.workprec(self.prec):
            frames = [self._frame(i, a, order) for i, a in enumerate(self.branch_points())]
        self._frames[order] = frames
        return frames

    def _frame(self, index: int, a, order: int) -> BranchPointData:
        ring = self.ring
        n = order + 2
        # x(a+u) = (a+u) exp(-s P(a)) exp(-s (P(a+u) - P(a)))
        p_local = self.P.shifted_series(a, "u", n)
        p_at = p_local.coefficient(0)
        p_tail = p_local - Series.constant(ring, "u", p_at, n)
        x_at = a * mpmath.exp(-self.s * p_at)
        a_plus_u = Series.from_coeffs(ring, "u", [a, ring.one], n)
        x_series = (a_plus_u * p_tail.scale(-self.s).exp()).scale(
            mpmath.exp(-self.s * p_at))

        scale = max(abs(c) for c in x_series.coeffs)
        small = self.negligible(scale)
        if not small(x_series.coefficient(1)):
            raise ArithmeticError(f"dx does not vanish at branch point {index}")
        x2 = x_series.coefficient(2)
        if small(x2):
            raise DegenerateCurveError(
                f"vanishing second derivative of x at branch point {index}"
            )

        # involution via the normalized square-root coordinate:
        #   X(u) := x(a+u) - x(a) = x2 u^2 (1 + rho(u)),
        #   t(u) := u sqrt(1 + rho(u)),  sigma := t^{-1}(-t(u)).
        x_shift = Series(ring, "u", 0,
                         [ring.zero, ring.zero] + x_series.coeffs[2:], n)
        ratio = x_shift.shift(-2).strip_leading(ring.is_zero).div_scalar(x2)
        # constant term is exactly 1 mathematically; clamp the half-ulp of
        # division noise so the series square root sees a unit constant
        ratio = Series(ring, "u", 0, [ring.one] + ratio.coeffs[1:], ratio.order)
        t = Series.identity(ring, "u", ratio.order + 1) * ratio.sqrt_unit()
        sigma = t.reversion().compose(-t)

        frame = BranchPointData(
            index=index, a=a, x_at=x_at, x_series=x_series,
            sigma=sigma, sigma_prime=sigma.derivative(),
            y_series=p_local, y_sigma=p_local.compose(sigma),
            w_series=self.W.shifted_series(a, "u", n),
        )
        self._validate_frame(frame, scale)
        return frame

    def _validate_frame(self, frame: BranchPointData, scale) -> None:
        # sigma o sigma = id and x o sigma = x to the available window
        double = frame.sigma.compose(frame.sigma)
        ident = Series.identity(self.ring, "u", double.order)
        err1 = max(abs(c) for c in (double - ident).coeffs)
        comp = frame.x_series.compose(frame.sigma) - frame.x_series
        err2 = max(abs(c) for c in comp.coeffs)
        tol = mpmath.mpf(2) ** (-self.prec // 2) * max(scale, 1)
        if err1 > tol or err2 > tol:
            raise ArithmeticError(
                f"involution failed self-check at branch point {frame.index}: "
                f"sigma o sigma residual {err1}, x o sigma residual {err2}"
            )

    # ------------------------------------------------------------------
    # x-inversion at the origin

    def invert_x_numeric(self, order: int) -> Series:
        """z(x) with x(z(x)) = x, trusted through exponent `order`."""
        if order < 1:
            raise ValueError("order must be at least 1")
        if order not in self._zx_cache:
            with mpmath.workprec(self.prec):
                ring = self.ring
                p = Poly(ring, [ring.zero] + self.q).to_series("x", order + 1)
                z = Series.identity(ring, "x", order + 1)
                xz = z * p.scale(-self.s).exp()
                self._zx_cache[order] = xz.reversion()  # already in the x variable
        return self._zx_cache[order]


def invert_x_exact(d_max: int, order: int, cap: int = 12) -> Series:
    """z(x) over weight polynomials (s symbolic); capped because exact
    reversion cost grows quickly with the order."""
    if order > cap:
        raise ValueError(f"exact inversion order {order} exceeds cap {cap}")
    return x_of_z_series(d_max, order + 1).reversion().rename("x")


# ----------------------------------------------------------------------
# partition-sum coefficients A_mu^i


def a_mu_coefficient(i: int, mu: int, d_max: int) -> WeightPolynomial:
    """A_mu^i = i * sum over partitions lambda of mu - i (parts <= d_max) of
    mu^(len(lambda)-1) / |Aut lambda| * q_lambda * s^len(lambda); these are
    the coefficients of z^i = sum_mu A_mu^i x^mu."""
    if i < 1:
        raise ValueError("i must be positive")
    if mu < i:
        return WeightPolynomial.zero(d_max)
    if mu == i:
        return WeightPolynomial.one(d_max)
    from .oracle import partitions_of

    total = WeightPolynomial.zero(d_max)
    for lam in partitions_of(mu - i, d_max):
        length = len(lam)
        aut = 1
        run = 1
        for k in range(1, length):
            run = run + 1 if lam[k] == lam[k - 1] else 1
            aut *= run if lam[k] == lam[k - 1] else 1
        coeff = Fraction(i) * Fraction(mu) ** (length - 1) / aut
        total = total + WeightPolynomial.q_partition(lam, d_max, coeff=coeff,
                                                     s_exponent=length)
    return total


# ----------------------------------------------------------------------
# the phi basis


class RationalOverW:
    """Rational function N(z) / w(z)^j with w = 1 - s z P'(z); closed under
    the generator D = (z / w) d/dz used to build the phi basis."""

    def __init__(self, numer: Poly, wpow: int, w: Poly):
        self.numer = numer
        self.wpow = wpow
        self.w = w

    def apply_generator(self) -> "RationalOverW":
        # D(N / w^j) = z (N' w - j N w') / w^(j+2)
        ring = self.numer.ring
        z = Poly(ring, [ring.zero, ring.one])
        quotient_rule = self.numer.derivative() * self.w
        if self.wpow:
            quotient_rule = quotient_rule - self.numer.scale(self.wpow) * self.w.derivative()
        return RationalOverW(z * quotient_rule, self.wpow + 2, self.w)

    def __call__(self, z_value):
        return self.numer(z_value) / self.w(z_value) ** self.wpow

    def local_series(self, a, order: int, negligible) -> Series:
        """Laurent expansion at z = a + u; w may have a simple zero at a."""
        n_local = self.numer.shifted_series(a, "u", order)
        w_local = self.w.shifted_series(a, "u", order).strip_leading(negligible)
        return n_local * w_local.inverse().pow_int(self.wpow)

    def series_at_origin(self, order: int) -> Series:
        n0 = self.numer.to_series("z", order)
        w0 = self.w.to_series("z", order)
        return n0 * w0.inverse().pow_int(self.wpow)

    def value_at_infinity(self):
        """Limit as z -> infinity; finite whenever deg N <= j deg w."""
        ring = self.numer.ring
        deg_d = self.wpow * self.w.degree()
        deg_n = self.numer.degree()
        while deg_n > 0 and ring.is_zero(self.numer.coeffs[deg_n]):
            deg_n -= 1
        if deg_n < deg_d:
            return ring.zero
        if deg_n == deg_d:
            return self.numer.coeffs[deg_n] / self.w.coeffs[self.w.degree()] ** self.wpow
        raise AlgebraError("rational function diverges at infinity")


class PhiBasis:
    """phi_{-1}^i = z^i and phi_{k+1}^i = (z / w) d/dz phi_k^i.

    Every phi_k^i with k >= 0 has poles only at the branch points and its
    sigma-symmetrization is analytic there; together these span the space
    of rational functions with that property.
    """

    def __init__(self, w: Poly):
        self.w = w
        self.ring = w.ring
        self._cache: dict[tuple[int, int], RationalOverW] = {}

    def phi(self, i: int, k: int) -> RationalOverW:
        if i < 1 or k < -1:
            raise ValueError("need i >= 1 and k >= -1")
        key = (i, k)
        if key not in self._cache:
            if k == -1:
                coeffs = [self.ring.zero] * i + [self.ring.one]
                self._cache[key] = RationalOverW(Poly(self.ring, coeffs), 0, self.w)
            else:
                self._cache[key] = self.phi(i, k - 1).apply_generator()
        return self._cache[key]

    @classmethod
    def for_curve(cls, curve: SpectralCurve) -> "PhiBasis":
        return cls(curve.W)

    @classmethod
    def exact(cls, d_max: int) -> "PhiBasis":
        """phi over the exact coefficient ring (q's and s symbolic)."""
        ring = WeightPolyRing(d_max)
        s = WeightPolynomial.s(d_max)
        w_coeffs = [ring.one] + [
            (WeightPolynomial.q(i, d_max) * s).scale(-i) for i in range(1, d_max + 1)
        ]
        return cls(Poly(ring, w_coeffs))


# ----------------------------------------------------------------------
# exact closed-form checks for the (0,1) and (0,2) generating functions


@dataclass
class CheckReport:
    name: str
    ok: bool
    order: int
    detail: str = ""


def f01_check(d_max: int, order: int) -> CheckReport:
    """x d/dx F_{0,1}(x) = P(z(x)) as exact series: the left side comes from
    the recursion table, the right from exact reversion."""
    table = DHTable(d_max)
    ring = WeightPolyRing(d_max)
    coeffs = [ring.zero] + [table.dh(0, (mu,)).scale(mu) for mu in range(1, order + 1)]
    lhs = Series.from_coeffs(ring, "x", coeffs, order + 1)
    zx = x_of_z_series(d_max, order + 2).reversion().rename("x")
    rhs = p_series(ring, order + 1).compose(zx).truncate(order + 1)
    ok = lhs == rhs
    return CheckReport("f01", ok, order, "" if ok else _first_series_diff(lhs, rhs))


def f02_check(d_max: int, order: int) -> CheckReport:
    """The closed form of F_{0,2},

        -log((x_1 - x_2) / (z_1 - z_2)) - s P(z_1) - s P(z_2),

    with z_i = z(x_i), expanded at the origin, must reproduce DH_{0,2}
    coefficient by coefficient (exact, bivariate via nested series)."""
    table = DHTable(d_max)
    ring = WeightPolyRing(d_max)
    n = order + 1
    inner = SeriesRing(ring, "x1", n)
    s = WeightPolynomial.s(d_max)

    zx = x_of_z_series(d_max, n + 1).reversion().truncate(n)
    zx1 = Series(ring, "x1", 0, [zx.coefficient(k) for k in range(n)], n)
    zx1_pows = _powers(zx1, n)
    zx2_pows = [_lift_to_outer(inner, p, n) for p in zx1_pows]

    # (x1 - x2)/(z1 - z2) = sum_k c_k sum_{a+b=k-1} z1^a z2^b at z_i = z(x_i);
    # z(x)^a = O(x^a), so k must run to 2*order + 1 to fill the window, and
    # exponents a, b >= n contribute nothing inside it
    xz = x_of_z_series(d_max, 2 * n)
    quot = Series.zero(inner, "x2", n)
    for k in range(1, xz.order):
        ck = xz.coefficient(k)
        if ck.is_zero():
            continue
        for b in range(min(k, n)):
            a = k - 1 - b
            if a < n:
                quot = quot + zx2_pows[b].scale(zx1_pows[a].scale(ck))

    # log(quot): factor out the x2-constant term (a unit inner series)
    c0 = quot.coefficient(0)
    log_c0 = c0.log()
    log_quot = quot.div_scalar(c0).log() + _outer_constant(inner, log_c0, n)

    sp1 = p_series(ring, n).compose(zx1).scale(s)          # s P(z(x1))
    sp2 = _lift_to_outer(inner, sp1, n)                    # s P(z(x2))
    f02 = -log_quot - _outer_constant(inner, sp1, n) - sp2

    ok, detail = True, ""
    for mu2 in range(1, order + 1):
        coeff_x1 = f02.coefficient(mu2)
        for mu1 in range(1, order + 1):
            got = coeff_x1.coefficient(mu1)
            want = table.dh(0, (mu1, mu2))
            if got != want:
                return CheckReport("f02", False, order,
                                   f"first mismatch at (mu1, mu2) = ({mu1}, {mu2})")
            if not got.s_coefficient(0).is_zero():
                return CheckReport("f02", False, order,
                                   f"nonzero s^0 part at ({mu1}, {mu2})")
    return CheckReport("f02", ok, order, detail)


def _powers(series: Series, order: int) -> list[Series]:
    ring = series.ring
    out = [Series.constant(ring, series.var, ring.one, order)]
    for _ in range(order):
        out.append((out[-1] * series).truncate(order))
    return out


def _outer_constant(inner: SeriesRing, value: Series, order: int) -> Series:
    coeffs = [value] + [inner.zero] * (order - 1)
    return Series(inner, "x2", 0, coeffs, order)


def _lift_to_outer(inner: SeriesRing, series: Series, order: int) -> Series:
    """Reinterpret an x1-series f as f(x2): a series in x2 whose
    coefficients are constants of the inner ring."""
    ring = series.ring
    coeffs = [Series.constant(ring, "x1", series.coefficient(k), inner.order)
              for k in range(order)]
    return Series(inner, "x2", 0, coeffs, order)


def _first_series_diff(a: Series, b: Series) -> str:
    for k in range(min(a.order, b.order)):
        if a.coefficient(k) != b.coefficient(k):
            return f"first differing coefficient at exponent {k}"
    return "windows differ"
