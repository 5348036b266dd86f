"""The Chekhov-Eynard-Orantin residue recursion on the instantiated curve.

Correlation multidifferentials are stored in a global pole basis: the
coefficient attached to a multi-index ((i_1,k_1),...,(i_n,k_n)) multiplies
prod_j dz_j / (z_j - a_{i_j})^(k_j + 1).  A rational differential with poles
only at the branch points and vanishing at infinity is the sum of its
principal parts, so this basis is complete for every produced form, and the
residue extraction emits exactly these coefficients through the geometric
expansion 1/(z_1 - z) = sum_k (z - a_i)^k / (z_1 - a_i)^(k+1).

Beyond the recursion itself the engine hosts the closed-form cross-checks
(the triple-point form and the genus-one one-point form), the expansion of
forms at the origin against the exact recursion table, loop-equation
diagnostics, and the decomposition of one-point data in the phi basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, permutations

import mpmath

from .curve import PhiBasis, SpectralCurve
from .cutjoin import DHTable
from .series import Series, SeriesRing, TruncationError

__all__ = ["CorrelationForm", "RecursionEngine", "VerifyRow", "VerifyReport",
           "LoopCheckReport", "PhiFitReport"]


@dataclass
class CorrelationForm:
    g: int
    n: int
    coeffs: dict[tuple, object]
    asymmetry: float = 0.0

    def max_pole_order(self) -> int:
        return max((k + 1 for idx in self.coeffs for (_, k) in idx), default=0)

    def scale(self):
        return max((abs(c) for c in self.coeffs.values()), default=mpmath.mpf(0))

    def slot_profile(self, spectators: tuple) -> dict[tuple[int, int], object]:
        """Coefficients of the first slot for a fixed spectator multi-index."""
        out = {}
        for idx, c in self.coeffs.items():
            if idx[1:] == spectators:
                out[idx[0]] = c
        return out

    def spectator_keys(self):
        return sorted({idx[1:] for idx in self.coeffs})

    def evaluate(self, points, roots):
        """Value of the form at numeric points (coefficient of prod dz_j)."""
        if len(points) != self.n:
            raise ValueError("point count must equal n")
        total = mpmath.mpc(0)
        for idx, c in self.coeffs.items():
            term = c
            for z, (i, k) in zip(points, idx):
                term = term / (z - roots[i]) ** (k + 1)
            total += term
        return total

    def check_symmetry(self):
        """Largest relative asymmetry under slot permutations."""
        scale = self.scale()
        if not scale or self.n == 1:
            return 0.0
        worst = mpmath.mpf(0)
        for perm in permutations(range(self.n)):
            if perm == tuple(range(self.n)):
                continue
            for idx, c in self.coeffs.items():
                permuted = tuple(idx[p] for p in perm)
                other = self.coeffs.get(permuted, mpmath.mpc(0))
                worst = max(worst, abs(c - other))
        return worst / scale


@dataclass
class VerifyRow:
    mu: tuple[int, ...]
    predicted: object
    expected: object
    rel_residual: object
    ok: bool


@dataclass
class VerifyReport:
    g: int
    n: int
    rows: list[VerifyRow]
    tolerance: object
    stability: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(row.ok for row in self.rows)

    @property
    def max_residual(self):
        return max((row.rel_residual for row in self.rows), default=mpmath.mpf(0))


@dataclass
class LoopCheckReport:
    g: int
    n: int
    worst: object
    tolerance: object
    details: list

    @property
    def ok(self) -> bool:
        return self.worst < self.tolerance


@dataclass
class PhiFitReport:
    g: int
    n: int
    coefficients: dict
    residual: object
    m_cutoff: int
    tolerance: object

    @property
    def ok(self) -> bool:
        return self.residual < self.tolerance


class _Frame:
    """Per-branch-point working data for one truncation window."""

    def __init__(self, engine: "RecursionEngine", bp, window: int):
        self.engine = engine
        self.bp = bp
        ring = engine.ring
        curve = engine.curve
        self.window = window
        a = bp.a
        # omega_{0,1} = P(z) (1/z - s P'(z)) dz locally and at sigma
        inv_au = Series.from_coeffs(ring, "u", [a, ring.one], window).inverse()
        pprime = curve.P.derivative().shifted_series(a, "u", window)
        dlogx = inv_au - pprime.scale(curve.s)
        w1 = bp.y_series.truncate(window) * dlogx
        w1_sigma = w1.compose(bp.sigma) * bp.sigma_prime
        dden = (w1 - w1_sigma).strip_leading(engine.negligible_abs(w1))
        if dden.lo != 2:
            raise ArithmeticError(
                f"kernel denominator vanishes to order {dden.lo} (expected "
                f"exactly 2) at branch point {bp.index}"
            )
        self.w1 = w1
        self.kden = dden.inverse()
        self.sigma = bp.sigma
        self.sigma_prime = bp.sigma_prime
        self._sigma_inv = bp.sigma.inverse()
        self._sig_pows: dict[int, Series] = {}
        self._ev_z: dict[tuple[int, int], Series] = {}
        self._ev_s: dict[tuple[int, int], Series] = {}
        self._shift_inv: dict[int, Series] = {}
        self._shift_inv_sigma: dict[int, Series] = {}
        self._sig_prime_pows: dict[int, Series] = {}

    def sig_pow(self, k: int) -> Series:
        """sigma(u)^k for any integer k."""
        if k not in self._sig_pows:
            if k == 0:
                value = Series.constant(self.engine.ring, "u",
                                        self.engine.ring.one, self.window)
            else:
                base = self.sigma if k > 0 else self._sigma_inv
                value = base.pow_int(abs(k))
            self._sig_pows[k] = value
        return self._sig_pows[k]

    def omega02_z_factor(self, k: int) -> Series:
        """u-dependence of the two-point kernel paired with spectator index
        (i, k+1): the monomial (k+1) u^k."""
        ring = self.engine.ring
        coeffs = [ring.zero] * self.window
        coeffs[k] = self.engine.ring.from_rational(k + 1)
        return Series(ring, "u", 0, coeffs, self.window)

    def omega02_s_factor(self, k: int) -> Series:
        """Same, evaluated on the opposite sheet: (k+1) sigma^k sigma'."""
        if k not in self._sig_prime_pows:
            if k == 0:
                value = self.sigma_prime
            else:
                value = self.sig_pow(k) * self.sigma_prime
            self._sig_prime_pows[k] = value
        return self._sig_prime_pows[k].scale(k + 1)

    def _shift_base(self, j: int) -> Series:
        # 1/((a_i - a_j) + u)
        if j not in self._shift_inv:
            ring = self.engine.ring
            gap = self.bp.a - self.engine.curve.branch_points()[j]
            base = Series.from_coeffs(ring, "u", [gap, ring.one], self.window)
            self._shift_inv[j] = base.inverse()
        return self._shift_inv[j]

    def eval_z(self, idx: tuple[int, int]) -> Series:
        """Basis one-form dz/(z - a_j)^(k+1) at z = a_i + u (du stripped)."""
        if idx not in self._ev_z:
            j, k = idx
            ring = self.engine.ring
            if j == self.bp.index:
                coeffs = [ring.one] + [ring.zero] * (self.window + k)
                value = Series(ring, "u", -(k + 1), coeffs, self.window)
            else:
                value = self._shift_base(j).pow_int(k + 1)
            self._ev_z[idx] = value
        return self._ev_z[idx]

    def eval_sigma(self, idx: tuple[int, int]) -> Series:
        """Same one-form at z = a_i + sigma(u), including d(sigma)/du."""
        if idx not in self._ev_s:
            j, k = idx
            if j == self.bp.index:
                value = self.sig_pow(-(k + 1)) * self.sigma_prime
            else:
                if j not in self._shift_inv_sigma:
                    self._shift_inv_sigma[j] = self._shift_base(j).compose(self.sigma)
                value = self._shift_inv_sigma[j].pow_int(k + 1) * self.sigma_prime
            self._ev_s[idx] = value
        return self._ev_s[idx]


class RecursionEngine:
    def __init__(self, curve: SpectralCurve, table: DHTable | None = None,
                 extra_order: int = 0):
        self.curve = curve
        self.ring = curve.ring
        self.prec = curve.prec
        self.extra_order = extra_order
        self.table = table or DHTable(curve.spec.d)
        self._forms: dict[tuple[int, int], CorrelationForm] = {}

    # ------------------------------------------------------------------
    # tolerances

    def negligible_abs(self, reference: Series):
        scale = max((abs(c) for c in reference.coeffs), default=mpmath.mpf(1))
        tol = mpmath.mpf(2) ** (-self.prec // 2) * max(scale, 1)
        return lambda c: abs(c) <= tol

    def trim_tol(self):
        return mpmath.mpf(2) ** (-(3 * self.prec) // 4)

    def default_tolerance(self):
        return mpmath.mpf(10) ** (-self.prec // 4)

    # ------------------------------------------------------------------
    # the recursion

    def window_for(self, g: int, n: int) -> int:
        return 2 * (6 * g + 2 * n - 4) + 8 + self.extra_order

    def form(self, g: int, n: int) -> CorrelationForm:
        """omega_{g,n} for 2g - 2 + n > 0 in the pole basis."""
        if 2 * g - 2 + n <= 0:
            raise ValueError("stable forms require 2g - 2 + n > 0")
        key = (g, n)
        if key not in self._forms:
            with mpmath.workprec(self.prec):
                self._forms[key] = self._tr_step(g, n)
        return self._forms[key]

    def _tr_step(self, g: int, n: int) -> CorrelationForm:
        window = self.window_for(g, n)
        frames = [
            _Frame(self, bp, window) for bp in self.curve.frames(window)
        ]
        k02_max = max(6 * g + 2 * n - 4, 2)
        out: dict[tuple, mpmath.mpc] = {}
        for frame in frames:
            blocks = self._bracket_blocks(g, n, frame, k02_max)
            for spect, series in blocks.items():
                e = frame.kden * series
                if e.order < 1:
                    raise TruncationError(
                        f"local window exhausted at branch point "
                        f"{frame.bp.index}; raise the truncation order"
                    )
                for k1 in range(0, -e.lo):
                    value = e.coefficient(-1 - k1)
                    idx = ((frame.bp.index, k1),) + spect
                    out[idx] = out.get(idx, mpmath.mpc(0)) + value
        form = CorrelationForm(g, n, out)
        self._trim(form)
        form.asymmetry = form.check_symmetry()
        return form

    def _trim(self, form: CorrelationForm) -> None:
        scale = form.scale()
        if not scale:
            return
        cutoff = scale * self.trim_tol()
        form.coeffs = {idx: c for idx, c in form.coeffs.items() if abs(c) > cutoff}

    def _bracket_blocks(self, g: int, n: int, frame: _Frame, k02_max: int):
        """The bracketed quadratic expression as u-series grouped by the
        spectator-slot basis assignment."""
        blocks: dict[tuple, Series] = {}

        def add(key: tuple, series: Series):
            blocks[key] = blocks[key] + series if key in blocks else series

        # cut term: omega_{g-1, n+1}(z, sigma(z), spectators)
        if g >= 1:
            if (g - 1, n + 1) == (0, 2):
                u = Series.identity(self.ring, "u", frame.window)
                gap = (u - frame.sigma)
                add((), gap.inverse().pow_int(2) * frame.sigma_prime)
            else:
                inner = self.form(g - 1, n + 1)
                for idx, c in inner.coeffs.items():
                    series = frame.eval_z(idx[0]) * frame.eval_sigma(idx[1])
                    add(idx[2:], series.scale(c))

        # product terms over ordered stable splits
        spect_slots = tuple(range(2, n + 1))
        for r in range(len(spect_slots) + 1):
            for subset in combinations(spect_slots, r):
                complement = tuple(s for s in spect_slots if s not in subset)
                for g1 in range(g + 1):
                    g2 = g - g1
                    if (g1 == 0 and not subset) or (g2 == 0 and not complement):
                        continue  # omega_{0,1} factors are excluded
                    f1 = self._factor(g1, subset, frame, k02_max, at_sigma=False)
                    f2 = self._factor(g2, complement, frame, k02_max, at_sigma=True)
                    for as1, s1 in f1.items():
                        for as2, s2 in f2.items():
                            assignment = dict(as1)
                            assignment.update(as2)
                            key = tuple(assignment[s] for s in spect_slots)
                            add(key, s1 * s2)
        return blocks

    def _factor(self, g: int, slots: tuple[int, ...], frame: _Frame,
                k02_max: int, at_sigma: bool):
        """One factor of the quadratic term: omega_{g, len(slots)+1} with
        the running argument at z (or sigma(z)) and the given spectator
        slots; returns {(slot, index) assignments: u-series}."""
        out: dict[tuple, Series] = {}
        if g == 0 and len(slots) == 1:
            j = slots[0]
            for k in range(k02_max + 1):
                series = (frame.omega02_s_factor(k) if at_sigma
                          else frame.omega02_z_factor(k))
                out[((j, (frame.bp.index, k + 1)),)] = series
            return out
        inner = self.form(g, len(slots) + 1)
        evaluate = frame.eval_sigma if at_sigma else frame.eval_z
        for idx, c in inner.coeffs.items():
            key = tuple(zip(slots, idx[1:]))
            series = evaluate(idx[0]).scale(c)
            out[key] = out[key] + series if key in out else series
        return out

    # ------------------------------------------------------------------
    # base-case differentials as local data

    def omega01_local(self, bp_index: int, order: int) -> Series:
        """omega_{0,1} = y dx / x = P(z)(1/z - s P'(z)) dz expanded at the
        branch point: the returned series multiplies du."""
        with mpmath.workprec(self.prec):
            bp = self.curve.frames(order)[bp_index]
            return _Frame(self, bp, order).w1

    def kernel_inverse_local(self, bp_index: int, order: int) -> Series:
        """1 / (omega_{0,1}(z) - omega_{0,1}(sigma(z))) at the branch point;
        a Laurent series starting at u^-2 (the zero is of order exactly
        two for a simple branch point)."""
        with mpmath.workprec(self.prec):
            bp = self.curve.frames(order)[bp_index]
            return _Frame(self, bp, order).kden

    def omega02_local_coefficient(self, bp_index: int, order: int, k: int) -> Series:
        """u-dependence of omega_{0,2}(a_i + u, z_j) paired with the
        spectator basis element dz_j/(z_j - a_i)^(k+2): the geometric
        expansion of the Cauchy kernel gives the monomial (k+1) u^k."""
        with mpmath.workprec(self.prec):
            bp = self.curve.frames(order)[bp_index]
            return _Frame(self, bp, order).omega02_z_factor(k)

    # ------------------------------------------------------------------
    # closed forms

    def omega03_closed(self, points) -> mpmath.mpc:
        """Direct evaluation of the triple-point differential from its
        closed form: the sum over branch points of

            s a^3 / [(z1-a)^2 (z2-a)^2 (z3-a)^2 (1 + s a^2 P''(a))].

        The overall sign is pinned by positivity: every double Hurwitz
        coefficient is positive, so the form is positive for small positive
        arguments; it also follows from w'(a) = -(1/a)(1 + s a^2 P''(a))
        when taking the triple derivative of the cyclic closed form of
        F_{0,3}."""
        if len(points) != 3:
            raise ValueError("three points required")
        with mpmath.workprec(self.prec):
            curve = self.curve
            total = mpmath.mpc(0)
            for a in curve.branch_points():
                ppp = curve.P.derivative().derivative()(a)
                denom = 1 + curve.s * a * a * ppp
                term = curve.s * a ** 3 / denom
                for z in points:
                    term = term / (z - a) ** 2
                total += term
            return total

    def omega11_direct(self, z1) -> mpmath.mpc:
        """Independent single-residue evaluation of the genus-one one-point
        form at a numeric argument (no pole-basis read-off)."""
        with mpmath.workprec(self.prec):
            window = self.window_for(1, 1)
            total = mpmath.mpc(0)
            for bp in self.curve.frames(window):
                frame = _Frame(self, bp, window)
                u = Series.identity(self.ring, "u", window)
                bracket = (u - frame.sigma).inverse().pow_int(2) * frame.sigma_prime
                gap = z1 - bp.a
                geo = Series.from_coeffs(
                    self.ring, "u", [gap, -self.ring.one], window
                ).inverse()
                total += (geo * frame.kden * bracket).residue()
            return total

    # ------------------------------------------------------------------
    # origin expansion and conjecture verification

    def expand_at_origin(self, form: CorrelationForm, mu_max: int):
        """Predicted double Hurwitz values at this curve's weights: the
        coefficient of prod mu_i x_i^(mu_i - 1) dx_i of the form."""
        with mpmath.workprec(self.prec):
            zx = self.curve.invert_x_numeric(mu_max + 1)
            zprime = zx.derivative().strip_leading(self.ring.is_zero)
            vectors: dict[tuple[int, int], list] = {}
            roots = self.curve.branch_points()
            needed = sorted({idx_j for idx in form.coeffs for idx_j in idx})
            for (i, k) in needed:
                shifted = zx - Series.constant(self.ring, "x", roots[i], zx.order)
                b = zprime * shifted.inverse().pow_int(k + 1)
                vectors[(i, k)] = [b.coefficient(mu - 1) for mu in range(1, mu_max + 1)]
            predictions: dict[tuple[int, ...], mpmath.mpc] = {}
            for mu in _mu_box(form.n, mu_max):
                total = mpmath.mpc(0)
                for idx, c in form.coeffs.items():
                    term = c
                    for mu_j, idx_j in zip(mu, idx):
                        term = term * vectors[idx_j][mu_j - 1]
                    total += term
                scale = 1
                for m in mu:
                    scale *= m
                predictions[mu] = total / scale
            return predictions

    def verify_conjecture(self, g: int, n: int, mu_max: int,
                          tolerance=None) -> VerifyReport:
        """Compare the origin expansion of omega_{g,n} with the exact
        recursion values specialized at this curve's weights."""
        tolerance = tolerance if tolerance is not None else self.default_tolerance()
        with mpmath.workprec(self.prec):
            form = self.form(g, n)
            predicted = self.expand_at_origin(form, mu_max)
            pairs = {}
            for mu in sorted(predicted):
                exact = self.table.dh(g, mu).specialize(
                    list(self.curve.spec.q_values), self.curve.spec.s_value
                )
                pairs[mu] = (predicted[mu], self.ring.from_rational(exact))
            # residuals are relative to the row's own value; rows whose exact
            # value vanishes (impossible covers) are measured against the
            # largest expected value of the report instead
            ref = max((abs(e) for _, e in pairs.values()), default=mpmath.mpf(1))
            ref = ref if ref else mpmath.mpf(1)
            rows = []
            for mu, (pred, expected) in pairs.items():
                denom = abs(expected) if expected != 0 else ref
                residual = abs(pred - expected) / denom
                rows.append(VerifyRow(mu, pred, expected, residual,
                                      bool(residual < tolerance)))
            return VerifyReport(g, n, rows, tolerance)

    def omega02_origin_check(self, mu_max: int, tolerance=None):
        """The unstable two-point case: expansion of
        omega_{0,2} - dx1 dx2/(x1-x2)^2 at the origin must match the exact
        two-point values (the mixed second derivative of -log Q with
        Q = (x1-x2)/(z1-z2))."""
        tolerance = tolerance if tolerance is not None else self.default_tolerance()
        with mpmath.workprec(self.prec):
            ring = self.ring
            n = mu_max + 1
            inner = SeriesRing(ring, "x1", n)
            zx = self.curve.invert_x_numeric(n)
            zx1 = Series(ring, "x1", 0, [zx.coefficient(k) for k in range(n)], n)
            pows1 = [Series.constant(ring, "x1", ring.one, n)]
            for _ in range(n):
                pows1.append((pows1[-1] * zx1).truncate(n))
            pows2 = [_lift(inner, p, n) for p in pows1]

            p = self.curve.P.to_series("x", 2 * n).rename("z")
            z = Series.identity(ring, "z", 2 * n)
            xz = z * p.scale(-self.curve.s).exp()
            quot = Series.zero(inner, "x2", n)
            for k in range(1, xz.order):
                ck = xz.coefficient(k)
                if ck == 0:
                    continue
                for b in range(min(k, n)):
                    a = k - 1 - b
                    if a < n:
                        quot = quot + pows2[b].scale(pows1[a].scale(ck))
            c0 = quot.coefficient(0)
            log_c0 = c0.log()
            normalized = quot.div_scalar(c0)
            # outer constant is exactly 1 mathematically; clamp the ulp
            normalized = Series(inner, "x2", 0, [inner.one] + normalized.coeffs[1:],
                                normalized.order)
            neg_log = -(normalized.log() + _outer_const(inner, log_c0, n))

            rows = []
            for mu2 in range(1, mu_max + 1):
                coeff = neg_log.coefficient(mu2)
                for mu1 in range(1, mu_max + 1):
                    predicted = coeff.coefficient(mu1)
                    exact = self.table.dh(0, (mu1, mu2)).specialize(
                        list(self.curve.spec.q_values), self.curve.spec.s_value
                    )
                    expected = ring.from_rational(exact)
                    denom = max(abs(expected), mpmath.mpf(2) ** (-self.prec))
                    residual = abs(predicted - expected) / denom
                    rows.append(VerifyRow((mu1, mu2), predicted, expected,
                                          residual, bool(residual < tolerance)))
            return VerifyReport(0, 2, rows, tolerance)

    # ------------------------------------------------------------------
    # loop equations and phi decomposition

    def loop_equation_check(self, g: int, n: int, tolerance=None) -> LoopCheckReport:
        """The sigma-symmetrized one-slot restriction of F_{g,n} must be
        analytic at every branch point.  F is recovered from the pole basis
        by termwise integration (log-free: simple-pole coefficients vanish
        for these forms)."""
        tolerance = tolerance if tolerance is not None else self.default_tolerance()
        with mpmath.workprec(self.prec):
            form = self.form(g, n)
            window = self.window_for(g, n)
            frames = self.curve.frames(window)
            scale = form.scale()
            worst = mpmath.mpf(0)
            details = []
            for spect in form.spectator_keys():
                profile = form.slot_profile(spect)
                for bp in frames:
                    terms = {k: c for (i, k), c in profile.items() if i == bp.index}
                    if not terms:
                        continue
                    # simple poles integrate to logs; they must be absent
                    log_part = abs(terms.get(0, mpmath.mpc(0)))
                    if scale:
                        worst = max(worst, log_part / scale)
                    max_k = max(terms)
                    coeffs = [mpmath.mpc(0)] * (max_k + window)
                    f_scale = mpmath.mpf(0)
                    for k, c in terms.items():
                        if k >= 1:
                            coeffs[max_k - k] = -c / k
                            f_scale = max(f_scale, abs(c / k))
                    f_local = Series(self.ring, "u", -max_k, coeffs, window)
                    sym = f_local + f_local.compose(bp.sigma)
                    principal = mpmath.mpf(0)
                    for e in range(sym.lo, 0):
                        principal = max(principal, abs(sym.coefficient(e)))
                    rel = principal / f_scale if f_scale else mpmath.mpf(0)
                    worst = max(worst, rel)
                    details.append((spect, bp.index, rel))
            return LoopCheckReport(g, n, worst, tolerance, details)

    def _phi_values(self, basis: PhiBasis, i: int, m: int, points):
        phi = basis.phi(i, m)
        at_inf = phi.value_at_infinity()
        return [phi(z) - at_inf for z in points]

    def phi_decompose(self, g: int, n: int, m_cap: int = 6,
                      tolerance=None) -> PhiFitReport:
        """Fit F_{g,n} (from the pole basis) in the tensor basis of
        centered phi functions, discovering the m-support empirically."""
        tolerance = tolerance if tolerance is not None else self.default_tolerance()
        with mpmath.workprec(self.prec):
            form = self.form(g, n)
            basis = PhiBasis.for_curve(self.curve)
            d = self.curve.spec.d
            roots = self.curve.branch_points()
            rmin = min(abs(a) for a in roots)
            best = None
            for m_cutoff in range(0, m_cap + 1):
                slots = [(i, m) for i in range(1, d + 1) for m in range(m_cutoff + 1)]
                unknowns = len(slots) ** n
                n_samples = 2 * unknowns + 8
                samples = _sample_tuples(n_samples, n, rmin, self.prec)
                b = mpmath.matrix(n_samples, 1)
                for t, pt in enumerate(samples):
                    b[t, 0] = self._f_value(form, pt, roots)
                a_mat = mpmath.matrix(n_samples, unknowns)
                col = 0
                col_keys = []
                for combo in _tensor(slots, n):
                    for t, pt in enumerate(samples):
                        value = mpmath.mpc(1)
                        for (i, m), z in zip(combo, pt):
                            phi = basis.phi(i, m)
                            value *= phi(z) - phi.value_at_infinity()
                        a_mat[t, col] = value
                    col_keys.append(combo)
                    col += 1
                x, _residual_info = mpmath.qr_solve(a_mat, b)
                resid = mpmath.mpf(0)
                bscale = max(abs(b[t, 0]) for t in range(n_samples))
                for t in range(n_samples):
                    acc = mpmath.mpc(0)
                    for cidx in range(unknowns):
                        acc += a_mat[t, cidx] * x[cidx, 0]
                    resid = max(resid, abs(acc - b[t, 0]))
                rel = resid / bscale if bscale else resid
                coeffs = {col_keys[cidx]: x[cidx, 0] for cidx in range(unknowns)}
                best = PhiFitReport(g, n, coeffs, rel, m_cutoff, tolerance)
                if rel < tolerance:
                    break
            return best

    def _f_value(self, form: CorrelationForm, points, roots):
        total = mpmath.mpc(0)
        for idx, c in form.coeffs.items():
            term = c
            for z, (i, k) in zip(points, idx):
                if k == 0:
                    term = None
                    break
                term = term * (-(z - roots[i]) ** (-k)) / k
            if term is not None:
                total += term
        return total

    # ------------------------------------------------------------------
    # stability

    def stability_report(self, g: int, n: int):
        """Re-run at doubled precision and at +4 truncation orders; report
        the largest relative drift of any retained coefficient."""
        base = self.form(g, n)
        from dataclasses import replace

        hi_curve = SpectralCurve(replace(self.curve.spec,
                                         precision=2 * self.prec))
        hi = RecursionEngine(hi_curve, table=self.table)
        wide = RecursionEngine(self.curve, table=self.table,
                               extra_order=self.extra_order + 4)
        with mpmath.workprec(2 * self.prec):
            drift_prec = _form_drift(base, hi.form(g, n))
            drift_trunc = _form_drift(base, wide.form(g, n))
        return {
            "precision_drift": drift_prec,
            "truncation_drift": drift_trunc,
            "precision_tol": mpmath.mpf(10) ** (-self.prec // 4),
        }


def _form_drift(a: CorrelationForm, b: CorrelationForm):
    scale = max(a.scale(), b.scale())
    if not scale:
        return mpmath.mpf(0)
    worst = mpmath.mpf(0)
    for idx in set(a.coeffs) | set(b.coeffs):
        ca = a.coeffs.get(idx, mpmath.mpc(0))
        cb = b.coeffs.get(idx, mpmath.mpc(0))
        worst = max(worst, abs(ca - cb))
    return worst / scale


def _mu_box(n: int, mu_max: int):
    if n == 0:
        yield ()
        return
    for rest in _mu_box(n - 1, mu_max):
        for m in range(1, mu_max + 1):
            yield (m,) + rest


def _tensor(slots, n):
    if n == 0:
        yield ()
        return
    for rest in _tensor(slots, n - 1):
        for s in slots:
            yield (s,) + rest


def _sample_tuples(count: int, n: int, rmin, prec: int):
    """Deterministic pseudo-random sample points well inside the
    branch-point radius.  Slots must be sampled independently: points tied
    by a common parameter (e.g. one geometric progression per slot) make
    tensor-product bases rank-deficient along the sampling family."""
    import random

    rng = random.Random(20200615)
    out = []
    for _ in range(count):
        pt = []
        for _ in range(n):
            radius = rmin * mpmath.mpf(rng.uniform(0.2, 0.45))
            angle = mpmath.mpf(2) * mpmath.pi * mpmath.mpf(rng.random())
            pt.append(radius * mpmath.exp(1j * angle))
        out.append(tuple(pt))
    return out


def _lift(inner: SeriesRing, series: Series, order: int) -> Series:
    ring = series.ring
    coeffs = [Series.constant(ring, "x1", series.coefficient(k), inner.order)
              for k in range(order)]
    return Series(inner, "x2", 0, coeffs, order)


def _outer_const(inner: SeriesRing, value: Series, order: int) -> Series:
    return Series(inner, "x2", 0, [value] + [inner.zero] * (order - 1), order)
