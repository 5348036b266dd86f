from fractions import Fraction

import mpmath
import pytest

from dhtr.curve import CurveSpec, PhiBasis, SpectralCurve, invert_x_exact
from dhtr.cutjoin import DHTable
from dhtr.series import Series, SeriesRing
from dhtr.toprec import RecursionEngine
from dhtr.weightpoly import WeightPolynomial


@pytest.fixture(scope="module")
def engine():
    curve = SpectralCurve(CurveSpec.make(2, [1, 1], Fraction(1, 10), precision=256))
    return RecursionEngine(curve)


def test_omega03_pole_structure(engine):
    form = engine.form(0, 3)
    # double poles at each branch point, same index in all three slots
    assert form.max_pole_order() == 2
    for idx in form.coeffs:
        (i1, k1), (i2, k2), (i3, k3) = idx
        assert i1 == i2 == i3
        assert k1 == k2 == k3 == 1
    assert form.asymmetry < 1e-60


def test_omega03_matches_closed_form(engine):
    import random

    rng = random.Random(11)
    with mpmath.workprec(engine.prec):
        roots = engine.curve.branch_points()
        tol = mpmath.mpf(10) ** (-engine.prec // 4)
        for _ in range(20):
            pts = [mpmath.mpc(rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8))
                   for _ in range(3)]
            if min(abs(p - a) for p in pts for a in roots) < 0.3:
                continue
            lhs = engine.form(0, 3).evaluate(pts, roots)
            rhs = engine.omega03_closed(pts)
            assert abs(lhs - rhs) / abs(rhs) < tol


def test_omega03_symmetric_in_arguments(engine):
    with mpmath.workprec(engine.prec):
        pts = [mpmath.mpc("0.2", "0.3"), mpmath.mpc("-0.5", "0.1"), mpmath.mpc("0.4", "-0.2")]
        vals = {engine.omega03_closed([pts[i], pts[j], pts[k]])
                for (i, j, k) in [(0, 1, 2), (1, 0, 2), (2, 1, 0)]}
        base = engine.omega03_closed(pts)
        assert all(abs(v - base) < abs(base) * 1e-70 for v in vals)


def test_omega03_triple_derivative_of_cyclic_form(engine):
    """d1 d2 d3 of the cyclic closed form of F_{0,3}, via first-order jets
    in three nested variables, equals the assembled triple-point form."""
    with mpmath.workprec(engine.prec):
        curve = engine.curve
        ring0 = engine.ring
        r1 = SeriesRing(ring0, "u1", 2)
        r2 = SeriesRing(r1, "u2", 2)

        def jet3(const, slot):
            # p + u_slot as a nested series over (u3 over u2 over u1)
            c0 = Series.constant(ring0, "u1", const, 2)
            one0 = Series.constant(ring0, "u1", ring0.one, 2)
            zero0 = r1.zero
            if slot == 1:
                lvl1 = Series(ring0, "u1", 0, [const, ring0.one], 2)
                lvl2 = Series(r1, "u2", 0, [lvl1, zero0], 2)
            elif slot == 2:
                lvl2 = Series(r1, "u2", 0, [c0, one0], 2)
            else:
                lvl2 = Series(r1, "u2", 0, [c0, zero0], 2)
            zero1 = r2.zero
            one1 = Series(r1, "u2", 0, [one0, zero0], 2)
            if slot == 3:
                return Series(r2, "u3", 0, [lvl2, one1], 2)
            return Series(r2, "u3", 0, [lvl2, zero1], 2)

        def lift(value):
            return Series.constant(r2, "u3",
                                   Series.constant(r1, "u2",
                                                   Series.constant(ring0, "u1", value, 2), 2), 2)

        pts = [mpmath.mpc("0.25", "0.15"), mpmath.mpc("-0.35", "0.3"),
               mpmath.mpc("0.1", "-0.55")]
        z = [jet3(pts[i], i + 1) for i in range(3)]
        s = lift(curve.s)

        def wval(zj):
            # 1 - s z P'(z) on jets via Horner
            acc = lift(curve.W.coeffs[-1])
            for c in reversed(curve.W.coeffs[:-1]):
                acc = acc * zj + lift(c)
            return acc

        total = -s
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
            num = s * z[j] * z[k]
            den = (z[i] - z[j]) * (z[i] - z[k]) * wval(z[i])
            total = total + num * den.inverse()
        mixed = total.coefficient(1).coefficient(1).coefficient(1)
        expected = engine.form(0, 3).evaluate(pts, curve.branch_points())
        assert abs(mixed - expected) < abs(expected) * mpmath.mpf(10) ** -60


def test_omega11_direct_residue(engine):
    with mpmath.workprec(engine.prec):
        z1 = mpmath.mpc("0.41", "0.17")
        direct = engine.omega11_direct(z1)
        from_basis = engine.form(1, 1).evaluate([z1], engine.curve.branch_points())
        assert abs(direct - from_basis) < abs(from_basis) * mpmath.mpf(10) ** -60


def test_f11_closed_form_against_recursion_and_table(engine):
    """F_{1,1} = (s^2/24) sum_i (i q_i phi_1^i - q_i phi_0^i): its derivative
    must equal the one-point genus-one form, and its exact x-expansion must
    reproduce the table."""
    with mpmath.workprec(engine.prec):
        curve = engine.curve
        basis = PhiBasis.for_curve(curve)
        z0 = mpmath.mpc("0.33", "0.21")
        jet = None
        for i in (1, 2):
            phi1 = basis.phi(i, 1).local_series(z0, 2, curve.negligible())
            phi0 = basis.phi(i, 0).local_series(z0, 2, curve.negligible())
            term = phi1.scale(i * curve.q[i - 1]) - phi0.scale(curve.q[i - 1])
            jet = term if jet is None else jet + term
        jet = jet.scale(curve.s ** 2 / 24)
        omega = engine.form(1, 1).evaluate([z0], curve.branch_points())
        assert abs(jet.coefficient(1) - omega) < abs(omega) * mpmath.mpf(10) ** -60

    # exact x-expansion at d_max = 2
    d = 2
    table = DHTable(d)
    basis = PhiBasis.exact(d)
    order = 7
    ring = basis.ring
    s = WeightPolynomial.s(d)
    series = None
    for i in (1, 2):
        phi1 = basis.phi(i, 1).series_at_origin(order)
        phi0 = basis.phi(i, 0).series_at_origin(order)
        q_i = WeightPolynomial.q(i, d)
        term = phi1.scale(q_i.scale(i)) - phi0.scale(q_i)
        series = term if series is None else series + term
    series = series.scale((s * s) / 24)
    zx = invert_x_exact(d, order - 1)
    f11_x = series.compose(zx)
    for mu in range(1, f11_x.order):
        assert f11_x.coefficient(mu) == table.dh(1, (mu,)), mu


def test_verify_reports(engine):
    rep03 = engine.verify_conjecture(0, 3, 3, tolerance=mpmath.mpf(10) ** -30)
    assert rep03.ok
    rep11 = engine.verify_conjecture(1, 1, 5, tolerance=mpmath.mpf(10) ** -30)
    assert rep11.ok
    # mu = (1,) is an impossible genus-one cover; its expected value is 0
    row1 = [r for r in rep11.rows if r.mu == (1,)][0]
    assert row1.expected == 0 and row1.ok


def test_omega02_origin_check(engine):
    report = engine.omega02_origin_check(4)
    assert report.ok
    assert report.max_residual < mpmath.mpf(10) ** -60


def test_loop_equations(engine):
    for (g, n) in [(0, 3), (1, 1), (0, 4), (1, 2)]:
        report = engine.loop_equation_check(g, n)
        assert report.ok, (g, n, report.worst)


def test_phi_decomposition(engine):
    fit11 = engine.phi_decompose(1, 1)
    assert fit11.ok and fit11.m_cutoff == 1
    with mpmath.workprec(engine.prec):
        s = engine.curve.s
        for i in (1, 2):
            got1 = fit11.coefficients[((i, 1),)]
            got0 = fit11.coefficients[((i, 0),)]
            assert abs(got1 - s ** 2 / 24 * i * engine.curve.q[i - 1]) < 1e-60
            assert abs(got0 + s ** 2 / 24 * engine.curve.q[i - 1]) < 1e-60
    fit03 = engine.phi_decompose(0, 3, m_cap=1)
    assert fit03.ok and fit03.m_cutoff == 0


def test_conjecture_instances_and_stability(engine):
    for (g, n) in [(0, 4), (1, 2), (2, 1)]:
        report = engine.verify_conjecture(g, n, 4)
        assert report.rows, (g, n)
        assert report.ok, (g, n, report.max_residual)
    stab = engine.stability_report(1, 2)
    assert stab["precision_drift"] < stab["precision_tol"]
    assert stab["truncation_drift"] < stab["precision_tol"]


def test_symmetry_of_forms(engine):
    for (g, n) in [(0, 3), (0, 4), (1, 2)]:
        assert engine.form(g, n).asymmetry < 1e-60, (g, n)


def test_no_simple_poles(engine):
    # stable forms have no residues at the branch points: k = 0 entries
    # are trimmed away as numerically negligible
    for (g, n) in [(0, 3), (1, 1), (0, 4), (1, 2), (2, 1)]:
        form = engine.form(g, n)
        assert all(k >= 1 for idx in form.coeffs for (_, k) in idx), (g, n)


def test_omega01_local_linear_curve():
    # d=1, q=1, s=1: omega_{0,1} = z (1/z - 1) dz = (1 - z) dz, so at the
    # branch point a = 1 the local series is (1 - a) - u = -u
    curve = SpectralCurve(CurveSpec.make(1, [1], 1, precision=128))
    eng = RecursionEngine(curve)
    w1 = eng.omega01_local(0, 8)
    with mpmath.workprec(128):
        assert abs(w1.coefficient(0)) < 1e-30
        assert abs(w1.coefficient(1) + 1) < 1e-30
        assert abs(w1.coefficient(2)) < 1e-30


def test_kernel_denominator_double_zero(engine):
    kden = engine.kernel_inverse_local(0, 12)
    assert kden.lo == -2


def test_omega02_local_expansion(engine):
    # Cauchy kernel geometric expansion: (k+1) u^k, analytic in u, and a
    # double pole carries no residue
    series = engine.omega02_local_coefficient(0, 8, 3)
    with mpmath.workprec(engine.prec):
        assert abs(series.coefficient(3) - 4) < 1e-60
        assert series.lo >= 0
        assert series.residue() == 0


def test_recursion_on_complex_branch_points():
    # d=3 puts two branch points off the real axis; proven instances must
    # still match the exact table
    curve = SpectralCurve(CurveSpec.make(3, [1, 1, 1], Fraction(1, 10),
                                         precision=192))
    eng = RecursionEngine(curve)
    with mpmath.workprec(192):
        roots = curve.branch_points()
        assert any(abs(mpmath.im(a)) > 0.1 for a in roots)
    tol = mpmath.mpf(10) ** -30
    assert eng.verify_conjecture(0, 3, 2, tolerance=tol).ok
    assert eng.verify_conjecture(1, 1, 3, tolerance=tol).ok


def test_recursion_single_weight_curve():
    # d=1 is the single-weight (classical) specialization
    curve = SpectralCurve(CurveSpec.make(1, [1], Fraction(1, 10), precision=192))
    eng = RecursionEngine(curve)
    tol = mpmath.mpf(10) ** -30
    assert eng.verify_conjecture(0, 3, 3, tolerance=tol).ok
    assert eng.verify_conjecture(1, 1, 4, tolerance=tol).ok
    assert eng.verify_conjecture(0, 4, 3, tolerance=tol).ok


@pytest.mark.parametrize("d,q,s", [
    (2, [Fraction(1, 2), Fraction(1, 3)], Fraction(1, 7)),
    (2, [1, -1], Fraction(1, 10)),          # negative weight
    (3, [2, 0, 1], Fraction(-1, 8)),        # vanishing middle weight, s < 0
])
def test_proven_instances_on_varied_curves(d, q, s):
    curve = SpectralCurve(CurveSpec.make(d, q, s, precision=224))
    eng = RecursionEngine(curve)
    tol = mpmath.mpf(10) ** -30
    assert eng.verify_conjecture(0, 3, 2, tolerance=tol).ok
    assert eng.verify_conjecture(1, 1, 3, tolerance=tol).ok
