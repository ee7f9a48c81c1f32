"""Power series: builtins, evaluation, max term, jumps, modulus, combine."""

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from growthlab import series
from growthlab.erfloat import ec_arg, ec_ln_abs, er_ln


def coeff_value(f, n):
    """Stored coefficient as an ordinary complex (test helper)."""
    L = f.coeff.lh[n]
    if not math.isfinite(L):
        return 0j
    return math.exp(L) * complex(math.cos(f.coeff.ph[n]),
                                 math.sin(f.coeff.ph[n]))


class TestBuiltins:
    def test_exp_first_terms(self):
        f = series.builtin("exp", 4)
        want = [1.0, 1.0, 0.5, 1.0 / 6.0]
        for n, w in enumerate(want):
            assert coeff_value(f, n) == pytest.approx(w, rel=1e-15)

    def test_sin_structure(self):
        f = series.builtin("sin", 4)
        assert coeff_value(f, 0) == 0
        assert coeff_value(f, 1) == pytest.approx(1.0)
        assert coeff_value(f, 2) == 0
        assert coeff_value(f, 3) == pytest.approx(-1.0 / 6.0, rel=1e-15)

    def test_exp_exp_bell_values(self):
        # B_0..B_3 = 1, 1, 2, 5 so a_3 = (5/6) e
        f = series.builtin("exp_exp", 4)
        e = math.e
        for n, b in enumerate([1.0, 1.0, 2.0, 5.0]):
            want = e * b / math.factorial(n)
            assert coeff_value(f, n) == pytest.approx(want, rel=1e-14)

    def test_unknown_name(self):
        with pytest.raises(ValueError):
            series.builtin("gamma", 10)

    def test_poly_needs_coeffs(self):
        with pytest.raises(ValueError):
            series.builtin("poly")

    def test_airy_like_routes_to_ode(self):
        f = series.builtin("airy_like", 40)
        assert coeff_value(f, 0) == pytest.approx(1.0)
        assert coeff_value(f, 3) == pytest.approx(1.0 / 6.0, rel=1e-13)

    def test_coeffs_materialize_extended(self):
        f = series.builtin("exp", 6)
        cs = f.coeffs
        assert abs(er_ln(cs[3].re) + math.log(6.0)) < 1e-12


class TestEvaluate:
    def test_exp_at_zero_arg(self):
        f = series.builtin("exp", 30)
        v = series.evaluate(f, (0.0, 0.0))  # z = 1
        assert math.exp(er_ln(v.re)) == pytest.approx(math.e, rel=1e-12)

    def test_sin_at_pi_is_tiny(self):
        f = series.builtin("sin", 60)
        v = series.evaluate(f, (math.log(math.pi), 0.0))
        mag = ec_ln_abs(v) if (v.re or v.im) else -math.inf
        assert mag < math.log(1e-10)

    def test_truncation_error_beyond_radius(self):
        f = series.builtin("exp", 20)
        with pytest.raises(series.TruncationError):
            series.evaluate(f, (math.log(1e6), 0.0))

    def test_evaluate_agrees_with_mpmath(self):
        f = series.builtin("cos", 80)
        v = series.evaluate(f, (math.log(3.0), 1.1))
        with mp.workdps(30):
            z = 3.0 * mp.exp(1j * mp.mpf(1.1))
            want = mp.cos(z)
            assert ec_ln_abs(v) == pytest.approx(float(mp.log(abs(want))),
                                                 abs=1e-10)
            assert ec_arg(v) == pytest.approx(float(mp.atan2(want.imag,
                                                             want.real)),
                                              abs=1e-10)


class TestMaxTerm:
    def test_poly_cube(self):
        f = series.builtin("poly", coeffs=[0, 0, 0, 1.0])
        mt = series.max_term(f, math.log(10.0))
        assert mt.nu == 3
        assert mt.log_mu == pytest.approx(3 * math.log(10.0))

    def test_exp_central_index_floor_r(self):
        f = series.builtin("exp", 100)
        for r in [3.7, 10.0, 25.2]:
            assert series.max_term(f, math.log(r)).nu == int(r)

    def test_small_radius_constant_wins(self):
        f = series.builtin("exp", 30)
        assert series.max_term(f, math.log(1e-9)).nu == 0

    def test_zero_series_degenerate(self):
        f = series.builtin("poly", coeffs=[0.0])
        with pytest.raises(series.DegenerateSeriesError):
            series.max_term(f, 0.0)

    def test_nu_nondecreasing(self):
        f = series.builtin("exp_exp", 200)
        nus = [series.max_term(f, lr).nu
               for lr in np.linspace(-2.0, 3.0, 120)]
        assert all(b >= a for a, b in zip(nus, nus[1:]))

    def test_largest_index_tie_break(self):
        # 1 + z^2 at r = 1: indices 0 and 2 tie; the largest wins
        f = series.builtin("poly", coeffs=[1.0, 0.0, 1.0])
        assert series.max_term(f, 0.0).nu == 2


class TestJumps:
    def test_one_plus_z(self):
        f = series.builtin("poly", coeffs=[1.0, 1.0])
        assert series.central_index_jumps(f) == [(0.0, 1)]

    def test_exp_jumps_at_integers(self):
        f = series.builtin("exp", 40)
        jumps = series.central_index_jumps(f)
        for i, (t, nu) in enumerate(jumps[:10]):
            assert nu == i + 1
            assert t == pytest.approx(math.log(i + 1.0), abs=1e-12)

    def test_index_one_never_wins(self):
        f = series.builtin("poly", coeffs=[1.0, 0.0, 1.0])
        assert series.central_index_jumps(f) == [(0.0, 2)]

    def test_requires_nonzero_constant_term(self):
        f = series.builtin("sin", 30)
        with pytest.raises(ValueError):
            series.central_index_jumps(f)

    @pytest.mark.parametrize("name,n", [("exp", 200), ("cos", 200),
                                        ("exp_exp", 300)])
    def test_step_integral_identity(self, name, n):
        # ln mu(r) = ln|a0| + sum nu_i d(ln r): exact for the stored series
        f = series.builtin(name, n)
        jumps = series.central_index_jumps(f)
        for r in np.geomspace(1.0, 40.0, 24):
            lr = math.log(r)
            got = series.log_mu_from_jumps(f, lr, jumps)
            want = series.max_term(f, lr).log_mu
            assert abs(got - want) <= 1e-9


class TestLogMaxModulus:
    def test_exp_is_r(self):
        f = series.builtin("exp", 400)
        for r in [2.0, 10.0, 50.0]:
            assert series.log_max_modulus(f, math.log(r)) == pytest.approx(
                r, abs=1e-9 * max(1, r))

    def test_cos_is_log_cosh(self):
        f = series.builtin("cos", 300)
        for r in [3.0, 20.0]:
            want = float(mp.log(mp.cosh(r)))
            assert series.log_max_modulus(f, math.log(r)) == pytest.approx(
                want, abs=1e-9 * max(1, r))

    def test_dominates_point_values(self):
        f = series.builtin("exp_exp", 300)
        lr = math.log(2.5)
        lm = series.log_max_modulus(f, lr)
        rng = np.random.default_rng(5)
        from growthlab import _evalcore
        vals = _evalcore.eval_points(f.coeff, lr,
                                     rng.uniform(0, 2 * np.pi, 256),
                                     level="d").logabs
        assert np.all(vals <= lm + 1e-9)

    def test_wiman_valiron_modulus_bound(self):
        # M(r) < mu(r) (nu(2r) + 2) with the free radius fixed at 2r
        for name in ["exp", "cos", "exp_exp"]:
            f = series.builtin(name, 300)
            r_top = min(20.0, f.guaranteed_radius / 2.05)
            for r in np.geomspace(1.0, r_top, 12):
                lr = math.log(r)
                lhs = series.log_max_modulus(f, lr)
                mt = series.max_term(f, lr)
                nu2 = series.max_term(f, lr + math.log(2.0)).nu
                assert lhs < mt.log_mu + math.log(nu2 + 2.0)


class TestDerivative:
    def test_derivative_of_exp(self):
        f = series.builtin("exp", 50)
        d = series.derivative(f)
        for n in range(45):
            assert coeff_value(d, n) == pytest.approx(coeff_value(f, n),
                                                      rel=1e-13)

    def test_derivative_of_sin_is_cos(self):
        d = series.derivative(series.builtin("sin", 50))
        c = series.builtin("cos", 49)
        for n in range(49):
            assert coeff_value(d, n) == pytest.approx(coeff_value(c, n),
                                                      rel=1e-13, abs=1e-300)

    def test_derivative_of_cube(self):
        d = series.derivative(series.builtin("poly", coeffs=[0, 0, 0, 2.0]))
        assert coeff_value(d, 2) == pytest.approx(6.0)
        assert d.n_terms == 3


class TestCombine:
    def test_exp_minus_exp_is_zero(self):
        f = series.builtin("exp", 30)
        g = series.combine(f, f, "sub")
        assert not np.any(np.isfinite(g.coeff.lh))

    def test_exp_times_exp(self):
        f = series.builtin("exp", 40)
        g = series.combine(f, f, "cauchy_product")
        for n in range(40):
            want = 2.0 ** n / math.factorial(n)
            assert coeff_value(g, n) == pytest.approx(want, rel=1e-12)

    def test_pythagorean_identity(self):
        s = series.builtin("sin", 40)
        c = series.builtin("cos", 40)
        s2 = series.combine(s, s, "cauchy_product")
        c2 = series.combine(c, c, "cauchy_product")
        one = series.combine(s2, c2, "add")
        assert coeff_value(one, 0) == pytest.approx(1.0, rel=1e-14)
        mags = np.exp(one.coeff.lh[1:], where=np.isfinite(one.coeff.lh[1:]),
                      out=np.zeros(39))
        assert np.all(mags < 1e-12)

    def test_product_truncates_to_min_length(self):
        f = series.builtin("exp", 100)
        g = series.builtin("poly", coeffs=[1.0, 2.0])
        assert series.combine(f, g, "cauchy_product").n_terms == 2

    def test_sub_keeps_union_length(self):
        f = series.builtin("exp", 100)
        g = series.builtin("poly", coeffs=[0.0, 1.0])
        h = series.combine(f, g, "sub")
        assert h.n_terms == 100
        assert coeff_value(h, 1) == pytest.approx(0.0, abs=1e-15)
        assert coeff_value(h, 2) == pytest.approx(0.5, rel=1e-14)

    def test_scale_argument(self):
        f = series.builtin("exp", 30)
        g = series.scale_argument(f, 2.0)  # e^{2z}
        for n in range(30):
            assert coeff_value(g, n) == pytest.approx(
                2.0 ** n / math.factorial(n), rel=1e-12)


class TestCertifiedRadius:
    def test_polynomials_certified_everywhere(self):
        f = series.builtin("poly", coeffs=[1.0, 0.0, 3.0])
        assert f.guaranteed_radius == math.inf

    def test_exp_400_covers_100(self):
        f = series.builtin("exp", 400)
        assert f.guaranteed_radius > 100.0

    def test_tail_certificate_honest(self):
        # at the certified radius the dropped tail is below tail_tol * mu
        f = series.builtin("exp", 60)
        r = f.guaranteed_radius
        with mp.workdps(40):
            tail = sum(mp.mpf(r) ** n / mp.factorial(n)
                       for n in range(60, 200))
        mu = math.exp(series.max_term(f, math.log(r)).log_mu)
        assert float(tail) < 10.0 * f.tail_tol * mu


class TestDumpCsv:
    def test_csv_round_trip(self, tmp_path):
        f = series.builtin("sin", 8)
        path = tmp_path / "sin.csv"
        series.dump_csv(f, str(path))
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "n,ln_abs,arg"
        assert len(lines) == 9
        n, ln_abs, arg = lines[2].split(",")
        assert n == "1" and float(ln_abs) == 0.0
