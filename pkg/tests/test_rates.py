import math

import mpmath as mp
import numpy as np
import pytest

from pepcert import (
    ObjectiveSpec,
    RateParams,
    huber_rate,
    lower_bound_envelope,
    quadratic_rate,
    simulate,
    solve_rate_params,
    solve_rate_params_mp,
)


def bisection_oracle(n, iterations=220, dps=80):
    """Independent high-precision root: pure bisection on the sign of the
    log-domain balance defect, no Newton anywhere."""
    with mp.workdps(dps):
        lo, hi = mp.mpf(1), mp.mpf(2)
        for _ in range(iterations):
            mid = (lo + hi) / 2
            sign = 2 * n * mp.log(mid - 1) + mp.log(2 * n * mid + 1)
            if sign < 0:
                lo = mid
            else:
                hi = mid
        alpha = (lo + hi) / 2
        return alpha, 1 / (2 * (2 * n * alpha + 1))


def balance_defect(n, alpha):
    # (alpha-1)^(2n) (2n alpha + 1) - 1, zero at the balancing stepsize
    return (alpha - 1.0) ** (2 * n) * (2 * n * alpha + 1.0) - 1.0


class TestSolveRateParams:
    def test_n1_closed_form(self):
        # balance reduces to the cubic 2 a^3 = 3 a^2, root 3/2
        params = solve_rate_params(1)
        assert params.alpha == 1.5
        assert params.r == 0.125

    def test_n1_defect(self):
        params = solve_rate_params(1)
        assert abs(balance_defect(1, params.alpha)) <= 1e-14

    @pytest.mark.parametrize("n", [2, 3, 10, 100, 1337, 10**4, 10**5])
    def test_against_bisection_oracle(self, n):
        alpha_star, r_star = bisection_oracle(n)
        params = solve_rate_params(n)
        assert abs(params.alpha - float(alpha_star)) <= 2 * math.ulp(params.alpha)
        assert abs(params.r - float(r_star)) <= 2 * math.ulp(params.r)

    def test_n100_rate_decreasing_and_balanced(self):
        p99, p100 = solve_rate_params(99), solve_rate_params(100)
        assert p100.r < p99.r
        q = quadratic_rate(100, p100.alpha)
        h = huber_rate(100, p100.alpha)
        assert abs(q - h) <= 1e-14

    def test_mp_matches_float64(self):
        for n in (1, 5, 50, 2048):
            alpha, r = solve_rate_params_mp(n)
            params = solve_rate_params(n)
            assert abs(params.alpha - float(alpha)) <= 2 * math.ulp(params.alpha)
            assert abs(params.r - float(r)) <= 2 * math.ulp(params.r)

    def test_rejects_bad_n(self):
        with pytest.raises(ValueError):
            solve_rate_params(0)

    def test_params_validation(self):
        with pytest.raises(ValueError):
            RateParams(N=3, alpha=1.5, r=0.125)  # alpha(1) at N=3 is unbalanced
        with pytest.raises(ValueError):
            RateParams(N=1, alpha=2.5, r=0.125)


class TestClosedForms:
    def test_quadratic_examples(self):
        assert quadratic_rate(3, 1.0) == 0.0
        assert quadratic_rate(1, 1.5) == 0.125
        assert quadratic_rate(2, 0.5) == 0.03125

    def test_huber_examples(self):
        assert huber_rate(2, 1.0) == 0.1
        assert huber_rate(7, 0.0) == 0.5
        assert huber_rate(1, 1.5) == 0.125

    def test_balance_relative_mp_and_absolute_f64(self):
        # relative 1e-14 agreement needs the mp root (float64 quantization of
        # alpha floors the relative defect near 2 N eps); the float64 pair
        # still satisfies the absolute invariant
        for n in (1, 2, 7, 33, 1000, 10**5):
            alpha, _ = solve_rate_params_mp(n)
            with mp.workdps(60):
                q = (1 - alpha) ** (2 * n) / 2
                h = 1 / (2 * (2 * n * alpha + 1))
                assert abs(q - h) / h <= 1e-14
            params = solve_rate_params(n)
            gap = abs(quadratic_rate(n, params.alpha) - huber_rate(n, params.alpha))
            assert gap <= 1e-14

    def test_monotonicity(self):
        alphas = np.linspace(1.0 + 1e-6, 1.99, 400)
        q = quadratic_rate(12, alphas)
        assert np.all(np.diff(q) > 0)
        h = huber_rate(12, np.linspace(0.01, 1.99, 400))
        assert np.all(np.diff(h) < 0)
        rs = [solve_rate_params(n).r for n in range(1, 60)]
        assert np.all(np.diff(rs) < 0)


class TestSimulate:
    def test_quadratic_one_step(self):
        trace = simulate(ObjectiveSpec.quadratic(), x0=1.0, alpha=1.5, N=1)
        assert trace.xs[1] == -0.5
        assert trace.fvals[-1] == 0.125

    def test_huber_one_step(self):
        trace = simulate(ObjectiveSpec.huber(0.25), x0=1.0, alpha=1.5, N=1)
        assert trace.xs[1] == 0.625
        assert trace.fvals[-1] == 0.125

    def test_starts_at_minimizer(self):
        trace = simulate(ObjectiveSpec.quadratic(), x0=0.0, alpha=1.3, N=6)
        assert np.all(trace.xs == 0.0)
        assert trace.fvals[-1] == 0.0

    def test_update_rule_exact(self, rng):
        alpha = 1.21
        trace = simulate(ObjectiveSpec.huber(0.4), x0=0.9, alpha=alpha, N=12)
        for k in range(12):
            assert trace.xs[k + 1] == trace.xs[k] - alpha * trace.gvals[k]

    @pytest.mark.parametrize("n", [1, 5, 23, 50])
    @pytest.mark.parametrize("alpha_kind", ["1.0", "1.5", "balanced"])
    def test_matches_closed_forms(self, n, alpha_kind):
        alpha = solve_rate_params(n).alpha if alpha_kind == "balanced" else float(alpha_kind)
        quad = simulate(ObjectiveSpec.quadratic(), 1.0, alpha, n)
        assert abs(quad.fvals[-1] - quadratic_rate(n, alpha)) <= 1e-12
        delta = 1.0 / (2 * n * alpha + 1.0)
        hub = simulate(ObjectiveSpec.huber(delta), 1.0, alpha, n)
        assert abs(hub.fvals[-1] - huber_rate(n, alpha)) <= 1e-12

    def test_huber_breakpoint_validation(self):
        with pytest.raises(ValueError):
            ObjectiveSpec.huber(0.0)
        with pytest.raises(ValueError):
            ObjectiveSpec.huber(1.5)


class TestEnvelope:
    def test_at_balancing_point(self):
        assert lower_bound_envelope(1, [1.5]) == pytest.approx([0.125], abs=1e-15)

    def test_at_unit_stepsize(self):
        assert lower_bound_envelope(1, [1.0]) == pytest.approx([1 / 6], abs=1e-15)

    def test_dominates_rate(self):
        params = solve_rate_params(10)
        grid = np.linspace(0.1, 1.99, 2000)
        vals = lower_bound_envelope(10, grid)
        assert np.all(vals >= params.r - 1e-12)
        spacing = grid[1] - grid[0]
        assert abs(grid[np.argmin(vals)] - params.alpha) <= spacing + 1e-12
