import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from caznrls.calibration import calibrate
from caznrls.gep import (
    FitResult,
    GepConfig,
    fit,
    phi,
    psi_conjugate,
    rho_schedule,
    scad_penalty_via_conjugate,
    w_update,
)
from caznrls.surrogate import SurrogatePair


class TestPenaltyCalculus:
    def test_phi_endpoints(self):
        # phi(0) = 0 and phi(1) = 1 for every a > 1
        for a in (1.5, 3.7, 6.0, 50.0):
            assert phi(0.0, a) == pytest.approx(0.0)
            assert phi(1.0, a) == pytest.approx(1.0)

    def test_psi_conjugate_matches_grid_maximization(self):
        a = 6.0
        omegas = np.linspace(-1.0, 4.0, 101)
        for om in omegas:
            grid_val = oracles.psi_conjugate_grid(float(om), a)
            assert psi_conjugate(float(om), a) == pytest.approx(
                grid_val, abs=1e-7
            )

    def test_psi_conjugate_branch_points(self):
        a = 6.0
        lo, hi = 2.0 / (a + 1.0), 2.0 * a / (a + 1.0)
        # continuity across both breakpoints
        for b in (lo, hi):
            left = psi_conjugate(b - 1e-9, a)
            right = psi_conjugate(b + 1e-9, a)
            assert left == pytest.approx(right, abs=1e-7)
        assert psi_conjugate(lo, a) == pytest.approx(0.0, abs=1e-12)
        assert psi_conjugate(hi, a) == pytest.approx(hi - 1.0, abs=1e-12)

    @pytest.mark.parametrize("a", [6.0, 3.7])
    @pytest.mark.parametrize("gamma", [0.5, 1.0, 2.0])
    def test_scad_equivalence(self, a, gamma):
        ts = np.linspace(-4.0 * a * gamma, 4.0 * a * gamma, 801)
        for t in ts:
            assert scad_penalty_via_conjugate(float(t), gamma, a) == pytest.approx(
                oracles.scad_textbook(t, gamma, a), abs=1e-10
            )

    def test_w_update_matches_grid_oracle(self, rng):
        a = 6.0
        for _ in range(20):
            rho = float(rng.uniform(0.2, 10.0))
            b = float(rng.uniform(-3.0, 3.0))
            got = w_update(np.array([b]), rho, a)[0]
            want = oracles.w_update_grid(b, rho, a)
            assert got == pytest.approx(want, abs=1e-4)

    def test_w_update_saturation(self):
        a = 6.0
        # small beta: gradient of phi at 0 dominates => w = 0
        assert w_update(np.array([0.0]), 1.0, a)[0] == 0.0
        # huge beta: clipped at 1
        assert w_update(np.array([1e6]), 1.0, a)[0] == 1.0

    def test_validation(self):
        with pytest.raises(ValueError):
            phi(0.5, 1.0)
        with pytest.raises(ValueError):
            psi_conjugate(0.5, 0.9)
        with pytest.raises(ValueError):
            w_update(np.zeros(2), 0.0, 6.0)
        with pytest.raises(ValueError):
            scad_penalty_via_conjugate(1.0, 0.0, 6.0)


class TestRhoSchedule:
    def test_ramp_then_freeze(self):
        beta = np.array([0.5])
        r1 = rho_schedule(1, beta, 1.0)
        assert r1 == pytest.approx(max(1.0, 5.0 / (3.0 * 0.5)))
        r2 = rho_schedule(2, beta, r1)
        assert r2 == pytest.approx(2.0 * r1)
        r3 = rho_schedule(3, beta, r2)
        assert r3 == pytest.approx(2.0 * r2)
        r4 = rho_schedule(4, beta, r3)
        assert r4 == r3  # frozen after stage 3

    def test_cap_engages_for_large_iterates(self):
        # doubling would exceed cap/||beta||_inf, so the cap wins
        beta = np.array([1e3])
        r = rho_schedule(2, beta, 1e6, cap=1e8)
        assert r == pytest.approx(1e8 / 1e3)

    def test_zero_iterate_keeps_rho(self):
        assert rho_schedule(2, np.zeros(3), 7.0) == 7.0


def _easy_calibrated(rng, n=120, p=20, s=3):
    beta_star = np.zeros(p)
    idx = rng.choice(p, size=s, replace=False)
    beta_star[idx] = rng.choice([-1.0, 1.0], size=s) * rng.uniform(2.0, 3.0, s)
    X = rng.standard_normal((n, p))
    y = X @ beta_star + 0.1 * rng.standard_normal(n)
    pair = SurrogatePair(
        sigma_hat=X.T @ X / n, xi_hat=X.T @ y / n, n=n, p=p
    )
    return calibrate(pair, 1e-4), beta_star


class TestFit:
    def test_recovers_clean_sparse_signal(self, rng):
        cal, beta_star = _easy_calibrated(rng)
        res = fit(cal, GepConfig(lam=0.1))
        assert isinstance(res, FitResult)
        np.testing.assert_array_equal(res.support, np.flatnonzero(beta_star))
        np.testing.assert_allclose(res.beta_final, beta_star, atol=0.15)

    def test_stage_one_is_plain_lasso(self, rng):
        # with w0 = 0 the first stage weights are uniform n*lam
        cal, _ = _easy_calibrated(rng)
        res = fit(cal, GepConfig(lam=0.1, k_max=1))
        ref = oracles.weighted_lasso_fista(
            cal.z_tilde, cal.y_tilde, cal.n * 0.1 * np.ones(cal.p)
        )
        np.testing.assert_allclose(res.iterates[0].beta, ref, atol=1e-5)

    def test_later_stages_weaken_penalty_on_support(self, rng):
        cal, beta_star = _easy_calibrated(rng)
        res = fit(cal, GepConfig(lam=0.1))
        if res.stages_run >= 2:
            w = res.iterates[-1].w
            sup = np.flatnonzero(beta_star)
            assert np.all(w[sup] > 0.99)  # large signals: weight ~ 1

    def test_respects_k_max(self, rng):
        cal, _ = _easy_calibrated(rng)
        res = fit(cal, GepConfig(lam=0.1, k_max=2))
        assert res.stages_run <= 2
        assert res.stopped_by == "k_max"

    def test_stability_stop_needs_four_stages(self, rng):
        cal, _ = _easy_calibrated(rng)
        res = fit(cal, GepConfig(lam=0.1, k_max=10))
        if res.stopped_by == "stability":
            assert res.stages_run >= 4

    def test_nonzero_w0_is_respected(self, rng):
        cal, _ = _easy_calibrated(rng)
        w0 = np.full(cal.p, 0.5)
        res = fit(cal, GepConfig(lam=0.1, k_max=1, w0=w0))
        # first-stage weights are halved relative to w0 = 0
        ref = oracles.weighted_lasso_fista(
            cal.z_tilde, cal.y_tilde, cal.n * 0.1 * 0.5 * np.ones(cal.p)
        )
        np.testing.assert_allclose(res.iterates[0].beta, ref, atol=1e-5)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            GepConfig(lam=0.0)
        with pytest.raises(ValueError):
            GepConfig(lam=0.1, a=1.0)
        with pytest.raises(ValueError):
            GepConfig(lam=0.1, w0=np.array([0.6]))


@settings(max_examples=60, deadline=None)
@given(
    omega=st.floats(-5.0, 10.0),
    t=st.floats(0.0, 1.0),
    a=st.floats(1.1, 50.0),
)
def test_fenchel_young_inequality(omega, t, a):
    # psi*(omega) >= t*omega - phi(t) for all t in [0, 1]
    assert psi_conjugate(omega, a) >= t * omega - phi(t, a) - 1e-9
