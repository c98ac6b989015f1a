import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from caznrls.calibration import (
    CalibrationError,
    calibrate,
    default_eps_hat,
    psd_project,
)
from caznrls.surrogate import SurrogatePair


def _random_pair(rng, n, p):
    S = rng.standard_normal((p, p))
    sigma_hat = 0.5 * (S + S.T)  # indefinite in general
    xi_hat = rng.standard_normal(p)
    return SurrogatePair(sigma_hat=sigma_hat, xi_hat=xi_hat, n=n, p=p)


class TestPsdProject:
    def test_matches_eigenvalue_clamp_oracle(self, rng):
        for p in (3, 8, 20):
            pair = _random_pair(rng, 10, p)
            eps = 0.05
            sigma_tilde, theta, P = psd_project(pair.sigma_hat, eps)
            # independent check: every eigenvalue of the result is >= eps and
            # the result is the closest such matrix in Frobenius norm among
            # rotations of the clamped spectrum
            w = np.linalg.eigvalsh(sigma_tilde)
            assert w.min() >= eps - 1e-10
            # direct reconstruction oracle
            vals, vecs = np.linalg.eigh(pair.sigma_hat)
            oracle = (vecs * np.maximum(vals, eps)) @ vecs.T
            np.testing.assert_allclose(sigma_tilde, oracle, atol=1e-10)

    def test_identity_on_already_pd_input(self, rng):
        A = rng.standard_normal((6, 6))
        pd = A @ A.T + 2.0 * np.eye(6)
        out, _, _ = psd_project(pd, 1e-3)
        np.testing.assert_allclose(out, pd, atol=1e-10)

    def test_returns_descending_input_spectrum(self, rng):
        pair = _random_pair(rng, 10, 7)
        _, theta, P = psd_project(pair.sigma_hat, 0.1)
        assert np.all(np.diff(theta) <= 1e-12)
        np.testing.assert_allclose(
            (P * theta) @ P.T, pair.sigma_hat, atol=1e-10
        )

    def test_rejects_bad_inputs(self, rng):
        S = rng.standard_normal((4, 4))
        with pytest.raises(CalibrationError):
            psd_project(S, 0.1)  # not symmetric
        sym = 0.5 * (S + S.T)
        with pytest.raises(CalibrationError):
            psd_project(sym, 0.0)
        bad = sym.copy()
        bad[0, 0] = np.nan
        with pytest.raises(CalibrationError):
            psd_project(bad, 0.1)


class TestDefaultEps:
    def test_floor_at_one(self):
        # spectrum well below 1: the floor max(1, theta_1) engages
        assert default_eps_hat(0.5 * np.eye(3)) == pytest.approx(1e-2)

    def test_scales_with_top_eigenvalue(self):
        assert default_eps_hat(7.0 * np.eye(3)) == pytest.approx(7e-2)


class TestCalibrate:
    def test_identities_random_instances(self, rng):
        for p in (5, 12, 30):
            pair = _random_pair(rng, 17, p)
            cal = calibrate(pair, 0.1)
            n = pair.n
            np.testing.assert_allclose(
                cal.z_tilde.T @ cal.z_tilde / n, cal.sigma_tilde, atol=1e-10
            )
            np.testing.assert_allclose(
                cal.z_tilde.T @ cal.y_tilde / n, pair.xi_hat, atol=1e-10
            )
            w = np.linalg.eigvalsh(cal.sigma_tilde)
            assert w.min() >= cal.eps_hat - 1e-9

    def test_default_eps_matches_explicit(self, rng):
        pair = _random_pair(rng, 9, 6)
        eps = default_eps_hat(pair.sigma_hat)
        auto = calibrate(pair)
        manual = calibrate(pair, eps)
        assert auto.eps_hat == pytest.approx(eps)
        np.testing.assert_allclose(auto.z_tilde, manual.z_tilde, atol=1e-12)
        np.testing.assert_allclose(auto.y_tilde, manual.y_tilde, atol=1e-12)

    def test_single_eigendecomposition(self, rng, monkeypatch):
        pair = _random_pair(rng, 9, 6)
        calls = {"n": 0}
        orig = np.linalg.eigh

        def counting(*a, **k):
            calls["n"] += 1
            return orig(*a, **k)

        monkeypatch.setattr(np.linalg, "eigh", counting)
        calibrate(pair)  # even with the default eps_hat
        assert calls["n"] == 1

    def test_rejects_nonpositive_eps(self, rng):
        pair = _random_pair(rng, 9, 6)
        with pytest.raises(CalibrationError):
            calibrate(pair, -1.0)

    def test_surrogate_loss_equals_ls_loss_up_to_constant(self, rng):
        # 0.5 b'Sigma~ b - <xi, b> and (1/2n)||Z~b - y~||^2 differ by a
        # constant in b; check on random points
        pair = _random_pair(rng, 11, 7)
        cal = calibrate(pair, 0.2)
        n = pair.n
        consts = []
        for _ in range(5):
            b = rng.standard_normal(7)
            q = 0.5 * b @ (cal.sigma_tilde @ b) - pair.xi_hat @ b
            ls = 0.5 / n * np.sum((cal.z_tilde @ b - cal.y_tilde) ** 2)
            consts.append(ls - q)
        assert np.ptp(consts) < 1e-9


@settings(max_examples=40, deadline=None)
@given(p=st.integers(2, 15), seed=st.integers(0, 2**32 - 1),
       eps=st.floats(1e-4, 1.0))
def test_calibration_identities_property(p, seed, eps):
    r = np.random.default_rng(seed)
    pair = _random_pair(r, max(2, p // 2), p)
    cal = calibrate(pair, eps)
    scale_s = max(1.0, np.linalg.norm(cal.sigma_tilde, "fro"))
    scale_x = max(1.0, np.max(np.abs(pair.xi_hat)))
    assert (
        np.linalg.norm(cal.z_tilde.T @ cal.z_tilde / pair.n - cal.sigma_tilde, "fro")
        <= 1e-9 * scale_s
    )
    assert (
        np.max(np.abs(cal.z_tilde.T @ cal.y_tilde / pair.n - pair.xi_hat))
        <= 1e-9 * scale_x
    )
