"""Frobenius-nearest PD calibration of a surrogate Gram pair.

One symmetric eigendecomposition of sigma_hat yields both the projection
onto {W : W >= eps_hat I} and a p x p calibrated design z_tilde with
sigma_tilde = z_tilde^T z_tilde / n and xi_hat = z_tilde^T y_tilde / n.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .surrogate import SurrogatePair


class CalibrationError(ValueError):
    pass


@dataclass(frozen=True)
class CalibratedPair:
    z_tilde: np.ndarray
    y_tilde: np.ndarray
    sigma_tilde: np.ndarray
    eigvals: np.ndarray  # eigenvalues of sigma_hat, descending
    eigvecs: np.ndarray
    eps_hat: float
    n: int

    @property
    def p(self) -> int:
        return self.z_tilde.shape[0]


def default_eps_hat(sigma_hat: np.ndarray) -> float:
    """Scale-aware PD floor: 1e-2 * max(1, largest eigenvalue)."""
    theta_max = float(np.linalg.eigvalsh(sigma_hat)[-1])
    return 1e-2 * max(1.0, theta_max)


def psd_project(sigma_hat: np.ndarray, eps_hat: float):
    """Project onto {W : W >= eps_hat I} in Frobenius norm.

    Returns (sigma_tilde, eigvals, eigvecs) where eigvals/eigvecs are the
    descending eigendecomposition of the *input*.
    """
    sigma_hat = np.asarray(sigma_hat, dtype=float)
    if eps_hat <= 0:
        raise CalibrationError(f"eps_hat must be positive, got {eps_hat}")
    if sigma_hat.ndim != 2 or sigma_hat.shape[0] != sigma_hat.shape[1]:
        raise CalibrationError(f"sigma_hat must be square, got {sigma_hat.shape}")
    if not np.array_equal(sigma_hat, sigma_hat.T):
        raise CalibrationError("sigma_hat must be exactly symmetric")
    if not np.all(np.isfinite(sigma_hat)):
        raise CalibrationError("sigma_hat contains non-finite entries")
    theta, P = np.linalg.eigh(sigma_hat)
    theta, P = theta[::-1].copy(), P[:, ::-1].copy()
    clamped = np.maximum(theta, eps_hat)
    sigma_tilde = (P * clamped) @ P.T
    sigma_tilde = 0.5 * (sigma_tilde + sigma_tilde.T)
    return sigma_tilde, theta, P


def calibrate(pair: SurrogatePair, eps_hat: float | None = None) -> CalibratedPair:
    """Build the calibrated pair (z_tilde, y_tilde) from one eigendecomposition."""
    if eps_hat is None:
        # eigvalsh inside default_eps_hat would cost a second decomposition;
        # compute it from the single one below instead.
        theta, P = np.linalg.eigh(np.asarray(pair.sigma_hat, dtype=float))
        theta, P = theta[::-1].copy(), P[:, ::-1].copy()
        eps_hat = 1e-2 * max(1.0, float(theta[0]))
    else:
        if eps_hat <= 0:
            raise CalibrationError(f"eps_hat must be positive, got {eps_hat}")
        theta, P = np.linalg.eigh(np.asarray(pair.sigma_hat, dtype=float))
        theta, P = theta[::-1].copy(), P[:, ::-1].copy()
    if not np.all(np.isfinite(theta)):
        raise CalibrationError("eigendecomposition produced non-finite values")
    clamped = np.maximum(theta, eps_hat)
    sqrt_n = np.sqrt(pair.n)
    z_tilde = sqrt_n * (P * np.sqrt(clamped)) @ P.T
    z_tilde = 0.5 * (z_tilde + z_tilde.T)
    y_tilde = sqrt_n * (P * (1.0 / np.sqrt(clamped))) @ (P.T @ pair.xi_hat)
    sigma_tilde = (P * clamped) @ P.T
    sigma_tilde = 0.5 * (sigma_tilde + sigma_tilde.T)
    return CalibratedPair(
        z_tilde=z_tilde,
        y_tilde=y_tilde,
        sigma_tilde=sigma_tilde,
        eigvals=theta,
        eigvecs=P,
        eps_hat=float(eps_hat),
        n=pair.n,
    )
