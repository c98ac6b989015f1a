"""Unbiased surrogates of the clean Gram pair from corrupted observations.

Given corrupted predictors Z and response y, each constructor returns a
(sigma_hat, xi_hat) pair whose expectation over the corruption mechanism
equals (X^T X / n, X^T y / n).  sigma_hat is symmetrized but may be
indefinite when n < p.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class SurrogateError(ValueError):
    """Raised on dimension mismatches or invalid noise parameters."""


@dataclass(frozen=True)
class SurrogatePair:
    """Surrogate (sigma_hat, xi_hat) of the clean Gram pair."""

    sigma_hat: np.ndarray
    xi_hat: np.ndarray
    n: int
    p: int

    def __post_init__(self):
        if self.sigma_hat.shape != (self.p, self.p):
            raise SurrogateError(
                f"sigma_hat must be {self.p}x{self.p}, got {self.sigma_hat.shape}"
            )
        if self.xi_hat.shape != (self.p,):
            raise SurrogateError(
                f"xi_hat must have length {self.p}, got {self.xi_hat.shape}"
            )


@dataclass(frozen=True)
class AdditiveError:
    """Additive corruption Z = X + A with known row covariance sigma_A."""

    sigma_A: np.ndarray


@dataclass(frozen=True)
class MultiplicativeError:
    """Multiplicative corruption Z = X o M with known mean/covariance of M."""

    mu_M: np.ndarray
    sigma_M: np.ndarray

    def __post_init__(self):
        denom = self.sigma_M + np.outer(self.mu_M, self.mu_M)
        if np.any(denom <= 0):
            raise SurrogateError("sigma_M + mu_M mu_M^T must be entrywise positive")


@dataclass(frozen=True)
class MissingError:
    """Entries of X observed independently with probability 1 - tau."""

    tau: float

    def __post_init__(self):
        if not 0.0 <= self.tau < 1.0:
            raise SurrogateError(f"tau must lie in [0, 1), got {self.tau}")


ErrorModel = AdditiveError | MultiplicativeError | MissingError


def _check_zy(Z, y):
    Z = np.asarray(Z, dtype=float)
    y = np.asarray(y, dtype=float)
    if Z.ndim != 2:
        raise SurrogateError(f"Z must be a 2-d array, got ndim={Z.ndim}")
    n, p = Z.shape
    if n < 1 or p < 1:
        raise SurrogateError(f"Z must be nonempty, got shape {Z.shape}")
    if y.shape != (n,):
        raise SurrogateError(f"y must have length {n}, got {y.shape}")
    return Z, y, n, p


def _symmetrize(S):
    return 0.5 * (S + S.T)


def additive_surrogate(Z, y, sigma_A) -> SurrogatePair:
    """Surrogate for Z = X + A with additive noise covariance sigma_A."""
    Z, y, n, p = _check_zy(Z, y)
    sigma_A = np.asarray(sigma_A, dtype=float)
    if sigma_A.shape != (p, p):
        raise SurrogateError(f"sigma_A must be {p}x{p}, got {sigma_A.shape}")
    sigma_hat = _symmetrize(Z.T @ Z / n - sigma_A)
    xi_hat = Z.T @ y / n
    return SurrogatePair(sigma_hat=sigma_hat, xi_hat=xi_hat, n=n, p=p)


def multiplicative_surrogate(Z, y, mu_M, sigma_M) -> SurrogatePair:
    """Surrogate for Z = X o M via elementwise division by the M moments."""
    Z, y, n, p = _check_zy(Z, y)
    mu_M = np.asarray(mu_M, dtype=float)
    sigma_M = np.asarray(sigma_M, dtype=float)
    if mu_M.shape != (p,):
        raise SurrogateError(f"mu_M must have length {p}, got {mu_M.shape}")
    if sigma_M.shape != (p, p):
        raise SurrogateError(f"sigma_M must be {p}x{p}, got {sigma_M.shape}")
    denom = sigma_M + np.outer(mu_M, mu_M)
    if np.any(denom == 0):
        raise SurrogateError("zero entry in sigma_M + mu_M mu_M^T divisor")
    if np.any(mu_M == 0):
        raise SurrogateError("zero entry in mu_M divisor")
    sigma_hat = _symmetrize((Z.T @ Z / n) / denom)
    xi_hat = (Z.T @ y / n) / mu_M
    return SurrogatePair(sigma_hat=sigma_hat, xi_hat=xi_hat, n=n, p=p)


def missing_surrogate(Z, y, tau) -> SurrogatePair:
    """Surrogate for independent Bernoulli(1 - tau) entry masking.

    The divisor comes from the mask moments: E[m^2] = 1 - tau on the
    diagonal, E[m_i m_j] = (1 - tau)^2 off it.
    """
    Z, y, n, p = _check_zy(Z, y)
    if not 0.0 <= tau < 1.0:
        raise SurrogateError(f"tau must lie in [0, 1), got {tau}")
    H = np.full((p, p), (1.0 - tau) ** 2)
    np.fill_diagonal(H, 1.0 - tau)
    sigma_hat = _symmetrize((Z.T @ Z / n) / H)
    xi_hat = Z.T @ y / (n * (1.0 - tau))
    return SurrogatePair(sigma_hat=sigma_hat, xi_hat=xi_hat, n=n, p=p)


def build_surrogate(Z, y, model: ErrorModel) -> SurrogatePair:
    """Dispatch on the error model type."""
    if isinstance(model, AdditiveError):
        return additive_surrogate(Z, y, model.sigma_A)
    if isinstance(model, MultiplicativeError):
        return multiplicative_surrogate(Z, y, model.mu_M, model.sigma_M)
    if isinstance(model, MissingError):
        return missing_surrogate(Z, y, model.tau)
    raise SurrogateError(f"unknown error model {model!r}")
