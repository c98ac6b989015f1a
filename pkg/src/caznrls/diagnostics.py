"""Theory quantities computed on simulated instances for reporting.

These require the ground truth (X, beta_star) and are reporting-only: the
fitting path never depends on them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .calibration import CalibratedPair
from .simulation import Dataset
from .surrogate import SurrogatePair


@dataclass
class TheoryReport:
    d_max: float  # || sigma_hat - X'X/n ||_max
    eps_tilde: np.ndarray  # xi_hat - sigma_tilde beta_star
    eps_tilde_inf: float
    beta_ls: np.ndarray  # oracle LS restricted to the true support
    eps_ls_inf: float
    irrepresentable_norm: float  # || Sigma_{S^c S} Sigma_{SS}^{-1} ||_inf
    kappa_hat: float | None = None  # sampled cone estimate, not a certificate
    bound_thm2: float | None = None


def theory_report(
    dataset: Dataset,
    pair: SurrogatePair,
    cal: CalibratedPair,
    lam: float,
    kappa_hat: float | None = None,
) -> TheoryReport:
    X = dataset.X
    n = X.shape[0]
    sigma = X.T @ X / n
    D = pair.sigma_hat - sigma
    d_max = float(np.max(np.abs(D)))
    eps_tilde = pair.xi_hat - cal.sigma_tilde @ dataset.beta_star
    S = dataset.support_star
    s = len(S)
    sub = cal.sigma_tilde[np.ix_(S, S)]
    beta_ls = np.zeros(dataset.beta_star.shape)
    beta_ls[S] = np.linalg.solve(sub, pair.xi_hat[S])
    eps_ls = pair.xi_hat - cal.sigma_tilde @ beta_ls
    Sc = np.setdiff1d(np.arange(len(beta_ls)), S)
    G = sigma[np.ix_(Sc, S)] @ np.linalg.inv(sigma[np.ix_(S, S)])
    irrep = float(np.max(np.sum(np.abs(G), axis=1))) if len(Sc) else 0.0
    bound = None
    if kappa_hat is not None:
        gap = kappa_hat - 24.0 * s * d_max
        if gap > 0:
            bound = 5.0 * np.sqrt(s) * lam / (2.0 * gap)
    return TheoryReport(
        d_max=d_max,
        eps_tilde=eps_tilde,
        eps_tilde_inf=float(np.max(np.abs(eps_tilde))),
        beta_ls=beta_ls,
        eps_ls_inf=float(np.max(np.abs(eps_ls))),
        irrepresentable_norm=irrep,
        kappa_hat=kappa_hat,
        bound_thm2=bound,
    )


def _cone_directions(p, support, s_cap, samples, rng, enumerate_sets):
    """Yield unit directions from the cone: supersets S of the support with
    |S| <= s_cap and ||beta_{S^c}||_1 <= 3 ||beta_S||_1."""
    others = [i for i in range(p) if i not in set(support)]
    extra = s_cap - len(support)
    if enumerate_sets:
        supersets = [
            list(support) + list(c)
            for k in range(extra + 1)
            for c in itertools.combinations(others, k)
        ]
    else:
        supersets = None
    for _ in range(samples):
        if supersets is not None:
            S = supersets[rng.integers(len(supersets))]
        else:
            k = rng.integers(0, extra + 1)
            S = list(support) + list(rng.choice(others, size=k, replace=False))
        Sc = [i for i in range(p) if i not in set(S)]
        beta = np.zeros(p)
        beta[S] = rng.standard_normal(len(S))
        if Sc:
            tail = rng.standard_normal(len(Sc))
            budget = rng.uniform(0.0, 3.0) * np.sum(np.abs(beta[S]))
            t1 = np.sum(np.abs(tail))
            if t1 > 0:
                beta[Sc] = tail * (budget / t1)
        nrm = np.linalg.norm(beta)
        if nrm > 0:
            yield beta / nrm


def rec_estimate(sigma, support, s, samples, rng) -> float:
    """Sampled upper estimate of the restricted eigenvalue over the cone.

    Sampling cannot certify the true minimum; treat the value as an upper
    bound on the REC constant.
    """
    sigma = np.asarray(sigma, dtype=float)
    p = sigma.shape[0]
    s_cap = int(np.floor(1.5 * s))
    enumerate_sets = p <= 20
    best = np.inf
    for beta in _cone_directions(p, list(support), s_cap, samples, rng,
                                 enumerate_sets):
        q = float(beta @ (sigma @ beta))
        best = min(best, q)
    return best


def track_sets(beta_k, beta_star, rho_k: float, a: float):
    """Deviation set F_k and small-coefficient set Lambda_k of stage k."""
    beta_k = np.asarray(beta_k, dtype=float)
    beta_star = np.asarray(beta_star, dtype=float)
    F_k = np.flatnonzero(np.abs(beta_k) - np.abs(beta_star) >= 1.0 / rho_k)
    Lambda_k = np.flatnonzero(
        np.abs(beta_star) <= 4.0 * a / ((a + 1.0) * rho_k)
    )
    return F_k, Lambda_k
