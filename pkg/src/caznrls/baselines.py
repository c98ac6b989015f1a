"""Comparison estimators: CoCoLasso and the nonconvex Lasso (NCL).

CoCoLasso calibrates the surrogate by a max-norm nearest-PD problem solved
with a large-step ADMM, then runs a uniform-weight lasso on the Cholesky
factor pair.  NCL runs projected gradient on the (possibly indefinite)
surrogate quadratic over an l1 ball.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .surrogate import SurrogatePair
from .wls import AlmParams, WeightedLassoProblem
from .wls import solve as wls_solve


class BaselineError(RuntimeError):
    pass


def l1_ball_project(v: np.ndarray, radius: float) -> np.ndarray:
    """Euclidean projection onto {x : ||x||_1 <= radius} (Duchi et al.)."""
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    v = np.asarray(v, dtype=float)
    av = np.abs(v)
    if av.sum() <= radius:
        return v.copy()
    u = np.sort(av)[::-1]
    css = np.cumsum(u)
    k = np.arange(1, v.size + 1)
    rho_idx = np.nonzero(u - (css - radius) / k > 0)[0][-1]
    theta = (css[rho_idx] - radius) / (rho_idx + 1.0)
    return np.sign(v) * np.maximum(av - theta, 0.0)


@dataclass(frozen=True)
class AdmmParams:
    mu: float = 1.0
    tau_step: float = 1.618
    tol_pinf: float = 1e-4
    tol_dinf: float = 1e-4
    tol_gap_scaled: float = 1e-4  # threshold for 1e-3 * eps_gap
    max_iters: int = 5000

    def __post_init__(self):
        if not 1.0 < self.tau_step < (np.sqrt(5.0) + 1.0) / 2.0:
            raise ValueError("tau_step must lie strictly in (1, (sqrt(5)+1)/2)")


@dataclass
class AdmmDiagnostics:
    iters: int
    eps_pinf: float
    eps_dinf: float
    eps_gap: float
    converged: bool
    objective: float  # ||B||_max at termination
    W: np.ndarray | None = None
    B: np.ndarray | None = None
    Gamma: np.ndarray | None = None
    mu: float = 1.0


def _psd_project(S: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(S)
    out = (vecs * np.maximum(vals, 0.0)) @ vecs.T
    return 0.5 * (out + out.T)


def nearest_pd_maxnorm(
    sigma_hat: np.ndarray,
    eps_hat: float,
    params: AdmmParams | None = None,
    warm: AdmmDiagnostics | None = None,
):
    """Max-norm nearest matrix above eps_hat*I, by ADMM with a large step.

    Splitting W - B = sigma_hat with W >= eps_hat*I and objective ||B||_max.
    The B-update uses the Moreau identity with the l1-ball projection of the
    flattened symmetric matrix.  mu is adapted every 50 iterations by the
    primal/dual infeasibility ratio.
    """
    if params is None:
        params = AdmmParams()
    if eps_hat <= 0:
        raise ValueError(f"eps_hat must be positive, got {eps_hat}")
    sigma_hat = np.asarray(sigma_hat, dtype=float)
    p = sigma_hat.shape[0]
    scale = 1.0 + float(np.linalg.norm(sigma_hat, "fro"))
    shifted = sigma_hat - eps_hat * np.eye(p)

    mu = params.mu
    tau = params.tau_step
    if warm is not None and warm.W is not None:
        W, B, Gamma = warm.W.copy(), warm.B.copy(), warm.Gamma.copy()
        mu = warm.mu
    else:
        B = np.zeros((p, p))
        Gamma = np.zeros((p, p))
        W = sigma_hat.copy()

    eps_pinf = eps_dinf = eps_gap = np.inf
    converged = False
    it = 0
    for it in range(1, params.max_iters + 1):
        W = eps_hat * np.eye(p) + _psd_project(B - Gamma / mu + shifted)
        G = W + Gamma / mu - sigma_hat
        B_prev = B
        proj = l1_ball_project(G.ravel(), 1.0 / mu).reshape(p, p)
        B = G - proj
        B = 0.5 * (B + B.T)  # numerical no-op: the set is symmetric-invariant
        resid = W - B - sigma_hat
        Gamma_prev = Gamma
        Gamma = Gamma + tau * mu * resid

        dGamma = Gamma - Gamma_prev
        eps_pinf = float(
            np.linalg.norm(mu * (B - B_prev) + (1.0 / tau - 1.0) * dGamma, "fro")
        ) / scale
        eps_dinf = float(np.linalg.norm(dGamma, "fro")) / (tau * mu * scale)
        pobj = float(np.max(np.abs(B)))
        dobj = float(np.sum(Gamma * shifted))
        eps_gap = abs(pobj + dobj) / max(1.0, 0.5 * (abs(pobj) + abs(dobj)))
        if (
            eps_pinf <= params.tol_pinf
            and eps_dinf <= params.tol_dinf
            and 1e-3 * eps_gap <= params.tol_gap_scaled
        ):
            converged = True
            break
        if it % 50 == 0:
            # eps_pinf scales with mu * dB, eps_dinf with dGamma / mu
            if eps_pinf > 10.0 * eps_dinf:
                mu = max(mu / 2.0, 1e-6)
            elif eps_dinf > 10.0 * eps_pinf:
                mu = min(mu * 2.0, 1e6)

    diag = AdmmDiagnostics(
        iters=it,
        eps_pinf=eps_pinf,
        eps_dinf=eps_dinf,
        eps_gap=eps_gap,
        converged=converged,
        objective=float(np.max(np.abs(B))),
        W=W,
        B=B,
        Gamma=Gamma,
        mu=mu,
    )
    return W, diag


def cocolasso_fit(
    pair: SurrogatePair,
    eps_hat: float,
    lam: float,
    admm_params: AdmmParams | None = None,
    alm_params: AlmParams | None = None,
    sigma_bar: np.ndarray | None = None,
):
    """CoCoLasso: lasso on the Cholesky pair of the max-norm calibration.

    sigma_bar may be passed to reuse a previously computed ADMM calibration
    (the calibration does not depend on lam).
    """
    if sigma_bar is None:
        sigma_bar, diag = nearest_pd_maxnorm(pair.sigma_hat, eps_hat, admm_params)
        if not diag.converged:
            raise BaselineError(
                f"ADMM calibration did not converge in {diag.iters} iterations"
            )
    try:
        L = np.linalg.cholesky(
            0.5 * (sigma_bar + sigma_bar.T) + 1e-12 * np.eye(pair.p)
        )
    except np.linalg.LinAlgError as exc:  # guarded: W >= eps_hat*I holds
        raise BaselineError("Cholesky factorization of sigma_bar failed") from exc
    sqrt_n = np.sqrt(pair.n)
    z_bar = sqrt_n * L.T
    # z_bar^T y_bar = n xi_hat  =>  sqrt(n) L y_bar = n xi_hat
    y_bar = scipy.linalg.solve_triangular(L, sqrt_n * pair.xi_hat, lower=True)
    omega = pair.n * lam * np.ones(pair.p)
    prob = WeightedLassoProblem(z_tilde=z_bar, y_tilde=y_bar, omega=omega)
    sol = wls_solve(prob, alm_params)
    return sol.beta


@dataclass(frozen=True)
class NclParams:
    radius: float = 1.0
    step_rule: str = "fixed_inverse_spectral"
    max_iters: int = 2000
    tol: float = 1e-9

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError(f"radius must be nonnegative, got {self.radius}")
        if self.step_rule not in ("fixed_inverse_spectral", "backtracking"):
            raise ValueError(f"unknown step rule {self.step_rule!r}")


def _spectral_norm(S: np.ndarray, iters: int = 500, tol: float = 1e-12):
    """Spectral norm of symmetric S by power iteration on S^2.

    Convergence is judged on the Rayleigh estimate, not the vector, so
    near-degenerate top eigenvalues (where the vector wanders in the
    leading eigenspace) still terminate.
    """
    rng = np.random.default_rng(0)
    v = rng.standard_normal(S.shape[0])
    v /= np.linalg.norm(v)
    lam2 = 0.0
    ok = False
    for _ in range(iters):
        w = S @ (S @ v)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0, True
        v_new = w / nw
        if abs(nw - lam2) <= tol * max(1.0, nw):
            ok = True
            v = v_new
            lam2 = nw
            break
        v = v_new
        lam2 = nw
    return float(np.sqrt(lam2)), ok


def ncl_fit(pair: SurrogatePair, params: NclParams):
    """Projected gradient on 0.5 b'Sb - <xi, b> over the l1 ball."""
    p = pair.p
    beta = np.zeros(p)
    if params.radius == 0.0:
        return beta
    S, xi = pair.sigma_hat, pair.xi_hat

    def obj(b):
        return 0.5 * float(b @ (S @ b)) - float(xi @ b)

    spec, spec_ok = _spectral_norm(S)
    eta = 1.0 / spec if spec > 0 else 1.0
    f = obj(beta)
    for _ in range(params.max_iters):
        grad = S @ beta - xi
        if params.step_rule == "fixed_inverse_spectral":
            beta_new = l1_ball_project(beta - eta * grad, params.radius)
        else:
            step = eta
            while True:
                beta_new = l1_ball_project(beta - step * grad, params.radius)
                if obj(beta_new) <= f + float(grad @ (beta_new - beta)) + (
                    0.5 / step
                ) * float(np.sum((beta_new - beta) ** 2)):
                    break
                step *= 0.5
                if step < 1e-12:
                    break
        f_new = obj(beta_new)
        rel_change = abs(f_new - f) / max(1.0, abs(f))
        beta = beta_new
        f = f_new
        if rel_change <= params.tol:
            break
    return beta
