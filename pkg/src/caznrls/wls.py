"""Weighted l1-regularized least squares via an inexact dual ALM.

Solves  min_beta 0.5 ||Zt beta - yt||^2 + sum_i omega_i |beta_i|
through its dual

    min_{zeta, eta}  0.5 ||zeta||^2 + <yt, zeta> + delta_[-omega, omega](eta)
                     s.t.  Zt^T zeta - eta = 0,

with an augmented Lagrangian outer loop whose subproblems are solved by a
semismooth Newton-CG iteration on the strongly convex value function
Phi(zeta).  beta is the multiplier of the dual constraint.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class WeightedLassoProblem:
    z_tilde: np.ndarray  # p x p design
    y_tilde: np.ndarray
    omega: np.ndarray  # nonnegative weights

    def __post_init__(self):
        p = self.z_tilde.shape[1]
        if self.z_tilde.ndim != 2:
            raise ValueError("z_tilde must be 2-d")
        if self.y_tilde.shape != (self.z_tilde.shape[0],):
            raise ValueError("y_tilde length must match rows of z_tilde")
        if self.omega.shape != (p,):
            raise ValueError("omega length must match columns of z_tilde")
        if np.any(self.omega < 0):
            raise ValueError("omega must be nonnegative")

    @property
    def p(self) -> int:
        return self.z_tilde.shape[1]

    def primal_objective(self, beta: np.ndarray) -> float:
        r = self.z_tilde @ beta - self.y_tilde
        return 0.5 * float(r @ r) + float(self.omega @ np.abs(beta))

    def dual_objective(self, zeta: np.ndarray) -> float:
        return 0.5 * float(zeta @ zeta) + float(self.y_tilde @ zeta)


@dataclass(frozen=True)
class NewtonParams:
    theta: float = 0.1  # CG residual cap
    varsigma: float = 0.5  # superlinear exponent
    delta: float = 0.5  # backtracking factor
    rho_ls: float = 0.25  # Armijo slope fraction
    max_newton_iters: int = 50
    max_cg_iters: int = 200

    def __post_init__(self):
        assert 0 < self.theta < 1 and 0 < self.varsigma < 1
        assert 0 < self.delta < 1 and 0 < self.rho_ls < 0.5


@dataclass(frozen=True)
class AlmParams:
    mu0: float = 1.0
    mu_growth: float = 2.5
    mu_max: float = 1e8
    tol: float = 1e-8
    max_alm_iters: int = 100
    newton: NewtonParams = field(default_factory=NewtonParams)

    def __post_init__(self):
        assert self.mu0 > 0 and self.mu_growth >= 1 and self.mu_max > 0
        assert self.tol > 0


@dataclass
class WeightedLassoSolution:
    beta: np.ndarray
    zeta: np.ndarray
    eta: np.ndarray
    kkt_residual: float
    alm_iters: int
    newton_iters_total: int
    cg_iters_total: int
    converged: bool


def box_project(h: np.ndarray, omega: np.ndarray):
    """Project onto [-omega, omega]; the 0/1 diagonal of a Clarke Jacobian.

    The boundary tie |h_i| = omega_i resolves to 0 so the curvature term
    stays active there.
    """
    projected = np.clip(h, -omega, omega)
    jacobian_diag = (np.abs(h) < omega).astype(float)
    return projected, jacobian_diag


def phi_value_grad(zeta, beta_bar, mu, prob: WeightedLassoProblem):
    """Value and gradient of Phi(zeta) = min_eta L_mu(zeta, eta; beta_bar)."""
    h = prob.z_tilde.T @ zeta + beta_bar / mu
    proj, _ = box_project(h, prob.omega)
    d = h - proj
    value = 0.5 * mu * float(d @ d) + 0.5 * float(zeta @ zeta) + float(
        prob.y_tilde @ zeta
    )
    grad = prob.y_tilde + zeta + mu * (prob.z_tilde @ d)
    return value, grad, h


def _cg(matvec, rhs, tol, max_iters):
    """Plain CG for SPD systems; returns (x, iters)."""
    x = np.zeros_like(rhs)
    r = rhs.copy()
    d = r.copy()
    rs = float(r @ r)
    if np.sqrt(rs) <= tol:
        return x, 0
    for it in range(1, max_iters + 1):
        Vd = matvec(d)
        alpha = rs / float(d @ Vd)
        x += alpha * d
        r -= alpha * Vd
        rs_new = float(r @ r)
        if np.sqrt(rs_new) <= tol:
            return x, it
        d = r + (rs_new / rs) * d
        rs = rs_new
    return x, max_iters


def semismooth_newton(
    prob: WeightedLassoProblem,
    beta_bar,
    mu,
    zeta_start,
    newton_params: NewtonParams,
    stop_norm: float,
):
    """Drive ||grad Phi|| below stop_norm by Newton-CG with Armijo search.

    Returns (zeta, grad, h, newton_iters, cg_iters, converged).
    """
    np_ = newton_params
    zeta = zeta_start.copy()
    bb = beta_bar / mu
    zt_zeta = prob.z_tilde.T @ zeta

    def value_at(z, ztz):
        h = ztz + bb
        d = h - np.clip(h, -prob.omega, prob.omega)
        return (
            0.5 * mu * float(d @ d)
            + 0.5 * float(z @ z)
            + float(prob.y_tilde @ z)
        ), h

    value, h = value_at(zeta, zt_zeta)
    proj = np.clip(h, -prob.omega, prob.omega)
    grad = prob.y_tilde + zeta + mu * (prob.z_tilde @ (h - proj))
    cg_total = 0
    for it in range(np_.max_newton_iters):
        gnorm = float(np.linalg.norm(grad))
        if gnorm <= stop_norm:
            return zeta, grad, h, it, cg_total, True
        inactive = np.abs(h) >= prob.omega  # where the box Jacobian is 0
        Zi = prob.z_tilde[:, inactive]

        def matvec(d, Zi=Zi):
            return d + mu * (Zi @ (Zi.T @ d))

        cg_tol = min(np_.theta, gnorm ** (1.0 + np_.varsigma))
        d, cg_it = _cg(matvec, -grad, cg_tol, np_.max_cg_iters)
        cg_total += cg_it
        slope = float(grad @ d)
        if slope >= -1e-16 * max(1.0, gnorm):
            d = -grad
            slope = -gnorm * gnorm
        zt_d = prob.z_tilde.T @ d
        # Armijo backtracking; trial values reuse the cached Z~'zeta and
        # Z~'d so each trial is O(p) vector work, matvec-free
        step = 1.0
        for _ in range(60):
            cand = zeta + step * d
            v_cand, h_cand = value_at(cand, zt_zeta + step * zt_d)
            if v_cand <= value + np_.rho_ls * step * slope:
                break
            step *= np_.delta
        zeta, value, h = cand, v_cand, h_cand
        zt_zeta = zt_zeta + step * zt_d
        proj = np.clip(h, -prob.omega, prob.omega)
        grad = prob.y_tilde + zeta + mu * (prob.z_tilde @ (h - proj))
    converged = float(np.linalg.norm(grad)) <= stop_norm
    return zeta, grad, h, np_.max_newton_iters, cg_total, converged


def solve(
    prob: WeightedLassoProblem,
    params: AlmParams | None = None,
    warm: WeightedLassoSolution | None = None,
) -> WeightedLassoSolution:
    """Inexact ALM on the dual; beta is recovered as the multiplier."""
    if params is None:
        params = AlmParams()
    p = prob.p
    yscale = 1.0 + float(np.linalg.norm(prob.y_tilde))
    # The stated dual formulas drive the multiplier to the *negative* of the
    # primal lasso solution (check the scalar fixed point); mult = -beta
    # throughout and we flip on entry/exit.
    if warm is not None:
        mult = -warm.beta
        zeta = warm.zeta.copy()
    else:
        mult = np.zeros(p)
        zeta = np.zeros(prob.z_tilde.shape[0])

    mu = params.mu0
    newton_total = 0
    cg_total = 0
    eps_pinf_prev = np.inf
    inner_target = 0.1  # delta_j * min(0.1, max(eps_dinf, eps_gap)) from prev iterate
    delta_j = 1.0
    floor = 0.5 * params.tol * yscale
    kkt = np.inf
    converged = False
    j = 0
    for j in range(1, params.max_alm_iters + 1):
        stop_norm = max(inner_target, floor)
        zeta, grad, h, n_it, c_it, _ = semismooth_newton(
            prob, mult, mu, zeta, params.newton, stop_norm
        )
        newton_total += n_it
        cg_total += c_it
        eta, _ = box_project(h, prob.omega)
        mult_new = mu * (h - eta)  # == mult + mu (Zt^T zeta - eta)

        eps_pinf = float(np.linalg.norm(grad)) / yscale
        eps_dinf = float(np.linalg.norm(mult_new - mult)) / (mu * yscale)
        pobj = prob.primal_objective(-mult_new)
        dobj = prob.dual_objective(zeta)
        eps_gap = abs(pobj + dobj) / (1.0 + abs(pobj))
        mult = mult_new
        kkt = max(eps_pinf, eps_dinf, eps_gap)
        if kkt <= params.tol:
            converged = True
            break

        delta_j *= 0.5  # summable inner-tolerance schedule
        inner_target = delta_j * min(0.1, max(eps_dinf, eps_gap))
        if eps_pinf > 0.6 * eps_pinf_prev:
            mu = min(mu * params.mu_growth, params.mu_max)
        eps_pinf_prev = eps_pinf

    eta, _ = box_project(h, prob.omega)
    return WeightedLassoSolution(
        beta=-mult,
        zeta=zeta,
        eta=eta,
        kkt_residual=kkt,
        alm_iters=j,
        newton_iters_total=newton_total,
        cg_iters_total=cg_total,
        converged=converged,
    )
