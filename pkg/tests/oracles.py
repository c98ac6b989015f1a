"""Independent reference implementations used to check the package.

Everything here is deliberately written with different algorithms than the
package (proximal gradient instead of ALM, bisection instead of sorting,
grid search instead of closed forms) so agreement is meaningful.
"""

from __future__ import annotations

import numpy as np


def soft_threshold(v, t):
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def weighted_lasso_objective(Z, y, omega, beta):
    r = Z @ beta - y
    return 0.5 * float(r @ r) + float(omega @ np.abs(beta))


def weighted_lasso_duality_gap(Z, y, omega, beta):
    """Duality gap for min 0.5||Zb - y||^2 + sum omega_i |b_i| at beta.

    The dual candidate is the residual scaled back into the polar box
    {nu : |Z' nu|_i <= omega_i}.
    """
    r = Z @ beta - y
    g = Z.T @ r
    with np.errstate(divide="ignore"):
        ratios = np.where(np.abs(g) > 0, omega / np.abs(g), np.inf)
    scale = min(1.0, float(np.min(ratios)))
    nu = scale * r
    pobj = weighted_lasso_objective(Z, y, omega, beta)
    dobj = -0.5 * float(nu @ nu) - float(nu @ y)
    return pobj - dobj


def weighted_lasso_fista(Z, y, omega, gap_tol=1e-10, max_iters=200_000):
    """Accelerated proximal gradient run to a small duality gap."""
    Z = np.asarray(Z, dtype=float)
    y = np.asarray(y, dtype=float)
    omega = np.asarray(omega, dtype=float)
    p = Z.shape[1]
    L = float(np.linalg.norm(Z.T @ Z, 2))
    if L == 0.0:
        return np.zeros(p)
    step = 1.0 / L
    beta = np.zeros(p)
    v = beta.copy()
    t = 1.0
    for it in range(max_iters):
        grad = Z.T @ (Z @ v - y)
        beta_new = soft_threshold(v - step * grad, step * omega)
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        v = beta_new + ((t - 1.0) / t_new) * (beta_new - beta)
        beta, t = beta_new, t_new
        if it % 50 == 0 and weighted_lasso_duality_gap(Z, y, omega, beta) <= gap_tol:
            break
    return beta


def lasso_kkt_residual(Z, y, omega, beta, threshold=1e-10):
    """Max violation of the stationarity condition Z'(Zb - y) in omega*sgn."""
    g = Z.T @ (Z @ beta - y)
    res = 0.0
    for i in range(len(beta)):
        if abs(beta[i]) > threshold:
            res = max(res, abs(g[i] + omega[i] * np.sign(beta[i])))
        else:
            res = max(res, max(0.0, abs(g[i]) - omega[i]))
    return res


def l1_ball_project_bisection(v, radius, tol=1e-14, iters=200):
    """Projection onto the l1 ball by bisection on the threshold."""
    v = np.asarray(v, dtype=float)
    av = np.abs(v)
    if av.sum() <= radius:
        return v.copy()
    lo, hi = 0.0, float(av.max())
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if np.maximum(av - mid, 0.0).sum() > radius:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol:
            break
    theta = 0.5 * (lo + hi)
    return np.sign(v) * np.maximum(av - theta, 0.0)


def phi_quadratic(t, a):
    return (a - 1.0) / (a + 1.0) * t * t + 2.0 / (a + 1.0) * t


def psi_conjugate_grid(omega, a, num=100_001):
    """max_{t in [0,1]} t*omega - phi(t) by dense grid search."""
    t = np.linspace(0.0, 1.0, num)
    vals = t * omega - phi_quadratic(t, a)
    return float(vals.max())


def scad_textbook(t, gamma, a):
    """Piecewise SCAD penalty from the original definition."""
    at = abs(float(t))
    if at <= gamma:
        return gamma * at
    if at <= a * gamma:
        return (2.0 * a * gamma * at - at * at - gamma * gamma) / (2.0 * (a - 1.0))
    return gamma * gamma * (a + 1.0) / 2.0


def w_update_grid(beta_i, rho, a, num=2_000_001):
    """argmin_{w in [0,1]} phi(w) - rho*w*|beta_i| by grid search."""
    w = np.linspace(0.0, 1.0, num)
    vals = phi_quadratic(w, a) - rho * w * abs(float(beta_i))
    return float(w[int(np.argmin(vals))])


def max_norm_prox_direct(G, t, num_newton=200):
    """prox of t*||.||_max at matrix G, via its dual line search.

    prox_{t||.||_max}(G) = G - P, where P is the Euclidean projection of G
    onto the l1 ball of radius t (Moreau).  Computed here from the scalar
    dual problem instead of a sort, for independence.
    """
    g = np.abs(np.asarray(G, dtype=float).ravel())
    if g.sum() <= t:
        return np.zeros_like(np.asarray(G, dtype=float))
    lo, hi = 0.0, float(g.max())
    for _ in range(num_newton):
        mid = 0.5 * (lo + hi)
        if np.maximum(g - mid, 0.0).sum() > t:
            lo = mid
        else:
            hi = mid
    theta = 0.5 * (lo + hi)
    P = np.sign(np.asarray(G, dtype=float)) * np.maximum(np.abs(G) - theta, 0.0)
    return np.asarray(G, dtype=float) - P
