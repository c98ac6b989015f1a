"""Multi-stage convex relaxation for the calibrated zero-norm LS estimator.

Alternates weighted-lasso solves with closed-form dual-weight updates,
tightening the penalty level over the first three stages.  Also hosts the
penalty calculus: the quadratic phi, the conjugate psi*, and the SCAD
equivalence mapping.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .calibration import CalibratedPair
from .wls import AlmParams, WeightedLassoProblem, WeightedLassoSolution
from .wls import solve as wls_solve


def phi(t, a: float):
    """phi(t) = (a-1)/(a+1) t^2 + 2/(a+1) t for a > 1."""
    if a <= 1:
        raise ValueError(f"a must exceed 1, got {a}")
    t = np.asarray(t, dtype=float)
    out = (a - 1.0) / (a + 1.0) * t * t + 2.0 / (a + 1.0) * t
    return out if out.ndim else float(out)


def psi_conjugate(omega, a: float):
    """Conjugate of phi restricted to [0, 1]; three branches in omega."""
    if a <= 1:
        raise ValueError(f"a must exceed 1, got {a}")
    omega = np.asarray(omega, dtype=float)
    lo = 2.0 / (a + 1.0)
    hi = 2.0 * a / (a + 1.0)
    mid = ((a + 1.0) * omega - 2.0) ** 2 / (4.0 * (a * a - 1.0))
    out = np.where(omega <= lo, 0.0, np.where(omega <= hi, mid, omega - 1.0))
    return out if out.ndim else float(out)


def scad_penalty_via_conjugate(t, gamma: float, a: float):
    """SCAD penalty p_gamma(|t|) expressed as lam*[rho|t| - psi*(rho|t|)].

    Uses the mapping lam = (a+1) gamma^2 / 2, rho = 2 / ((a+1) gamma).
    """
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    lam = (a + 1.0) * gamma * gamma / 2.0
    rho = 2.0 / ((a + 1.0) * gamma)
    rt = rho * np.abs(np.asarray(t, dtype=float))
    out = lam * (rt - psi_conjugate(rt, a))
    return out if out.ndim else float(out)


def w_update(beta, rho: float, a: float):
    """Closed-form minimizer of phi(w) - rho w |beta_i| over [0, 1]."""
    if rho <= 0 or a <= 1:
        raise ValueError("need rho > 0 and a > 1")
    num = (a + 1.0) * rho * np.abs(beta) - 2.0
    return np.clip(num / (2.0 * (a - 1.0)), 0.0, 1.0)


def rho_schedule(k: int, beta_k, rho_prev: float, cap: float = 1e8) -> float:
    """Stage penalty level: ramp for k <= 3, frozen afterwards."""
    bmax = float(np.max(np.abs(beta_k))) if len(beta_k) else 0.0
    if bmax == 0.0:
        return rho_prev  # zero iterate: any rho gives w = 0
    if k == 1:
        return max(1.0, 5.0 / (3.0 * bmax))
    if k in (2, 3):
        return min(2.0 * rho_prev, cap / bmax)
    return rho_prev


@dataclass(frozen=True)
class GepConfig:
    a: float = 6.0
    lam: float = 0.1
    w0: np.ndarray | None = None  # entries in [0, 1/2]; default all-zero
    k_max: int = 4
    rho_cap: float = 1e8
    stop_nnz_delta: int = 5
    stop_loss_delta: float = 0.1
    nnz_threshold: float = 1e-8
    alm: AlmParams = field(default_factory=AlmParams)

    def __post_init__(self):
        if self.a <= 1:
            raise ValueError(f"a must exceed 1, got {self.a}")
        if self.lam <= 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")
        if self.w0 is not None and (np.any(self.w0 < 0) or np.any(self.w0 > 0.5)):
            raise ValueError("w0 entries must lie in [0, 1/2]")


@dataclass
class StageRecord:
    beta: np.ndarray
    w: np.ndarray
    rho: float
    loss: float  # (1/2n) ||Zt beta - yt||^2
    nnz: int
    inner_converged: bool


@dataclass
class FitResult:
    beta_final: np.ndarray
    support: np.ndarray  # indices with |beta_i| > nnz_threshold
    iterates: list[StageRecord]
    stages_run: int
    stopped_by: str  # "stability" | "k_max"
    stage1_solution: WeightedLassoSolution | None = None  # warm-start handle


def _nnz(beta, threshold):
    return int(np.sum(np.abs(beta) > threshold))


def fit(
    cal: CalibratedPair,
    cfg: GepConfig,
    warm: WeightedLassoSolution | None = None,
) -> FitResult:
    """Run the multi-stage relaxation on a calibrated pair.

    warm (typically the stage-1 solution of a fit at a nearby penalty
    level) seeds the first weighted-lasso solve.
    """
    p = cal.p
    n = cal.n
    w = np.zeros(p) if cfg.w0 is None else np.asarray(cfg.w0, dtype=float)
    rho = 1.0
    records: list[StageRecord] = []
    sol: WeightedLassoSolution | None = warm
    stage1: WeightedLassoSolution | None = None
    stopped_by = "k_max"
    k = 0
    while k < cfg.k_max:
        k += 1
        omega = n * cfg.lam * (1.0 - w)
        prob = WeightedLassoProblem(
            z_tilde=cal.z_tilde, y_tilde=cal.y_tilde, omega=omega
        )
        sol = wls_solve(prob, cfg.alm, warm=sol)
        if k == 1:
            stage1 = sol
        beta = sol.beta
        rho = rho_schedule(k, beta, rho, cfg.rho_cap)
        w = w_update(beta, rho, cfg.a)
        r = cal.z_tilde @ beta - cal.y_tilde
        loss = 0.5 * float(r @ r) / n
        records.append(
            StageRecord(
                beta=beta.copy(),
                w=w.copy(),
                rho=rho,
                loss=loss,
                nnz=_nnz(beta, cfg.nnz_threshold),
                inner_converged=sol.converged,
            )
        )
        if _stable(records, cfg):
            stopped_by = "stability"
            break
    beta_final = records[-1].beta
    support = np.flatnonzero(np.abs(beta_final) > cfg.nnz_threshold)
    return FitResult(
        beta_final=beta_final,
        support=support,
        iterates=records,
        stages_run=len(records),
        stopped_by=stopped_by,
        stage1_solution=stage1,
    )


def _stable(records: list[StageRecord], cfg: GepConfig) -> bool:
    # Needs nnz history over four consecutive stages plus a small loss change.
    if len(records) < 4:
        return False
    nnz = [r.nnz for r in records[-4:]]
    if any(abs(nnz[i + 1] - nnz[i]) > cfg.stop_nnz_delta for i in range(3)):
        return False
    return abs(records[-1].loss - records[-2].loss) <= cfg.stop_loss_delta
