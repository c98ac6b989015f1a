"""Synthetic scenario generators for the benchmark examples.

Each scenario fixes a design distribution, a corruption mechanism and the
true coefficient generation rule.  Everything is driven by explicit seeds:
(spec, seed) determines the dataset bitwise, and replication r of a base
seed uses the derived SeedSequence([base_seed, r]).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .surrogate import AdditiveError, ErrorModel, MissingError, MultiplicativeError

EXAMPLES = (
    "ex1", "ex2", "ex3", "ex4", "ex5", "ex6", "ex7", "ex8", "fixed52",
)

# design distribution and corruption family per example
_DESIGN = {
    "ex1": "gaussian",
    "ex2": "gaussian",
    "ex3": "uniform01",
    "ex4": "gaussian",
    "ex5": "laplace",
    "ex6": "gaussian",
    "ex7": "exponential",
    "ex8": "split_gaussian",
    "fixed52": "ar1_gaussian",
}

_ERROR_KIND = {
    "ex1": "additive",
    "ex2": "additive",
    "ex3": "additive",
    "ex4": "multiplicative",
    "ex5": "multiplicative",
    "ex6": "missing",
    "ex7": "missing",
    "ex8": "additive",
    # fixed52 takes the error kind from the spec
}


@dataclass(frozen=True)
class ScenarioSpec:
    example_id: str
    p: int
    tau: float
    seed: int
    alpha: float | None = None  # n = floor(alpha * s * ln p)
    n: int | None = None  # explicit sample size overrides alpha
    s: int | None = None  # default floor(0.5 sqrt(p)); fixed52 forces 3
    sigma_noise: float = 0.5
    error_kind: str | None = None  # required for fixed52

    def __post_init__(self):
        if self.example_id not in EXAMPLES:
            raise ValueError(f"unknown example {self.example_id!r}")
        if self.p < 4:
            raise ValueError(f"p must be at least 4, got {self.p}")
        if self.n is None and self.alpha is None:
            raise ValueError("either n or alpha must be given")
        if self.example_id == "fixed52" and self.error_kind is None:
            raise ValueError("fixed52 requires an explicit error_kind")

    @property
    def sparsity(self) -> int:
        if self.example_id == "fixed52":
            return 3
        if self.s is not None:
            return self.s
        return int(math.floor(0.5 * math.sqrt(self.p)))

    @property
    def sample_size(self) -> int:
        if self.n is not None:
            return self.n
        n = int(math.floor(self.alpha * self.sparsity * math.log(self.p)))
        if n < 1:
            raise ValueError("computed sample size is below 1")
        return n

    @property
    def kind(self) -> str:
        return self.error_kind or _ERROR_KIND[self.example_id]


@dataclass
class Dataset:
    X: np.ndarray
    Z: np.ndarray
    y: np.ndarray
    beta_star: np.ndarray
    support_star: np.ndarray
    error_model: ErrorModel
    spec: ScenarioSpec


def gen_beta(p: int, s: int, mode: str, rng: np.random.Generator):
    """True coefficients: random support with N(0,1) values, or the fixed
    (3, 1.5, 0, 0, 2, 0, ...) vector."""
    if mode == "fixed_52":
        beta = np.zeros(p)
        beta[0], beta[1], beta[4] = 3.0, 1.5, 2.0
        support = np.array([0, 1, 4])
        return beta, support
    if mode != "random_normal":
        raise ValueError(f"unknown beta mode {mode!r}")
    if s > p:
        raise ValueError("sparsity exceeds dimension")
    support = np.sort(rng.choice(p, size=s, replace=False))
    beta = np.zeros(p)
    beta[support] = rng.standard_normal(s)
    return beta, support


def gen_design(spec: ScenarioSpec, rng: np.random.Generator,
               support: np.ndarray | None = None) -> np.ndarray:
    n, p = spec.sample_size, spec.p
    kind = _DESIGN[spec.example_id]
    if kind == "gaussian":
        return rng.standard_normal((n, p))
    if kind == "uniform01":
        return rng.uniform(0.0, 1.0, size=(n, p))
    if kind == "laplace":
        return rng.laplace(0.0, 1.0 / math.sqrt(2.0), size=(n, p))
    if kind == "exponential":
        return rng.exponential(1.0, size=(n, p))
    if kind == "split_gaussian":
        X = 5.0 * rng.standard_normal((n, p))
        if support is None:
            raise ValueError("split_gaussian design needs the true support")
        X[:, support] = rng.standard_normal((n, len(support)))
        return X
    if kind == "ar1_gaussian":
        idx = np.arange(p)
        cov = 0.5 ** np.abs(idx[:, None] - idx[None, :])
        L = np.linalg.cholesky(cov)
        return rng.standard_normal((n, p)) @ L.T
    raise AssertionError(kind)


def corrupt(X: np.ndarray, kind: str, tau: float, rng: np.random.Generator):
    """Apply the corruption mechanism; return (Z, oracle error model)."""
    n, p = X.shape
    if kind == "additive":
        Z = X + tau * rng.standard_normal((n, p))
        return Z, AdditiveError(sigma_A=tau * tau * np.eye(p))
    if kind == "multiplicative":
        M = np.exp(tau * rng.standard_normal((n, p)))
        mu = math.exp(tau * tau / 2.0) * np.ones(p)
        sigma_M = np.full((p, p), 0.0)
        np.fill_diagonal(sigma_M, math.exp(2.0 * tau * tau) - math.exp(tau * tau))
        return X * M, MultiplicativeError(mu_M=mu, sigma_M=sigma_M)
    if kind == "missing":
        mask = rng.random((n, p)) >= tau
        return X * mask, MissingError(tau=tau)
    raise ValueError(f"unknown corruption kind {kind!r}")


def gen_response(X, beta_star, sigma_noise, rng: np.random.Generator):
    y = X @ beta_star
    if sigma_noise > 0:
        y = y + sigma_noise * rng.standard_normal(X.shape[0])
    return y


def rep_rng(base_seed: int, rep: int) -> np.random.Generator:
    """Derived, order-insensitive generator for replication rep."""
    return np.random.default_rng(np.random.SeedSequence([base_seed, rep]))


def make_dataset(spec: ScenarioSpec) -> Dataset:
    rng = np.random.default_rng(np.random.SeedSequence([spec.seed]))
    mode = "fixed_52" if spec.example_id == "fixed52" else "random_normal"
    beta_star, support = gen_beta(spec.p, spec.sparsity, mode, rng)
    X = gen_design(spec, rng, support=support)
    y = gen_response(X, beta_star, spec.sigma_noise, rng)
    Z, model = corrupt(X, spec.kind, spec.tau, rng)
    return Dataset(
        X=X, Z=Z, y=y, beta_star=beta_star, support_star=support,
        error_model=model, spec=spec,
    )


# --- columnar text serialization --------------------------------------------

_FMT = "%.17g"


def save_dataset(ds: Dataset, path) -> None:
    """Columnar text format: a header line of key=value pairs, then labeled
    blocks beta_star, X, Z, y (rows of space-separated decimals)."""
    spec = ds.spec
    n, p = ds.X.shape
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(
            "# caznrls-dataset v1 "
            f"example_id={spec.example_id} p={p} n={n} s={spec.sparsity} "
            f"tau={spec.tau!r} sigma_noise={spec.sigma_noise!r} "
            f"seed={spec.seed} error_kind={spec.kind}\n"
        )
        for name, arr in (
            ("beta_star", ds.beta_star[None, :]),
            ("X", ds.X),
            ("Z", ds.Z),
            ("y", ds.y[None, :]),
        ):
            f.write(f"{name}\n")
            np.savetxt(f, arr, fmt=_FMT)


def load_dataset(path) -> Dataset:
    with open(path, encoding="utf-8") as f:
        header = f.readline()
        if not header.startswith("# caznrls-dataset v1"):
            raise ValueError("not a caznrls dataset file")
        meta = dict(tok.split("=", 1) for tok in header.split()[3:])
        blocks: dict[str, list[list[float]]] = {}
        current = None
        for line in f:
            line = line.strip()
            if not line:
                continue
            if line in ("beta_star", "X", "Z", "y"):
                current = line
                blocks[current] = []
            else:
                blocks[current].append([float(t) for t in line.split()])
    spec = ScenarioSpec(
        example_id=meta["example_id"],
        p=int(meta["p"]),
        n=int(meta["n"]),
        s=int(meta["s"]),
        tau=float(meta["tau"]),
        sigma_noise=float(meta["sigma_noise"]),
        seed=int(meta["seed"]),
        error_kind=meta["error_kind"],
    )
    beta_star = np.array(blocks["beta_star"][0])
    X = np.array(blocks["X"])
    Z = np.array(blocks["Z"])
    y = np.array(blocks["y"][0])
    support = np.flatnonzero(beta_star != 0.0)
    # oracle parameters are analytic functions of (kind, tau)
    p = spec.p
    tau = spec.tau
    kind = spec.kind
    if kind == "additive":
        model: ErrorModel = AdditiveError(sigma_A=tau * tau * np.eye(p))
    elif kind == "multiplicative":
        mu = math.exp(tau * tau / 2.0) * np.ones(p)
        sigma_M = np.zeros((p, p))
        np.fill_diagonal(sigma_M, math.exp(2 * tau * tau) - math.exp(tau * tau))
        model = MultiplicativeError(mu_M=mu, sigma_M=sigma_M)
    else:
        model = MissingError(tau=tau)
    return Dataset(
        X=X, Z=Z, y=y, beta_star=beta_star, support_star=support,
        error_model=model, spec=spec,
    )
