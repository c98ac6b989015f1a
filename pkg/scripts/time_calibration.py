#!/usr/bin/env python3
"""Time the one-eigendecomposition calibration against the iterative
max-norm nearest-PD calibration on additive-noise surrogates.

Usage:
    python3 scripts/time_calibration.py [--dims 500 1000] [--n 100]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from caznrls import baselines
from caznrls.calibration import calibrate, default_eps_hat
from caznrls.surrogate import AdditiveError, build_surrogate


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dims", type=int, nargs="+", default=[500, 1000])
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--tau", type=float, default=1.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    print(f"{'p':>6}{'eigh (s)':>12}{'admm (s)':>12}{'ratio':>9}{'iters':>7}")
    for p in args.dims:
        X = rng.standard_normal((args.n, p))
        Z = X + args.tau * rng.standard_normal((args.n, p))
        beta = np.zeros(p)
        beta[[0, 1, 4]] = [3.0, 1.5, 2.0]
        y = X @ beta + 0.5 * rng.standard_normal(args.n)
        pair = build_surrogate(
            Z, y, AdditiveError(args.tau**2 * np.eye(p))
        )
        eps = default_eps_hat(pair.sigma_hat)

        t0 = time.perf_counter()
        calibrate(pair, eps)
        t_cal = time.perf_counter() - t0

        t0 = time.perf_counter()
        _, diag = baselines.nearest_pd_maxnorm(
            pair.sigma_hat, eps, baselines.AdmmParams(mu=0.05)
        )
        t_admm = time.perf_counter() - t0
        print(f"{p:>6}{t_cal:>12.3f}{t_admm:>12.3f}"
              f"{t_cal / t_admm:>9.1%}{diag.iters:>7d}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
