"""Command-line driver: simulate, fit, experiment, cv, diagnose."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

import numpy as np
import yaml

from . import baselines, diagnostics, experiment, gep
from .calibration import calibrate, default_eps_hat
from .simulation import ScenarioSpec, load_dataset, make_dataset, save_dataset
from .surrogate import build_surrogate

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_PARTIAL = 2


def _scenario_from_args(args) -> ScenarioSpec:
    return ScenarioSpec(
        example_id=args.example,
        p=args.p,
        alpha=args.alpha,
        n=args.n,
        tau=args.tau,
        sigma_noise=args.sigma,
        seed=args.seed,
        error_kind=args.error_kind,
    )


def _add_scenario_flags(sp):
    sp.add_argument("--example", required=True, choices=list(
        ("ex1", "ex2", "ex3", "ex4", "ex5", "ex6", "ex7", "ex8", "fixed52")))
    sp.add_argument("--p", type=int, default=250)
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--tau", type=float, required=True)
    sp.add_argument("--sigma", type=float, default=0.5)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--error-kind", dest="error_kind", default=None,
                    choices=["additive", "multiplicative", "missing"])


def _load_config_file(path) -> dict:
    with open(path, encoding="utf-8") as f:
        data = yaml.safe_load(f) or {}
    if not isinstance(data, dict):
        raise ValueError("config file must hold a mapping")
    return data


def _experiment_config(args, scenarios) -> experiment.ExperimentConfig:
    overrides = _load_config_file(args.config) if args.config else {}
    cv_kwargs = overrides.get("cv", {})
    if "alpha_grid" in cv_kwargs:
        cv_kwargs["alpha_grid"] = tuple(cv_kwargs["alpha_grid"])
    cfg = experiment.ExperimentConfig(
        scenarios=tuple(scenarios),
        methods=tuple(args.methods.split(",")) if args.methods
        else experiment.METHODS,
        replications=args.reps,
        rep_offset=getattr(args, "rep_offset", 0),
        base_seed=args.base_seed,
        cv=experiment.CvConfig(**cv_kwargs),
        eps_hat=overrides.get("eps_hat"),
        diagnostics=args.diagnostics,
        jobs=args.jobs,
    )
    return cfg


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="caznrls",
        description="Calibrated zero-norm regularized LS for corrupted data",
    )
    sub = ap.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("simulate", help="generate one dataset file")
    _add_scenario_flags(sp)
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("fit", help="fit one method on a dataset file")
    sp.add_argument("--data", required=True)
    sp.add_argument("--method", default="caznrls",
                    choices=list(experiment.METHODS))
    sp.add_argument("--lam", type=float, default=None,
                    help="penalty level; default uses corrected CV")
    sp.add_argument("--out", default=None)
    sp.add_argument("--config", default=None)

    sp = sub.add_parser("cv", help="corrected cross-validation tuning only")
    sp.add_argument("--data", required=True)
    sp.add_argument("--method", default="caznrls",
                    choices=["caznrls", "cocolasso"])
    sp.add_argument("--config", default=None)

    sp = sub.add_parser("diagnose", help="theory report for a dataset file")
    sp.add_argument("--data", required=True)
    sp.add_argument("--lam", type=float, default=0.1)
    sp.add_argument("--rec-samples", type=int, default=0,
                    help="cone samples for the REC estimate (0 = skip)")

    sp = sub.add_parser("experiment", help="full scenario sweep")
    _add_scenario_flags(sp)
    sp.add_argument("--reps", type=int, default=100)
    sp.add_argument("--rep-offset", dest="rep_offset", type=int, default=0)
    sp.add_argument("--base-seed", dest="base_seed", type=int, default=0)
    sp.add_argument("--methods", default=None,
                    help="comma-separated subset of caznrls,cocolasso,ncl")
    sp.add_argument("--out", required=True, help="output prefix for CSV files")
    sp.add_argument("--config", default=None)
    sp.add_argument("--diagnostics", action="store_true")
    sp.add_argument("--jobs", type=int, default=1)

    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK

    try:
        return _dispatch(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def _dispatch(args) -> int:
    if args.cmd == "simulate":
        ds = make_dataset(_scenario_from_args(args))
        save_dataset(ds, args.out)
        print(f"wrote {args.out}")
        return EXIT_OK

    if args.cmd in ("fit", "cv", "diagnose"):
        ds = load_dataset(args.data)
        pair = build_surrogate(ds.Z, ds.y, ds.error_model)

    if args.cmd == "cv":
        cfg = experiment.ExperimentConfig(scenarios=(ds.spec,))
        if args.config:
            over = _load_config_file(args.config)
            if "eps_hat" in over:
                cfg = replace(cfg, eps_hat=over["eps_hat"])
        alpha_star, lam = experiment.corrected_cv(
            ds.Z, ds.y, ds.error_model, args.method, cfg
        )
        print(f"alpha_star={alpha_star} lambda={lam:.6g}")
        return EXIT_OK

    if args.cmd == "fit":
        cfg = experiment.ExperimentConfig(scenarios=(ds.spec,))
        if args.lam is None and args.method != "ncl":
            _, lam = experiment.corrected_cv(
                ds.Z, ds.y, ds.error_model, args.method, cfg
            )
        else:
            lam = args.lam
        if args.method == "ncl":
            radius = float(np.sum(np.abs(ds.beta_star)))
            beta = baselines.ncl_fit(pair, replace(cfg.ncl, radius=radius))
        elif args.method == "cocolasso":
            eps = cfg.eps_hat or default_eps_hat(pair.sigma_hat)
            beta = baselines.cocolasso_fit(pair, eps, lam, cfg.admm, cfg.alm)
        else:
            beta, _ = experiment._fit_caznrls(pair, lam, cfg)
        rmse, nc, nic, nnz = experiment.metrics(beta, ds.beta_star)
        print(f"rmse_rel={rmse:.6g} nc={nc} nic={nic} nnz={nnz}")
        if args.out:
            np.savetxt(args.out, beta)
            print(f"wrote {args.out}")
        return EXIT_OK

    if args.cmd == "diagnose":
        eps = default_eps_hat(pair.sigma_hat)
        cal = calibrate(pair, eps)
        kappa = None
        if args.rec_samples > 0:
            rng = np.random.default_rng(ds.spec.seed)
            kappa = diagnostics.rec_estimate(
                ds.X.T @ ds.X / ds.X.shape[0], ds.support_star,
                len(ds.support_star), args.rec_samples, rng,
            )
        rep = diagnostics.theory_report(ds, pair, cal, args.lam, kappa)
        print(f"d_max={rep.d_max:.6g}")
        print(f"eps_tilde_inf={rep.eps_tilde_inf:.6g}")
        print(f"eps_ls_inf={rep.eps_ls_inf:.6g}")
        print(f"irrepresentable_norm={rep.irrepresentable_norm:.6g}")
        if rep.kappa_hat is not None:
            print(f"kappa_hat={rep.kappa_hat:.6g} (sampled, not a certificate)")
        if rep.bound_thm2 is not None:
            print(f"bound_thm2={rep.bound_thm2:.6g}")
        return EXIT_OK

    if args.cmd == "experiment":
        scen = _scenario_from_args(args)
        cfg = _experiment_config(args, [scen])
        records = experiment.run_experiment(cfg)
        rows = experiment.aggregate(records)
        experiment.write_records_csv(records, f"{args.out}_records.csv", cfg)
        experiment.write_aggregate_csv(rows, f"{args.out}_aggregate.csv", cfg)
        experiment.write_plotdata_csv(rows, f"{args.out}_plotdata.csv", cfg)
        failures = sum(1 for r in records if not np.isfinite(r.rmse_rel))
        print(f"wrote {args.out}_{{records,aggregate,plotdata}}.csv "
              f"({len(records)} records, {failures} failed)")
        return EXIT_PARTIAL if failures else EXIT_OK

    raise AssertionError(args.cmd)


if __name__ == "__main__":
    raise SystemExit(main())
