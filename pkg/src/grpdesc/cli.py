"""Command-line interface: fit, cv, predict, simulate, selfcheck.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
Errors are reported as one JSON line on stderr.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import warnings
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import io
from .cv import Metric, cross_validate
from .design import DataError
from .linear import NumericalError
from .path import fit_path
from .penalties import Family, Loss, PenaltySpec

log = logging.getLogger("grpdesc")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3
SUBCOMMANDS = ("fit", "cv", "predict", "simulate", "selfcheck")


class UsageError(Exception):
    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass
class RunConfig:
    subcommand: str
    data: str | None = None
    groups: str | None = None
    response: str | None = None
    model: str | None = None
    loss: str = "linear"
    family: str | None = None
    gamma: float | None = None
    nlambda: int = 100
    min_ratio: float | None = None
    folds: int = 5
    seed: int = 0
    metric: str | None = None
    out: str = "."
    plots: bool = False
    threads: int = 1
    lam: float | None = None
    index: int | None = None
    kind: str = "basic"
    beta: float = 1.0
    replicates: int = 100
    n: int | None = None
    J: int | None = None
    K: int | None = None

    def __post_init__(self):
        if self.family is None:
            self.family = "all" if self.subcommand == "simulate" else "grlasso"

    def validate(self):
        """Reject bad values before any computation; errors name the field."""
        if self.subcommand not in SUBCOMMANDS:
            raise UsageError("subcommand", f"must be one of {SUBCOMMANDS}")
        if self.subcommand in ("fit", "cv"):
            for name in ("data", "groups", "response"):
                if not getattr(self, name):
                    raise UsageError(name, f"required for '{self.subcommand}'")
        if self.subcommand == "predict":
            if not self.model or not self.data:
                raise UsageError("model" if not self.model else "data", "required for 'predict'")
            if (self.lam is None) == (self.index is None):
                raise UsageError("lambda", "give exactly one of --lambda or --index")
        if self.loss not in [x.value for x in Loss]:
            raise UsageError("loss", f"must be one of {[x.value for x in Loss]}")
        allowed = [x.value for x in Family] + (["all"] if self.subcommand == "simulate" else [])
        if self.family not in allowed:
            raise UsageError("family", f"must be one of {allowed}")
        if self.family != "all":
            try:
                PenaltySpec(self.family, self.gamma, loss=self.loss)
            except ValueError as exc:
                raise UsageError("gamma", str(exc)) from None
        if self.nlambda < 2:
            raise UsageError("nlambda", "must be at least 2")
        if self.min_ratio is not None and not 0 < self.min_ratio < 1:
            raise UsageError("min_ratio", "must lie in (0, 1)")
        if self.folds < 2:
            raise UsageError("folds", "must be at least 2")
        if self.metric is not None:
            if self.metric not in [m.value for m in Metric]:
                raise UsageError("metric", f"must be one of {[m.value for m in Metric]}")
            if self.loss == "linear" and self.metric != "rmse":
                raise UsageError("metric", "linear loss supports only 'rmse'")
        if self.threads < 1:
            raise UsageError("threads", "must be at least 1")
        if self.replicates < 1:
            raise UsageError("replicates", "must be at least 1")
        if self.kind not in ("basic", "semiparametric", "snp"):
            raise UsageError("kind", "must be basic, semiparametric or snp")

    @property
    def spec(self):
        return PenaltySpec(self.family, self.gamma, loss=self.loss)


def _out_dir(config):
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_fit(config):
    design = io.load_dataset(config.data, config.groups, config.response)
    fit = fit_path(design, config.spec, n_lambda=config.nlambda, min_ratio=config.min_ratio)
    out = _out_dir(config)
    io.write_artifact(fit, out / "path.json", io.digest_files(config.data, config.groups))
    io.write_coefficients(fit, out / "coefficients.csv")
    if config.plots:
        from .plots import plot_path

        plot_path(fit, out / "path.svg")
    print(f"fit {len(fit)} lambda values; saturated_at={fit.saturated_at}")
    return EXIT_OK


def cmd_cv(config):
    design = io.load_dataset(config.data, config.groups, config.response)
    cv = cross_validate(design, config.spec, k=config.folds, seed=config.seed, metric=config.metric,
                        n_lambda=config.nlambda, min_ratio=config.min_ratio, threads=config.threads)
    out = _out_dir(config)
    rows = ([i, cv.lambdas[i], cv.cve[i], cv.cvse[i], int(i == cv.lambda_min_index)]
            for i in range(len(cv.lambdas)))
    io.write_table(out / "cv.csv", ["index", "lambda", "cve", "cvse", "selected"], rows)
    io.write_artifact(cv.fit, out / "path.json", io.digest_files(config.data, config.groups))
    fit, i = cv.fit, cv.lambda_min_index
    io.write_table(out / "selected.csv", ["term", "coefficient"],
                   [["(Intercept)", fit.intercepts[i]], *zip(fit.column_names, fit.coefficients[i])])
    if config.plots:
        from .plots import plot_cv, plot_path

        plot_cv(cv, out / "cv.svg")
        plot_path(cv.fit, out / "path.svg")
    print(f"lambda_min={float(cv.lambda_min)!r} index={i} cve={float(cv.cve[i])!r} cvse={float(cv.cvse[i])!r}")
    return EXIT_OK


def cmd_predict(config):
    fit = io.read_artifact(config.model)
    header, values = io.read_table(config.data)
    missing = [c for c in fit.column_names if c not in header]
    if missing:
        raise DataError(f"{config.data}: column '{missing[0]}' required by the model is absent")
    X = values[:, [header.index(c) for c in fit.column_names]]
    if config.index is not None:
        if not 0 <= config.index < len(fit):
            raise UsageError("index", f"must lie in [0, {len(fit) - 1}]")
        i = config.index
    else:
        i = int(np.argmin(np.abs(np.log(fit.lambdas) - np.log(config.lam))))
        if not np.isclose(fit.lambdas[i], config.lam, rtol=1e-8):
            log.warning("lambda %g not on the grid; using nearest %r", config.lam, float(fit.lambdas[i]))
    pred = fit.predict(X, i)
    out = _out_dir(config)
    io.write_table(out / "predictions.csv", ["row", "prediction"], enumerate(pred))
    print(f"predicted {len(pred)} rows at lambda={float(fit.lambdas[i])!r} (index {i})")
    return EXIT_OK


def cmd_simulate(config):
    from .sim import METRIC_KEYS, Scenario, oracle_rmse, simulate

    scenario = Scenario(config.kind, n=config.n, J=config.J, K=config.K, beta=config.beta, seed=config.seed)
    fams = [f.value for f in Family] if config.family == "all" else [PenaltySpec(config.family, config.gamma)]
    rows, summary = simulate(scenario, fams, replicates=config.replicates, folds=config.folds,
                             n_lambda=config.nlambda, threads=config.threads)
    out = _out_dir(config)
    cols = ["replicate", "method", "lambda", *METRIC_KEYS]
    io.write_table(out / "replicates.csv", cols, ([r[c] for c in cols] for r in rows))
    scols = ["method", "replicates"] + [k for key in METRIC_KEYS for k in (key, f"{key}_se")]
    io.write_table(out / "summary.csv", scols, ([s[c] for c in scols] for s in summary))
    for s in summary:
        print(f"{s['method']:8s} rmse={s['rmse']:.4f} rme={s['rme']:.4f} "
              f"groups={s['model_size_groups']:.2f} true={s['true_discoveries']:.2f} "
              f"false={s['false_discoveries']:.2f}")
    if config.kind == "basic":
        print(f"oracle rmse={oracle_rmse(scenario):.4f}")
    return EXIT_OK


def cmd_selfcheck(config):
    from .selfcheck import run_selfcheck

    ok = run_selfcheck(seed=config.seed, out=sys.stdout)
    return EXIT_OK if ok else EXIT_NUMERIC


COMMANDS = {"fit": cmd_fit, "cv": cmd_cv, "predict": cmd_predict,
            "simulate": cmd_simulate, "selfcheck": cmd_selfcheck}


def run(config):
    config.validate()
    return COMMANDS[config.subcommand](config)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError("arguments", message)


def build_parser():
    parser = _Parser(prog="grpdesc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--data")
        p.add_argument("--groups")
        p.add_argument("--response")
        p.add_argument("--loss", default="linear", choices=[x.value for x in Loss])
        p.add_argument("--family", default=None)
        p.add_argument("--gamma", type=float)
        p.add_argument("--nlambda", type=int, default=100)
        p.add_argument("--min-ratio", dest="min_ratio", type=float)
        p.add_argument("--folds", type=int, default=5)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--metric")
        p.add_argument("--out", default=".")
        p.add_argument("--plots", action="store_true")
        p.add_argument("--threads", type=int, default=os.cpu_count() or 1)

    for name in ("fit", "cv", "selfcheck"):
        common(sub.add_parser(name))
    p = sub.add_parser("predict")
    common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--index", type=int)
    p = sub.add_parser("simulate")
    common(p)
    p.add_argument("--kind", default="basic")
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--replicates", type=int, default=100)
    p.add_argument("--n", type=int)
    p.add_argument("--J", type=int)
    p.add_argument("--K", type=int)
    return parser


def _fail(kind, message, code):
    sys.stderr.write(json.dumps({"error": kind, "message": " ".join(str(message).split()), "exit": code}) + "\n")
    return code


def main(argv=None):
    logging.basicConfig(level=os.environ.get("GRPDESC_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    logging.captureWarnings(True)
    try:
        args = build_parser().parse_args(argv)
        known = {f.name for f in fields(RunConfig)}
        config = RunConfig(**{k: v for k, v in vars(args).items() if k in known})
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return run(config)
    except UsageError as exc:
        return _fail("usage", exc, EXIT_USAGE)
    except DataError as exc:
        return _fail("data", exc, EXIT_DATA)
    except NumericalError as exc:
        return _fail("numerical", exc, EXIT_NUMERIC)
    except ValueError as exc:
        return _fail("data", exc, EXIT_DATA)


if __name__ == "__main__":
    sys.exit(main())
