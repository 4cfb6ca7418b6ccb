"""Simulation designs and accuracy metrics for comparing the three penalties."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace

import numpy as np
from scipy.interpolate import BSpline

from .cv import cross_validate
from .design import GroupedDesign
from .penalties import Family, PenaltySpec

KINDS = ("basic", "semiparametric", "snp")
DEFAULT_SIZES = {"basic": (100, 100, 4), "semiparametric": (200, 100, 6), "snp": (250, 500, 2)}


@dataclass(frozen=True)
class Scenario:
    """One simulation setting; ``None`` sizes take the per-kind defaults.

    basic: ``n_signal`` leading groups carry coefficients alternating
    +beta, -beta within the group. semiparametric: the first six variables act
    through f1..f6 and every variable gets a ``K``-term cubic B-spline basis.
    snp: genotypes (copies of an allele with frequency ``maf``) coded as two
    indicators; the first three SNPs act dominantly (genotypes 0 and 1 alike),
    recessively (1 and 2 alike) and additively, each scaled to contribute
    variance ``snp_variance``.
    """

    kind: str = "basic"
    n: int | None = None
    J: int | None = None
    K: int | None = None
    beta: float = 1.0
    n_signal: int = 5
    seed: int = 0
    noise_sd: float = 1.0
    maf: float = 0.3
    snp_variance: float = 0.1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        n, J, K = DEFAULT_SIZES[self.kind]
        object.__setattr__(self, "n", n if self.n is None else int(self.n))
        object.__setattr__(self, "J", J if self.J is None else int(self.J))
        object.__setattr__(self, "K", K if self.K is None else int(self.K))
        if self.n < 2 or self.J < 1 or self.K < 1:
            raise ValueError("n must be >= 2 and J, K >= 1")
        if self.kind == "basic" and not 0 <= self.n_signal <= self.J:
            raise ValueError("n_signal must lie in [0, J]")
        if self.kind == "semiparametric" and (self.J < 6 or self.K < 4):
            raise ValueError("semiparametric needs J >= 6 and K >= 4")
        if self.kind == "snp" and (self.J < 3 or self.K != 2 or not 0 < self.maf < 1):
            raise ValueError("snp needs J >= 3, K == 2 and 0 < maf < 1")


@dataclass(frozen=True)
class Truth:
    mean: np.ndarray
    coefficients: np.ndarray | None
    signal_groups: np.ndarray


_E10 = math.exp(-10)
FUNCTIONS = (
    lambda x: 2 * (np.exp(-10 * x) - _E10) / (1 - _E10) - 1,
    lambda x: -2 * (np.exp(-10 * x) - _E10) / (1 - _E10) + 1,
    lambda x: 2 * x - 1,
    lambda x: -2 * x + 1,
    lambda x: 8 * (x - 0.5) ** 2 - 1,
    lambda x: -8 * (x - 0.5) ** 2 + 1,
)


def bspline_basis(x, df=6, degree=3):
    """``df`` cubic B-spline columns on [0, 1], interior knots at sample quantiles."""
    n_interior = df - degree - 1
    if n_interior < 0:
        raise ValueError("df must be at least degree + 1")
    interior = np.quantile(x, np.arange(1, n_interior + 1) / (n_interior + 1))
    knots = np.concatenate([np.zeros(degree + 1), interior, np.ones(degree + 1)])
    return BSpline.design_matrix(np.clip(x, 0.0, 1.0), knots, degree).toarray()


def _labels(J, prefix):
    width = len(str(J))
    return [f"{prefix}{j + 1:0{width}d}" for j in range(J)]


def generate(scenario):
    """Draw one data set; returns (design, truth)."""
    s = scenario
    rng = np.random.default_rng(s.seed)
    if s.kind == "basic":
        p = s.J * s.K
        X = rng.standard_normal((s.n, p))
        coef = np.zeros(p)
        signs = np.where(np.arange(s.K) % 2 == 0, 1.0, -1.0)
        for j in range(s.n_signal):
            coef[j * s.K:(j + 1) * s.K] = s.beta * signs
        mean = X @ coef
        signal = np.arange(s.n_signal) if s.beta != 0 else np.zeros(0, dtype=int)
        groups = np.repeat(_labels(s.J, "G"), s.K)
    elif s.kind == "semiparametric":
        U = rng.uniform(size=(s.n, s.J))
        mean = sum(f(U[:, j]) for j, f in enumerate(FUNCTIONS))
        X = np.hstack([bspline_basis(U[:, j], s.K) for j in range(s.J)])
        coef = None
        signal = np.arange(len(FUNCTIONS))
        groups = np.repeat(_labels(s.J, "X"), s.K)
    else:
        G = rng.binomial(2, s.maf, size=(s.n, s.J))
        X = np.empty((s.n, 2 * s.J))
        X[:, 0::2] = G == 1
        X[:, 1::2] = G == 2
        # dominant: genotypes 0 and 1 share a mean; recessive: 1 and 2 do
        sd_dom = math.sqrt(s.maf ** 2 * (1 - s.maf ** 2))
        q = 1 - (1 - s.maf) ** 2
        sd_rec = math.sqrt(q * (1 - q))
        sd_add = math.sqrt(2 * s.maf * (1 - s.maf))
        b = math.sqrt(s.snp_variance)
        coef = np.zeros(2 * s.J)
        coef[0:2] = 0.0, b / sd_dom
        coef[2:4] = b / sd_rec, b / sd_rec
        coef[4:6] = b / sd_add, 2 * b / sd_add
        mean = X @ coef
        signal = np.arange(3)
        groups = np.repeat(_labels(s.J, "SNP"), 2)
    y = mean + s.noise_sd * rng.standard_normal(s.n)
    names = [f"{g}_{k + 1}" for g, k in zip(groups, np.tile(np.arange(s.K), s.J))]
    design = GroupedDesign.from_arrays(X, y, groups, column_names=names)
    return design, Truth(mean=mean, coefficients=coef, signal_groups=np.asarray(signal))


def oracle_rmse(scenario):
    """sqrt(s / n), s the fraction of nonzero coefficients (basic scenario)."""
    frac = scenario.n_signal / scenario.J if scenario.beta != 0 else 0.0
    return math.sqrt(frac / scenario.n)


def score(fit, index, truth, design):
    """Accuracy of the fit at lambda ``index`` against the generating truth."""
    coef = fit.coefficients[index]
    mu_hat = fit.intercepts[index] + design.X @ coef
    norms = fit.group_norms()[index]
    selected = norms > 0
    signal = np.zeros(len(norms), dtype=bool)
    signal[truth.signal_groups] = True
    rmse = (
        float(np.sqrt(np.mean((truth.coefficients - coef) ** 2)))
        if truth.coefficients is not None else float("nan")
    )
    return {
        "rmse": rmse,
        "rme": float(np.sqrt(np.mean((truth.mean - mu_hat) ** 2))),
        "model_size_groups": int(selected.sum()),
        "true_discoveries": int((selected & signal).sum()),
        "false_discoveries": int((selected & ~signal).sum()),
    }


METRIC_KEYS = ("rmse", "rme", "model_size_groups", "true_discoveries", "false_discoveries")


def run_replicate(scenario, families, folds=5, n_lambda=100, cv_seed=0):
    design, truth = generate(scenario)
    rows = []
    for fam in families:
        spec = fam if isinstance(fam, PenaltySpec) else PenaltySpec(Family(fam))
        cv = cross_validate(design, spec, k=folds, seed=cv_seed, n_lambda=n_lambda)
        row = {"method": spec.family.value, "lambda": cv.lambda_min}
        row.update(score(cv.fit, cv.lambda_min_index, truth, design))
        rows.append(row)
    return rows


def simulate(scenario, families=("grlasso", "grmcp", "grscad"), replicates=100, folds=5,
             n_lambda=100, threads=1):
    """Replicate the scenario; returns (per-replicate rows, per-method summary).

    ``families`` holds family names or PenaltySpec objects (linear loss).

    Replicate r uses data and fold seeds spawned from ``scenario.seed``, so
    results do not depend on ``threads``.
    """
    seqs = np.random.SeedSequence(scenario.seed).spawn(replicates)
    seeds = [tuple(int(x) for x in sq.generate_state(2)) for sq in seqs]

    def one(r):
        data_seed, fold_seed = seeds[r]
        out = run_replicate(replace(scenario, seed=data_seed), families, folds, n_lambda, fold_seed)
        for row in out:
            row["replicate"] = r
        return out

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(one, range(replicates)))
    else:
        chunks = [one(r) for r in range(replicates)]
    rows = [row for chunk in chunks for row in chunk]
    return rows, summarize(rows)


def summarize(rows):
    """Mean and standard error of every metric, per method, in first-seen order."""
    out = []
    for method in dict.fromkeys(r["method"] for r in rows):
        sub = [r for r in rows if r["method"] == method]
        entry = {"method": method, "replicates": len(sub)}
        for key in METRIC_KEYS:
            vals = np.array([r[key] for r in sub], dtype=float)
            entry[key] = float(np.mean(vals))
            entry[f"{key}_se"] = float(np.std(vals, ddof=1) / np.sqrt(len(vals))) if len(vals) > 1 else float("nan")
        out.append(entry)
    return out


def scenario_dict(scenario):
    return asdict(scenario)
