"""RMSE and model size against effect magnitude for the basic design.

    python3 scripts/basic_simulation.py --replicates 100 --out results/basic
"""
import argparse
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from grpdesc.io import write_table  # noqa: E402
from grpdesc.sim import Scenario, oracle_rmse, simulate  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--betas", type=float, nargs="+", default=[0.25, 0.5, 0.75, 1.0, 1.5, 2.0])
    ap.add_argument("--replicates", type=int, default=100)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--out", default="results/basic")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    rows = []
    for beta in args.betas:
        scenario = Scenario("basic", beta=beta, seed=args.seed)
        _, summary = simulate(scenario, replicates=args.replicates, threads=args.threads)
        for s in summary:
            rows.append([beta, s["method"], s["rmse"], s["rmse_se"], s["model_size_groups"],
                         s["model_size_groups_se"], oracle_rmse(scenario)])
            print(f"beta={beta:<5} {s['method']:8s} rmse={s['rmse']:.4f} groups={s['model_size_groups']:.2f}")
    cols = ["beta", "method", "rmse", "rmse_se", "groups", "groups_se", "oracle_rmse"]
    write_table(out / "basic_summary.csv", cols, rows)

    fig, axes = plt.subplots(1, 2, figsize=(9, 3.5))
    for method in dict.fromkeys(r[1] for r in rows):
        sub = np.array([[r[0], r[2], r[4]] for r in rows if r[1] == method])
        axes[0].plot(sub[:, 0], sub[:, 1], marker="o", label=method)
        axes[1].plot(sub[:, 0], sub[:, 2], marker="o", label=method)
    axes[0].axhline(rows[0][6], color="0.5", ls="--", lw=0.8, label="oracle")
    axes[0].set_xlabel(r"$|\beta|$")
    axes[0].set_ylabel("RMSE")
    axes[1].set_xlabel(r"$|\beta|$")
    axes[1].set_ylabel("groups selected")
    axes[0].legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(out / "basic_rmse.svg", metadata={"Date": None})


if __name__ == "__main__":
    main()
