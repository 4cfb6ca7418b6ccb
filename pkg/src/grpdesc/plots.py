"""Static SVG figures: coefficient paths and cross-validation curves."""
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_SVG_META = {"Date": None}


def plot_path(fit, path):
    """Coefficient paths against lambda (decreasing left to right), one colour per group."""
    fig, ax = plt.subplots(figsize=(6, 4))
    cmap = plt.get_cmap("tab10")
    lam = fit.lambdas
    for k in range(fit.p):
        g = int(fit.group_of[k])
        ax.plot(lam, fit.coefficients[:, k], color=cmap(g % 10), lw=1,
                label=fit.group_labels[g] if k == np.flatnonzero(fit.group_of == g)[0] else None)
    ax.set_xscale("log")
    ax.invert_xaxis()
    ax.axhline(0, color="0.6", lw=0.5)
    ax.set_xlabel(r"$\lambda$")
    ax.set_ylabel(r"$\hat\beta$")
    ax.set_title(fit.family.value)
    if len(fit.group_labels) <= 10:
        ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata=_SVG_META)
    plt.close(fig)


def plot_cv(cv, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.errorbar(cv.lambdas, cv.cve, yerr=cv.cvse, fmt="o", ms=2, lw=0.6, color="tab:red")
    ax.axvline(cv.lambda_min, color="0.5", ls="--", lw=0.8)
    ax.set_xscale("log")
    ax.invert_xaxis()
    ax.set_xlabel(r"$\lambda$")
    ax.set_ylabel(f"cross-validation error ({cv.metric.value})")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata=_SVG_META)
    plt.close(fig)
