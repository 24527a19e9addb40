"""Campaign figures rendered headlessly next to the delimited output."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .pipeline import SuiteResult

__all__ = ["save_convergence_figure", "save_quality_figure"]


def save_convergence_figure(suite: SuiteResult, path) -> bool:
    """Mean best-so-far trajectory per iterative variant; False if none exist."""
    curve_results = [res for res in suite.results if res.curves is not None]
    if not curve_results:
        return False
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for res in curve_results:
        mean = res.curves.reshape(-1, res.curves.shape[-1]).mean(axis=0)
        ax.plot(np.arange(1, mean.shape[0] + 1), mean, marker=".", label=res.spec.name)
    ax.set_xlabel("iteration")
    ax.set_ylabel("mean best-so-far (normalized objective)")
    ax.set_ylim(top=1.02)
    ax.grid(True, alpha=0.3)
    ax.legend(loc="lower right", fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return True


def save_quality_figure(suite: SuiteResult, path) -> bool:
    """Final-quality bars per variant with min–max whiskers; False if empty."""
    if not suite.results:
        return False
    names = [res.spec.name for res in suite.results]
    aggs = [res.aggregate() for res in suite.results]
    means = np.array([a["mean"] for a in aggs])
    lows = means - np.array([a["min"] for a in aggs])
    highs = np.array([a["max"] for a in aggs]) - means
    fig, ax = plt.subplots(figsize=(max(5.0, 1.1 * len(names) + 2.0), 4.0))
    xs = np.arange(len(names))
    ax.bar(xs, means, yerr=np.vstack([lows, highs]), capsize=4, color="#4878a8")
    ax.set_xticks(xs)
    ax.set_xticklabels(names, rotation=20, ha="right", fontsize="small")
    ax.set_ylabel("final normalized objective")
    ax.set_ylim(0.0, 1.05)
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return True
