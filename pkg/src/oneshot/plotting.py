"""Figures written next to the delimited report files."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

# fixed metadata keeps re-rendered PNGs byte-identical
_PNG_METADATA = {"Software": None}


def _style(ax):
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.grid(True, which="major", alpha=0.3)
    for side in ("top", "right"):
        ax.spines[side].set_visible(False)


def regret_vs_budget(rows, path, title=None, width=6.4):
    """Median regret against budget, one line per method, with a quantile band.

    ``rows`` are summary records carrying ``budget``, ``method``, ``median``,
    ``q_low`` and ``q_high``.
    """
    fig, ax = plt.subplots(figsize=(width, width * 0.62))
    methods = list(dict.fromkeys(r["method"] for r in rows))
    for name in methods:
        pts = sorted((r for r in rows if r["method"] == name), key=lambda r: r["budget"])
        x = [r["budget"] for r in pts]
        (line,) = ax.plot(x, [max(r["median"], 1e-300) for r in pts], marker="o", ms=3, lw=1.2,
                          label=name)
        ax.fill_between(x, [max(r["q_low"], 1e-300) for r in pts],
                        [max(r["q_high"], 1e-300) for r in pts],
                        color=line.get_color(), alpha=0.12, lw=0)
    _style(ax)
    ax.set_xlabel("budget")
    ax.set_ylabel("simple regret")
    if title:
        ax.set_title(title, fontsize=10)
    ax.legend(fontsize=6, frameon=False, ncol=2)
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_PNG_METADATA)
    plt.close(fig)
    return path
