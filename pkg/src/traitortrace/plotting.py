"""Static SVG export of ROC overlays.

Uses the Agg backend and strips volatile SVG metadata (creation date,
hashed ids) so identical runs produce identical files.
"""

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "traitortrace"

import matplotlib.pyplot as plt

_COLORS = {"tardos": "tab:red", "informed": "tab:green", "map": "tab:blue"}


def roc_figure(curves, path, title=None, loglog=False):
    """Overlay (label, RocCurve) pairs as pfn-vs-pfa and write an SVG.

    With loglog=True, zero-probability points are dropped to keep the axes
    finite.
    """
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for label, curve in curves:
        pfa, pfn = curve.pfa, curve.pfn
        color = _COLORS.get(label.split()[0], None)
        if loglog:
            mask = (pfa > 0) & (pfn > 0)
            ax.loglog(pfa[mask], pfn[mask], label=label, color=color)
        else:
            ax.plot(pfa, pfn, label=label, color=color)
    ax.set_xlabel("probability of false alarm")
    ax.set_ylabel("probability of false negative")
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(loc="best")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
