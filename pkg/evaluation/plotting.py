"""Static SVG trade-off plots: sweep points, the pareto polyline and the two dashed extrapolation anchors."""

from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from evaluation.metrics import coordinates  # noqa: E402

SVG_SALT = "sanitizer-tradeoff"


def plot_tradeoff(points: Sequence, front: Sequence, chance_leakage: float, chance_utility: float, path) -> None:
    coords = [coordinates(p) for p in points]
    curve = [(chance_leakage, chance_utility)] + sorted(coordinates(p) for p in front)
    top = max((u for _, u in curve[1:]), default=chance_utility)
    curve.append((1.0, top))

    with plt.rc_context({"svg.hashsalt": SVG_SALT, "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(5, 4))
        if coords:
            ax.plot([x for x, _ in coords], [y for _, y in coords], linestyle="none", marker="o",
                    color="tab:blue", alpha=0.7, label="sweep points", gid="tradeoff-points")
        if len(curve) > 2:
            ax.plot([x for x, _ in curve[1:-1]], [y for _, y in curve[1:-1]], color="tab:red",
                    label="pareto front", gid="pareto-front")
        for i, segment in enumerate((curve[:2], curve[-2:])):
            ax.plot([segment[0][0], segment[1][0]], [segment[0][1], segment[1][1]], linestyle="--",
                    color="tab:red", alpha=0.6, gid=f"anchor-{i}")
        ax.set_xlabel("attacker accuracy (leakage)")
        ax.set_ylabel("utility accuracy")
        ax.set_xlim(min([chance_leakage] + [x for x, _ in coords]) - 0.02, 1.02)
        ax.set_ylim(-0.02, 1.02)
        ax.legend(loc="lower right", fontsize="small")
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
