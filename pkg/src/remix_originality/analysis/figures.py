"""
Error-bar figures for the originality and inheritance comparisons.

One figure per comparison, two panels (likes, makes), each bar a group mean
with its confidence interval. Needs the optional ``plot`` extra.
"""

from __future__ import annotations

import logging
from pathlib import Path

from .report import INHERITANCE, ORIGINALITY, OUTCOME_NAMES, OUTCOMES, AnalysisReport, emit_plot_data

logger = logging.getLogger(__name__)

GROUP_COLORS = {
    "Original": "#2196F3",  # Blue
    "Imitative": "#9E9E9E",  # Gray
    "Inherited": "#4CAF50",  # Green
    "Standalone": "#FF9800",  # Orange
}


def render_figures(report: AnalysisReport, out_dir: str | Path, fmt: str = "png") -> list[Path]:
    """
    Draw ``originality.<fmt>`` and ``inheritance.<fmt>`` under ``out_dir``.

    Args:
        report: Result of ``run_analysis``
        out_dir: Directory to write into (created if missing)
        fmt: Any file format matplotlib can save

    Returns:
        Paths of the written figures
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = emit_plot_data(report)
    written: list[Path] = []

    for comparison in (ORIGINALITY, INHERITANCE):
        fig, axes = plt.subplots(1, len(OUTCOMES), figsize=(8, 4))
        for ax, outcome in zip(axes, OUTCOMES, strict=True):
            panel = [row for row in rows if row.comparison == comparison and row.outcome == outcome]
            labels = [row.group for row in panel]
            means = [row.mean for row in panel]
            errors = [[row.mean - row.ci_low for row in panel], [row.ci_high - row.mean for row in panel]]
            ax.bar(
                labels,
                means,
                yerr=errors,
                capsize=6,
                color=[GROUP_COLORS.get(label, "#9E9E9E") for label in labels],
                edgecolor="black",
                linewidth=0.8,
            )
            ax.set_title(OUTCOME_NAMES[outcome])
            ax.set_ylabel(f"mean {outcome}")
            ax.grid(axis="y", alpha=0.3)
        fig.suptitle(
            f"{comparison.capitalize()}: error bars show {report.confidence * 100:g}% confidence intervals"
        )
        fig.tight_layout()
        path = out / f"{comparison}.{fmt}"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        logger.info(f"wrote {path}")
        written.append(path)
    return written
