from .originality import (
    DescriptorIndex,
    OriginalityMode,
    OriginalityPartition,
    OriginalityScore,
    ScoringResult,
    originality_score,
    partition_agreement,
    partition_by_mean,
    score_designs,
)
from .report import (
    AnalysisReport,
    ComparisonBlock,
    PlotRow,
    emit_plot_data,
    render_report,
    run_analysis,
    write_plot_data,
    write_report,
)

__all__ = [
    "AnalysisReport",
    "ComparisonBlock",
    "DescriptorIndex",
    "OriginalityMode",
    "OriginalityPartition",
    "OriginalityScore",
    "PlotRow",
    "ScoringResult",
    "emit_plot_data",
    "originality_score",
    "partition_agreement",
    "partition_by_mean",
    "render_report",
    "run_analysis",
    "score_designs",
    "write_plot_data",
    "write_report",
]
