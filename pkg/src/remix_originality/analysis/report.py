"""The four originality / inheritance comparisons and their text and CSV outputs."""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from ..config import RunConfig
from ..corpus import Corpus
from ..corpus.graph import InheritanceClass, classify
from ..errors import EmptyGroup, SingletonCorpus, StatsError, TooFewScores
from ..harmonics import ShapeDescriptor
from ..stats import GroupSummary, WelchResult, mean_interval, summarize, welch_test
from .originality import (
    OriginalityMode,
    OriginalityPartition,
    OriginalityScore,
    partition_by_mean,
    score_designs,
)

logger = logging.getLogger(__name__)

ORIGINALITY = "originality"
INHERITANCE = "inheritance"
OUTCOMES = ("likes", "makes")
PLOT_COLUMNS = ["comparison", "group", "outcome", "n", "mean", "ci_low", "ci_high"]

SIGNIFICANCE = 0.05
P_FLOOR = 2.2e-16

GROUP_LABELS = {
    ORIGINALITY: ("Original", "Imitative"),
    INHERITANCE: (InheritanceClass.INHERITED.value, InheritanceClass.STANDALONE.value),
}
# +1: first group expected higher, -1: expected lower
EXPECTED_DIRECTION = {
    (ORIGINALITY, "likes"): 1,
    (ORIGINALITY, "makes"): -1,
    (INHERITANCE, "likes"): 1,
    (INHERITANCE, "makes"): 1,
}
TITLES = {
    ORIGINALITY: "Originality - Welch Two Sample t-test",
    INHERITANCE: "Inheritance - Welch Two Sample t-test",
}
OUTCOME_NAMES = {"likes": "Popularity (likes)", "makes": "Practicality (makes)"}


@dataclass(frozen=True)
class GroupData:
    label: str
    values: tuple[float, ...]

    @property
    def n(self) -> int:
        return len(self.values)

    def summary(self) -> GroupSummary | None:
        return summarize(self.values) if self.n >= 2 else None


@dataclass
class ComparisonBlock:
    comparison: str
    outcome: str
    groups: tuple[GroupData, GroupData]
    expected_direction: int
    result: WelchResult | None = None
    error: str | None = None

    @property
    def labels(self) -> tuple[str, str]:
        return self.groups[0].label, self.groups[1].label

    @property
    def sizes(self) -> tuple[int, int]:
        return self.groups[0].n, self.groups[1].n

    @property
    def degenerate(self) -> bool:
        return self.result is None

    @property
    def verdict(self) -> str:
        if self.result is None:
            return "degenerate"
        if self.result.p_two_sided >= SIGNIFICANCE or self.result.t == 0.0:
            return "not significant"
        return "supported" if math.copysign(1, self.result.t) == self.expected_direction else "reversed"


@dataclass(frozen=True)
class PlotRow:
    comparison: str
    group: str
    outcome: str
    n: int
    mean: float
    ci_low: float
    ci_high: float


@dataclass
class AnalysisReport:
    blocks: list[ComparisonBlock]
    scores: list[OriginalityScore]
    partition: OriginalityPartition
    classes: dict[str, InheritanceClass]
    mode: str
    metric: str
    transform: str
    confidence: float
    dropped: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def degenerate(self) -> bool:
        return any(block.degenerate for block in self.blocks)

    def block(self, comparison: str, outcome: str) -> ComparisonBlock:
        for block in self.blocks:
            if block.comparison == comparison and block.outcome == outcome:
                return block
        raise KeyError((comparison, outcome))


def _outcome_values(corpus: Corpus, ids: list[str], outcome: str, transform: str) -> tuple[float, ...]:
    raw = np.array([getattr(corpus.graph.record(i), outcome) for i in ids], dtype=np.float64)
    if transform == "log1p":
        raw = np.log1p(raw)
    return tuple(float(v) for v in raw)


def _compare(
    comparison: str, outcome: str, groups: tuple[GroupData, GroupData], confidence: float
) -> ComparisonBlock:
    block = ComparisonBlock(comparison, outcome, groups, EXPECTED_DIRECTION[(comparison, outcome)])
    try:
        for group in groups:
            if group.n < 2:
                raise EmptyGroup(f"{comparison} x {outcome}", group.label, group.n)
        first, second = (group.summary() for group in groups)
        block.result = welch_test(first, second, confidence)
    except (EmptyGroup, StatsError) as exc:
        logger.warning(str(exc))
        block.error = str(exc)
    return block


def run_analysis(
    corpus: Corpus,
    descriptors: Mapping[str, ShapeDescriptor],
    config: RunConfig | None = None,
) -> AnalysisReport:
    """Score, split and test; every block shares one partition and one classification.

    Designs without a descriptor are dropped with a warning. In ``parent-min``
    mode Standalone designs have no score and sit out the originality
    comparisons; the inheritance comparisons still include them.
    """
    config = config or RunConfig()
    warnings: list[str] = []

    ids = sorted(corpus.graph.ids)
    dropped = [i for i in ids if i not in descriptors]
    if dropped:
        message = f"{len(dropped)} design(s) have no descriptor and are excluded: {', '.join(dropped[:10])}"
        if len(dropped) > 10:
            message += ", ..."
        logger.warning(message)
        warnings.append(message)
    kept = [i for i in ids if i in descriptors]
    available = {i: descriptors[i] for i in kept}

    timestamps = {i: ts for i, ts in corpus.graph.timestamps().items() if i in available}
    if not timestamps and config.mode != OriginalityMode.PARENT_MIN.value:
        message = "no design has a timestamp; nearest-neighbor scores compare against all other designs"
        logger.warning(message)
        warnings.append(message)

    scored_ids = kept
    if config.mode == OriginalityMode.PARENT_MIN.value:
        scored_ids = [i for i in kept if any(p in available for p in corpus.graph.parents(i))]
        skipped = len(kept) - len(scored_ids)
        if skipped:
            message = f"parent-min mode: {skipped} design(s) without a described parent are not scored"
            logger.warning(message)
            warnings.append(message)

    scores: list[OriginalityScore] = []
    originality_error = None
    try:
        scoring = score_designs(
            scored_ids,
            available,
            corpus.graph,
            mode=config.mode,
            timestamps=timestamps or None,
            metric=config.metric,
            jobs=config.jobs,
        )
        scores = scoring.scores
        if scoring.earliest_fallbacks:
            message = (
                f"{scoring.earliest_fallbacks} design(s) have no strictly earlier described design; "
                "their nearest-neighbor scores compare against all other designs"
            )
            logger.warning(message)
            warnings.append(message)
        partition = partition_by_mean(scores)
        logger.info(
            f"originality threshold {partition.threshold:.6g}: "
            f"{len(partition.original_ids)} original, {len(partition.imitative_ids)} imitative"
        )
    except (SingletonCorpus, TooFewScores) as exc:
        originality_error = str(exc)
        logger.warning(f"originality comparisons skipped: {exc}")
        warnings.append(f"originality comparisons skipped: {exc}")
        partition = OriginalityPartition(threshold=math.nan, original_ids=(), imitative_ids=())
    classes = classify(corpus.graph)

    inherited = [i for i in kept if classes[i] is InheritanceClass.INHERITED]
    standalone = [i for i in kept if classes[i] is InheritanceClass.STANDALONE]
    memberships = {
        ORIGINALITY: (list(partition.original_ids), list(partition.imitative_ids)),
        INHERITANCE: (inherited, standalone),
    }

    blocks = []
    for comparison in (ORIGINALITY, INHERITANCE):
        first_ids, second_ids = memberships[comparison]
        first_label, second_label = GROUP_LABELS[comparison]
        for outcome in OUTCOMES:
            groups = (
                GroupData(first_label, _outcome_values(corpus, first_ids, outcome, config.transform)),
                GroupData(second_label, _outcome_values(corpus, second_ids, outcome, config.transform)),
            )
            if comparison == ORIGINALITY and originality_error is not None:
                block = ComparisonBlock(comparison, outcome, groups, EXPECTED_DIRECTION[(comparison, outcome)])
                block.error = originality_error
                blocks.append(block)
                continue
            blocks.append(_compare(comparison, outcome, groups, config.confidence))

    return AnalysisReport(
        blocks=blocks,
        scores=scores,
        partition=partition,
        classes={i: classes[i] for i in kept},
        mode=config.mode,
        metric=config.metric,
        transform=config.transform,
        confidence=config.confidence,
        dropped=dropped,
        warnings=warnings,
    )


# ---------------------------------------------------------------------------
# Plot data
# ---------------------------------------------------------------------------


def emit_plot_data(report: AnalysisReport) -> list[PlotRow]:
    """Per-group means with their confidence intervals, the error bars of the figures.

    Groups with fewer than two designs have no interval and are omitted.
    """
    rows: list[PlotRow] = []
    for block in report.blocks:
        for group in block.groups:
            summary = group.summary()
            if summary is None:
                continue
            low, high = mean_interval(summary, report.confidence)
            rows.append(
                PlotRow(
                    comparison=block.comparison,
                    group=group.label,
                    outcome=block.outcome,
                    n=summary.n,
                    mean=summary.mean,
                    ci_low=min(low, summary.mean),
                    ci_high=max(high, summary.mean),
                )
            )
    return rows


def plot_frame(rows: list[PlotRow]) -> pd.DataFrame:
    return pd.DataFrame([vars(row) for row in rows], columns=PLOT_COLUMNS)


def write_plot_data(rows: list[PlotRow], path: str | Path) -> None:
    plot_frame(rows).to_csv(path, index=False, lineterminator="\n", float_format="%.10g")


# ---------------------------------------------------------------------------
# Text report
# ---------------------------------------------------------------------------


def format_p_value(p: float) -> str:
    return f"< {P_FLOOR:.1e}" if p < P_FLOOR else f"{p:.4g}"


def _block_lines(block: ComparisonBlock, confidence: float) -> list[str]:
    first, second = block.labels
    n1, n2 = block.sizes
    sign = ">" if block.expected_direction > 0 else "<"
    lines = [
        f"[{block.comparison} x {block.outcome}] {OUTCOME_NAMES[block.outcome]}: "
        f"{first} (n={n1}) vs {second} (n={n2})",
    ]
    if block.result is None:
        lines.append(f"  degenerate: {block.error}")
        return lines
    result = block.result
    rows = [
        ("t", f"{result.t:.4f}"),
        ("df", f"{result.df:.2f}"),
        ("p-value", format_p_value(result.p_two_sided)),
        (f"{confidence * 100:g}% C.I.", f"[{result.ci_low:.4f}, {result.ci_high:.4f}]"),
        (f"μ ({first})", f"{result.mean_a:.4f}"),
        (f"μ ({second})", f"{result.mean_b:.4f}"),
    ]
    width = max(len(label) for label, _ in rows)
    lines.extend(f"  {label:<{width}}  {value}" for label, value in rows)
    lines.append(f"  verdict: {block.verdict} (expected {first} {sign} {second})")
    return lines


def render_report(report: AnalysisReport) -> str:
    lines = [
        "Remix originality analysis",
        f"mode={report.mode} metric={report.metric} transform={report.transform} "
        f"confidence={report.confidence:g}",
        f"designs scored={len(report.scores)} dropped={len(report.dropped)} "
        f"threshold={report.partition.threshold:.6g} "
        f"original={len(report.partition.original_ids)} imitative={len(report.partition.imitative_ids)}",
    ]
    for comparison in (ORIGINALITY, INHERITANCE):
        lines.extend(["", TITLES[comparison]])
        for block in report.blocks:
            if block.comparison == comparison:
                lines.extend(["", *_block_lines(block, report.confidence)])
    if report.warnings:
        lines.extend(["", "Warnings:", *(f"  - {warning}" for warning in report.warnings)])
    return "\n".join(lines) + "\n"


def write_report(report: AnalysisReport, path: str | Path) -> None:
    Path(path).write_text(render_report(report), encoding="utf-8")
