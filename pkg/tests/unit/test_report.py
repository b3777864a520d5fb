"""Tests for the four comparisons, plot data and the text report."""

import math

import pandas as pd
import pytest

from remix_originality.analysis import emit_plot_data, render_report, run_analysis, write_plot_data
from remix_originality.analysis.report import PLOT_COLUMNS, format_p_value
from remix_originality.config import RunConfig
from remix_originality.corpus import corpus_from_records
from tests.conftest import record, scalar_descriptor

NEAREST = RunConfig(mode="nearest-neighbor")


def _clear_signal_corpus():
    """Ten clustered designs with low likes and high makes, four outliers the other way round."""
    records, descriptors = [], {}
    for i in range(10):
        parents = ["d0"] if 1 <= i <= 5 else []
        records.append(record(f"d{i}", parents=parents, likes=10 + i, makes=5 + i % 2))
        descriptors[f"d{i}"] = scalar_descriptor(0.1 * i)
    for j, value in enumerate([10.0, 20.0, 30.0, 40.0]):
        records.append(record(f"o{j}", likes=50 + 2 * j, makes=j % 2))
        descriptors[f"o{j}"] = scalar_descriptor(value)
    return corpus_from_records(records), descriptors


class TestRunAnalysis:
    def test_blocks_in_fixed_order(self):
        corpus, descriptors = _clear_signal_corpus()

        report = run_analysis(corpus, descriptors, NEAREST)

        assert [(b.comparison, b.outcome) for b in report.blocks] == [
            ("originality", "likes"),
            ("originality", "makes"),
            ("inheritance", "likes"),
            ("inheritance", "makes"),
        ]
        assert report.block("originality", "likes").labels == ("Original", "Imitative")
        assert report.block("inheritance", "makes").labels == ("Inherited", "Standalone")

    def test_partition_and_verdicts(self):
        corpus, descriptors = _clear_signal_corpus()

        report = run_analysis(corpus, descriptors, NEAREST)

        assert report.partition.original_ids == ("o0", "o1", "o2", "o3")
        assert report.block("originality", "likes").sizes == (4, 10)
        assert report.block("inheritance", "likes").sizes == (5, 9)
        assert report.block("originality", "likes").verdict == "supported"
        assert report.block("originality", "makes").verdict == "supported"
        assert report.block("originality", "makes").result.t < 0
        assert not report.degenerate

    def test_missing_timestamps_are_reported(self):
        corpus, descriptors = _clear_signal_corpus()

        report = run_analysis(corpus, descriptors, NEAREST)

        assert any("timestamp" in warning for warning in report.warnings)

    def test_designs_without_descriptors_are_dropped(self):
        corpus, descriptors = _clear_signal_corpus()
        del descriptors["d9"]

        report = run_analysis(corpus, descriptors, NEAREST)

        assert report.dropped == ["d9"]
        assert "d9" not in report.classes
        assert sum(report.block("inheritance", "likes").sizes) == 13

    def test_all_inherited_degrades_only_the_inheritance_blocks(self):
        records = [record("root")]
        records += [record(f"c{i}", parents=["root"], likes=i, makes=i % 3) for i in range(6)]
        corpus = corpus_from_records(records)
        descriptors = {f"c{i}": scalar_descriptor(value) for i, value in enumerate([0, 1, 2, 3, 50, 100])}

        report = run_analysis(corpus, descriptors)

        assert report.degenerate
        assert report.block("inheritance", "likes").degenerate
        assert report.block("inheritance", "makes").degenerate
        assert "Standalone" in report.block("inheritance", "likes").error
        assert not report.block("originality", "likes").degenerate
        assert report.partition.original_ids == ("c4", "c5")

    def test_zero_variance_in_both_groups(self):
        records = [record(f"d{i}", likes=i, makes=0) for i in range(6)]
        corpus = corpus_from_records(records)
        descriptors = {f"d{i}": scalar_descriptor(value) for i, value in enumerate([0, 1, 2, 3, 50, 100])}

        report = run_analysis(corpus, descriptors, NEAREST)

        assert report.block("originality", "makes").verdict == "degenerate"
        assert not report.block("originality", "likes").degenerate

    def test_parent_min_scores_only_inherited_designs(self):
        corpus, descriptors = _clear_signal_corpus()

        report = run_analysis(corpus, descriptors, RunConfig(mode="parent-min"))

        assert sorted(s.design_id for s in report.scores) == ["d1", "d2", "d3", "d4", "d5"]
        assert any("parent-min" in warning for warning in report.warnings)
        assert report.block("inheritance", "likes").sizes == (5, 9)

    def test_parent_min_with_one_scored_design_keeps_the_inheritance_blocks(self):
        records = [record(f"s{i}", likes=i, makes=i % 2) for i in range(6)]
        records += [
            record("x"),
            record("c0", parents=["s0"], likes=9, makes=1),
            record("c1", parents=["x"], likes=12, makes=3),
        ]
        descriptors = {f"s{i}": scalar_descriptor(i) for i in range(6)}
        descriptors.update(c0=scalar_descriptor(0.5), c1=scalar_descriptor(7.0))

        report = run_analysis(corpus_from_records(records), descriptors, RunConfig(mode="parent-min"))

        assert report.degenerate
        assert [s.design_id for s in report.scores] == ["c0"]
        assert report.partition.original_ids == () and report.partition.imitative_ids == ()
        for outcome in ("likes", "makes"):
            assert "at least 2 scores" in report.block("originality", outcome).error
            assert not report.block("inheritance", outcome).degenerate
        assert report.block("inheritance", "likes").sizes == (2, 6)
        assert "originality comparisons skipped" in render_report(report)

    def test_single_described_design_degrades_without_raising(self):
        corpus = corpus_from_records([record("a", likes=1), record("b", likes=2)])

        report = run_analysis(corpus, {"a": scalar_descriptor(1.0)}, NEAREST)

        assert report.scores == []
        assert all(block.degenerate for block in report.blocks)

    def test_earliest_designs_are_counted_once_in_warnings(self):
        records = [record(f"d{i}", likes=i, makes=i % 2, timestamp=100 + i) for i in range(6)]
        records.append(record("e", likes=3, makes=1, timestamp=100))
        descriptors = {f"d{i}": scalar_descriptor(float(i)) for i in range(6)}
        descriptors["e"] = scalar_descriptor(2.5)

        report = run_analysis(corpus_from_records(records), descriptors, NEAREST)

        fallback = [w for w in report.warnings if "no strictly earlier" in w]
        assert fallback == [
            "2 design(s) have no strictly earlier described design; "
            "their nearest-neighbor scores compare against all other designs"
        ]
        assert not any("no design has a timestamp" in w for w in report.warnings)

    def test_log1p_transform(self):
        corpus, descriptors = _clear_signal_corpus()

        report = run_analysis(corpus, descriptors, RunConfig(mode="nearest-neighbor", transform="log1p"))

        original = report.block("originality", "likes").groups[0]
        assert list(original.values) == pytest.approx([math.log1p(v) for v in (50, 52, 54, 56)])

    def test_repeat_runs_are_identical(self):
        corpus, descriptors = _clear_signal_corpus()

        first = render_report(run_analysis(corpus, descriptors, RunConfig(jobs=1)))
        second = render_report(run_analysis(corpus, descriptors, RunConfig(jobs=3)))

        assert first == second


class TestPlotData:
    def test_intervals_contain_the_means(self):
        corpus, descriptors = _clear_signal_corpus()

        rows = emit_plot_data(run_analysis(corpus, descriptors, NEAREST))

        assert len(rows) == 8
        for row in rows:
            assert row.n >= 2
            assert row.ci_low <= row.mean <= row.ci_high

    def test_csv_columns(self, tmp_path):
        corpus, descriptors = _clear_signal_corpus()
        path = tmp_path / "plot.csv"

        write_plot_data(emit_plot_data(run_analysis(corpus, descriptors, NEAREST)), path)
        frame = pd.read_csv(path)

        assert list(frame.columns) == PLOT_COLUMNS
        assert frame.loc[0, "group"] == "Original"
        assert frame.loc[0, "mean"] == pytest.approx(53.0)

    def test_groups_below_two_are_skipped(self):
        records = [record("root")]
        records += [record(f"c{i}", parents=["root"], likes=i) for i in range(6)]
        descriptors = {f"c{i}": scalar_descriptor(value) for i, value in enumerate([0, 1, 2, 3, 50, 100])}

        rows = emit_plot_data(run_analysis(corpus_from_records(records), descriptors))

        assert {(row.comparison, row.group) for row in rows} == {
            ("originality", "Original"),
            ("originality", "Imitative"),
            ("inheritance", "Inherited"),
        }


class TestRenderReport:
    def test_layout(self):
        corpus, descriptors = _clear_signal_corpus()

        text = render_report(run_analysis(corpus, descriptors, NEAREST))

        assert text.index("Originality - Welch Two Sample t-test") < text.index("Inheritance - Welch Two Sample t-test")
        assert "[originality x likes] Popularity (likes): Original (n=4) vs Imitative (n=10)" in text
        for label in ("t ", "df ", "p-value", "95% C.I.", "μ (Original)", "μ (Imitative)"):
            assert label in text
        assert "verdict: supported (expected Original < Imitative)" in text

    def test_degenerate_block_is_labelled(self):
        records = [record("root")]
        records += [record(f"c{i}", parents=["root"], likes=i) for i in range(6)]
        descriptors = {f"c{i}": scalar_descriptor(value) for i, value in enumerate([0, 1, 2, 3, 50, 100])}

        text = render_report(run_analysis(corpus_from_records(records), descriptors))

        assert "degenerate:" in text

    @pytest.mark.parametrize(("p", "expected"), [(1e-20, "< 2.2e-16"), (0.04213, "0.04213"), (0.5, "0.5")])
    def test_p_value_format(self, p, expected):
        assert format_p_value(p) == expected
