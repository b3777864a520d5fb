"""CLI runs over a small synthetic corpus: synth, describe, analyze."""

from __future__ import annotations

import numpy as np
import pandas as pd
import pytest

from remix_originality.cli import EXIT_DEGENERATE, EXIT_INPUT, EXIT_OK, main
from remix_originality.corpus import DesignRecord, read_descriptor_cache, read_metadata, write_metadata
from remix_originality.corpus.synthetic import FAMILIES, make_primitive
from remix_originality.mesh_io import TriangleMesh, write_stl

SMALL_FLAGS = ["--grid-n", "16", "--max-degree", "4", "--bandwidth", "8", "--density", "300"]


def _write_corpus(out, rows, broken=()):
    """rows: (id, parents, likes, makes); meshes listed in ``broken`` are unreadable."""
    (out / "meshes").mkdir(parents=True)
    records = []
    for i, (design_id, parents, likes, makes) in enumerate(rows):
        mesh_path = out / "meshes" / f"{design_id}.stl"
        if design_id in broken:
            mesh_path.write_bytes(b"solid broken\nfacet normal 0 0\n")
        else:
            points, faces = make_primitive(FAMILIES[i % len(FAMILIES)], subdivisions=1)
            points = points * np.array([1.0 + 0.25 * i, 1.0, 1.0 / (1.0 + 0.1 * i)])
            write_stl(TriangleMesh.from_arrays(points, faces, design_id), mesh_path)
        records.append(
            DesignRecord(
                id=design_id,
                mesh_path=f"meshes/{design_id}.stl",
                likes=likes,
                makes=makes,
                parent_ids=list(parents),
            )
        )
    write_metadata(records, out / "metadata.csv")
    return out


@pytest.fixture(scope="module")
def corpus_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("corpus")
    assert main(["synth", "--out", str(out), "--designs", "16", "--seed", "3"]) == EXIT_OK
    return out


@pytest.fixture
def described(corpus_dir, tmp_path):
    cache = tmp_path / "descriptors.shdesc"
    assert main(["describe", "--corpus", str(corpus_dir), "--cache", str(cache), *SMALL_FLAGS]) == EXIT_OK
    return corpus_dir, cache


def test_synth_layout(corpus_dir):
    records = read_metadata(corpus_dir / "metadata.csv")

    assert len(records) == 16
    assert all((corpus_dir / r.mesh_path).exists() for r in records)
    assert (corpus_dir / "truth.csv").exists()


def test_synth_rejects_tiny_corpora(tmp_path):
    assert main(["synth", "--out", str(tmp_path / "tiny"), "--designs", "5"]) == EXIT_INPUT


def test_describe_writes_every_design(described):
    corpus_dir, cache = described

    params, descriptors = read_descriptor_cache(cache)

    assert params.n == 16 and params.radii == 8
    assert len(descriptors) == 16


def test_describe_rerun_reuses_the_cache(described, capsys):
    corpus_dir, cache = described
    capsys.readouterr()

    assert main(["describe", "--corpus", str(corpus_dir), "--cache", str(cache), *SMALL_FLAGS]) == EXIT_OK

    assert capsys.readouterr().out.strip() == "computed=0 skipped=16 failed=0"


def test_describe_continues_past_a_corrupt_mesh(tmp_path):
    out = tmp_path / "corpus"
    assert main(["synth", "--out", str(out), "--designs", "12", "--seed", "8"]) == EXIT_OK
    broken = read_metadata(out / "metadata.csv")[4]
    (out / broken.mesh_path).write_bytes(b"solid broken\nfacet normal 0 0\n")

    code = main(["describe", "--corpus", str(out), *SMALL_FLAGS])
    _, descriptors = read_descriptor_cache(out / "descriptors.shdesc")

    assert code == EXIT_OK
    assert len(descriptors) == 11
    assert broken.id not in descriptors


def test_analyze_writes_report_and_plot_data(described, tmp_path):
    corpus_dir, cache = described
    report, plot = tmp_path / "report.txt", tmp_path / "plot.csv"

    code = main(
        [
            "analyze",
            "--corpus", str(corpus_dir),
            "--cache", str(cache),
            "--report", str(report),
            "--plot-data", str(plot),
            "--mode", "nearest-neighbor",
        ]
    )

    assert code in (EXIT_OK, EXIT_DEGENERATE)
    text = report.read_text()
    assert text.index("Originality - Welch Two Sample t-test") < text.index("Inheritance - Welch Two Sample t-test")
    assert text.count("[originality x ") == 2 and text.count("[inheritance x ") == 2
    assert list(pd.read_csv(plot).columns) == ["comparison", "group", "outcome", "n", "mean", "ci_low", "ci_high"]


def test_analyze_is_byte_identical_across_runs(described, tmp_path):
    corpus_dir, cache = described
    reports = []
    for jobs in ("1", "4"):
        path = tmp_path / f"report-{jobs}.txt"
        main(["analyze", "--corpus", str(corpus_dir), "--cache", str(cache), "--report", str(path), "--jobs", jobs])
        reports.append(path.read_bytes())

    assert reports[0] == reports[1]


def test_analyze_with_truth_prints_agreement(described, capsys):
    corpus_dir, cache = described
    capsys.readouterr()

    main(["analyze", "--corpus", str(corpus_dir), "--cache", str(cache), "--truth", str(corpus_dir / "truth.csv")])

    assert "partition agreement with truth:" in capsys.readouterr().out


def test_analyze_refuses_a_cache_with_other_parameters(described):
    corpus_dir, cache = described

    assert main(["analyze", "--corpus", str(corpus_dir), "--cache", str(cache), "--grid-n", "32"]) == EXIT_INPUT


def test_config_file_is_applied_and_flags_win(described, tmp_path):
    corpus_dir, cache = described
    config = tmp_path / "run.conf"
    config.write_text("grid_n = 32\nmode = parent-min\n")

    rejected = main(["analyze", "--corpus", str(corpus_dir), "--cache", str(cache), "--config", str(config)])
    accepted = main(
        ["analyze", "--corpus", str(corpus_dir), "--cache", str(cache), "--config", str(config), "--grid-n", "16"]
    )

    assert rejected == EXIT_INPUT
    assert accepted in (EXIT_OK, EXIT_DEGENERATE)


def test_missing_corpus_is_an_input_error(tmp_path):
    assert main(["describe", "--corpus", str(tmp_path / "absent")]) == EXIT_INPUT


def test_all_inherited_corpus_writes_the_report_and_exits_degenerate(tmp_path):
    rows = [("root", [], 0, 0)] + [(f"c{i}", ["root"], 3 * i, i % 3) for i in range(6)]
    out = _write_corpus(tmp_path / "corpus", rows, broken={"root"})
    report = tmp_path / "report.txt"

    assert main(["describe", "--corpus", str(out), *SMALL_FLAGS]) == EXIT_OK
    code = main(["analyze", "--corpus", str(out), "--report", str(report)])

    assert code == EXIT_DEGENERATE
    text = report.read_text()
    assert text.count("group 'Standalone' has 0 design(s)") == 2


def test_parent_min_with_one_scorable_design_still_tests_inheritance(tmp_path):
    rows = [(f"s{i}", [], i, i % 2) for i in range(6)]
    rows += [("x", [], 0, 0), ("c0", ["s0"], 9, 1), ("c1", ["x"], 12, 3)]
    out = _write_corpus(tmp_path / "corpus", rows, broken={"x"})
    report = tmp_path / "report.txt"

    assert main(["describe", "--corpus", str(out), *SMALL_FLAGS]) == EXIT_OK
    code = main(["analyze", "--corpus", str(out), "--report", str(report), "--mode", "parent-min"])

    assert code == EXIT_DEGENERATE
    text = report.read_text()
    assert "partition needs at least 2 scores" in text
    assert text.count("verdict:") == 2
