"""Command-line entry point: ``remix-originality synth | describe | analyze``.

Exit codes: 0 success, 2 input or configuration error, 3 analysis written
but at least one comparison was degenerate.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .analysis import partition_agreement, run_analysis, write_plot_data, write_report
from .analysis.report import emit_plot_data, render_report
from .config import SYNTH_KEYS, Config, RunConfig, read_config_file
from .corpus import Corpus, generate_synthetic, load_corpus, load_truth, read_descriptor_cache, write_descriptor_cache
from .corpus.synthetic import SynthConfig
from .errors import BadMagic, ConfigError, ParamMismatch, RaggedRow, RemixOriginalityError
from .harmonics import DescriptorParams, ShapeDescriptor, describe_mesh
from .mesh_io import read_stl
from .parallel import ordered_map

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DEGENERATE = 3

DEFAULT_CACHE_NAME = "descriptors.shdesc"
CACHE_HELP = f"Cache file (default <corpus>/{DEFAULT_CACHE_NAME})"

# RunConfig field -> DescriptorParams attribute
_PARAM_FIELDS = {
    "grid_n": "n",
    "radii": "radii",
    "max_degree": "max_degree",
    "bandwidth": "bandwidth",
    "density": "density",
    "seed": "seed",
}


@dataclass
class DescribeResult:
    descriptors: dict[str, ShapeDescriptor]
    computed: int = 0
    skipped: int = 0
    failed: dict[str, str] = field(default_factory=dict)

    def summary(self) -> str:
        return f"computed={self.computed} skipped={self.skipped} failed={len(self.failed)}"


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, default=None, help="key=value file; flags override it")
    parser.add_argument("--verbose", action="store_true", help="Enable debug logging")
    parser.add_argument("--jobs", type=int, default=None, help="Worker threads (default: REMIX_JOBS or 1)")


def _add_descriptor_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--grid-n", dest="grid_n", type=int, default=None, help="Voxel grid resolution n")
    parser.add_argument("--radii", type=int, default=None, help="Number of spheres R (default n/2)")
    parser.add_argument("--max-degree", dest="max_degree", type=int, default=None, help="Harmonic degree L")
    parser.add_argument("--bandwidth", type=int, default=None, help="Sphere sampling bandwidth B")
    parser.add_argument("--density", type=float, default=None, help="Surface samples per unit normalized area")
    parser.add_argument("--seed", type=int, default=None, help="Seed for all randomness")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="remix-originality",
        description="Shape-descriptor originality of 3D designs in a remix network",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    synth = sub.add_parser("synth", help="Generate a synthetic remix corpus with known labels")
    _add_common(synth)
    synth.add_argument("--out", type=Path, required=True, help="Output corpus directory")
    synth.add_argument("--designs", type=int, default=None, help="Number of designs (>= 10)")
    synth.add_argument("--seed", type=int, default=None)
    synth.add_argument("--remix-fraction", dest="remix_fraction", type=float, default=None)
    synth.add_argument("--original-fraction", dest="original_fraction", type=float, default=None)
    synth.add_argument("--perturbation", type=float, default=None, help="Vertex jitter of imitative copies")
    synth.add_argument("--likes-original-effect", dest="likes_original_effect", type=float, default=None)
    synth.add_argument("--likes-inherited-effect", dest="likes_inherited_effect", type=float, default=None)
    synth.add_argument("--makes-original-effect", dest="makes_original_effect", type=float, default=None)
    synth.add_argument("--makes-inherited-effect", dest="makes_inherited_effect", type=float, default=None)
    synth.add_argument("--no-effects", dest="no_effects", action="store_true", help="Zero every injected effect")
    synth.set_defaults(handler=cmd_synth)

    describe = sub.add_parser("describe", help="Compute shape descriptors into a cache")
    _add_common(describe)
    describe.add_argument("--corpus", type=Path, required=True, help="Directory holding metadata.csv")
    describe.add_argument("--cache", type=Path, default=None, help=CACHE_HELP)
    _add_descriptor_flags(describe)
    describe.set_defaults(handler=cmd_describe)

    analyze = sub.add_parser("analyze", help="Score originality and run the four comparisons")
    _add_common(analyze)
    analyze.add_argument("--corpus", type=Path, required=True, help="Directory holding metadata.csv")
    analyze.add_argument("--cache", type=Path, default=None, help=CACHE_HELP)
    analyze.add_argument("--report", type=Path, default=None, help="Report path (default: standard output)")
    analyze.add_argument("--plot-data", dest="plot_data", type=Path, default=None, help="Plot CSV path")
    analyze.add_argument("--figures", type=Path, default=None, help="Directory for error-bar figures")
    analyze.add_argument("--truth", type=Path, default=None, help="truth.csv to score the partition against")
    analyze.add_argument("--mode", choices=["parent-min", "nearest-neighbor", "hybrid"], default=None)
    analyze.add_argument("--metric", choices=["l2", "l1"], default=None)
    analyze.add_argument("--transform", choices=["none", "log1p"], default=None)
    analyze.add_argument("--confidence", type=float, default=None)
    _add_descriptor_flags(analyze)
    analyze.set_defaults(handler=cmd_analyze)
    return parser


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _file_values(args: argparse.Namespace) -> dict[str, str]:
    return read_config_file(args.config) if args.config else {}


def _run_config(args: argparse.Namespace) -> RunConfig:
    flags = {key: value for key, value in vars(args).items() if key in RunConfig.model_fields}
    return RunConfig.from_sources(_file_values(args), **flags)


def _cache_path(args: argparse.Namespace) -> Path:
    return args.cache if args.cache is not None else args.corpus / DEFAULT_CACHE_NAME


def check_cache_params(run: RunConfig, found: DescriptorParams) -> None:
    """Compare only the descriptor settings the user set explicitly.

    Raises:
        ParamMismatch: an explicit setting disagrees with the cache header.
    """
    expected = run.descriptor_params()
    explicit = run.model_fields_set
    for run_field, attribute in _PARAM_FIELDS.items():
        implied = run_field == "radii" and "grid_n" in explicit
        if (run_field in explicit or implied) and getattr(expected, attribute) != getattr(found, attribute):
            raise ParamMismatch(expected, found)


def _load_existing_cache(path: Path, params: DescriptorParams) -> dict[str, ShapeDescriptor]:
    if not path.exists():
        return {}
    try:
        found, descriptors = read_descriptor_cache(path)
    except (BadMagic, RaggedRow) as exc:
        logger.warning(f"ignoring unreadable descriptor cache {path}: {exc}")
        return {}
    if found != params:
        logger.warning(f"descriptor cache {path} was computed with {found}; recomputing with {params}")
        return {}
    return descriptors


def describe_corpus(
    corpus: Corpus,
    params: DescriptorParams,
    cached: dict[str, ShapeDescriptor] | None = None,
    jobs: int = 1,
) -> DescribeResult:
    """Descriptors for every design, reusing ``cached`` entries.

    A mesh that cannot be read or described is recorded in ``failed`` and
    logged; the batch continues.
    """
    cached = dict(cached or {})
    result = DescribeResult(descriptors=cached)
    records = sorted(corpus.records, key=lambda record: record.id)
    todo = [record for record in records if record.id not in cached]
    result.skipped = len(records) - len(todo)

    def describe_one(record) -> tuple[str, ShapeDescriptor | None, str | None]:
        try:
            mesh = read_stl(corpus.mesh_path(record))
            return record.id, describe_mesh(mesh, params), None
        except (RemixOriginalityError, OSError) as exc:
            return record.id, None, f"{type(exc).__name__}: {exc}"

    for design_id, descriptor, error in ordered_map(describe_one, todo, max_workers=jobs):
        if descriptor is None:
            logger.error(f"{design_id}: {error}")
            result.failed[design_id] = error or "unknown error"
            continue
        result.descriptors[design_id] = descriptor
        result.computed += 1
    return result


def _configure_logging(args: argparse.Namespace) -> None:
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else Config.LOG_LEVEL.upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_synth(args: argparse.Namespace) -> int:
    values: dict[str, Any] = {}
    for key, value in _file_values(args).items():
        if key in SYNTH_KEYS:
            values[SYNTH_KEYS[key]] = value
        elif key == "seed":
            values["seed"] = value
    flags = {
        "n_designs": args.designs,
        "seed": args.seed,
        "remix_fraction": args.remix_fraction,
        "original_fraction": args.original_fraction,
        "perturbation": args.perturbation,
        "likes_original_effect": args.likes_original_effect,
        "likes_inherited_effect": args.likes_inherited_effect,
        "makes_original_effect": args.makes_original_effect,
        "makes_inherited_effect": args.makes_inherited_effect,
    }
    values.update({key: value for key, value in flags.items() if value is not None})
    if args.no_effects:
        values.update(
            likes_original_effect=0.0,
            likes_inherited_effect=0.0,
            makes_original_effect=0.0,
            makes_inherited_effect=0.0,
        )
    config = SynthConfig.build(**values)
    corpus = generate_synthetic(config, args.out)
    originals = sum(design.true_class == "original" for design in corpus.designs)
    print(f"designs={len(corpus.designs)} original={originals} out={args.out}")
    return EXIT_OK


def cmd_describe(args: argparse.Namespace) -> int:
    run = _run_config(args)
    params = run.descriptor_params()
    corpus = load_corpus(args.corpus)
    cache_path = _cache_path(args)

    cached = _load_existing_cache(cache_path, params)
    result = describe_corpus(corpus, params, cached, jobs=run.jobs)
    if not result.descriptors:
        logger.error("no descriptor could be computed")
        print(result.summary())
        return EXIT_INPUT
    write_descriptor_cache(cache_path, result.descriptors, params)
    print(result.summary())
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    run = _run_config(args)
    corpus = load_corpus(args.corpus)
    found, descriptors = read_descriptor_cache(_cache_path(args))
    check_cache_params(run, found)

    report = run_analysis(corpus, descriptors, run)
    if args.report is not None:
        write_report(report, args.report)
    else:
        sys.stdout.write(render_report(report))
    if args.plot_data is not None:
        write_plot_data(emit_plot_data(report), args.plot_data)
    if args.figures is not None:
        from .analysis.figures import render_figures

        render_figures(report, args.figures)
    if args.truth is not None:
        agreement = partition_agreement(report.partition, load_truth(args.truth))
        print(f"partition agreement with truth: {agreement:.4f}")

    if report.degenerate:
        degenerate = [f"{block.comparison} x {block.outcome}" for block in report.blocks if block.degenerate]
        logger.warning(f"degenerate comparisons: {', '.join(degenerate)}")
        return EXIT_DEGENERATE
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args)
    try:
        return args.handler(args)
    except ConfigError as exc:
        logger.error(f"configuration error: {exc}")
        return EXIT_INPUT
    except (RemixOriginalityError, OSError) as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
