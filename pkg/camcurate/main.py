"""CLI entrypoint for the camera-trajectory curation pipeline.

Subcommands:
    templates  write the 50 canonical templates (optionally a 3D plot)
    synth      generate a synthetic corpus with planted defects
    filter     stage 1: keep/reject each trajectory
    classify   stage 2: assign filtered trajectories to motion classes
    match      stage 3: random intra-class pair matching
    pipeline   run all three stages and write report.json
    report     print (and optionally plot) a report

Exit codes: 0 success, 1 usage or configuration error, 2 data-error-rate abort.

Usage:
    python -m camcurate synth --spec corpus.json --seed 0 --out corpus/
    python -m camcurate pipeline --manifest corpus/manifest.json --out run/
"""
import argparse
import sys
from pathlib import Path
from typing import List, Optional

from . import display
from .classification import ClassLabel
from .config import EXIT_DATA_ERRORS, EXIT_OK, EXIT_USAGE, LABELS_FILE
from .errors import CamCurateError, ConfigError, DataErrorRateExceeded
from .motion_library import export_templates, library_templates
from .pipeline import load_report, run_all, run_classify, run_filter, run_match
from .settings import load_config
from .synth import gen_corpus, load_corpus_spec
from .trajectory_io import load_manifest, read_jsonl


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that exits with the usage/config code instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", "-c", help="JSON config file (defaults when omitted)")
    common.add_argument("--jobs", "-j", type=int, help="Worker processes (default: $CAMCURATE_JOBS or core count)")
    common.add_argument("--seed", type=int, help="Seed for matching (and corpus generation)")
    common.add_argument("--quiet", "-q", action="store_true", help="Suppress progress output")

    p = _Parser(description="Camera-trajectory curation: filter, classify and match trajectories")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("templates", parents=[common], help="Write the 50 canonical templates")
    s.add_argument("--out", "-o", required=True, help="Output directory")
    s.add_argument("--plot", action="store_true", help="Also write templates.html")

    s = sub.add_parser("synth", parents=[common], help="Generate a synthetic corpus")
    s.add_argument("--spec", required=True, help="Corpus spec JSON")
    s.add_argument("--out", "-o", required=True, help="Output directory")

    s = sub.add_parser("filter", parents=[common], help="Filter a corpus")
    s.add_argument("--manifest", "-m", required=True, help="Corpus manifest")
    s.add_argument("--out", "-o", required=True, help="Output directory")

    s = sub.add_parser("classify", parents=[common], help="Classify a filtered corpus")
    s.add_argument("--manifest", "-m", required=True, help="Filtered manifest")
    s.add_argument("--out", "-o", required=True, help="Output directory")

    s = sub.add_parser("match", parents=[common], help="Match trajectories within classes")
    s.add_argument("--manifest", "-m", required=True, help="Filtered manifest")
    s.add_argument("--labels", "-l", help=f"Labels JSONL (default: <out>/{LABELS_FILE})")
    s.add_argument("--out", "-o", required=True, help="Output directory")

    s = sub.add_parser("pipeline", parents=[common], help="Run filter, classify and match")
    s.add_argument("--manifest", "-m", required=True, help="Corpus manifest")
    s.add_argument("--out", "-o", required=True, help="Output directory")

    s = sub.add_parser("report", help="Show a pipeline report")
    s.add_argument("--dir", "-d", required=True, help="Pipeline output directory")
    s.add_argument("--html", action="store_true", help="Also write report.html")
    return p


def _run(args: argparse.Namespace) -> None:
    if args.command == "report":
        report = load_report(args.dir)
        display.show_report(report)
        if args.html:
            from .plotly_report import make_report_html
            print(f"Wrote report chart to: {make_report_html(report, args.dir).resolve()}")
        return

    # Configuration is validated before anything is written.
    config = load_config(args.config, {"jobs": args.jobs, "seed": args.seed})
    out_dir = Path(args.out)

    if args.command == "templates":
        index = export_templates(out_dir, config.template)
        templates = library_templates(config.template)
        if not args.quiet:
            display.show_templates(templates)
            print(f"✓ Wrote {len(templates)} templates to {index.parent}")
        if args.plot:
            from .plotly_report import make_templates_html
            print(f"Wrote template plot to: {make_templates_html(templates, out_dir).resolve()}")

    elif args.command == "synth":
        spec = load_corpus_spec(args.spec)
        gen_corpus(config, spec, config.seed, out_dir, quiet=args.quiet)

    elif args.command == "filter":
        run_filter(load_manifest(args.manifest), config, out_dir, quiet=args.quiet)

    elif args.command == "classify":
        run_classify(load_manifest(args.manifest), config, out_dir, quiet=args.quiet)

    elif args.command == "match":
        labels_path = Path(args.labels) if args.labels else out_dir / LABELS_FILE
        if not labels_path.is_file():
            raise ConfigError(f"labels file not found: {labels_path}")
        labels = [ClassLabel.from_dict(record) for record in read_jsonl(labels_path)]
        run_match(labels, load_manifest(args.manifest), config, out_dir, quiet=args.quiet)

    elif args.command == "pipeline":
        report = run_all(args.manifest, config, out_dir, quiet=args.quiet)
        if not args.quiet:
            display.show_report(report)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _run(args)
    except DataErrorRateExceeded as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_DATA_ERRORS
    except ConfigError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (CamCurateError, OSError, UnicodeError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
