"""
Terminal display helpers for pipeline reports and the template library.

Tables are built with pandas and printed as fixed-width text so the
output reads well in a terminal or a CI log.
"""
from typing import Sequence, Tuple

import numpy as np
import pandas as pd

from .motion_library import MotionTemplate, MOTION_TYPES
from .pipeline import PipelineReport
from .metrics import motion_magnitudes
from .geometry import net_displacement


def report_tables(report: PipelineReport) -> Tuple[pd.DataFrame, pd.DataFrame]:
    """Decision counts and class histogram as DataFrames.

    Returns:
        (decisions with columns decision/n/share,
         histogram with columns class_id/class_name/n)
    """
    decisions = pd.DataFrame(
        {"decision": list(report.decisions), "n": list(report.decisions.values())}
    )
    total = decisions["n"].sum()
    decisions["share"] = decisions["n"] / total if total else 0.0

    histogram = pd.DataFrame(
        {
            "class_id": [mt.class_id for mt in MOTION_TYPES],
            "class_name": [mt.name for mt in MOTION_TYPES],
            "n": [int(report.class_histogram.get(mt.name, 0)) for mt in MOTION_TYPES],
        }
    )
    return decisions, histogram


def show_report(report: PipelineReport, top_errors: int = 10) -> None:
    """Print a report: totals, decision table, class histogram and the first errors."""
    decisions, histogram = report_tables(report)

    print()
    print(f"Corpus size:          {report.corpus_size:,}")
    print(f"Errors:               {len(report.errors):,} ({report.error_rate:.2%})")
    print(f"Candidates evaluated: {report.candidates_evaluated:,}")
    print(f"Pairs accepted:       {report.pairs_accepted:,} ({report.acceptance_rate:.2%})")
    if report.wall_time_s:
        times = ", ".join(f"{k} {v:.2f}s" for k, v in report.wall_time_s.items())
        print(f"Wall time:            {times}")
    print()

    header = f"{'Decision':20} {'Count':>8} {'Share':>8}"
    print(header)
    print('-' * len(header))
    for row in decisions.itertuples(index=False):
        print(f"{row.decision:20} {row.n:8,d} {row.share:8.2%}")
    print()

    header = f"{'#':>3}  {'Class':48} {'Count':>7}"
    print(header)
    print('-' * len(header))
    for row in histogram.itertuples(index=False):
        print(f"{row.class_id:3d}. {row.class_name:48.48} {row.n:7,d}")

    if report.errors:
        print()
        print(f"First {min(top_errors, len(report.errors))} error(s):")
        for err in report.errors[:top_errors]:
            print(f"  [{err['stage']}] {err['id']}: {err['message']}")
    print()


def show_templates(templates: Sequence[MotionTemplate]) -> None:
    """Print one line per template with its path length and total rotation."""
    header = f"{'#':>3}  {'Template':48} {'Kind':10} {'Path':>7} {'Net':>7} {'Rot°':>7}"
    print(header)
    print('-' * len(header))
    for template in templates:
        length, rotation = motion_magnitudes(template.trajectory)
        net = net_displacement(template.trajectory)
        print(f"{template.class_id:3d}. {template.name:48.48} {template.kind:10} "
              f"{length:7.3f} {net:7.3f} {np.degrees(rotation):7.2f}")
