"""Interactive Plotly charts for pipeline reports and motion templates.

Writes standalone HTML files:
    report.html     decision counts and per-class population
    templates.html  3D camera-center paths of the 50 templates
"""
from pathlib import Path
from typing import Sequence, Union

from .display import report_tables
from .motion_library import MotionTemplate
from .pipeline import PipelineReport

try:
    import plotly.graph_objects as go
    from plotly.subplots import make_subplots
except Exception:
    print("plotly is required. Install with: pip install plotly")
    raise


def make_report_html(report: PipelineReport, out_dir: Union[str, Path]) -> Path:
    """Bar charts of filter decisions and the class histogram."""
    decisions, histogram = report_tables(report)

    fig = make_subplots(
        rows=2, cols=1,
        subplot_titles=("Filter decisions", "Trajectories per motion class"),
        vertical_spacing=0.25,
    )
    fig.add_trace(go.Bar(x=decisions["decision"], y=decisions["n"], name="decisions"), row=1, col=1)
    fig.add_trace(
        go.Bar(
            x=histogram["class_name"],
            y=histogram["n"],
            name="classes",
            hovertext=[f"class {cid}" for cid in histogram["class_id"]],
        ),
        row=2, col=1,
    )
    fig.update_layout(
        showlegend=False,
        height=900,
        title=(f"{report.corpus_size:,} trajectories, "
               f"{report.pairs_accepted:,}/{report.candidates_evaluated:,} pairs accepted"),
    )
    fig.update_xaxes(tickangle=-60, row=2, col=1)

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_file = out_dir / "report.html"
    fig.write_html(str(out_file))
    return out_file


def make_templates_html(templates: Sequence[MotionTemplate], out_dir: Union[str, Path]) -> Path:
    """3D center paths of every template. Rotation-only templates show as a single point."""
    fig = go.Figure()
    for template in templates:
        centers = template.trajectory.centers
        fig.add_trace(
            go.Scatter3d(
                x=centers[:, 0],
                # plot with y up
                y=centers[:, 2],
                z=-centers[:, 1],
                mode="lines",
                name=f"{template.class_id:02d} {template.name}",
                visible=True if template.class_id < 20 else "legendonly",
            )
        )
    fig.update_layout(
        scene=dict(xaxis_title="x (right)", yaxis_title="z (forward)", zaxis_title="-y (up)", aspectmode="data"),
        margin={'r': 0, 't': 30, 'l': 0, 'b': 0},
        title="Canonical motion templates (camera centers)",
    )

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_file = out_dir / "templates.html"
    fig.write_html(str(out_file))
    return out_file
