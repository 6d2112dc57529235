"""Figure scripts for recommendation-network reachability and navigation reports."""

from .frames import ReportError, ReportFrame, load_report
from .plots import (
    plot_bowtie_stacked,
    plot_membership_heatmaps,
    plot_reachability,
    plot_success_bars,
    render_all,
)

__version__ = "0.1.0"

__all__ = [
    "ReportError",
    "ReportFrame",
    "load_report",
    "plot_bowtie_stacked",
    "plot_membership_heatmaps",
    "plot_reachability",
    "plot_success_bars",
    "render_all",
]
