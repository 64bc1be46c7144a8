"""Static report generation for mhdlab run directories.

Consumes only the documented external interfaces: timeseries.csv,
summary.json, and (optionally) samples.csv from commutator campaigns.
"""

from .contracts import (CSV_COLUMNS, SAMPLES_COLUMNS, ReportError,
                        load_samples, load_summary, load_timeseries)
from .render import PanelInfo, ReportSpec, RunReport, render_report

__all__ = [
    "CSV_COLUMNS", "SAMPLES_COLUMNS", "ReportError", "load_timeseries",
    "load_summary", "load_samples", "ReportSpec", "RunReport", "PanelInfo",
    "render_report",
]
