"""Report rendering: decay panels with theorem reference lines, functional
panels, commutator ratio histograms, and an index page."""

import html
import os
import time
from dataclasses import dataclass, field

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .contracts import (ReportError, load_samples, load_summary,
                        load_timeseries, quantity_series)

ALL_PANELS = ("decay", "functionals", "histograms")


@dataclass
class ReportSpec:
    run_dirs: list
    output_dir: str
    panels: tuple = ALL_PANELS
    timestamps: bool = True

    def validate(self) -> None:
        bad = [p for p in self.panels if p not in ALL_PANELS]
        if bad:
            raise ReportError(f"unknown panels {bad}; choose from "
                              f"{list(ALL_PANELS)}")
        for run in self.run_dirs:
            if not os.path.isdir(run):
                raise ReportError(f"{run}: run directory not found")


@dataclass
class PanelInfo:
    kind: str
    path: str
    annotations: dict = field(default_factory=dict)


@dataclass
class RunReport:
    run_dir: str
    checks: dict
    passed: bool
    panels: list


def _fit_display_slope(t, values):
    """Least-squares slope of log(value) vs log(1+t) for the annotation.
    This is a display aid; the authoritative fits come from summary.json."""
    mask = values > 0.0
    if np.count_nonzero(mask) < 2:
        return None
    x = np.log1p(t[mask])
    y = np.log(values[mask])
    return float(np.polyfit(x, y, 1)[0])


def _acceptance_checks(summary: dict) -> dict:
    """Pass/fail per check: booleans verbatim, numeric residuals against a
    generic 1e-8 budget, plus any top-level ok flag."""
    checks = {}
    for key, value in summary.get("invariant_checks", {}).items():
        if isinstance(value, bool):
            checks[key] = value
        elif value is None:
            continue
        else:
            checks[key] = bool(np.isfinite(value) and value <= 1e-8)
    if isinstance(summary.get("ok"), bool):
        checks["ok"] = summary["ok"]
    return checks


def _save(fig, path: str, timestamps: bool) -> None:
    metadata = {"Software": "mhdlab-report"}
    if timestamps:
        metadata["Creation Time"] = time.strftime("%Y-%m-%dT%H:%M:%S")
    fig.savefig(path, dpi=110, metadata=metadata)
    plt.close(fig)


def _decay_panel(series, summary, outpath, timestamps) -> PanelInfo:
    fits = [f for f in summary.get("rate_fits", [])
            if f.get("theorem_exponent") is not None]
    t = series["t"]
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    annotations = {}
    for fit in fits:
        quantity = fit["quantity"]
        values = quantity_series(series, quantity)
        line, = ax.plot(1.0 + t, values, label=quantity)
        exponent = fit["theorem_exponent"]
        prefactor = fit.get("prefactor", 1.0)
        ax.plot(1.0 + t, prefactor * (1.0 + t) ** exponent, "--",
                color=line.get_color(), linewidth=1.0,
                label=f"{quantity} ref slope {exponent:+.3f}")
        display_slope = _fit_display_slope(t, values)
        annotations[quantity] = {
            "theorem_exponent": exponent,
            "summary_slope": fit.get("slope"),
            "display_slope": display_slope,
            "slope_discrepancy": (None if display_slope is None
                                  else abs(display_slope - exponent)),
        }
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("1 + t")
    ax.set_ylabel("value")
    ax.set_title("decay quantities vs theorem reference lines")
    if fits:
        ax.legend(fontsize=7)
    _save(fig, outpath, timestamps)
    return PanelInfo("decay", outpath, annotations)


def _functionals_panel(summary, outpath, timestamps) -> PanelInfo:
    components = summary.get("functionals", {}).get("components", {})
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    names = sorted(components)
    ax.bar(names, [components[k] for k in names])
    ax.set_yscale("log" if components and
                  min(components.values()) > 0.0 else "linear")
    ax.set_ylabel("value")
    ax.set_title("energy functional components")
    _save(fig, outpath, timestamps)
    return PanelInfo("functionals", outpath, {"components": dict(components)})


def _histogram_panel(samples, outpath, timestamps) -> PanelInfo:
    ratios = samples["ratio"]
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    ax.hist(ratios, bins=min(40, max(5, len(ratios) // 5)))
    ax.set_xlabel("lhs / rhs")
    ax.set_ylabel("count")
    ax.set_title("commutator ratio distribution")
    _save(fig, outpath, timestamps)
    return PanelInfo("histograms", outpath,
                     {"count": int(len(ratios)),
                      "max_ratio": float(np.max(ratios)) if len(ratios)
                      else None})


def _render_run(run_dir, spec: ReportSpec, outdir: str) -> RunReport:
    name = os.path.basename(os.path.normpath(run_dir))
    summary = load_summary(os.path.join(run_dir, "summary.json"))
    checks = _acceptance_checks(summary)
    panels = []
    if "decay" in spec.panels:
        series = load_timeseries(os.path.join(run_dir, "timeseries.csv"))
        panels.append(_decay_panel(
            series, summary, os.path.join(outdir, f"{name}_decay.png"),
            spec.timestamps))
    if "functionals" in spec.panels and "functionals" in summary:
        panels.append(_functionals_panel(
            summary, os.path.join(outdir, f"{name}_functionals.png"),
            spec.timestamps))
    samples_path = os.path.join(run_dir, "samples.csv")
    if "histograms" in spec.panels and os.path.exists(samples_path):
        panels.append(_histogram_panel(
            load_samples(samples_path),
            os.path.join(outdir, f"{name}_ratios.png"), spec.timestamps))
    passed = all(checks.values()) if checks else True
    return RunReport(run_dir, checks, passed, panels)


def _write_index(reports, spec: ReportSpec) -> str:
    lines = ["<!DOCTYPE html>", "<html><head><title>mhdlab report</title>",
             "</head><body>", "<h1>mhdlab report</h1>"]
    if spec.timestamps:
        lines.append(f"<p>generated {time.strftime('%Y-%m-%dT%H:%M:%S')}</p>")
    if not reports:
        lines.append("<p>no runs</p>")
    for rep in reports:
        verdict = "PASS" if rep.passed else "FAIL"
        lines.append(f"<h2>{html.escape(rep.run_dir)} &mdash; {verdict}</h2>")
        lines.append("<ul>")
        for key, ok in sorted(rep.checks.items()):
            lines.append(f"<li>{html.escape(key)}: "
                         f"{'PASS' if ok else 'FAIL'}</li>")
        lines.append("</ul>")
        for panel in rep.panels:
            rel = os.path.basename(panel.path)
            lines.append(f"<p><img src='{html.escape(rel)}' "
                         f"alt='{panel.kind}'></p>")
            for quantity, ann in sorted(panel.annotations.items()):
                if isinstance(ann, dict) and "slope_discrepancy" in ann:
                    disc = ann["slope_discrepancy"]
                    lines.append(
                        f"<p>{html.escape(quantity)}: display slope "
                        f"{ann['display_slope']:+.4f}, reference "
                        f"{ann['theorem_exponent']:+.4f}, discrepancy "
                        f"{disc:.4f}</p>")
    lines.append("</body></html>")
    path = os.path.join(spec.output_dir, "index.html")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def render_report(spec: ReportSpec) -> list:
    """Render all panels and the index page; returns the RunReports."""
    spec.validate()
    os.makedirs(spec.output_dir, exist_ok=True)
    reports = [_render_run(run, spec, spec.output_dir)
               for run in spec.run_dirs]
    _write_index(reports, spec)
    return reports
