"""Command-line entry point for the report generator."""

import sys

import click

from .contracts import ReportError
from .render import ALL_PANELS, ReportSpec, render_report

EXIT_OK = 0
EXIT_ERROR = 2


@click.command()
@click.argument("run_dirs", nargs=-1, type=click.Path())
@click.option("--outdir", required=True, type=click.Path(),
              help="Directory for the rendered report.")
@click.option("--panels", default=",".join(ALL_PANELS), show_default=True,
              help="Comma-separated subset of: " + ", ".join(ALL_PANELS))
@click.option("--no-timestamps", is_flag=True,
              help="Omit embedded timestamps so reruns are byte-identical.")
def main(run_dirs, outdir, panels, no_timestamps):
    """Render a static report from mhdlab run directories."""
    spec = ReportSpec(
        run_dirs=list(run_dirs), output_dir=outdir,
        panels=tuple(p for p in panels.split(",") if p),
        timestamps=not no_timestamps)
    try:
        reports = render_report(spec)
    except ReportError as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(EXIT_ERROR)
    for rep in reports:
        click.echo(f"{rep.run_dir}: {'PASS' if rep.passed else 'FAIL'}")
    sys.exit(EXIT_OK)
