"""Command-line entry points.

Exit codes: 0 success, 1 computation or validation failure, 2 bad usage or
configuration.  The default output directory comes from $CAVICOOL_OUT and
falls back to the current directory.
"""

from __future__ import annotations

import os
import sys

import click

from . import analytics, experiments
from .core import ConfigError, parse_config
from .dynamics import FitError, IntegrationError
from .experiments import RunSpec, SweepSpec


def _load_config(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise click.UsageError(f"cannot read config {path}: {exc}") from exc
    except ConfigError as exc:
        raise click.UsageError(str(exc)) from exc


out_option = click.option(
    "--out", "out_dir", default=lambda: os.environ.get("CAVICOOL_OUT", "."),
    show_default="$CAVICOOL_OUT or .", help="Output directory for artifacts.")


@click.group()
def main():
    """Doppler-cooling simulation and analysis toolkit."""


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(), help="TOML run configuration.")
@click.option("--name", default="run", show_default=True,
              help="Basename for the trajectory CSV and manifest.")
@out_option
def simulate(config_path: str, name: str, out_dir: str):
    """Integrate one configured run and write trajectory CSV + manifest."""
    params, scenario, controls = _load_config(config_path)
    spec = RunSpec(name, params, scenario, controls)
    os.makedirs(out_dir, exist_ok=True)
    try:
        _, artifacts = experiments.run_and_write(spec, out_dir)
    except (IntegrationError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    for fname in artifacts:
        click.echo(os.path.join(out_dir, fname))
    click.echo(os.path.join(out_dir, f"{name}.manifest.toml"))


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(), help="TOML run configuration.")
def rates(config_path: str):
    """Print the analytic rate predictions for a configuration."""
    params, scenario, controls = _load_config(config_path)
    try:
        pred = analytics.predict_rates(params, scenario.kind, controls.kv0)
    except (ConfigError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(f"xi = {pred.xi!r}")
    click.echo(f"mu = {pred.mu!r}")
    click.echo(f"small_doppler_ok = {str(pred.small_doppler_ok).lower()}")
    click.echo(f"two_sideband_ok = {str(pred.regime_i_ok).lower()}")


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(), help="TOML base configuration.")
@click.option("--axis", required=True,
              help='Axis key: "params.<field>" or "cooperativity".')
@click.option("--values", required=True,
              help="Comma-separated, strictly monotone axis values.")
@click.option("--paired/--no-paired", default=False, show_default=True,
              help="Also run a matched free-space twin at every point.")
@click.option("--name", default="run", show_default=True,
              help="Basename for the sweep CSV and manifest.")
@out_option
def sweep(config_path: str, axis: str, values: str, paired: bool, name: str,
          out_dir: str):
    """Run a family of simulations along one parameter axis."""
    params, scenario, controls = _load_config(config_path)
    try:
        parsed = tuple(float(v) for v in values.split(","))
    except ValueError as exc:
        raise click.UsageError(f"--values: {exc}") from exc
    base = RunSpec(name, params, scenario, controls)
    try:
        spec = SweepSpec(base=base, axis=axis, values=parsed, paired=paired)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    try:
        artifacts = experiments.run_sweep(spec, out_dir)
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    for fname in artifacts:
        click.echo(os.path.join(out_dir, fname))


@main.command()
def validate():
    """Run the numerical self-validation suite (closed forms vs dense oracles)."""
    try:
        ok = experiments.run_validate(click.echo)
    except Exception as exc:  # a crashed check is a failed suite
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    sys.exit(0 if ok else 1)


@main.command()
@click.argument("name")
@out_option
def figure(name: str, out_dir: str):
    """Produce one named figure dataset (CSV files + manifest)."""
    if name not in experiments.FIGURES:
        raise click.UsageError(
            f"unknown figure {name!r}; choose from "
            + ", ".join(sorted(experiments.FIGURES)))
    try:
        artifacts = experiments.run_figure(name, out_dir)
    except (IntegrationError, FitError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    for fname in sorted(artifacts):
        click.echo(os.path.join(out_dir, fname))


if __name__ == "__main__":
    main()
