"""`render` command-line entry point.

Exit codes: 0 success, 1 render failure (missing or corrupt artifacts,
column mismatches), 2 bad usage.
"""

from __future__ import annotations

import sys

import click

from .recipes import RECIPES
from .render import RenderError, render


@click.command()
@click.option("--in", "artifact_dir", required=True, type=click.Path(),
              help="Artifact directory holding the figure's CSVs + manifest.")
@click.option("--figure", "figure_name", required=True,
              help="Figure name (" + ", ".join(sorted(RECIPES)) + ").")
@click.option("--out", "out_path", default=None, type=click.Path(),
              help="Output PNG path [default: <in>/<figure>.png].")
def main(artifact_dir: str, figure_name: str, out_path: str | None):
    """Render one publication-style figure from CSV + manifest artifacts."""
    if figure_name not in RECIPES:
        raise click.UsageError(f"unknown figure {figure_name!r}; choose from "
                               + ", ".join(sorted(RECIPES)))
    try:
        written = render(artifact_dir, figure_name, out_path)
    except RenderError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(written)


if __name__ == "__main__":
    main()
