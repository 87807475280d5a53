"""Figure recipes: which CSV columns land on which panel, and how.

A recipe is pure layout.  Every curve it references arrives precomputed in
the artifact CSVs (including all analytic overlays), so this package never
computes anything physical.  Simulated series render as solid lines,
analytic overlays as dashed lines; velocity panels use a log y-axis and
therefore plot magnitudes.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Series:
    """One curve: a column pair from one artifact CSV."""

    file: str
    x: str
    y: str
    label: str
    dashed: bool = False
    marker: str = ""


@dataclass(frozen=True)
class Panel:
    """One axes: a list of curves plus scales and labels."""

    title: str
    xlabel: str
    ylabel: str
    series: tuple[Series, ...]
    yscale: str = "linear"
    xscale: str = "linear"


@dataclass(frozen=True)
class FigureRecipe:
    """A named figure: its manifest and the panels to draw."""

    name: str
    manifest: str
    panels: tuple[Panel, ...]

    @property
    def files(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for panel in self.panels:
            for s in panel.series:
                seen.setdefault(s.file)
        return tuple(seen)


def _velocity_panel(title: str, series: tuple[Series, ...]) -> Panel:
    return Panel(title=title, xlabel="time (1/gamma_tot)",
                 ylabel="|Doppler shift| (gamma_tot)", series=series,
                 yscale="log")


RECIPES: dict[str, FigureRecipe] = {
    "fig2": FigureRecipe(
        name="fig2", manifest="fig2.manifest.toml",
        panels=(
            _velocity_panel("free-space cooling", (
                Series("fig2_freespace.csv", "t", "w_0", "simulation"),
                Series("fig2_freespace.csv", "t", "w_exp_overlay",
                       "exponential fit rate", dashed=True),
            )),
            Panel(title="trapping", xlabel="time (1/gamma_tot)",
                  ylabel="phase (rad)", series=(
                      Series("fig2_freespace.csv", "t", "theta_0", "position"),
                  )),
        )),
    "fig3a": FigureRecipe(
        name="fig3a", manifest="fig3a.manifest.toml",
        panels=(
            _velocity_panel("Purcell-enhanced cooling", (
                Series("fig3a_cavity.csv", "t", "w_0", "cavity"),
                Series("fig3a_freespace.csv", "t", "w_0", "free space",
                       dashed=True),
            )),
        )),
    "fig3b": FigureRecipe(
        name="fig3b", manifest="fig3b.manifest.toml",
        panels=(
            _velocity_panel("cavity-suppressed cooling", (
                Series("fig3b_cavity.csv", "t", "w_0", "cavity"),
                Series("fig3b_freespace.csv", "t", "w_0", "free space",
                       dashed=True),
            )),
        )),
    "fig4ab": FigureRecipe(
        name="fig4ab", manifest="fig4ab.manifest.toml",
        panels=(
            Panel(title="ground-state population", xlabel="time (1/gamma_tot)",
                  ylabel="n_g", series=(
                      Series("fig4ab_cavity.csv", "t", "ng_0", "cavity"),
                      Series("fig4ab_freespace.csv", "t", "ng_0", "free space"),
                      Series("fig4ab_cavity.csv", "t", "ng_exp_overlay",
                             "exponential model", dashed=True),
                  )),
            _velocity_panel("velocity decay", (
                Series("fig4ab_cavity.csv", "t", "w_0", "cavity"),
                Series("fig4ab_freespace.csv", "t", "w_0", "free space"),
                Series("fig4ab_cavity.csv", "t", "v_regime_i_overlay",
                       "two-sideband model", dashed=True),
            )),
        )),
    "fig4cd": FigureRecipe(
        name="fig4cd", manifest="fig4cd.manifest.toml",
        panels=(
            Panel(title="ground-state population", xlabel="time (1/gamma_tot)",
                  ylabel="n_g", series=(
                      Series("fig4cd_cavity.csv", "t", "ng_0", "cavity"),
                      Series("fig4cd_freespace.csv", "t", "ng_0", "free space"),
                      Series("fig4cd_cavity.csv", "t",
                             "ng_semianalytic_overlay",
                             "two-sideband model", dashed=True),
                      Series("fig4cd_cavity.csv", "t", "ng_allorders_overlay",
                             "all-orders model", dashed=True),
                  )),
            _velocity_panel("velocity decay", (
                Series("fig4cd_cavity.csv", "t", "w_0", "cavity"),
                Series("fig4cd_freespace.csv", "t", "w_0", "free space"),
            )),
        )),
    "fig5": FigureRecipe(
        name="fig5", manifest="fig5.manifest.toml",
        panels=(
            Panel(title="final-velocity reduction vs cooperativity",
                  xlabel="cooperativity", ylabel="ln(v_cav / v_fs)",
                  xscale="log", series=(
                      Series("fig5_ratios.csv", "cooperativity",
                             "ln_ratio_measured", "measured", marker="o"),
                      Series("fig5_ratios.csv", "cooperativity",
                             "ln_ratio_analytic", "analytic scaling",
                             dashed=True),
                  )),
        )),
    "fig7": FigureRecipe(
        name="fig7", manifest="fig7.manifest.toml",
        panels=(
            Panel(title="ensemble ground-state population",
                  xlabel="time (1/gamma_tot)", ylabel="mean n_g", series=(
                      Series("fig7_cavity.csv", "t", "ng_mean", "cavity"),
                      Series("fig7_freespace.csv", "t", "ng_mean",
                             "free space"),
                      Series("fig7_cavity.csv", "t",
                             "ng_semianalytic_overlay",
                             "collective model", dashed=True),
                  )),
            _velocity_panel("ensemble velocity", (
                Series("fig7_cavity.csv", "t", "w_mean", "cavity"),
                Series("fig7_freespace.csv", "t", "w_mean", "free space"),
            )),
        )),
}
