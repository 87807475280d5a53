import hashlib
import os

import numpy as np
import pytest
from click.testing import CliRunner

from plotviz import (RECIPES, RenderError, cli, read_columns, render,
                     verify_manifest)


def write_artifact_dir(tmp_path, tamper=False, drop_file=False,
                       drop_column=False):
    """Handcraft a minimal fig2-shaped artifact directory."""
    t = np.linspace(0.0, 10.0, 50)
    cols = {"t": t, "w_0": 2.0 * np.exp(-0.1 * t),
            "theta_0": 0.1 * t,
            "abs_beta_0": np.full_like(t, 0.05),
            "w_exp_overlay": 2.0 * np.exp(-0.1 * t)}
    if drop_column:
        del cols["w_exp_overlay"]
    lines = [",".join(cols)]
    for row in zip(*cols.values()):
        lines.append(",".join(repr(float(v)) for v in row))
    data = ("\n".join(lines) + "\n").encode()
    (tmp_path / "fig2_freespace.csv").write_bytes(data)
    digest = hashlib.sha256(data).hexdigest()
    manifest = ("[artifacts]\n"
                f'"fig2_freespace.csv" = "{digest}"\n')
    (tmp_path / "fig2.manifest.toml").write_text(manifest)
    if tamper:
        with open(tmp_path / "fig2_freespace.csv", "ab") as fh:
            fh.write(b"tampered\n")
    if drop_file:
        os.remove(tmp_path / "fig2_freespace.csv")
    return str(tmp_path)


def test_render_writes_png_and_is_byte_identical(tmp_path):
    d = write_artifact_dir(tmp_path)
    out1 = render(d, "fig2", str(tmp_path / "a.png"))
    out2 = render(d, "fig2", str(tmp_path / "b.png"))
    b1, b2 = open(out1, "rb").read(), open(out2, "rb").read()
    assert b1[:4] == b"\x89PNG"
    assert b1 == b2


def test_render_default_output_path(tmp_path):
    d = write_artifact_dir(tmp_path)
    out = render(d, "fig2")
    assert out == os.path.join(d, "fig2.png")
    assert os.path.exists(out)


def test_hash_mismatch_is_rejected(tmp_path):
    d = write_artifact_dir(tmp_path, tamper=True)
    with pytest.raises(RenderError, match="hash mismatch.*fig2_freespace.csv"):
        render(d, "fig2")


def test_missing_artifact_names_the_file(tmp_path):
    d = write_artifact_dir(tmp_path, drop_file=True)
    with pytest.raises(RenderError, match="missing artifact.*fig2_freespace.csv"):
        render(d, "fig2")


def test_missing_manifest_is_reported(tmp_path):
    with pytest.raises(RenderError, match="missing manifest"):
        render(str(tmp_path), "fig2")


def test_column_mismatch_names_file_and_column(tmp_path):
    d = write_artifact_dir(tmp_path, drop_column=True)
    with pytest.raises(RenderError, match="'w_exp_overlay'.*fig2_freespace.csv"):
        render(d, "fig2")


def test_unknown_figure_name():
    with pytest.raises(RenderError, match="unknown figure"):
        render(".", "fig99")


def test_recipes_reference_unique_files():
    for name, recipe in RECIPES.items():
        assert recipe.name == name
        assert len(recipe.files) == len(set(recipe.files))
        assert recipe.manifest.endswith(".manifest.toml")
        for panel in recipe.panels:
            assert panel.series  # no empty axes


def test_read_columns_skips_non_numeric(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("t,w,error\n0.0,1.0,\n1.0,0.5,boom\n")
    cols = read_columns(str(p))
    assert set(cols) == {"t", "w"}
    assert cols["w"][1] == 0.5


def test_cli_render_and_exit_codes(tmp_path):
    d = write_artifact_dir(tmp_path)
    runner = CliRunner()
    out = str(tmp_path / "out.png")
    r = runner.invoke(cli.main, ["--in", d, "--figure", "fig2", "--out", out])
    assert r.exit_code == 0, r.output
    assert os.path.exists(out)

    r = runner.invoke(cli.main, ["--in", d, "--figure", "fig99"])
    assert r.exit_code == 2
    assert "unknown figure" in r.output

    r = runner.invoke(cli.main, ["--in", str(tmp_path / "nowhere"),
                                 "--figure", "fig2"])
    assert r.exit_code == 1
