import json

import numpy as np
import pytest
from click.testing import CliRunner

from isl_lab.cli import RESULTS_HEADER, estimated_density_ks, main
from isl_lab.distributions import Normal


@pytest.fixture
def runner():
    return CliRunner()


def test_props_passes(runner):
    res = runner.invoke(main, ["props"])
    assert res.exit_code == 0, res.output
    assert "FAIL" not in res.output


def test_bench1d_tiny(runner, tmp_path):
    res = runner.invoke(main, [
        "bench1d", "--out", str(tmp_path), "--epochs", "3", "--batch", "100",
        "--k", "5", "--seeds", "1", "--eval-samples", "500"])
    assert res.exit_code == 0, res.output
    lines = (tmp_path / "results.csv").read_text().splitlines()
    assert lines[0] == RESULTS_HEADER
    assert len(lines) == 2 and ",dual," in lines[1]
    assert (tmp_path / "trace_dual_seed1.csv").exists()
    assert (tmp_path / "checkpoint_dual_seed1.json").exists()


def test_bench1d_bad_target_exit_2(runner, tmp_path):
    res = runner.invoke(main, ["bench1d", "--out", str(tmp_path),
                               "--target", "nope(1)"])
    assert res.exit_code == 2
    err = json.loads(res.output.strip().splitlines()[-1])
    assert err["error"] == "config"


def test_bench1d_2d_target_exit_2(runner, tmp_path):
    res = runner.invoke(main, ["bench1d", "--out", str(tmp_path),
                               "--target", "dualmoon"])
    assert res.exit_code == 2


def test_config_file_merge_and_flag_priority(runner, tmp_path):
    cfgfile = tmp_path / "run.cfg"
    cfgfile.write_text("epochs = 2  # tiny\nbatch_size = 100\nk = 4\nseeds = 1\n"
                       "eval_samples = 200\n")
    res = runner.invoke(main, [
        "bench1d", "--config", str(cfgfile), "--out", str(tmp_path),
        "--k", "5", "--eval-samples", "300"])
    assert res.exit_code == 0, res.output
    line = (tmp_path / "results.csv").read_text().splitlines()[1]
    assert ",5," in line  # flag beat the config file


def test_config_file_unknown_key_exit_2(runner, tmp_path):
    cfgfile = tmp_path / "run.cfg"
    cfgfile.write_text("bogus = 3\n")
    res = runner.invoke(main, ["bench1d", "--config", str(cfgfile),
                               "--out", str(tmp_path)])
    assert res.exit_code == 2


def test_config_file_missing_exit_4(runner, tmp_path):
    res = runner.invoke(main, ["bench1d", "--config", str(tmp_path / "nope.cfg"),
                               "--out", str(tmp_path)])
    assert res.exit_code == 4


def test_density1d_tiny(runner, tmp_path):
    res = runner.invoke(main, [
        "density1d", "--out", str(tmp_path), "--epochs", "2", "--batch", "100",
        "--k", "5", "--seeds", "2", "--target", "normal(0,1)",
        "--mc-samples", "2000"])
    assert res.exit_code == 0, res.output
    lines = (tmp_path / "density_seed2.csv").read_text().splitlines()
    assert lines[0] == "x,p_hat,p_true"
    vals = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    assert np.all(vals[:, 1] >= 0)  # exported estimate is clamped


def test_ot_tiny(runner, tmp_path):
    res = runner.invoke(main, [
        "ot", "--out", str(tmp_path), "--epochs", "3", "--batch", "100",
        "--k", "5", "--seeds", "1", "--eval-samples", "400", "--lam", "5"])
    assert res.exit_code == 0, res.output
    assert (tmp_path / "map_seed1.csv").read_text().startswith("z,f\n")
    content = (tmp_path / "results.csv").read_text()
    assert "ksd" in content and "accdf" in content


def test_bench2d_tiny(runner, tmp_path):
    res = runner.invoke(main, [
        "bench2d", "--out", str(tmp_path), "--epochs", "2", "--batch", "100",
        "--k", "5", "--seeds", "1", "--eval-samples", "2000",
        "--projections", "3"])
    assert res.exit_code == 0, res.output
    assert "grid_kl" in (tmp_path / "results.csv").read_text()


def test_timing_tiny(runner, tmp_path):
    res = runner.invoke(main, [
        "timing", "--out", str(tmp_path), "--epochs", "2", "--batch", "100",
        "--k", "5", "--seeds", "1"])
    assert res.exit_code == 0, res.output
    content = (tmp_path / "results.csv").read_text()
    assert "dual" in content and "classical" in content


def test_plot_density_overlay_deterministic(runner, tmp_path):
    csv = tmp_path / "d.csv"
    xs = np.linspace(-3, 3, 50)
    with open(csv, "w") as f:
        f.write("x,p_hat,p_true\n")
        for x in xs:
            f.write(f"{x},{np.exp(-x*x/2)/2.5},{np.exp(-x*x/2)/2.507}\n")
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    for out in (a, b):
        res = runner.invoke(main, ["plot", str(csv), "--kind", "density-overlay",
                                   "--out", str(out)])
        assert res.exit_code == 0, res.output
    assert a.read_bytes() == b.read_bytes()
    assert b"<svg" in a.read_bytes()


def test_plot_loss_curve(runner, tmp_path):
    csv = tmp_path / "trace.csv"
    with open(csv, "w") as f:
        f.write("epoch,loss,wallclock_s\n")
        for e in range(20):
            f.write(f"{e},{1.0 / (e + 1)},{0.1 * e}\n")
    out = tmp_path / "loss.svg"
    res = runner.invoke(main, ["plot", str(csv), "--kind", "loss-curve",
                               "--out", str(out)])
    assert res.exit_code == 0, res.output
    assert out.exists()


def test_plot_contour(runner, tmp_path):
    csv = tmp_path / "field.csv"
    g = np.linspace(-1, 1, 12)
    with open(csv, "w") as f:
        f.write("x,y,p_hat\n")
        for y in g:
            for x in g:
                f.write(f"{x},{y},{np.exp(-(x*x+y*y))}\n")
    out = tmp_path / "c.svg"
    res = runner.invoke(main, ["plot", str(csv), "--kind", "contour",
                               "--out", str(out)])
    assert res.exit_code == 0, res.output
    assert out.exists()


def test_estimated_density_ks_exact_density_is_small():
    d = Normal(0, 1)
    xs = np.linspace(-5, 5, 4001)
    assert estimated_density_ks(xs, d.pdf(xs), d) < 1e-4
