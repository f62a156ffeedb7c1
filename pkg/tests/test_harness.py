"""Experiment harness: config parsing, CLI exit codes, output contracts and
byte-level determinism."""

import os
import subprocess
import sys

import numpy as np
import pytest

from afbm.cli import main as cli_main
from afbm.harness import (
    ConfigError,
    ExperimentConfig,
    default_chirps,
    parse_config,
    run,
    trial_rng,
)

SMALL = dict(L=16, N=32, P=32, K=2, R=2, ell_max=2, f_max=1.0)


def small_cfg(tmp_path, experiment, **kw):
    base = dict(SMALL)
    base.update(kw)
    return ExperimentConfig(
        experiment=experiment, out_dir=str(tmp_path / experiment), **base
    )


def read_bytes(path):
    with open(path, "rb") as fh:
        return fh.read()


# -- config parsing ---------------------------------------------------------

def test_parse_config_file_and_overrides(tmp_path):
    p = tmp_path / "cfg.txt"
    p.write_text(
        "# comment\n"
        "experiment = papr\n"
        "L = 16\nN = 32\nP = 32\nK = 2\n"
        'waveform = "afdm"\n'
        "snr_db = 0,10\n"
        "large = false\n"
    )
    cfg = parse_config(str(p), {"trials": "7"})
    assert cfg.experiment == "papr"
    assert cfg.waveform == "afdm"
    assert cfg.snr_db == (0.0, 10.0)
    assert cfg.trials == 7
    assert cfg.large is False


def test_parse_config_rejects_unknown_key(tmp_path):
    p = tmp_path / "cfg.txt"
    p.write_text("no_such_key = 3\n")
    with pytest.raises(ConfigError, match="no_such_key"):
        parse_config(str(p))


def test_parse_config_rejects_bad_value(tmp_path):
    p = tmp_path / "cfg.txt"
    p.write_text("L = sixteen\n")
    with pytest.raises(ConfigError, match="L"):
        parse_config(str(p))


def test_parse_config_missing_file():
    with pytest.raises(ConfigError):
        parse_config("/nonexistent/cfg.txt")


@pytest.mark.parametrize("bad", [
    dict(experiment="nope"),
    dict(waveform="ofdm"),
    dict(detector="zf"),
    dict(L=18),
    dict(P=16, N=8),
    dict(K=0),
    dict(trials=0),
    dict(snr_db=()),
])
def test_config_validation(bad):
    base = dict(SMALL)
    base.update(bad)
    with pytest.raises(ConfigError):
        ExperimentConfig(**{"experiment": "papr", **base})


def test_budget_validation_only_for_channel_experiments():
    # papr accepts a budget-violating geometry, ber rejects it
    base = dict(SMALL)
    base.update(ell_max=30, f_max=4.0)
    ExperimentConfig(experiment="papr", **base)
    with pytest.raises(ConfigError, match="orthogonality"):
        ExperimentConfig(experiment="ber", **base)


def test_default_chirps_families():
    cfg = ExperimentConfig(experiment="papr", **SMALL)
    cl, cp, cn = default_chirps(cfg)
    np.testing.assert_allclose(cl.c2, 1.0 / (np.pi * 16**2))
    np.testing.assert_allclose(cp.c2, 1.0 / (np.pi * 32**2))
    # ambiguity study family pins the outer chirp to zero
    cfg_af = ExperimentConfig(experiment="af", **SMALL)
    _, _, cn_af = default_chirps(cfg_af)
    assert cn_af.c2 == 0.0
    # the L-side c2 knob moves the residual spread-domain chirp rate
    cfg_hot = ExperimentConfig(
        experiment="papr", c2_l=50.0 / (np.pi * 16**2), **SMALL
    )
    cl_hot, _, _ = default_chirps(cfg_hot)
    assert cl_hot.c1 > cl.c1


def test_trial_rng_reproducible():
    cfg = ExperimentConfig(experiment="papr", **SMALL)
    a = trial_rng(cfg, 5).standard_normal(4)
    b = trial_rng(cfg, 5).standard_normal(4)
    c = trial_rng(cfg, 6).standard_normal(4)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


# -- experiment outputs -----------------------------------------------------

def test_papr_outputs(tmp_path):
    cfg = small_cfg(tmp_path, "papr", trials=40)
    run(cfg)
    files = set(os.listdir(cfg.out_dir))
    assert {"ccdf.csv", "manifest.txt"} <= files
    header, *rows = open(os.path.join(cfg.out_dir, "ccdf.csv")).read().splitlines()
    assert header == "papr_db,prob"
    probs = [float(r.split(",")[1]) for r in rows]
    assert all(0.0 <= p <= 1.0 for p in probs)
    assert all(a >= b - 1e-12 for a, b in zip(probs, probs[1:]))


def test_psd_outputs(tmp_path):
    # P < N so the occupied band leaves out-of-band bins to measure
    cfg = small_cfg(tmp_path, "psd", trials=4, P=16)
    out = run(cfg)
    files = set(os.listdir(cfg.out_dir))
    assert {"psd.csv", "power_profile.csv", "manifest.txt"} <= files
    assert out["oob_floor_db"] < 0
    manifest = open(os.path.join(cfg.out_dir, "manifest.txt")).read()
    assert "oob_floor_db" in manifest


def test_af_outputs(tmp_path):
    cfg = small_cfg(tmp_path, "af", trials=1)
    run(cfg)
    files = set(os.listdir(cfg.out_dir))
    assert {"af_delay.csv", "af_doppler.csv", "manifest.txt"} <= files
    header = open(os.path.join(cfg.out_dir, "af_delay.csv")).readline().strip()
    assert header == "lag,amp"


def test_ber_outputs(tmp_path):
    cfg = small_cfg(tmp_path, "ber", trials=4, snr_db=(30.0,))
    out = run(cfg)
    assert len(out["rows"]) == 1
    header, row = open(os.path.join(cfg.out_dir, "ber.csv")).read().splitlines()
    assert header == "snr_db,ber,trials"
    assert float(row.split(",")[1]) <= 0.5


def test_loopback_outputs(tmp_path):
    cfg = small_cfg(tmp_path, "loopback", trials=3, waveform="afbm-hermite")
    out = run(cfg)
    assert out["bit_errors"] == 0


def test_sense_outputs(tmp_path):
    cfg = small_cfg(tmp_path, "sense", trials=3, snr_db=(20.0,))
    out = run(cfg)
    files = set(os.listdir(cfg.out_dir))
    assert {"rmse.csv", "targets.csv", "manifest.txt"} <= files
    assert len(out["rows"]) == 1


def test_gram_outputs(tmp_path):
    cfg = small_cfg(tmp_path, "gram", trials=5)
    out = run(cfg)
    assert out["median_ftd"] >= 0
    assert out["median_afb"] >= 0
    header = open(os.path.join(cfg.out_dir, "gram.csv")).readline().strip()
    assert header == "trial,ftd_ratio,afb_ratio"


@pytest.mark.parametrize("experiment", ["papr", "ber", "sense"])
def test_rerun_byte_identical(tmp_path, experiment):
    kw = dict(trials=5)
    if experiment != "papr":
        kw["snr_db"] = (10.0,)
    cfg_a = small_cfg(tmp_path / "a", experiment, **kw)
    cfg_b = small_cfg(tmp_path / "b", experiment, **kw)
    run(cfg_a)
    run(cfg_b)
    for name in os.listdir(cfg_a.out_dir):
        if name.endswith(".csv"):
            assert read_bytes(os.path.join(cfg_a.out_dir, name)) == read_bytes(
                os.path.join(cfg_b.out_dir, name)
            ), name


# -- CLI --------------------------------------------------------------------

def test_cli_success(tmp_path):
    code = cli_main([
        "papr", "--waveform", "afdm", "--L", "16", "--N", "32", "--P", "32",
        "--K", "2", "--trials", "10", "--out", str(tmp_path / "o"),
    ])
    assert code == 0
    assert (tmp_path / "o" / "ccdf.csv").exists()


def test_cli_config_error(tmp_path, capsys):
    code = cli_main(["papr", "--L", "18", "--out", str(tmp_path / "o")])
    assert code == 2
    assert "L" in capsys.readouterr().err


def test_cli_unknown_experiment():
    with pytest.raises(SystemExit):
        cli_main(["warp"])


def test_cli_entry_point_installed():
    proc = subprocess.run(
        [sys.executable, "-m", "afbm.cli", "--help"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "experiment" in proc.stdout
