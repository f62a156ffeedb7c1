"""End-to-end acceptance runs, one test (and one pass/fail line) per claim:
transform identities, noiseless loopback, PAPR/OOBE/ambiguity orderings,
link-level error rates for both detectors and both waveforms, sensing
recovery and RMSE behavior, Gram ordering, byte-level determinism, and the
plot-tool round trip.

These are Monte Carlo runs at reduced dimensions chosen to finish on a
single core; the same experiments scale up through the ``--large`` CLI flag.
"""

import os
import shutil
import subprocess
import numpy as np
import pytest

from afbm.channel import PathParams, build_channel
from afbm.filters import hermite_filter, phydyas_filter
from afbm.harness import ExperimentConfig, run, trial_rng
from afbm.metrics import ccdf_level_db, peak_sidelobe
from afbm.modem import AfbmModem, WaveformParams, gram_diagonality
from afbm.sensing import (
    PdaConfig,
    SensingGrid,
    build_dictionary,
    pda_em_estimate,
)
from afbm.transforms import (
    ChirpParams,
    daft_matrix,
    pruned_daft,
    qp_block,
    zero_pad_selector,
)
from afbm.gabp import hard_qpsk, qpsk_bits
from afbm.harness import random_qpsk

# Reduced "desk scale" link geometry shared by the error-rate criteria.
DESK = dict(L=64, N=128, P=128, K=4, R=3, ell_max=8, f_max=1.0)
FULL = dict(L=128, N=256, P=256, K=8, R=3, ell_max=16, f_max=2.0)

_CURVE_CACHE: dict = {}


def _ber_curve(tmp_root, waveform, detector, snrs):
    key = (waveform, detector, snrs)
    if key not in _CURVE_CACHE:
        cfg = ExperimentConfig(
            experiment="ber", waveform=waveform, detector=detector,
            snr_db=snrs, trials=1200,
            out_dir=str(tmp_root / f"ber_{waveform}_{detector}"), **DESK,
        )
        _CURVE_CACHE[key] = {s: b for s, b, _ in run(cfg)["rows"]}
    return _CURVE_CACHE[key]


def _snr_at(curve, level):
    """SNR where the curve crosses a BER level (log-linear interpolation)."""
    snrs = np.array(sorted(curve))
    logb = np.log10(np.maximum([curve[s] for s in snrs], 1e-12))
    assert logb.min() <= np.log10(level) <= logb.max(), (
        f"BER level {level:g} outside measured range "
        f"[{10**logb.min():.2e}, {10**logb.max():.2e}]"
    )
    return float(np.interp(np.log10(level), logb[::-1], snrs[::-1]))


@pytest.fixture(scope="session")
def tmp_root(tmp_path_factory):
    return tmp_path_factory.mktemp("acceptance")


# 1 -- transform identities across an (L, P, N) lattice, 1e-10 -------------

def test_transform_invariants():
    tol = 1e-10
    rng = np.random.default_rng(0)
    for L, P, N in [(4, 8, 8), (8, 12, 16), (16, 32, 64), (32, 48, 64),
                    (32, 64, 128), (64, 96, 128)]:
        cp = ChirpParams(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), P)
        w = daft_matrix(cp)
        assert np.abs(w @ w.conj().T - np.eye(P)).max() < tol
        wt = pruned_daft(L, P, cp)
        assert np.abs(wt @ wt.conj().T - np.eye(L)).max() < tol
        t = zero_pad_selector(N, P)
        assert np.abs(t.T @ t - np.eye(P)).max() < tol
        qp = qp_block(N, P, L, cp)
        assert np.abs(qp.conj().T @ qp - np.eye(L)).max() < tol


# 2 -- noiseless loopback over an identity channel -------------------------

@pytest.mark.parametrize("make_filter", [hermite_filter, phydyas_filter],
                         ids=["hermite", "phydyas"])
def test_loopback_noiseless(make_filter):
    total_errors = 0
    for L in (32, 64, 128):
        N = 2 * L
        f = make_filter(N)
        c2 = 1.0 / (np.pi * L**2)
        params = WaveformParams(
            L, N, N, 2, f,
            ChirpParams(0.05, c2, L),
            ChirpParams(0.05, 1.0 / (np.pi * N**2), N),
            ChirpParams(0.0, 1.0 / (np.pi * N**2), N),
        )
        modem = AfbmModem(params)
        rng = np.random.default_rng(L)
        n_frames = -(-10_000 // modem.n_data)
        for _ in range(n_frames):
            x = random_qpsk(rng, modem.n_data, 2.0)
            y = modem.demodulate(modem.modulate(x))
            total_errors += int(
                np.sum(qpsk_bits(hard_qpsk(y)) != qpsk_bits(hard_qpsk(x)))
            )
    assert total_errors == 0


# 3 -- peak-power advantage over the single-pulse baseline -----------------

def test_papr_gap(tmp_root):
    levels = {}
    for wf in ("afbm-hermite", "afdm"):
        cfg = ExperimentConfig(
            experiment="papr", waveform=wf, trials=20_000,
            out_dir=str(tmp_root / f"papr_{wf}"), **FULL,
        )
        levels[wf] = ccdf_level_db(run(cfg)["papr_db"], 1e-3)
    gap = levels["afdm"] - levels["afbm-hermite"]
    assert 1.5 <= gap <= 2.5, f"CCDF@1e-3 gap {gap:.2f} dB outside 2.0 +/- 0.5"


# 4 -- raising the spread-domain chirp rate erases the advantage -----------

def test_papr_chirp_rate_sensitivity(tmp_root):
    cfg_hot = ExperimentConfig(
        experiment="papr", waveform="afbm-hermite", trials=20_000,
        c2_l=50.0 / (np.pi * FULL["L"] ** 2),
        out_dir=str(tmp_root / "papr_hot"), **FULL,
    )
    hot = ccdf_level_db(run(cfg_hot)["papr_db"], 1e-3)
    cfg_base = ExperimentConfig(
        experiment="papr", waveform="afdm", trials=20_000,
        out_dir=str(tmp_root / "papr_afdm_ref"), **FULL,
    )
    base = ccdf_level_db(run(cfg_base)["papr_db"], 1e-3)
    assert hot >= base, f"hot-chirp CCDF@1e-3 {hot:.2f} < baseline {base:.2f}"


# 5 -- out-of-band floor at least 20 dB below the baseline -----------------

def test_oobe_ordering(tmp_root):
    floors = {}
    for wf, P in (("afbm-phydyas", 192), ("afdm", 256)):
        cfg = ExperimentConfig(
            experiment="psd", waveform=wf, trials=200,
            out_dir=str(tmp_root / f"psd_{wf}"), **{**FULL, "P": P},
        )
        floors[wf] = run(cfg)["oob_floor_db"]
    assert floors["afbm-phydyas"] <= floors["afdm"] - 20.0, (
        f"floors {floors['afbm-phydyas']:.1f} vs {floors['afdm']:.1f} dB"
    )


# 6 -- delay-cut peak sidelobe no worse than the baseline ------------------

def test_ambiguity_sidelobe_ordering(tmp_root):
    psl = {}
    for wf in ("afbm-phydyas", "afdm"):
        cfg = ExperimentConfig(
            experiment="af", waveform=wf, trials=1,
            out_dir=str(tmp_root / f"af_{wf}"), **DESK,
        )
        psl[wf] = peak_sidelobe(run(cfg)["delay_cut"])
    # Known shortfall: keeping only the even-indexed half band leaves a
    # Dirichlet kernel whose odd-lag sidelobes (~2/(pi*lag)) exceed the
    # full-band baseline's ~1/sqrt(M) skirt at every dimension tried.
    assert psl["afbm-phydyas"] <= psl["afdm"], (
        f"peak delay-cut sidelobe {psl['afbm-phydyas']:.3f} vs "
        f"baseline {psl['afdm']:.3f}"
    )


# 7 -- message passing tracks the exact linear MMSE solution ---------------

def test_gabp_within_one_db_of_lmmse(tmp_root):
    gabp = _ber_curve(tmp_root, "afbm-hermite", "gabp", (4.0, 8.0, 12.0, 14.0))
    lmmse = _ber_curve(
        tmp_root, "afbm-hermite", "lmmse", (4.0, 8.0, 12.0, 13.0, 14.0)
    )
    lo = max(min(gabp.values()), min(lmmse.values()), 1e-3)
    hi = min(max(gabp.values()), max(lmmse.values()), 1e-1)
    shifts = []
    for level in np.geomspace(hi, lo, 7):
        shifts.append(_snr_at(gabp, level) - _snr_at(lmmse, level))
    assert max(shifts) <= 1.0, (
        f"worst horizontal shift {max(shifts):.2f} dB over BER "
        f"[{lo:.1e}, {hi:.1e}]"
    )


# 8 -- at least 1 dB SNR advantage over the baseline at BER 1e-3 -----------

def test_ber_gain_over_baseline(tmp_root):
    afbm = _ber_curve(tmp_root, "afbm-hermite", "gabp", (4.0, 8.0, 12.0, 14.0))
    afdm = _ber_curve(tmp_root, "afdm", "gabp", (4.0, 8.0, 12.0, 14.0, 16.0))
    gain = _snr_at(afdm, 1e-3) - _snr_at(afbm, 1e-3)
    assert gain >= 1.0, f"SNR@1e-3 advantage {gain:.2f} dB < 1.0"


# 9 -- spread length sweep at the ~1e-2 operating point --------------------

def test_spread_length_sweep(tmp_root, monkeypatch):
    # run every trial (no early stop) so a ~10% BER difference between P
    # settings is resolved at ~5 sigma instead of being a coin flip
    import afbm.harness as harness_mod
    monkeypatch.setattr(harness_mod, "_BER_TARGET_ERRORS", 10**9)
    bers = {}
    for P in (64, 96, 128):
        cfg = ExperimentConfig(
            experiment="ber", waveform="afbm-hermite", detector="gabp",
            snr_db=(8.0,), trials=1200,
            out_dir=str(tmp_root / f"psweep_{P}"), **{**DESK, "P": P},
        )
        bers[P] = run(cfg)["rows"][0][1]
    cfg = ExperimentConfig(
        experiment="ber", waveform="afdm", detector="gabp",
        snr_db=(8.0,), trials=300,
        out_dir=str(tmp_root / "psweep_afdm"), **{**DESK, "P": 64},
    )
    afdm = run(cfg)["rows"][0][1]
    assert bers[64] < afdm, (
        f"shortest spread {bers[64]:.2e} not below baseline {afdm:.2e}"
    )
    # Known shortfall: the measured BER dips at the middle spread length
    # (P = 1.5L beats both endpoints by ~10%, far outside Monte Carlo noise,
    # at desk and full scale alike), so the strict nonincreasing ordering
    # over {L, 1.5L, 2L} does not hold here even though both endpoints are
    # ordered correctly.
    n_bits = 1200 * 2 * DESK["K"] * DESK["L"] // 2
    for a, b in ((64, 96), (96, 128)):
        slack = 2.0 * np.sqrt(bers[a] / n_bits)
        assert bers[b] <= bers[a] + slack, (
            f"BER rose from P={a} to P={b}: "
            + ", ".join(f"P={p}: {v:.3e}" for p, v in bers.items())
        )


# 10 -- exact on-grid sensing recovery, noiseless --------------------------

def test_sensing_exact_recovery():
    L, N = 16, 32
    c1 = 0.05
    params = WaveformParams(
        L, N, N, 2, hermite_filter(N),
        ChirpParams(c1, 1.0 / (np.pi * L**2), L),
        ChirpParams(c1, 1.0 / (np.pi * N**2), N),
        ChirpParams(0.0, 1.0 / (np.pi * N**2), N),
    )
    modem = AfbmModem(params)
    rng = np.random.default_rng(10)
    x = random_qpsk(rng, modem.n_data, 2.0)
    grid = SensingGrid(np.arange(8), np.linspace(-1.0, 1.0, 8))
    dic = build_dictionary(modem, x, grid, c1)
    s = modem.modulate(x)
    cfg = PdaConfig(i_max=40, beta_h=0.5, n_paths=1)
    h_true = 0.7 - 0.4j
    worst = 0.0
    for m in range(grid.size):
        ell, f = grid.atom(m)
        ch = build_channel([PathParams(h_true, ell, f)], modem.frame_len, c1)
        res = pda_em_estimate(modem.whitened_receive(ch.apply(s)), dic, 1e-9, cfg)
        m_hat = int(np.argmax(res.rho_hat * np.abs(res.h_hat) ** 2))
        assert m_hat == m, f"atom {m} recovered as {m_hat}"
        worst = max(worst, abs(res.h_hat[m_hat] - h_true))
    assert worst < 1e-3, f"worst gain error {worst:.2e}"


# 11 -- sensing RMSE falls with SNR; range no worse than baseline ----------

def test_sensing_rmse_monotone(tmp_root):
    rows = {}
    for wf in ("afbm-hermite", "afdm"):
        cfg = ExperimentConfig(
            experiment="sense", waveform=wf,
            L=32, N=64, P=64, K=2, R=3, ell_max=4, f_max=1.0,
            snr_db=(0.0, 10.0, 20.0), trials=500,
            out_dir=str(tmp_root / f"sense_{wf}"),
        )
        rows[wf] = run(cfg)["rows"]
    for wf, r in rows.items():
        rng_rmse = [row[1] for row in r]
        vel_rmse = [row[2] for row in r]
        assert rng_rmse == sorted(rng_rmse, reverse=True), (wf, rng_rmse)
        assert vel_rmse == sorted(vel_rmse, reverse=True), (wf, vel_rmse)
    assert rows["afbm-hermite"][-1][1] <= rows["afdm"][-1][1], (
        "range RMSE at 20 dB:",
        rows["afbm-hermite"][-1][1], rows["afdm"][-1][1],
    )


# 12 -- filtered model Gram closer to diagonal than the unfiltered one -----

def test_gram_ordering(tmp_root):
    cfg = ExperimentConfig(
        experiment="gram", waveform="afbm-hermite", trials=100,
        out_dir=str(tmp_root / "gram"), **DESK,
    )
    out = run(cfg)
    assert out["median_ftd"] < out["median_afb"], (
        out["median_ftd"], out["median_afb"]
    )


# 13 -- byte-identical reruns ----------------------------------------------

@pytest.mark.parametrize("experiment", ["papr", "ber", "sense"])
def test_determinism(tmp_root, experiment):
    kw = dict(trials=5)
    if experiment != "papr":
        kw["snr_db"] = (10.0,)
    outs = []
    for tag in ("a", "b"):
        cfg = ExperimentConfig(
            experiment=experiment,
            out_dir=str(tmp_root / f"det_{experiment}_{tag}"),
            L=16, N=32, P=32, K=2, R=2, ell_max=2, f_max=1.0, **kw,
        )
        run(cfg)
        outs.append(cfg.out_dir)
    for name in sorted(os.listdir(outs[0])):
        if not name.endswith(".csv"):
            continue
        with open(os.path.join(outs[0], name), "rb") as fa, \
                open(os.path.join(outs[1], name), "rb") as fb:
            assert fa.read() == fb.read(), name


# 14 -- figure tool renders golden CSVs and rejects schema mismatches ------

def test_figure_tool_round_trip(tmp_root):
    frontend = os.path.join(os.path.dirname(__file__), "..", "frontend")
    if not os.path.exists(os.path.join(frontend, "package.json")):
        pytest.skip("plot tool not built")
    if shutil.which("npm") is None:
        pytest.skip("npm unavailable")
    proc = subprocess.run(
        ["npm", "test", "--silent"], cwd=frontend,
        capture_output=True, text=True, timeout=600,
    )
    assert proc.returncode == 0, proc.stdout + proc.stderr
