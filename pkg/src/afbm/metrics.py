"""Waveform evaluation metrics: PAPR/CCDF, spectra, ambiguity function,
error counting and radar estimation error.

Everything here is a pure function of arrays so the experiment harness can
stay a thin orchestration layer.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import linear_sum_assignment


def papr_db(frames: np.ndarray) -> np.ndarray:
    """Peak-to-average power ratio per frame in dB.

    ``frames`` is (M,) or (M, n_frames); the statistic is per column.
    """
    frames = np.atleast_2d(np.asarray(frames, dtype=complex).T).T
    p = np.abs(frames) ** 2
    avg = np.mean(p, axis=0)
    if np.any(avg <= 0):
        raise ValueError("zero-power frame has undefined PAPR")
    return 10.0 * np.log10(np.max(p, axis=0) / avg)


def ccdf(values_db: np.ndarray, grid_db: np.ndarray) -> np.ndarray:
    """Empirical complementary CDF of the PAPR samples on a dB grid."""
    values_db = np.asarray(values_db)
    return np.array([np.mean(values_db > g) for g in np.asarray(grid_db)])


def ccdf_level_db(values_db: np.ndarray, prob: float) -> float:
    """PAPR threshold (dB) whose CCDF equals ``prob`` (empirical quantile)."""
    if not 0.0 < prob < 1.0:
        raise ValueError(f"probability must be in (0,1), got {prob}")
    return float(np.quantile(np.asarray(values_db), 1.0 - prob))


def periodogram_psd(frames: np.ndarray, n_fft: int | None = None) -> np.ndarray:
    """Average periodogram over frames, normalized to unit peak.

    Returns a length-n_fft nonnegative vector in FFT bin order (DC first).
    """
    frames = np.atleast_2d(np.asarray(frames, dtype=complex).T).T
    m = frames.shape[0]
    if n_fft is None:
        n_fft = m
    spec = np.fft.fft(frames, n=n_fft, axis=0)
    psd = np.mean(np.abs(spec) ** 2, axis=1)
    peak = psd.max()
    if peak <= 0:
        raise ValueError("zero-power input has no spectrum")
    return psd / peak


def time_power_profile(mod_matrix: np.ndarray) -> np.ndarray:
    """Per-sample transmit power diag(S S^H) for unit-energy symbols."""
    return np.real(np.einsum("ij,ij->i", mod_matrix, mod_matrix.conj()))


def oob_floor_db(psd: np.ndarray, band: np.ndarray) -> float:
    """Median out-of-band level in dB relative to the in-band peak.

    ``band`` is a boolean in-band mask in the same bin order as ``psd``; the
    median (not max) is used so isolated skirt bins next to the band edge do
    not dominate the statistic.
    """
    psd = np.asarray(psd)
    band = np.asarray(band, dtype=bool)
    if band.shape != psd.shape:
        raise ValueError("band mask must match psd shape")
    if band.all() or not band.any():
        raise ValueError("band mask must have both in-band and out-of-band bins")
    out = psd[~band]
    ref = psd[band].max()
    return 10.0 * np.log10(np.maximum(np.median(out), 1e-300) / ref)


def band_mask(n_fft: int, occupied: int) -> np.ndarray:
    """In-band mask for a band of ``occupied`` bins centered on DC, FFT order."""
    if not 0 < occupied <= n_fft:
        raise ValueError(f"need 0 < occupied <= n_fft, got {occupied}, {n_fft}")
    half_lo = (occupied + 1) // 2
    half_hi = occupied - half_lo
    mask = np.zeros(n_fft, dtype=bool)
    mask[:half_lo] = True
    if half_hi:
        mask[n_fft - half_hi:] = True
    return mask


def ambiguity_surface(s: np.ndarray, max_lag: int, doppler_bins: np.ndarray) -> np.ndarray:
    """Discrete aperiodic ambiguity |A[lag, nu]| of one frame, unit peak.

    A[l, nu] = sum_n s[n] conj(s[n + l]) exp(-j2pi nu n / M) with the frame
    zero-padded outside its support; rows are lags 0..max_lag, columns the
    requested Doppler bins (cycles per frame).
    """
    s = np.asarray(s, dtype=complex)
    m_len = s.shape[0]
    if not 0 <= max_lag < m_len:
        raise ValueError(f"need 0 <= max_lag < {m_len}, got {max_lag}")
    mm = np.arange(m_len)
    steer = np.exp(-2j * np.pi * np.outer(np.asarray(doppler_bins, float), mm) / m_len)
    out = np.empty((max_lag + 1, steer.shape[0]))
    for lag in range(max_lag + 1):
        prod = np.zeros(m_len, dtype=complex)
        prod[: m_len - lag] = s[: m_len - lag] * np.conj(s[lag:])
        out[lag] = np.abs(steer @ prod)
    peak = out.max()
    if peak <= 0:
        raise ValueError("zero-power frame has no ambiguity surface")
    return out / peak


def delay_cut(s: np.ndarray, max_lag: int) -> np.ndarray:
    """Zero-Doppler delay cut |A[lag, 0]|, unit peak, lags 0..max_lag."""
    return ambiguity_surface(s, max_lag, np.array([0.0]))[:, 0]


def doppler_cut(s: np.ndarray, doppler_bins: np.ndarray) -> np.ndarray:
    """Zero-delay Doppler cut |A[0, nu]|, unit peak."""
    return ambiguity_surface(s, 0, doppler_bins)[0]


def peak_sidelobe(cut: np.ndarray, mainlobe_width: int = 1) -> float:
    """Largest value outside the mainlobe of a unit-peak cut.

    ``mainlobe_width`` is the number of leading samples treated as mainlobe
    (the cut is one-sided in delay; for symmetric Doppler cuts pass the
    index extent around the center instead).
    """
    cut = np.asarray(cut)
    if len(cut) <= mainlobe_width:
        raise ValueError("cut too short for the requested mainlobe width")
    return float(np.max(cut[mainlobe_width:]))


def count_bit_errors(x_hat: np.ndarray, x_true: np.ndarray) -> int:
    """QPSK bit errors: sign mismatches on both rails."""
    x_hat = np.asarray(x_hat)
    x_true = np.asarray(x_true)
    return int(
        np.sum((x_hat.real > 0) != (x_true.real > 0))
        + np.sum((x_hat.imag > 0) != (x_true.imag > 0))
    )


def matched_rmse(est: np.ndarray, true: np.ndarray) -> float:
    """RMSE under the best one-to-one pairing of estimates to truths.

    Uses an optimal assignment on squared error so the metric does not depend
    on the order in which targets were extracted.
    """
    est = np.atleast_1d(np.asarray(est, dtype=float))
    true = np.atleast_1d(np.asarray(true, dtype=float))
    if est.shape != true.shape:
        raise ValueError(f"shape mismatch: {est.shape} vs {true.shape}")
    cost = (est[:, None] - true[None, :]) ** 2
    rows, cols = linear_sum_assignment(cost)
    return float(np.sqrt(np.mean(cost[rows, cols])))
