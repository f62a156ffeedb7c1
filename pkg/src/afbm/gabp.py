"""Gaussian belief propagation detection and LMMSE baselines.

The detector runs on the generic linear model r = H x + w with QPSK symbols,
keeping per-edge soft replicas and variances.  All stages are vectorized over
the (observation, symbol) edge matrix, and an optional leading batch axis lets
many frames share one pass (the per-frame models must then share dimensions,
noise power and iteration schedule).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_VAR_FLOOR = 1e-12


@dataclass(frozen=True)
class GabpConfig:
    i_max: int = 20
    beta_x: float = 0.5
    E_S: float = 2.0
    single_precision: bool = False

    def __post_init__(self) -> None:
        if self.i_max < 1:
            raise ValueError(f"i_max must be >= 1, got {self.i_max}")
        if not 0.0 < self.beta_x <= 1.0:
            raise ValueError(f"beta_x must be in (0, 1], got {self.beta_x}")
        if self.E_S <= 0:
            raise ValueError(f"E_S must be positive, got {self.E_S}")


@dataclass
class GabpResult:
    x_hat: np.ndarray
    trace: np.ndarray = field(repr=False)


def gabp_detect(
    r: np.ndarray,
    h: np.ndarray,
    sigma2: float,
    cfg: GabpConfig,
    x_true: np.ndarray | None = None,
) -> GabpResult:
    """QPSK GaBP detection of r = H x + w.

    ``r`` is (n,) or (B, n) for a batch sharing the channel layout; ``h`` is
    (n, m) or (B, n, m).  Returns the consensus estimates and, when ``x_true``
    is given, a per-iteration residual mean-square error trace (otherwise the
    trace holds the mean squared change of the replicas per iteration, a
    convergence indicator).
    """
    cdtype = np.complex64 if cfg.single_precision else np.complex128
    r = np.asarray(r, dtype=cdtype)
    h = np.asarray(h, dtype=cdtype)
    if np.any(np.asarray(sigma2) < 0):
        raise ValueError(f"noise variance must be >= 0, got {sigma2}")
    batched = r.ndim == 2
    if not batched:
        r = r[None, :]
        h = h[None, :, :] if h.ndim == 2 else h
    if h.ndim == 2:
        h = np.broadcast_to(h[None, :, :], (r.shape[0],) + h.shape)
    if h.shape[0] != r.shape[0] or h.shape[1] != r.shape[1]:
        raise ValueError(f"shape mismatch: r {r.shape}, h {h.shape}")

    B, n, m = h.shape
    fdtype = np.float32 if cfg.single_precision else np.float64
    c_x = fdtype(np.sqrt(cfg.E_S / 2.0))
    habs2 = (np.abs(h) ** 2).astype(fdtype)
    hc = h.conj()

    x_soft = np.zeros((B, n, m), dtype=cdtype)
    var = np.full((B, n, m), cfg.E_S, dtype=fdtype)
    # scalar noise power, or per-observation vector for colored noise
    sigma2 = np.asarray(sigma2, dtype=fdtype)
    if sigma2.ndim == 1:
        sigma2 = sigma2[None, :, None]
    e_s = fdtype(cfg.E_S)
    beta = fdtype(cfg.beta_x)
    trace = np.zeros(cfg.i_max)

    for it in range(cfg.i_max):
        # soft interference cancellation, all edges at once
        resid = r - np.einsum("bnm,bnm->bn", h, x_soft)
        r_tilde = resid[:, :, None] + h * x_soft
        power = np.einsum("bnm,bnm->bn", habs2, var)
        sig_tilde = power[:, :, None] - habs2 * var + sigma2
        np.maximum(sig_tilde, _VAR_FLOOR, out=sig_tilde)

        # extrinsic combining (exclude the observation itself)
        gamma = hc * r_tilde / sig_tilde
        lam = habs2 / sig_tilde
        gamma_ext = np.sum(gamma, axis=1, keepdims=True) - gamma
        lam_ext = np.sum(lam, axis=1, keepdims=True) - lam
        np.maximum(lam_ext, _VAR_FLOOR, out=lam_ext)

        # Bayes-optimal QPSK denoiser; 2 c_x Re{xbar}/sbar reduces to the
        # extrinsic numerator, so no explicit division is needed
        x_den = (
            np.tanh(2.0 * c_x * gamma_ext.real)
            + 1j * np.tanh(2.0 * c_x * gamma_ext.imag)
        ).astype(cdtype)
        x_den *= c_x
        var_den = e_s - np.abs(x_den) ** 2

        x_new = beta * x_den + (1.0 - beta) * x_soft
        var = beta * var_den + (1.0 - beta) * var
        if x_true is not None:
            cons = _consensus(r, h, hc, habs2, x_soft, var, sigma2)
            trace[it] = np.mean(np.abs(cons - np.asarray(x_true).reshape(cons.shape)) ** 2)
        else:
            trace[it] = np.mean(np.abs(x_new - x_soft) ** 2)
        x_soft = x_new

    x_hat = _consensus(r, h, hc, habs2, x_soft, var, sigma2)
    if not batched:
        x_hat = x_hat[0]
    return GabpResult(x_hat=x_hat, trace=trace)


def _consensus(r, h, hc, habs2, x_soft, var, sigma2):
    resid = r - np.einsum("bnm,bnm->bn", h, x_soft)
    r_tilde = resid[:, :, None] + h * x_soft
    power = np.einsum("bnm,bnm->bn", habs2, var)
    sig_tilde = power[:, :, None] - habs2 * var + sigma2
    np.maximum(sig_tilde, _VAR_FLOOR, out=sig_tilde)
    num = np.sum(hc * r_tilde / sig_tilde, axis=1)
    den = np.sum(habs2 / sig_tilde, axis=1)
    np.maximum(den, _VAR_FLOOR, out=den)
    return num / den


def lmmse_detect(r: np.ndarray, h: np.ndarray, sigma2: float, E_S: float = 2.0) -> np.ndarray:
    """LMMSE estimate (H^H H + (sigma2/E_S) I)^{-1} H^H r.

    Batch-aware like gabp_detect.  The regularizer scales the noise power by
    the symbol energy so unit-energy and E_S-energy constellations are both
    handled correctly.
    """
    r = np.asarray(r, dtype=complex)
    h = np.asarray(h, dtype=complex)
    batched = r.ndim == 2
    if not batched:
        r = r[None, :]
    if h.ndim == 2:
        gram = h.conj().T @ h + (sigma2 / E_S) * np.eye(h.shape[1])
        rhs = r @ h.conj()
        out = np.linalg.solve(gram, rhs.T).T
    else:
        gram = np.einsum("bnm,bnk->bmk", h.conj(), h)
        gram += (sigma2 / E_S) * np.eye(h.shape[2])[None]
        rhs = np.einsum("bnm,bn->bm", h.conj(), r)
        out = np.linalg.solve(gram, rhs[:, :, None])[:, :, 0]
    return out if batched else out[0]


def hard_qpsk(y: np.ndarray, E_S: float = 2.0) -> np.ndarray:
    c = np.sqrt(E_S / 2.0)
    return c * (np.sign(y.real) + 1j * np.sign(y.imag))


def qpsk_bits(x: np.ndarray) -> np.ndarray:
    """Map QPSK symbols to bit pairs (Re sign, Im sign), shape (..., 2)."""
    return np.stack([(np.real(x) < 0), (np.imag(x) < 0)], axis=-1).astype(np.uint8)
