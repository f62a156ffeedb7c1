"""Prototype filters and their block/Toeplitz matrix realizations.

Coefficients are normalized so that each filter carries energy N (the
filter-bank DFT size); an unfiltered rectangular window then has all-ones
coefficients and the filtered and unfiltered symbol energies match.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.special import eval_hermite

PHYDYAS = "phydyas"
HERMITE = "hermite"
RECTANGULAR = "rect"

# Frequency-sampling coefficients of the PHYDYAS overlap-4 prototype
# (standard published values; H2 is exactly 1/sqrt(2)).
_PHYDYAS_H = (0.971960, 1.0 / np.sqrt(2.0), 0.235147)

# Hermite-series weights of the Haas-Belfiore isotropic pulse; only the
# orders 0, 4, ..., 20 contribute.
_HERMITE_B = {
    0: 1.412692577,
    4: -3.0145e-3,
    8: -8.8041e-6,
    12: -2.2611e-9,
    16: -4.4570e-15,
    20: 1.8633e-16,
}


@dataclass(frozen=True)
class PrototypeFilter:
    kind: str
    overlap: float
    n_fft: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        n_taps = self.overlap * self.n_fft
        if abs(n_taps - round(n_taps)) > 1e-9:
            raise ValueError(
                f"overlap {self.overlap} times N={self.n_fft} is not an integer"
            )
        if len(self.coeffs) != round(n_taps):
            raise ValueError(
                f"expected {round(n_taps)} coefficients, got {len(self.coeffs)}"
            )

    @property
    def n_taps(self) -> int:
        return len(self.coeffs)

    @property
    def n_blocks(self) -> int:
        """Number of N/2-sized coefficient blocks (2O, an integer)."""
        return 2 * self.n_taps // self.n_fft

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("m,g\n")
            for m, g in enumerate(self.coeffs):
                fh.write(f"{m},{g:.17g}\n")


def _normalize(g: np.ndarray, n_fft: int) -> np.ndarray:
    return g * np.sqrt(n_fft / np.sum(g * g))


def phydyas_filter(N: int) -> PrototypeFilter:
    """PHYDYAS prototype with overlap 4 (length 4N).

    Sampled on a half-sample-offset grid so the coefficient sequence is
    exactly symmetric, g[m] = g[4N-1-m].
    """
    if N < 4 or N % 2 != 0:
        raise ValueError(f"N must be even and >= 4, got {N}")
    m = np.arange(4 * N, dtype=np.float64) + 0.5
    g = np.ones(4 * N)
    for k, hk in enumerate(_PHYDYAS_H, start=1):
        g += 2.0 * (-1) ** k * hk * np.cos(2 * np.pi * k * m / (4 * N))
    return PrototypeFilter(PHYDYAS, 4.0, N, _normalize(g, N))


def hermite_filter(N: int) -> PrototypeFilter:
    """Truncated Hermite pulse with overlap 1.5 (length 1.5N).

    Gaussian envelope times an even-order Hermite correction series,
    sampled symmetrically about the pulse center and truncated to 1.5N
    samples.  Certified downstream by the noiseless loopback test rather
    than by coefficient values.
    """
    if N % 2 != 0 or (3 * N) % 2 != 0:
        raise ValueError(f"N must be even, got {N}")
    n_taps = 3 * N // 2
    t = (np.arange(n_taps) - (n_taps - 1) / 2.0) / N
    g = np.zeros(n_taps)
    for order, b in _HERMITE_B.items():
        g += b * eval_hermite(order, 2 * np.sqrt(np.pi) * t)
    g *= np.exp(-2 * np.pi * t * t)
    return PrototypeFilter(HERMITE, 1.5, N, _normalize(g, N))


def rectangular_filter(N: int, overlap: float = 1.0) -> PrototypeFilter:
    """All-ones window; with overlap 1 the filtering degenerates to framing."""
    n_taps = overlap * N
    if abs(n_taps - round(n_taps)) > 1e-9:
        raise ValueError(f"overlap {overlap} times N={N} is not an integer")
    g = np.ones(round(n_taps))
    return PrototypeFilter(RECTANGULAR, overlap, N, _normalize(g, N))


def filter_blocks(f: PrototypeFilter) -> list[np.ndarray]:
    """The 2O diagonal coefficient blocks G_p = diag(g[pN/2 : (p+1)N/2])."""
    half = f.n_fft // 2
    return [np.diag(f.coeffs[p * half:(p + 1) * half]) for p in range(f.n_blocks)]


def single_symbol_matrix(f: PrototypeFilter) -> np.ndarray:
    """ON x N filtering matrix of one multicarrier symbol.

    The N-point modulator output is periodically extended over the filter
    length and windowed by g, with the extension aligned so the window center
    falls on the symbol's zero time coordinate: row m carries g[m] in column
    (m - ON/2) mod N.  The alignment is what confines each symbol's dominant
    energy to the half-window around its center, so that symbols spaced N/2
    apart occupy interleaved time slots and stay complex-orthogonal.
    """
    n = f.n_fft
    gt = np.zeros((f.n_taps, n))
    rows = np.arange(f.n_taps)
    gt[rows, (rows - f.n_taps // 2) % n] = f.coeffs
    return gt


def frame_filter_matrix(
    f: PrototypeFilter, K: int, spacing: int | None = None
) -> np.ndarray:
    """Frame-level block Toeplitz filter matrix, M x NK.

    Symbol k occupies columns [kN, (k+1)N) with its single-symbol matrix
    placed at row offset k*spacing; successive symbols overlap whenever
    spacing < ON.  Default spacing is N/2.
    """
    return frame_filter_sparse(f, K, spacing).toarray()


def frame_filter_sparse(
    f: PrototypeFilter, K: int, spacing: int | None = None
) -> sparse.csr_matrix:
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    n = f.n_fft
    if spacing is None:
        spacing = n // 2
    m_rows = f.n_taps + (K - 1) * spacing
    taps = np.arange(f.n_taps)
    cols_sym = (taps - f.n_taps // 2) % n
    rows = np.concatenate([k * spacing + taps for k in range(K)])
    cols = np.concatenate([k * n + cols_sym for k in range(K)])
    data = np.tile(f.coeffs, K)
    return sparse.csr_matrix((data, (rows, cols)), shape=(m_rows, K * n))
