"""Dense constructors for the chirp-domain transform matrices.

All builders are pure functions of their parameters and return fresh
``complex128`` arrays, so results are bit-identical across runs and safe to
share between threads.

Sign convention: the forward DFT entry is ``exp(-j 2 pi a b / n) / sqrt(n)``
(unitary scaling).  The convention is not universal, so every downstream
identity in this package assumes it explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ChirpParams:
    """Digital chirp rates of a quadratic-phase (affine) transform.

    ``c1`` is the pre-chirp rate (applied after the DFT in the forward
    transform), ``c2`` the post-chirp rate, ``n`` the transform size.
    """

    c1: float
    c2: float
    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"transform size must be >= 1, got {self.n}")
        if not (np.isfinite(self.c1) and np.isfinite(self.c2)):
            raise ValueError("chirp rates must be finite")

    @staticmethod
    def zero(n: int) -> "ChirpParams":
        return ChirpParams(0.0, 0.0, n)


def dft_matrix(n: int) -> np.ndarray:
    """Normalized n-point DFT matrix, entry (a,b) = exp(-j2pi ab/n)/sqrt(n)."""
    if n < 1:
        raise ValueError(f"DFT size must be >= 1, got {n}")
    idx = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(idx, idx) / n) / np.sqrt(n)


def chirp_phases(c: float, n: int) -> np.ndarray:
    """Diagonal of the chirp matrix as a length-n vector, exp(-j2pi c m^2)."""
    if n < 1:
        raise ValueError(f"size must be >= 1, got {n}")
    if not np.isfinite(c):
        raise ValueError("chirp rate must be finite")
    m = np.arange(n, dtype=np.float64)
    return np.exp(-2j * np.pi * c * m * m)


def chirp_diag(c: float, n: int) -> np.ndarray:
    """Dense diagonal chirp matrix with central digital frequency c."""
    return np.diag(chirp_phases(c, n))


def daft_matrix(p: ChirpParams) -> np.ndarray:
    """n-point discrete affine Fourier transform Lambda_c1 F Lambda_c2."""
    f = dft_matrix(p.n)
    lam1 = chirp_phases(p.c1, p.n)
    lam2 = chirp_phases(p.c2, p.n)
    return lam1[:, None] * f * lam2[None, :]


def pruned_daft(L: int, P: int, p: ChirpParams) -> np.ndarray:
    """First L rows of the P-point DAFT (the spreading precoder).

    Rows are orthonormal because they are rows of a unitary matrix.
    """
    if p.n != P:
        raise ValueError(f"chirp params sized {p.n}, expected {P}")
    if L > P:
        raise ValueError(f"pruned DAFT needs L <= P, got L={L}, P={P}")
    if L < 1:
        raise ValueError(f"L must be >= 1, got {L}")
    return daft_matrix(p)[:L, :]


def zero_pad_selector(N: int, P: int) -> np.ndarray:
    """N x P frequency-domain zero-padding selector.

    The top P/2 rows carry the low half-band, the bottom P/2 rows the high
    half-band, with N-P all-zero rows in between.  Satisfies T^T T = I_P
    exactly (0/1 entries).
    """
    if P > N:
        raise ValueError(f"selector needs P <= N, got P={P}, N={N}")
    if P % 2 != 0 or P < 2:
        raise ValueError(f"P must be positive and even, got {P}")
    half = P // 2
    t = np.zeros((N, P))
    t[:half, :half] = np.eye(half)
    t[N - half:, half:] = np.eye(half)
    return t


def qp_block(
    N: int,
    P: int,
    L: int,
    p_chirps: ChirpParams,
    n_chirps: ChirpParams | None = None,
) -> np.ndarray:
    """Composite modulator block: N-point inverse transform of the
    frequency-domain zero-padded, pruned-DAFT-despread symbol block.

    With zero N-side chirps this is F_N^H T F_P Wt_P^H; nonzero ``n_chirps``
    generalize the outer inverse DFT to an inverse DAFT.  Columns are
    orthonormal for any parameter choice with L <= P <= N.
    """
    if not (L <= P <= N):
        raise ValueError(f"need L <= P <= N, got L={L}, P={P}, N={N}")
    if n_chirps is None:
        n_chirps = ChirpParams.zero(N)
    if n_chirps.n != N:
        raise ValueError(f"N-side chirp params sized {n_chirps.n}, expected {N}")
    wn = daft_matrix(n_chirps)
    t = zero_pad_selector(N, P)
    fp = dft_matrix(P)
    wt = pruned_daft(L, P, p_chirps)
    return wn.conj().T @ (t @ (fp @ wt.conj().T))


def q_frame(K: int, qp: np.ndarray) -> np.ndarray:
    """Block-diagonal frame modulator I_K kron Q_P."""
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    return np.kron(np.eye(K), qp)
