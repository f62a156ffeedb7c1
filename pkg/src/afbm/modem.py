"""Affine filter-bank modem: symbol mapping, filter compensation, the full
modulation/demodulation chain and the two effective channel matrices.

The transmit chain is  s = G (I_K kron Q_P C_f) Xi x, scaled so that a frame
of unit-energy symbols has unit mean sample power; the demodulator is the
exact adjoint of the scaled chain, so <demod(r), x> = <r, mod(x)> holds by
construction and the noiseless identity-channel loopback returns a positive
multiple of x on the data positions.

A plain-AFDM baseline with the same interface is provided so every metric
and receiver runs unchanged on both waveforms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .channel import DDChannel
from .filters import (
    PrototypeFilter,
    frame_filter_sparse,
    single_symbol_matrix,
)
from .transforms import (
    ChirpParams,
    chirp_phases,
    daft_matrix,
    dft_matrix,
    qp_block,
)


class DegenerateFilterError(ValueError):
    """A compensation divisor collapsed; the filter/transform combination
    leaves an active subcarrier with (numerically) zero energy."""


@dataclass(frozen=True)
class WaveformParams:
    """Dimensioning and chirp constants of one AFBM configuration.

    L data subcarriers (half of them guard-mapped away), N-point filter
    bank, spread-transform length P with L <= P <= N, K symbols per frame.
    Production configurations keep L < P < N; equalities are accepted for
    testing and for the degenerate baseline modes.
    """

    L: int
    N: int
    P: int
    K: int
    filter: PrototypeFilter
    chirps_l: ChirpParams
    chirps_p: ChirpParams
    chirps_n: ChirpParams
    E_S: float = 2.0

    def __post_init__(self) -> None:
        if self.L % 4 != 0:
            raise ValueError(f"L must be divisible by 4, got {self.L}")
        if not (self.L <= self.P <= self.N):
            raise ValueError(
                f"need L <= P <= N, got L={self.L}, P={self.P}, N={self.N}"
            )
        if self.K < 1:
            raise ValueError(f"K must be >= 1, got {self.K}")
        for chirps, size, name in (
            (self.chirps_l, self.L, "L"),
            (self.chirps_p, self.P, "P"),
            (self.chirps_n, self.N, "N"),
        ):
            if chirps.n != size:
                raise ValueError(f"{name}-transform chirps sized {chirps.n} != {size}")
        if self.filter.n_fft != self.N:
            raise ValueError(
                f"filter built for N={self.filter.n_fft}, waveform has N={self.N}"
            )
        if self.E_S <= 0:
            raise ValueError(f"symbol energy must be positive, got {self.E_S}")

    @property
    def n_data(self) -> int:
        return self.K * self.L // 2

    @property
    def frame_len(self) -> int:
        return self.filter.n_taps + (self.K - 1) * self.N // 2


@dataclass(frozen=True)
class CompensationVector:
    b_tilde: np.ndarray
    c_tilde: np.ndarray
    residual_offdiag_norm: float


def active_indices(L: int) -> np.ndarray:
    """Data-bearing subcarrier indices: first and last L/4 of each block."""
    q = L // 4
    return np.concatenate([np.arange(q), np.arange(L - q, L)])


def mapping_matrix_bar(L: int) -> np.ndarray:
    """L x L/2 guard-insertion block: identities at both band edges."""
    xi = np.zeros((L, L // 2))
    q = L // 4
    xi[:q, :q] = np.eye(q)
    xi[L - q:, q:] = np.eye(q)
    return xi


def compensation(
    params: WaveformParams, tol: float = 1e-12
) -> CompensationVector:
    """Per-subcarrier compensation weights restoring complex orthogonality.

    c_tilde is the diagonal of W_L^H Q_P^H Gt^T Gt Q_P W_L; active entries
    must be strictly positive, and b_tilde takes 1/sqrt(c_tilde) there and 0
    on the guard band.  The off-diagonal mass of the compensated single
    symbol Gram (restricted to active rows/columns) is returned as a
    diagnostic: zero means exact complex orthogonality.
    """
    qp = qp_block(params.N, params.P, params.L, params.chirps_p, params.chirps_n)
    wl = daft_matrix(params.chirps_l)
    gt = single_symbol_matrix(params.filter)
    core = qp.conj().T @ (gt.T @ gt) @ qp  # L x L
    inner = wl.conj().T @ core @ wl
    c_tilde = np.real(np.diag(inner))
    act = active_indices(params.L)
    if np.any(c_tilde[act] <= tol):
        raise DegenerateFilterError(
            "compensation divisor vanished on an active subcarrier"
        )
    b_tilde = np.zeros(params.L)
    b_tilde[act] = 1.0 / np.sqrt(c_tilde[act])
    cf = wl * b_tilde[None, :]
    gram = cf.conj().T @ core @ cf
    u = np.zeros((params.L, params.L))
    u[act, act] = 1.0
    resid = (gram - u)[np.ix_(act, act)]
    np.fill_diagonal(resid, 0.0)
    return CompensationVector(b_tilde, c_tilde, float(np.linalg.norm(resid)))


def gram_diagonality(h: np.ndarray) -> tuple[np.ndarray, float]:
    """Gram matrix H^H H and its off/on-diagonal energy ratio."""
    gram = h.conj().T @ h
    diag_energy = float(np.sum(np.abs(np.diag(gram)) ** 2))
    total = float(np.sum(np.abs(gram) ** 2))
    if diag_energy <= 0.0:
        raise ValueError("Gram matrix has no diagonal energy (zero channel?)")
    return gram, (total - diag_energy) / diag_energy


class AfbmModem:
    """Precomputed modulation context; immutable after construction and safe
    to share across worker threads."""

    def __init__(self, params: WaveformParams):
        self.params = params
        L, N, K = params.L, params.N, params.K
        self.comp = compensation(params)
        self.qp = qp_block(N, params.P, L, params.chirps_p, params.chirps_n)
        wl = daft_matrix(params.chirps_l)
        self.cf = wl * self.comp.b_tilde[None, :]
        self.xi_bar = mapping_matrix_bar(L)
        self.g_sparse = frame_filter_sparse(params.filter, K)
        # per-symbol modulator block including guard mapping: N x L/2
        block = self.qp @ self.cf @ self.xi_bar
        mod = np.zeros((params.frame_len, params.n_data), dtype=complex)
        spacing = N // 2
        gt = single_symbol_matrix(params.filter)
        filtered_block = gt @ block  # ON x L/2
        for k in range(K):
            mod[k * spacing:k * spacing + params.filter.n_taps,
                k * (L // 2):(k + 1) * (L // 2)] += filtered_block
        # normalize: unit-energy symbols -> unit mean sample power
        self.scale = float(
            np.sqrt(params.frame_len / np.sum(np.abs(mod) ** 2))
        )
        self.mod_matrix = self.scale * mod
        # receive-side chain (I_K kron (Q_P C_f)^H after G^H), scaled to stay
        # the exact adjoint of the modulator
        self._rx_block = (block.conj().T) * self.scale  # L/2 x N
        self._whitener: np.ndarray | None = None

    # -- basic chains -----------------------------------------------------

    @property
    def n_data(self) -> int:
        return self.params.n_data

    @property
    def frame_len(self) -> int:
        return self.params.frame_len

    def map_symbols(self, x: np.ndarray) -> np.ndarray:
        """Guard-map a length KL/2 symbol vector to the LK subcarrier grid."""
        x = np.asarray(x)
        if x.shape[0] != self.n_data:
            raise ValueError(f"expected {self.n_data} symbols, got {x.shape[0]}")
        L, K = self.params.L, self.params.K
        blocks = x.reshape(K, L // 2, *x.shape[1:])
        out = np.einsum("ls,ks...->kl...", self.xi_bar, blocks)
        return out.reshape(K * L, *x.shape[1:])

    def unmap_symbols(self, a: np.ndarray) -> np.ndarray:
        a = np.asarray(a)
        L, K = self.params.L, self.params.K
        if a.shape[0] != K * L:
            raise ValueError(f"expected {K * L} entries, got {a.shape[0]}")
        blocks = a.reshape(K, L, *a.shape[1:])
        out = np.einsum("ls,kl...->ks...", self.xi_bar, blocks)
        return out.reshape(self.n_data, *a.shape[1:])

    def modulate(self, x: np.ndarray) -> np.ndarray:
        """Transmit frame(s); x may be (n_data,) or (n_data, batch)."""
        x = np.asarray(x, dtype=complex)
        if x.shape[0] != self.n_data:
            raise ValueError(f"expected {self.n_data} symbols, got {x.shape[0]}")
        return self.mod_matrix @ x

    def demodulate(self, r: np.ndarray) -> np.ndarray:
        """Adjoint of the transmit chain (guard positions discarded)."""
        r = np.asarray(r, dtype=complex)
        if r.shape[0] != self.frame_len:
            raise ValueError(f"expected {self.frame_len} samples, got {r.shape[0]}")
        return self.mod_matrix.conj().T @ r

    def hard_qpsk(self, y: np.ndarray) -> np.ndarray:
        c = np.sqrt(self.params.E_S / 2.0)
        return c * (np.sign(y.real) + 1j * np.sign(y.imag))

    # -- effective channels ----------------------------------------------

    def receive_filter(self, r: np.ndarray) -> np.ndarray:
        """G^H r: the filtered time-domain observation fed to the detectors."""
        return self.g_sparse.conj().T @ r

    def noise_whitener(self) -> np.ndarray:
        """Rows W with W (G^H G) W^H = I on the nonzero eigenspace.

        The filter taps of neighboring symbols overlap, so the noise reaching
        the filtered time-domain observation G^H r is colored (and rank
        deficient when G has more columns than rows).  Detectors that assume
        white noise should therefore work on W G^H r with channel W G^H H Mod,
        which is a sufficient statistic with exactly unit-variance noise.
        """
        if self._whitener is None:
            gram = np.asarray((self.g_sparse.conj().T @ self.g_sparse).todense())
            vals, vecs = np.linalg.eigh(gram)
            keep = vals > vals[-1] * 1e-10
            self._whitener = (vecs[:, keep] / np.sqrt(vals[keep])[None, :]).conj().T
        return self._whitener

    def whitened_receive(self, r: np.ndarray) -> np.ndarray:
        """W G^H r: filtered observation with exactly white unit-gain noise."""
        return self.noise_whitener() @ self.receive_filter(r)

    def whitened_td_channel(self, h_time) -> np.ndarray:
        """W G^H H Mod, the channel matching :meth:`whitened_receive`."""
        return self.noise_whitener() @ self.filtered_td_channel(h_time)

    def power_profile(self) -> np.ndarray:
        """Per-sample transmit power diag(G Q Q^H G^T) over the frame.

        Covers the filtering and transform stages only (no compensation or
        guard mapping), so it reduces to a flat profile when the filter Gram
        is the identity.
        """
        L, N, K = self.params.L, self.params.N, self.params.K
        gt = single_symbol_matrix(self.params.filter)
        per_symbol = np.sum(np.abs(gt @ self.qp) ** 2, axis=1)
        prof = np.zeros(self.params.frame_len)
        spacing = N // 2
        for k in range(K):
            prof[k * spacing:k * spacing + self.params.filter.n_taps] += per_symbol
        return prof

    def filtered_td_channel(self, h_time) -> np.ndarray:
        """NK x KL/2 filtered time-domain effective channel G^H H Mod."""
        hm = self._apply_channel(h_time, self.mod_matrix)
        return self.g_sparse.conj().T @ hm

    def afb_effective_channel(self, h_time) -> np.ndarray:
        """KL/2 x KL/2 fully demodulated effective channel."""
        hm = self._apply_channel(h_time, self.mod_matrix)
        return self.mod_matrix.conj().T @ hm

    def _apply_channel(self, h_time, mat: np.ndarray) -> np.ndarray:
        if isinstance(h_time, DDChannel):
            return h_time.apply(mat)
        h_time = np.asarray(h_time)
        if h_time.shape != (self.frame_len, self.frame_len):
            raise ValueError(
                f"channel matrix must be {self.frame_len} square, got {h_time.shape}"
            )
        return h_time @ mat


class AfdmModem:
    """Plain-AFDM baseline: rectangular framing, no guard mapping, per-symbol
    inverse DAFT.  Presents the same surface as AfbmModem; the chirp-periodic
    prefix lives in the circular channel model, so frames are K back-to-back
    L-sample symbols.

    ``c1`` is the time-domain chirp rate (the channel-matched one: a circular
    channel whose wrap phase uses the same rate commutes into a banded matrix
    in the transform domain), ``c2`` the symbol-domain rate (free, shapes
    PAPR and the ambiguity function).  The transmitted block is
    mod[m, l] = exp(-j2pi c1 m^2) exp(+j2pi ml/L) exp(-j2pi c2 l^2) / sqrt(L).
    """

    def __init__(self, L: int, K: int, c1: float = 0.0, c2: float = 0.0,
                 E_S: float = 2.0):
        self.L, self.K, self.E_S = L, K, E_S
        self.c1, self.c2 = c1, c2
        f_l = dft_matrix(L)
        self.inv_block = (
            chirp_phases(c1, L)[:, None]
            * f_l.conj().T
            * chirp_phases(c2, L)[None, :]
        )
        self.g_sparse = sparse.identity(L * K, format="csr", dtype=float)
        self.mod_matrix = np.kron(np.eye(K), self.inv_block)
        self.scale = 1.0

    @property
    def n_data(self) -> int:
        return self.L * self.K

    @property
    def frame_len(self) -> int:
        return self.L * self.K

    def map_symbols(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x)

    def modulate(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        if x.shape[0] != self.n_data:
            raise ValueError(f"expected {self.n_data} symbols, got {x.shape[0]}")
        blocks = x.reshape(self.K, self.L, *x.shape[1:])
        out = np.einsum("ab,kb...->ka...", self.inv_block, blocks)
        return out.reshape(self.n_data, *x.shape[1:])

    def demodulate(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=complex)
        blocks = r.reshape(self.K, self.L, *r.shape[1:])
        out = np.einsum("ab,kb...->ka...", self.inv_block.conj().T, blocks)
        return out.reshape(self.n_data, *r.shape[1:])

    def hard_qpsk(self, y: np.ndarray) -> np.ndarray:
        c = np.sqrt(self.E_S / 2.0)
        return c * (np.sign(y.real) + 1j * np.sign(y.imag))

    def receive_filter(self, r: np.ndarray) -> np.ndarray:
        return np.asarray(r)

    def noise_whitener(self) -> np.ndarray:
        """Identity: the rectangular framing leaves the noise white."""
        return np.eye(self.frame_len)

    def whitened_receive(self, r: np.ndarray) -> np.ndarray:
        return np.asarray(r)

    def whitened_td_channel(self, h_time) -> np.ndarray:
        return self.filtered_td_channel(h_time)

    def power_profile(self) -> np.ndarray:
        """Flat by construction: the framing is rectangular and the
        per-symbol transform is unitary."""
        block = np.sum(np.abs(self.inv_block) ** 2, axis=1)
        return np.tile(block, self.K)

    def filtered_td_channel(self, h_time) -> np.ndarray:
        if isinstance(h_time, DDChannel):
            return h_time.apply(self.mod_matrix)
        return np.asarray(h_time) @ self.mod_matrix

    def afb_effective_channel(self, h_time) -> np.ndarray:
        return self.mod_matrix.conj().T @ self.filtered_td_channel(h_time)
