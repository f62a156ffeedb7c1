"""Doubly-dispersive channel realizations.

A channel is a sum of paths, each a delay (integer, in samples), a Doppler
shift (real, normalized to cycles per frame sample grid) and a complex gain.
Every per-path operator is the product of two unit-modulus diagonals and a
circular shift, so it is an isometry; the chirp-cyclic prefix phase diagonal
makes the wrapped samples consistent with an affine-domain prefix of rate c1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class PathParams:
    h: complex
    ell: int
    f: float

    def __post_init__(self) -> None:
        if self.ell < 0:
            raise ValueError(f"path delay must be >= 0, got {self.ell}")
        if not np.isfinite(self.h) or not np.isfinite(self.f):
            raise ValueError("path gain and Doppler must be finite")


@dataclass(frozen=True)
class ChannelBudget:
    """Delay/Doppler spread limits plus the guard width and spread length
    entering the orthogonality condition."""

    ell_max: int
    f_max: float
    xi: int
    p_daft: int

    def __post_init__(self) -> None:
        if self.ell_max < 0 or self.xi < 0 or self.f_max < 0:
            raise ValueError("budget entries must be nonnegative")


def shift_matrix(M: int) -> np.ndarray:
    """Circular shift permutation; (Pi x)[m] = x[(m-1) mod M] (delay by one)."""
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    return np.roll(np.eye(M), 1, axis=0)


def roots_vector(M: int) -> np.ndarray:
    return np.exp(-2j * np.pi * np.arange(M) / M)


def roots_matrix(M: int) -> np.ndarray:
    """Diagonal roots-of-unity matrix Z = diag(exp(-j2pi m/M))."""
    return np.diag(roots_vector(M))


def phase_vector(ell: int, M: int, c1: float) -> np.ndarray:
    """Diagonal of the chirp-cyclic prefix phase matrix for delay ell.

    The first ell entries (the samples wrapped around by the circular delay)
    carry exp(-j2pi phi(ell-m)) with phi(m) = c1 (M^2 - 2Mm); the rest are 1.
    """
    if not 0 <= ell < M:
        raise ValueError(f"delay must satisfy 0 <= ell < M, got ell={ell}, M={M}")
    d = np.ones(M, dtype=complex)
    if ell > 0:
        m = np.arange(ell)
        phi = c1 * (M * M - 2.0 * M * (ell - m))
        d[:ell] = np.exp(-2j * np.pi * phi)
    return d


def phase_matrix(ell: int, M: int, c1: float) -> np.ndarray:
    return np.diag(phase_vector(ell, M, c1))


@dataclass
class DDChannel:
    paths: list[PathParams]
    M: int
    c1: float
    _dense: np.ndarray | None = field(default=None, repr=False)

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Apply the channel to a vector or to each column of a matrix.

        Uses the diagonal-times-shift structure of each path; never builds
        the dense M x M matrix.
        """
        x = np.asarray(x)
        if x.shape[0] != self.M:
            raise ValueError(f"expected leading dimension {self.M}, got {x.shape[0]}")
        zf = roots_vector(self.M)
        out = np.zeros(x.shape, dtype=complex)
        m = np.arange(self.M)
        for p in self.paths:
            diag = p.h * phase_vector(p.ell, self.M, self.c1) * np.exp(
                -2j * np.pi * p.f * m / self.M
            )
            shifted = np.roll(x, p.ell, axis=0)
            out += diag[(slice(None),) + (None,) * (x.ndim - 1)] * shifted
        return out

    def matrix(self) -> np.ndarray:
        if self._dense is None:
            self._dense = self.apply(np.eye(self.M, dtype=complex))
        return self._dense

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("h_re,h_im,ell,f\n")
            for p in self.paths:
                fh.write(
                    f"{p.h.real:.17g},{p.h.imag:.17g},{p.ell},{p.f:.17g}\n"
                )


def build_channel(paths: list[PathParams], M: int, c1: float) -> DDChannel:
    for p in paths:
        if p.ell >= M:
            raise ValueError(f"path delay {p.ell} out of range for M={M}")
    return DDChannel(list(paths), M, c1)


def random_channel(
    R: int, budget: ChannelBudget, M: int, rng: np.random.Generator
) -> DDChannel:
    """R paths with distinct integer delays, uniform fractional Dopplers and
    complex Gaussian gains normalized to unit total power on average."""
    if R > budget.ell_max + 1:
        raise ValueError(
            f"cannot draw {R} distinct delays from [0, {budget.ell_max}]"
        )
    delays = rng.choice(budget.ell_max + 1, size=R, replace=False)
    dopplers = rng.uniform(-budget.f_max, budget.f_max, size=R)
    gains = (rng.standard_normal(R) + 1j * rng.standard_normal(R)) * np.sqrt(
        0.5 / R
    )
    paths = [
        PathParams(complex(h), int(ell), float(f))
        for h, ell, f in zip(gains, delays, dopplers)
    ]
    return build_channel(paths, M, c1_recommendation(budget))


def random_offgrid_channel(
    R: int, budget: ChannelBudget, M: int, rng: np.random.Generator
) -> tuple[DDChannel, np.ndarray, np.ndarray]:
    """Targets with distinct integer-sample delays and continuous Doppler
    shifts drawn between the search grid points (the true values are returned
    for scoring).

    The delay operator is a circular sample shift, so a fractional delay is
    not representable; "off-grid" refers to the Doppler axis, where the
    channel accepts arbitrary real shifts.  Gains are unit-modulus with
    uniform random phase (nonfluctuating point scatterers), so estimation
    error reflects geometry and noise rather than fading dropouts of
    individual targets.
    """
    if R > budget.ell_max + 1:
        raise ValueError(
            f"cannot draw {R} distinct delays from [0, {budget.ell_max}]"
        )
    delays = rng.choice(budget.ell_max + 1, size=R, replace=False)
    dopplers = rng.uniform(-budget.f_max, budget.f_max, size=R)
    gains = np.exp(2j * np.pi * rng.uniform(size=R)) / np.sqrt(R)
    paths = [
        PathParams(complex(h), int(ell), float(f))
        for h, ell, f in zip(gains, delays, dopplers)
    ]
    return (
        build_channel(paths, M, c1_recommendation(budget)),
        delays.astype(float),
        dopplers,
    )


def budget_lhs(budget: ChannelBudget) -> float:
    return 2.0 * (budget.f_max + budget.xi) * (budget.ell_max + 1) + budget.ell_max


def validate_budget(budget: ChannelBudget) -> tuple[bool, float, float]:
    """Check the orthogonality condition and recommend a chirp rate.

    Returns (condition holds, condition left-hand side, recommended c1).
    """
    return budget_lhs(budget) <= budget.p_daft, budget_lhs(budget), c1_recommendation(budget)


def c1_recommendation(budget: ChannelBudget) -> float:
    return (2.0 * (np.ceil(budget.f_max) + budget.xi) + 1.0) / (2.0 * budget.p_daft)


def add_noise(s: np.ndarray, sigma2: float, rng: np.random.Generator) -> np.ndarray:
    """Add circular complex Gaussian noise, per-sample variance sigma2."""
    if sigma2 < 0:
        raise ValueError(f"noise variance must be >= 0, got {sigma2}")
    if sigma2 == 0:
        return np.array(s, copy=True)
    scale = np.sqrt(sigma2 / 2.0)
    return s + scale * (
        rng.standard_normal(s.shape) + 1j * rng.standard_normal(s.shape)
    )
