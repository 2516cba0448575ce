"""Closed-form correlation tensors for the singlet and N-partite GHZ
states under local depolarizing noise.

Noise enters purely as a per-site visibility: every correlation at noise
level gamma equals gamma**N times its noiseless value, by construction.
Tensors are stored dense, indexed by the little-endian base-3 encoding of
the setting vector (party 0 is the least significant digit).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import BlochVector, Triad


@dataclass(frozen=True)
class NoiseLevel:
    """Per-site visibility gamma in [0, 1]; gamma = 1 means no noise."""

    gamma: float

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must be in [0, 1], got {self.gamma!r}")


@dataclass(frozen=True)
class CorrelationTensor:
    """Correlation function values for all 3**N joint settings.

    ``values[idx]`` holds the correlation for the setting vector whose
    little-endian base-3 encoding is ``idx``.
    """

    n_parties: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if self.n_parties < 1:
            raise ValueError("tensor needs at least one party")
        if vals.shape != (3 ** self.n_parties,):
            raise ValueError(f"expected {3 ** self.n_parties} entries, got {vals.shape}")
        if np.max(np.abs(vals)) > 1.0 + 1e-9:
            raise ValueError("correlations must lie in [-1, 1]")

    @staticmethod
    def setting_index(settings: Sequence[int]) -> int:
        return int(sum(s * 3 ** k for k, s in enumerate(settings)))

    def __getitem__(self, settings: Sequence[int]) -> float:
        return float(self.values[self.setting_index(settings)])


def singlet_correlation(v1: BlochVector, v2: BlochVector, noise: NoiseLevel) -> float:
    """Correlation of the noisy singlet measured along two directions:
    -gamma**2 times the dot product of the directions."""
    return -noise.gamma ** 2 * v1.dot(v2)


def batch_singlet_values(triads: np.ndarray, gamma: float) -> np.ndarray:
    """Singlet tensors for a batch of triad pairs.

    Args:
        triads: shape (S, 2, 3, 3); rows of each 3x3 block are directions.
        gamma: visibility.

    Returns:
        Array of shape (S, 9), little-endian setting encoding.
    """
    # tmp[s, b, a] = direction_a(party0) . direction_b(party1); C-order
    # flattening of the (b, a) axes yields index a + 3*b.
    tmp = np.einsum("sbc,sac->sba", triads[:, 1], triads[:, 0])
    return -gamma * gamma * tmp.reshape(len(triads), 9)


def batch_ghz_values(triads: np.ndarray, gamma: float,
                     transverse_scale: float = 1.0) -> np.ndarray:
    """GHZ tensors for a batch of triad sets.

    The correlation for a setting vector is gamma**N times the sum of the
    z-component product (even N only) and the real part of the product of
    the transverse components x + i y across parties.

    Args:
        triads: shape (S, N, 3, 3).
        gamma: visibility.
        transverse_scale: multiplier on the transverse-product term.  The
            physical value is 1; other values exist so cross-checks can
            demonstrate that rescaled variants disagree with the exact
            state-vector computation.

    Returns:
        Array of shape (S, 3**N), little-endian setting encoding.
    """
    s_count, n = triads.shape[0], triads.shape[1]
    transverse = triads[..., 0] + 1j * triads[..., 1]  # (S, N, 3)
    axial = triads[..., 2]
    acc_t = np.ones((s_count, 1), dtype=complex)
    acc_z = np.ones((s_count, 1))
    for k in range(n):
        acc_t = (transverse[:, k, :, None] * acc_t[:, None, :]).reshape(s_count, -1)
        acc_z = (axial[:, k, :, None] * acc_z[:, None, :]).reshape(s_count, -1)
    values = transverse_scale * acc_t.real
    if n % 2 == 0:
        values = values + acc_z
    return gamma ** n * values


def singlet_tensor(t1: Triad, t2: Triad, noise: NoiseLevel) -> CorrelationTensor:
    """All nine singlet correlations for a pair of measurement triads."""
    batch = np.stack([t1.as_matrix(), t2.as_matrix()])[None]
    return CorrelationTensor(2, batch_singlet_values(batch, noise.gamma)[0])


def ghz_tensor(triads: Sequence[Triad], noise: NoiseLevel) -> CorrelationTensor:
    """All 3**N GHZ correlations for N measurement triads, N >= 2.

    The z-product term carries a parity factor that vanishes for odd N, so
    odd-N correlations are independent of the measurement z-components.
    """
    n = len(triads)
    if n < 2:
        raise ValueError(f"GHZ tensor needs at least 2 parties, got {n}")
    batch = np.stack([t.as_matrix() for t in triads])[None]
    return CorrelationTensor(n, batch_ghz_values(batch, noise.gamma)[0])
