"""Dense state-vector simulation: exact expectation values via the trace
and finite-statistics sampling of the measure-and-report protocol.

This is the ground truth the closed-form correlation tensors are checked
against.  States are kept dense (at most ``MAX_QUBITS`` qubits), which keeps
every expectation value a direct matrix computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .correlations import NoiseLevel
from .geometry import BlochVector, Triad

MAX_QUBITS = 10
NORM_TOL = 1e-12


@dataclass(frozen=True)
class PureState:
    """An ``n_qubits``-qubit pure state as 2**n complex amplitudes.

    Qubit k corresponds to bit (n_qubits - 1 - k) of the amplitude index,
    so index 1 of a two-qubit state is |01>.
    """

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        object.__setattr__(self, "amplitudes", amps)
        if self.n_qubits < 1:
            raise ValueError("state needs at least one qubit")
        if amps.shape != (2 ** self.n_qubits,):
            raise ValueError(f"expected {2 ** self.n_qubits} amplitudes, got {amps.shape}")
        if abs(np.vdot(amps, amps).real - 1.0) > NORM_TOL:
            raise ValueError("state is not normalized")


class MeasurementRecord(NamedTuple):
    """One protocol round: each party's chosen setting and its outcome."""

    settings: tuple[int, ...]
    outcomes: tuple[int, ...]


@dataclass
class FrequencyEstimate:
    """Per-setting parity counts and the derived correlation estimates.

    ``counts[idx, a]`` is the number of records with setting index ``idx``
    (little-endian base 3) whose outcome parity is ``a``.  Settings that
    were never observed are flagged as missing (NaN estimate), not zero.
    """

    n_parties: int
    counts: np.ndarray

    @staticmethod
    def setting_index(settings: Sequence[int]) -> int:
        return int(sum(s * 3 ** k for k, s in enumerate(settings)))

    @property
    def estimates(self) -> np.ndarray:
        """Correlation estimate per setting index; NaN where unobserved."""
        totals = self.counts.sum(axis=1)
        with np.errstate(invalid="ignore", divide="ignore"):
            est = (self.counts[:, 0] - self.counts[:, 1]) / totals
        est[totals == 0] = np.nan
        return est

    @property
    def missing(self) -> list[tuple[int, ...]]:
        """Setting vectors with no observed records."""
        out = []
        for idx in np.flatnonzero(self.counts.sum(axis=1) == 0):
            digits = []
            rem = int(idx)
            for _ in range(self.n_parties):
                digits.append(rem % 3)
                rem //= 3
            out.append(tuple(digits))
        return out

    def correlation(self, settings: Sequence[int]) -> float:
        """Estimated correlation for one setting vector.

        Raises:
            ValueError: if that setting has no records.
        """
        idx = self.setting_index(settings)
        total = self.counts[idx].sum()
        if total == 0:
            raise ValueError(f"no records for settings {tuple(settings)}")
        return float((self.counts[idx, 0] - self.counts[idx, 1]) / total)


def build_singlet() -> PureState:
    """The two-qubit singlet (|01> - |10>)/sqrt(2)."""
    amps = np.zeros(4, dtype=complex)
    amps[1] = 1 / math.sqrt(2)
    amps[2] = -1 / math.sqrt(2)
    return PureState(2, amps)


def build_ghz(n: int) -> PureState:
    """The n-qubit GHZ state (|0...0> + |1...1>)/sqrt(2), 2 <= n <= MAX_QUBITS."""
    if not 2 <= n <= MAX_QUBITS:
        raise ValueError(f"n must be in [2, {MAX_QUBITS}], got {n}")
    amps = np.zeros(2 ** n, dtype=complex)
    amps[0] = amps[-1] = 1 / math.sqrt(2)
    return PureState(n, amps)


def direction_observable(v: BlochVector) -> np.ndarray:
    """The single-qubit observable for a measurement direction: its
    components contracted with the Pauli vector."""
    return np.array([[v.z, v.x - 1j * v.y], [v.x + 1j * v.y, -v.z]])


def _apply_single_qubit(op: np.ndarray, amps: np.ndarray, qubit: int, n: int) -> np.ndarray:
    phi = amps.reshape((2,) * n)
    phi = np.tensordot(op, phi, axes=([1], [qubit]))
    return np.moveaxis(phi, 0, qubit).reshape(-1)


def exact_correlation(state: PureState, directions: Sequence[BlochVector],
                      noise: NoiseLevel) -> float:
    """Expectation of the product observable, scaled by the per-site
    visibility: gamma**N <state| prod_j (direction_j . sigma) |state>.

    Raises:
        ValueError: if the direction count differs from the qubit count.
    """
    if len(directions) != state.n_qubits:
        raise ValueError(f"state has {state.n_qubits} qubits, got "
                         f"{len(directions)} directions")
    phi = state.amplitudes
    for k, v in enumerate(directions):
        phi = _apply_single_qubit(direction_observable(v), phi, k, state.n_qubits)
    val = complex(np.vdot(state.amplitudes, phi))
    if abs(val.imag) > 1e-12:
        raise AssertionError(f"expectation has imaginary residue {val.imag}")
    return noise.gamma ** state.n_qubits * val.real


def _eigenbasis(v: BlochVector) -> np.ndarray:
    """Columns are the +1 / -1 eigenvectors of the direction observable."""
    c = math.sqrt(max(0.0, (1.0 + v.z) / 2.0))
    s = math.sqrt(max(0.0, (1.0 - v.z) / 2.0))
    phase = np.exp(1j * math.atan2(v.y, v.x)) if math.hypot(v.x, v.y) > 1e-15 else 1.0
    return np.array([[c, -s * np.conj(phase)], [s * phase, c]])


def sample_records(state: PureState, triads: Sequence[Triad], noise: NoiseLevel,
                   shots: int, rng: np.random.Generator) -> list[MeasurementRecord]:
    """Simulate the protocol: per shot, every party picks one of its three
    directions uniformly, joint outcomes follow the Born distribution, and
    each party's outcome is independently replaced by a fair coin with
    probability 1 - gamma (the visibility model of local depolarization).

    Outcome convention: eigenvalue +1 -> outcome 0, eigenvalue -1 -> 1.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    n = state.n_qubits
    if len(triads) != n:
        raise ValueError(f"expected {n} triads, got {len(triads)}")

    settings = rng.integers(0, 3, size=(shots, n))
    outcomes = np.empty((shots, n), dtype=np.int64)

    # Group shots by drawn setting vector; one basis change per group.
    idx = settings @ (3 ** np.arange(n))
    order = np.argsort(idx, kind="stable")
    bits = (np.arange(2 ** n)[:, None] >> (n - 1 - np.arange(n))) & 1
    start = 0
    while start < shots:
        stop = start
        cur = idx[order[start]]
        while stop < shots and idx[order[stop]] == cur:
            stop += 1
        rows = order[start:stop]
        svec = settings[rows[0]]
        phi = state.amplitudes
        for k in range(n):
            u = _eigenbasis(triads[k].directions[svec[k]])
            phi = _apply_single_qubit(u.conj().T, phi, k, n)
        probs = np.abs(phi) ** 2
        probs /= probs.sum()
        drawn = rng.choice(2 ** n, size=rows.size, p=probs)
        outcomes[rows] = bits[drawn]
        start = stop

    flip = rng.random((shots, n)) < (1.0 - noise.gamma)
    coins = rng.integers(0, 2, size=(shots, n))
    outcomes = np.where(flip, coins, outcomes)

    return [MeasurementRecord(tuple(int(s) for s in settings[i]),
                              tuple(int(o) for o in outcomes[i]))
            for i in range(shots)]


def estimate_correlations(records: Sequence[MeasurementRecord], n: int) -> FrequencyEstimate:
    """Tally parity frequencies per setting; the estimate per setting is
    the relative-frequency difference of even and odd parities."""
    counts = np.zeros((3 ** n, 2), dtype=np.int64)
    for rec in records:
        idx = FrequencyEstimate.setting_index(rec.settings)
        parity = sum(rec.outcomes) % 2
        counts[idx, parity] += 1
    return FrequencyEstimate(n_parties=n, counts=counts)
