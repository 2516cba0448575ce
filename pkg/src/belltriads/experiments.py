"""Seeded Monte Carlo experiments: violation probability versus noise and
party count, plus the cross-check suites tying the closed forms to the
exact state-vector path and the analytic region to the full search.

Reproducibility contract: the randomness of sample ``i`` is a fixed
counter range of a stream keyed by the seed, so results are bit-identical
for a given (n, gamma, samples, seed) no matter how the sample range is
partitioned across worker processes.  The environment variable
``BELL_THREADS`` caps the worker count without affecting output.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import mabk
from .bipartite import region_violates
from .correlations import NoiseLevel, batch_ghz_values, batch_singlet_values, singlet_tensor
from .geometry import canonicalize_pair, haar_random_triad, triad_matrices_from_uniforms
from .statevector import build_ghz, build_singlet, exact_correlation

# Samples per work unit; fixed so chunk boundaries never depend on the
# worker count.
CHUNK_SIZE = 16384

_MASK64 = (1 << 64) - 1


def default_samples(n: int) -> int:
    """Desk-scale default sample count per probability estimate; the cost
    of one sample grows as 6**n * 2**n."""
    return {2: 10 ** 6, 3: 10 ** 6, 4: 10 ** 5, 5: 10 ** 4}.get(n, 10 ** 3)


@dataclass(frozen=True)
class ProbabilityEstimate:
    """Monte Carlo violation probability with binomial standard error."""

    p_hat: float
    samples: int
    std_error: float
    violations: int


@dataclass(frozen=True)
class SweepConfig:
    """A gamma sweep: evenly spaced noise levels, one estimate per level."""

    n_parties: int
    gamma_min: float
    gamma_max: float
    steps: int
    samples_per_point: int
    seed: int
    state: str | None = None

    def __post_init__(self):
        if self.n_parties < 2:
            raise ValueError("n_parties must be >= 2")
        if not 0.0 < self.gamma_min <= self.gamma_max <= 1.0:
            raise ValueError("need 0 < gamma_min <= gamma_max <= 1")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.samples_per_point < 1:
            raise ValueError("samples_per_point must be >= 1")


@dataclass(frozen=True)
class SweepRow:
    gamma: float
    n_parties: int
    samples: int
    violations: int
    p_hat: float
    std_error: float


@dataclass(frozen=True)
class CrosscheckReport:
    """Outcome of comparing closed-form tensors against the state vector."""

    n: int
    trials: int
    tolerance: float
    max_discrepancy: float
    comparisons: int
    passed: bool


@dataclass(frozen=True)
class RegionReport:
    """Outcome of checking the analytic region against the full search."""

    samples: int
    gamma: float
    counterexamples: int
    region_rate: float
    search_rate: float
    passed: bool


def _resolve_workers(workers: int | None, n_chunks: int) -> int:
    cap = os.environ.get("BELL_THREADS")
    cap = int(cap) if cap else None
    if cap is not None and cap < 1:
        raise ValueError("BELL_THREADS must be a positive integer")
    if workers is None:
        workers = min(os.cpu_count() or 1, max(1, n_chunks // 4))
    workers = max(1, min(workers, n_chunks))
    if cap is not None:
        workers = min(workers, cap)
    return workers


def _words_per_sample(n: int) -> int:
    # 3 uniforms per party, padded up to the 4-word stream block so every
    # sample starts on a counter boundary.
    return -(-3 * n // 4) * 4


def _sample_uniforms(seed: int, n: int, start: int, stop: int) -> np.ndarray:
    """Uniforms for samples [start, stop): shape (stop-start, n, 3), a pure
    function of (seed, n, sample index)."""
    wps = _words_per_sample(n)
    bitgen = np.random.Philox(key=seed & _MASK64)
    bitgen.advance(start * (wps // 4))
    u = np.random.Generator(bitgen).random((stop - start) * wps)
    return u.reshape(stop - start, wps)[:, : 3 * n].reshape(stop - start, n, 3)


def _sample_triads(seed: int, n: int, start: int, stop: int) -> np.ndarray:
    return triad_matrices_from_uniforms(_sample_uniforms(seed, n, start, stop))


def _chunk_counts(args) -> np.ndarray:
    """Violation counts for one chunk of samples, one count per ratio
    threshold.  Top-level function so process pools can pickle it."""
    seed, n, state, start, stop, thresholds = args
    triads = _sample_triads(seed, n, start, stop)
    if state == "singlet":
        values = batch_singlet_values(triads, 1.0)
    else:
        values = batch_ghz_values(triads, 1.0)
    ratios = _batch_ratios(values, n)
    return np.array([(ratios > t).sum() for t in thresholds], dtype=np.int64)


def _batch_ratios(values: np.ndarray, n: int) -> np.ndarray:
    """Noiseless violation ratios, blocked so the labeling-value buffer
    stays small for large n."""
    bound = mabk.local_bound(n)
    rows = max(1, min(len(values), 8_000_000 // 6 ** n + 1))
    out = np.empty(len(values))
    for lo in range(0, len(values), rows):
        hi = min(lo + rows, len(values))
        out[lo:hi] = mabk.batch_max_abs_values(values[lo:hi], n) / bound
    return out


def _ratio_threshold(n: int, gamma: float) -> float:
    # Correlations scale exactly as gamma**n, so a configuration violates
    # at noise gamma iff its noiseless ratio clears this level.
    if gamma <= 0.0:
        return math.inf
    return (1.0 + mabk.VIOLATION_EPS) / gamma ** n


def _count_violations(n: int, gammas: list[float], samples: int, seed: int,
                      state: str, workers: int | None) -> np.ndarray:
    thresholds = tuple(_ratio_threshold(n, g) for g in gammas)
    chunks = [(seed, n, state, lo, min(lo + CHUNK_SIZE, samples), thresholds)
              for lo in range(0, samples, CHUNK_SIZE)]
    n_workers = _resolve_workers(workers, len(chunks))
    if n_workers <= 1:
        parts = [_chunk_counts(c) for c in chunks]
    else:
        mabk.weight_matrix(n)  # warm the cache before forking
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            parts = list(pool.map(_chunk_counts, chunks, chunksize=1))
    return np.sum(parts, axis=0)


def _resolve_state(n: int, state: str | None) -> str:
    if state is None:
        state = "singlet" if n == 2 else "ghz"
    if state not in ("singlet", "ghz"):
        raise ValueError(f"state must be 'singlet' or 'ghz', got {state!r}")
    if state == "singlet" and n != 2:
        raise ValueError("the singlet applies to n = 2 only")
    return state


def estimate_probability(n: int, noise: NoiseLevel, samples: int, seed: int,
                         state: str | None = None,
                         workers: int | None = None) -> ProbabilityEstimate:
    """Fraction of Haar-random measurement choices that violate some
    inequality of the family at the given noise level.

    Each sample draws one triad per party, builds the correlation tensor
    (singlet for n = 2 unless ``state='ghz'`` is requested, GHZ otherwise),
    and runs the full labeling sweep.  Deterministic for fixed
    (n, gamma, samples, seed) regardless of worker count.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    state = _resolve_state(n, state)
    violations = int(_count_violations(n, [noise.gamma], samples, seed, state,
                                       workers)[0])
    p_hat = violations / samples
    return ProbabilityEstimate(p_hat=p_hat, samples=samples,
                               std_error=math.sqrt(p_hat * (1 - p_hat) / samples),
                               violations=violations)


def gamma_sweep(config: SweepConfig, workers: int | None = None) -> list[SweepRow]:
    """One probability estimate per evenly spaced noise level, endpoints
    included (a single step stays at gamma_min).

    All rows of a sweep reuse the same sample set: correlations scale
    exactly as gamma**n, so one noiseless sweep yields every row, and each
    row matches a standalone :func:`estimate_probability` call with the
    same seed and sample count.
    """
    state = _resolve_state(config.n_parties, config.state)
    if config.steps == 1:
        gammas = [config.gamma_min]
    else:
        gammas = list(np.linspace(config.gamma_min, config.gamma_max, config.steps))
    counts = _count_violations(config.n_parties, gammas, config.samples_per_point,
                               config.seed, state, workers)
    rows = []
    for gamma, violations in zip(gammas, counts):
        p_hat = int(violations) / config.samples_per_point
        rows.append(SweepRow(gamma=float(gamma), n_parties=config.n_parties,
                             samples=config.samples_per_point,
                             violations=int(violations), p_hat=p_hat,
                             std_error=math.sqrt(p_hat * (1 - p_hat)
                                                 / config.samples_per_point)))
    return rows


def oracle_crosscheck(n: int, trials: int, tolerance: float, seed: int,
                      gammas: tuple[float, ...] = (1.0, 0.9, 0.5),
                      transverse_scale: float = 1.0) -> CrosscheckReport:
    """Compare every closed-form tensor entry against the exact product
    expectation on the state vector, over random triads and noise levels.

    For n = 2 both the singlet and the two-party GHZ forms are checked.
    ``transverse_scale`` rescales the closed form's transverse term; any
    value other than 1 makes the check fail by about half the transverse
    term, which is how the rescaled variant is documented to be wrong.
    """
    if not 2 <= n <= 10:
        raise ValueError("n must be between 2 and the dense-state cap (10)")
    rng = np.random.default_rng(seed)
    ghz_state = build_ghz(n)
    singlet_state = build_singlet() if n == 2 else None
    worst = 0.0
    comparisons = 0
    settings = [tuple(s) for s in np.ndindex(*(3,) * n)]
    for _ in range(trials):
        triads = [haar_random_triad(rng) for _ in range(n)]
        stack = np.stack([t.as_matrix() for t in triads])[None]
        for gamma in gammas:
            noise = NoiseLevel(gamma)
            closed = batch_ghz_values(stack, gamma, transverse_scale=transverse_scale)[0]
            closed_singlet = (batch_singlet_values(stack, gamma)[0]
                              if singlet_state is not None else None)
            for svec in settings:
                directions = [triads[k].directions[svec[k]] for k in range(n)]
                idx = sum(s * 3 ** k for k, s in enumerate(svec))
                exact = exact_correlation(ghz_state, directions, noise)
                worst = max(worst, abs(closed[idx] - exact))
                comparisons += 1
                if closed_singlet is not None:
                    exact_s = exact_correlation(singlet_state, directions, noise)
                    worst = max(worst, abs(closed_singlet[idx] - exact_s))
                    comparisons += 1
    return CrosscheckReport(n=n, trials=trials, tolerance=tolerance,
                            max_discrepancy=worst, comparisons=comparisons,
                            passed=worst <= tolerance)


def region_crosscheck(samples: int, noise: NoiseLevel, seed: int) -> RegionReport:
    """Verify on random pairs that the reduced-inequality region is sound:
    whenever the canonical point violates, the full 36-labeling search on
    the original pair must also report a violation."""
    rng = np.random.default_rng(seed)
    counterexamples = 0
    region_hits = 0
    search_hits = 0
    for _ in range(samples):
        t1, t2 = haar_random_triad(rng), haar_random_triad(rng)
        point, _ = canonicalize_pair(t1, t2)
        in_region = region_violates(point, noise)
        found = mabk.max_violation(singlet_tensor(t1, t2, noise)).violated
        region_hits += in_region
        search_hits += found
        if in_region and not found:
            counterexamples += 1
    return RegionReport(samples=samples, gamma=noise.gamma,
                        counterexamples=counterexamples,
                        region_rate=region_hits / samples,
                        search_rate=search_hits / samples,
                        passed=counterexamples == 0)
