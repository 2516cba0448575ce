"""The Mermin-Ardehali-Belinskii-Klyshko (MABK) family of N-party
correlation Bell inequalities, enumerated over all injective per-party
setting choices; for two parties the family reduces to the CHSH
inequalities.

A *labeling* assigns each party an ordered pair of distinct settings out
of its three.  Each of the 6**N labelings yields one Bell expression: a
signed sum over the 2**N binary setting words with coefficients drawn
from {0, +-1/sqrt(2), +-1}, bounded by 2**((N-1)/2) in every locally
causal model.  ``max_violation`` sweeps the full family over a
correlation tensor.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from .correlations import CorrelationTensor

Labeling = tuple[tuple[int, int], ...]

# Violations must clear the local bound by this relative margin; exactly
# aligned measurements reach the bound exactly and must not count.
VIOLATION_EPS = 1e-9

# Ordered pairs of distinct settings for one party, in enumeration order.
SETTING_PAIRS: tuple[tuple[int, int], ...] = ((0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1))

# Above this party count the coefficient matrix is kept sparse.
_DENSE_LIMIT = 5


@dataclass(frozen=True)
class MabkTerm:
    """One term of a Bell expression: the binary word ``r`` selecting each
    party's first or second setting, the integer weight index
    R = N + 1 - 2*sum(r), and the coefficient cos(R*pi/4)."""

    r: tuple[int, ...]
    weight_index: int
    coefficient: float


@dataclass(frozen=True)
class ViolationVerdict:
    """Result of maximizing |Bell value| over all labelings."""

    max_abs_value: float
    ratio: float
    best_labeling: Labeling
    violated: bool


def local_bound(n: int) -> float:
    """Bound satisfied by every locally causal model: 2**((n-1)/2)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 2.0 ** ((n - 1) / 2)


def tsirelson_threshold(n: int) -> float:
    """Critical visibility below which no measurement choice violates any
    inequality of the family: 2**(-(n-1)/(2n)).

    Follows from the quantum maximum 2**((n-1)/2) times the local bound
    together with correlations scaling as gamma**n.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    return 2.0 ** (-(n - 1) / (2 * n))


def enumerate_labelings(n: int) -> Iterator[Labeling]:
    """All 6**n labelings, lexicographic in (party, ordered pair)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return itertools.product(SETTING_PAIRS, repeat=n)


def labeling_from_index(n: int, index: int) -> Labeling:
    """The labeling at a given position of the enumeration order."""
    if not 0 <= index < 6 ** n:
        raise ValueError(f"labeling index {index} out of range for n={n}")
    digits = []
    for k in range(n):
        digits.append(SETTING_PAIRS[(index // 6 ** (n - 1 - k)) % 6])
    return tuple(digits)


def _coefficient(n: int, popcount: int) -> float:
    # cos(R*pi/4) for R = n + 1 - 2*popcount, from the exact eighth-circle
    # table so repeated terms are bit-identical.
    table = (1.0, math.sqrt(0.5), 0.0, -math.sqrt(0.5), -1.0, -math.sqrt(0.5), 0.0,
             math.sqrt(0.5))
    return table[(n + 1 - 2 * popcount) % 8]


def mabk_terms(n: int) -> list[MabkTerm]:
    """The 2**n terms shared by every labeling of n parties."""
    out = []
    for r in itertools.product((0, 1), repeat=n):
        weight_index = n + 1 - 2 * sum(r)
        out.append(MabkTerm(r=r, weight_index=weight_index,
                            coefficient=_coefficient(n, sum(r))))
    return out


def _validate_labeling(n: int, labeling: Labeling) -> None:
    if len(labeling) != n:
        raise ValueError(f"labeling has {len(labeling)} parties, tensor has {n}")
    for pair in labeling:
        if pair[0] == pair[1] or not all(s in (0, 1, 2) for s in pair):
            raise ValueError(f"labeling pair {pair} is not an ordered pair of "
                             "distinct settings")


def mabk_value(tensor: CorrelationTensor, labeling: Labeling) -> float:
    """Bell value of one labeling: the coefficient-weighted sum of the
    tensor entries the labeling selects.  Zero-coefficient terms are
    skipped."""
    n = tensor.n_parties
    _validate_labeling(n, labeling)
    powers = [3 ** k for k in range(n)]
    total = 0.0
    for term in mabk_terms(n):
        if term.coefficient == 0.0:
            continue
        idx = sum(labeling[k][term.r[k]] * powers[k] for k in range(n))
        total += term.coefficient * float(tensor.values[idx])
    return total


@lru_cache(maxsize=8)
def weight_matrix(n: int):
    """Coefficient matrix W with one column per labeling, so that the
    vector of all 6**n Bell values is ``tensor.values @ W``.

    Dense for small n, sparse CSC above ``_DENSE_LIMIT`` parties.
    """
    pairs = np.array(SETTING_PAIRS, dtype=np.int64)  # (6, 2)
    lab_idx = np.arange(6 ** n, dtype=np.int64)
    # digit k of the labeling index selects party k's ordered pair
    digits = (lab_idx[:, None] // (6 ** (n - 1 - np.arange(n)))) % 6  # (6^n, n)
    rows_list, cols_list, vals_list = [], [], []
    powers = 3 ** np.arange(n, dtype=np.int64)
    for r in itertools.product((0, 1), repeat=n):
        coeff = _coefficient(n, sum(r))
        if coeff == 0.0:
            continue
        chosen = pairs[digits, list(r)]  # (6^n, n) setting per party
        rows_list.append(chosen @ powers)
        cols_list.append(lab_idx)
        vals_list.append(np.full(6 ** n, coeff))
    rows = np.concatenate(rows_list)
    cols = np.concatenate(cols_list)
    vals = np.concatenate(vals_list)
    if n <= _DENSE_LIMIT:
        w = np.zeros((3 ** n, 6 ** n))
        np.add.at(w, (rows, cols), vals)
        return w
    from scipy import sparse

    return sparse.csc_matrix((vals, (rows, cols)), shape=(3 ** n, 6 ** n))


def batch_max_abs_values(values: np.ndarray, n: int) -> np.ndarray:
    """Maximum |Bell value| over all labelings for a batch of tensors.

    Args:
        values: shape (S, 3**n) of correlation tensor entries.
        n: party count.

    Returns:
        Array of shape (S,): per-tensor maximum of |value| over the family.
    """
    products = values @ weight_matrix(n)
    products = np.asarray(products)
    return np.max(np.abs(products), axis=1)


def max_violation(tensor: CorrelationTensor) -> ViolationVerdict:
    """Sweep the full labeling family and report the maximal violation.

    The verdict's ``ratio`` is the maximal |value| over the local bound;
    a configuration counts as violating only when the ratio clears
    1 + VIOLATION_EPS.  Ties pick the lexicographically lowest labeling.
    """
    n = tensor.n_parties
    products = np.asarray(tensor.values @ weight_matrix(n)).reshape(-1)
    best = int(np.argmax(np.abs(products)))
    max_abs = float(abs(products[best]))
    bound = local_bound(n)
    ratio = max_abs / bound
    return ViolationVerdict(max_abs_value=max_abs, ratio=ratio,
                            best_labeling=labeling_from_index(n, best),
                            violated=ratio > 1.0 + VIOLATION_EPS)
