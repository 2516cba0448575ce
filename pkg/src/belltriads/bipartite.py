"""Analytic machinery for the two-party case: the three reduced
inequalities on the canonical angles, the violation-region indicator, its
probability integral, and the closed-form non-violation bound.

After canonicalization a pair of triads is described by a point
(theta, chi_minus, chi_plus) in the box [0, pi/3] x [0, pi/4] x [0, pi/2].
Within that box only three members of the 36-inequality family can be
violated; two collapse to a single condition on chi_minus and the third
involves the intermediates ``a`` and ``b`` below.  The Haar measure on
triad orientations induces the sin(theta)-weighted uniform density on the
box, which is what the probability integral uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .correlations import NoiseLevel
from .geometry import (REGION_CHI_MINUS_MAX, REGION_CHI_PLUS_MAX, REGION_THETA_MAX,
                       CanonicalBipartite)
from .mabk import Labeling

# Visibility floor below which the closed-form non-violation bound holds.
BOUND_GAMMA_MIN = 2.0 / 18.0 ** 0.25

# The three labelings that remain testable in the canonical region: two
# differ only in which party's pair is reversed (the chi_minus condition),
# the third mixes the spare setting in (the a/b condition).
REDUCED_LABELINGS: tuple[Labeling, ...] = (
    ((0, 1), (1, 0)),
    ((1, 0), (0, 1)),
    ((2, 1), (1, 2)),
)


@dataclass(frozen=True)
class AnalyticIntermediates:
    """The two auxiliary amplitudes entering the third reduced inequality:
    a = cos(chi_minus/2) cos(theta/2), b = cos(chi_plus/2) sin(theta/2)."""

    a: float
    b: float


def analytic_ab(point: CanonicalBipartite) -> AnalyticIntermediates:
    """Evaluate the auxiliary amplitudes at a canonical point."""
    return AnalyticIntermediates(
        a=math.cos(point.chi_minus / 2) * math.cos(point.theta / 2),
        b=math.cos(point.chi_plus / 2) * math.sin(point.theta / 2),
    )


def _check_gamma_positive(noise: NoiseLevel) -> float:
    if noise.gamma <= 0.0:
        raise ValueError("gamma must be positive; the inequalities involve gamma**-2")
    return noise.gamma


def region_violates(point: CanonicalBipartite, noise: NoiseLevel) -> bool:
    """Whether a canonical point violates either reduced inequality.

    True iff cos^2(theta/2) sin(chi_minus + pi/4) > 1/(sqrt(2) gamma^2)
    or |a^2 - b^2 + 2ab| > 1/gamma^2.  The mirrored branch with
    sin(chi_minus - pi/4) is never violated inside the region (verified on
    a grid in the tests), so it is not checked.
    """
    gamma = _check_gamma_positive(noise)
    first = math.cos(point.theta / 2) ** 2 * math.sin(point.chi_minus + math.pi / 4)
    if first > 2 ** -0.5 / gamma ** 2:
        return True
    ab = analytic_ab(point)
    return abs(ab.a ** 2 - ab.b ** 2 + 2 * ab.a * ab.b) > 1.0 / gamma ** 2


def chi_threshold(theta: float, noise: NoiseLevel) -> float:
    """The chi_minus level above which the first reduced inequality is
    violated at the given theta.

    Returns pi/4 (no chi_minus in the region violates) when the arcsine
    argument exceeds 1.
    """
    if not 0.0 <= theta <= REGION_THETA_MAX + 1e-12:
        raise ValueError(f"theta outside [0, pi/3]: {theta!r}")
    gamma = _check_gamma_positive(noise)
    arg = 2 ** -0.5 / (gamma ** 2 * math.cos(theta / 2) ** 2)
    if arg > 1.0:
        return math.pi / 4
    return math.asin(arg) - math.pi / 4


def theta_cut(noise: NoiseLevel) -> float:
    """The theta below which near-aligned configurations can survive
    without a violation: arccos(gamma**(1/6))."""
    gamma = _check_gamma_positive(noise)
    return math.acos(gamma ** (1.0 / 6.0))


def nonviolation_bound(noise: NoiseLevel) -> float:
    """Closed-form upper bound (1 - gamma**(1/6)) / 4 on the probability of
    not violating any inequality, valid for gamma >= 2/18**(1/4)."""
    gamma = noise.gamma
    if gamma < BOUND_GAMMA_MIN - 1e-12:
        raise ValueError(f"bound requires gamma >= {BOUND_GAMMA_MIN:.6f}, got {gamma!r}")
    return (1.0 - gamma ** (1.0 / 6.0)) / 4.0


def _region_mask(theta: np.ndarray, chi_minus: np.ndarray, chi_plus: np.ndarray,
                 gamma: float) -> np.ndarray:
    """Vectorized indicator over a (theta, chi_minus, chi_plus) grid slice;
    broadcasts its arguments."""
    c1 = 2 ** -0.5 / gamma ** 2
    c2 = 1.0 / gamma ** 2
    a = np.cos(chi_minus / 2) * np.cos(theta / 2)
    b = np.cos(chi_plus / 2) * np.sin(theta / 2)
    first = np.cos(theta / 2) ** 2 * np.sin(chi_minus + math.pi / 4) > c1
    second = np.abs(a * a - b * b + 2 * a * b) > c2
    return first | second


def violation_probability_integral(noise: NoiseLevel, resolution: int = 256) -> float:
    """Probability that a Haar-random configuration violates a Bell
    inequality, as a midpoint-rule integral of the region indicator over
    the canonical box with sin(theta) weight.

    The normalization is the same-grid midpoint estimate of the weighted
    box volume (whose exact value is pi**2/16), so a grid on which every
    cell violates integrates to exactly 1.

    Args:
        noise: visibility, gamma > 0.
        resolution: grid points per axis (>= 64).
    """
    gamma = _check_gamma_positive(noise)
    if resolution < 64:
        raise ValueError(f"resolution must be >= 64, got {resolution}")
    theta = (np.arange(resolution) + 0.5) * (REGION_THETA_MAX / resolution)
    chi_minus = (np.arange(resolution) + 0.5) * (REGION_CHI_MINUS_MAX / resolution)
    chi_plus = (np.arange(resolution) + 0.5) * (REGION_CHI_PLUS_MAX / resolution)
    weights = np.sin(theta)
    total = 0.0
    for i in range(resolution):
        mask = _region_mask(theta[i], chi_minus[:, None], chi_plus[None, :], gamma)
        total += weights[i] * mask.sum()
    return float(total / (weights.sum() * resolution * resolution))
