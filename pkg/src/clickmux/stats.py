"""Model-agnostic two-branch click statistics.

A balanced multiplexer splits one input over N = 2**m on/off detectors; the
first beamsplitter defines two branches of N/2 detectors each.  This module
holds the joint distribution of per-branch click counts (k1, k2), the
post-selection that keeps only no-click and single-click branches, and the
two figures of merit computed from the post-selected table: sub-binomiality
and the coincident probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import binom

# probabilities are O(1), so comparisons use an absolute tolerance
PROB_ATOL = 1e-12
# scipy's binomial pmf rejects probabilities at or below the normal-float
# boundary; below this the two-term expansion is exact to double precision
_TINY_CLICK_PROB = 1e-300
# retained mass at or below this is treated as no acceptance at all
RETAINED_MASS_FLOOR = 1e-300
# mean click numbers this close to 0 or N make sub-binomiality a 0/0
DEGENERATE_MEAN_ATOL = 1e-15


class ZeroAcceptance(Exception):
    """Post-selection retained essentially no probability mass."""


class DegenerateMean(Exception):
    """Mean click number sits at 0 or N, where sub-binomiality is undefined."""


@dataclass(frozen=True)
class MultiplexerConfig:
    """Balanced splitter tree of depth m feeding N = 2**m on/off detectors."""

    depth: int

    def __post_init__(self):
        if not isinstance(self.depth, int) or isinstance(self.depth, bool):
            raise ValueError(f"depth must be an integer, got {self.depth!r}")
        if self.depth < 1:
            raise ValueError(f"depth must be >= 1, got {self.depth}")

    @property
    def degree(self) -> int:
        """Number of on/off detectors, N = 2**depth."""
        return 2 ** self.depth

    @property
    def branch_size(self) -> int:
        """Detectors per branch, N/2."""
        return self.degree // 2

    @classmethod
    def from_degree(cls, degree: int) -> "MultiplexerConfig":
        """Build from the detector count N, which must be a power of two >= 2."""
        if not isinstance(degree, int) or isinstance(degree, bool):
            raise ValueError(f"degree must be an integer, got {degree!r}")
        if degree < 2 or degree & (degree - 1):
            raise ValueError(f"degree must be a power of two >= 2, got {degree}")
        return cls(degree.bit_length() - 1)


def _frozen_probability_table(table, shape: tuple[int, int]) -> np.ndarray:
    arr = np.array(table, dtype=float)
    if arr.shape != shape:
        raise ValueError(f"table must have shape {shape}, got {arr.shape}")
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError("table entries must lie in [0, 1]")
    total = float(arr.sum())
    if abs(total - 1.0) > PROB_ATOL:
        raise ValueError(f"table must sum to 1 within {PROB_ATOL}, got {total!r}")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class JointClickDistribution:
    """Probability table over per-branch click counts, k1, k2 in 0..N/2."""

    config: MultiplexerConfig
    table: np.ndarray

    def __post_init__(self):
        size = self.config.branch_size + 1
        object.__setattr__(
            self, "table", _frozen_probability_table(self.table, (size, size))
        )


@dataclass(frozen=True, eq=False)
class PostSelectedDistribution:
    """Normalized 2x2 table over k1, k2 in {0, 1} after post-selection."""

    table: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "table", _frozen_probability_table(self.table, (2, 2))
        )


@dataclass(frozen=True)
class MeasureReport:
    """Moments of the total click count plus both figures of merit."""

    mean_clicks: float
    variance_clicks: float
    q_b: float
    cp: float


def binomial_joint(config: MultiplexerConfig, click_prob: float) -> JointClickDistribution:
    """Joint table for detectors clicking i.i.d. with the given probability.

    Each branch count is Binomial(N/2, click_prob), independent across
    branches; this is the bare (un-post-selected) distribution shared by
    both the coherent-state and the classical threshold-detector model.
    """
    click_prob = float(click_prob)
    if not 0.0 <= click_prob <= 1.0 or not math.isfinite(click_prob):
        raise ValueError(f"click probability must be in [0, 1], got {click_prob!r}")
    b = config.branch_size
    if click_prob < _TINY_CLICK_PROB:
        # below the normal float range only the no-click and single-click
        # entries survive to leading order
        pmf = np.zeros(b + 1)
        pmf[0] = 1.0 - b * click_prob
        pmf[1] = b * click_prob
    else:
        pmf = binom.pmf(np.arange(b + 1), b, click_prob)
    return JointClickDistribution(config, np.outer(pmf, pmf))


def post_selected_from_odds(odds: float) -> PostSelectedDistribution:
    """Product-form 2x2 table odds**(k1+k2) / (odds+1)**2 from branch odds.

    Built as the outer product of (1, odds)/(odds+1) per branch, which stays
    accurate for very large odds; odds=inf yields all mass at (1, 1).
    """
    if math.isnan(odds) or odds < 0.0:
        raise ValueError(f"branch odds must be >= 0, got {odds!r}")
    if math.isinf(odds):
        on, off = 1.0, 0.0
    else:
        on = odds / (odds + 1.0)
        off = 1.0 / (odds + 1.0)
    w = np.array([off, on])
    return PostSelectedDistribution(np.outer(w, w))


def post_select(
    dist: JointClickDistribution | PostSelectedDistribution,
) -> PostSelectedDistribution:
    """Restrict to k1, k2 in {0, 1} and renormalize.

    Idempotent: applying it to an already post-selected table returns the
    same table.  Raises ZeroAcceptance when (essentially) nothing survives.
    """
    retained = np.array(dist.table[:2, :2], dtype=float)
    mass = float(retained.sum())
    if mass <= RETAINED_MASS_FLOOR:
        raise ZeroAcceptance(
            f"retained probability mass {mass!r} is at or below {RETAINED_MASS_FLOOR}"
        )
    return PostSelectedDistribution(retained / mass)


def total_click_moments(
    dist: JointClickDistribution | PostSelectedDistribution,
) -> tuple[float, float]:
    """Mean and variance of the total click count k = k1 + k2."""
    table = dist.table
    counts = np.arange(table.shape[0])
    k_total = np.add.outer(counts, counts)
    mean = float((k_total * table).sum())
    variance = float(((k_total - mean) ** 2 * table).sum())
    return mean, variance


def sub_binomiality(
    dist: JointClickDistribution | PostSelectedDistribution, degree: int
) -> float:
    """N <(dk)^2> / (<k>(N - <k>)) - 1 for a multiplexer of the given degree.

    Zero for any binomial click table; negative values signal sub-binomial
    statistics.  Raises DegenerateMean when the mean sits at 0 or N, where
    the measure is a 0/0 (the product-form closed form handles those limits,
    see qb_from_odds).
    """
    if not isinstance(degree, int) or degree < 2:
        raise ValueError(f"degree must be an integer >= 2, got {degree!r}")
    if isinstance(dist, JointClickDistribution) and degree != dist.config.degree:
        raise ValueError(
            f"degree {degree} does not match the distribution's degree "
            f"{dist.config.degree}"
        )
    table = dist.table
    counts = np.arange(table.shape[0])
    k_total = np.add.outer(counts, counts)
    mean = float((k_total * table).sum())
    # N - <k> as a direct positive-term sum, avoiding the cancellation that
    # would otherwise dominate when the mean saturates near N
    complement = float(((degree - k_total) * table).sum())
    variance = float(((k_total - mean) ** 2 * table).sum())
    if mean <= DEGENERATE_MEAN_ATOL or complement <= DEGENERATE_MEAN_ATOL:
        raise DegenerateMean(
            f"mean click number {mean!r} is degenerate for degree {degree}"
        )
    return degree * variance / (mean * complement) - 1.0


def coincident_probability(dist: PostSelectedDistribution) -> float:
    """Post-selected probability that both branches click, Pr(1, 1)."""
    return float(dist.table[1, 1])


def measure(dist: PostSelectedDistribution, degree: int) -> MeasureReport:
    """Assemble moments, sub-binomiality and coincident probability."""
    mean, variance = total_click_moments(dist)
    return MeasureReport(
        mean_clicks=mean,
        variance_clicks=variance,
        q_b=sub_binomiality(dist, degree),
        cp=coincident_probability(dist),
    )


def qb_from_odds(odds: float, degree: int) -> float:
    """Sub-binomiality of the product-form table: -(1-2/N)C / ((1-2/N)C + 1).

    Total: returns 0 for degree 2 or zero odds, and -1 in the infinite-odds
    limit.  Equals sub_binomiality(post_selected_from_odds(odds), degree)
    wherever the latter is defined.
    """
    if math.isnan(odds) or odds < 0.0:
        raise ValueError(f"branch odds must be >= 0, got {odds!r}")
    if not isinstance(degree, int) or degree < 2:
        raise ValueError(f"degree must be an integer >= 2, got {degree!r}")
    if degree == 2:
        return 0.0
    t = (1.0 - 2.0 / degree) * odds
    if math.isinf(t):
        return -1.0
    return -t / (t + 1.0)


def cp_from_odds(odds: float) -> float:
    """Coincident probability of the product-form table: (C/(C+1))**2."""
    if math.isnan(odds) or odds < 0.0:
        raise ValueError(f"branch odds must be >= 0, got {odds!r}")
    if math.isinf(odds):
        return 1.0
    ratio = odds / (odds + 1.0)
    return ratio * ratio
