"""Closed-form click statistics for a coherent-state input.

Everything depends on the input only through the mean photon number
|alpha|**2, so all functions take the amplitude magnitude; the phase is
irrelevant and never stored.  A multiplexer of degree N gives every detector
the vacuum-persistence probability d = exp(-|alpha|**2/N), hence click
probability c = 1 - d, and each branch of N/2 detectors carries the click
odds C = (N/2) c/d = (N/2) (exp(|alpha|**2/N) - 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .stats import (
    JointClickDistribution,
    MultiplexerConfig,
    PostSelectedDistribution,
    binomial_joint,
    cp_from_odds,
    post_selected_from_odds,
    qb_from_odds,
)

# exp() argument above which the branch odds exceed double range
ODDS_OVERFLOW_THRESHOLD = 700.0


def _checked_amplitude(alpha: float) -> float:
    alpha = float(alpha)
    if not math.isfinite(alpha) or alpha < 0.0:
        raise ValueError(f"amplitude magnitude must be finite and >= 0, got {alpha!r}")
    return alpha


def click_probabilities(alpha: float, config: MultiplexerConfig) -> tuple[float, float]:
    """Per-detector click and no-click probabilities (c, d).

    c = 1 - exp(-|alpha|**2/N) via expm1, so small amplitudes keep full
    relative precision; the pair is nudged by at most one ulp on the larger
    member so that c + d == 1 holds exactly.
    """
    alpha = _checked_amplitude(alpha)
    x = alpha * alpha / config.degree
    c = -math.expm1(-x)
    d = math.exp(-x)
    if c + d != 1.0:
        if c >= d:
            c = 1.0 - d
        else:
            d = 1.0 - c
    return c, d


def bare_joint(alpha: float, config: MultiplexerConfig) -> JointClickDistribution:
    """Joint click table before post-selection.

    Branch counts are independent Binomial(N/2, c) draws; the un-post-selected
    table is therefore exactly binomial and has zero sub-binomiality.
    """
    c, _ = click_probabilities(alpha, config)
    return binomial_joint(config, c)


def branch_odds(alpha: float, config: MultiplexerConfig) -> float:
    """Branch click odds C = (N/2)(exp(|alpha|**2/N) - 1).

    Raises OverflowError once |alpha|**2/N exceeds the double-precision exp
    range; callers should then use asymptotics() or a larger degree.
    """
    alpha = _checked_amplitude(alpha)
    x = alpha * alpha / config.degree
    if x > ODDS_OVERFLOW_THRESHOLD:
        raise OverflowError(
            f"|alpha|^2/N = {x:.6g} exceeds {ODDS_OVERFLOW_THRESHOLD:g}; the branch "
            "odds overflow double precision (use asymptotics() or a larger degree)"
        )
    return (config.degree / 2.0) * math.expm1(x)


def _branch_odds_or_inf(alpha: float, config: MultiplexerConfig) -> float:
    alpha = _checked_amplitude(alpha)
    x = alpha * alpha / config.degree
    if x > ODDS_OVERFLOW_THRESHOLD:
        return math.inf
    return (config.degree / 2.0) * math.expm1(x)


def post_selected_joint(alpha: float, config: MultiplexerConfig) -> PostSelectedDistribution:
    """Post-selected 2x2 table C**(k1+k2) / (C+1)**2.

    Equals post_select(bare_joint(alpha, config)) entry-wise; propagates the
    branch-odds OverflowError.
    """
    return post_selected_from_odds(branch_odds(alpha, config))


def qb_closed_form(alpha: float, config: MultiplexerConfig) -> float:
    """Post-selected sub-binomiality -(1-2/N)C / ((1-2/N)C + 1).

    Total on all valid inputs: exactly 0 for N = 2 or alpha = 0, strictly
    negative otherwise, and -1 in the overflowing strong-field limit.
    """
    return qb_from_odds(_branch_odds_or_inf(alpha, config), config.degree)


def cp_closed_form(alpha: float, config: MultiplexerConfig) -> float:
    """Post-selected coincident probability (C/(C+1))**2; total like qb_closed_form."""
    return cp_from_odds(_branch_odds_or_inf(alpha, config))


@dataclass(frozen=True)
class QuantumAsymptotics:
    """Infinite-degree limits: C, sub-binomiality and coincident probability."""

    c_inf: float
    qb_inf: float
    cp_inf: float


def asymptotics(alpha: float) -> QuantumAsymptotics:
    """Limits as the degree grows: C -> |alpha|**2/2, Q_B -> -C/(C+1), CP -> Q_B**2.

    The identity qb_inf**2 == cp_inf holds bit-exactly by construction.
    """
    alpha = _checked_amplitude(alpha)
    c_inf = alpha * alpha / 2.0
    ratio = c_inf / (c_inf + 1.0)
    return QuantumAsymptotics(c_inf=c_inf, qb_inf=-ratio, cp_inf=ratio * ratio)


__all__ = [
    "QuantumAsymptotics",
    "asymptotics",
    "bare_joint",
    "branch_odds",
    "click_probabilities",
    "cp_closed_form",
    "post_selected_joint",
    "qb_closed_form",
]
