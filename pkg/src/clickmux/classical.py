"""Classical stochastic model: threshold detectors on an infinitely divisible intensity.

The multiplexer divides an input intensity I uniformly, so each of the N
detectors sees I/N.  A detector clicks with probability
tanh(((I - I_th)/I_th) f(beta)) strictly above its threshold I_th and with
probability exactly zero at or below it; f(beta) = beta/(1-beta) is the
stochastic (ionization) factor.  The hard zero below threshold is what makes
the coincident probability drop to exactly 0 once I/N <= I_th.

All intensities here are expressed in threshold units (I_th = 1 by default);
the click response depends only on I/I_th, so the scale is redundant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.integrate import quad

from .stats import (
    JointClickDistribution,
    MultiplexerConfig,
    PostSelectedDistribution,
    binomial_joint,
    post_selected_from_odds,
)

# exp() argument ceiling for the stable odds evaluation
ODDS_OVERFLOW_THRESHOLD = 700.0
# requested relative accuracy of the averaged click probability
QUAD_RTOL = 1e-8
# tabulated densities are renormalized when |integral - 1| is below this
TABULATED_NORMALIZATION_TOL = 1e-6
# exponential tail mass beyond mean*EXPONENTIAL_TAIL_FACTOR is < 1e-14 relative
EXPONENTIAL_TAIL_FACTOR = 40.0


class OddsDiverged(Exception):
    """Classical branch odds exceed double range (intensity far above threshold)."""


class QuadratureFailure(Exception):
    """Adaptive quadrature could not reach the requested tolerance."""


@dataclass(frozen=True)
class DetectorModel:
    """On/off detector with threshold intensity and ionization factor beta."""

    threshold: float = 1.0
    ionization: float = 0.5

    def __post_init__(self):
        if not math.isfinite(self.threshold) or self.threshold <= 0.0:
            raise ValueError(f"threshold must be > 0, got {self.threshold!r}")
        if not 0.0 <= self.ionization < 1.0:
            # beta = 1 would make the response a step with no finite parameter;
            # callers wanting it can use 1 - 1e-12
            raise ValueError(f"ionization must be in [0, 1), got {self.ionization!r}")

    @property
    def stochastic_factor(self) -> float:
        """f(beta) = beta / (1 - beta)."""
        return self.ionization / (1.0 - self.ionization)


def click_probability(det: DetectorModel, intensity: float) -> float:
    """Pr(on | I): exactly 0 at or below threshold, tanh response above it."""
    intensity = float(intensity)
    if not math.isfinite(intensity) or intensity < 0.0:
        raise ValueError(f"intensity must be finite and >= 0, got {intensity!r}")
    if intensity <= det.threshold:
        return 0.0
    z = (intensity - det.threshold) / det.threshold * det.stochastic_factor
    return math.tanh(z)


def branch_odds_classical(
    det: DetectorModel, input_intensity: float, config: MultiplexerConfig
) -> float:
    """Branch odds C = (N/2) p/(1-p) with p the per-detector click probability.

    The odds ratio tanh(z)/(1 - tanh(z)) equals expm1(2z)/2, which stays
    finite and accurate long after tanh itself saturates to 1 in double
    precision.  Raises OddsDiverged only when the odds genuinely exceed the
    double range (intensity astronomically above threshold).
    """
    input_intensity = float(input_intensity)
    if not math.isfinite(input_intensity) or input_intensity < 0.0:
        raise ValueError(
            f"input intensity must be finite and >= 0, got {input_intensity!r}"
        )
    per_detector = input_intensity / config.degree
    if per_detector <= det.threshold:
        return 0.0
    z = (per_detector - det.threshold) / det.threshold * det.stochastic_factor
    if 2.0 * z > ODDS_OVERFLOW_THRESHOLD:
        raise OddsDiverged(
            f"click odds overflow at per-detector intensity {per_detector:.6g} "
            f"(threshold {det.threshold:g}, beta {det.ionization:g})"
        )
    return (config.degree / 4.0) * math.expm1(2.0 * z)


def classical_bare_joint(
    det: DetectorModel, input_intensity: float, config: MultiplexerConfig
) -> JointClickDistribution:
    """Bare joint table: branch counts Binomial(N/2, p), binomial statistics."""
    p = click_probability(det, float(input_intensity) / config.degree)
    return binomial_joint(config, p)


def classical_post_selected(
    det: DetectorModel, input_intensity: float, config: MultiplexerConfig
) -> PostSelectedDistribution:
    """Post-selected 2x2 table C**(k1+k2)/(C+1)**2 with the classical odds."""
    return post_selected_from_odds(branch_odds_classical(det, input_intensity, config))


# ---------------------------------------------------------------------------
# input-intensity laws p(I)
# ---------------------------------------------------------------------------


class IntensityDistribution:
    """Input-intensity law p(I) supported on [0, inf), in threshold units."""

    def pdf(self, intensity: float) -> float:
        raise NotImplementedError

    def support(self) -> tuple[float, float]:
        """(lo, hi) bounds of the support; hi may be inf."""
        raise NotImplementedError

    def quad_upper(self, lower: float) -> float:
        """Finite upper integration limit covering all but negligible tail mass."""
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size: int | None = None):
        raise NotImplementedError

    def label(self) -> str:
        """Canonical id, matching the CLI --source grammar."""
        raise NotImplementedError


@dataclass(frozen=True)
class DeltaIntensity(IntensityDistribution):
    """Deterministic intensity: all mass at a single value."""

    value: float

    def __post_init__(self):
        if not math.isfinite(self.value) or self.value < 0.0:
            raise ValueError(f"delta intensity must be finite and >= 0, got {self.value!r}")

    def support(self):
        return self.value, self.value

    def sample(self, rng, size=None):
        if size is None:
            return self.value
        return np.full(size, self.value)

    def label(self):
        return f"delta:{self.value:g}"


@dataclass(frozen=True)
class UniformIntensity(IntensityDistribution):
    """Uniform density on [low, high)."""

    low: float
    high: float

    def __post_init__(self):
        if not (0.0 <= self.low < self.high) or not math.isfinite(self.high):
            raise ValueError(
                f"uniform support must satisfy 0 <= low < high < inf, "
                f"got [{self.low!r}, {self.high!r})"
            )

    def pdf(self, intensity):
        if self.low <= intensity <= self.high:
            return 1.0 / (self.high - self.low)
        return 0.0

    def support(self):
        return self.low, self.high

    def quad_upper(self, lower):
        return self.high

    def sample(self, rng, size=None):
        return rng.uniform(self.low, self.high, size)

    def label(self):
        return f"uniform:{self.low:g},{self.high:g}"


@dataclass(frozen=True)
class ExponentialIntensity(IntensityDistribution):
    """Exponential density exp(-I/mean)/mean on [0, inf)."""

    mean: float

    def __post_init__(self):
        if not math.isfinite(self.mean) or self.mean <= 0.0:
            raise ValueError(f"exponential mean must be > 0, got {self.mean!r}")

    def pdf(self, intensity):
        if intensity < 0.0:
            return 0.0
        return math.exp(-intensity / self.mean) / self.mean

    def support(self):
        return 0.0, math.inf

    def quad_upper(self, lower):
        return lower + EXPONENTIAL_TAIL_FACTOR * self.mean

    def sample(self, rng, size=None):
        return rng.exponential(self.mean, size)

    def label(self):
        return f"exp:{self.mean:g}"


@dataclass(frozen=True, eq=False)
class TabulatedIntensity(IntensityDistribution):
    """Piecewise-linear density over an increasing intensity grid.

    The trapezoid integral (exact for a piecewise-linear density) must be 1
    within TABULATED_NORMALIZATION_TOL; small deviations are renormalized on
    load, larger ones are rejected.
    """

    grid: np.ndarray
    density: np.ndarray
    source_label: str = "tabulated"

    def __post_init__(self):
        xs = np.asarray(self.grid, dtype=float)
        ys = np.asarray(self.density, dtype=float)
        if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 2:
            raise ValueError("tabulated source needs matching 1-d grids of >= 2 points")
        if xs[0] < 0.0 or np.any(np.diff(xs) <= 0.0):
            raise ValueError("intensity grid must be increasing and start at >= 0")
        if np.any(~np.isfinite(xs)) or np.any(~np.isfinite(ys)) or np.any(ys < 0.0):
            raise ValueError("density values must be finite and >= 0")
        total = float(np.trapezoid(ys, xs))
        if abs(total - 1.0) >= TABULATED_NORMALIZATION_TOL:
            raise ValueError(
                f"tabulated density integrates to {total!r}; must be 1 within "
                f"{TABULATED_NORMALIZATION_TOL}"
            )
        ys = ys / total
        xs.flags.writeable = False
        ys.flags.writeable = False
        object.__setattr__(self, "grid", xs)
        object.__setattr__(self, "density", ys)

    def pdf(self, intensity):
        return float(np.interp(intensity, self.grid, self.density, left=0.0, right=0.0))

    def support(self):
        return float(self.grid[0]), float(self.grid[-1])

    def quad_upper(self, lower):
        return float(self.grid[-1])

    def sample(self, rng, size=None):
        scalar = size is None
        u = rng.random(1 if scalar else size)
        xs, ys = self.grid, self.density
        widths = np.diff(xs)
        seg_mass = 0.5 * (ys[:-1] + ys[1:]) * widths
        cum = np.concatenate(([0.0], np.cumsum(seg_mass)))
        targets = u * cum[-1]
        idx = np.clip(np.searchsorted(cum, targets, side="right") - 1, 0, len(widths) - 1)
        residual = targets - cum[idx]
        y0 = ys[idx]
        slope = (ys[idx + 1] - ys[idx]) / widths[idx]
        # invert mass(t) = y0 t + slope t^2 / 2 on each segment
        with np.errstate(divide="ignore", invalid="ignore"):
            disc = np.sqrt(np.maximum(y0 * y0 + 2.0 * slope * residual, 0.0))
            t_quad = (disc - y0) / slope
            t_lin = residual / y0
        t = np.where(np.abs(slope) > 1e-14 * np.maximum(y0, 1.0), t_quad, t_lin)
        t = np.nan_to_num(t, nan=0.0, posinf=0.0, neginf=0.0)
        t = np.clip(t, 0.0, widths[idx])
        out = xs[idx] + t
        return float(out[0]) if scalar else out

    def label(self):
        return self.source_label


def load_tabulated(path: str) -> TabulatedIntensity:
    """Read a two-column (intensity, density) text file; '#' comments allowed."""
    data = np.loadtxt(path, comments="#", ndmin=2)
    if data.ndim != 2 or data.shape[1] != 2:
        raise ValueError(f"{path}: expected two columns (intensity, density)")
    return TabulatedIntensity(data[:, 0], data[:, 1], source_label=f"file:{path}")


# ---------------------------------------------------------------------------
# averaged statistics over an intensity law
# ---------------------------------------------------------------------------


def averaged_click_probability(
    det: DetectorModel, src: IntensityDistribution, config: MultiplexerConfig
) -> float:
    """Per-detector click probability averaged over the source law p(I).

    The integrand vanishes identically for I <= N*I_th, so only the region
    above that (trimmed to the source support) is integrated; a source with
    no mass there yields exactly 0.  Delta sources bypass the quadrature via
    the sifting property.
    """
    if isinstance(src, DeltaIntensity):
        return click_probability(det, src.value / config.degree)
    degree = config.degree
    lower = degree * det.threshold
    sup_lo, sup_hi = src.support()
    lower = max(lower, sup_lo)
    upper = min(src.quad_upper(lower), sup_hi) if math.isfinite(sup_hi) else src.quad_upper(lower)
    if upper <= lower:
        return 0.0
    factor = det.stochastic_factor

    def integrand(intensity: float) -> float:
        z = (intensity / degree - det.threshold) / det.threshold * factor
        return math.tanh(z) * src.pdf(intensity)

    points = None
    if isinstance(src, TabulatedIntensity):
        interior = src.grid[(src.grid > lower) & (src.grid < upper)]
        if interior.size:
            points = interior
    value, abserr = quad(
        integrand,
        lower,
        upper,
        epsabs=1e-300,
        epsrel=1e-10,
        limit=max(200, 0 if points is None else 2 * len(points) + 50),
        points=points,
    )
    if abserr > QUAD_RTOL * max(abs(value), 1e-300):
        raise QuadratureFailure(
            f"quadrature error {abserr!r} exceeds relative tolerance {QUAD_RTOL} "
            f"of value {value!r}"
        )
    return min(max(value, 0.0), 1.0)


def cp_from_click_probability(p_on: float, degree: int) -> float:
    """(N p / (N p + 2(1-p)))**2, the coincident probability at click probability p."""
    scaled = degree * p_on
    ratio = scaled / (scaled + 2.0 * (1.0 - p_on))
    return ratio * ratio


def classical_cp(
    det: DetectorModel, src: IntensityDistribution, config: MultiplexerConfig
) -> float:
    """Coincident probability of the classical model for an arbitrary source."""
    return cp_from_click_probability(
        averaged_click_probability(det, src, config), config.degree
    )


class DegreeLimitRow(NamedTuple):
    degree: int
    click_probability: float
    scaled_click_probability: float  # N * Pr(on | N)
    coincident_probability: float


def large_degree_limit(
    det: DetectorModel, src: IntensityDistribution, degrees: Sequence[int]
) -> list[DegreeLimitRow]:
    """Tabulate N*Pr(on|N) and CP over increasing multiplexing degrees.

    N*Pr(on|N) -> 0 for any source law, which is why the classical coincident
    probability vanishes at large degree.
    """
    degrees = list(degrees)
    if not degrees:
        raise ValueError("at least one degree is required")
    if any(b <= a for a, b in zip(degrees, degrees[1:])):
        raise ValueError("degrees must be strictly increasing")
    rows = []
    for degree in degrees:
        config = MultiplexerConfig.from_degree(degree)
        p_on = averaged_click_probability(det, src, config)
        rows.append(
            DegreeLimitRow(
                degree=degree,
                click_probability=p_on,
                scaled_click_probability=degree * p_on,
                coincident_probability=cp_from_click_probability(p_on, degree),
            )
        )
    return rows


__all__ = [
    "DetectorModel",
    "IntensityDistribution",
    "DeltaIntensity",
    "UniformIntensity",
    "ExponentialIntensity",
    "TabulatedIntensity",
    "DegreeLimitRow",
    "OddsDiverged",
    "QuadratureFailure",
    "averaged_click_probability",
    "branch_odds_classical",
    "classical_bare_joint",
    "classical_cp",
    "classical_post_selected",
    "click_probability",
    "cp_from_click_probability",
    "large_degree_limit",
    "load_tabulated",
]
