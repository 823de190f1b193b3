"""Trial-level simulation of the multiplexer with rejection post-selection.

This is the independent check on every closed form: raw trials are simulated,
trials with two or more clicks in either branch are rejected (exactly what an
experiment's post-selection does), and the figures of merit are estimated
from the surviving 2x2 counts.

Determinism contract: every report is a pure function of (config, seed).
Trials are partitioned into fixed-size chunks and chunk i draws from the
counter-based Philox stream jumped to offset i + 1, so serial and thread-pool
execution produce bit-identical results for any worker count.  The bootstrap
uses the unjumped base stream, reserved for it.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import classical as _classical
from . import quantum as _quantum
from .stats import (
    DegenerateMean,
    MultiplexerConfig,
    PostSelectedDistribution,
    ZeroAcceptance,
    binomial_joint,
    sub_binomiality,
)

CHUNK_TRIALS = 8192
BOOTSTRAP_RESAMPLES = 200


@dataclass(frozen=True)
class QuantumModel:
    """Coherent-state input of the given amplitude magnitude."""

    alpha: float

    def __post_init__(self):
        if not math.isfinite(self.alpha) or self.alpha < 0.0:
            raise ValueError(f"amplitude must be finite and >= 0, got {self.alpha!r}")


@dataclass(frozen=True)
class ClassicalModel:
    """Threshold detectors fed by intensities drawn from the source law."""

    detector: _classical.DetectorModel
    source: _classical.IntensityDistribution


@dataclass(frozen=True)
class TrialConfig:
    model: QuantumModel | ClassicalModel
    multiplexer: MultiplexerConfig
    trials: int
    seed: int

    def __post_init__(self):
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ValueError(f"trials must be an integer >= 1, got {self.trials!r}")
        if not isinstance(self.seed, int):
            raise ValueError(f"seed must be an integer, got {self.seed!r}")


@dataclass(frozen=True, eq=False)
class EstimateReport:
    """Post-selected estimates with uncertainties.

    qb_estimate is None when every accepted trial landed on one outcome
    (mean click number 0 or N), where the table-based sub-binomiality is a
    0/0; cp_estimate is always defined.
    """

    trials: int
    accepted_trials: int
    table_estimate: PostSelectedDistribution
    table_stderr: np.ndarray
    qb_estimate: float | None
    qb_stderr: float | None
    cp_estimate: float
    cp_stderr: float

    @property
    def acceptance_rate(self) -> float:
        return self.accepted_trials / self.trials


def _per_detector_click_probability(model, config: MultiplexerConfig, rng) -> float:
    if isinstance(model, QuantumModel):
        c, _ = _quantum.click_probabilities(model.alpha, config)
        return c
    intensity = model.source.sample(rng)
    return _classical.click_probability(model.detector, intensity / config.degree)


def simulate_trial(config: TrialConfig, rng: np.random.Generator) -> tuple[int, int]:
    """One raw trial: every detector fires independently; returns (k1, k2).

    This is the literal per-detector reference path; estimate() uses an
    equivalent-in-law binomial shortcut per branch.
    """
    mux = config.multiplexer
    p = _per_detector_click_probability(config.model, mux, rng)
    clicks = rng.random(mux.degree) < p
    b = mux.branch_size
    return int(clicks[:b].sum()), int(clicks[b:].sum())


def _chunk_stream(seed: int, chunk_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed).jumped(chunk_index + 1))


def _classical_click_probabilities(model, config, intensities):
    det = model.detector
    per = intensities / config.degree
    z = (per - det.threshold) / det.threshold * det.stochastic_factor
    return np.where(per > det.threshold, np.tanh(z), 0.0)


def _chunk_accept_counts(config: TrialConfig, chunk_index: int, n: int) -> np.ndarray:
    """Accepted-outcome counts of one chunk as a 2x2 int array."""
    rng = _chunk_stream(config.seed, chunk_index)
    mux = config.multiplexer
    b = mux.branch_size
    model = config.model
    if isinstance(model, QuantumModel):
        p = _quantum.click_probabilities(model.alpha, mux)[0]
    elif isinstance(model.source, _classical.DeltaIntensity):
        p = _classical.click_probability(
            model.detector, model.source.value / mux.degree
        )
    else:
        intensities = np.asarray(model.source.sample(rng, n), dtype=float)
        p = _classical_click_probabilities(model, mux, intensities)
    k1 = rng.binomial(b, p, size=n)
    k2 = rng.binomial(b, p, size=n)
    accept = (k1 <= 1) & (k2 <= 1)
    counts = np.zeros((2, 2), dtype=np.int64)
    np.add.at(counts, (k1[accept], k2[accept]), 1)
    return counts


def _bootstrap_qb_stderr(
    counts: np.ndarray, accepted: int, degree: int, seed: int
) -> float | None:
    """Nonparametric bootstrap (multinomial resampling of accepted outcomes)."""
    rng = np.random.Generator(np.random.Philox(key=seed))
    probs = counts.ravel() / accepted
    resamples = rng.multinomial(accepted, probs, size=BOOTSTRAP_RESAMPLES) / accepted
    k = np.array([0.0, 1.0, 1.0, 2.0])
    means = resamples @ k
    variances = resamples @ (k * k) - means * means
    valid = (means > 1e-15) & (degree - means > 1e-15)
    if valid.sum() < 2:
        return None
    qb = degree * variances[valid] / (means[valid] * (degree - means[valid])) - 1.0
    return float(np.std(qb, ddof=1))


def estimate(config: TrialConfig, workers: int = 1) -> EstimateReport:
    """Run the trials, reject multi-click branches, estimate Q_B and CP.

    Raises ZeroAcceptance when no trial survives post-selection.  The
    coincident-probability standard error is the binomial formula on the
    accepted count; the sub-binomiality one is a bootstrap over accepted
    trials.
    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers!r}")
    n_chunks = (config.trials + CHUNK_TRIALS - 1) // CHUNK_TRIALS
    sizes = [
        min(CHUNK_TRIALS, config.trials - i * CHUNK_TRIALS) for i in range(n_chunks)
    ]
    if workers == 1 or n_chunks == 1:
        chunk_counts = [
            _chunk_accept_counts(config, i, n) for i, n in enumerate(sizes)
        ]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunk_counts = list(
                pool.map(
                    lambda item: _chunk_accept_counts(config, item[0], item[1]),
                    enumerate(sizes),
                )
            )
    counts = np.sum(chunk_counts, axis=0, dtype=np.int64)
    accepted = int(counts.sum())
    if accepted == 0:
        raise ZeroAcceptance(
            f"no trial of {config.trials} survived post-selection "
            f"(raw acceptance rate 0.0)"
        )
    table = counts / accepted
    dist = PostSelectedDistribution(table)
    degree = config.multiplexer.degree
    cp = float(table[1, 1])
    cp_stderr = math.sqrt(cp * (1.0 - cp) / accepted)
    table_stderr = np.sqrt(table * (1.0 - table) / accepted)
    try:
        qb = sub_binomiality(dist, degree)
    except DegenerateMean:
        qb, qb_stderr = None, None
    else:
        qb_stderr = _bootstrap_qb_stderr(counts, accepted, degree, config.seed)
    return EstimateReport(
        trials=config.trials,
        accepted_trials=accepted,
        table_estimate=dist,
        table_stderr=table_stderr,
        qb_estimate=qb,
        qb_stderr=qb_stderr,
        cp_estimate=cp,
        cp_stderr=cp_stderr,
    )


def post_selection_acceptance(config: TrialConfig) -> float | None:
    """Closed-form probability that a raw trial survives post-selection.

    This is the retained mass of the bare joint table; strongly saturated
    detectors drive it to zero, which is when estimate() raises
    ZeroAcceptance.  None for classical models with a non-delta source,
    where it would require an average over the intensity law.
    """
    model = config.model
    mux = config.multiplexer
    if isinstance(model, QuantumModel):
        p = _quantum.click_probabilities(model.alpha, mux)[0]
    elif isinstance(model.source, _classical.DeltaIntensity):
        p = _classical.click_probability(
            model.detector, model.source.value / mux.degree
        )
    else:
        return None
    bare = binomial_joint(mux, p)
    return float(bare.table[:2, :2].sum())


def sigma_distance(
    report: EstimateReport,
    qb_closed: float,
    cp_closed: float,
    table_closed: PostSelectedDistribution,
) -> float:
    """Worst disagreement, in standard errors, between estimate and closed form.

    The coincident probability is scored against the closed-form binomial
    standard error sqrt(CP(1-CP)/n), which stays meaningful when the
    empirical value saturates at 0 or 1.  A single-outcome sample (degenerate
    sub-binomiality) is scored by the Poisson z-value sqrt(n(1-q)) for
    observing zero off-outcome trials when the closed form puts mass q on the
    observed outcome.
    """
    n = report.accepted_trials
    cp_var = cp_closed * (1.0 - cp_closed)
    if cp_var == 0.0:
        sd_cp = 0.0 if report.cp_estimate == cp_closed else math.inf
    else:
        sd_cp = abs(report.cp_estimate - cp_closed) / math.sqrt(cp_var / n)

    if report.qb_estimate is None:
        outcome = np.unravel_index(
            int(np.argmax(report.table_estimate.table)), (2, 2)
        )
        expected_off = n * (1.0 - float(table_closed.table[outcome]))
        sd_qb = math.sqrt(max(expected_off, 0.0))
    elif report.qb_stderr is None or report.qb_stderr == 0.0:
        sd_qb = 0.0 if report.qb_estimate == qb_closed else math.inf
    else:
        sd_qb = abs(report.qb_estimate - qb_closed) / report.qb_stderr
    return max(sd_qb, sd_cp)


__all__ = [
    "BOOTSTRAP_RESAMPLES",
    "CHUNK_TRIALS",
    "ClassicalModel",
    "EstimateReport",
    "QuantumModel",
    "TrialConfig",
    "estimate",
    "post_selection_acceptance",
    "sigma_distance",
    "simulate_trial",
]
