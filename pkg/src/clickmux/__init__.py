"""Click statistics of multiplexed on/off detectors with post-selection.

Two models of the same optical test live side by side: the coherent-state
closed forms (quantum), and a classical stochastic model of threshold
detectors fed by an infinitely divisible intensity.  A rejection-sampling
Monte Carlo engine provides an independent check on every closed form, and
the CLI sweeps all of it into machine-readable tables.
"""

from .stats import (
    DegenerateMean,
    JointClickDistribution,
    MeasureReport,
    MultiplexerConfig,
    PostSelectedDistribution,
    ZeroAcceptance,
    binomial_joint,
    coincident_probability,
    cp_from_odds,
    measure,
    post_select,
    post_selected_from_odds,
    qb_from_odds,
    sub_binomiality,
    total_click_moments,
)
from .quantum import (
    QuantumAsymptotics,
    asymptotics,
    bare_joint,
    branch_odds,
    click_probabilities,
    cp_closed_form,
    post_selected_joint,
    qb_closed_form,
)
from .classical import (
    DeltaIntensity,
    DetectorModel,
    ExponentialIntensity,
    IntensityDistribution,
    OddsDiverged,
    QuadratureFailure,
    TabulatedIntensity,
    UniformIntensity,
    averaged_click_probability,
    branch_odds_classical,
    classical_bare_joint,
    classical_cp,
    classical_post_selected,
    click_probability,
    large_degree_limit,
    load_tabulated,
)
from .montecarlo import (
    ClassicalModel,
    EstimateReport,
    QuantumModel,
    TrialConfig,
    estimate,
    sigma_distance,
    simulate_trial,
)

__version__ = "0.1.0"
