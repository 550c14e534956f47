"""Adaptive Bayesian phase estimation with Fourier-space circular densities."""

from .analytics import (
    coefficient_recursion,
    density_approximations,
    final_coefficient_profile,
    holevo_closed_form,
    readout_error_asymptote,
)
from .circular_pdf import (
    FourierPdf,
    ImpossibleOutcome,
    MeasurementSettings,
    ZeroCoefficient,
    bayes_update,
    evaluate_density,
    flat_prior,
    holevo_variance,
    mean,
    phase_estimate,
    variance,
)
from .controller import (
    EpisodeTrace,
    FixedM,
    GrowingM,
    MajorityVote3,
    Schedule,
    choose_phase,
    make_schedule,
    parse_policy,
    run_episode,
)
from .harness import SweepConfig, ensemble_holevo, fit_loglog_slope, parse_config, run_sweep
from .measurement import ReadoutModel, RngStream, outcome_probability, sample_outcome
from .spin_bath import (
    PhaseDistribution,
    SpinBath,
    enumerate_phase_distribution,
    qnd_update,
    run_narrowing,
)

__version__ = "0.1.0"
