"""Adaptive estimation protocol: halving time schedule and readout-phase rule."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .circular_pdf import (
    ZERO_COEFF_TOL,
    TWO_PI,
    MeasurementSettings,
    ZeroCoefficient,
    bayes_update,
    flat_prior,
    holevo_variance,
    phase_estimate,
    wrap_phase,
)
from .measurement import ReadoutModel, RngStream, sample_outcome


@dataclass(frozen=True)
class FixedM:
    M: int

    def __post_init__(self):
        if self.M < 1:
            raise ValueError(f"M must be >= 1, got {self.M}")

    def measurements(self, n: int) -> int:
        return self.M

    def updates(self, outcomes):
        return list(outcomes)

    @property
    def label(self) -> str:
        return {1: "m1", 2: "m2"}.get(self.M, f"mfixed:{self.M}")

    @property
    def m_label(self) -> str:
        return str(self.M)


@dataclass(frozen=True)
class GrowingM:
    """``M_n = n + 1`` measurements at step ``n``."""

    def measurements(self, n: int) -> int:
        return n + 1

    def updates(self, outcomes):
        return list(outcomes)

    label = "growing"
    m_label = "n+1"


@dataclass(frozen=True)
class MajorityVote3:
    """Three measurements per step; the majority bit is applied as two updates."""

    def measurements(self, n: int) -> int:
        return 3

    def updates(self, outcomes):
        bit = int(sum(outcomes) >= 2)
        return [bit, bit]

    label = "majority3"
    m_label = "3vote"


def parse_policy(text: str):
    """Parse ``m1 | m2 | mfixed:K | growing | majority3``."""
    key = text.strip().lower()
    if key == "m1":
        return FixedM(1)
    if key == "m2":
        return FixedM(2)
    if key.startswith("mfixed:"):
        try:
            return FixedM(int(key.split(":", 1)[1]))
        except ValueError:
            raise ValueError(f"bad policy {text!r}: expected mfixed:<positive int>") from None
    if key == "growing":
        return GrowingM()
    if key == "majority3":
        return MajorityVote3()
    raise ValueError(f"unknown policy {text!r}; expected m1, m2, mfixed:K, growing or majority3")


@dataclass(frozen=True)
class Schedule:
    N: int
    policy: object
    steps: tuple  # (t_n, M_n) for n = 0..N

    @property
    def total_time(self) -> int:
        return sum(t * M for t, M in self.steps)

    def to_dict(self):
        return {"N": self.N, "policy": self.policy.label,
                "steps": [{"t": t, "M": M} for t, M in self.steps]}


def make_schedule(N: int, policy=FixedM(1)) -> Schedule:
    if N < 0:
        raise ValueError(f"N must be >= 0, got {N}")
    steps = tuple((2 ** (N - n), policy.measurements(n)) for n in range(N + 1))
    return Schedule(N, policy, steps)


def optimal_phase(moment: complex) -> float:
    """Readout phase from the circular moment ``<exp(2 i t phi)>``.

    Returns ``-arg(moment) / 2``, or 0 when the moment vanishes.
    """
    if abs(moment) < TWO_PI * ZERO_COEFF_TOL:
        return 0.0
    return wrap_phase(-0.5 * math.atan2(moment.imag, moment.real))


def choose_phase(dist, t: int) -> float:
    """Readout phase maximizing ``|p_{-t}|`` after the next update.

    With ``p_{-2t} = q e^{i chi}`` the updated magnitude grows with
    ``cos(chi + 2 theta)``, so ``theta = -chi / 2``.  ``dist`` may be a
    :class:`FourierPdf` or any object with ``characteristic(k)``.
    """
    return optimal_phase(dist.characteristic(2 * t))


@dataclass
class StepRecord:
    n: int
    t: int
    theta: float
    outcomes: list
    abs_p: float
    holevo: float

    def to_dict(self):
        return {"n": self.n, "t": self.t, "theta": self.theta, "outcomes": list(self.outcomes),
                "abs_p": self.abs_p, "holevo": self.holevo}


@dataclass
class EpisodeTrace:
    phi_true: float
    schedule: Schedule
    readout: ReadoutModel
    seed: int | None
    stream_id: int | None
    steps: list = field(default_factory=list)
    phi_est: float | None = None
    v_h: float = math.inf
    pdf: object = None

    @property
    def total_time(self) -> int:
        return self.schedule.total_time

    @property
    def estimate_defined(self) -> bool:
        return self.phi_est is not None

    def to_dict(self):
        return {
            "phi_true": self.phi_true,
            "N": self.schedule.N,
            "policy": self.schedule.policy.label,
            "c": self.readout.c,
            "gamma": self.readout.gamma,
            "seed": self.seed,
            "steps": [s.to_dict() for s in self.steps],
            "phi_est": self.phi_est,
            "v_h": self.v_h,
            "total_time": self.total_time,
        }


def run_episode(phi_true: float, sched: Schedule, r: ReadoutModel, rng: RngStream,
                keep_pdf: bool = True) -> EpisodeTrace:
    """One adaptive run over ``sched`` against a fixed true phase."""
    phi_true = wrap_phase(phi_true)
    trace = EpisodeTrace(phi_true, sched, r, rng.seed, rng.stream_id)
    pdf = flat_prior()
    for n, (t, M) in enumerate(sched.steps):
        theta = choose_phase(pdf, t)
        s = MeasurementSettings(t, theta)
        outcomes = [sample_outcome(phi_true, s, r, rng) for _ in range(M)]
        for m in sched.policy.updates(outcomes):
            pdf = bayes_update(pdf, s, m, r)
        trace.steps.append(StepRecord(n, t, s.theta, outcomes, abs(pdf.coefficient(t)),
                                      holevo_variance(pdf)))
    try:
        trace.phi_est = phase_estimate(pdf, 1)
    except ZeroCoefficient:
        trace.phi_est = None
    trace.v_h = holevo_variance(pdf)
    if keep_pdf:
        trace.pdf = pdf
    return trace


def replay(steps, r: ReadoutModel, policy=None):
    """Rebuild the posterior from recorded ``(t, theta, outcomes)`` steps."""
    pdf = flat_prior()
    for st in steps:
        s = MeasurementSettings(int(st["t"]), float(st["theta"]))
        outcomes = list(st["outcomes"])
        bits = policy.updates(outcomes) if policy is not None else outcomes
        for m in bits:
            pdf = bayes_update(pdf, s, int(m), r)
    return pdf
