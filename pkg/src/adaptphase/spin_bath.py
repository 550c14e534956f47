"""Quantized phases from a sensor spin coupled to a nuclear spin bath.

The secular coupling ``S_z sum_k A_k I_z,k`` makes every bath configuration
``s in {-1/2, +1/2}^N_C`` imprint a fixed phase ``phi = tau * sum_k A_k s_k``
per base interrogation time ``tau``.  Ramsey measurements are QND for the bath:
they reweight configurations but never change their phases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .circular_pdf import ImpossibleOutcome, MeasurementSettings
from .controller import StepRecord, choose_phase
from .measurement import ReadoutModel, RngStream

MAX_ENUMERATED_SPINS = 22
MERGE_RTOL = 1e-12


class BathTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class SpinBath:
    """Couplings ``A_k`` (rad per unit time) and the base time ``tau``."""

    couplings: tuple
    tau: float = 1.0
    label: str = "custom"

    def __post_init__(self):
        A = tuple(float(a) for a in self.couplings)
        if not A:
            raise ValueError("a spin bath needs at least one coupling")
        if not all(math.isfinite(a) for a in A):
            raise ValueError("couplings must be finite")
        if not (self.tau > 0 and math.isfinite(self.tau)):
            raise ValueError(f"tau must be positive, got {self.tau}")
        object.__setattr__(self, "couplings", A)

    @property
    def n_c(self) -> int:
        return len(self.couplings)

    @property
    def phase_couplings(self) -> np.ndarray:
        return np.asarray(self.couplings) * self.tau


def degenerate_steps(n_c: int) -> int:
    """Fewest steps ``M`` whose ``2^M`` phase bins separate all ``N_C + 1`` eigenvalues."""
    return max(1, math.ceil(math.log2(n_c + 1)))


def degenerate_bath(n_c: int, a: float = 1.0, steps: int | None = None) -> SpinBath:
    """Equal couplings ``a`` with base time ``tau = 2 pi / (a 2^M)``."""
    if steps is None:
        steps = degenerate_steps(n_c)
    tau = 2.0 * math.pi / (abs(a) * 2**steps)
    return SpinBath((a,) * n_c, tau=tau, label=f"degenerate:{n_c},{a}")


def random_bath(n_c: int = 16, seed: int = 7, max_phase: float = 0.9 * math.pi) -> SpinBath:
    """Dipolar-like random couplings ``A_k = a0 (1 - 3 cos^2 v_k) / r_k^3``.

    Radii are drawn uniformly in volume over the shell ``1 <= r <= 3`` and
    ``cos v_k`` uniformly in [-1, 1].  The scale ``a0`` is fixed so that the
    extreme configuration phase ``sum_k |A_k| / 2`` equals ``max_phase``,
    keeping every configuration inside one phase period at ``t = 1``.
    """
    gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, n_c])))
    r = (1.0 + 26.0 * gen.random(n_c)) ** (1.0 / 3.0)
    cos_v = 2.0 * gen.random(n_c) - 1.0
    A = (1.0 - 3.0 * cos_v**2) / r**3
    A *= max_phase / (0.5 * np.abs(A).sum())
    return SpinBath(tuple(A), tau=1.0, label=f"random:{n_c},{seed}")


@dataclass(frozen=True)
class PhaseDistribution:
    """Distinct phases (sorted) with probabilities and configuration counts."""

    phases: np.ndarray
    probs: np.ndarray
    degeneracy: np.ndarray

    def __post_init__(self):
        ph = np.asarray(self.phases, dtype=float)
        pr = np.asarray(self.probs, dtype=float)
        dg = np.asarray(self.degeneracy, dtype=np.int64)
        if not (ph.shape == pr.shape == dg.shape and ph.ndim == 1 and ph.size > 0):
            raise ValueError("phases, probs and degeneracy must be equal-length 1-D arrays")
        if np.any(np.diff(ph) <= 0):
            raise ValueError("phases must be strictly increasing")
        if np.any(pr < 0) or abs(pr.sum() - 1.0) > 1e-12:
            raise ValueError("probabilities must be nonnegative and sum to 1")
        for name, arr in (("phases", ph), ("probs", pr), ("degeneracy", dg)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @classmethod
    def uniform(cls, phases):
        ph = np.sort(np.asarray(phases, dtype=float))
        return cls(ph, np.full(ph.size, 1.0 / ph.size), np.ones(ph.size, dtype=np.int64))

    def __len__(self):
        return self.phases.size

    def characteristic(self, k: float) -> complex:
        """``<exp(i k phi)>``; ``k`` may be any real time."""
        return complex(np.sum(self.probs * np.exp(1j * k * self.phases)))

    def with_probs(self, probs):
        return PhaseDistribution(self.phases, probs, self.degeneracy)


def enumerate_phase_distribution(bath: SpinBath) -> PhaseDistribution:
    """Merged eigenphases of a maximally mixed bath, weighted by degeneracy."""
    if bath.n_c > MAX_ENUMERATED_SPINS:
        raise BathTooLarge(f"{bath.n_c} spins exceeds the enumeration bound {MAX_ENUMERATED_SPINS}")
    phases = np.zeros(1)
    for A in bath.phase_couplings:
        phases = np.concatenate((phases - 0.5 * A, phases + 0.5 * A))
    phases.sort()
    tol = MERGE_RTOL * max(float(np.abs(phases).max()), float(np.abs(bath.phase_couplings).max()))
    starts = np.concatenate(([0], np.flatnonzero(np.diff(phases) > tol) + 1))
    counts = np.diff(np.append(starts, phases.size))
    # representative phase per group is its mean, which is exact for symmetric groups
    merged = np.add.reduceat(phases, starts) / counts
    return PhaseDistribution(merged, counts / phases.size, counts)


def likelihood(dist: PhaseDistribution, s: MeasurementSettings, m: int, r: ReadoutModel) -> np.ndarray:
    a = r.effective_contrast(s.t)
    p1 = 0.5 * (1.0 + a * np.cos(s.t * dist.phases + s.theta))
    return p1 if m == 1 else 1.0 - p1


def outcome_distribution(dist: PhaseDistribution, s: MeasurementSettings, r: ReadoutModel) -> float:
    """Probability of outcome 1 for the mixed bath state."""
    return float(np.dot(dist.probs, likelihood(dist, s, 1, r)))


def qnd_update(dist: PhaseDistribution, s: MeasurementSettings, m: int, r: ReadoutModel) -> PhaseDistribution:
    w = dist.probs * likelihood(dist, s, m, r)
    z = w.sum()
    if not z > 0.0:
        raise ImpossibleOutcome(f"outcome {m} has zero probability for this bath state")
    return dist.with_probs(w / z)


def sample_bath_outcome(dist: PhaseDistribution, s: MeasurementSettings, r: ReadoutModel, rng: RngStream) -> int:
    return int(rng.uniform() < outcome_distribution(dist, s, r))


def _plogp(p) -> float:
    p = np.asarray(p, dtype=float)
    nz = p[p > 0]
    return max(0.0, float(-np.sum(nz * np.log2(nz))))


def entropy(dist: PhaseDistribution) -> float:
    """Shannon entropy (bits) over distinct phases."""
    return _plogp(dist.probs)


def configuration_entropy(dist: PhaseDistribution) -> float:
    """Entropy (bits) over bath configurations; each phase's weight is shared evenly by its configurations."""
    nz = dist.probs > 0
    return entropy(dist) + float(np.sum(dist.probs[nz] * np.log2(dist.degeneracy[nz])))


def holevo_variance(dist: PhaseDistribution) -> float:
    r = abs(dist.characteristic(1.0))
    return math.inf if r == 0.0 else r**-2 - 1.0


def coherence_function(dist: PhaseDistribution, times) -> np.ndarray:
    """Free-induction envelope ``|sum_a p_a exp(i phi_a t)|``."""
    t = np.atleast_1d(np.asarray(times, dtype=float))
    # weights below 1e-17 change |C| by less than 1e-17 * 2^22
    keep = dist.probs > 1e-17
    ph, pr = dist.phases[keep], dist.probs[keep]
    out = np.empty(t.size)
    for i in range(0, t.size, 64):
        out[i:i + 64] = np.abs(np.exp(1j * np.outer(t[i:i + 64], ph)) @ pr)
    return out


def phase_std(dist: PhaseDistribution) -> float:
    mu = np.dot(dist.probs, dist.phases)
    return float(math.sqrt(max(np.dot(dist.probs, (dist.phases - mu) ** 2), 0.0)))


def default_horizon(dist: PhaseDistribution) -> float:
    sd = phase_std(dist)
    return math.inf if sd == 0.0 else 20.0 / sd


def coherence_time(dist: PhaseDistribution, horizon: float | None = None, samples: int = 4096) -> float:
    """First time where the coherence envelope drops to ``1/e``.

    Scans ``samples`` points up to ``horizon`` (default ``20 / std(phi)``) and
    refines the first bracketed crossing by root finding.  Returns ``inf``
    when no crossing occurs inside the horizon.
    """
    if horizon is None:
        horizon = default_horizon(dist)
    if not math.isfinite(horizon):
        return math.inf
    level = math.exp(-1.0)
    dt = horizon / samples
    keep = dist.probs > 1e-17
    pr = dist.probs[keep]
    step = np.exp(1j * dt * dist.phases[keep])
    z = np.ones_like(step)
    prev = None
    # walk the uniform grid with one complex multiply per phase and sample
    for j in range(samples + 1):
        if j:
            z *= step
            if j % 256 == 0:
                z = np.exp(1j * (j * dt) * dist.phases[keep])
        if abs(z @ pr) <= level:
            break
        prev = j
    else:
        return math.inf
    if prev is None:
        return 0.0
    return float(brentq(lambda x: coherence_function(dist, [x])[0] - level,
                        prev * dt, j * dt, xtol=1e-12 * horizon))


@dataclass
class NarrowingReport:
    bath: SpinBath
    schedule: object
    readout: ReadoutModel
    initial: PhaseDistribution
    final: PhaseDistribution
    steps: list = field(default_factory=list)
    seed: int | None = None

    def __post_init__(self):
        self.entropy_bits_before = entropy(self.initial)
        self.entropy_bits_after = entropy(self.final)
        self.config_entropy_bits_before = configuration_entropy(self.initial)
        self.config_entropy_bits_after = configuration_entropy(self.final)
        self.holevo_before = holevo_variance(self.initial)
        self.holevo_after = holevo_variance(self.final)
        self.horizon_before = default_horizon(self.initial)
        self.horizon_after = default_horizon(self.final)
        self.t2star_before = coherence_time(self.initial, self.horizon_before)
        self.t2star_after = coherence_time(self.final, self.horizon_after)

    @property
    def t2star_gain(self) -> float:
        return self.t2star_after / self.t2star_before

    def curve_times(self, points: int = 512) -> np.ndarray:
        finite = [h for h in (self.t2star_after, self.t2star_before, self.horizon_before) if math.isfinite(h)]
        top = 3.0 * max(finite) if finite else 1.0
        return np.linspace(0.0, top, points)

    def to_dict(self, points: int = 512):
        ts = self.curve_times(points)
        before = coherence_function(self.initial, ts)
        after = coherence_function(self.final, ts)
        return {
            "n_c": self.bath.n_c,
            "couplings": list(self.bath.couplings),
            "tau": self.bath.tau,
            "bath": self.bath.label,
            "schedule": self.schedule.to_dict(),
            "c": self.readout.c,
            "gamma": self.readout.gamma,
            "seed": self.seed,
            "entropy_bits_before": self.entropy_bits_before,
            "entropy_bits_after": self.entropy_bits_after,
            "config_entropy_bits_before": self.config_entropy_bits_before,
            "config_entropy_bits_after": self.config_entropy_bits_after,
            "holevo_before": self.holevo_before,
            "holevo_after": self.holevo_after,
            "t2star_before": self.t2star_before,
            "t2star_after": self.t2star_after,
            "t2star_horizon_before": self.horizon_before,
            "t2star_horizon_after": self.horizon_after,
            "coherence_curve": [{"t": float(t), "abs_c": float(c)} for t, c in zip(ts, after)],
            "coherence_curve_before": [{"t": float(t), "abs_c": float(c)} for t, c in zip(ts, before)],
            "trace": [s.to_dict() for s in self.steps],
        }


def run_narrowing(bath: SpinBath, sched, r: ReadoutModel, rng: RngStream,
                  initial: PhaseDistribution | None = None) -> NarrowingReport:
    """Adaptive QND measurement sequence on the bath, starting maximally mixed."""
    dist0 = enumerate_phase_distribution(bath) if initial is None else initial
    dist = dist0
    steps = []
    for n, (t, M) in enumerate(sched.steps):
        s = MeasurementSettings(t, choose_phase(dist, t))
        outcomes = [sample_bath_outcome(dist, s, r, rng) for _ in range(M)]
        for m in sched.policy.updates(outcomes):
            dist = qnd_update(dist, s, m, r)
        steps.append(StepRecord(n, t, s.theta, outcomes, abs(dist.characteristic(t)) / (2 * math.pi),
                                holevo_variance(dist)))
    return NarrowingReport(bath, sched, r, dist0, dist, steps, rng.seed)
