"""Ramsey outcome probabilities and reproducible outcome sampling."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ReadoutModel:
    """Readout contrast ``c`` and dimensionless decay rate ``gamma = tau / T2``.

    A measurement with time multiple ``t`` has effective contrast
    ``c * exp(-t * gamma)``.
    """

    c: float = 1.0
    gamma: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.c <= 1.0):
            raise ValueError(f"contrast c must lie in [0, 1], got {self.c!r}")
        if not (self.gamma >= 0.0 and math.isfinite(self.gamma)):
            raise ValueError(f"decay rate gamma must be finite and >= 0, got {self.gamma!r}")

    @property
    def epsilon(self) -> float:
        return 1.0 - self.c

    def effective_contrast(self, t: float) -> float:
        if self.gamma == 0.0:
            return float(self.c)
        return float(self.c * math.exp(-t * self.gamma))


IDEAL = ReadoutModel()


class RngStream:
    """Random stream keyed by ``(seed, stream_id)``.

    Backed by numpy's PCG64 seeded through ``SeedSequence([seed, stream_id])``,
    so every trial owns an independent generator that does not depend on
    execution order or worker count.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        ss = np.random.SeedSequence([self.seed & 0xFFFFFFFFFFFFFFFF, self.stream_id & 0xFFFFFFFFFFFFFFFF])
        self._gen = np.random.Generator(np.random.PCG64(ss))

    def uniform(self) -> float:
        return float(self._gen.random())

    def phase(self) -> float:
        """Uniform phase in (-pi, pi]."""
        return math.pi - 2.0 * math.pi * self.uniform()

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


def outcome_probability(phi: float, s, m: int, r: ReadoutModel = IDEAL) -> float:
    """``P(m | phi) = (1 - (-1)^m c e^{-t gamma} cos(t phi + theta)) / 2``."""
    a = r.effective_contrast(s.t)
    x = a * math.cos(s.t * phi + s.theta)
    # p1 is computed once and p0 taken as its complement so the pair sums to 1 exactly
    p1 = 0.5 * (1.0 + x)
    return p1 if m == 1 else 1.0 - p1


def sample_outcome(phi: float, s, r: ReadoutModel, rng: RngStream) -> int:
    return int(rng.uniform() < outcome_probability(phi, s, 1, r))
