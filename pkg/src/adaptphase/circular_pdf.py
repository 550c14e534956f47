"""Circular probability densities stored as Fourier coefficients.

A density on the phase circle is kept as ``P(phi) = sum_k p_k exp(i k phi)``
with ``p_{-k} = conj(p_k)``, so only the coefficients ``k = 0..K`` are stored.
Normalization is ``p_0 = 1/(2 pi)``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

TWO_PI = 2.0 * math.pi
P0 = 1.0 / TWO_PI

ZERO_COEFF_TOL = 1e-15


class ZeroCoefficient(ValueError):
    """A Fourier coefficient needed for a phase estimate vanishes."""


class ImpossibleOutcome(ValueError):
    """The observed outcome has zero probability under the current belief."""


def wrap_phase(x: float) -> float:
    """Reduce an angle to (-pi, pi]."""
    y = math.remainder(x, TWO_PI)
    if y == -math.pi:
        y = math.pi
    return y


@dataclass(frozen=True)
class MeasurementSettings:
    """One Ramsey interrogation: time multiple ``t`` and readout phase ``theta``."""

    t: int
    theta: float = 0.0

    def __post_init__(self):
        if isinstance(self.t, bool) or int(self.t) != self.t or self.t < 1:
            raise ValueError(f"time multiple must be a positive integer, got {self.t!r}")
        if not math.isfinite(self.theta):
            raise ValueError(f"readout phase must be finite, got {self.theta!r}")
        object.__setattr__(self, "t", int(self.t))
        object.__setattr__(self, "theta", wrap_phase(float(self.theta)))


class FourierPdf:
    """Normalized circular density with Hermitian-symmetric Fourier coefficients.

    Instances are treated as immutable; :func:`bayes_update` returns a new one.
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=np.complex128).ravel()
        if c.size == 0:
            raise ValueError("at least p_0 is required")
        c.flags.writeable = False
        self._coeffs = c

    @property
    def coeffs(self) -> np.ndarray:
        """Read-only view of ``p_0 .. p_K``."""
        return self._coeffs

    @property
    def K(self) -> int:
        return self._coeffs.size - 1

    def coefficient(self, k: int) -> complex:
        """``p_k`` for any integer k (zero outside the band)."""
        k = int(k)
        if abs(k) > self.K:
            return 0j
        c = self._coeffs[abs(k)]
        return complex(c) if k >= 0 else complex(np.conj(c))

    def characteristic(self, k: int) -> complex:
        """Circular moment ``<exp(i k phi)> = 2 pi p_{-k}``."""
        return TWO_PI * self.coefficient(-k)

    def __repr__(self):
        return f"FourierPdf(K={self.K})"


def flat_prior() -> FourierPdf:
    return FourierPdf([P0])


def gaussian_pdf(sigma: float, mu: float = 0.0, K: int | None = None) -> FourierPdf:
    """Wrapped normal density with coefficients ``exp(-sigma^2 k^2 / 2 - i k mu) / 2pi``."""
    if K is None:
        K = int(math.ceil(12.0 / sigma)) + 1
    k = np.arange(K + 1)
    return FourierPdf(np.exp(-0.5 * (sigma * k) ** 2 - 1j * k * mu) / TWO_PI)


def bayes_update(pdf: FourierPdf, s: MeasurementSettings, m: int, r) -> FourierPdf:
    """Posterior after observing outcome ``m`` of a Ramsey measurement.

    The likelihood ``(1 - (-1)^m a cos(t phi + theta)) / 2`` with effective
    contrast ``a = c exp(-t gamma)`` shifts the spectrum by ``+-t``::

        p_k <- p_k / 2 - (-1)^m (a / 4) (e^{i theta} p_{k-t} + e^{-i theta} p_{k+t})

    followed by renormalization to ``p_0 = 1/(2 pi)``.  The band grows by ``t``.
    """
    if m not in (0, 1):
        raise ValueError(f"outcome must be 0 or 1, got {m!r}")
    t = s.t
    K = pdf.K
    a = r.effective_contrast(t)
    sign = 1.0 if m == 0 else -1.0
    p = pdf.coeffs

    # ext[j] holds p_{j - off} for k in [-(K+t), K+2t]
    off = K + t
    ext = np.zeros(2 * K + 3 * t + 1, dtype=np.complex128)
    ext[off - K:off] = np.conj(p[:0:-1])
    ext[off:off + K + 1] = p
    n_new = K + t + 1
    rot = complex(math.cos(s.theta), math.sin(s.theta))
    out = 0.5 * ext[off:off + n_new] - (sign * a / 4.0) * (
        rot * ext[off - t:off - t + n_new] + rot.conjugate() * ext[off + t:off + t + n_new]
    )
    norm = out[0].real
    if not norm > 0.0:
        raise ImpossibleOutcome(f"outcome {m} has zero probability at t={t}, theta={s.theta}")
    out *= P0 / norm
    out[0] = P0
    return FourierPdf(out)


def mean(pdf: FourierPdf) -> float:
    """Linear mean of phi over (-pi, pi]."""
    p = pdf.coeffs
    if pdf.K == 0:
        return 0.0
    k = np.arange(1, pdf.K + 1)
    # <phi> = -2 i pi sum_{k != 0} (-1)^k p_k / k; the +-k pair sums to 4 pi (-1)^k Im(p_k) / k
    sgn = np.where(k % 2 == 0, 1.0, -1.0)
    return float(4.0 * math.pi * np.sum(sgn * p[1:].imag / k))


def variance(pdf: FourierPdf) -> float:
    """Linear variance of phi over (-pi, pi]."""
    p = pdf.coeffs
    second = 2.0 * math.pi**3 / 3.0 * p[0].real
    if pdf.K > 0:
        k = np.arange(1, pdf.K + 1)
        sgn = np.where(k % 2 == 0, 1.0, -1.0)
        second += 8.0 * math.pi * float(np.sum(sgn * p[1:].real / k**2))
    return float(second - mean(pdf) ** 2)


def holevo_variance(pdf) -> float:
    """``|<exp(i phi)>|^-2 - 1``; ``inf`` when the first moment vanishes.

    Accepts anything exposing ``characteristic(k)``.
    """
    r = abs(pdf.characteristic(1))
    if r == 0.0:
        return math.inf
    return r**-2 - 1.0


def phase_estimate(pdf, t: int = 1) -> float:
    """``arg(<exp(i t phi)>) / t``, in (-pi/t, pi/t]."""
    z = pdf.characteristic(t)
    if abs(z) < TWO_PI * ZERO_COEFF_TOL:
        raise ZeroCoefficient(f"|<exp(i {t} phi)>| vanishes; estimate undefined")
    return wrap_phase(math.atan2(z.imag, z.real)) / t


def evaluate_density(pdf: FourierPdf, phi, chunk: int = 512):
    """Density at ``phi`` (scalar or array)."""
    phis = np.atleast_1d(np.asarray(phi, dtype=float))
    p = pdf.coeffs
    out = np.full(phis.shape, p[0].real)
    if pdf.K > 0:
        k = np.arange(1, pdf.K + 1)
        for i in range(0, phis.size, chunk):
            sl = slice(i, i + chunk)
            out[sl] += 2.0 * (np.exp(1j * np.outer(phis[sl], k)) @ p[1:]).real
    if np.ndim(phi) == 0:
        return float(out[0])
    return out


def density_grid(n: int) -> np.ndarray:
    """``n`` uniformly spaced phases in (-pi, pi], strictly increasing, ending at pi."""
    return -math.pi + TWO_PI * np.arange(1, n + 1) / n


def write_density_csv(pdf: FourierPdf, path, n: int = 4096) -> None:
    phis = density_grid(n)
    dens = evaluate_density(pdf, phis)
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["phi", "density"])
        for x, y in zip(phis, dens):
            w.writerow([repr(float(x)), repr(float(y))])


def write_coefficients_csv(pdf: FourierPdf, path) -> None:
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "re", "im"])
        for k, c in enumerate(pdf.coeffs):
            w.writerow([k, repr(float(c.real)), repr(float(c.imag))])
