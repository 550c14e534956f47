"""Closed-form results for the deterministic (phi = 0) adaptive pass.

These serve as oracles for the simulator and reproduce the scaling curves
without Monte Carlo.

Time bookkeeping: ``holevo_closed_form(1, T)`` equals the single-measurement
recursion after ``k + 1`` applications at ``T = 2**(k + 2) - 1``, and
``holevo_closed_form(2, T)`` equals the two-measurement recursion after ``k``
applications at ``T = 2 * (2**(k + 1) - 1)``.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .circular_pdf import TWO_PI


def holevo_from_abs_p(abs_p: float) -> float:
    if abs_p == 0.0:
        return math.inf
    return (TWO_PI * abs_p) ** -2 - 1.0


def coefficient_recursion(M: int, c: float, n: int) -> float:
    """``|p_{-t_n}|`` after ``n`` recursion steps starting from a flat prior.

    All outcomes are taken aligned with the readout (the constant-contrast
    approximation), so only ``c`` enters.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if not 0.0 < c <= 1.0:
        raise ValueError(f"contrast must lie in (0, 1], got {c}")
    p = 0.0
    for _ in range(n):
        if M == 1:
            p = 0.5 * c * (1.0 / TWO_PI + p)
        elif M == 2:
            p = c * (1.0 / TWO_PI + p) / (math.pi * ((1.0 + 0.5 * c * c) / math.pi + c * c * p))
        else:
            raise ValueError(f"closed recursions exist for M in (1, 2), got {M}")
    return p


def coefficient_closed(M: int, n: int) -> float:
    """Ideal-readout closed forms of :func:`coefficient_recursion`."""
    if M == 1:
        return (1.0 - 2.0**-n) / TWO_PI
    if M == 2:
        return (1.0 - 3.0 / (2.0 ** (2 * n + 1) + 1.0)) / TWO_PI
    raise ValueError(f"M must be 1 or 2, got {M}")


def holevo_closed_form(M: int, T: float) -> float:
    """Holevo variance as a function of total time ``T`` (units of tau)."""
    if M == 1:
        if T <= 1:
            raise ValueError(f"single-measurement closed form needs T > 1, got {T}")
        return 4.0 * T / (T - 1.0) ** 2
    if M == 2:
        if T <= 2:
            raise ValueError(f"two-measurement closed form needs T > 2, got {T}")
        return 48.0 * T * (T + 4.0) / ((T - 2.0) ** 2 * (T + 6.0) ** 2)
    raise ValueError(f"M must be 1 or 2, got {M}")


def holevo_closed_form_exact(M: int, T: int) -> Fraction:
    T = Fraction(T)
    if M == 1:
        return 4 * T / (T - 1) ** 2
    return 48 * T * (T + 4) / ((T - 2) ** 2 * (T + 6) ** 2)


def readout_error_asymptote(eps: float, N: int) -> float:
    """Small-error approximation ``3 (1 + eps N) 2^{-2N}``."""
    if eps < 0:
        raise ValueError("eps must be >= 0")
    return 3.0 * (1.0 + eps * N) * 2.0 ** (-2 * N)


def _cube(x: int) -> int:
    return (x - 1) * x * (x + 1)


def profile_fraction(M: int, N: int, k: int) -> Fraction:
    """``2 pi |p_k|`` after a deterministic pass, as an exact rational."""
    k = abs(int(k))
    if M == 1:
        L = 2 ** (N + 1)
        return Fraction(max(L - k, 0), L)
    if M == 2:
        X = 2 ** (N + 2)
        Y = 2 ** (N + 1)
        if k > X - 2:
            return Fraction(0)
        num = _cube(X - k)
        if k <= Y - 2:
            num -= 4 * _cube(Y - k)
        return Fraction(num, X + 2 ** (3 * N + 5))
    raise ValueError(f"M must be 1 or 2, got {M}")


def profile_branches(N: int, k: int) -> tuple[Fraction, Fraction]:
    """Both piecewise branches of the two-measurement profile at ``k`` (for continuity checks)."""
    X = 2 ** (N + 2)
    Y = 2 ** (N + 1)
    den = X + 2 ** (3 * N + 5)
    inner = Fraction(_cube(X - k) - 4 * _cube(Y - k), den)
    outer = Fraction(_cube(X - k), den)
    return inner, outer


def final_coefficient_profile(M: int, N: int, k: int) -> float:
    return float(profile_fraction(M, N, k)) / TWO_PI


def density_approximations(M: int, N: int, phi):
    """Smooth approximations to the final deterministic-pass density.

    ``M=1``: Fejer-type ``L/(2 pi) [sin(L phi/2) / (L phi/2)]^2`` with ``L = 2^{N+1}``.
    ``M=2``: Gaussian of width ``sqrt(3)/2 * 2^{-N}``.
    """
    phi = np.asarray(phi, dtype=float)
    if M == 1:
        L = 2.0 ** (N + 1)
        return L / TWO_PI * np.sinc(L * phi / TWO_PI) ** 2
    if M == 2:
        return np.exp(-(2.0 / 3.0) * (2.0**N * phi) ** 2) / (2.0**-N * math.sqrt(1.5 * math.pi))
    raise ValueError(f"M must be 1 or 2, got {M}")


def gaussian_width(N: int) -> float:
    return math.sqrt(3.0) / 2.0 * 2.0**-N


def gaussian_coefficient(N: int, k) -> np.ndarray:
    return np.exp(-3.0 * np.asarray(k, dtype=float) ** 2 * 2.0 ** (-2 * N - 3)) / TWO_PI
