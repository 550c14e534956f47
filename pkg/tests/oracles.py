"""Brute-force grid references, independent of the Fourier update path."""

import math

import numpy as np

from adaptphase.circular_pdf import MeasurementSettings
from adaptphase.controller import choose_phase
from adaptphase.spin_bath import outcome_distribution, qnd_update


def grid(n):
    return -math.pi + 2 * math.pi * np.arange(n) / n


def density_from_coeffs(coeffs, phis):
    """Direct real-valued synthesis: p0 + 2 sum_k (Re p_k cos k phi - Im p_k sin k phi)."""
    coeffs = np.asarray(coeffs)
    out = np.full(phis.shape, coeffs[0].real)
    for k in range(1, coeffs.size):
        out += 2 * (coeffs[k].real * np.cos(k * phis) - coeffs[k].imag * np.sin(k * phis))
    return out


def coeffs_from_density(values, phis, K):
    """p_k = (1/2pi) int P(phi) e^{-ik phi} dphi by the rectangle rule (exact for band < n)."""
    n = phis.size
    return np.array([np.sum(values * np.exp(-1j * k * phis)) / n for k in range(K + 1)])


def likelihood(phis, t, theta, m, c, gamma):
    return 0.5 * (1 - (-1) ** m * c * math.exp(-t * gamma) * np.cos(t * phis + theta))


def grid_bayes(coeffs, t, theta, m, c, gamma):
    K = len(coeffs) - 1
    n = max(16 * (K + t), 64)
    phis = grid(n)
    post = density_from_coeffs(coeffs, phis) * likelihood(phis, t, theta, m, c, gamma)
    post /= np.sum(post) * (2 * math.pi / n)
    return coeffs_from_density(post, phis, K + t)


def quad_moments(density, points=None):
    """Mean, linear variance and first circular moment by adaptive quadrature."""
    from scipy.integrate import quad

    kw = dict(limit=400, epsabs=1e-13, epsrel=1e-12, points=points)
    mass = quad(density, -math.pi, math.pi, **kw)[0]
    mu = quad(lambda x: x * density(x), -math.pi, math.pi, **kw)[0] / mass
    m2 = quad(lambda x: x * x * density(x), -math.pi, math.pi, **kw)[0] / mass
    re = quad(lambda x: math.cos(x) * density(x), -math.pi, math.pi, **kw)[0] / mass
    im = quad(lambda x: math.sin(x) * density(x), -math.pi, math.pi, **kw)[0] / mass
    return mu, m2 - mu * mu, complex(re, im)


def walk_tree(dist, steps, r, visit, depth=0, weight=1.0):
    """Exhaustive adaptive outcome tree over a discrete phase distribution.

    Visit every outcome branch with nonzero probability; calls ``visit(node, children, weight)``.
    """
    if depth == len(steps):
        visit(dist, [], weight)
        return
    t, M = steps[depth]
    s = MeasurementSettings(t, choose_phase(dist, t))
    p1 = outcome_distribution(dist, s, r)
    children = []
    for m, pm in ((0, 1 - p1), (1, p1)):
        if pm > 1e-14:
            children.append((pm, qnd_update(dist, s, m, r)))
    visit(dist, children, weight)
    for pm, child in children:
        walk_tree(child, steps, r, visit, depth + 1, weight * pm)
