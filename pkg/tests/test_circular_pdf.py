import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adaptphase.circular_pdf import (
    FourierPdf,
    ImpossibleOutcome,
    MeasurementSettings,
    ZeroCoefficient,
    bayes_update,
    density_grid,
    evaluate_density,
    flat_prior,
    gaussian_pdf,
    holevo_variance,
    mean,
    phase_estimate,
    variance,
    wrap_phase,
    write_coefficients_csv,
    write_density_csv,
)
from adaptphase.measurement import IDEAL, ReadoutModel

from oracles import grid_bayes, quad_moments

P0 = 1 / (2 * math.pi)


def test_flat_prior():
    pdf = flat_prior()
    assert pdf.K == 0
    assert pdf.coefficient(0) == pytest.approx(0.15915494309189535, abs=0)
    assert evaluate_density(pdf, 1.3) == pytest.approx(P0, abs=1e-15)
    assert holevo_variance(pdf) == math.inf


def test_update_single_outcomes():
    s = MeasurementSettings(1, 0.0)
    up = bayes_update(flat_prior(), s, 1, IDEAL)
    assert up.K == 1
    assert up.coefficient(0) == P0
    assert up.coefficient(1) == pytest.approx(1 / (4 * math.pi), abs=1e-16)
    down = bayes_update(flat_prior(), s, 0, IDEAL)
    assert down.coefficient(1) == pytest.approx(-1 / (4 * math.pi), abs=1e-16)


def test_zero_contrast_is_uninformative(cos_posterior):
    pdf = cos_posterior(0.3)
    out = bayes_update(pdf, MeasurementSettings(3, 0.4), 1, ReadoutModel(c=0.0))
    assert out.K == pdf.K + 3
    np.testing.assert_allclose(out.coeffs[: pdf.K + 1], pdf.coeffs, atol=1e-16)
    assert np.all(out.coeffs[pdf.K + 1:] == 0)


def test_two_updates_match_binomial_rule():
    s = MeasurementSettings(1, 0.0)
    pdf = bayes_update(bayes_update(flat_prior(), s, 1, IDEAL), s, 1, IDEAL)
    # (6 p_k + 4 p_{k-1} + 4 p_{k+1} + p_{k-2} + p_{k+2}) / norm applied to the flat prior
    raw = np.array([6, 4, 1]) * P0
    norm = 2 * math.pi * 6 * P0
    np.testing.assert_allclose(pdf.coeffs.real, raw / norm, atol=1e-16)
    assert np.all(pdf.coeffs.imag == 0)


def test_update_rejects_bad_settings():
    with pytest.raises(ValueError):
        MeasurementSettings(0, 0.0)
    with pytest.raises(ValueError):
        MeasurementSettings(2, float("nan"))
    with pytest.raises(ValueError):
        bayes_update(flat_prior(), MeasurementSettings(1), 2, IDEAL)


def test_impossible_outcome():
    # first-harmonic limit of a point mass at 0: outcome 0 at theta=0 has zero probability
    with pytest.raises(ImpossibleOutcome):
        bayes_update(FourierPdf([P0, P0]), MeasurementSettings(1, 0.0), 0, IDEAL)


def test_wrap_phase():
    assert wrap_phase(math.pi) == math.pi
    assert wrap_phase(-math.pi) == math.pi
    assert wrap_phase(3 * math.pi / 2) == pytest.approx(-math.pi / 2)
    assert MeasurementSettings(1, 7.0).theta == pytest.approx(7.0 - 2 * math.pi)


class TestMoments:
    def test_flat(self):
        assert mean(flat_prior()) == 0.0
        assert variance(flat_prior()) == pytest.approx(math.pi**2 / 3, abs=1e-14)

    def test_even_posterior(self, cos_posterior):
        pdf = cos_posterior(0.0)
        assert mean(pdf) == pytest.approx(0.0, abs=1e-15)
        assert variance(pdf) == pytest.approx(math.pi**2 / 3 - 2, abs=1e-12)
        _, var_q, _ = quad_moments(lambda x: (1 + math.cos(x)) / (2 * math.pi))
        assert variance(pdf) == pytest.approx(var_q, abs=1e-9)

    def test_shifted_posterior(self, cos_posterior):
        pdf = cos_posterior(0.5)
        mu_q, var_q, _ = quad_moments(lambda x: (1 + math.cos(x - 0.5)) / (2 * math.pi))
        # the linear mean over (-pi, pi] is sin(0.5), not the circular location 0.5
        assert mu_q == pytest.approx(0.479425538604203, abs=1e-12)
        assert mean(pdf) == pytest.approx(mu_q, abs=1e-9)
        assert variance(pdf) == pytest.approx(var_q, abs=1e-9)
        assert phase_estimate(pdf, 1) == pytest.approx(0.5, abs=1e-9)

    def test_narrow_gaussian_variance(self):
        pdf = gaussian_pdf(0.01)
        assert variance(pdf) == pytest.approx(1e-4, rel=0.05)
        assert mean(pdf) == pytest.approx(0.0, abs=1e-12)

    def test_moments_against_quadrature_after_updates(self):
        pdf = flat_prior()
        r = ReadoutModel(0.9, 0.05)
        for t, th, m in [(3, 0.4, 1), (2, -1.1, 0), (1, 2.0, 1)]:
            pdf = bayes_update(pdf, MeasurementSettings(t, th), m, r)
        mu_q, var_q, z_q = quad_moments(lambda x: evaluate_density(pdf, x))
        assert mean(pdf) == pytest.approx(mu_q, abs=1e-8)
        assert variance(pdf) == pytest.approx(var_q, abs=1e-8)
        assert holevo_variance(pdf) == pytest.approx(abs(z_q) ** -2 - 1, abs=1e-8)


class TestHolevo:
    def test_concentrated(self):
        assert holevo_variance(FourierPdf([P0, P0])) == 0.0

    def test_half(self):
        assert holevo_variance(FourierPdf([P0, 1 / (4 * math.pi)])) == pytest.approx(3.0, abs=1e-14)


class TestPhaseEstimate:
    def test_even(self, cos_posterior):
        assert phase_estimate(cos_posterior(0.0), 1) == 0.0

    def test_flat_raises(self):
        with pytest.raises(ZeroCoefficient):
            phase_estimate(flat_prior(), 1)

    def test_higher_harmonic_range(self):
        pdf = bayes_update(flat_prior(), MeasurementSettings(4, 1.0), 1, IDEAL)
        est = phase_estimate(pdf, 4)
        assert -math.pi / 4 < est <= math.pi / 4
        assert est == pytest.approx(-0.25, abs=1e-12)


class TestDensity:
    def test_cos_posterior(self, cos_posterior):
        pdf = cos_posterior(0.0)
        assert evaluate_density(pdf, 0.0) == pytest.approx(1 / math.pi, abs=1e-15)
        assert evaluate_density(pdf, math.pi) == pytest.approx(0.0, abs=1e-12)

    def test_normalized_on_grid(self, deterministic_pass):
        pdf = deterministic_pass(6, 2).pdf
        vals = evaluate_density(pdf, density_grid(4096))
        assert np.sum(vals) * 2 * math.pi / 4096 == pytest.approx(1.0, abs=1e-8)
        assert vals.min() > -1e-8

    def test_csv_dumps(self, tmp_path, cos_posterior):
        pdf = cos_posterior(0.2)
        write_density_csv(pdf, tmp_path / "d.csv", 64)
        rows = (tmp_path / "d.csv").read_text().splitlines()
        assert rows[0] == "phi,density"
        phis = [float(r.split(",")[0]) for r in rows[1:]]
        assert len(phis) == 64 and all(b > a for a, b in zip(phis, phis[1:]))
        assert phis[-1] == math.pi
        write_coefficients_csv(pdf, tmp_path / "k.csv")
        rows = (tmp_path / "k.csv").read_text().splitlines()
        assert rows[0] == "k,re,im" and len(rows) == pdf.K + 2


def _random_history(draw_list):
    pdf = flat_prior()
    for t, th, m, c, g in draw_list:
        pdf = bayes_update(pdf, MeasurementSettings(t, th), m, ReadoutModel(c, g))
    return pdf


step = st.tuples(
    st.integers(1, 4),
    st.floats(-math.pi, math.pi),
    st.integers(0, 1),
    st.floats(0.0, 0.99),
    st.floats(0.0, 0.5),
)


@settings(max_examples=150, deadline=None)
@given(st.lists(step, max_size=3), step)
def test_update_matches_grid_bayes(history, nxt):
    prior = _random_history(history)
    t, th, m, c, g = nxt
    post = bayes_update(prior, MeasurementSettings(t, th), m, ReadoutModel(c, g))
    ref = grid_bayes(prior.coeffs, t, MeasurementSettings(t, th).theta, m, c, g)
    assert post.K == prior.K + t
    assert np.max(np.abs(post.coeffs - ref)) < 1e-8


@settings(max_examples=100, deadline=None)
@given(st.lists(step, min_size=1, max_size=4))
def test_invariants_hold_after_updates(history):
    pdf = _random_history(history)
    assert pdf.coefficient(0) == P0
    assert np.all(np.abs(pdf.coeffs) <= P0 * (1 + 1e-12))
    vals = evaluate_density(pdf, density_grid(4096))
    assert np.sum(vals) * 2 * math.pi / 4096 == pytest.approx(1.0, abs=1e-8)
    assert vals.min() > -1e-8
    assert variance(pdf) >= -1e-10


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.floats(-3.0, 3.0), st.integers(0, 1), st.floats(0.1, 1.0))
def test_mirror_symmetry(t, theta, m, c):
    even = bayes_update(flat_prior(), MeasurementSettings(2, 0.0), 1, ReadoutModel(c))
    plus = bayes_update(even, MeasurementSettings(t, theta), m, ReadoutModel(c))
    minus = bayes_update(even, MeasurementSettings(t, -theta), m, ReadoutModel(c))
    phis = np.linspace(-3.1, 3.1, 97)
    np.testing.assert_allclose(evaluate_density(plus, phis), evaluate_density(minus, -phis), atol=1e-10)
