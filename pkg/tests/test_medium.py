from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mirrorwave import analytic as an
from mirrorwave import medium as md
from mirrorwave.errors import IntegrationError, InvalidInputError
from mirrorwave.scatter_core import (
    BarrierAsymptotic,
    Regime,
    asymptotic_barrier,
    compose_chain,
    compose_scattering,
    invert_propagator,
    propagator_to_scattering,
)

BINARY = md.MediumSpec(1.0, 0.05, 0.5, md.MediumModel.BINARY)
OU = md.MediumSpec(1.0, 0.05, 0.2, md.MediumModel.OU)


def test_sampling_is_deterministic_and_seed_sensitive():
    a = md.sample_medium(BINARY, (1, 2))
    b = md.sample_medium(BINARY, (1, 2))
    c = md.sample_medium(BINARY, (1, 3))
    np.testing.assert_array_equal(a.breakpoints, b.breakpoints)
    np.testing.assert_array_equal(a.values, b.values)
    assert not np.array_equal(a.breakpoints, c.breakpoints)


def test_realization_covers_section():
    for spec in (BINARY, OU, md.MediumSpec(2.0, 0.05, 0.3, "binary", start=0.5)):
        r = md.sample_medium(spec, 4)
        assert r.breakpoints[0] == spec.start and r.breakpoints[-1] == spec.half_length
        assert np.all(np.diff(r.breakpoints) > 0)


def test_binary_statistics():
    values, lengths = [], []
    long_binary = md.MediumSpec(100.0, 0.05, 0.5)
    for i in range(10):
        r = md.sample_medium(long_binary, (9, i))
        values.append(r.values)
        lengths.append(np.diff(r.breakpoints)[:-1])
    v = np.concatenate(values)
    assert set(np.unique(v)) == {-0.5, 0.5}
    assert abs(v.mean()) < 0.02
    # exponential cells with mean corr_length; the truncated last cell is dropped
    assert np.concatenate(lengths).mean() == pytest.approx(0.05, rel=0.02)


def test_ou_statistics():
    spec = md.MediumSpec(400.0, 0.05, 0.2, md.MediumModel.OU)
    v = md.sample_medium(spec, 0).values
    assert v.std() == pytest.approx(0.2, rel=0.02)
    lag = int(round(spec.corr_length / spec.ou_step))
    corr = np.corrcoef(v[:-lag], v[lag:])[0, 1]
    assert corr == pytest.approx(math.exp(-1.0), abs=0.02)


def test_spec_validation():
    with pytest.raises(InvalidInputError):
        md.MediumSpec(1.0, 0.01, 1.0)
    with pytest.raises(InvalidInputError):
        md.MediumSpec(1.0, 0.0, 0.5)
    with pytest.raises(InvalidInputError):
        md.MediumSpec(1.0, 0.01, 0.5, start=2.0)
    with pytest.warns(UserWarning):
        md.MediumSpec(1.0, 0.5, 0.5)


def test_autocovariance_integrals():
    spec = md.MediumSpec(1.0, 0.02, 0.3)
    assert spec.autocov_integral == pytest.approx(2 * 0.09 * 0.02)
    assert spec.cos_weighted_integral(0.0) == pytest.approx(spec.autocov_integral)
    assert spec.cos_weighted_integral(25.0) == pytest.approx(spec.autocov_integral / 2.0)


@pytest.mark.parametrize("spec,seed", [(BINARY, 3), (OU, 4)])
@pytest.mark.parametrize("omega", [5.0, 20.0])
def test_cellwise_propagator_matches_runge_kutta(spec, seed, omega):
    r = md.sample_medium(spec, seed)
    exact = md.integrate_half_propagator(r, omega)
    rk4 = md.integrate_half_propagator_rk4(r, omega)
    assert abs(exact.alpha - rk4.alpha) < 1e-9
    assert abs(exact.gamma - rk4.gamma) < 1e-9
    assert exact.unimodularity_defect() < 1e-12


def test_cell_propagator_homogeneous_and_single_interface():
    p = md.cell_propagator(0.0, 0.7, 0.0, 3.0)
    assert abs(p.alpha - 1) < 1e-15 and abs(p.gamma) < 1e-15
    # a single cell of constant mu: compare with a Runge-Kutta solve on a fine grid
    cell = md.MediumRealization(np.array([0.2, 0.9]), np.array([0.4]))
    rk4 = md.integrate_half_propagator_rk4(cell, 6.0, max_step=1e-3)
    exact = md.cell_propagator(0.2, 0.9, 0.4, 6.0)
    assert abs(exact.alpha - rk4.alpha) < 1e-11 and abs(exact.gamma - rk4.gamma) < 1e-11


def test_left_integration_equals_mirror():
    for seed in range(5):
        r = md.sample_medium(BINARY, (5, seed))
        p_plus = md.integrate_half_propagator(r, 12.0)
        left = md.integrate_left_propagator(r.mirrored(), 12.0)
        mirror = md.mirror_propagator(p_plus)
        assert abs(left.alpha - mirror.alpha) < 1e-12 and abs(left.gamma - mirror.gamma) < 1e-12


def test_mirror_swaps_reflections():
    r = md.sample_medium(BINARY, 8)
    p_plus = md.integrate_half_propagator(r, 9.0)
    right = propagator_to_scattering(p_plus)
    left = md.left_section_scattering(md.mirror_propagator(p_plus))
    assert abs(left.t - right.t) < 1e-12
    assert abs(left.r - right.r_adj) < 1e-12
    assert abs(left.r_adj - right.r) < 1e-12


@pytest.mark.parametrize("regime", list(Regime))
def test_system_transmission_routes(regime):
    barrier = BarrierAsymptotic(1.7, regime)
    for seed in range(10):
        p_plus = md.integrate_half_propagator(md.sample_medium(BINARY, (6, seed)), 14.0)
        p_minus = md.mirror_propagator(p_plus)
        closed = md.system_transmission(p_plus, barrier)
        general = md.independent_system_transmission(p_minus, p_plus, barrier)
        # scattering composition of the three sectors
        chain = compose_scattering(
            compose_scattering(md.left_section_scattering(p_minus), asymptotic_barrier(barrier)),
            propagator_to_scattering(p_plus),
        )
        assert abs(closed - general) < 1e-12
        assert abs(closed - chain.t) < 1e-12


def test_system_transmission_with_exact_slab():
    from mirrorwave.scatter_core import BarrierSpec, barrier_propagator

    omega = 14.0
    slab = barrier_propagator(BarrierSpec(0.02, 1.0, 0.5, 1.0, 0.1), omega)
    for seed in range(5):
        p_plus = md.integrate_half_propagator(md.sample_medium(BINARY, (7, seed)), omega)
        p_minus = md.mirror_propagator(p_plus)
        full = compose_chain(invert_propagator(p_minus), slab, p_plus)
        t_full = propagator_to_scattering(full).t
        assert abs(md.independent_system_transmission(p_minus, p_plus, propagator_to_scattering(slab)) - t_full) < 1e-12


def test_batch_matches_single_realizations():
    ens = md.sample_section_ensemble(BINARY, 20.0, 6, 9)
    for i in range(6):
        single = md.integrate_half_propagator(md.sample_medium(BINARY, md.realization_seed(9, i)), 20.0)
        assert abs(ens.p_plus.alpha[i] - single.alpha) < 1e-12
        assert abs(ens.p_plus.gamma[i] - single.gamma) < 1e-12


def test_homogeneous_medium_gives_barrier_exactly():
    spec = md.MediumSpec(1.0, 0.01, 0.0)
    est = md.monte_carlo_mean_intensity(spec, BarrierAsymptotic.from_transmittance(0.4), 10.0, 100, 0)
    assert abs(est.mean - 0.4) < 1e-12 and est.std_error < 1e-12


def test_large_fluctuation_raises_with_index():
    r = md.MediumRealization(np.array([0.0, 0.5, 1.0]), np.array([0.2, 1.2]), (3,))
    with pytest.raises(IntegrationError):
        md.integrate_half_propagator(r, 1.0)


def test_monte_carlo_needs_enough_samples():
    with pytest.raises(InvalidInputError):
        md.monte_carlo_mean_intensity(BINARY, BarrierAsymptotic(1.0), 10.0, 50, 0)


def test_closed_form_calibration():
    spec = md.MediumSpec(1.0, 0.01, 0.5)
    omega = md.frequency_for_strength(spec, 2.0)
    assert 1.0 / md.closed_form_localization_length(spec, omega) == pytest.approx(2.0)


def test_lyapunov_calibration_reaches_target():
    spec = md.MediumSpec(1.0, 0.01, 0.9)
    omega = md.frequency_for_strength(spec, 1.0, md.Calibration.LYAPUNOV, n_calibration=400, seed=3)
    measured = md.lyapunov_localization_length(spec, omega, 400, seed=4)
    assert spec.length / measured == pytest.approx(1.0, rel=0.03)


@pytest.mark.parametrize("t1_sq", [1.0, 0.1])
def test_monte_carlo_symmetric_vs_series(t1_sq):
    spec = md.MediumSpec(1.0, 0.01, 0.9)
    omega = md.frequency_for_strength(spec, 1.0, md.Calibration.LYAPUNOV, seed=1)
    est = md.monte_carlo_mean_intensity(spec, BarrierAsymptotic.from_transmittance(t1_sq), omega, 3000, 21)
    series = an.mean_intensity_symmetric(1.0, an.barrier_reflection(t1_sq))
    assert abs(est.mean - series) <= 3.0 * est.std_error


def test_monte_carlo_independent_vs_series():
    spec = md.MediumSpec(1.0, 0.01, 0.9)
    omega = md.frequency_for_strength(spec, 1.0, md.Calibration.LYAPUNOV, seed=1)
    ens = md.sample_section_ensemble(spec, omega, 3000, 22, symmetric=False)
    est = ens.mean_intensity(BarrierAsymptotic.from_transmittance(0.4))
    series = an.mean_intensity_independent(1.0, an.barrier_reflection(0.4))
    assert abs(est.mean - series) <= 3.0 * est.std_error


def test_half_transmittance_mean_matches_moment():
    spec = md.MediumSpec(1.0, 0.01, 0.9)
    omega = md.frequency_for_strength(spec, 1.0, md.Calibration.LYAPUNOV, seed=1)
    est = md.EnsembleEstimate.from_samples(md.sample_section_ensemble(spec, omega, 3000, 23).half_transmittance())
    assert abs(est.mean - an.transmission_moment(1, 1.0)) <= 3.0 * est.std_error


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.floats(1.0, 40.0))
def test_section_propagators_unimodular(seed, omega):
    p = md.integrate_half_propagator(md.sample_medium(BINARY, seed), omega)
    assert p.is_unimodular(1e-10)
    assert propagator_to_scattering(p).conservation_defect() < 1e-10


def test_identity_medium_propagator():
    r = md.MediumRealization(np.array([0.0, 1.0]), np.array([0.0]))
    p = md.integrate_half_propagator(r, 3.0)
    assert abs(p.alpha - 1) < 1e-15 and abs(p.gamma) < 1e-15
