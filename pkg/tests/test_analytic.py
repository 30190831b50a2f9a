from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import ellipk

from mirrorwave import analytic as an
from mirrorwave.errors import InvalidInputError, SeriesError
from mirrorwave.law import TransmittanceLaw, radial_density, transmittance_law

# E[t^n] from an 80-digit mpmath quadrature of the spectral integral
MOMENT_ORACLE = {
    (1, 0.5): 0.65673604702765915232,
    (1, 1.0): 0.46877444098253581826,
    (2, 1.0): 0.29341853602255923439,
    (3, 2.0): 0.09202612916737395256,
    (1, 6.0): 0.045963399565589269891,
    (1, 30.0): 0.000021182680240007673452,
    (2, 30.0): 6.162917189576514793e-6,
    (3, 30.0): 3.5358389179266547461e-6,
}
# E[t^2 (1-t)^3] at ell = 1, alternating sum of the oracle moments at 80 digits
MIXED_ORACLE_K3_ELL1 = 0.018593664443282600514
# symmetric series at ell = 0.5, |T1|^2 = 0.4: 70-term partial sum in 80 digits,
# and its remainder bound E[t (1-t)^70]
SYMMETRIC_PARTIAL_70 = 0.33074470492442240167
SYMMETRIC_REMAINDER_70 = 1.4289e-6


@pytest.mark.parametrize("key", sorted(MOMENT_ORACLE))
def test_moments_against_mpmath(key):
    n, ell = key
    assert an.transmission_moment(n, ell) == pytest.approx(MOMENT_ORACLE[key], rel=1e-10)


@pytest.mark.parametrize("n", range(1, 7))
def test_moment_normalization(n):
    assert abs(an.transmission_moment(n, 0.0) - 1.0) < 1e-9


@pytest.mark.parametrize("ell", [0.2, 1.0, 3.0, 10.0])
@pytest.mark.parametrize("n", [1, 2, 4])
def test_law_engine_reproduces_spectral_moments(n, ell):
    law = transmittance_law(ell)
    assert law.expect(lambda t: t**n) == pytest.approx(an.transmission_moment(n, ell), rel=1e-9)


def test_law_normalization_and_density_positive():
    for ell in (1e-3, 0.5, 8.0, 30.0):
        law = TransmittanceLaw(ell)
        assert abs(law.weights.sum() - 1.0) < 1e-10
        assert np.all(law.nodes > 0) and np.all(law.nodes <= 1)
    assert np.all(radial_density(np.linspace(0.01, 5.0, 50), 1.0) > 0)


def test_law_point_mass_at_zero_strength():
    law = TransmittanceLaw(0.0)
    assert law.expect(lambda t: t**3) == 1.0
    np.testing.assert_array_equal(law.moments_block(2, 0, 3), [1.0, 0.0, 0.0])


def test_moments_decrease_with_order():
    values = [an.transmission_moment(n, 1.5) for n in range(1, 6)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_strong_localization_closed_form_value():
    # pi^{5/2} / (2 ell^{3/2}) phi_1(0) e^{-ell/4} at ell = 4
    assert an.strong_localization_moment(1, 4.0) == pytest.approx(math.pi**2.5 / 16.0 * math.exp(-1.0), rel=1e-15)


def test_strong_localization_ratio_tends_to_one():
    # the quadrature approaches the asymptotic form only slowly in ell
    ratios = [an.transmission_moment(1, ell) / an.strong_localization_moment(1, ell) for ell in (30.0, 120.0, 480.0)]
    assert ratios[0] < ratios[1] < ratios[2] < 1.0
    assert abs(ratios[2] - 1.0) < 0.1


def test_constant_c_equals_elliptic_integral():
    assert an.constant_C() == pytest.approx(ellipk(0.5) / math.pi, rel=1e-14)
    assert an.constant_C() == pytest.approx(0.5901702995080481, rel=1e-14)


def test_mixed_moment_routes():
    assert an.mixed_moment(3, 1.0) == pytest.approx(MIXED_ORACLE_K3_ELL1, rel=1e-9)
    assert an.mixed_moment(3, 1.0, extended=True) == pytest.approx(MIXED_ORACLE_K3_ELL1, rel=1e-12)
    law = transmittance_law(1.0)
    assert law.moments_block(2, 3, 1)[0] == pytest.approx(MIXED_ORACLE_K3_ELL1, rel=1e-9)


@pytest.mark.parametrize("k", [0, 7, 20, 30])
def test_mixed_moment_spectral_vs_law(k):
    law = transmittance_law(0.8)
    assert an.mixed_moment(k, 0.8) == pytest.approx(law.moments_block(2, k, 1)[0], rel=1e-8)


def test_mixed_moment_zero_strength():
    assert an.mixed_moment(0, 0.0) == 1.0
    assert an.mixed_moment(4, 0.0) == 0.0


@given(st.floats(0.0, 30.0))
def test_tau_coefficients_match_definition(q):
    r1 = q / (1j + q)
    assert abs(abs(2 * r1 - 1) - 1) < 1e-12
    for k in (0, 1, 5, 17):
        direct = abs(1 - (2 * r1 - 1) ** (k + 1)) ** 2 / 4
        assert abs(an.tau_k(k, r1) - direct) < 1e-12


def test_tau_rejects_off_circle():
    with pytest.raises(InvalidInputError):
        an.tau_k(1, 0.3 + 0j)


def test_symmetric_series_in_oracle_bracket():
    value = an.mean_intensity_symmetric(0.5, an.barrier_reflection(0.4))
    assert SYMMETRIC_PARTIAL_70 <= value <= SYMMETRIC_PARTIAL_70 + SYMMETRIC_REMAINDER_70


def test_symmetric_series_termwise_vs_closed_partial_sums():
    r1 = an.barrier_reflection(0.4)
    terms = an.symmetric_series_terms(0.5, r1, 4000)
    total = an.mean_intensity_symmetric(0.5, r1)
    bound = transmittance_law(0.5).moments_block(1, 4000, 1)[0]
    # the returned value stops once its own remainder is below rel_tol
    assert abs(total - terms.sum()) <= 1e-9 * total + bound


@pytest.mark.parametrize("t1_sq", [1.0, 0.4, 0.1, 1e-3])
@pytest.mark.parametrize("ell", [0.3, 2.0, 6.0])
def test_symmetric_series_vs_resummation(ell, t1_sq):
    r1 = an.barrier_reflection(t1_sq)
    ctl = an.SeriesControl(rel_tol=1e-10)
    series = an.mean_intensity_symmetric(ell, r1, ctl)
    assert series == pytest.approx(an.symmetric_mean_resummed(ell, r1), rel=2e-10)


def test_no_barrier_matches_moment_routes():
    # without a barrier the symmetric mean is E[t / (2 - t)] = sum_j 2^{-j} E[t^j],
    # and for independent sections the coefficients reduce to C_{k,k'} = delta_{k,k'}
    for ell in (0.4, 2.5):
        geometric = sum(0.5**j * an.transmission_moment(j, ell) for j in range(1, 50))
        assert an.mean_intensity_symmetric(ell, 0j) == pytest.approx(geometric, rel=1e-9)
        m = transmittance_law(ell).moments_block(1, 0, 4000)
        assert an.mean_intensity_independent(ell, 0j) == pytest.approx(float(m @ m), rel=1e-6)
        assert an.independent_mean_resummed(ell, 0j) == pytest.approx(float(m @ m), rel=1e-6)


def test_zero_strength_returns_barrier():
    r1 = an.barrier_reflection(0.3)
    assert an.mean_intensity_symmetric(0.0, r1) == pytest.approx(0.3, rel=1e-15)
    assert an.mean_intensity_independent(0.0, r1) == pytest.approx(0.3, rel=1e-15)


def test_regime_sign_invariance():
    r1 = an.barrier_reflection(0.4)
    assert an.mean_intensity_symmetric(1.0, -r1) == an.mean_intensity_symmetric(1.0, r1)
    assert an.mean_intensity_independent(1.0, -r1) == an.mean_intensity_independent(1.0, r1)


def test_independent_coefficient_routes():
    r1 = an.barrier_reflection(0.4)
    matrix = an.independent_coefficient_matrix(30, r1)
    for k, kp in [(0, 0), (1, 0), (3, 5), (12, 12), (29, 17)]:
        assert matrix[k, kp] == pytest.approx(an.independent_coefficient(k, kp, r1), rel=1e-9, abs=1e-15)
    # the extended-precision branch of the explicit sum
    big = an.independent_coefficient_matrix(45, r1)
    assert big[40, 4] == pytest.approx(an.independent_coefficient(40, 4, r1), rel=1e-8, abs=1e-15)
    assert np.allclose(matrix, matrix.T)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.01, 100.0))
def test_independent_coefficients_bounded_by_one(q):
    r1 = q / (1j + q)
    assert an.independent_coefficient_matrix(60, r1).max() <= 1.0 + 1e-12


@pytest.mark.parametrize("t1_sq", [1.0, 0.4, 0.1])
@pytest.mark.parametrize("ell", [0.5, 2.0])
def test_independent_series_vs_resummation(ell, t1_sq):
    r1 = an.barrier_reflection(t1_sq)
    assert an.mean_intensity_independent(ell, r1) == pytest.approx(an.independent_mean_resummed(ell, r1), rel=1e-6)


def test_independent_series_bracket_at_large_strength():
    # at ell = 6 the double series cannot meet the tolerance, so the bracketed
    # resummation is returned
    r1 = an.barrier_reflection(0.4)
    assert an.mean_intensity_independent(6.0, r1) == pytest.approx(an.independent_mean_resummed(6.0, r1), rel=1e-15)


def test_series_error_when_budget_too_small():
    with pytest.raises(SeriesError):
        an.mean_intensity_symmetric(3.0, an.barrier_reflection(0.4), an.SeriesControl(rel_tol=1e-12, max_terms=4))


@pytest.mark.parametrize("t1_sq", [0.2, 0.8])
def test_weak_medium_first_order(t1_sq):
    ell = 1e-3
    r1 = an.barrier_reflection(t1_sq)
    mean_r2 = 1.0 - an.transmission_moment(1, ell)
    exact_gain = an.mean_intensity_symmetric(ell, r1, an.SeriesControl(rel_tol=1e-13)) - t1_sq
    approx_gain = an.weak_scattering_approx(mean_r2, t1_sq) - t1_sq
    assert exact_gain == pytest.approx(approx_gain, rel=1e-2)


def test_strong_barrier_limit_identity():
    # 2 E[1/t] - 1 = e^{2 ell} for the law of t
    for ell in (0.5, 1.0, 2.0):
        law = transmittance_law(ell)
        assert 2 * law.expect(lambda t: 1 / t) - 1 == pytest.approx(math.exp(2 * ell), rel=1e-8)


def test_strong_barrier_limit_approached():
    ell = 1.0
    ratios = [an.mean_intensity_symmetric(ell, an.barrier_reflection(x)) / an.strong_barrier_asymptotics(ell, x)
              for x in (1e-3, 1e-5, 1e-7)]
    assert ratios[0] < ratios[1] < ratios[2] <= 1.0 + 1e-9
    assert abs(ratios[2] - 1.0) < 1e-3


def test_localization_length():
    q = an.LocalizationQuery(2.0, 1.0, 0.5)
    assert an.localization_length(q) == pytest.approx(4.0 / (4.0 * 0.5))
    weak = an.LocalizationQuery(2.0, 1.0, 0.5, an.LocRegime.WEAKLY_HETEROGENEOUS, 0.25)
    assert an.localization_length(weak) == pytest.approx(4.0)
    assert an.localization_length(an.LocalizationQuery(2.0, 1.0, 0.0)) == math.inf
    with pytest.raises(InvalidInputError):
        an.LocalizationQuery(2.0, 1.0, 0.5, an.LocRegime.WEAKLY_HETEROGENEOUS)


def test_input_validation():
    with pytest.raises(InvalidInputError):
        an.MomentQuery(0, 1.0)
    with pytest.raises(InvalidInputError):
        an.transmission_moment(1, -1.0)
    with pytest.raises(InvalidInputError):
        an.mean_intensity_symmetric(1.0, 0.3 + 0.3j)
    with pytest.raises(InvalidInputError):
        an.SeriesControl(rel_tol=0.0)
    with pytest.raises(InvalidInputError):
        an.barrier_reflection(1.5)
