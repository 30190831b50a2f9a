from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mirrorwave.errors import InvalidInputError, ResonanceError, SingularPropagatorError
from mirrorwave.scatter_core import (
    BarrierAsymptotic,
    BarrierSpec,
    Propagator2,
    Regime,
    Scattering2,
    asymptotic_barrier,
    barrier_propagator,
    compose_chain,
    compose_propagators,
    compose_scattering,
    invert_propagator,
    propagator_to_scattering,
    q_from_transmittance,
    scattering_to_propagator,
)

angles = st.floats(0.0, 2 * math.pi, allow_nan=False)
moduli = st.floats(0.0, 0.95, allow_nan=False)


@st.composite
def propagators(draw):
    """Random unimodular propagator built from a reflection modulus and two phases."""
    rho = draw(moduli)
    a = 1.0 / math.sqrt(1.0 - rho * rho)
    alpha = a * cmath.exp(1j * draw(angles))
    gamma = a * rho * cmath.exp(1j * draw(angles))
    return Propagator2(alpha, gamma)


def scattering_oracle(m: np.ndarray) -> tuple[complex, complex]:
    """Solve ``m @ [1, r] = [t, 0]`` for ``(r, t)`` as a linear system."""
    lhs = np.array([[m[0, 1], -1.0], [m[1, 1], 0.0]])
    rhs = -np.array([m[0, 0], m[1, 0]])
    r, t = np.linalg.solve(lhs, rhs)
    return complex(r), complex(t)


def test_identity_is_transparent():
    s = propagator_to_scattering(Propagator2.identity())
    assert s == Scattering2.transparent()


@given(propagators())
def test_scattering_matches_linear_solve(p):
    s = propagator_to_scattering(p)
    r, t = scattering_oracle(p.matrix())
    assert abs(s.r - r) < 1e-10 and abs(s.t - t) < 1e-10


@given(propagators())
def test_conservation_and_roundtrip(p):
    s = propagator_to_scattering(p)
    assert s.conservation_defect() < 1e-12
    back = scattering_to_propagator(s)
    assert abs(back.alpha - p.alpha) < 1e-9 and abs(back.gamma - p.gamma) < 1e-9


@settings(max_examples=1000)
@given(propagators(), propagators())
def test_propagator_and_scattering_composition_agree(left, right):
    via_propagator = propagator_to_scattering(compose_propagators(left, right))
    via_scattering = compose_scattering(propagator_to_scattering(left), propagator_to_scattering(right))
    for a, b in [(via_propagator.t, via_scattering.t), (via_propagator.r, via_scattering.r),
                 (via_propagator.r_adj, via_scattering.r_adj)]:
        assert abs(a - b) < 1e-9 * max(1.0, abs(a))


@given(propagators(), propagators())
def test_composition_is_matrix_product_and_unimodular(left, right):
    combined = compose_propagators(left, right)
    assert np.allclose(combined.matrix(), right.matrix() @ left.matrix(), atol=1e-10)
    assert combined.is_unimodular(1e-8 * abs(combined.alpha) ** 2)


@given(propagators())
def test_inverse(p):
    ident = compose_propagators(p, invert_propagator(p))
    assert abs(ident.alpha - 1) < 1e-9 and abs(ident.gamma) < 1e-9


def test_three_sector_chain_against_full_matrices():
    rng = np.random.default_rng(2)
    sections = []
    for _ in range(3):
        rho = rng.uniform(0, 0.9)
        a = 1 / math.sqrt(1 - rho * rho)
        sections.append(Propagator2(a * np.exp(2j * np.pi * rng.random()), a * rho * np.exp(2j * np.pi * rng.random())))
    chain = compose_chain(*sections)
    full = sections[2].matrix() @ sections[1].matrix() @ sections[0].matrix()
    np.testing.assert_allclose(chain.matrix(), full, atol=1e-12)
    r, t = scattering_oracle(full)
    s = propagator_to_scattering(chain)
    assert abs(s.r - r) < 1e-12 and abs(s.t - t) < 1e-12


def test_vectorized_fields():
    alpha = np.array([1.0 + 0j, 2.0])
    gamma = np.array([0j, math.sqrt(3.0)])
    s = propagator_to_scattering(Propagator2(alpha, gamma))
    np.testing.assert_allclose(np.abs(s.t) ** 2, [1.0, 0.25])


def textbook_slab_transmittance(spec: BarrierSpec, omega: float) -> float:
    """Energy transmittance of a slab: ``1 / (1 + (m - 1/m)^2 sin^2(phi) / 4)``."""
    m = spec.zeta1 / spec.zeta0
    phi = omega * spec.d / spec.c1
    return 1.0 / (1.0 + 0.25 * (m - 1.0 / m) ** 2 * math.sin(phi) ** 2)


@pytest.mark.parametrize("omega", [0.3, 1.0, 7.5])
@pytest.mark.parametrize("zeta1", [0.05, 0.5, 3.0])
def test_slab_against_textbook_transmittance(omega, zeta1):
    spec = BarrierSpec(d=0.4, c0=1.0, c1=0.3, zeta0=1.0, zeta1=zeta1)
    s = propagator_to_scattering(barrier_propagator(spec, omega))
    assert abs(abs(s.t) ** 2 - textbook_slab_transmittance(spec, omega)) < 1e-12
    assert s.conservation_defect() < 1e-12
    # a symmetric slab reflects equally from both sides
    assert abs(abs(s.r) - abs(s.r_adj)) < 1e-12


def test_slab_limits():
    matched = barrier_propagator(BarrierSpec(0.7, 1.0, 1.0, 2.0, 2.0), 3.0)
    assert abs(matched.alpha - 1) < 1e-14 and abs(matched.gamma) < 1e-14
    empty = barrier_propagator(BarrierSpec(0.0, 1.0, 0.2, 1.0, 0.01), 3.0)
    assert abs(empty.alpha - 1) < 1e-14 and abs(empty.gamma) < 1e-14


@pytest.mark.parametrize("regime,ratio", [(Regime.IMPEDANCE_DROP, 1e-4), (Regime.IMPEDANCE_JUMP, 1e4)])
def test_thin_slab_approaches_point_barrier(regime, ratio):
    # thin slab with q = (zeta_big/zeta_small) omega d / (2 c1) held at 1.3
    q, omega, c1 = 1.3, 1.0, 1.0
    d = 2.0 * c1 * q * min(ratio, 1.0 / ratio) / omega
    zeta1 = ratio
    exact = propagator_to_scattering(barrier_propagator(BarrierSpec(d, 1.0, c1, 1.0, zeta1), omega))
    approx = asymptotic_barrier(BarrierAsymptotic(q, regime))
    assert abs(exact.t - approx.t) < 1e-3
    assert abs(exact.r - approx.r) < 1e-3


def test_point_barrier_values():
    b = asymptotic_barrier(BarrierAsymptotic(1.0))
    assert abs(abs(b.t) ** 2 - 0.5) < 1e-15
    assert abs(b.r - 1 / (1j + 1)) < 1e-15
    jump = asymptotic_barrier(BarrierAsymptotic(1.0, Regime.IMPEDANCE_JUMP))
    assert abs(jump.r + b.r) < 1e-15
    assert asymptotic_barrier(BarrierAsymptotic(0.0)) == Scattering2(1 + 0j, 0j, 0j)


@given(st.floats(1e-6, 1.0))
def test_q_from_transmittance_roundtrip(t1_sq):
    assert abs(BarrierAsymptotic.from_transmittance(t1_sq).transmittance - t1_sq) < 1e-12


@given(st.floats(0.0, 50.0))
def test_point_barrier_reflection_on_unit_circle(q):
    r = asymptotic_barrier(BarrierAsymptotic(q)).r
    assert abs(abs(2 * r - 1) - 1) < 1e-12


def test_errors():
    with pytest.raises(InvalidInputError):
        BarrierSpec(-1.0, 1, 1, 1, 1)
    with pytest.raises(InvalidInputError):
        BarrierSpec(1.0, 1, 0, 1, 1)
    with pytest.raises(InvalidInputError):
        q_from_transmittance(0.0)
    with pytest.raises(InvalidInputError):
        BarrierAsymptotic(-0.1)
    with pytest.raises(SingularPropagatorError):
        propagator_to_scattering(Propagator2(0j, 1j))
    with pytest.raises(ResonanceError):
        compose_scattering(Scattering2(0j, 1 + 0j, 1 + 0j), Scattering2(0j, 1 + 0j, 1 + 0j))
