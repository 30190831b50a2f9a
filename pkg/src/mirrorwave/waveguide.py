"""Multimode waveguide with a thin barrier between two random sections.

Each random section enters through its ``N x N`` transmission and reflection
matrices.  The barrier is diagonal in the mode basis, since it does not
couple modes.  The module provides:

* the closed-form system transmission matrix :func:`system_transmission_matrix`,
  which is exact for reciprocal sections;
* an independent route through the ``2N x 2N`` block propagators
  (:func:`exact_transmission_oracle`);
* the weak-scattering mean transmissivity and its enhancement factors;
* a synthetic ensemble of weakly reflecting sections.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import unitary_group

from .errors import ExcludedConfigurationError, InvalidInputError, ResonanceError, SingularPropagatorError

STANDING_MODE_TOL = 1e-9
CONSERVATION_TOL = 1e-12
MAX_ENSEMBLE_EPS = 0.3
_COND_LIMIT = 1e12


@dataclass(frozen=True)
class WaveguideGeometry:
    """Two-dimensional guide of width ``width`` with a slab barrier of thickness ``d``."""

    width: float
    c0: float
    c1: float
    d: float
    omega: float

    def __post_init__(self) -> None:
        for name in ("width", "c0", "c1", "omega"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise InvalidInputError(f"{name} must be positive and finite, got {value}")
        if not self.d >= 0:
            raise InvalidInputError(f"barrier thickness must be nonnegative, got {self.d}")
        if not self.c1 < self.c0:
            raise InvalidInputError("the barrier speed c1 must be smaller than the background speed c0")

    @property
    def wavenumber(self) -> float:
        return self.omega / self.c0


@dataclass(frozen=True)
class ModeBasis:
    """Propagating modes: eigenvalues ``(j pi / width)^2`` and axial wavenumbers."""

    n_modes: int
    betas: np.ndarray
    betas_barrier: np.ndarray
    lambdas: np.ndarray


def build_mode_basis(g: WaveguideGeometry) -> ModeBasis:
    """Count propagating modes and compute their wavenumbers in and out of the barrier."""
    k = g.wavenumber
    n = int(math.floor(k * g.width / math.pi))
    if n < 1:
        raise InvalidInputError("no propagating mode: k * width must exceed pi")
    j = np.arange(1, n + 1)
    lambdas = (j * math.pi / g.width) ** 2
    if abs(k * k - lambdas[-1]) < STANDING_MODE_TOL * k * k:
        raise ExcludedConfigurationError("standing mode: k^2 equals the last eigenvalue")
    betas = np.sqrt(k * k - lambdas)
    betas_barrier = np.sqrt((g.omega / g.c1) ** 2 - lambdas)
    return ModeBasis(n, betas, betas_barrier, lambdas)


@dataclass(frozen=True)
class ModalScattering:
    """Transmission and reflection matrices of a section, for waves incident from the left."""

    T: np.ndarray
    R: np.ndarray

    def __post_init__(self) -> None:
        t = np.atleast_2d(np.asarray(self.T, dtype=complex))
        r = np.atleast_2d(np.asarray(self.R, dtype=complex))
        if t.shape != r.shape or t.shape[0] != t.shape[1]:
            raise InvalidInputError(f"T and R must be square of equal shape, got {t.shape} and {r.shape}")
        object.__setattr__(self, "T", t)
        object.__setattr__(self, "R", r)

    @property
    def n_modes(self) -> int:
        return self.T.shape[0]

    def conservation_defect(self) -> float:
        """Largest entry of ``R* R + T* T - I``."""
        gram = self.R.conj().T @ self.R + self.T.conj().T @ self.T
        return float(np.max(np.abs(gram - np.eye(self.n_modes))))

    def reciprocity_defect(self) -> float:
        return float(np.max(np.abs(self.R - self.R.T)))

    def propagator_blocks(self) -> tuple[np.ndarray, np.ndarray]:
        """Blocks ``(P_a, P_b)`` of the far-end propagator ``[[P_a, conj P_b], [P_b, conj P_a]]``."""
        eye = np.eye(self.n_modes)
        r, t = self.R, self.T
        p_a = t @ _solve_right(eye - r.conj() @ r)
        p_b = -t.conj() @ _solve_right(eye - r @ r.conj()) @ r
        return p_a, p_b

    def propagator(self) -> np.ndarray:
        p_a, p_b = self.propagator_blocks()
        return np.block([[p_a, p_b.conj()], [p_b, p_a.conj()]])


def _check_conditioning(m: np.ndarray, what: str, error=SingularPropagatorError) -> None:
    if np.linalg.cond(m) > _COND_LIMIT:
        raise error(f"{what} is singular to working precision")


def _solve_right(m: np.ndarray) -> np.ndarray:
    _check_conditioning(m, "I - conj(R) R")
    return np.linalg.inv(m)


@dataclass(frozen=True)
class BarrierModal:
    """Thin barrier reduced to one strength ``q_j`` per mode."""

    q: np.ndarray

    def __post_init__(self) -> None:
        q = np.atleast_1d(np.asarray(self.q, dtype=float))
        if q.ndim != 1 or q.size == 0 or not np.all(np.isfinite(q)) or np.any(q < 0):
            raise InvalidInputError("q must be a nonempty vector of finite nonnegative values")
        object.__setattr__(self, "q", q)

    @classmethod
    def from_geometry(cls, g: WaveguideGeometry, basis: ModeBasis) -> "BarrierModal":
        return cls(basis.betas_barrier**2 * g.d / (2.0 * basis.betas))

    @property
    def transmittances(self) -> np.ndarray:
        return 1.0 / (1.0 + self.q**2)


def barrier_propagator_diagonals(g: WaveguideGeometry, basis: ModeBasis) -> tuple[np.ndarray, np.ndarray]:
    """Diagonals ``(alpha_j, gamma_j)`` of the exact barrier propagator blocks."""
    b, b1 = basis.betas, basis.betas_barrier
    s = np.sin(b1 * g.d)
    alpha = np.cos(b1 * g.d) + 0.5j * (b1 / b + b / b1) * s
    gamma = 0.5j * (b / b1 - b1 / b) * s
    return alpha, gamma


def barrier_matrices_exact(g: WaveguideGeometry, basis: ModeBasis) -> ModalScattering:
    alpha, gamma = barrier_propagator_diagonals(g, basis)
    ca = np.conj(alpha)
    return ModalScattering(np.diag(1.0 / ca), np.diag(-gamma / ca))


def barrier_matrices_asymptotic(b: BarrierModal) -> ModalScattering:
    """Thin-barrier limit ``T1 = 1/(1 - i q)``, ``R1 = i q/(1 - i q)``."""
    denom = 1.0 - 1j * b.q
    return ModalScattering(np.diag(1.0 / denom), np.diag(1j * b.q / denom))


def _barrier_propagator_matrix(barrier: ModalScattering) -> np.ndarray:
    t1, r1 = barrier.T, barrier.R
    _check_conditioning(t1, "barrier transmission")
    t1_inv = np.linalg.inv(t1)
    p_a = t1_inv.conj()
    p_b = -t1_inv @ r1
    return np.block([[p_a, p_b.conj()], [p_b, p_a.conj()]])


def system_transmission_matrix(s_plus: ModalScattering, barrier: ModalScattering) -> np.ndarray:
    """Transmission matrix of the mirror-symmetric system.

    ``T+ [T1^-1 - R+ T1^-1 R1 - T1^-1 R1 R+ - R+ conj(T1^-1) R+]^-1 T+^T``.
    """
    if s_plus.n_modes != barrier.n_modes:
        raise InvalidInputError("section and barrier mode counts differ")
    _check_conditioning(barrier.T, "barrier transmission")
    t1_inv = np.linalg.inv(barrier.T)
    r, r1 = s_plus.R, barrier.R
    bracket = t1_inv - r @ t1_inv @ r1 - t1_inv @ r1 @ r - r @ t1_inv.conj() @ r
    _check_conditioning(bracket, "system bracket", ResonanceError)
    return s_plus.T @ np.linalg.solve(bracket, s_plus.T.T)


def _transmission_from_system_propagator(p: np.ndarray, n: int) -> np.ndarray:
    block = p[:n, :n].conj()
    _check_conditioning(block, "system propagator block")
    return np.linalg.inv(block)


def exact_transmission_oracle(s_plus: ModalScattering, barrier: ModalScattering) -> np.ndarray:
    """Transmission matrix from the product ``P+ P1 conj(P+)^-1`` of block propagators."""
    n = s_plus.n_modes
    if barrier.n_modes != n:
        raise InvalidInputError("section and barrier mode counts differ")
    p_plus = s_plus.propagator()
    left = p_plus.conj()
    _check_conditioning(left, "mirrored section propagator")
    system = p_plus @ _barrier_propagator_matrix(barrier) @ np.linalg.inv(left)
    return _transmission_from_system_propagator(system, n)


def independent_transmission_oracle(
    s_plus: ModalScattering, s_other: ModalScattering, barrier: ModalScattering
) -> np.ndarray:
    """Transmission matrix when the left section is the mirror image of ``s_other``.

    With ``s_other`` an independent copy of ``s_plus`` this models two
    statistically independent random sections.
    """
    n = s_plus.n_modes
    if barrier.n_modes != n or s_other.n_modes != n:
        raise InvalidInputError("section and barrier mode counts differ")
    left = s_other.propagator().conj()
    _check_conditioning(left, "left section propagator")
    system = s_plus.propagator() @ _barrier_propagator_matrix(barrier) @ np.linalg.inv(left)
    return _transmission_from_system_propagator(system, n)


def transmissivity(transmission: np.ndarray) -> float:
    """Total transmitted power ``Tr(T* T)``."""
    return float(np.sum(np.abs(transmission) ** 2))


def enhancement_factors(b: BarrierModal) -> np.ndarray:
    """``B_lm = -2 (1 - q_l q_m) / ((1 + q_l^2)(1 + q_m^2))``.

    Cross-checked against the form in the transmission coefficients
    ``|T_l + T_m - 2 T_l T_m|^2 - |T_l|^2 - |T_m|^2``.
    """
    q = b.q
    closed = -2.0 * (1.0 - np.outer(q, q)) / np.outer(1.0 + q**2, 1.0 + q**2)
    t = 1.0 / (1.0 - 1j * q)
    tl, tm = t[:, None], t[None, :]
    direct = np.abs(tl + tm - 2.0 * tl * tm) ** 2 - np.abs(tl) ** 2 - np.abs(tm) ** 2
    if np.max(np.abs(closed - direct)) > 1e-12:
        raise ArithmeticError("enhancement factor forms disagree")
    return closed


def _barrier_transmittances(barrier: ModalScattering | BarrierModal) -> np.ndarray:
    if isinstance(barrier, BarrierModal):
        return barrier.transmittances
    return np.abs(np.diag(barrier.T)) ** 2


def _barrier_strengths(barrier: ModalScattering | BarrierModal) -> BarrierModal:
    if isinstance(barrier, BarrierModal):
        return barrier
    t = np.diag(barrier.T)
    # invert T1 = 1/(1 - i q); only valid for asymptotic barriers
    q = ((1.0 / t - 1.0) * 1j).real
    if np.max(np.abs(1.0 / (1.0 - 1j * q) - t)) > 1e-10 or np.any(q < -1e-12):
        raise InvalidInputError("barrier is not of the thin-barrier form T1 = 1/(1 - i q)")
    return BarrierModal(np.maximum(q, 0.0))


def _check_moments(m: np.ndarray, n: int) -> np.ndarray:
    m = np.atleast_2d(np.asarray(m, dtype=float))
    if m.shape != (n, n):
        raise InvalidInputError(f"moment matrix must be {n}x{n}, got {m.shape}")
    if np.any(m < 0):
        raise InvalidInputError("moment matrix entries must be nonnegative")
    return m


def barrier_transmissivity(barrier: ModalScattering | BarrierModal) -> float:
    return float(np.sum(_barrier_transmittances(barrier)))


def mean_transmissivity(moments: np.ndarray, barrier: ModalScattering | BarrierModal) -> float:
    """Weak-scattering mean transmissivity of the symmetric system.

    ``moments[l, m]`` is ``E|R+_lm|^2``.
    """
    b = _barrier_strengths(barrier)
    m = _check_moments(moments, b.q.size)
    return barrier_transmissivity(b) + float(np.sum(m * enhancement_factors(b)))


def independent_mean_transmissivity(moments: np.ndarray, barrier: ModalScattering | BarrierModal) -> float:
    """Weak-scattering mean transmissivity with independent left and right sections."""
    t2 = _barrier_transmittances(barrier)
    m = _check_moments(moments, t2.size)
    return float(np.sum(t2)) - 2.0 * float(t2 @ m @ t2)


def sample_reflection_ensemble(
    n_modes: int, eps: float, seed, reciprocal: bool = True
) -> ModalScattering:
    """Synthetic weakly reflecting section.

    The entries of ``R`` are circularly symmetric complex normals with
    ``E|R_lm|^2 = eps^2``; with ``reciprocal`` the lower triangle mirrors the
    upper one so ``R^T = R``.  ``T = U sqrtm(I - R* R)`` with ``U`` a Haar
    unitary, so energy is conserved exactly.  Deterministic in
    ``(n_modes, eps, seed)``.
    """
    if n_modes < 1:
        raise InvalidInputError("n_modes must be positive")
    if not 0 <= eps < MAX_ENSEMBLE_EPS:
        raise InvalidInputError(f"eps must lie in [0, {MAX_ENSEMBLE_EPS}), got {eps}")
    seq = np.random.SeedSequence(list(seed) if isinstance(seed, tuple) else int(seed))
    rng = np.random.default_rng(seq)
    a = (rng.standard_normal((n_modes, n_modes)) + 1j * rng.standard_normal((n_modes, n_modes))) * (
        eps / math.sqrt(2.0)
    )
    r = np.triu(a) + np.triu(a, 1).T if reciprocal else a
    u = unitary_group.rvs(n_modes, random_state=rng) if n_modes > 1 else np.array([[np.exp(2j * math.pi * rng.random())]])
    # Hermitian square root of I - R* R through its eigendecomposition
    w, v = np.linalg.eigh(np.eye(n_modes) - r.conj().T @ r)
    if w.min() <= 0:
        raise SingularPropagatorError(f"draw {seed} has ||R|| >= 1; reduce eps")
    return ModalScattering(u @ (v * np.sqrt(w)) @ v.conj().T, r)


@dataclass(frozen=True)
class WaveguideEnsembleSummary:
    """Monte Carlo transmissivities with the empirical reflection moments."""

    symmetric_mean: float
    symmetric_std_error: float
    independent_mean: float
    independent_std_error: float
    moments: np.ndarray
    n_samples: int


def waveguide_monte_carlo(
    barrier: ModalScattering, eps: float, n_samples: int, seed: int, reciprocal: bool = True
) -> WaveguideEnsembleSummary:
    """Average ``Tr(T* T)`` over synthetic sections for symmetric and independent systems.

    Draw ``i`` uses sub-seed ``(seed, i)``; the independent left section of
    draw ``i`` uses ``(seed, i, 1)``.
    """
    if n_samples < 2:
        raise InvalidInputError("n_samples must be at least 2")
    n = barrier.n_modes
    sym = np.empty(n_samples)
    ind = np.empty(n_samples)
    moments = np.zeros((n, n))
    for i in range(n_samples):
        s = sample_reflection_ensemble(n, eps, (seed, i), reciprocal)
        other = sample_reflection_ensemble(n, eps, (seed, i, 1), reciprocal)
        sym[i] = transmissivity(system_transmission_matrix(s, barrier))
        ind[i] = transmissivity(independent_transmission_oracle(s, other, barrier))
        moments += np.abs(s.R) ** 2
    root_n = math.sqrt(n_samples)
    return WaveguideEnsembleSummary(
        float(sym.mean()),
        float(sym.std(ddof=1) / root_n),
        float(ind.mean()),
        float(ind.std(ddof=1) / root_n),
        moments / n_samples,
        n_samples,
    )
