"""Random layered media: sampling, propagator integration and Monte Carlo.

The fluctuation ``mu(z)`` multiplies the background compressibility, so the
local wavenumber is ``k * sqrt(1 + mu)`` with ``k = omega / c0``.  The
propagator of a right section ``[start, L]`` obeys

    d/dz (alpha, gamma) = (i k mu / 2) [[1, -e^{-2ikz}], [e^{2ikz}, -1]] (alpha, gamma)

with ``(alpha, gamma) = (1, 0)`` at ``z = start``.  Both medium models are
piecewise constant, so the equation is solved exactly cell by cell.  A
fourth-order Runge-Kutta integrator of the same equation is kept as an
independent check.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Sequence, Union

import numpy as np

from .errors import IntegrationError, InvalidInputError, ResonanceError
from .scatter_core import (
    SINGULAR_TOL,
    BarrierAsymptotic,
    Propagator2,
    Scattering2,
    asymptotic_barrier,
    invert_propagator,
    propagator_to_scattering,
)

SeedLike = Union[int, Sequence[int]]


class MediumModel(enum.Enum):
    BINARY = "binary"
    OU = "ou"


@dataclass(frozen=True)
class MediumSpec:
    """Statistics of the fluctuation process on one half of the system.

    Attributes:
        half_length: right end ``L`` of the random section.
        corr_length: correlation length ``ell_c``; binary cells have
            exponentially distributed lengths with this mean.
        sigma: standard deviation of ``mu``.
        model: binary ``+-sigma`` cells or a discretized Ornstein-Uhlenbeck path.
        c0: background wave speed.
        start: left end of the section (half the barrier thickness).
    """

    half_length: float
    corr_length: float
    sigma: float
    model: MediumModel = MediumModel.BINARY
    c0: float = 1.0
    start: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "model", MediumModel(self.model))
        if not self.half_length > self.start >= 0:
            raise InvalidInputError("need 0 <= start < half_length")
        if not self.corr_length > 0:
            raise InvalidInputError(f"corr_length must be positive, got {self.corr_length}")
        if not 0 <= self.sigma < 1:
            raise InvalidInputError(f"sigma must lie in [0, 1), got {self.sigma}")
        if not self.c0 > 0:
            raise InvalidInputError(f"c0 must be positive, got {self.c0}")
        if self.corr_length / self.length > 0.1:
            warnings.warn(
                f"corr_length/length = {self.corr_length / self.length:.3g} > 0.1; "
                "white-noise formulas are not expected to apply",
                stacklevel=3,
            )

    @property
    def length(self) -> float:
        return self.half_length - self.start

    @property
    def autocov_integral(self) -> float:
        """Integral of ``E[mu(0) mu(z)]`` over the real line."""
        return 2.0 * self.sigma**2 * self.corr_length

    def cos_weighted_integral(self, k: float) -> float:
        """Integral of ``E[mu(0) mu(z)] cos(2 k z)`` over the real line."""
        lc = self.corr_length
        return 2.0 * self.sigma**2 * lc / (1.0 + (2.0 * k * lc) ** 2)

    @property
    def ou_step(self) -> float:
        return self.corr_length / 20.0


@dataclass(frozen=True)
class MediumRealization:
    """One sampled path: ``values[j]`` holds on ``[breakpoints[j], breakpoints[j+1]]``."""

    breakpoints: np.ndarray
    values: np.ndarray
    seed: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        if len(self.breakpoints) != len(self.values) + 1:
            raise InvalidInputError("need one more breakpoint than values")
        if np.any(np.diff(self.breakpoints) <= 0):
            raise InvalidInputError("breakpoints must be strictly increasing")

    @property
    def n_cells(self) -> int:
        return len(self.values)

    def mirrored(self) -> "MediumRealization":
        """The same path reflected about ``z = 0``, on ``[-L, -start]``."""
        return MediumRealization(-self.breakpoints[::-1], self.values[::-1].copy(), self.seed)


@dataclass(frozen=True)
class EnsembleEstimate:
    mean: float
    std_error: float
    n_samples: int

    @classmethod
    def from_samples(cls, x: np.ndarray) -> "EnsembleEstimate":
        x = np.asarray(x, dtype=float)
        n = x.size
        se = float(np.std(x, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        return cls(float(np.mean(x)), se, n)


def _seed_tuple(seed: SeedLike) -> tuple[int, ...]:
    if isinstance(seed, (int, np.integer)):
        return (int(seed),)
    return tuple(int(s) for s in seed)


def _rng(seed: SeedLike) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(list(_seed_tuple(seed))))


def sample_medium(spec: MediumSpec, seed: SeedLike) -> MediumRealization:
    """Draw one path of the fluctuation process on ``[spec.start, spec.half_length]``."""
    rng = _rng(seed)
    a, b = spec.start, spec.half_length
    if spec.model is MediumModel.BINARY:
        lc = spec.corr_length
        chunk = int(spec.length / lc + 4.0 * math.sqrt(spec.length / lc) + 16)
        edges = [a]
        total = a
        parts = []
        while total < b:
            steps = rng.exponential(lc, chunk)
            pos = total + np.cumsum(steps)
            parts.append(pos)
            total = pos[-1]
        pos = np.concatenate(parts)
        pos = pos[: np.searchsorted(pos, b) + 1]
        pos[-1] = b
        breakpoints = np.concatenate([edges, pos])
        breakpoints = breakpoints[np.concatenate([[True], np.diff(breakpoints) > 0])]
        signs = 2.0 * rng.integers(0, 2, breakpoints.size - 1) - 1.0
        values = spec.sigma * signs
    else:
        h = spec.ou_step
        n = int(math.ceil(spec.length / h))
        breakpoints = np.minimum(a + h * np.arange(n + 1), b)
        breakpoints[-1] = b
        rho = math.exp(-h / spec.corr_length)
        noise = rng.standard_normal(n)
        values = np.empty(n)
        values[0] = spec.sigma * noise[0]
        kick = spec.sigma * math.sqrt(1.0 - rho * rho)
        for j in range(1, n):
            values[j] = rho * values[j - 1] + kick * noise[j]
    return MediumRealization(np.asarray(breakpoints, dtype=float), np.asarray(values, dtype=float), _seed_tuple(seed))


def cell_propagator(z0, z1, mu, k: float) -> Propagator2:
    """Exact propagator across cells of constant ``mu`` (arrays broadcast).

    In the frame ``(alpha e^{ikz}, gamma e^{-ikz})`` the equation has constant
    coefficients with eigenvalues ``+-i k sqrt(1 + mu)``, which gives the
    closed form below.
    """
    z0 = np.asarray(z0, dtype=float)
    z1 = np.asarray(z1, dtype=float)
    mu = np.asarray(mu, dtype=float)
    h = z1 - z0
    kp = k * np.sqrt(1.0 + mu)
    c = np.cos(kp * h)
    sinc = np.sin(kp * h) / kp
    half = 0.5 * k * mu
    alpha = (c + 1j * (k + half) * sinc) * np.exp(-1j * k * h)
    gamma = 1j * half * sinc * np.exp(1j * k * (z0 + z1))
    return Propagator2(alpha, gamma)


def _check_values(real: MediumRealization, index: int | None = None) -> None:
    if np.any(np.abs(real.values) >= 1.0):
        raise IntegrationError("fluctuation reaches |mu| >= 1 (non-positive compressibility)", index)


def integrate_half_propagator(real: MediumRealization, omega: float, c0: float = 1.0) -> Propagator2:
    """Propagator of the right section, from ``breakpoints[0]`` to ``breakpoints[-1]``."""
    if not omega > 0:
        raise InvalidInputError(f"omega must be positive, got {omega}")
    _check_values(real)
    cells = cell_propagator(real.breakpoints[:-1], real.breakpoints[1:], real.values, omega / c0)
    alpha, gamma = 1.0 + 0.0j, 0.0j
    for ac, gc in zip(cells.alpha, cells.gamma):
        alpha, gamma = alpha * ac + gamma * np.conj(gc), alpha * gc + gamma * np.conj(ac)
    return Propagator2(complex(alpha), complex(gamma))


def _generator(z: float, mu: float, k: float) -> np.ndarray:
    e = np.exp(2j * k * z)
    return 0.5j * k * mu * np.array([[1.0, -1.0 / e], [e, -1.0]])


def integrate_half_propagator_rk4(
    real: MediumRealization, omega: float, c0: float = 1.0, max_step: float | None = None
) -> Propagator2:
    """Classical Runge-Kutta integration of the propagator equation.

    Slower and less accurate than :func:`integrate_half_propagator`; used to
    cross-check it and for paths that are not piecewise constant.
    """
    if not omega > 0:
        raise InvalidInputError(f"omega must be positive, got {omega}")
    _check_values(real)
    k = omega / c0
    if max_step is None:
        cells = np.diff(real.breakpoints)
        max_step = min(float(cells.min()) if cells.size else 1.0, 1.0 / k) / 20.0
    m = np.eye(2, dtype=complex)
    for z0, z1, mu in zip(real.breakpoints[:-1], real.breakpoints[1:], real.values):
        n = max(1, int(math.ceil((z1 - z0) / max_step)))
        h = (z1 - z0) / n
        if h < 1e-15 * max(1.0, abs(z1)):
            raise IntegrationError("step size underflow")
        z = z0
        for _ in range(n):
            k1 = _generator(z, mu, k) @ m
            k2 = _generator(z + h / 2, mu, k) @ (m + h / 2 * k1)
            k3 = _generator(z + h / 2, mu, k) @ (m + h / 2 * k2)
            k4 = _generator(z + h, mu, k) @ (m + h * k3)
            m = m + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            z += h
    return Propagator2(complex(m[0, 0]), complex(m[1, 0]))


def integrate_left_propagator(mirror_real: MediumRealization, omega: float, c0: float = 1.0) -> Propagator2:
    """Propagator of a left section evaluated at its far end.

    ``mirror_real`` lives on ``[-L, -start]``.  The propagator starts at the
    identity at ``z = -start`` and is integrated towards ``z = -L``, so the
    result maps amplitudes at ``-start`` to amplitudes at ``-L``.
    """
    _check_values(mirror_real)
    cells = cell_propagator(mirror_real.breakpoints[:-1], mirror_real.breakpoints[1:], mirror_real.values, omega / c0)
    alpha, gamma = 1.0 + 0.0j, 0.0j
    # walk from the cell touching -start outwards, applying each backward map
    for ac, gc in zip(cells.alpha[::-1], cells.gamma[::-1]):
        bc, dc = np.conj(ac), -gc
        alpha, gamma = alpha * bc + gamma * np.conj(dc), alpha * dc + gamma * np.conj(bc)
    return Propagator2(complex(alpha), complex(gamma))


def mirror_propagator(p: Propagator2) -> Propagator2:
    """Far-end propagator of the mirror image of a right section."""
    return Propagator2(np.conj(p.alpha), np.conj(p.gamma))


def left_section_scattering(p_minus: Propagator2) -> Scattering2:
    """Scattering coefficients of a left section given its far-end propagator."""
    return propagator_to_scattering(invert_propagator(p_minus))


def _barrier_scattering(barrier: BarrierAsymptotic | Scattering2) -> Scattering2:
    if isinstance(barrier, BarrierAsymptotic):
        return asymptotic_barrier(barrier)
    return barrier


def system_transmission(p_plus: Propagator2, barrier: BarrierAsymptotic | Scattering2):
    """Transmission of the mirror-symmetric system for a right-section propagator.

    Valid for any left-right symmetric barrier (``r == r_adj``).  For the
    impedance-drop limit the denominator factors as ``(1 - R)(1 - (2 R1 - 1) R)``.
    """
    b = _barrier_scattering(barrier)
    if np.any(np.abs(b.r - b.r_adj) > 1e-12):
        raise InvalidInputError("system_transmission needs a symmetric barrier (r == r_adj)")
    s = propagator_to_scattering(p_plus)
    refl = s.r
    denom = 1.0 - 2.0 * refl * b.r + (b.r**2 - b.t**2) * refl**2
    if np.any(np.abs(denom) < SINGULAR_TOL):
        raise ResonanceError("system denominator vanishes")
    return s.t**2 * b.t / denom


def independent_system_transmission(
    p_minus: Propagator2, p_plus: Propagator2, barrier: BarrierAsymptotic | Scattering2
):
    """Transmission when the left section is an arbitrary (e.g. independent) medium.

    ``p_minus`` is the far-end propagator of the left section, the same object
    :func:`mirror_propagator` returns for a symmetric system.
    """
    b = _barrier_scattering(barrier)
    left = left_section_scattering(p_minus)
    right = propagator_to_scattering(p_plus)
    d1 = 1.0 - b.r * left.r_adj
    denom = d1 * (1.0 - right.r * b.r_adj) - right.r * b.t**2 * left.r_adj
    if np.any(np.abs(denom) < SINGULAR_TOL):
        raise ResonanceError("system denominator vanishes")
    return left.t * b.t * right.t / denom


@dataclass(frozen=True)
class SectionEnsemble:
    """Right and left far-end propagators for a batch of realizations (array fields)."""

    p_plus: Propagator2
    p_minus: Propagator2
    symmetric: bool
    omega: float

    @property
    def n_samples(self) -> int:
        return int(np.size(self.p_plus.alpha))

    def transmission(self, barrier: BarrierAsymptotic | Scattering2) -> np.ndarray:
        if self.symmetric:
            return system_transmission(self.p_plus, barrier)
        return independent_system_transmission(self.p_minus, self.p_plus, barrier)

    def mean_intensity(self, barrier: BarrierAsymptotic | Scattering2) -> EnsembleEstimate:
        return EnsembleEstimate.from_samples(np.abs(self.transmission(barrier)) ** 2)

    def half_transmittance(self) -> np.ndarray:
        return 1.0 / np.abs(self.p_plus.alpha) ** 2


def _batch_propagate(reals: Sequence[MediumRealization], k: float, checkpoint: float | None = None):
    """Compose the cells of many realizations at once.

    Rows are padded with empty cells, which act as the identity.  The running
    propagator is renormalized each step, with the removed log-modulus kept
    separately, so long media do not overflow.  Returns ``(alpha, gamma,
    log_scale, log_scale_at_checkpoint)``.
    """
    n = len(reals)
    m = max(r.n_cells for r in reals)
    z0 = np.zeros((n, m))
    z1 = np.zeros((n, m))
    mu = np.zeros((n, m))
    for i, r in enumerate(reals):
        c = r.n_cells
        z0[i, :c] = r.breakpoints[:-1]
        z1[i, :c] = r.breakpoints[1:]
        mu[i, :c] = r.values
        z0[i, c:] = z1[i, c:] = r.breakpoints[-1]
    alpha = np.ones(n, dtype=complex)
    gamma = np.zeros(n, dtype=complex)
    log_scale = np.zeros(n)
    at_check = np.zeros(n)
    for j in range(m):
        cell = cell_propagator(z0[:, j], z1[:, j], mu[:, j], k)
        ac, gc = cell.alpha, cell.gamma
        alpha, gamma = alpha * ac + gamma * np.conj(gc), alpha * gc + gamma * np.conj(ac)
        if checkpoint is not None:
            norm = np.abs(alpha)
            alpha = alpha / norm
            gamma = gamma / norm
            log_scale += 2.0 * np.log(norm)
            hit = z1[:, j] == checkpoint
            at_check[hit] = log_scale[hit]
    return alpha, gamma, log_scale, at_check


def realization_seed(seed: int, index: int, side: int = 0) -> tuple[int, ...]:
    """Sub-seed of realization ``index``; ``side=1`` is an independent left section."""
    return (int(seed), int(index)) if side == 0 else (int(seed), int(index), int(side))


def sample_section_ensemble(
    spec: MediumSpec, omega: float, n_samples: int, seed: int, symmetric: bool = True
) -> SectionEnsemble:
    """Integrate ``n_samples`` right sections and build the matching left sections.

    Realization ``i`` is drawn from sub-seed ``(seed, i)`` and is therefore
    identical to ``sample_medium(spec, (seed, i))``.
    """
    if not omega > 0:
        raise InvalidInputError(f"omega must be positive, got {omega}")
    if n_samples < 1:
        raise InvalidInputError("n_samples must be positive")
    k = omega / spec.c0

    def propagate(side: int) -> Propagator2:
        if spec.sigma == 0:
            return Propagator2(np.ones(n_samples, dtype=complex), np.zeros(n_samples, dtype=complex))
        reals = [sample_medium(spec, realization_seed(seed, i, side)) for i in range(n_samples)]
        for i, r in enumerate(reals):
            _check_values(r, i)
        alpha, gamma, _, _ = _batch_propagate(reals, k)
        return Propagator2(alpha, gamma)

    p_plus = propagate(0)
    p_minus = mirror_propagator(p_plus if symmetric else propagate(1))
    return SectionEnsemble(p_plus, p_minus, symmetric, omega)


def monte_carlo_mean_intensity(
    spec: MediumSpec,
    barrier: BarrierAsymptotic | Scattering2,
    omega: float,
    n_samples: int,
    seed: int,
    symmetric: bool = True,
) -> EnsembleEstimate:
    """Ensemble mean of ``|T_system|^2`` with its standard error."""
    if n_samples < 100:
        raise InvalidInputError(f"n_samples must be at least 100, got {n_samples}")
    return sample_section_ensemble(spec, omega, n_samples, seed, symmetric).mean_intensity(barrier)


# ---------------------------------------------------------------------------
# localization-length calibration


def closed_form_localization_length(spec: MediumSpec, omega: float, weakly_heterogeneous: bool = False) -> float:
    """Localization length from the covariance of ``mu``."""
    from .analytic import LocalizationQuery, LocRegime, localization_length

    k = omega / spec.c0
    q = LocalizationQuery(
        omega,
        spec.c0,
        spec.autocov_integral,
        LocRegime.WEAKLY_HETEROGENEOUS if weakly_heterogeneous else LocRegime.WHITE_NOISE,
        spec.cos_weighted_integral(k) if weakly_heterogeneous else None,
    )
    return localization_length(q)


def lyapunov_localization_length(
    spec: MediumSpec, omega: float, n_samples: int = 400, seed: int = 0, length_factor: float = 40.0
) -> float:
    """Localization length measured as the inverse growth rate of ``log|alpha|^2``.

    Media ``length_factor`` times longer than ``spec`` are integrated and the
    slope of ``E[log|alpha|^2]`` between a quarter and the full length is
    returned as ``1/L_loc``.  The slope removes the constant offset of the
    logarithm at the origin.
    """
    long_spec = replace(spec, half_length=spec.start + length_factor * spec.length)
    quarter = long_spec.start + 0.25 * long_spec.length
    reals = []
    for i in range(n_samples):
        r = sample_medium(long_spec, realization_seed(seed, i, 7))
        j = np.searchsorted(r.breakpoints, quarter)
        if r.breakpoints[j] != quarter:
            r = MediumRealization(
                np.insert(r.breakpoints, j, quarter), np.insert(r.values, j - 1, r.values[j - 1]), r.seed
            )
        reals.append(r)
    _, _, log_end, log_quarter = _batch_propagate(reals, omega / spec.c0, checkpoint=quarter)
    rate = float(np.mean(log_end - log_quarter)) / (0.75 * long_spec.length)
    if not rate > 0:
        raise IntegrationError("non-positive growth rate; medium too weak to calibrate")
    return 1.0 / rate


class Calibration(enum.Enum):
    CLOSED_FORM = "closed_form"
    COS_WEIGHTED = "cos_weighted"
    LYAPUNOV = "lyapunov"


def frequency_for_strength(
    spec: MediumSpec,
    ell: float,
    calibration: Calibration | str = Calibration.CLOSED_FORM,
    *,
    n_calibration: int = 400,
    seed: int = 0,
    iterations: int = 4,
) -> float:
    """Frequency at which the section length equals ``ell`` localization lengths."""
    calibration = Calibration(calibration)
    if not ell > 0:
        raise InvalidInputError(f"ell must be positive, got {ell}")
    if spec.sigma == 0:
        raise InvalidInputError("a homogeneous medium has no finite localization length")
    length = spec.length
    k_white = 2.0 * math.sqrt(ell / (spec.autocov_integral * length))
    if calibration is Calibration.CLOSED_FORM:
        return k_white * spec.c0
    if calibration is Calibration.COS_WEIGHTED:
        lc = spec.corr_length
        a = spec.sigma**2 * lc * length / 2.0
        gap = a - 4.0 * lc**2 * ell
        if gap <= 0:
            raise InvalidInputError("strength unreachable with the cosine-weighted localization length")
        return math.sqrt(ell / gap) * spec.c0
    k = k_white
    for _ in range(iterations):
        l_loc = lyapunov_localization_length(spec, k * spec.c0, n_calibration, seed)
        k *= math.sqrt(ell * l_loc / length)
    return k * spec.c0
