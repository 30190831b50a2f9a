"""Two-by-two propagator and scattering algebra for layered media.

A propagator maps the right- and left-going amplitudes at one end of a
section to those at the other end.  Its matrix always has the structure
``[[alpha, conj(gamma)], [gamma, conj(alpha)]]`` with
``|alpha|**2 - |gamma|**2 == 1``, so only the pair ``(alpha, gamma)`` is
stored.

All functions accept either Python complex scalars or numpy arrays of equal
shape in the fields, in which case they act elementwise.  The Monte Carlo
engine relies on this to process whole ensembles at once.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import InvalidInputError, ResonanceError, SingularPropagatorError

ComplexLike = Union[complex, np.ndarray]

UNIMODULAR_TOL = 1e-10
SINGULAR_TOL = 1e-14


@dataclass(frozen=True)
class Propagator2:
    """Propagator of a one-dimensional section, stored as ``(alpha, gamma)``."""

    alpha: ComplexLike
    gamma: ComplexLike

    @classmethod
    def identity(cls) -> "Propagator2":
        return cls(1.0 + 0.0j, 0.0j)

    def matrix(self) -> np.ndarray:
        """Full 2x2 matrix (scalar fields only)."""
        a, g = complex(self.alpha), complex(self.gamma)
        return np.array([[a, g.conjugate()], [g, a.conjugate()]])

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "Propagator2":
        return cls(complex(m[0, 0]), complex(m[1, 0]))

    def determinant(self) -> ComplexLike:
        """``|alpha|^2 - |gamma|^2``, equal to one for a physical propagator."""
        return np.abs(self.alpha) ** 2 - np.abs(self.gamma) ** 2

    def unimodularity_defect(self) -> float:
        return float(np.max(np.abs(self.determinant() - 1.0)))

    def is_unimodular(self, tol: float = UNIMODULAR_TOL) -> bool:
        return self.unimodularity_defect() <= tol


@dataclass(frozen=True)
class Scattering2:
    """Transmission and reflection coefficients of a section.

    ``r`` is the reflection seen by a wave incident from the left and
    ``r_adj`` the one seen from the right.  Transmission is the same from both
    sides.
    """

    t: ComplexLike
    r: ComplexLike
    r_adj: ComplexLike

    @classmethod
    def transparent(cls) -> "Scattering2":
        return cls(1.0 + 0.0j, 0.0j, 0.0j)

    def conservation_defect(self) -> float:
        t2 = np.abs(self.t) ** 2
        d1 = np.abs(t2 + np.abs(self.r) ** 2 - 1.0)
        d2 = np.abs(t2 + np.abs(self.r_adj) ** 2 - 1.0)
        return float(max(np.max(d1), np.max(d2)))


@dataclass(frozen=True)
class BarrierSpec:
    """Homogeneous slab of thickness ``d`` embedded in a background medium.

    ``c0``/``zeta0`` are the background speed and impedance, ``c1``/``zeta1``
    those of the slab.  ``d = 0`` is allowed and gives the identity.
    """

    d: float
    c0: float
    c1: float
    zeta0: float
    zeta1: float

    def __post_init__(self) -> None:
        if self.d < 0:
            raise InvalidInputError(f"barrier thickness must be nonnegative, got {self.d}")
        for name in ("c0", "c1", "zeta0", "zeta1"):
            value = getattr(self, name)
            if not value > 0:
                raise InvalidInputError(f"{name} must be positive, got {value}")


class Regime(enum.Enum):
    """Thin-barrier limits.

    ``IMPEDANCE_DROP``: the slab impedance is much smaller than the background
    one, giving ``R1 = q/(i+q)``.  ``IMPEDANCE_JUMP``: the slab impedance is
    much larger, giving ``R1 = -q/(i+q)``.
    """

    IMPEDANCE_DROP = "impedance_drop"
    IMPEDANCE_JUMP = "impedance_jump"


@dataclass(frozen=True)
class BarrierAsymptotic:
    """Thin barrier reduced to a point scatterer of strength ``q``."""

    q: float
    regime: Regime = Regime.IMPEDANCE_DROP

    def __post_init__(self) -> None:
        if not (self.q >= 0 and np.isfinite(self.q)):
            raise InvalidInputError(f"barrier strength q must be finite and >= 0, got {self.q}")
        object.__setattr__(self, "regime", Regime(self.regime))

    @classmethod
    def from_transmittance(cls, t1_sq: float, regime: Regime = Regime.IMPEDANCE_DROP) -> "BarrierAsymptotic":
        """Barrier whose intensity transmission ``|T1|^2`` is ``t1_sq``."""
        return cls(q_from_transmittance(t1_sq), regime)

    @property
    def transmittance(self) -> float:
        return 1.0 / (1.0 + self.q**2)


def q_from_transmittance(t1_sq: float) -> float:
    """Invert ``|T1|^2 = 1/(1 + q^2)``."""
    if not 0 < t1_sq <= 1:
        raise InvalidInputError(f"|T1|^2 must lie in (0, 1], got {t1_sq}")
    return float(np.sqrt(1.0 / t1_sq - 1.0))


def barrier_propagator(spec: BarrierSpec, omega: float) -> Propagator2:
    """Exact propagator of a homogeneous slab at angular frequency ``omega``.

    The phase factor ``exp(-i omega d / c0)`` refers the slab to the
    background medium, so a matched slab (``zeta1 == zeta0``, ``c1 == c0``)
    gives the identity.
    """
    if not omega > 0:
        raise InvalidInputError(f"omega must be positive, got {omega}")
    phase = omega * spec.d / spec.c1
    ratio = spec.zeta1 / spec.zeta0
    s = np.sin(phase)
    alpha = (np.cos(phase) + 0.5j * (ratio + 1.0 / ratio) * s) * np.exp(-1j * omega * spec.d / spec.c0)
    gamma = 0.5j * (1.0 / ratio - ratio) * s
    return Propagator2(complex(alpha), complex(gamma))


def asymptotic_barrier(ab: BarrierAsymptotic) -> Scattering2:
    """Transmission and reflection of a thin barrier in either limit."""
    q = ab.q
    if q < 0:
        raise InvalidInputError(f"q must be nonnegative, got {q}")
    t = 1j / (1j + q)
    r = q / (1j + q)
    if ab.regime is Regime.IMPEDANCE_JUMP:
        r = -r
    return Scattering2(t, r, r)


def propagator_to_scattering(p: Propagator2) -> Scattering2:
    """Scattering coefficients of a section from its propagator."""
    ca = np.conj(p.alpha)
    if np.any(np.abs(ca) < SINGULAR_TOL):
        raise SingularPropagatorError("alpha vanishes; the propagator has no scattering form")
    return Scattering2(1.0 / ca, -p.gamma / ca, np.conj(p.gamma) / ca)


def scattering_to_propagator(s: Scattering2) -> Propagator2:
    """Inverse of :func:`propagator_to_scattering` (uses ``t`` and ``r`` only)."""
    if np.any(np.abs(s.t) < SINGULAR_TOL):
        raise SingularPropagatorError("zero transmission has no propagator")
    return Propagator2(1.0 / np.conj(s.t), -s.r / s.t)


def compose_propagators(left: Propagator2, right: Propagator2) -> Propagator2:
    """Propagator of ``left`` followed by ``right`` (the matrix product right @ left)."""
    al, gl, ar, gr = left.alpha, left.gamma, right.alpha, right.gamma
    return Propagator2(al * ar + gl * np.conj(gr), al * gr + gl * np.conj(ar))


def compose_chain(*sections: Propagator2) -> Propagator2:
    """Compose several sections ordered from left to right."""
    out = Propagator2.identity()
    for p in sections:
        out = compose_propagators(out, p)
    return out


def invert_propagator(p: Propagator2) -> Propagator2:
    """Inverse of a unimodular propagator."""
    return Propagator2(np.conj(p.alpha), -p.gamma)


def compose_scattering(left: Scattering2, right: Scattering2) -> Scattering2:
    """Scattering coefficients of two adjacent sections, summing all multiple reflections."""
    denom = 1.0 - right.r * left.r_adj
    if np.any(np.abs(denom) < SINGULAR_TOL):
        raise ResonanceError("1 - r_right * r_adj_left vanishes")
    t = left.t * right.t / denom
    r = left.r + left.t**2 * right.r / denom
    r_adj = right.r_adj + right.t**2 * left.r_adj / denom
    return Scattering2(t, r, r_adj)
