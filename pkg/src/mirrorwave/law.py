"""Probability law of the transmittance ``t = |T|^2`` of a random half-section.

In the white-noise regime ``x = (2 - t)/t`` follows a diffusion whose
generator is ``d/dx (x^2 - 1) d/dx`` in the strength ``ell = L/L_loc``.  With
``x = cosh(r)`` this is Brownian motion on the hyperbolic plane, so ``r`` has
the radial heat-kernel density

    p(r) = 2 pi sinh(r) K_ell(r),
    K_ell(r) = sqrt(2) e^{-ell/4} / (4 pi ell)^{3/2}
               * int_r^inf rho e^{-rho^2/(4 ell)} / sqrt(cosh rho - cosh r) d rho,

and ``t = 1/cosh^2(r/2)``.  Tabulating ``p`` once on a quadrature grid turns
every expectation ``E[g(t)]`` into a weighted sum.  This is what makes sums
over thousands of moments affordable.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import InvalidInputError, QuadratureError

_GL_OUTER = np.polynomial.legendre.leggauss(16)
_GL_INNER = np.polynomial.legendre.leggauss(24)


def _panels(a: float, b: float, n_panels: int, rule) -> tuple[np.ndarray, np.ndarray]:
    x, w = rule
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _log_sinh(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x + np.log1p(-np.exp(-2.0 * x)) - math.log(2.0)


def _x_over_sinh(x: np.ndarray) -> np.ndarray:
    out = np.ones_like(x)
    big = x > 1e-4
    out[big] = x[big] / np.sinh(x[big])
    small = ~big
    out[small] = 1.0 - x[small] ** 2 / 6.0
    return out


def radial_density(r: np.ndarray, ell: float) -> np.ndarray:
    """Density of the hyperbolic radius ``r`` after time ``ell`` (``r > 0``)."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if not ell > 0:
        raise InvalidInputError("radial_density needs ell > 0")
    out = np.empty_like(r)
    for start in range(0, r.size, 512):
        out[start : start + 512] = _radial_density_block(r[start : start + 512], ell)
    return out


def _radial_density_block(r: np.ndarray, ell: float) -> np.ndarray:
    # substitute rho = r + v^2 to remove the inverse square-root singularity
    rho_max = np.sqrt(r * r + 200.0 * ell)
    v_max = np.sqrt(rho_max - r)
    v_split = np.minimum(np.sqrt(2.0 * r), 0.5 * v_max)
    x, w = _GL_INNER
    nodes = []
    weights = []
    for lo, hi in [(0.0 * r, v_split)] + [
        (v_split + (v_max - v_split) * j / 3.0, v_split + (v_max - v_split) * (j + 1) / 3.0) for j in range(3)
    ]:
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        nodes.append(mid[:, None] + half[:, None] * x[None, :])
        weights.append(half[:, None] * w[None, :])
    v = np.concatenate(nodes, axis=1)
    wv = np.concatenate(weights, axis=1)
    rr = r[:, None]
    rho = rr + v * v
    half_v2 = 0.5 * v * v
    # cosh(r + v^2) - cosh(r) = 2 sinh(r + v^2/2) sinh(v^2/2), and with
    # x = v^2/2 the Jacobian part 2v / sqrt(2 sinh x) equals 2 sqrt(x / sinh x)
    a = 2.0 * np.sqrt(_x_over_sinh(half_v2))
    log_f = np.log(rho) - rho * rho / (4.0 * ell) - 0.5 * _log_sinh(rr + half_v2)
    log_pref = (
        math.log(2.0 * math.pi) + 0.5 * math.log(2.0) - ell / 4.0 - 1.5 * math.log(4.0 * math.pi * ell)
    ) + _log_sinh(r)
    integrand = np.exp(log_f + log_pref[:, None]) * a
    return np.sum(integrand * wv, axis=1)


class TransmittanceLaw:
    """Quadrature representation of the law of ``t`` at strength ``ell``.

    ``nodes`` are transmittance values and ``weights`` their probabilities;
    ``expect(g)`` approximates ``E[g(t)]``.  At ``ell = 0`` the law is a point
    mass at ``t = 1``.
    """

    NORMALIZATION_TOL = 1e-10

    def __init__(self, ell: float):
        if not (ell >= 0 and math.isfinite(ell)):
            raise InvalidInputError(f"ell must be finite and >= 0, got {ell}")
        self.ell = float(ell)
        if ell == 0:
            self.r = np.zeros(1)
            self.nodes = np.ones(1)
            self.weights = np.ones(1)
            return
        scale = math.sqrt(ell)
        r_max = 2.0 * ell + 16.0 * scale
        width = min(0.5, 0.5 * scale)
        n_panels = max(8, int(math.ceil(r_max / width)))
        r, w = _panels(0.0, r_max, n_panels, _GL_OUTER)
        dens = radial_density(r, ell)
        self.r = r
        self.nodes = 1.0 / np.cosh(0.5 * r) ** 2
        self.weights = w * dens
        total = float(self.weights.sum())
        if abs(total - 1.0) > self.NORMALIZATION_TOL:
            raise QuadratureError(f"transmittance law at ell={ell} integrates to {total!r}")

    @property
    def one_minus_t(self) -> np.ndarray:
        # tanh^2(r/2) without the cancellation of 1 - t near t = 1
        return np.tanh(0.5 * self.r) ** 2 if self.ell > 0 else np.zeros(1)

    def expect(self, g) -> float:
        return float(np.dot(self.weights, g(self.nodes)))

    def moments_block(self, power: int, k0: int, count: int) -> np.ndarray:
        """``E[t^power (1 - t)^k]`` for ``k = k0, ..., k0 + count - 1``."""
        t = self.nodes
        u = self.one_minus_t
        if self.ell == 0:
            out = np.zeros(count)
            if k0 == 0:
                out[0] = 1.0
            return out
        with np.errstate(divide="ignore"):
            log_u = np.log(u)
        base = self.weights * t**power * np.exp(k0 * log_u)
        powers = np.exp(np.outer(log_u, np.arange(count)))
        return base @ powers


@lru_cache(maxsize=256)
def transmittance_law(ell: float) -> TransmittanceLaw:
    """Cached :class:`TransmittanceLaw`; the grid depends on ``ell`` only."""
    return TransmittanceLaw(ell)
