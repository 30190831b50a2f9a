"""Analytic statistics of layered random media with a reflecting barrier.

Quantities are parameterized by the strength ``ell = L / L_loc`` of one random
half-section.  Moments of the half-section transmittance ``t = |T|^2`` are
spectral integrals

    E[t^n] = e^{-ell/4} int_0^inf e^{-ell s^2} w(s) phi_n(s) ds,
    w(s) = 2 pi s sinh(pi s) / cosh^2(pi s),

and the mean intensity through the symmetric and independent systems are
series in the mixed moments ``E[t^2 (1-t)^k]`` and ``E[t (1-t)^k]``.  The
series are summed over the tabulated law of ``t`` (see :mod:`mirrorwave.law`);
their closed-form resummations are provided as a second route.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy import integrate
from scipy.signal import lfilter

from .errors import InvalidInputError, PrecisionError, QuadratureError, SeriesError
from .law import transmittance_law

UNIT_CIRCLE_TOL = 1e-9
EXTENDED_PRECISION_ORDER = 25


class LocRegime(enum.Enum):
    WHITE_NOISE = "white_noise"
    WEAKLY_HETEROGENEOUS = "weakly_heterogeneous"


@dataclass(frozen=True)
class LocalizationQuery:
    """Inputs of the localization length.

    ``autocov_integral`` is the integral of ``E[mu(0) mu(z)]`` over the line;
    ``cos_weighted_integral`` the same integral weighted by
    ``cos(2 omega z / c0)``, needed only in the weakly heterogeneous regime.
    """

    omega: float
    c0: float
    autocov_integral: float
    regime: LocRegime = LocRegime.WHITE_NOISE
    cos_weighted_integral: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "regime", LocRegime(self.regime))
        if not self.omega > 0 or not self.c0 > 0:
            raise InvalidInputError("omega and c0 must be positive")
        if not self.autocov_integral >= 0:
            raise InvalidInputError("autocov_integral must be nonnegative")
        weak = self.regime is LocRegime.WEAKLY_HETEROGENEOUS
        if weak and self.cos_weighted_integral is None:
            raise InvalidInputError("the weakly heterogeneous regime needs cos_weighted_integral")
        if not weak and self.cos_weighted_integral is not None:
            raise InvalidInputError("cos_weighted_integral only applies to the weakly heterogeneous regime")


def localization_length(q: LocalizationQuery) -> float:
    """``L_loc`` with ``1/L_loc = omega^2 / (4 c0^2) * integral``; infinite for a homogeneous medium."""
    integral = q.cos_weighted_integral if q.regime is LocRegime.WEAKLY_HETEROGENEOUS else q.autocov_integral
    rate = q.omega**2 / (4.0 * q.c0**2) * integral
    if rate <= 0:
        return math.inf
    return 1.0 / rate


@dataclass(frozen=True)
class MomentQuery:
    n: int
    ell: float

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 1:
            raise InvalidInputError(f"moment order must be a positive integer, got {self.n}")
        if not (self.ell >= 0 and math.isfinite(self.ell)):
            raise InvalidInputError(f"ell must be finite and >= 0, got {self.ell}")

    def value(self) -> float:
        return transmission_moment(self.n, self.ell)


@dataclass(frozen=True)
class SeriesControl:
    """Stopping rule for the intensity series.

    ``max_terms`` bounds the single series; ``max_order`` bounds each index of
    the double series of the independent system, whose cost grows with its
    square.
    """

    rel_tol: float = 1e-9
    max_terms: int = 10**12
    max_order: int = 2048

    def __post_init__(self) -> None:
        if not 0 < self.rel_tol < 1:
            raise InvalidInputError(f"rel_tol must lie in (0, 1), got {self.rel_tol}")
        if self.max_terms < 1 or self.max_order < 1:
            raise InvalidInputError("max_terms and max_order must be positive")


# ---------------------------------------------------------------------------
# spectral integrals


def phi_n(n: int, s):
    """Polynomial weight of the ``n``-th moment: ``prod_{j<n} (s^2 + (j - 1/2)^2) / j^2``."""
    if int(n) != n or n < 1:
        raise InvalidInputError(f"n must be a positive integer, got {n}")
    s2 = np.asarray(s, dtype=float) ** 2
    out = np.ones_like(s2)
    for j in range(1, int(n)):
        out = out * (s2 + (j - 0.5) ** 2) / (j * j)
    return out if out.ndim else float(out)


def _log_phi_n(n: int, s: np.ndarray) -> np.ndarray:
    s2 = s * s
    out = np.zeros_like(s2)
    for j in range(1, n):
        out += np.log(s2 + (j - 0.5) ** 2) - 2.0 * math.log(j)
    return out


def _log_weight(s: np.ndarray) -> np.ndarray:
    """``log(2 pi s tanh(pi s) / cosh(pi s))``, finite for large ``s``."""
    x = math.pi * s
    log_cosh = x + np.log1p(np.exp(-2.0 * x)) - math.log(2.0)
    return np.log(2.0 * math.pi * s * np.tanh(x)) - log_cosh


def _integration_range(log_f, ell: float) -> tuple[float, float]:
    """Peak location and a cutoff beyond which the integrand is negligible."""
    s = np.linspace(1e-6, 10.0, 2001)
    while True:
        vals = log_f(s)
        peak = float(np.max(vals))
        if vals[-1] < peak - 80.0:
            break
        s = np.linspace(1e-6, 2.0 * s[-1], 2001)
    cut = s[np.nonzero(vals > peak - 80.0)[0][-1] + 1]
    return float(s[np.argmax(vals)]), float(cut)


def transmission_moment(n: int, ell: float) -> float:
    """``E[|T|^{2n}]`` of a half-section of strength ``ell`` by adaptive quadrature.

    The integration runs to where the integrand has dropped by ``e^{-80}``
    from its peak, with a breakpoint at the peak, using QUADPACK's
    Gauss-Kronrod rules.
    """
    MomentQuery(n, ell)
    n = int(n)

    def log_f(s):
        return -ell * s * s + _log_weight(s) + _log_phi_n(n, s)

    peak, cut = _integration_range(log_f, ell)
    scale = float(np.max(log_f(np.array([peak]))))

    def f(s):
        if s <= 0:
            return 0.0
        return math.exp(float(log_f(np.array([s]))[0]) - scale)

    points = [p for p in (0.5 * peak, peak, 2.0 * peak) if 0 < p < cut]
    value, err = integrate.quad(f, 0.0, cut, points=points or None, epsabs=0.0, epsrel=1e-13, limit=400)
    if not err <= 1e-10 * abs(value):
        raise QuadratureError(f"moment n={n} ell={ell}: estimate {value} with error {err}")
    log_result = math.log(value) + scale - ell / 4.0
    return math.exp(log_result)


def strong_localization_moment(n: int, ell: float) -> float:
    """Large-``ell`` form ``pi^{5/2} / (2 ell^{3/2}) phi_n(0) e^{-ell/4}``."""
    if not ell > 0:
        raise InvalidInputError("the strong-localization form needs ell > 0")
    return math.pi**2.5 / (2.0 * ell**1.5) * float(phi_n(n, 0.0)) * math.exp(-ell / 4.0)


def _binomial_poly_double(k: int, power: int, s: np.ndarray) -> np.ndarray:
    s2 = s * s
    phi = np.ones_like(s2)
    for j in range(1, power):
        phi = phi * (s2 + (j - 0.5) ** 2) / (j * j)
    total = np.zeros_like(s2)
    coeff = 1.0
    for j in range(k + 1):
        total += coeff * phi
        m = power + j
        phi = phi * (s2 + (m - 0.5) ** 2) / (m * m)
        coeff = -coeff * (k - j) / (j + 1)
    return total


def _mixed_moment_double(k: int, ell: float, power: int) -> tuple[float, float]:
    def log_env(s):
        return -ell * s * s + _log_weight(s) + _log_phi_n(power + k, s)

    peak, cut = _integration_range(log_env, ell)

    def f(s):
        if s <= 0:
            return 0.0
        arr = np.array([s])
        return float(np.exp(-ell * s * s + _log_weight(arr))[0] * _binomial_poly_double(k, power, arr)[0])

    # QUADPACK warns when cancellation stalls its error estimate; the
    # returned estimate is checked by the caller instead
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, err = integrate.quad(
            f, 0.0, cut, points=[peak] if 0 < peak < cut else None, epsabs=0.0, epsrel=1e-12, limit=400
        )
    # the unsigned binomial sum integrates to E[t^power (1+t)^k] <= 2^k E[t^power],
    # which sets the size of the rounding left after cancellation
    rounding = 1e-15 * (k + 1) * 2.0**k * transmission_moment(power, ell)
    return math.exp(-ell / 4.0) * value, math.exp(-ell / 4.0) * err + rounding


def _mixed_moment_mp(k: int, ell: float, power: int) -> float:
    def log_env(s):
        return -ell * s * s + _log_weight(s) + _log_phi_n(power + k, s)

    peak, cut = _integration_range(log_env, ell)
    dps = 30 + int(math.ceil(k * math.log10(2.0))) + 10
    with mpmath.workdps(dps):
        ell_mp = mpmath.mpf(ell)

        def f(s):
            if s == 0:
                return mpmath.mpf(0)
            s2 = s * s
            phi = mpmath.mpf(1)
            for j in range(1, power):
                phi *= (s2 + (j - mpmath.mpf(1) / 2) ** 2) / (j * j)
            total = mpmath.mpf(0)
            for j in range(k + 1):
                total += (-1) ** j * mpmath.binomial(k, j) * phi
                m = power + j
                phi *= (s2 + (m - mpmath.mpf(1) / 2) ** 2) / (m * m)
            x = mpmath.pi * s
            w = 2 * mpmath.pi * s * mpmath.sinh(x) / mpmath.cosh(x) ** 2
            return mpmath.exp(-ell_mp * s2) * w * total

        nodes = [mpmath.mpf(0)] + [mpmath.mpf(p) for p in (0.5 * peak, peak, 2 * peak) if 0 < p < cut] + [mpmath.mpf(cut)]
        value = mpmath.quad(f, nodes)
        return float(mpmath.exp(-ell_mp / 4) * value)


def mixed_moment(k: int, ell: float, power: int = 2, extended: bool | None = None) -> float:
    """``E[t^power (1 - t)^k]`` by expanding ``(1 - t)^k`` inside the spectral integrand.

    The alternating binomial sum cancels heavily for large ``k``, so orders
    above 25, or results that come out negative, are recomputed with mpmath at
    ``30 + k log10(2)`` digits or more.  ``extended`` forces either path.
    """
    if int(k) != k or k < 0:
        raise InvalidInputError(f"k must be a nonnegative integer, got {k}")
    if power not in (1, 2):
        raise InvalidInputError("power must be 1 or 2")
    if not (ell >= 0 and math.isfinite(ell)):
        raise InvalidInputError(f"ell must be finite and >= 0, got {ell}")
    k = int(k)
    if ell == 0:
        return 1.0 if k == 0 else 0.0
    use_mp = extended if extended is not None else k > EXTENDED_PRECISION_ORDER
    if not use_mp:
        value, err = _mixed_moment_double(k, ell, power)
        if value >= -err and err <= max(1e-6 * abs(value), 1e-300):
            return max(value, 0.0)
        if extended is False:
            raise PrecisionError(f"mixed moment k={k} ell={ell}: {value} +- {err}")
    value = _mixed_moment_mp(k, ell, power)
    if value < 0:
        raise PrecisionError(f"mixed moment k={k} ell={ell} negative even in extended precision: {value}")
    return value


def constant_C(tol: float = 1e-15) -> float:
    """``sum_{k>=1} 2^{-k} phi_k(0)``: the large-``ell`` ratio of the barrier-free symmetric mean to ``E[t]``."""
    total = 0.0
    term = 0.5  # 2^{-1} phi_1(0)
    k = 1
    while term > tol * total or k < 2:
        total += term
        term *= 0.5 * (k - 0.5) ** 2 / (k * k)
        k += 1
    return total


# ---------------------------------------------------------------------------
# barrier coefficients


def _canonical_reflection(r1: complex) -> complex:
    """Map a thin-barrier reflection onto the impedance-drop family.

    Only the modulus of the half-section reflection's phase-invariant law
    enters the mean intensities, and flipping the sign of every reflection
    coefficient leaves them unchanged, so ``R1`` and ``-R1`` give the same
    result.
    """
    r1 = complex(r1)
    if abs(abs(2 * r1 - 1) - 1) <= UNIT_CIRCLE_TOL:
        return r1
    if abs(abs(2 * r1 + 1) - 1) <= UNIT_CIRCLE_TOL:
        return -r1
    raise InvalidInputError(f"R1 = {r1} is not a thin-barrier reflection coefficient")


def tau_k(k: int, r1: complex) -> float:
    """Coefficient ``|1 - (2 R1 - 1)^{k+1}|^2 / 4`` of the symmetric series."""
    if int(k) != k or k < 0:
        raise InvalidInputError(f"k must be a nonnegative integer, got {k}")
    z = 2 * complex(r1) - 1
    if abs(abs(z) - 1) > UNIT_CIRCLE_TOL:
        raise InvalidInputError(f"|2 R1 - 1| = {abs(z)} != 1: not an impedance-drop thin barrier")
    theta = math.atan2(z.imag, z.real)
    return math.sin(0.5 * (k + 1) * theta) ** 2


def _tau_block(theta: float, k0: int, count: int) -> np.ndarray:
    ks = np.arange(k0, k0 + count, dtype=float)
    return np.sin(0.5 * (ks + 1.0) * theta) ** 2


def symmetric_series_terms(ell: float, r1: complex, count: int) -> np.ndarray:
    """The first ``count`` terms ``tau_k E[t^2 (1-t)^k]`` of the symmetric series."""
    r1 = _canonical_reflection(r1)
    z = 2 * r1 - 1
    theta = math.atan2(z.imag, z.real)
    law = transmittance_law(float(ell))
    return _tau_block(theta, 0, count) * law.moments_block(2, 0, count)


class _SymmetricPartialSums:
    """Partial sums of the symmetric series and their remainder bounds at any order.

    With ``tau_j = (1 - cos((j+1) theta)) / 2`` the finite sum over ``j < K``
    of ``tau_j u^j`` is a difference of two finite geometric sums, so the
    ``K``-term partial sum costs one pass over the quadrature nodes whatever
    ``K`` is.
    """

    def __init__(self, ell: float, theta: float):
        law = transmittance_law(float(ell))
        self.w = law.weights
        self.t = law.nodes
        with np.errstate(divide="ignore"):
            self.log_u = np.log(law.one_minus_t)
        self.rot = np.exp(1j * theta)

    def partial(self, order: int) -> float:
        geo = -np.expm1(order * self.log_u) / self.t
        ratio = self.rot * np.exp(self.log_u)
        cyc = self.rot * (1.0 - ratio**order) / (1.0 - ratio)
        inner = 0.5 * (geo - np.real(cyc))
        return float(self.w @ (self.t**2 * inner))

    def remainder_bound(self, order: int) -> float:
        """``sum_{j >= order} E[t^2 (1-t)^j] = E[t (1-t)^order]``."""
        return float(self.w @ (self.t * np.exp(order * self.log_u)))


def mean_intensity_symmetric(ell: float, r1: complex, ctl: SeriesControl = SeriesControl()) -> float:
    """Mean transmitted intensity of the mirror-symmetric system.

    Sums ``tau_k E[t^2 (1-t)^k]`` over ``k < K`` for the smallest ``K`` whose
    remainder bound ``sum_{j>=K} E[t^2 (1-t)^j] = E[t (1-t)^K]`` (valid
    because ``tau_j <= 1``) is at most ``rel_tol`` times the partial sum.
    """
    r1 = _canonical_reflection(r1)
    if not (ell >= 0 and math.isfinite(ell)):
        raise InvalidInputError(f"ell must be finite and >= 0, got {ell}")
    if ell == 0:
        return abs(1 - r1) ** 2
    z = 2 * r1 - 1
    sums = _SymmetricPartialSums(ell, math.atan2(z.imag, z.real))

    def converged(order: int) -> bool:
        return sums.remainder_bound(order) <= ctl.rel_tol * sums.partial(order)

    # the remainder decreases and the partial sum increases with the order,
    # so the predicate is monotone: double, then bisect
    hi = 1
    while not converged(hi):
        if hi >= ctl.max_terms:
            raise SeriesError(f"symmetric series at ell={ell}: tolerance {ctl.rel_tol} not met in {ctl.max_terms} terms")
        hi = min(2 * hi, ctl.max_terms)
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if converged(mid):
            hi = mid
        else:
            lo = mid
    return sums.partial(hi)


def independent_coefficient(k: int, kp: int, r1: complex) -> float:
    """``C_{k,k'}`` from its finite multinomial sum.

    Terms grow like multinomial coefficients while the sum stays below one, so
    orders with ``k + k' > 40`` are summed in extended precision.
    """
    if min(k, kp) < 0:
        raise InvalidInputError("indices must be nonnegative")
    z1 = 1 - 2 * complex(r1)
    if k + kp <= 40:
        total = 0j
        for j in range(max(k, kp), k + kp + 1):
            total += (
                math.factorial(j)
                / (math.factorial(k + kp - j) * math.factorial(j - k) * math.factorial(j - kp))
                * complex(r1) ** (2 * j - k - kp)
                * z1 ** (k + kp - j)
            )
        return abs(total) ** 2
    with mpmath.workdps(20 + int((k + kp) * math.log10(3.0))):
        r = mpmath.mpc(r1)
        z = 1 - 2 * r
        total = mpmath.mpc(0)
        for j in range(max(k, kp), k + kp + 1):
            log_c = mpmath.loggamma(j + 1) - mpmath.loggamma(k + kp - j + 1) - mpmath.loggamma(j - k + 1) - mpmath.loggamma(j - kp + 1)
            total += mpmath.exp(log_c) * r ** (2 * j - k - kp) * z ** (k + kp - j)
        return float(abs(total) ** 2)


def _coefficient_rows(order: int, r1: complex):
    """Yield rows ``G[k, :order]`` of the amplitudes whose squared moduli are ``C_{k,k'}``.

    ``G`` are the Taylor coefficients of
    ``1 / (1 - R1 x - R1 y - (1 - 2 R1) x y)``; each row follows from the
    previous one by a first-order linear recursion in ``k'``.
    """
    r1 = complex(r1)
    z1 = 1 - 2 * r1
    prev = np.zeros(order, dtype=complex)
    for k in range(order):
        rhs = r1 * prev
        rhs[1:] += z1 * prev[:-1]
        if k == 0:
            rhs[0] += 1.0
        row = lfilter([1.0], [1.0, -r1], rhs)
        yield row
        prev = row


def independent_coefficient_matrix(order: int, r1: complex) -> np.ndarray:
    """``C_{k,k'}`` for ``0 <= k, k' < order`` via the recursion."""
    return np.array([np.abs(row) ** 2 for row in _coefficient_rows(order, r1)])


def _independent_partial(m: np.ndarray, r1: complex) -> float:
    total = 0.0
    for k, row in enumerate(_coefficient_rows(m.size, r1)):
        total += m[k] * float(np.dot(np.abs(row) ** 2, m))
    return total


def mean_intensity_independent(ell: float, r1: complex, ctl: SeriesControl = SeriesControl()) -> float:
    """Mean transmitted intensity when the two random sections are independent.

    The double series ``|T1|^2 sum C_{k,k'} m_k m_{k'}`` with
    ``m_k = E[t (1-t)^k]`` has nonnegative terms, ``C_{k,k'} <= 1`` and
    ``sum_k m_k = 1``.  Truncating both indices at ``K`` therefore leaves a
    remainder of at most ``|T1|^2 (1 - S_K^2)`` with ``S_K = sum_{k<K} m_k``.
    When that bound meets ``rel_tol`` within ``max_order`` the partial sum is
    returned.  Otherwise the exact resummation is returned, after checking it
    lies inside ``[partial, partial + bound]``.
    """
    r1 = _canonical_reflection(r1)
    if not (ell >= 0 and math.isfinite(ell)):
        raise InvalidInputError(f"ell must be finite and >= 0, got {ell}")
    t1_sq = abs(1 - r1) ** 2
    if ell == 0:
        return t1_sq
    law = transmittance_law(float(ell))
    cap = ctl.max_order
    m_all = law.moments_block(1, 0, cap)
    mass = np.cumsum(m_all)
    bounds = t1_sq * (1.0 - mass**2)
    # the K = 1 partial sum t1_sq * m_0^2 never exceeds any longer partial sum
    floor = t1_sq * m_all[0] ** 2
    enough = np.nonzero(bounds <= ctl.rel_tol * floor)[0]
    if enough.size:
        return t1_sq * _independent_partial(m_all[: enough[0] + 1], r1)
    partial = t1_sq * _independent_partial(m_all, r1)
    bound = t1_sq * (1.0 - mass[-1] ** 2)
    resummed = independent_mean_resummed(ell, r1)
    slack = 1e-10 * resummed
    if not partial - slack <= resummed <= partial + bound + slack:
        raise SeriesError(
            f"independent series at ell={ell}: resummed value {resummed} outside [{partial}, {partial + bound}]"
        )
    return resummed


def symmetric_mean_resummed(ell: float, r1: complex) -> float:
    """Closed-form sum of the symmetric series.

    With ``z = 2 R1 - 1`` the geometric sums over ``k`` collapse to
    ``E[(t/2) Re(1/(1 - y t))]`` where ``y = -z/(1 - z)``.
    """
    r1 = _canonical_reflection(r1)
    if ell == 0:
        return abs(1 - r1) ** 2
    z = 2 * r1 - 1
    law = transmittance_law(float(ell))
    if abs(1 - z) < 1e-15:
        return law.expect(lambda t: t / (2.0 - t))
    y = -z / (1 - z)
    return law.expect(lambda t: 0.5 * t * np.real(1.0 / (1.0 - y * t)))


def independent_mean_resummed(ell: float, r1: complex) -> float:
    """Closed-form sum of the independent double series.

    Summing over ``k'`` first gives a geometric series and the remaining sum
    over ``k`` is the generating function of Legendre-type coefficients, so
    the mean becomes ``|T1|^2 E[a b / sqrt(A^2 - 4 p a^2 (1 - b))]`` over two
    independent transmittances ``a, b`` with ``p = |R1|^2`` and
    ``A = a (1 + p) + b (1 - p) - a b``.
    """
    r1 = _canonical_reflection(r1)
    t1_sq = abs(1 - r1) ** 2
    if ell == 0:
        return t1_sq
    p = abs(r1) ** 2
    law = transmittance_law(float(ell))
    a = law.nodes[:, None]
    b = law.nodes[None, :]
    big_a = a * (1.0 + p) + b * (1.0 - p) - a * b
    disc = np.maximum(big_a * big_a - 4.0 * p * a * a * (1.0 - b), 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.where(disc > 0, a * b / np.sqrt(disc), 0.0)
    return float(t1_sq * law.weights @ vals @ law.weights)


def weak_scattering_approx(mean_R2: float, t1_sq: float) -> float:
    """First-order enhancement ``|T1|^2 (1 + 2 (1 - 2|T1|^2) E|R|^2)`` for weak media."""
    if mean_R2 < 0:
        raise InvalidInputError("mean_R2 must be nonnegative")
    if not 0 < t1_sq <= 1:
        raise InvalidInputError("t1_sq must lie in (0, 1]")
    return t1_sq * (1.0 + 2.0 * (1.0 - 2.0 * t1_sq) * mean_R2)


def strong_barrier_asymptotics(ell: float, t1_sq: float) -> float:
    """Limit ``|T1|^2 (2 E[1/t] - 1) = |T1|^2 e^{2 ell}`` for a nearly opaque barrier."""
    if not ell >= 0:
        raise InvalidInputError("ell must be nonnegative")
    if not 0 < t1_sq <= 1:
        raise InvalidInputError("t1_sq must lie in (0, 1]")
    return t1_sq * math.exp(2.0 * ell)


def barrier_reflection(t1_sq: float) -> complex:
    """Impedance-drop reflection coefficient of a barrier with ``|T1|^2 = t1_sq``."""
    if not 0 < t1_sq <= 1:
        raise InvalidInputError("t1_sq must lie in (0, 1]")
    q = math.sqrt(1.0 / t1_sq - 1.0)
    return q / (1j + q)
