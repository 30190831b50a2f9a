"""Experiment configuration, orchestration and CSV tables.

A configuration is a flat ``key = value`` file.  Every run returns a
:class:`ResultTable` whose CSV form starts with ``#`` metadata lines holding
the package version, the code revision, a hash of the configuration and the
seed.  Wall time is kept out of the file so identical inputs give
byte-identical output.
"""

from __future__ import annotations

import configparser
import csv
import enum
import hashlib
import io
import math
import subprocess
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from . import analytic, medium, waveguide
from .errors import InvalidInputError, MirrorwaveError
from .scatter_core import BarrierAsymptotic, Scattering2, propagator_to_scattering

DEFAULT_GRID = tuple(round(0.1 * j, 10) for j in range(1, 61))


class ConfigError(InvalidInputError):
    """Malformed or incomplete experiment configuration."""


class ExperimentKind(enum.Enum):
    MOMENTS = "moments"
    LAYERED_SERIES = "layered_series"
    LAYERED_MC = "layered_mc"
    FIGURE = "figure"
    WAVEGUIDE_SUITE = "waveguide_suite"
    VALIDATION = "validation"


REQUIRED_KEYS: dict[ExperimentKind, tuple[str, ...]] = {
    ExperimentKind.MOMENTS: ("ells",),
    ExperimentKind.LAYERED_SERIES: ("ells", "t1_sq"),
    ExperimentKind.LAYERED_MC: ("ells", "t1_sq"),
    ExperimentKind.FIGURE: ("figure",),
    ExperimentKind.WAVEGUIDE_SUITE: ("q",),
    ExperimentKind.VALIDATION: (),
}


def parse_grid(text: str) -> list[float]:
    """Parse ``"0.5, 1, 2"`` or an inclusive range ``"start:stop:step"``."""
    text = text.strip()
    if not text:
        raise ConfigError("empty grid")
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            if not step > 0 or stop < start:
                raise ConfigError(f"bad range {text!r}")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            values = [round(start + j * step, 10) for j in range(count)]
        else:
            values = [float(x) for x in text.replace(";", ",").split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse grid {text!r}") from exc
    if not values:
        raise ConfigError("empty grid")
    return values


@dataclass(frozen=True)
class ExperimentConfig:
    """Experiment kind plus its string-valued parameters."""

    kind: ExperimentKind
    parameters: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", ExperimentKind(self.kind))
        params = {str(k).strip().lower(): str(v).strip() for k, v in dict(self.parameters).items()}
        object.__setattr__(self, "parameters", params)
        missing = [key for key in REQUIRED_KEYS[self.kind] if key not in params]
        if missing:
            raise ConfigError(f"{self.kind.value} config is missing {', '.join(missing)}")
        for key in ("ells", "grid"):
            if key in params and any(v <= 0 for v in parse_grid(params[key])):
                raise ConfigError(f"{key} must be positive")

    @classmethod
    def from_text(cls, text: str, overrides: Mapping[str, object] | None = None) -> "ExperimentConfig":
        parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"))
        try:
            parser.read_string("[experiment]\n" + text)
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse configuration: {exc}") from exc
        params = dict(parser["experiment"])
        for key, value in (overrides or {}).items():
            if value is not None:
                params[key] = str(value)
        if "kind" not in params:
            raise ConfigError("configuration needs a 'kind' entry")
        try:
            kind = ExperimentKind(params.pop("kind"))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return cls(kind, params)

    @classmethod
    def from_file(cls, path: str | Path, overrides: Mapping[str, object] | None = None) -> "ExperimentConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read configuration {path}: {exc}") from exc
        return cls.from_text(text, overrides)

    def canonical_text(self) -> str:
        lines = [f"kind = {self.kind.value}"] + [f"{k} = {self.parameters[k]}" for k in sorted(self.parameters)]
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()[:16]

    def get(self, key: str, default: str | None = None) -> str | None:
        return self.parameters.get(key, default)

    def get_float(self, key: str, default: float | None = None) -> float:
        raw = self.parameters.get(key)
        if raw is None:
            if default is None:
                raise ConfigError(f"missing {key}")
            return default
        try:
            return float(raw)
        except ValueError as exc:
            raise ConfigError(f"{key} must be a number, got {raw!r}") from exc

    def get_int(self, key: str, default: int | None = None) -> int:
        value = self.get_float(key, None if default is None else float(default))
        if value != int(value):
            raise ConfigError(f"{key} must be an integer")
        return int(value)

    def get_grid(self, key: str, default: Sequence[float] | None = None) -> list[float]:
        raw = self.parameters.get(key)
        if raw is None:
            if default is None:
                raise ConfigError(f"missing {key}")
            return list(default)
        return parse_grid(raw)

    def series_control(self) -> analytic.SeriesControl:
        return analytic.SeriesControl(rel_tol=self.get_float("tol", analytic.SeriesControl().rel_tol))


def _code_revision() -> str:
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True,
            text=True,
            timeout=5,
            check=True,
        )
        return out.stdout.strip() or "unknown"
    except (OSError, subprocess.SubprocessError):
        return "unknown"


def _package_version() -> str:
    from importlib import metadata

    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


@dataclass
class ResultTable:
    """Named columns of equal length plus string metadata."""

    columns: dict[str, list]
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        lengths = {len(v) for v in self.columns.values()}
        if len(lengths) > 1:
            raise InvalidInputError(f"columns have unequal lengths {sorted(lengths)}")

    @property
    def n_rows(self) -> int:
        return len(next(iter(self.columns.values()))) if self.columns else 0

    def rows(self) -> list[dict]:
        return [{k: v[i] for k, v in self.columns.items()} for i in range(self.n_rows)]

    def with_metadata(self, config: ExperimentConfig, seed: int | None) -> "ResultTable":
        meta = {
            "version": _package_version(),
            "code": _code_revision(),
            "config_hash": config.digest(),
            "kind": config.kind.value,
            "seed": "none" if seed is None else str(seed),
        }
        meta.update(self.metadata)
        return ResultTable(self.columns, meta)

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key in sorted(self.metadata):
            buf.write(f"# {key}: {self.metadata[key]}\n")
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(list(self.columns))
        for row in zip(*self.columns.values()):
            writer.writerow([_format_cell(x) for x in row])
        return buf.getvalue()

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_csv(), newline="")


def _format_cell(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


# ---------------------------------------------------------------------------
# layered experiments


def run_moments(ells: Iterable[float], orders: Iterable[int]) -> ResultTable:
    cols: dict[str, list] = {"ell": [], "n": [], "moment": [], "strong_form": []}
    for ell in ells:
        for n in orders:
            cols["ell"].append(float(ell))
            cols["n"].append(int(n))
            cols["moment"].append(analytic.transmission_moment(n, ell))
            cols["strong_form"].append(analytic.strong_localization_moment(n, ell) if ell > 0 else float("nan"))
    return ResultTable(cols)


def _series_point(ell: float, t1_sq: float, ctl: analytic.SeriesControl) -> tuple[float, float]:
    r1 = analytic.barrier_reflection(t1_sq)
    try:
        return (
            analytic.mean_intensity_symmetric(ell, r1, ctl),
            analytic.mean_intensity_independent(ell, r1, ctl),
        )
    except MirrorwaveError as exc:
        raise type(exc)(f"at ell={ell}: {exc}") from exc


def run_series(ells: Iterable[float], t1_sq: float, ctl: analytic.SeriesControl) -> ResultTable:
    cols: dict[str, list] = {"ell": [], "symmetric": [], "independent": [], "mean_T2": [], "t1_sq": []}
    for ell in ells:
        sym, ind = _series_point(ell, t1_sq, ctl)
        cols["ell"].append(float(ell))
        cols["symmetric"].append(sym)
        cols["independent"].append(ind)
        cols["mean_T2"].append(analytic.transmission_moment(1, ell))
        cols["t1_sq"].append(float(t1_sq))
    return ResultTable(cols)


FIGURE_TRANSMITTANCE = {"comp1": 1.0, "comp2": 0.4, "comp3": 0.1}


def run_figure(fig_id: str, ctl: analytic.SeriesControl, grid: Sequence[float] = DEFAULT_GRID) -> ResultTable:
    """Data behind the three comparison figures.

    ``comp1`` has no barrier and reports the ratio independent/symmetric;
    ``comp2`` and ``comp3`` use barriers with ``|T1|^2 = 0.4`` and ``0.1``.
    """
    if fig_id not in FIGURE_TRANSMITTANCE:
        raise ConfigError(f"unknown figure {fig_id!r}; choose from {sorted(FIGURE_TRANSMITTANCE)}")
    if any(not 0 < ell <= 10 for ell in grid):
        raise ConfigError("figure grid must lie in (0, 10]")
    t1_sq = FIGURE_TRANSMITTANCE[fig_id]
    table = run_series(grid, t1_sq, ctl)
    if fig_id == "comp1":
        c = table.columns
        ratio = [i / s for i, s in zip(c["independent"], c["symmetric"])]
        return ResultTable({"ell": c["ell"], "symmetric": c["symmetric"], "independent": c["independent"], "ratio": ratio})
    return table


@dataclass(frozen=True)
class LayeredMCSetup:
    """Random medium and calibration used by the layered Monte Carlo runs."""

    sigma: float = 0.9
    corr_ratio: float = 1e-2
    model: medium.MediumModel = medium.MediumModel.BINARY
    calibration: medium.Calibration = medium.Calibration.LYAPUNOV

    def spec(self) -> medium.MediumSpec:
        return medium.MediumSpec(1.0, self.corr_ratio, self.sigma, self.model)


def run_mc(
    ells: Iterable[float],
    t1_values: Sequence[float],
    n_samples: int,
    seed: int,
    setup: LayeredMCSetup = LayeredMCSetup(),
    ctl: analytic.SeriesControl = analytic.SeriesControl(),
) -> ResultTable:
    """Monte Carlo mean intensity of the symmetric system against the series.

    One ensemble of sections is drawn per strength and reused for every
    barrier, so the rows of one ``ell`` share their noise.
    """
    spec = setup.spec()
    cols: dict[str, list] = {
        "ell": [], "t1_sq": [], "omega": [], "mc_mean": [], "std_error": [], "series": [], "z_score": [], "rel_error": []
    }
    for ell in ells:
        omega = medium.frequency_for_strength(spec, ell, setup.calibration, seed=seed)
        ens = medium.sample_section_ensemble(spec, omega, n_samples, seed)
        for t1_sq in t1_values:
            est = ens.mean_intensity(BarrierAsymptotic.from_transmittance(t1_sq))
            series = analytic.mean_intensity_symmetric(ell, analytic.barrier_reflection(t1_sq), ctl)
            cols["ell"].append(float(ell))
            cols["t1_sq"].append(float(t1_sq))
            cols["omega"].append(omega)
            cols["mc_mean"].append(est.mean)
            cols["std_error"].append(est.std_error)
            cols["series"].append(series)
            cols["z_score"].append((est.mean - series) / est.std_error if est.std_error > 0 else 0.0)
            cols["rel_error"].append(abs(est.mean - series) / series)
    return ResultTable(cols)


# ---------------------------------------------------------------------------
# waveguide experiments


def run_waveguide(
    q_values: Sequence[float], n_modes: int, eps: float, n_samples: int, seed: int
) -> ResultTable:
    """Synthetic-ensemble transmissivities against the weak-scattering formulas (uniform ``q``)."""
    cols: dict[str, list] = {
        "q": [], "T0": [], "mc_symmetric": [], "se_symmetric": [], "theory_symmetric": [],
        "mc_independent": [], "se_independent": [], "theory_independent": [],
    }
    for q in q_values:
        modal = waveguide.BarrierModal(np.full(n_modes, float(q)))
        bar = waveguide.barrier_matrices_asymptotic(modal)
        mc = waveguide.waveguide_monte_carlo(bar, eps, n_samples, seed)
        cols["q"].append(float(q))
        cols["T0"].append(waveguide.barrier_transmissivity(modal))
        cols["mc_symmetric"].append(mc.symmetric_mean)
        cols["se_symmetric"].append(mc.symmetric_std_error)
        cols["theory_symmetric"].append(waveguide.mean_transmissivity(mc.moments, modal))
        cols["mc_independent"].append(mc.independent_mean)
        cols["se_independent"].append(mc.independent_std_error)
        cols["theory_independent"].append(waveguide.independent_mean_transmissivity(mc.moments, modal))
    return ResultTable(cols)


# ---------------------------------------------------------------------------
# validation suite


@dataclass(frozen=True)
class ValidationRow:
    criterion: str
    description: str
    measured: float
    target: float
    tolerance: float
    passed: bool


def _row(criterion, description, measured, target, tolerance, passed) -> ValidationRow:
    return ValidationRow(str(criterion), description, float(measured), float(target), float(tolerance), bool(passed))


def check_constant() -> list[ValidationRow]:
    c = analytic.constant_C()
    return [_row("1", "constant C in [0.585, 0.595]", c, 0.59, 0.005, 0.585 <= c <= 0.595)]


def check_normalization() -> list[ValidationRow]:
    worst = max(abs(analytic.transmission_moment(n, 0.0) - 1.0) for n in range(1, 7))
    return [_row("2", "max_n |E[t^n] - 1| at ell = 0", worst, 0.0, 1e-9, worst <= 1e-9)]


def check_strong_localization(ell: float = 30.0) -> list[ValidationRow]:
    rows = []
    for n in (1, 2, 3):
        ratio = analytic.transmission_moment(n, ell) / analytic.strong_localization_moment(n, ell)
        rows.append(_row("3", f"quadrature / strong form, n={n}, ell={ell:g}", ratio, 1.0, 0.1, abs(ratio - 1) <= 0.1))
    return rows


def check_monte_carlo(n_samples: int = 10_000, seed: int = 7, setup: LayeredMCSetup = LayeredMCSetup()) -> list[ValidationRow]:
    table = run_mc((0.5, 1.0, 2.0), (1.0, 0.4, 0.1), n_samples, seed, setup)
    rows = []
    for r in table.rows():
        ok = abs(r["z_score"]) <= 3.0 and r["rel_error"] <= 0.05
        rows.append(_row("4", f"MC z-score, ell={r['ell']:g}, |T1|^2={r['t1_sq']:g} (rel {r['rel_error']:.3%})",
                         r["z_score"], 0.0, 3.0, ok))
    return rows


def check_ordering(grid: Sequence[float] = DEFAULT_GRID, ctl: analytic.SeriesControl = analytic.SeriesControl()) -> list[ValidationRow]:
    rows = []
    for t1_sq in (1.0, 0.4, 0.1):
        table = run_series(grid, t1_sq, ctl).columns
        gap = min(s - i for s, i in zip(table["symmetric"], table["independent"]))
        rows.append(_row("5", f"min(symmetric - independent), |T1|^2={t1_sq:g}", gap, 0.0, 0.0, gap >= 0))
        if t1_sq == 1.0:
            ratio = max(i / s for s, i in zip(table["symmetric"], table["independent"]))
            rows.append(_row("5", "max independent/symmetric ratio without barrier", ratio, 1.0, 0.0, ratio <= 1.0))
        excess = max(s - m for s, m in zip(table["symmetric"], table["mean_T2"]))
        rows.append(_row("6", f"max(symmetric - E|T|^2), |T1|^2={t1_sq:g}", excess, 0.0, 1e-9, excess <= 1e-9))
    return rows


def check_strong_barrier(t1_sq: float = 1e-3) -> list[ValidationRow]:
    rows = []
    for ell in (0.5, 1.0, 2.0):
        value = analytic.mean_intensity_symmetric(ell, analytic.barrier_reflection(t1_sq))
        ratio = value / analytic.strong_barrier_asymptotics(ell, t1_sq)
        rows.append(_row("7", f"series / (|T1|^2 e^(2 ell)), ell={ell:g}", ratio, 1.0, 0.05, 0.95 <= ratio <= 1.05))
    return rows


def weak_barrier_slope(t1_sq: float, ell: float = 0.01, step: float = 1e-3) -> float:
    """Central difference of the symmetric mean intensity in ``ell``."""
    r1 = analytic.barrier_reflection(t1_sq)
    ctl = analytic.SeriesControl(rel_tol=1e-13)
    up = analytic.mean_intensity_symmetric(ell + step, r1, ctl)
    down = analytic.mean_intensity_symmetric(ell - step, r1, ctl)
    return (up - down) / (2.0 * step)


def check_weak_barrier() -> list[ValidationRow]:
    s_low = weak_barrier_slope(0.4)
    s_high = weak_barrier_slope(0.6)
    return [
        _row("8", "slope at ell=0.01, |T1|^2=0.4 (positive)", s_low, 0.0, 0.0, s_low > 0),
        _row("8", "slope at ell=0.01, |T1|^2=0.6 (negative)", s_high, 0.0, 0.0, s_high < 0),
    ]


WAVEGUIDE_TEST_Q = (0.3, 1.0, 2.0, 3.0)


def median_closed_form_error(eps: float, n_draws: int = 300, seed: int = 5, reciprocal: bool = False) -> float:
    """Median relative gap between the closed form and the block-propagator product."""
    bar = waveguide.barrier_matrices_asymptotic(waveguide.BarrierModal(np.array(WAVEGUIDE_TEST_Q)))
    errs = []
    for i in range(n_draws):
        s = waveguide.sample_reflection_ensemble(len(WAVEGUIDE_TEST_Q), eps, (seed, i), reciprocal)
        exact = waveguide.exact_transmission_oracle(s, bar)
        approx = waveguide.system_transmission_matrix(s, bar)
        errs.append(np.linalg.norm(approx - exact) / np.linalg.norm(exact))
    return float(np.median(errs))


def check_quadratic_accuracy() -> list[ValidationRow]:
    errs = [median_closed_form_error(eps) for eps in (0.02, 0.04, 0.08)]
    rows = []
    for (e_lo, e_hi), label in zip(zip(errs, errs[1:]), ("0.04/0.02", "0.08/0.04")):
        ratio = e_hi / e_lo
        rows.append(_row("9", f"median error ratio eps {label} (quadratic: 4)", ratio, 4.0, 2.0, 2.0 <= ratio <= 8.0))
    return rows


def check_waveguide_means(n_samples: int = 10_000, seed: int = 11, n_modes: int = 3, eps: float = 0.05) -> list[ValidationRow]:
    table = run_waveguide((0.3, 3.0), n_modes, eps, n_samples, seed)
    rows = []
    for r in table.rows():
        z = (r["mc_symmetric"] - r["theory_symmetric"]) / r["se_symmetric"]
        rows.append(_row("10", f"symmetric MC vs weak-scattering formula, q={r['q']:g} (z)", z, 0.0, 3.0, abs(z) <= 3.0))
        gain = r["theory_symmetric"] - r["T0"]
        sign_ok = np.sign(gain) == np.sign(r["q"] ** 2 - 1.0)
        rows.append(_row("10", f"T - T0 sign matches q^2 - 1, q={r['q']:g}", gain, 0.0, 0.0, bool(sign_ok)))
        penalty = r["theory_independent"] - r["T0"]
        rows.append(_row("10", f"independent formula - T0 <= 0, q={r['q']:g}", penalty, 0.0, 0.0, penalty <= 0))
    return rows


def scalar_matrix_gap(n_instances: int = 100, seed: int = 3) -> float:
    """Largest gap between the one-mode waveguide formulas and the layered ones.

    Each instance draws a random one-dimensional section and barrier
    strength, then compares transmission through the closed-form matrix
    formula, the block-propagator product and the mean-transmissivity
    formulas with their scalar counterparts.
    """
    rng = np.random.default_rng(np.random.SeedSequence([seed, 11]))
    worst = 0.0
    spec = medium.MediumSpec(1.0, 0.05, 0.5, medium.MediumModel.BINARY)
    for i in range(n_instances):
        real = medium.sample_medium(spec, (seed, i))
        p_plus = medium.integrate_half_propagator(real, float(rng.uniform(2.0, 20.0)))
        q = float(rng.uniform(0.05, 5.0))
        s = propagator_to_scattering(p_plus)
        section = waveguide.ModalScattering(np.array([[s.t]]), np.array([[s.r]]))
        modal = waveguide.BarrierModal(np.array([q]))
        bar = waveguide.barrier_matrices_asymptotic(modal)
        scalar_barrier = BarrierAsymptotic(q, "impedance_jump")
        scalar = complex(medium.system_transmission(p_plus, scalar_barrier))
        mirror = complex(medium.independent_system_transmission(medium.mirror_propagator(p_plus), p_plus, scalar_barrier))
        closed = complex(waveguide.system_transmission_matrix(section, bar)[0, 0])
        oracle = complex(waveguide.exact_transmission_oracle(section, bar)[0, 0])
        moment = float(rng.uniform(0.0, 0.1))
        weak_matrix = waveguide.mean_transmissivity(np.array([[moment]]), modal)
        weak_scalar = analytic.weak_scattering_approx(moment, modal.transmittances[0])
        ind_matrix = waveguide.independent_mean_transmissivity(np.array([[moment]]), modal)
        t1 = modal.transmittances[0]
        ind_scalar = t1 - 2.0 * moment * t1 * t1
        worst = max(
            worst,
            abs(closed - scalar),
            abs(oracle - mirror),
            abs(weak_matrix - weak_scalar),
            abs(ind_matrix - ind_scalar),
        )
    return worst


def check_scalar_reduction() -> list[ValidationRow]:
    gap = scalar_matrix_gap()
    return [_row("11", "max |one-mode waveguide - layered| over 100 instances", gap, 0.0, 1e-9, gap <= 1e-9)]


def check_homogeneous_smoke(t1_sq: float = 0.4) -> list[ValidationRow]:
    spec = medium.MediumSpec(1.0, 0.01, 0.0, medium.MediumModel.BINARY)
    est = medium.monte_carlo_mean_intensity(spec, BarrierAsymptotic.from_transmittance(t1_sq), 10.0, 100, 0)
    gap = abs(est.mean - t1_sq)
    return [_row("smoke", "sigma=0 MC mean equals |T1|^2", est.mean, t1_sq, 1e-12, gap <= 1e-12)]


CRITERIA: dict[str, Callable[[], list[ValidationRow]]] = {
    "smoke": check_homogeneous_smoke,
    "1": check_constant,
    "2": check_normalization,
    "3": check_strong_localization,
    "4": check_monte_carlo,
    "5": check_ordering,
    "7": check_strong_barrier,
    "8": check_weak_barrier,
    "9": check_quadratic_accuracy,
    "10": check_waveguide_means,
    "11": check_scalar_reduction,
}


def run_validation(config: ExperimentConfig) -> ResultTable:
    """Run the selected criteria (all by default) and tabulate each check.

    Criterion 6 is evaluated together with 5 since both use the same series
    grid.  Numerical failures inside a check are recorded as failed rows.
    """
    selected = config.get("criteria")
    keys = list(CRITERIA) if selected is None else [k.strip() for k in selected.split(",") if k.strip()]
    if "6" in keys and "5" not in keys:
        keys.append("5")
    seed = config.get_int("seed", 7)
    n_samples = config.get_int("n_samples", 10_000)
    rows: list[ValidationRow] = []
    for key in keys:
        if key == "6":
            continue
        if key not in CRITERIA:
            raise ConfigError(f"unknown criterion {key!r}")
        try:
            if key == "4":
                found = check_monte_carlo(n_samples, seed)
            elif key == "10":
                found = check_waveguide_means(n_samples)
            elif key == "5":
                found = check_ordering(ctl=config.series_control())
            else:
                found = CRITERIA[key]()
        except MirrorwaveError as exc:
            found = [_row(key, f"numerical failure: {exc}", float("nan"), float("nan"), float("nan"), False)]
        rows.extend(found)
    cols = {name: [getattr(r, name) for r in rows] for name in ValidationRow.__dataclass_fields__}
    return ResultTable(cols)
