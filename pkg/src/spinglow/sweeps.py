"""Parameter sweeps over (omega/Omega, theta, lambda/d, temperature) and distance estimation."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.stats import spearmanr

from .correlations import monogamy_score, qc_report
from .linalg import ValidationError
from .model import SystemConfig, diagonalize
from .radiation import INTENSITY_FLOOR, RadiationMoments, phase_matrix
from .thermal import thermal_state

AXES = ("omega_over_Omega", "theta", "lambda_over_d", "temperature")
STATE_AXES = ("omega_over_Omega", "temperature")
OBSERVABLES = (
    "intensity",
    "g2",
    "concurrence",
    "discord",
    "negativity_1_23",
    "negativity_1_2",
    "negativity_1_3",
    "monogamy",
)
DEFAULTS = {
    "omega_over_Omega": 1.0,
    "theta": math.pi / 2,
    "lambda_over_d": 2.0,
    "temperature": 5e-3,
}
THREADS_ENV = "SPINGLOW_THREADS"


class UnidentifiableError(ValueError):
    """The data carry no information about the spacing."""


def worker_count(threads: int | None = None) -> int:
    if threads is None:
        raw = os.environ.get(THREADS_ENV, "0")
        try:
            threads = int(raw)
        except ValueError:
            raise ValidationError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if threads < 0:
        raise ValidationError(f"thread count must be >= 0, got {threads}")
    return threads or (os.cpu_count() or 1)


@dataclass
class SweepGrid:
    """Values on the Cartesian product of two axes; ``values[iy, ix]``."""

    observable: str
    x_name: str
    x_values: np.ndarray
    y_name: str
    y_values: np.ndarray
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.values.shape != (len(self.y_values), len(self.x_values)):
            raise ValidationError("grid values do not match axis lengths")

    def rows(self):
        """(x, y, value) triples ordered by y, then x."""
        for iy, y in enumerate(self.y_values):
            for ix, x in enumerate(self.x_values):
                yield float(x), float(y), float(self.values[iy, ix])


@dataclass(frozen=True)
class _Group:
    omega: float
    temperature: float
    cells: list  # (iy, ix, theta, lambda_over_d)


def _validate_axes(x_name: str, y_name: str, fixed: dict):
    for name in (x_name, y_name, *fixed):
        if name not in AXES:
            raise ValidationError(f"unknown parameter {name!r}; expected one of {', '.join(AXES)}")
    if x_name == y_name:
        raise ValidationError(f"x and y axes must differ, both are {x_name!r}")
    for name in (x_name, y_name):
        if name in fixed:
            raise ValidationError(f"{name!r} is both swept and fixed")


def _axis(values) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(values, dtype=float))
    if arr.ndim != 1 or arr.size == 0 or not np.all(np.isfinite(arr)):
        raise ValidationError("axis values must be a non-empty 1-D array of finite numbers")
    return np.sort(arr)


def sweep(
    observable: str,
    x: tuple[str, Sequence[float]],
    y: tuple[str, Sequence[float]],
    fixed: dict | None = None,
    n_atoms: int = 3,
    threads: int | None = None,
    pair: tuple[int, int] = (0, 1),
    measured_side: str = "A",
) -> SweepGrid:
    """Evaluate ``observable`` on every (x, y) cell with the other parameters held fixed.

    Cells sharing (omega/Omega, temperature) share one diagonalization; those
    groups are evaluated in parallel (``SPINGLOW_THREADS`` caps the pool) and
    written back by index, so the result does not depend on scheduling.
    Undefined g2 cells (intensity below 1e-12) are stored as NaN and counted
    in ``metadata["undefined_cells"]``.
    """
    if observable not in OBSERVABLES:
        raise ValidationError(f"unknown observable {observable!r}; expected one of {', '.join(OBSERVABLES)}")
    fixed = dict(fixed or {})
    x_name, x_vals = x
    y_name, y_vals = y
    _validate_axes(x_name, y_name, fixed)
    x_vals, y_vals = _axis(x_vals), _axis(y_vals)
    params = {**DEFAULTS, **{k: float(v) for k, v in fixed.items()}}
    params.pop(x_name), params.pop(y_name)
    for name, vals in ((x_name, x_vals), (y_name, y_vals)):
        if name in ("temperature", "lambda_over_d") and np.any(vals <= 0):
            raise ValidationError(f"{name} values must be positive")
    for name in ("temperature", "lambda_over_d"):
        if name in params and not params[name] > 0:
            raise ValidationError(f"{name} must be positive")

    groups: dict[tuple[float, float], list] = {}
    for iy, yv in enumerate(y_vals):
        for ix, xv in enumerate(x_vals):
            p = dict(params)
            p[x_name], p[y_name] = xv, yv
            key = (p["omega_over_Omega"], p["temperature"])
            groups.setdefault(key, []).append((iy, ix, p["theta"], p["lambda_over_d"]))
    group_list = [_Group(w, t, cells) for (w, t), cells in groups.items()]

    evaluate = _group_evaluator(observable, n_atoms, pair, measured_side)
    values = np.empty((len(y_vals), len(x_vals)))
    n_workers = min(worker_count(threads), len(group_list))
    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(evaluate, group_list))
    else:
        results = [evaluate(g) for g in group_list]
    for g, res in zip(group_list, results):
        for (iy, ix, _, _), v in zip(g.cells, res):
            values[iy, ix] = v

    meta = {"n_atoms": n_atoms, **params}
    if observable == "g2":
        meta["undefined_cells"] = int(np.isnan(values).sum())
    if observable in OBSERVABLES[2:]:
        meta["pair"] = list(pair)
        meta["measured_side"] = measured_side
    return SweepGrid(observable, x_name, x_vals, y_name, y_vals, values, meta)


def _group_evaluator(observable: str, n_atoms: int, pair, measured_side) -> Callable[[_Group], list]:
    def evaluate(group: _Group) -> list:
        cfg = SystemConfig.line(n_atoms, group.omega)
        ops, _, eig = diagonalize(cfg)
        state = thermal_state(eig, group.temperature)
        if observable in ("intensity", "g2"):
            theta = np.array([c[2] for c in group.cells])
            kd = 2 * math.pi / np.array([c[3] for c in group.cells])
            phases = phase_matrix(n_atoms, theta, kd)
            moments = RadiationMoments(state.rho, ops, second_order=observable == "g2")
            intensity = np.clip(moments.intensity(phases), 0.0, None)
            if observable == "intensity":
                return list(intensity)
            num = np.clip(moments.numerator(phases), 0.0, None)
            safe = np.where(intensity > INTENSITY_FLOOR, intensity, 1.0)
            return list(np.where(intensity > INTENSITY_FLOOR, num / safe**2, np.nan))
        report = qc_report(state.rho, n_atoms, pair, measured_side)
        field_name = "monogamy_score" if observable == "monogamy" else observable
        value = getattr(report, field_name)
        if value is None:
            raise ValidationError(f"{observable} is not defined for {n_atoms} atoms")
        return [value] * len(group.cells)

    return evaluate


def sweep_intensity(x, y, fixed=None, **kw) -> SweepGrid:
    return sweep("intensity", x, y, fixed, **kw)


def sweep_g2(x, y, fixed=None, **kw) -> SweepGrid:
    return sweep("g2", x, y, fixed, **kw)


def sweep_qc(field_name: str, x, y, fixed=None, **kw) -> SweepGrid:
    if field_name not in OBSERVABLES[2:]:
        raise ValidationError(f"unknown correlation measure {field_name!r}")
    return sweep(field_name, x, y, fixed, **kw)


# --- one-dimensional curves ---------------------------------------------------------


def _moments(n_atoms: int, omega: float, temperature: float, second_order: bool = False):
    ops, _, eig = diagonalize(SystemConfig.line(n_atoms, omega))
    state = thermal_state(eig, temperature)
    return state, ops, RadiationMoments(state.rho, ops, second_order=second_order)


def intensity_curve(
    lambda_over_d: np.ndarray, theta: float, omega_over_Omega: float, temperature: float, n_atoms: int = 3
) -> np.ndarray:
    _, _, m = _moments(n_atoms, omega_over_Omega, temperature)
    lod = np.asarray(lambda_over_d, dtype=float)
    phases = phase_matrix(n_atoms, np.full(lod.shape, theta), 2 * math.pi / lod)
    return np.clip(m.intensity(phases), 0.0, None)


def superradiant_peaks(
    theta: float = math.pi / 2,
    omega_over_Omega: float = 1.0,
    temperature: float = 5e-3,
    lo: float = 0.2,
    hi: float = 3.0,
    points: int = 2000,
    n_atoms: int = 3,
) -> list[float]:
    """Interior local maxima of I(lambda/d), refined by a parabola through three samples."""
    grid = np.linspace(lo, hi, points)
    values = intensity_curve(grid, theta, omega_over_Omega, temperature, n_atoms)
    scale = max(float(np.max(np.abs(values))), 1.0)
    tol = 1e-12 * scale
    h = grid[1] - grid[0]
    peaks = []
    for i in range(1, points - 1):
        left, mid, right = values[i - 1], values[i], values[i + 1]
        if mid - left > tol and mid - right > tol:
            denom = left - 2 * mid + right
            shift = 0.5 * (left - right) / denom
            peaks.append(float(grid[i] + np.clip(shift, -1.0, 1.0) * h))
    return peaks


def monogamy_intensity_curve(
    lambda_over_d: float = 2.0,
    temperature: float = 5e-3,
    theta: float = math.pi / 2,
    omegas: Sequence[float] | None = None,
) -> list[tuple[float, float]]:
    """(tau_{1:23}, I) pairs traced out by varying omega/Omega, sorted by tau."""
    if omegas is None:
        omegas = np.linspace(0.0, 10.0, 400)
    pts = []
    kd = 2 * math.pi / lambda_over_d
    for w in np.unique(np.asarray(omegas, dtype=float)):
        state, ops, m = _moments(3, float(w), temperature)
        tau = monogamy_score(state.rho, 0)
        intensity = float(np.clip(m.intensity(phase_matrix(3, [theta], kd)), 0.0, None)[0])
        pts.append((tau, intensity))
    return sorted(pts)


def spearman(curve: Sequence[tuple[float, float]]) -> float:
    tau, intensity = zip(*curve)
    return float(spearmanr(tau, intensity).statistic)


# --- distance estimation ------------------------------------------------------------


@dataclass(frozen=True)
class EstimationResult:
    d_over_lambda: float
    residual: float
    samples_used: int
    wavelength: float = 1.0

    @property
    def distance(self) -> float:
        return self.d_over_lambda * self.wavelength

    def to_dict(self) -> dict:
        return {
            "d_over_lambda": self.d_over_lambda,
            "distance": self.distance,
            "wavelength": self.wavelength,
            "residual": self.residual,
            "samples_used": self.samples_used,
        }


MIN_SAMPLES = 8
BRACKET = (0.05, 5.0)
BRACKET_POINTS = 200
_GOLDEN = (math.sqrt(5) - 1) / 2


def _golden_section(f, a: float, b: float, tol: float = 1e-12, max_iter: int = 200) -> float:
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if abs(b - a) <= tol * max(1.0, abs(c) + abs(d)):
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def estimate_distance(
    samples: Sequence[tuple[float, float]],
    wavelength: float = 1.0,
    omega_over_Omega: float = 1.0,
    temperature: float = 5e-3,
    n_atoms: int = 3,
    bracket: tuple[float, float] = BRACKET,
) -> EstimationResult:
    """Least-squares fit of the spacing to (theta, intensity) samples.

    A 200-point scan of d/lambda over ``bracket`` picks the basin, golden
    section narrows it, and Gauss-Newton steps polish the root so noiseless
    data are fitted to rounding level. Only d is fitted; omega/Omega and the
    temperature are taken as known.
    """
    data = np.asarray(samples, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise ValidationError("samples must be (theta, intensity) pairs")
    if len(data) < MIN_SAMPLES:
        raise ValidationError(f"need at least {MIN_SAMPLES} samples, got {len(data)}")
    if not np.all(np.isfinite(data)):
        raise ValidationError("samples must be finite")
    if not wavelength > 0:
        raise ValidationError(f"wavelength must be positive, got {wavelength}")
    theta, observed = data[:, 0], data[:, 1]
    if observed.max() - observed.min() < 1e-9:
        raise UnidentifiableError("intensity samples are flat; the spacing cannot be identified")

    _, _, moments = _moments(n_atoms, omega_over_Omega, temperature)
    sin_t = np.sin(theta)
    steps = np.arange(1, n_atoms + 1)

    def model(d_over_lambda: float) -> np.ndarray:
        phases = np.outer(2 * math.pi * d_over_lambda * sin_t, steps)
        return moments.intensity(phases, check=False)

    def sse(d_over_lambda: float) -> float:
        r = model(d_over_lambda) - observed
        return float(r @ r)

    candidates = np.linspace(bracket[0], bracket[1], BRACKET_POINTS)
    scores = np.array([sse(c) for c in candidates])
    k = int(np.argmin(scores))
    a = candidates[max(k - 1, 0)]
    b = candidates[min(k + 1, len(candidates) - 1)]
    best = _golden_section(sse, a, b)

    for _ in range(20):
        h = 1e-6 * max(best, 1e-3)
        jac = (model(best + h) - model(best - h)) / (2 * h)
        r = model(best) - observed
        jj = float(jac @ jac)
        if jj == 0:
            break
        trial = best - float(jac @ r) / jj
        if not a - (b - a) <= trial <= b + (b - a) or sse(trial) > sse(best):
            break
        converged = abs(trial - best) <= 1e-15 * max(1.0, best)
        best = trial
        if converged:
            break

    if np.ptp(np.sin(theta)) == 0:
        raise UnidentifiableError("all samples share one observation direction")
    residual = math.sqrt(sse(best) / len(observed))
    return EstimationResult(float(best), residual, len(observed), float(wavelength))
