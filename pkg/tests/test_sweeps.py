import math

import numpy as np
import pytest

from spinglow.linalg import ValidationError
from spinglow.model import SystemConfig, diagonalize
from spinglow.radiation import ObservationPoint, intensity_numeric
from spinglow.sweeps import (
    UnidentifiableError,
    estimate_distance,
    monogamy_intensity_curve,
    spearman,
    superradiant_peaks,
    sweep,
    worker_count,
)
from spinglow.thermal import thermal_state, thermal_state_for
from spinglow.correlations import thermal_qc_report


def synthetic(d_over_lambda, thetas, omega=1.0, t=5e-3):
    ops, _, eig = diagonalize(SystemConfig.line(3, omega))
    rho = thermal_state(eig, t).rho
    return np.array([intensity_numeric(rho, ops, ObservationPoint(th, 2 * math.pi * d_over_lambda)) for th in thetas])


def test_intensity_grid_matches_pointwise():
    thetas = np.linspace(-1, 1, 4)
    lods = [1.0, 2.0, 3.0]
    grid = sweep("intensity", ("theta", thetas), ("lambda_over_d", lods), {"temperature": 0.5})
    assert grid.values.shape == (3, 4)
    ops, _, eig = diagonalize(SystemConfig.line(3, 1.0))
    rho = thermal_state(eig, 0.5).rho
    for iy, lod in enumerate(lods):
        for ix, th in enumerate(thetas):
            expected = intensity_numeric(rho, ops, ObservationPoint.from_spacing(th, lod))
            assert grid.values[iy, ix] == pytest.approx(expected, abs=1e-12)


def test_rows_ordered_by_y_then_x():
    grid = sweep("intensity", ("theta", [0.0, 1.0]), ("omega_over_Omega", [0.5, 2.0]))
    rows = list(grid.rows())
    assert [(r[0], r[1]) for r in rows] == [(0.0, 0.5), (1.0, 0.5), (0.0, 2.0), (1.0, 2.0)]


def test_qc_grid_matches_report():
    grid = sweep("concurrence", ("temperature", [0.1, 1.0]), ("omega_over_Omega", [1.0, 3.0]))
    for iy, w in enumerate([1.0, 3.0]):
        for ix, t in enumerate([0.1, 1.0]):
            assert grid.values[iy, ix] == pytest.approx(thermal_qc_report(SystemConfig.line(3, w), t).concurrence)


def test_monogamy_grid_is_finite():
    grid = sweep("monogamy", ("omega_over_Omega", [0.0, 1.0, 2.0]), ("temperature", [5e-3, 1.0]))
    assert np.all(np.isfinite(grid.values))


def test_thread_count_does_not_change_result():
    args = ("g2", ("omega_over_Omega", np.linspace(0, 3, 5)), ("temperature", [5e-3, 0.5, 2.0]))
    a = sweep(*args, threads=1)
    b = sweep(*args, threads=4)
    np.testing.assert_array_equal(a.values, b.values)


def test_undefined_g2_cells_are_counted():
    # a cold two-atom pair with omega > 1 sits in |gg> and emits nothing
    grid = sweep("g2", ("theta", [0.0, 0.5]), ("omega_over_Omega", [3.0]), n_atoms=2)
    assert grid.metadata["undefined_cells"] == 2
    assert np.all(np.isnan(grid.values))


def test_conflicting_axes_rejected():
    with pytest.raises(ValidationError):
        sweep("intensity", ("theta", [0.0]), ("theta", [1.0]))
    with pytest.raises(ValidationError):
        sweep("intensity", ("theta", [0.0]), ("temperature", [1.0]), {"theta": 1.0})
    with pytest.raises(ValidationError):
        sweep("intensity", ("theta", [0.0]), ("temperature", [0.0]))
    with pytest.raises(ValidationError):
        sweep("bogus", ("theta", [0.0]), ("temperature", [1.0]))


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("SPINGLOW_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("SPINGLOW_THREADS", "0")
    assert worker_count() >= 1
    assert worker_count(2) == 2


def test_superradiant_peaks_near_inverse_integers():
    peaks = superradiant_peaks()
    for target in (2.0, 2 / 3, 2 / 5):
        assert min(abs(p - target) for p in peaks) < 0.01 * target


def test_no_peaks_at_broadside_zero_angle():
    assert superradiant_peaks(theta=0.0) == []


def test_monogamy_intensity_positive_rank_correlation():
    curve = monogamy_intensity_curve(omegas=np.linspace(0, 10, 60))
    assert spearman(curve) > 0


@pytest.mark.parametrize("truth", [0.5, 1.0, 1.5])
def test_estimation_noiseless_round_trip(truth):
    thetas = np.linspace(-1.4, 1.4, 41)
    res = estimate_distance(list(zip(thetas, synthetic(truth, thetas))), wavelength=2.0)
    assert res.d_over_lambda == pytest.approx(truth, rel=1e-6)
    assert res.distance == pytest.approx(2 * truth, rel=1e-6)
    assert res.residual < 1e-10


def test_estimation_with_noise():
    rng = np.random.default_rng(7)
    thetas = np.linspace(-1.4, 1.4, 81)
    clean = synthetic(1.0, thetas)
    noisy = clean + rng.normal(scale=0.01 * clean.max(), size=clean.size)
    assert estimate_distance(list(zip(thetas, noisy))).d_over_lambda == pytest.approx(1.0, rel=0.05)


def test_estimation_rejects_flat_and_short_data():
    thetas = np.linspace(-1, 1, 20)
    with pytest.raises(UnidentifiableError):
        estimate_distance([(t, 1.5) for t in thetas])
    with pytest.raises(ValidationError):
        estimate_distance([(0.0, 1.0), (0.1, 2.0)])


def test_infinite_temperature_sweep_is_flat():
    grid = sweep("intensity", ("theta", np.linspace(-3, 3, 7)), ("lambda_over_d", [0.5, 2.0]),
                 {"temperature": math.inf})
    np.testing.assert_allclose(grid.values, 1.5, atol=1e-12)
    assert thermal_state_for(SystemConfig.line(3, 1.0), math.inf).beta == 0
