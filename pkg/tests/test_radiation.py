import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_density
from spinglow.model import SystemConfig, analytic_line_spectrum, build_spin_operators, diagonalize
from spinglow.radiation import (
    ObservationPoint,
    UndefinedCorrelationError,
    classify,
    g2_closed_form,
    g2_numeric,
    intensity_closed_form,
    intensity_numeric,
    intensity_terms,
    optical_phases,
)
from spinglow.thermal import thermal_state

OPS3 = build_spin_operators(3)


def loop_intensity(rho, ops, phases):
    n = ops.n_atoms
    total = 0j
    for i in range(n):
        for j in range(n):
            total += np.trace(rho @ ops.s_plus[i] @ ops.s_minus[j]) * np.exp(1j * (phases[i] - phases[j]))
    return total.real


def loop_numerator(rho, ops, phases):
    n = ops.n_atoms
    total = 0j
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for m in range(n):
                    op = ops.s_plus[i] @ ops.s_plus[j] @ ops.s_minus[k] @ ops.s_minus[m]
                    total += np.trace(rho @ op) * np.exp(1j * (phases[i] + phases[j] - phases[k] - phases[m]))
    return total.real


def thermal(w, t, n=3):
    ops, _, eig = diagonalize(SystemConfig.line(n, w))
    return ops, thermal_state(eig, t).rho


def test_phases_examples():
    np.testing.assert_allclose(optical_phases(3, ObservationPoint(0.0, 1.3)), 0)
    assert optical_phases(1, ObservationPoint(math.pi / 2, math.pi))[0] == pytest.approx(math.pi)
    obs = ObservationPoint.from_spacing(math.pi / 6, 2.0)
    np.testing.assert_allclose(optical_phases(3, obs), [math.pi / 2, math.pi, 3 * math.pi / 2])


def test_maximally_mixed_intensity_is_flat(rng):
    rho = np.eye(8) / 8
    for th in rng.uniform(-math.pi, math.pi, 10):
        obs = ObservationPoint.from_spacing(th, 2.0)
        assert intensity_numeric(rho, OPS3, obs) == pytest.approx(1.5, abs=1e-14)
        assert classify(1.5, rho, OPS3) == "neutral"


def test_single_excited_atom():
    ops = build_spin_operators(1)
    rho = np.diag([1.0, 0.0]).astype(complex)
    obs = ObservationPoint(0.4, 2.0)
    assert intensity_numeric(rho, ops, obs) == pytest.approx(1.0)
    assert g2_numeric(rho, ops, obs) == 0.0


def test_intensity_matches_loop_oracle(rng):
    for _ in range(5):
        rho = random_density(rng, 8)
        obs = ObservationPoint(rng.uniform(-3, 3), rng.uniform(0.5, 10))
        phases = optical_phases(3, obs)
        assert intensity_numeric(rho, OPS3, obs) == pytest.approx(loop_intensity(rho, OPS3, phases), abs=1e-12)


def test_g2_matches_quadruple_loop_at_infinite_temperature():
    rho = np.eye(8) / 8
    obs = ObservationPoint.from_spacing(math.pi / 4, 2.0)
    phases = optical_phases(3, obs)
    expected = loop_numerator(rho, OPS3, phases) / loop_intensity(rho, OPS3, phases) ** 2
    assert g2_numeric(rho, OPS3, obs) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(4 / 3)


def test_g2_matches_quadruple_loop_random(rng):
    rho = random_density(rng, 8)
    obs = ObservationPoint(0.7, 4.0)
    phases = optical_phases(3, obs)
    expected = loop_numerator(rho, OPS3, phases) / loop_intensity(rho, OPS3, phases) ** 2
    assert g2_numeric(rho, OPS3, obs) == pytest.approx(expected, rel=1e-12)


def test_symmetric_single_excitation_state():
    spec = analytic_line_spectrum(1.0)
    psi4 = spec.states[:, 3]
    rho = np.outer(psi4, psi4.conj())
    obs = ObservationPoint(0.0, math.pi)
    # <E-E+> = |sum_i c_i|^2 for a one-excitation state at zero phase
    expected = abs(psi4[[3, 5, 6]].sum()) ** 2
    assert intensity_numeric(rho, OPS3, obs) == pytest.approx(expected)
    assert intensity_numeric(rho, OPS3, obs) == pytest.approx(loop_intensity(rho, OPS3, np.zeros(3)))
    assert classify(expected, rho, OPS3) == "super"


def test_antisymmetric_state_is_subradiant():
    psi3 = analytic_line_spectrum(1.0).states[:, 2]
    rho = np.outer(psi3, psi3.conj())
    obs = ObservationPoint(0.0, math.pi)
    assert classify(intensity_numeric(rho, OPS3, obs), rho, OPS3) == "sub"


def test_bell_state_antibunching():
    ops = build_spin_operators(2)
    psi = np.array([0, 1, 1, 0]) / math.sqrt(2)
    rho = np.outer(psi, psi).astype(complex)
    assert g2_numeric(rho, ops, ObservationPoint(0.3, 2.0)) < 1e-12


def test_undefined_g2_raises():
    ops = build_spin_operators(2)
    psi = np.array([0, 1, -1, 0]) / math.sqrt(2)
    rho = np.outer(psi, psi).astype(complex)
    with pytest.raises(UndefinedCorrelationError):
        g2_numeric(rho, ops, ObservationPoint(0.0, 1.0))


def test_decomposition_and_vanishing_dipoles():
    ops, rho = thermal(1.0, 0.5)
    obs = ObservationPoint.from_spacing(0.9, 2.0)
    terms = intensity_terms(rho, ops, obs)
    assert abs(terms.dipole) < 1e-12
    assert terms.total == pytest.approx(intensity_numeric(rho, ops, obs), abs=1e-12)


def test_decomposition_with_coherent_dipoles(rng):
    rho = random_density(rng, 8)
    obs = ObservationPoint(0.4, 3.0)
    terms = intensity_terms(rho, OPS3, obs)
    assert abs(terms.dipole) > 1e-6
    assert terms.total == pytest.approx(intensity_numeric(rho, OPS3, obs), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(theta=st.floats(-math.pi, math.pi), lod=st.floats(0.2, 5.0), t=st.sampled_from([5e-3, 0.5, 2.0]))
def test_mirror_symmetry_and_positivity(theta, lod, t):
    ops, rho = thermal(1.0, t)
    i0 = intensity_numeric(rho, ops, ObservationPoint.from_spacing(theta, lod))
    assert i0 >= 0
    for other in (math.pi - theta, -theta):
        i1 = intensity_numeric(rho, ops, ObservationPoint.from_spacing(other, lod))
        assert i1 == pytest.approx(i0, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(x=st.floats(0, 5))
def test_periodic_in_projected_phase(x):
    ops, rho = thermal(1.0, 0.7)
    a = intensity_numeric(rho, ops, ObservationPoint(math.pi / 2, x))
    b = intensity_numeric(rho, ops, ObservationPoint(math.pi / 2, x + 2 * math.pi))
    assert a == pytest.approx(b, abs=1e-12)


def test_closed_form_infinite_temperature_limit():
    for th in (0.0, 0.3, 1.2):
        obs = ObservationPoint.from_spacing(th, 2.0)
        x = obs.kd * math.sin(th)
        assert intensity_closed_form(1.0, math.inf, obs) == pytest.approx((33 + 4 * math.cos(2 * x)) / 22)


def test_closed_forms_finite_at_zero_angle():
    obs = ObservationPoint(0.0, math.pi)
    assert 0 < intensity_closed_form(1.0, 1.0, obs) < math.inf
    assert math.isfinite(g2_closed_form(1.0, 1.0, obs))


def test_closed_form_intensity_offset_at_low_temperature():
    # near the ground state the published intensity sits exactly 1 above the trace result
    ops, rho = thermal(1.0, 5e-3)
    for th in (0.2, 0.9, math.pi / 2):
        obs = ObservationPoint.from_spacing(th, 2.0)
        assert intensity_closed_form(1.0, 5e-3, obs) == pytest.approx(intensity_numeric(rho, ops, obs) + 1, abs=1e-9)
