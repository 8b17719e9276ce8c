import math

import numpy as np
import pytest

from spinglow.linalg import ValidationError
from spinglow.model import (
    SystemConfig,
    UnsupportedConfigurationError,
    analytic_line_spectrum,
    basis_state,
    build_hamiltonian,
    build_spin_operators,
    diagonalize,
    ground_state_crossover,
)


def test_single_atom_hamiltonian():
    h = build_hamiltonian(SystemConfig.line(1, 2.0))
    np.testing.assert_allclose(h, np.diag([1.0, -1.0]))


def test_two_atom_exchange_elements():
    h = build_hamiltonian(SystemConfig.line(2, 0.0))
    eg, ge = 1, 2
    assert h[eg, ge] == 1 and h[ge, eg] == 1
    np.testing.assert_allclose(np.linalg.eigvalsh(h), [-1, 0, 0, 1])


def test_basis_labels():
    assert np.argmax(basis_state("ggg")) == 7
    assert np.argmax(basis_state("egg")) == 3
    assert np.argmax(basis_state("eee")) == 0


def test_spin_algebra():
    ops = build_spin_operators(3)
    for sp, sm, sz in zip(ops.s_plus, ops.s_minus, ops.s_z):
        np.testing.assert_allclose(sp @ sm - sm @ sp, 2 * sz)
        np.testing.assert_allclose(sz @ sp - sp @ sz, sp)


def test_hamiltonian_conserves_excitation_number():
    cfg = SystemConfig.line(4, 1.3)
    ops = build_spin_operators(4)
    h = build_hamiltonian(cfg, ops)
    sz = ops.total_sz()
    np.testing.assert_allclose(h @ sz - sz @ h, 0, atol=1e-14)


@pytest.mark.parametrize("w", [0.0, 0.3, 1.0, math.sqrt(2), 2.0, 7.5])
def test_numeric_spectrum_matches_closed_form(w):
    _, _, eig = diagonalize(SystemConfig.line(3, w))
    analytic = np.sort(analytic_line_spectrum(w).energies)
    np.testing.assert_allclose(eig.eigenvalues, analytic, atol=1e-10)


def test_omega_two_extreme_levels():
    _, _, eig = diagonalize(SystemConfig.line(3, 2.0))
    assert eig.eigenvalues[0] == pytest.approx(-3.0, abs=1e-12)
    assert eig.eigenvalues[-1] == pytest.approx(3.0, abs=1e-12)


@pytest.mark.parametrize("w", [0.5, 1.7])
def test_closed_form_states_are_eigenvectors(w):
    cfg = SystemConfig.line(3, w)
    h = build_hamiltonian(cfg)
    spec = analytic_line_spectrum(w)
    for k in range(8):
        psi = spec.states[:, k]
        assert np.linalg.norm(psi) == pytest.approx(1.0)
        np.testing.assert_allclose(h @ psi, spec.energies[k] * psi, atol=1e-12)


def test_ground_state_switches_at_crossover():
    assert analytic_line_spectrum(1.0).ground_index() == 1
    assert analytic_line_spectrum(2.0).ground_index() == 0
    assert abs(ground_state_crossover() - math.sqrt(2)) < 1e-10


def test_closed_form_requires_three_atoms():
    with pytest.raises(UnsupportedConfigurationError):
        analytic_line_spectrum(1.0, n_atoms=4)


@pytest.mark.parametrize("n", [0, 6])
def test_atom_count_range(n):
    with pytest.raises(ValidationError):
        SystemConfig.line(n, 1.0)


def test_coupling_validation():
    with pytest.raises(ValidationError):
        SystemConfig(2, 1.0, np.array([[0, 1], [2, 0]]))
    with pytest.raises(ValidationError):
        SystemConfig(2, 1.0, np.array([[0, 1], [1, 0]]), lambda_over_d=0)


def test_five_atom_diagonalization_matches_numpy():
    cfg = SystemConfig.line(5, 0.8)
    _, h, eig = diagonalize(cfg)
    np.testing.assert_allclose(eig.eigenvalues, np.linalg.eigvalsh(h), atol=1e-11)


def test_mirror_symmetric_spectrum():
    # reversing the chain permutes the basis but leaves the spectrum unchanged
    cfg = SystemConfig(3, (0.5, 1.0, 2.0), SystemConfig.line(3, 0).coupling)
    rev = SystemConfig(3, (2.0, 1.0, 0.5), SystemConfig.line(3, 0).coupling)
    np.testing.assert_allclose(diagonalize(cfg)[2].eigenvalues, diagonalize(rev)[2].eigenvalues, atol=1e-12)
