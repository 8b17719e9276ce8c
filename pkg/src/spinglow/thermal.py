"""Gibbs states built from an eigensystem, plus a diff against the published closed forms."""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from .linalg import EigenSystem, ValidationError
from .model import SystemConfig, diagonalize

GROUND_DEGENERACY_TOL = 1e-9


@dataclass(frozen=True)
class ThermalState:
    """Normalized density matrix at inverse temperature ``beta``.

    ``z_numeric`` is Tr exp(-beta H) and overflows to ``inf`` at very low
    temperature; ``log_z`` stays finite.
    """

    rho: np.ndarray
    beta: float
    z_numeric: float
    log_z: float
    populations: np.ndarray


def inverse_temperature(temperature: float) -> float:
    t = float(temperature)
    if not t > 0:
        raise ValidationError(f"temperature must be positive, got {temperature!r}")
    return 0.0 if math.isinf(t) else 1.0 / t


def thermal_state(eig: EigenSystem, temperature: float) -> ThermalState:
    """rho = sum_i exp(-beta e_i)|psi_i><psi_i| / Z with energies shifted by the minimum.

    ``temperature`` is k_B T in units of the coupling; ``math.inf`` gives the
    maximally mixed state. Degenerate levels receive identical weights, so the
    result does not depend on which basis the eigensolver picked inside a
    degenerate cluster.
    """
    beta = inverse_temperature(temperature)
    e = eig.eigenvalues
    e_min = float(e[0])
    weights = np.exp(-beta * (e - e_min))
    total = float(weights.sum())
    p = weights / total
    v = eig.eigenvectors
    rho = (v * p) @ v.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    log_z = math.log(total) - beta * e_min
    try:
        z = math.exp(log_z)
    except OverflowError:
        z = math.inf
    return ThermalState(rho, beta, z, log_z, p)


def ground_state(eig: EigenSystem, tol: float = GROUND_DEGENERACY_TOL) -> np.ndarray:
    """Zero-temperature limit: equal mixture over the lowest (possibly degenerate) level."""
    e = eig.eigenvalues
    mask = e <= e[0] + tol
    v = eig.eigenvectors[:, mask]
    return v @ v.conj().T / mask.sum()


def thermal_state_for(cfg: SystemConfig, temperature: float) -> ThermalState:
    _, _, eig = diagonalize(cfg)
    return thermal_state(eig, temperature)


def von_neumann_entropy_bits(rho: np.ndarray) -> float:
    p = np.linalg.eigvalsh(rho)
    p = p[p > 1e-300]
    return float(-np.sum(p * np.log2(p)))


# --- published closed forms for three atoms in a line ------------------------------


def _mp_beta(temperature: float):
    t = float(temperature)
    if not t > 0:
        raise ValidationError(f"temperature must be positive, got {temperature!r}")
    return mp.mpf(0) if math.isinf(t) else 1 / mp.mpf(t)


def published_partition_function(omega_over_Omega: float, temperature: float):
    """Published closed-form Z, as an ``mpmath`` number (it overflows doubles at low T)."""
    b = _mp_beta(temperature)
    a = b * mp.mpf(omega_over_Omega) / 2
    s = mp.sqrt(2) * b
    return 2 * mp.cosh(a) * (1 + 8 * mp.cosh(s) + 2 * mp.cosh(2 * a))


def published_density_elements(omega_over_Omega: float, temperature: float) -> mp.matrix:
    """Unnormalized published density-matrix elements on the 8x8 grid (0-based indices)."""
    b = _mp_beta(temperature)
    a = b * mp.mpf(omega_over_Omega) / 2
    s = mp.sqrt(2) * b
    ch, sh = mp.cosh(s), mp.sinh(s)
    r2 = mp.sqrt(2)
    m = mp.matrix(8, 8)
    m[0, 0] = mp.exp(-3 * a)
    m[7, 7] = mp.exp(3 * a)
    for sign, (i, j, k) in ((-1, (1, 2, 4)), (+1, (3, 5, 6))):
        pref = mp.exp(sign * a)
        m[i, i] = pref * (1 + 2 * ch)
        m[j, j] = 4 * pref * ch
        m[k, k] = pref * (1 + 2 * ch)
        m[i, j] = m[j, i] = -2 * r2 * pref * sh
        m[j, k] = m[k, j] = -2 * r2 * pref * sh
        m[i, k] = m[k, i] = pref * (-1 + 2 * ch)
    return m


@dataclass(frozen=True)
class DensityConformance:
    omega_over_Omega: float
    temperature: float
    z_paper: float
    z_numeric: float
    z_ratio: float
    element_deviation: np.ndarray
    max_abs_deviation: float
    published_trace_over_z: float
    reconstruction_residual: float

    def to_dict(self) -> dict:
        return {
            "omega_over_Omega": self.omega_over_Omega,
            "temperature": self.temperature,
            "z_paper": self.z_paper,
            "z_numeric": self.z_numeric,
            "z_ratio_paper_over_numeric": self.z_ratio,
            "max_abs_element_deviation": self.max_abs_deviation,
            "element_deviation": self.element_deviation.tolist(),
            "published_trace_over_z_paper": self.published_trace_over_z,
            "numeric_reconstruction_residual": self.reconstruction_residual,
        }


def published_density_conformance(omega_over_Omega: float, temperature: float) -> DensityConformance:
    """Diff the published Z and density elements against the eigendecomposition Gibbs state.

    Both matrices are normalized to unit trace before the element-wise diff,
    so the element table isolates shape differences from the Z mismatch.
    """
    cfg = SystemConfig.line(3, omega_over_Omega)
    _, _, eig = diagonalize(cfg)
    state = thermal_state(eig, temperature)

    z_p = published_partition_function(omega_over_Omega, temperature)
    elems = published_density_elements(omega_over_Omega, temperature)
    trace_p = mp.fsum(elems[i, i] for i in range(8))
    published_rho = np.array([[float(elems[i, j] / trace_p) for j in range(8)] for i in range(8)])
    deviation = np.abs(published_rho - state.rho)

    v, p = eig.eigenvectors, state.populations
    recon = np.abs((v * p) @ v.conj().T - state.rho).max()

    ratio = float(mp.exp(mp.log(z_p) - state.log_z))
    return DensityConformance(
        omega_over_Omega=float(omega_over_Omega),
        temperature=float(temperature),
        z_paper=float(z_p),
        z_numeric=state.z_numeric,
        z_ratio=ratio,
        element_deviation=deviation,
        max_abs_deviation=float(deviation.max()),
        published_trace_over_z=float(trace_p / z_p),
        reconstruction_residual=float(recon),
    )
