"""Dipole-coupled spin Hamiltonian and the closed-form spectrum of three atoms in a line.

Single-atom basis: index 0 is the excited state ``|e>``, index 1 the ground
state ``|g>``. Atoms are numbered from 0 in the Python API and atom 0 is the
most significant bit of the basis index, so ``|e g g>`` is index 3 (0b011) and
``|g g g>`` is the last index. Units: hbar = 1, energies in units of the
nearest-neighbour coupling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .linalg import EigenSystem, ValidationError, hermitian_eig, kron

MAX_ATOMS = 5
SQRT2 = math.sqrt(2.0)

SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=np.complex128)  # |e><g|
SIGMA_MINUS = SIGMA_PLUS.T.copy()
SZ = np.diag([0.5, -0.5]).astype(np.complex128)
ID2 = np.eye(2, dtype=np.complex128)


class UnsupportedConfigurationError(ValueError):
    """A closed-form result was requested for a configuration it does not cover."""


@dataclass(frozen=True)
class SystemConfig:
    """Chain geometry and transition frequencies, in units of the coupling.

    ``omega`` holds one transition frequency per atom. ``lambda_over_d`` is the
    emission wavelength over the spacing; it only enters the optical phases.
    """

    n_atoms: int
    omega: tuple[float, ...]
    coupling: np.ndarray = field(repr=False)
    lambda_over_d: float = 2.0
    equal_spacing: bool = True

    def __post_init__(self):
        n = self.n_atoms
        if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_ATOMS:
            raise ValidationError(f"n_atoms must be an integer in [1, {MAX_ATOMS}], got {n!r}")
        omega = np.atleast_1d(np.asarray(self.omega, dtype=float))
        if omega.size == 1:
            omega = np.repeat(omega, n)
        if omega.shape != (n,) or not np.all(np.isfinite(omega)):
            raise ValidationError(f"omega must be a scalar or {n} finite values")
        object.__setattr__(self, "omega", tuple(float(w) for w in omega))

        c = np.asarray(self.coupling, dtype=float)
        if c.shape != (n, n):
            raise ValidationError(f"coupling must be {n}x{n}, got {c.shape}")
        if not np.allclose(c, c.T, atol=0, rtol=0) or np.any(np.diag(c) != 0) or np.any(c < 0):
            raise ValidationError("coupling must be symmetric, non-negative, with zero diagonal")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coupling", c)
        if not self.lambda_over_d > 0:
            raise ValidationError(f"lambda_over_d must be positive, got {self.lambda_over_d}")

    @classmethod
    def line(cls, n_atoms: int, omega: float | Sequence[float], lambda_over_d: float = 2.0):
        """Equally spaced chain with unit nearest-neighbour coupling and nothing beyond."""
        if not isinstance(n_atoms, (int, np.integer)) or not 1 <= n_atoms <= MAX_ATOMS:
            raise ValidationError(f"n_atoms must be an integer in [1, {MAX_ATOMS}], got {n_atoms!r}")
        c = np.zeros((n_atoms, n_atoms))
        for i in range(n_atoms - 1):
            c[i, i + 1] = c[i + 1, i] = 1.0
        return cls(n_atoms, omega, c, lambda_over_d)

    @property
    def dim(self) -> int:
        return 2**self.n_atoms


@dataclass(frozen=True)
class SpinOperatorSet:
    """Per-atom ladder and S^z operators embedded in the full space."""

    s_plus: tuple[np.ndarray, ...]
    s_minus: tuple[np.ndarray, ...]
    s_z: tuple[np.ndarray, ...]

    @property
    def n_atoms(self) -> int:
        return len(self.s_plus)

    @property
    def dim(self) -> int:
        return self.s_plus[0].shape[0]

    def total_sz(self) -> np.ndarray:
        return sum(self.s_z)


def embed(op: np.ndarray, site: int, n_atoms: int) -> np.ndarray:
    factors = [ID2] * n_atoms
    factors[site] = op
    return kron(*factors)


def build_spin_operators(n_atoms: int) -> SpinOperatorSet:
    if not isinstance(n_atoms, (int, np.integer)) or not 1 <= n_atoms <= MAX_ATOMS:
        raise ValidationError(f"n_atoms must be an integer in [1, {MAX_ATOMS}], got {n_atoms!r}")
    sp = tuple(embed(SIGMA_PLUS, i, n_atoms) for i in range(n_atoms))
    sm = tuple(embed(SIGMA_MINUS, i, n_atoms) for i in range(n_atoms))
    sz = tuple(embed(SZ, i, n_atoms) for i in range(n_atoms))
    for arr in sp + sm + sz:
        arr.setflags(write=False)
    return SpinOperatorSet(sp, sm, sz)


def build_hamiltonian(cfg: SystemConfig, ops: SpinOperatorSet | None = None) -> np.ndarray:
    """H = sum_i omega_i S^z_i + sum_{i != j} Omega_ij S^+_i S^-_j (hbar = 1)."""
    if ops is None:
        ops = build_spin_operators(cfg.n_atoms)
    if ops.n_atoms != cfg.n_atoms:
        raise ValidationError(f"operator set is for {ops.n_atoms} atoms, config has {cfg.n_atoms}")
    h = np.zeros((cfg.dim, cfg.dim), dtype=np.complex128)
    for i in range(cfg.n_atoms):
        h += cfg.omega[i] * ops.s_z[i]
        for j in range(cfg.n_atoms):
            if i != j and cfg.coupling[i, j] != 0:
                h += cfg.coupling[i, j] * (ops.s_plus[i] @ ops.s_minus[j])
    return h


def diagonalize(cfg: SystemConfig) -> tuple[SpinOperatorSet, np.ndarray, EigenSystem]:
    ops = build_spin_operators(cfg.n_atoms)
    h = build_hamiltonian(cfg, ops)
    return ops, h, hermitian_eig(h)


# --- closed-form three-atom line -------------------------------------------------


def basis_state(label: str) -> np.ndarray:
    """Computational basis ket from a string such as ``"egg"`` (atom 0 first)."""
    index = 0
    for ch in label:
        if ch not in "eg":
            raise ValueError(f"basis label must use 'e'/'g', got {label!r}")
        index = 2 * index + (1 if ch == "g" else 0)
    ket = np.zeros(2 ** len(label), dtype=np.complex128)
    ket[index] = 1.0
    return ket


def _ket(terms: dict[str, float]) -> np.ndarray:
    return sum(amp * basis_state(lbl) for lbl, amp in terms.items())


@dataclass(frozen=True)
class AnalyticSpectrum:
    """Closed-form energies and eigenstates, in the labelled order psi_1..psi_8.

    ``states`` holds the kets as columns; ``labels`` spells each as a
    superposition of basis states.
    """

    omega_over_Omega: float
    energies: np.ndarray
    states: np.ndarray
    labels: tuple[str, ...]

    def ground_index(self) -> int:
        return int(np.argmin(self.energies))


def analytic_line_spectrum(omega_over_Omega: float, n_atoms: int = 3) -> AnalyticSpectrum:
    if n_atoms != 3:
        raise UnsupportedConfigurationError(
            f"closed-form spectrum exists only for three atoms in a line, not N={n_atoms}"
        )
    w = float(omega_over_Omega)
    energies = np.array(
        [
            -1.5 * w,
            -SQRT2 - 0.5 * w,
            -0.5 * w,
            SQRT2 - 0.5 * w,
            -SQRT2 + 0.5 * w,
            0.5 * w,
            SQRT2 + 0.5 * w,
            1.5 * w,
        ]
    )
    h, r = 0.5, 1.0 / SQRT2
    kets = [
        ({"ggg": 1.0}, "|ggg>"),
        ({"egg": h, "geg": -h * SQRT2, "gge": h}, "(|egg> - sqrt2|geg> + |gge>)/2"),
        ({"gge": r, "egg": -r}, "(|gge> - |egg>)/sqrt2"),
        ({"egg": h, "geg": h * SQRT2, "gge": h}, "(|egg> + sqrt2|geg> + |gge>)/2"),
        ({"eeg": h, "ege": -h * SQRT2, "gee": h}, "(|eeg> - sqrt2|ege> + |gee>)/2"),
        ({"gee": r, "eeg": -r}, "(|gee> - |eeg>)/sqrt2"),
        ({"eeg": h, "ege": h * SQRT2, "gee": h}, "(|eeg> + sqrt2|ege> + |gee>)/2"),
        ({"eee": 1.0}, "|eee>"),
    ]
    states = np.column_stack([_ket(t) for t, _ in kets])
    return AnalyticSpectrum(w, energies, states, tuple(lbl for _, lbl in kets))


def ground_state_crossover(lo: float = 0.1, hi: float = 10.0, tol: float = 1e-13) -> float:
    """omega/Omega at which |ggg> and psi_2 exchange the role of ground state.

    Bisection on the sign of eps_1 - eps_2 taken from the closed-form spectrum.
    """

    def gap(w: float) -> float:
        e = analytic_line_spectrum(w).energies
        return e[0] - e[1]

    g_lo, g_hi = gap(lo), gap(hi)
    if g_lo * g_hi > 0:
        raise ValueError(f"no level crossing bracketed in [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        g_mid = gap(mid)
        if g_mid == 0:
            return mid
        if (g_mid > 0) == (g_lo > 0):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
