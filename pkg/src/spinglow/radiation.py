"""Far-field intensity and zero-delay photon correlation from a density matrix.

The field at the detector is E+ = sum_j exp(-i phi_j) S^-_j with phase
phi_j = j * kd * sin(theta) for atom j = 1..N. Expectation values are traces
against the density matrix. The published N=3 closed forms live here as well,
for conformance checks only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import mpmath as mp
import numpy as np

from .linalg import ValidationError
from .model import SpinOperatorSet
from .thermal import _mp_beta

IMAG_TOL = 1e-10
INTENSITY_FLOOR = 1e-12
CLASSIFY_EPS = 1e-9

Classification = Literal["sub", "super", "neutral"]


class ConsistencyError(RuntimeError):
    """A quantity that must be real came out with a sizeable imaginary part."""


class UndefinedCorrelationError(ArithmeticError):
    """g2(0) requested where the intensity is (numerically) zero."""

    def __init__(self, intensity: float):
        super().__init__(f"g2(0) undefined: intensity {intensity:.3e} is below {INTENSITY_FLOOR}")
        self.intensity = intensity


@dataclass(frozen=True)
class ObservationPoint:
    theta: float
    kd: float

    def __post_init__(self):
        if not self.kd >= 0:
            raise ValidationError(f"kd must be non-negative, got {self.kd}")

    @classmethod
    def from_spacing(cls, theta: float, lambda_over_d: float) -> "ObservationPoint":
        if not lambda_over_d > 0:
            raise ValidationError(f"lambda_over_d must be positive, got {lambda_over_d}")
        return cls(float(theta), 2.0 * math.pi / float(lambda_over_d))


@dataclass(frozen=True)
class RadiationSample:
    intensity: float
    g2: float | None
    classification: Classification


def optical_phases(n_atoms: int, obs: ObservationPoint) -> np.ndarray:
    if n_atoms < 1:
        raise ValidationError(f"n_atoms must be >= 1, got {n_atoms}")
    return np.arange(1, n_atoms + 1) * obs.kd * math.sin(obs.theta)


def phase_matrix(n_atoms: int, theta, kd) -> np.ndarray:
    """Phases for many observation points at once, shape ``(points, n_atoms)``."""
    x = np.asarray(kd, dtype=float) * np.sin(np.asarray(theta, dtype=float))
    return np.multiply.outer(np.atleast_1d(x), np.arange(1, n_atoms + 1))


class RadiationMoments:
    """First- and second-order field correlators of one state, reused across detector angles.

    ``first[i, j] = Tr(rho S+_i S-_j)`` and
    ``second[i, j, k, l] = Tr(rho S+_i S+_j S-_k S-_l)``.
    """

    def __init__(self, rho: np.ndarray, ops: SpinOperatorSet, second_order: bool = True):
        rho = np.asarray(rho, dtype=np.complex128)
        if rho.shape != (ops.dim, ops.dim):
            raise ValidationError(f"state of shape {rho.shape} does not match {ops.n_atoms} atoms")
        n = ops.n_atoms
        self.n_atoms = n
        self.dipole = np.array([np.trace(rho @ sp) for sp in ops.s_plus])
        self.first = np.array(
            [[np.trace(rho @ ops.s_plus[i] @ ops.s_minus[j]) for j in range(n)] for i in range(n)]
        )
        self.second = None
        if second_order:
            pairs_plus = [[ops.s_plus[i] @ ops.s_plus[j] for j in range(n)] for i in range(n)]
            pairs_minus = [[ops.s_minus[k] @ ops.s_minus[l] for l in range(n)] for k in range(n)]
            g = np.zeros((n, n, n, n), dtype=np.complex128)
            for i in range(n):
                for j in range(n):
                    left = rho @ pairs_plus[i][j]
                    if not left.any():
                        continue
                    for k in range(n):
                        for l in range(n):
                            g[i, j, k, l] = np.sum(left.T * pairs_minus[k][l])
            self.second = g

    def intensity(self, phases: np.ndarray, check: bool = True) -> np.ndarray:
        u = np.exp(1j * np.atleast_2d(phases))
        val = np.einsum("pi,ij,pj->p", u, self.first, u.conj())
        return _real(val, check)

    def numerator(self, phases: np.ndarray, check: bool = True) -> np.ndarray:
        if self.second is None:
            raise ValueError("second-order moments were not computed")
        u = np.exp(1j * np.atleast_2d(phases))
        ub = u.conj()
        val = np.einsum("pi,pj,ijkl,pk,pl->p", u, u, self.second, ub, ub)
        return _real(val, check)

    def incoherent(self) -> float:
        return float(np.trace(self.first).real)


def _real(val: np.ndarray, check: bool) -> np.ndarray:
    if check:
        imag = float(np.max(np.abs(val.imag), initial=0.0))
        if imag > IMAG_TOL:
            raise ConsistencyError(f"imaginary residual {imag:.3e} in a Hermitian expectation value")
    return val.real


def _clamp(value: float) -> float:
    if value < -INTENSITY_FLOOR:
        raise ConsistencyError(f"negative intensity {value:.3e} from a positive operator")
    return max(value, 0.0)


def intensity_numeric(rho, ops: SpinOperatorSet, obs: ObservationPoint) -> float:
    """<E- E+> = sum_ij <S+_i S-_j> exp(i(phi_i - phi_j))."""
    m = RadiationMoments(rho, ops, second_order=False)
    return _clamp(float(m.intensity(optical_phases(ops.n_atoms, obs))[0]))


def g2_numeric(rho, ops: SpinOperatorSet, obs: ObservationPoint) -> float:
    """<E- E- E+ E+> / <E- E+>^2; raises ``UndefinedCorrelationError`` at zero intensity."""
    m = RadiationMoments(rho, ops)
    phases = optical_phases(ops.n_atoms, obs)
    intensity = _clamp(float(m.intensity(phases)[0]))
    if intensity <= INTENSITY_FLOOR:
        raise UndefinedCorrelationError(intensity)
    return max(float(m.numerator(phases)[0]), 0.0) / intensity**2


@dataclass(frozen=True)
class IntensityTerms:
    """Intensity decomposed term by term; the fields sum to the total."""

    incoherent: float
    dipole: float
    correlation: float

    @property
    def total(self) -> float:
        return self.incoherent + self.dipole + self.correlation


def intensity_terms(rho, ops: SpinOperatorSet, obs: ObservationPoint) -> IntensityTerms:
    m = RadiationMoments(rho, ops, second_order=False)
    phases = optical_phases(ops.n_atoms, obs)
    u = np.exp(1j * phases)
    off = ~np.eye(ops.n_atoms, dtype=bool)
    outer_dipole = np.outer(m.dipole, m.dipole.conj())
    weights = np.outer(u, u.conj())
    dipole = np.sum((outer_dipole * weights)[off])
    corr = np.sum(((m.first - outer_dipole) * weights)[off])
    return IntensityTerms(m.incoherent(), float(dipole.real), float(corr.real))


def classify(intensity: float, rho, ops: SpinOperatorSet, eps: float = CLASSIFY_EPS) -> Classification:
    """Compare with the incoherent reference sum_i <S+_i S-_i>."""
    ref = RadiationMoments(rho, ops, second_order=False).incoherent()
    if intensity > ref * (1 + eps):
        return "super"
    if intensity < ref * (1 - eps):
        return "sub"
    return "neutral"


def radiation_sample(rho, ops: SpinOperatorSet, obs: ObservationPoint) -> RadiationSample:
    intensity = intensity_numeric(rho, ops, obs)
    try:
        g2 = g2_numeric(rho, ops, obs)
    except UndefinedCorrelationError:
        g2 = None
    return RadiationSample(intensity, g2, classify(intensity, rho, ops))


# --- published N=3 closed forms -----------------------------------------------------


def _closed_form_parts(omega_over_Omega: float, temperature: float, obs: ObservationPoint):
    b = _mp_beta(temperature)
    w = mp.mpf(omega_over_Omega)
    x = mp.mpf(obs.kd) * mp.sin(mp.mpf(obs.theta))
    s = mp.sqrt(2) * b
    denom = 2 * (1 + 2 * mp.cosh(b * w) + 8 * mp.cosh(s))
    return b, w, x, s, denom


def intensity_closed_form_terms(omega_over_Omega: float, temperature: float, obs: ObservationPoint):
    """The A, B, C, D factors of the published intensity, I = A (B + C + D).

    C is read as 4 (2 + cos 2x + e^{beta w}(4 + cos 2x)) cosh(sqrt2 beta): the
    printed bracket closes after the exponential term, which would put the
    temperature factor inside the cosine argument.
    """
    b, w, x, s, denom = _closed_form_parts(omega_over_Omega, temperature, obs)
    a_term = mp.exp(-b * w / 2) * mp.sech(b * w / 2) / denom
    c2x = mp.cos(2 * x)
    b_term = 3 * mp.exp(2 * b * w) - 2 * mp.exp(b * w) * (-2 + c2x)
    c_term = 4 * (2 + c2x + mp.exp(b * w) * (4 + c2x)) * mp.cosh(s)
    d_term = 4 * mp.sin(x) ** 2 - 8 * mp.sqrt(2) * (1 + mp.exp(b * w)) * mp.cos(x) * mp.sinh(s)
    return a_term, b_term, c_term, d_term


def intensity_closed_form(omega_over_Omega: float, temperature: float, obs: ObservationPoint) -> float:
    a, b, c, d = intensity_closed_form_terms(omega_over_Omega, temperature, obs)
    return float(a * (b + c + d))


def g2_closed_form_terms(omega_over_Omega: float, temperature: float, obs: ObservationPoint):
    """N1, N2, N3 of the published numerator, evaluated as printed.

    N1 contains exp(2 kd sin(theta) + ...), a real exponential of the optical
    phase; it is kept verbatim so the conformance diff shows its effect.
    """
    b, w, x, s, denom = _closed_form_parts(omega_over_Omega, temperature, obs)
    n1 = mp.exp(2 * x + b * (w - mp.sqrt(2)) / 2) * mp.sech(b * w / 2) / denom
    n2 = -4 * mp.sqrt(2) * (-1 + mp.exp(2 * s)) * mp.cos(x) + 2 * (2 + mp.cos(2 * x))
    n3 = mp.exp(2 * s) * (4 + 3 * mp.exp(2 * b * w) + 2 * mp.cos(2 * x)) + 4 * mp.exp(s) * mp.sin(x) ** 2
    return n1, n2, n3


def g2_closed_form(omega_over_Omega: float, temperature: float, obs: ObservationPoint) -> float:
    n1, n2, n3 = g2_closed_form_terms(omega_over_Omega, temperature, obs)
    a, b, c, d = intensity_closed_form_terms(omega_over_Omega, temperature, obs)
    return float(n1 * (n2 + n3) / (a * (b + c + d)) ** 2)
