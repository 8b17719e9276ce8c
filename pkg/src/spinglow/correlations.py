"""Entanglement and discord measures for two- and three-qubit density matrices.

Entropies are in bits. Qubit 0 is the most significant tensor factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .linalg import ValidationError, as_matrix, partial_trace, partial_transpose
from .model import SystemConfig, diagonalize
from .thermal import thermal_state

PHYSICAL_TOL = 1e-10
DISCORD_GRID = (24, 48)
DISCORD_TOL = 1e-8
DISCORD_MAX_EVALS = 500

_SY = np.array([[0, -1j], [1j, 0]])
_SYSY = np.kron(_SY, _SY)


class DiscordConvergenceError(RuntimeError):
    def __init__(self, best: float, evaluations: int):
        super().__init__(f"discord refinement did not converge after {evaluations} evaluations "
                         f"(best value {best:.6g})")
        self.best = best
        self.evaluations = evaluations


def validate_density(rho, dim: int | None = None, tol: float = PHYSICAL_TOL) -> np.ndarray:
    rho = as_matrix(rho)
    if rho.shape[0] != rho.shape[1] or (dim is not None and rho.shape[0] != dim):
        raise ValidationError(f"expected a {dim or 'square'} density matrix, got {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise ValidationError("density matrix is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1) > tol:
        raise ValidationError(f"density matrix has trace {tr:.12g}")
    lo = np.linalg.eigvalsh(rho)[0]
    if lo < -tol:
        raise ValidationError(f"density matrix has negative eigenvalue {lo:.3e}")
    return 0.5 * (rho + rho.conj().T)


def _entropy_of_spectrum(p: np.ndarray) -> float:
    p = p[p > 1e-300]
    return float(-np.sum(p * np.log2(p)))


def von_neumann_entropy(rho) -> float:
    rho = validate_density(rho)
    return _entropy_of_spectrum(np.clip(np.linalg.eigvalsh(rho), 0.0, None))


def concurrence(rho2) -> float:
    """Wootters concurrence from the spectrum of sqrt(rho) rho~ sqrt(rho)."""
    rho = validate_density(rho2, 4)
    w, v = np.linalg.eigh(rho)
    sqrt_rho = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    flipped = _SYSY @ rho.conj() @ _SYSY
    r = sqrt_rho @ flipped @ sqrt_rho
    lam = np.sqrt(np.clip(np.linalg.eigvalsh(0.5 * (r + r.conj().T)), 0.0, None))[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def negativity(rho, dims, subsystem) -> float:
    """(||rho^{T_S}||_1 - 1) / 2, i.e. the sum of |negative eigenvalues| of the partial transpose."""
    rho = validate_density(rho)
    pt = partial_transpose(rho, dims, subsystem)
    ev = np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))
    return float(max(0.0, (np.sum(np.abs(ev)) - 1.0) / 2.0))


def monogamy_score(rho3, focus: int = 0) -> float:
    """tau = N^2(focus : rest) - sum over the two partners of N^2(focus : partner)."""
    rho = validate_density(rho3, 8)
    if focus not in (0, 1, 2):
        raise ValidationError(f"focus must be 0, 1 or 2, got {focus}")
    others = [i for i in range(3) if i != focus]
    total = negativity(rho, [2, 2, 2], focus) ** 2
    for j in others:
        pair = partial_trace(rho, [2, 2, 2], sorted([focus, j]))
        total -= negativity(pair, [2, 2], 0 if focus < j else 1) ** 2
    return float(total)


# --- discord -------------------------------------------------------------------------


def _bloch_directions(theta, phi) -> np.ndarray:
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


def _binary_part(a: np.ndarray, b: np.ndarray, trace: np.ndarray) -> np.ndarray:
    """sum_k -lam_k log2(lam_k / trace) for the eigenvalues of [[a, b], [b*, d]] with a + d = trace."""
    d = trace - a
    gap = np.sqrt((a - d) ** 2 + 4 * np.abs(b) ** 2)
    out = np.zeros_like(trace)
    for lam in (0.5 * (trace + gap), 0.5 * (trace - gap)):
        ok = (lam > 1e-300) & (trace > 1e-300)
        safe_lam = np.where(ok, lam, 1.0)
        safe_tr = np.where(ok, trace, 1.0)
        out -= np.where(ok, lam * np.log2(safe_lam / safe_tr), 0.0)
    return out


def conditional_entropy(rho2, directions, measured_side: str = "A") -> np.ndarray:
    """Average entropy of the unmeasured qubit after a projective measurement.

    ``directions`` has shape ``(..., 3)``: unit Bloch vectors n defining the
    measurement {(I + n.sigma)/2, (I - n.sigma)/2}. The function is even in n.
    """
    rho = np.asarray(rho2, dtype=np.complex128).reshape(2, 2, 2, 2)
    if measured_side == "B":
        rho = rho.transpose(1, 0, 3, 2)
    elif measured_side != "A":
        raise ValidationError(f"measured_side must be 'A' or 'B', got {measured_side!r}")
    n = np.asarray(directions, dtype=float)
    # block[a, a'] is the 2x2 operator on the other qubit
    blocks = np.einsum("abcd->acbd", rho)  # blocks[a, a'][b, b']
    proj_coeff_identity = 0.5 * (blocks[0, 0] + blocks[1, 1])
    # Tr_A[(M (x) I) rho] = sum_{a,a'} M[a, a'] blocks[a', a]
    sx = blocks[0, 1] + blocks[1, 0]
    sy = 1j * (blocks[0, 1] - blocks[1, 0])
    sz = blocks[0, 0] - blocks[1, 1]
    total = 0.0
    for sign in (1.0, -1.0):
        m = proj_coeff_identity + 0.5 * sign * (
            n[..., 0, None, None] * sx + n[..., 1, None, None] * sy + n[..., 2, None, None] * sz
        )
        a = m[..., 0, 0].real
        b = m[..., 0, 1]
        p = (m[..., 0, 0] + m[..., 1, 1]).real
        total = total + _binary_part(a, b, p)
    return total


def _tangent_frame(n0: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    helper = np.array([1.0, 0.0, 0.0]) if abs(n0[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(n0, helper)
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(n0, e1)


@dataclass(frozen=True)
class DiscordResult:
    discord: float
    direction: np.ndarray
    conditional_entropy: float
    evaluations: int


def discord_details(
    rho2,
    measured_side: str = "A",
    grid: tuple[int, int] = DISCORD_GRID,
    tol: float = DISCORD_TOL,
    max_evals: int = DISCORD_MAX_EVALS,
) -> DiscordResult:
    """Discord with the measurement optimized by a Bloch-sphere grid then Nelder-Mead.

    The local search runs in a tangent-plane chart centred on the best grid
    direction, which avoids the coordinate singularity at the poles.
    """
    rho = validate_density(rho2, 4)
    keep = 0 if measured_side == "A" else 1
    s_measured = von_neumann_entropy(partial_trace(rho, [2, 2], keep))
    s_joint = von_neumann_entropy(rho)

    n_theta, n_phi = grid
    theta = (np.arange(n_theta) + 0.5) * (math.pi / n_theta)
    phi = np.arange(n_phi) * (2 * math.pi / n_phi)
    dirs = _bloch_directions(*np.meshgrid(theta, phi, indexing="ij"))
    values = conditional_entropy(rho, dirs, measured_side)
    i, j = np.unravel_index(np.argmin(values), values.shape)
    n0 = dirs[i, j]
    e1, e2 = _tangent_frame(n0)

    def chart(uv):
        n = n0 + uv[0] * e1 + uv[1] * e2
        return n / np.linalg.norm(n)

    def objective(uv):
        return float(conditional_entropy(rho, chart(uv), measured_side))

    step = math.pi / n_theta
    simplex = np.array([[0.0, 0.0], [step, 0.0], [0.0, step]])
    res = minimize(
        objective,
        np.zeros(2),
        method="Nelder-Mead",
        options={"xatol": tol, "fatol": tol, "maxfev": max_evals, "initial_simplex": simplex},
    )
    best = min(float(res.fun), float(values[i, j]))
    if not res.success:
        raise DiscordConvergenceError(best + s_measured - s_joint, int(res.nfev))
    direction = chart(res.x) if res.fun <= values[i, j] else n0
    d = s_measured - s_joint + best
    return DiscordResult(max(d, 0.0) if d > -1e-12 else d, direction, best, int(res.nfev) + values.size)


def quantum_discord(rho2, measured_side: str = "A") -> float:
    return discord_details(rho2, measured_side).discord


# --- thermal report --------------------------------------------------------------------


@dataclass(frozen=True)
class QCReport:
    """Correlation measures for one state; two-qubit values refer to ``pair``.

    Negativities and the monogamy score are ``None`` for two-atom systems,
    where only the 1:2 split exists.
    """

    concurrence: float
    discord: float
    negativity_1_23: float | None
    negativity_1_2: float
    negativity_1_3: float | None
    monogamy_score: float | None
    pair: tuple[int, int]
    measured_side: str = "A"

    def to_dict(self) -> dict:
        return {
            "concurrence": self.concurrence,
            "discord": self.discord,
            "negativity_1_23": self.negativity_1_23,
            "negativity_1_2": self.negativity_1_2,
            "negativity_1_3": self.negativity_1_3,
            "monogamy_score": self.monogamy_score,
            "pair": list(self.pair),
            "measured_side": self.measured_side,
        }


def qc_report(rho, n_atoms: int, pair: tuple[int, int] = (0, 1), measured_side: str = "A") -> QCReport:
    if n_atoms == 2:
        rho2 = validate_density(rho, 4)
        n12 = negativity(rho2, [2, 2], 0)
        return QCReport(concurrence(rho2), quantum_discord(rho2, measured_side), None, n12, None,
                        None, (0, 1), measured_side)
    if n_atoms != 3:
        raise ValidationError(f"correlation report supports 2 or 3 atoms, got {n_atoms}")
    rho = validate_density(rho, 8)
    pair = tuple(sorted(pair))
    if len(set(pair)) != 2 or not set(pair) <= {0, 1, 2}:
        raise ValidationError(f"pair must name two distinct atoms in 0..2, got {pair}")
    rho2 = partial_trace(rho, [2, 2, 2], pair)
    n1_23 = negativity(rho, [2, 2, 2], 0)
    n1_2 = negativity(partial_trace(rho, [2, 2, 2], [0, 1]), [2, 2], 0)
    n1_3 = negativity(partial_trace(rho, [2, 2, 2], [0, 2]), [2, 2], 0)
    return QCReport(
        concurrence=concurrence(rho2),
        discord=quantum_discord(rho2, measured_side),
        negativity_1_23=n1_23,
        negativity_1_2=n1_2,
        negativity_1_3=n1_3,
        monogamy_score=n1_23**2 - n1_2**2 - n1_3**2,
        pair=pair,
        measured_side=measured_side,
    )


def thermal_qc_report(cfg: SystemConfig, temperature: float, pair: tuple[int, int] = (0, 1),
                      measured_side: str = "A") -> QCReport:
    _, _, eig = diagonalize(cfg)
    state = thermal_state(eig, temperature)
    return qc_report(state.rho, cfg.n_atoms, pair, measured_side)
