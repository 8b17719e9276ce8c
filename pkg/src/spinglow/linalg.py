"""Dense complex linear algebra for small multi-qubit operators.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Multi-qubit
operators use the convention that qubit 0 is the most significant bit of the
computational-basis index, i.e. ``kron(A0, A1, ..., A_{N-1})``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-12
JACOBI_TOL = 1e-14
MAX_JACOBI_SWEEPS = 100


class ShapeError(ValueError):
    """Operand dimensions are inconsistent."""


class ValidationError(ValueError):
    """Input violates a documented precondition."""


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got shape {a.shape}")
    return a


def adjoint(m) -> np.ndarray:
    return as_matrix(m).conj().T


def multiply(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def kron(*factors) -> np.ndarray:
    """Kronecker product of one or more matrices, leftmost factor most significant."""
    if not factors:
        raise ShapeError("kron needs at least one factor")
    return reduce(np.kron, (as_matrix(f) for f in factors))


def commutator(a, b) -> np.ndarray:
    return multiply(a, b) - multiply(b, a)


def hermiticity_error(m) -> float:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        return np.inf
    return float(np.max(np.abs(m - m.conj().T), initial=0.0))


@dataclass(frozen=True)
class EigenSystem:
    """Ascending real eigenvalues with orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(np.abs(off) ** 2)))


def hermitian_eig(m, tol: float = JACOBI_TOL) -> EigenSystem:
    """Diagonalize a Hermitian matrix with cyclic complex Jacobi rotations.

    Each rotation removes the phase of ``a[p, q]`` with a diagonal unitary and
    then zeroes it with a real Givens rotation. Sweeps stop once the
    off-diagonal Frobenius norm falls below ``tol`` times ``max(1, ||m||_F)``.
    Exactly-zero couplings are never rotated, so block structure of the input
    (e.g. conserved excitation number) survives into the eigenvectors.

    Raises
    ------
    ShapeError
        If ``m`` is not square.
    ValidationError
        If ``m`` deviates from Hermitian by more than 1e-12 (max-abs).
    """
    a = as_matrix(m).copy()
    n, k = a.shape
    if n != k:
        raise ShapeError(f"hermitian_eig needs a square matrix, got {a.shape}")
    asym = hermiticity_error(a)
    if asym > HERMITIAN_TOL:
        raise ValidationError(f"matrix is not Hermitian (max asymmetry {asym:.3e})")
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=np.complex128)
    threshold = tol * max(1.0, float(np.linalg.norm(a)))

    sweeps = 0
    while _off_norm(a) > threshold:
        if sweeps >= MAX_JACOBI_SWEEPS:
            raise RuntimeError(f"Jacobi did not converge in {MAX_JACOBI_SWEEPS} sweeps")
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = complex(a[p, q])
                r = abs(apq)
                if r == 0.0:
                    continue
                phase = apq / r
                app, aqq = a[p, p].real, a[q, q].real
                angle = 0.5 * math.atan2(2.0 * r, aqq - app)
                c, s = math.cos(angle), math.sin(angle)
                # J = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                j10 = -s * phase.conjugate()
                j11 = c * phase.conjugate()
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * ap + j10 * aq
                a[:, q] = s * ap + j11 * aq
                ap, aq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * ap + j10.conjugate() * aq
                a[q, :] = s * ap + j11.conjugate() * aq
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp + j10 * vq
                v[:, q] = s * vp + j11 * vq
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real

    evals = np.diag(a).real.copy()
    order = np.argsort(evals, kind="stable")
    return EigenSystem(evals[order], v[:, order], sweeps)


def _check_dims(rho: np.ndarray, dims: Sequence[int]) -> list[int]:
    dims = [int(d) for d in dims]
    if any(d < 1 for d in dims):
        raise ShapeError(f"subsystem dims must be positive, got {dims}")
    total = int(np.prod(dims))
    if rho.shape != (total, total):
        raise ShapeError(f"matrix of shape {rho.shape} inconsistent with dims {dims}")
    return dims


def _as_index_set(idx, n: int) -> list[int]:
    if isinstance(idx, (int, np.integer)):
        idx = [int(idx)]
    out = sorted({int(i) for i in idx})
    if not out:
        raise ValidationError("subsystem index set must be non-empty")
    if out[0] < 0 or out[-1] >= n:
        raise ValidationError(f"subsystem index out of range 0..{n - 1}: {out}")
    return out


def partial_trace(rho, dims: Sequence[int], keep: Iterable[int] | int) -> np.ndarray:
    """Reduced density matrix on the subsystems listed in ``keep`` (kept in ascending order)."""
    rho = as_matrix(rho)
    dims = _check_dims(rho, dims)
    n = len(dims)
    try:
        kept = _as_index_set(keep, n)
    except ValidationError as exc:
        raise ShapeError(str(exc)) from None
    traced = [i for i in range(n) if i not in kept]

    t = rho.reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:n])
    col = list(letters[n : 2 * n])
    for i in traced:
        col[i] = row[i]
    out = [row[i] for i in kept] + [col[i] for i in kept]
    reduced = np.einsum("".join(row) + "".join(col) + "->" + "".join(out), t)
    dk = int(np.prod([dims[i] for i in kept]))
    return reduced.reshape(dk, dk)


def partial_transpose(rho, dims: Sequence[int], subsystem: Iterable[int] | int) -> np.ndarray:
    """Transpose the tensor factors in ``subsystem``, leaving the others untouched."""
    rho = as_matrix(rho)
    dims = _check_dims(rho, dims)
    n = len(dims)
    targets = _as_index_set(subsystem, n)
    t = rho.reshape(dims + dims)
    axes = list(range(2 * n))
    for i in targets:
        axes[i], axes[n + i] = axes[n + i], axes[i]
    total = rho.shape[0]
    return t.transpose(axes).reshape(total, total)
