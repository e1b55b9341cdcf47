"""Dense complex linear algebra on square numpy arrays.

Matrices are plain ``numpy.ndarray`` of shape (n, n), complex128.  The
Hermitian eigensolver is a cyclic Jacobi iteration (round-robin parallel
ordering, rotations applied as vectorized row/column updates), driven to an
off-diagonal Frobenius mass of 1e-14 times the input Frobenius norm.  All
derived quantities (operator norm, Schatten norms, singular values, unitary
exponentials) are routed through that one solver.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

MAX_EIG_DIM = 2048
JACOBI_SWEEP_CAP = 100
OFFDIAG_TARGET = 1e-14
HERMITICITY_RTOL = 1e-12


class MatrixError(ValueError):
    pass


class JacobiConvergenceError(RuntimeError):
    """The sweep cap was reached before the off-diagonal mass target."""


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues (ascending, real) and a unitary matrix of column eigenvectors."""

    eigenvalues: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]


def as_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise MatrixError(f"expected a nonempty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise MatrixError("matrix entries must be finite")
    return a


def mat_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise MatrixError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    return a @ b


def adjoint(a: np.ndarray) -> np.ndarray:
    return as_matrix(a).conj().T.copy()


def max_abs(a: np.ndarray) -> float:
    return float(np.max(np.abs(a)))


def frobenius_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a))


def _require_hermitian(a: np.ndarray, what: str) -> np.ndarray:
    """Check Hermiticity within tolerance and return the symmetrized matrix."""
    a = as_matrix(a)
    dev = max_abs(a - a.conj().T)
    if dev > HERMITICITY_RTOL * (1.0 + max_abs(a)):
        raise MatrixError(f"{what}: input is not Hermitian (deviation {dev:.3e})")
    return 0.5 * (a + a.conj().T)


def _round_robin_rounds(n: int) -> list[np.ndarray]:
    """Disjoint pivot pairs covering all n(n-1)/2 index pairs in n-1 rounds."""
    m = n if n % 2 == 0 else n + 1
    order = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = []
        for i in range(m // 2):
            p, q = order[i], order[m - 1 - i]
            if p >= n or q >= n:
                continue
            pairs.append((min(p, q), max(p, q)))
        rounds.append(np.array(pairs, dtype=np.intp))
        order = [order[0]] + [order[m - 1]] + order[1:m - 1]
    return rounds


def _offdiag_frobenius(a: np.ndarray) -> float:
    # Summed directly over off-diagonal entries: subtracting the diagonal mass
    # from the total cancels catastrophically once the iteration is nearly done.
    mags = np.abs(a) ** 2
    np.fill_diagonal(mags, 0.0)
    return math.sqrt(float(np.sum(mags)))


def hermitian_eig(a: np.ndarray) -> EigenDecomposition:
    """Full eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Inputs within the Hermiticity tolerance are symmetrized as (a + a*)/2
    before iterating.  Raises JacobiConvergenceError if the off-diagonal mass
    has not dropped to 1e-14 * ||a||_F within 100 sweeps.
    """
    a = _require_hermitian(a, "hermitian_eig")
    n = a.shape[0]
    if n > MAX_EIG_DIM:
        raise MatrixError(f"dimension {n} exceeds eigensolver cap {MAX_EIG_DIM}")

    work = a.astype(np.complex128, copy=True)
    vectors = np.eye(n, dtype=np.complex128)
    norm_f = frobenius_norm(work)
    if n == 1 or norm_f == 0.0:
        vals = np.diagonal(work).real.copy()
        order = np.argsort(vals, kind="stable")
        return EigenDecomposition(vals[order], vectors[:, order])

    target = OFFDIAG_TARGET * norm_f
    skip_floor = 1e-20 * norm_f / n
    rounds = _round_robin_rounds(n)

    for _ in range(JACOBI_SWEEP_CAP):
        if _offdiag_frobenius(work) <= target:
            break
        for pairs in rounds:
            ps, qs = pairs[:, 0], pairs[:, 1]
            g = work[ps, qs]
            active = np.abs(g) > skip_floor
            if not np.any(active):
                continue
            ps, qs, g = ps[active], qs[active], g[active]
            absg = np.abs(g)
            alpha = work[ps, ps].real
            beta = work[qs, qs].real
            mu = (alpha - beta) / (2.0 * absg)
            sgn = np.where(mu >= 0.0, 1.0, -1.0)
            t = -sgn / (np.abs(mu) + np.sqrt(1.0 + mu * mu))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            w = g / absg
            u00 = c.astype(np.complex128)
            u01 = s.astype(np.complex128)
            u10 = -s * np.conj(w)
            u11 = c * np.conj(w)

            col_p = work[:, ps].copy()
            col_q = work[:, qs].copy()
            work[:, ps] = col_p * u00 + col_q * u10
            work[:, qs] = col_p * u01 + col_q * u11
            row_p = work[ps, :].copy()
            row_q = work[qs, :].copy()
            work[ps, :] = np.conj(u00)[:, None] * row_p + np.conj(u10)[:, None] * row_q
            work[qs, :] = np.conj(u01)[:, None] * row_p + np.conj(u11)[:, None] * row_q
            work[ps, qs] = 0.0
            work[qs, ps] = 0.0
            work[ps, ps] = work[ps, ps].real
            work[qs, qs] = work[qs, qs].real

            vec_p = vectors[:, ps].copy()
            vec_q = vectors[:, qs].copy()
            vectors[:, ps] = vec_p * u00 + vec_q * u10
            vectors[:, qs] = vec_p * u01 + vec_q * u11
    else:
        if _offdiag_frobenius(work) > target:
            raise JacobiConvergenceError(
                f"no convergence after {JACOBI_SWEEP_CAP} sweeps "
                f"(off-diagonal mass {_offdiag_frobenius(work):.3e})"
            )

    vals = np.diagonal(work).real.copy()
    order = np.argsort(vals, kind="stable")
    return EigenDecomposition(vals[order], vectors[:, order])


def singular_values(a: np.ndarray) -> np.ndarray:
    """Ascending singular values via the eigenvalues of a*a (negatives clamped)."""
    a = as_matrix(a)
    gram = a.conj().T @ a
    vals = hermitian_eig(gram).eigenvalues
    return np.sqrt(np.clip(vals, 0.0, None))


def operator_norm(a: np.ndarray) -> float:
    return float(singular_values(a)[-1])


def schatten_norm(a: np.ndarray, p: float) -> float:
    """(sum_i sigma_i^p)^(1/p); p=1 is the trace norm, p=inf the operator norm."""
    if p < 1:
        raise MatrixError(f"Schatten exponent must be >= 1, got {p}")
    sigma = singular_values(as_matrix(a))
    top = float(sigma[-1])
    if top == 0.0:
        return 0.0
    if math.isinf(p):
        return top
    return top * float(np.sum((sigma / top) ** p)) ** (1.0 / p)


def mat_exp_hermitian(a: np.ndarray, t: float) -> np.ndarray:
    """e^{i t a} for Hermitian a, as V diag(e^{i t lambda}) V*."""
    eig = hermitian_eig(a)
    phases = np.exp(1j * t * eig.eigenvalues)
    return (eig.vectors * phases) @ eig.vectors.conj().T


def matrix_to_json(a: np.ndarray) -> dict:
    a = as_matrix(a)
    entries = [[float(z.real), float(z.imag)] for z in a.ravel()]
    return {"dim": int(a.shape[0]), "entries": entries}


def matrix_from_json(obj: dict) -> np.ndarray:
    if not isinstance(obj, dict) or set(obj) != {"dim", "entries"}:
        raise MatrixError("matrix JSON must have exactly the keys 'dim' and 'entries'")
    n = obj["dim"]
    if not isinstance(n, int) or n <= 0:
        raise MatrixError(f"invalid dim {n!r}")
    entries = obj["entries"]
    if len(entries) != n * n:
        raise MatrixError(f"expected {n * n} entries, got {len(entries)}")
    flat = np.empty(n * n, dtype=np.complex128)
    for i, pair in enumerate(entries):
        re, im = float(pair[0]), float(pair[1])
        if not (math.isfinite(re) and math.isfinite(im)):
            raise MatrixError(f"non-finite entry at index {i}")
        flat[i] = complex(re, im)
    return flat.reshape(n, n)


def matrix_dumps(a: np.ndarray) -> str:
    return json.dumps(matrix_to_json(a))


def matrix_loads(text: str) -> np.ndarray:
    return matrix_from_json(json.loads(text))
