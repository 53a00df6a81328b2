"""Dense complex linear algebra for the 2x2 and 4x4 matrices used by qcorr.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Every spectrum in
the package goes through :func:`hermitian_eig` / :func:`eigvalsh`, which run a
cyclic Jacobi iteration with complex rotations. The solver works on stacks of
matrices (shape ``(..., n, n)``) so that measurement sweeps can diagonalize a
whole grid at once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence, NonFinite, NotADistribution, NotHermitian, NotPSD

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
MAX_SWEEPS = 100

IDENTITY2 = np.eye(2, dtype=complex)
IDENTITY4 = np.eye(4, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)

for _m in (IDENTITY2, IDENTITY4, *PAULIS):
    _m.setflags(write=False)


@dataclass(frozen=True)
class HermitianEigenSystem:
    """Eigenvalues in descending order and the matching eigenvectors as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a complex array and reject NaN/Inf entries."""
    m = np.asarray(a, dtype=complex)
    if m.ndim < 2:
        raise ValueError(f"expected a matrix, got array of shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFinite("matrix contains NaN or infinite entries")
    return m


def dagger(a) -> np.ndarray:
    return np.swapaxes(np.conj(a), -1, -2)


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def is_hermitian(a, tol: float = HERMITIAN_TOL) -> bool:
    a = np.asarray(a)
    return bool(np.max(np.abs(a - dagger(a)), initial=0.0) <= tol)


def _check_hermitian(a: np.ndarray, tol: float) -> None:
    if a.shape[-1] != a.shape[-2]:
        raise NotHermitian(f"matrix is not square: shape {a.shape[-2:]}")
    dev = float(np.max(np.abs(a - dagger(a)), initial=0.0))
    if dev > tol:
        raise NotHermitian(f"max |A - A^dagger| = {dev:.3e} exceeds {tol:.0e}")


def _jacobi(a: np.ndarray, want_vectors: bool, max_sweeps: int = MAX_SWEEPS):
    """Cyclic complex Jacobi on a stack ``(B, n, n)`` of Hermitian matrices.

    Returns unsorted eigenvalues ``(B, n)`` and, if requested, eigenvectors
    ``(B, n, n)`` stored as columns.
    """
    a = 0.5 * (a + dagger(a))
    batch, n, _ = a.shape
    v = np.broadcast_to(np.eye(n, dtype=complex), a.shape).copy() if want_vectors else None
    scale = np.sqrt(np.sum(np.abs(a) ** 2, axis=(1, 2)))
    # converged once the off-diagonal mass is at rounding level of the whole matrix
    target = (4.0 * np.finfo(float).eps * np.maximum(scale, np.finfo(float).tiny)) ** 2
    # entries this small sit far below the target; rotating them only invites subnormal NaNs
    negligible = 1e-20 * scale
    pairs = [(p, q) for p in range(n - 1) for q in range(p + 1, n)]
    offdiag = ~np.eye(n, dtype=bool)

    for _ in range(max_sweeps):
        off = np.sum(np.abs(a[:, offdiag]) ** 2, axis=1)
        if np.all(off <= target):
            break
        for p, q in pairs:
            g = a[:, p, q]
            mag = np.abs(g)
            active = mag > negligible
            if not active.any():
                continue
            safe = np.where(active, mag, 1.0)
            theta = (a[:, q, q].real - a[:, p, p].real) / (2.0 * safe)
            t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.hypot(theta, 1.0))
            t = np.where(active, t, 0.0)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            phase = np.where(active, g / safe, 1.0)
            se = (s * phase)[:, None]
            sec = (s * np.conj(phase))[:, None]
            cc = c[:, None]

            # A <- A J, then A <- J^dagger A, where J is the identity except for
            # J_pp = J_qq = c, J_pq = s e^{i a}, J_qp = -s e^{-i a}.
            col_p = a[:, :, p].copy()
            col_q = a[:, :, q]
            a[:, :, p] = cc * col_p - sec * col_q
            a[:, :, q] = se * col_p + cc * col_q
            row_p = a[:, p, :].copy()
            row_q = a[:, q, :]
            a[:, p, :] = cc * row_p - se * row_q
            a[:, q, :] = sec * row_p + cc * row_q
            a[:, p, q] = 0.0
            a[:, q, p] = 0.0
            a[:, p, p] = a[:, p, p].real
            a[:, q, q] = a[:, q, q].real
            if want_vectors:
                vp = v[:, :, p].copy()
                vq = v[:, :, q]
                v[:, :, p] = cc * vp - sec * vq
                v[:, :, q] = se * vp + cc * vq
    else:
        off = np.sum(np.abs(a[:, offdiag]) ** 2, axis=1)
        if not np.all(off <= target):
            raise NoConvergence(f"Jacobi iteration did not converge in {max_sweeps} sweeps")

    w = np.real(np.diagonal(a, axis1=1, axis2=2)).copy()
    return w, v


def eigvalsh(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Eigenvalues of one Hermitian matrix or a stack of them, sorted descending."""
    m = as_matrix(a)
    _check_hermitian(m, tol)
    lead = m.shape[:-2]
    n = m.shape[-1]
    w, _ = _jacobi(m.reshape(-1, n, n).copy(), want_vectors=False)
    w = -np.sort(-w, axis=-1)
    return w.reshape(*lead, n)


def _first_significant(col: np.ndarray, tol: float = 1e-12) -> int:
    idx = np.flatnonzero(np.abs(col) > tol)
    return int(idx[0]) if idx.size else 0


def hermitian_eig(a, tol: float = HERMITIAN_TOL) -> HermitianEigenSystem:
    """Full eigensystem of a single Hermitian matrix.

    Eigenvalues come back in descending order. Each eigenvector is rotated so
    its first significant component is real and positive; eigenvalues equal
    to within 1e-12 are ordered by the position of that component.
    """
    m = as_matrix(a)
    if m.ndim != 2:
        raise ValueError("hermitian_eig takes a single matrix; use eigvalsh for stacks")
    _check_hermitian(m, tol)
    w, v = _jacobi(m[None].copy(), want_vectors=True)
    w, v = w[0], v[0]

    for k in range(v.shape[1]):
        j = _first_significant(v[:, k])
        z = v[j, k]
        if z != 0:
            v[:, k] *= np.conj(z) / abs(z)
        v[:, k] /= np.linalg.norm(v[:, k])

    order = sorted(range(len(w)), key=lambda k: -w[k])
    # reorder runs of (numerically) equal eigenvalues by leading-component position
    grouped: list[list[int]] = []
    for k in order:
        if grouped and abs(w[grouped[-1][-1]] - w[k]) <= 1e-12:
            grouped[-1].append(k)
        else:
            grouped.append([k])
    order = [k for g in grouped for k in sorted(g, key=lambda k: _first_significant(v[:, k]))]
    w = w[order]
    v = v[:, order]
    w.setflags(write=False)
    v.setflags(write=False)
    return HermitianEigenSystem(eigenvalues=w, eigenvectors=v)


def psd_sqrt(a, tol: float = PSD_TOL) -> np.ndarray:
    """Principal square root of a positive semidefinite Hermitian matrix."""
    es = hermitian_eig(a)
    lo = float(es.eigenvalues[-1])
    if lo < -tol:
        raise NotPSD(f"smallest eigenvalue {lo:.3e} is below -{tol:.0e}")
    roots = np.sqrt(np.clip(es.eigenvalues, 0.0, None))
    v = es.eigenvectors
    b = (v * roots) @ v.conj().T
    return 0.5 * (b + b.conj().T)


def singular_values(a) -> np.ndarray:
    """Singular values of a square matrix, descending.

    Taken from the eigenvalues of the Hermitian dilation [[0, A], [A^dagger, 0]],
    which are +-sigma_i. Unlike sqrt(eig(A^dagger A)) this keeps small singular
    values accurate to rounding level instead of sqrt(rounding).
    """
    m = as_matrix(a)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"singular_values needs a square matrix, got shape {m.shape}")
    n = m.shape[0]
    zero = np.zeros_like(m)
    w = eigvalsh(np.block([[zero, m], [dagger(m), zero]]))
    return np.clip(w[:n], 0.0, None)


def trace_norm(a) -> float:
    """Sum of singular values, sqrt(eig(A^dagger A)) summed."""
    return float(np.sum(singular_values(a)))


def hermitian_trace_norm(a) -> np.ndarray | float:
    """Trace norm of Hermitian matrices as the sum of |eigenvalues|.

    Same value as :func:`trace_norm` for Hermitian input, without squaring the
    spectrum first, so it keeps full precision near rank deficiency. Accepts
    stacks.
    """
    w = eigvalsh(a)
    out = np.sum(np.abs(w), axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def frobenius_norm_sq(a) -> float:
    m = as_matrix(a)
    return float(np.sum(m.real**2 + m.imag**2))


def entropy_base2(eigenvalues, tol: float = PSD_TOL) -> float:
    """Shannon entropy in bits of a spectrum, with 0 log 0 = 0."""
    lam = np.asarray(eigenvalues, dtype=float)
    if not np.all(np.isfinite(lam)):
        raise NonFinite("eigenvalues contain NaN or infinite entries")
    if lam.size and lam.min() < -tol:
        raise NotADistribution(f"eigenvalue {lam.min():.3e} is below -{tol:.0e}")
    total = float(lam.sum())
    if abs(total - 1.0) > 1e-8:
        raise NotADistribution(f"eigenvalues sum to {total!r}, not 1")
    lam = lam[lam > 0.0]
    return float(-np.sum(lam * np.log2(lam)))


def entropy_base2_batch(eigenvalues) -> np.ndarray:
    """Row-wise entropy in bits for a stack of already validated spectra."""
    lam = np.clip(np.asarray(eigenvalues, dtype=float), 0.0, None)
    safe = np.where(lam > 0.0, lam, 1.0)
    return -np.sum(lam * np.log2(safe), axis=-1)
