"""Dense complex linear algebra for the two matrix sizes used here (2 and 4).

Matrices are plain ``numpy`` complex arrays. The joint battery+ancilla space
is ordered ``index = 2 * battery_bit + env_bit``, i.e. the battery is always
the left Kronecker factor.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, DimensionOverflow, NonHermitianInput

HERMITIAN_TOL = 1e-10
_OFFDIAG_TOL = 1e-14
_MAX_SWEEPS = 100
_PHASE_TOL = 1e-12

ALLOWED_DIMS = (2, 4)


def as_matrix(a, dims=ALLOWED_DIMS) -> np.ndarray:
    """Return ``a`` as a square complex128 array, checking its size."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in dims:
        raise DimensionMismatch(f"expected square matrix of size in {dims}, got shape {m.shape}")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(a).T


def hermiticity_error(a: np.ndarray) -> float:
    return float(np.max(np.abs(a - dagger(a))))


@dataclass(frozen=True)
class HermitianEigen:
    """Ascending eigenvalues; column ``i`` of ``eigenvectors`` pairs with ``eigenvalues[i]``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ dagger(v)


def _fix_phase(v: np.ndarray) -> np.ndarray:
    v = v.copy()
    for j in range(v.shape[1]):
        col = v[:, j]
        for x in col:
            if abs(x) > _PHASE_TOL:
                v[:, j] = col * (abs(x) / x)
                break
    return v


def herm_eigen(a) -> HermitianEigen:
    """Cyclic complex Jacobi eigendecomposition of a small Hermitian matrix.

    Each rotation first rotates the phase of column ``q`` so that the pivot
    ``A[p, q]`` becomes real, then applies a real Givens rotation that
    annihilates it. Output is deterministic: eigenvalues ascending (stable on
    ties) and every eigenvector's first non-negligible entry made real positive.
    """
    a = as_matrix(a)
    if hermiticity_error(a) > HERMITIAN_TOL:
        raise NonHermitianInput(f"matrix is not Hermitian (err={hermiticity_error(a):.3e})")
    a = 0.5 * (a + dagger(a))
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    scale = max(1.0, float(np.linalg.norm(a)))
    offmask = ~np.eye(n, dtype=bool)

    for _ in range(_MAX_SWEEPS):
        if np.sqrt(np.sum(np.abs(a[offmask]) ** 2)) <= _OFFDIAG_TOL * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                z = a[p, q]
                r = abs(z)
                if r == 0.0:
                    continue
                phase = np.conj(z) / r  # e^{-i arg z}
                theta = 0.5 * np.arctan2(2.0 * r, a[p, p].real - a[q, q].real)
                c, s = np.cos(theta), np.sin(theta)
                g = np.eye(n, dtype=np.complex128)
                g[p, p] = c
                g[p, q] = -s
                g[q, p] = phase * s
                g[q, q] = phase * c
                a = dagger(g) @ a @ g
                a[p, q] = a[q, p] = 0.0
                v = v @ g

    evals = np.real(np.diag(a)).copy()
    order = np.argsort(evals, kind="stable")
    return HermitianEigen(evals[order], _fix_phase(v[:, order]))


def unitary_exp(h) -> np.ndarray:
    """``exp(-i H)`` for Hermitian ``H`` via its spectral decomposition."""
    eig = herm_eigen(h)
    v = eig.eigenvectors
    return (v * np.exp(-1j * eig.eigenvalues)) @ dagger(v)


def kron(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape[0] * b.shape[0] > 4:
        raise DimensionOverflow(f"kron of sizes {a.shape[0]} and {b.shape[0]} exceeds 4")
    return np.kron(a, b)


def partial_trace_env(r) -> np.ndarray:
    """Trace out the right (environment) qubit of a 4x4 operator."""
    r = as_matrix(r, dims=(4,))
    return np.einsum("aebe->ab", r.reshape(2, 2, 2, 2))
