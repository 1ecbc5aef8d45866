"""Dense complex kernel: Hermitian exponentials, norms, partial trace, entropy.

Everything operates on plain numpy arrays.  A ``DenseOperator`` is a
``(d, d)`` complex array with ``d`` a power of two, a ``StateVector`` a
``(d,)`` complex array, a ``DensityMatrix`` a Hermitian positive
semidefinite ``(d, d)`` array with unit trace.  Site 0 is the least
significant bit of the basis index, matching :mod:`trotter_scope.pauli`.
"""

from __future__ import annotations

import numpy as np

DenseOperator = np.ndarray
StateVector = np.ndarray
DensityMatrix = np.ndarray

HERMITIAN_TOL = 1e-10

#: Eigenvalues at or below this contribute nothing to the entropy;
#: avoids NaN from negative round-off eigenvalues.
ENTROPY_CLAMP = 1e-14


def _check_square(a: np.ndarray) -> int:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a.shape[0]


def hermiticity_defect(a: np.ndarray) -> float:
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def eigh_hermitian(h: np.ndarray, tol: float = HERMITIAN_TOL):
    """Eigendecomposition ``h = V diag(w) V+`` with a Hermiticity guard."""
    _check_square(h)
    defect = hermiticity_defect(h)
    if defect > tol:
        raise ValueError(f"matrix is not Hermitian (defect {defect:.3e})")
    w, v = np.linalg.eigh(h)
    return w, v


def expm_hermitian(h: np.ndarray, t: float) -> np.ndarray:
    """``exp(-i h t)`` for Hermitian ``h`` via full eigendecomposition.

    Eigendecomposition rather than scaling-and-squaring: every use in this
    package exponentiates a Hermitian generator, the result is unitary up
    to round-off, and the decomposition is reusable across many t values
    (see :func:`phase_apply`).
    """
    w, v = eigh_hermitian(h)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def phase_apply(w: np.ndarray, v: np.ndarray, t, vecs: np.ndarray) -> np.ndarray:
    """Apply ``exp(-i h t)`` to one vector or a batch of columns.

    ``w, v`` come from :func:`eigh_hermitian`.  ``t`` may be a scalar or a
    per-column array, which evolves column ``k`` for time ``t[k]`` in one
    pair of matrix products.
    """
    t_arr = np.asarray(t, dtype=float)
    phases = np.exp(-1j * np.multiply.outer(w, t_arr))
    if vecs.ndim == 2 and phases.ndim == 1:
        phases = phases[:, None]
    return v @ (phases * (v.conj().T @ vecs))


def spectral_norm(a: np.ndarray) -> float:
    """Largest singular value, exact dense computation."""
    _check_square(a)
    return float(np.linalg.svd(a, compute_uv=False)[0])


def normalized_frobenius(a: np.ndarray) -> float:
    """sqrt(tr(A+ A)/d)."""
    d = _check_square(a)
    return float(np.linalg.norm(a) / np.sqrt(d))


def apply(a: np.ndarray, psi: np.ndarray) -> np.ndarray:
    if a.shape[1] != psi.shape[0]:
        raise ValueError("dimension mismatch")
    return a @ psi


def expectation(psi: np.ndarray, a: np.ndarray) -> complex:
    return complex(np.vdot(psi, a @ psi))


def vector_norm(a: np.ndarray, psi: np.ndarray) -> float:
    """``||a psi||_2 = sqrt(<psi| a+ a |psi>)``."""
    return float(np.linalg.norm(apply(a, psi)))


def normalize(psi: np.ndarray) -> np.ndarray:
    nrm = np.linalg.norm(psi)
    if nrm == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return psi / nrm


def n_sites_of(dim: int) -> int:
    n = dim.bit_length() - 1
    if 1 << n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


def partial_trace(psi: np.ndarray, keep: "set[int] | frozenset[int]") -> np.ndarray:
    """Reduced density matrix of a pure state on the ``keep`` sites.

    The reduced basis orders the kept sites ascending, smallest site on
    the least significant bit.
    """
    if not keep:
        raise ValueError("keep set must be non-empty")
    n = n_sites_of(psi.shape[0])
    keep_sorted = sorted(keep)
    if keep_sorted[0] < 0 or keep_sorted[-1] >= n:
        raise ValueError(f"keep sites {keep_sorted} out of range for {n} sites")
    # axis of site i in the reshaped tensor is n-1-i (row-major)
    keep_axes = [n - 1 - s for s in sorted(keep, reverse=True)]
    env_axes = [ax for ax in range(n) if ax not in keep_axes]
    dk = 1 << len(keep_sorted)
    tensor = psi.reshape([2] * n).transpose(keep_axes + env_axes)
    mat = tensor.reshape(dk, -1)
    return mat @ mat.conj().T


def von_neumann_entropy(rho: np.ndarray, clamp: float = ENTROPY_CLAMP) -> float:
    """``-sum(lam * log(lam))`` in natural log, eigenvalues clamped to [0, 1]."""
    w = np.linalg.eigvalsh(rho)
    w = np.clip(w.real, 0.0, 1.0)
    w = w[w > clamp]
    return float(-np.sum(w * np.log(w)))


def check_density_matrix(rho: np.ndarray, tol: float = 1e-10) -> None:
    d = _check_square(rho)
    if abs(np.trace(rho) - 1.0) > tol:
        raise ValueError(f"trace {np.trace(rho)} != 1")
    if hermiticity_defect(rho) > tol:
        raise ValueError("density matrix is not Hermitian")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise ValueError("density matrix has a negative eigenvalue")
    del d


def haar_state(n_sites: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random pure state: normalized complex Gaussian vector."""
    dim = 1 << n_sites
    vec = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return normalize(vec)


def random_product_state(n_sites: int, rng: np.random.Generator) -> np.ndarray:
    """Tensor product of per-site Haar single-qubit states."""
    psi = np.ones(1, dtype=complex)
    for _ in range(n_sites):
        site = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        # site 0 least significant: new site becomes the most significant factor
        psi = np.kron(normalize(site), psi)
    return psi
