"""Dense complex linear algebra used by every other module.

Operators are plain ``numpy`` arrays of dtype ``complex128``. Composite
systems follow one convention throughout the package: the leftmost tensor
factor is the most significant digit of the composite index, which is what
``np.kron`` produces. Entropies are in bits.
"""

from contextlib import contextmanager
from functools import reduce

import numpy as np

from .errors import NumericDomainError, ResourceLimitError

__all__ = [
    "get_dim_cap",
    "set_dim_cap",
    "dim_cap",
    "check_dim",
    "tensor_product",
    "kron_all",
    "partial_trace",
    "matrix_sqrt_psd",
    "trace_norm",
    "fidelity",
    "sqrt_fidelity",
    "von_neumann_entropy",
    "binary_entropy",
    "is_density",
    "check_density",
    "check_state_vector",
    "check_isometry",
    "ket",
    "projector",
    "random_isometry",
    "random_density",
]

HERM_TOL = 1e-10
DERIVED_TOL = 1e-8
ENTROPY_EIG_FLOOR = 1e-12

_DIM_CAP = 4096


def get_dim_cap():
    return _DIM_CAP


def set_dim_cap(cap):
    """Set the hard cap on the side length of any dense operator."""
    global _DIM_CAP
    cap = int(cap)
    if cap < 1:
        raise ValueError(f"dimension cap must be positive, got {cap}")
    _DIM_CAP = cap


@contextmanager
def dim_cap(cap):
    """Temporarily change the dimension cap."""
    old = get_dim_cap()
    set_dim_cap(cap)
    try:
        yield
    finally:
        set_dim_cap(old)


def check_dim(dim, what="operator"):
    if dim > _DIM_CAP:
        raise ResourceLimitError(
            f"{what} dimension {dim} exceeds the configured cap {_DIM_CAP}"
        )


def tensor_product(a, b):
    """Kronecker product ``a (x) b``; ``a`` owns the most significant index."""
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    b = np.atleast_2d(np.asarray(b, dtype=complex))
    check_dim(a.shape[0] * b.shape[0])
    check_dim(a.shape[1] * b.shape[1])
    return np.kron(a, b)


def kron_all(ops):
    return reduce(tensor_product, ops)


def partial_trace(op, dims, keep):
    """Trace out every subsystem not listed in ``keep``.

    Parameters
    ----------
    op : ndarray
        Square operator on the composite space ``dims[0] (x) dims[1] (x) ...``.
    dims : sequence of int
        Subsystem dimensions, leftmost first.
    keep : iterable of int
        Subsystems to keep. The result lists them in increasing order.

    Returns
    -------
    ndarray
        Operator on the kept subsystems.
    """
    op = np.asarray(op, dtype=complex)
    dims = [int(d) for d in dims]
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= n for k in keep):
        raise ValueError(f"keep={keep} out of range for {n} subsystems")
    total = int(np.prod(dims)) if dims else 1
    if op.shape != (total, total):
        raise ValueError(f"operator shape {op.shape} does not match dims {dims}")
    t = op.reshape(dims + dims)
    row = list(range(n))
    col = [n + k if k in keep else k for k in range(n)]
    out = keep + [n + k for k in keep]
    res = np.einsum(t, row + col, out)
    d = int(np.prod([dims[k] for k in keep])) if keep else 1
    return res.reshape(d, d)


def _hermitian_part(op, tol):
    op = np.asarray(op, dtype=complex)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {op.shape}")
    scale = max(1.0, float(np.max(np.abs(op))) if op.size else 1.0)
    if np.max(np.abs(op - op.conj().T), initial=0.0) > tol * scale:
        raise NumericDomainError("matrix is not Hermitian to tolerance")
    return (op + op.conj().T) / 2


def matrix_sqrt_psd(op, tol=DERIVED_TOL):
    """Principal square root of a positive semidefinite matrix.

    Eigenvalues in ``[-tol, 0)`` are clamped to zero; anything more negative
    raises ``NumericDomainError``.
    """
    h = _hermitian_part(op, tol)
    w, v = np.linalg.eigh(h)
    if w.size and w[0] < -tol * max(1.0, abs(w[-1])):
        raise NumericDomainError(f"matrix is not PSD (min eigenvalue {w[0]:.3e})")
    w = np.sqrt(np.clip(w, 0.0, None))
    return (v * w) @ v.conj().T


def trace_norm(op):
    """Sum of singular values."""
    op = np.atleast_2d(np.asarray(op, dtype=complex))
    return float(np.linalg.svd(op, compute_uv=False).sum())


def sqrt_fidelity(rho, sigma):
    """``|| sqrt(rho) sqrt(sigma) ||_1``, the root of :func:`fidelity`."""
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise ValueError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    val = trace_norm(matrix_sqrt_psd(rho) @ matrix_sqrt_psd(sigma))
    return min(max(val, 0.0), 1.0)


def fidelity(rho, sigma):
    """Uhlmann fidelity ``|| sqrt(rho) sqrt(sigma) ||_1 ** 2`` in [0, 1]."""
    return sqrt_fidelity(rho, sigma) ** 2


def von_neumann_entropy(rho):
    """Base-2 von Neumann entropy; eigenvalues below 1e-12 contribute nothing."""
    w = np.linalg.eigvalsh(_hermitian_part(rho, DERIVED_TOL))
    w = w[w > ENTROPY_EIG_FLOOR]
    return float(max(-np.sum(w * np.log2(w)), 0.0))


def binary_entropy(p):
    p = float(p)
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return float(-p * np.log2(p) - (1 - p) * np.log2(1 - p))


def is_density(rho, tol=HERM_TOL):
    try:
        check_density(rho, tol)
    except (ValueError, NumericDomainError):
        return False
    return True


def check_density(rho, tol=HERM_TOL):
    """Raise ``ValueError`` unless ``rho`` is a density operator to ``tol``."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density operator must be square, got {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise ValueError("density operator has non-finite entries")
    if np.max(np.abs(rho - rho.conj().T), initial=0.0) > tol:
        raise ValueError("density operator is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > tol:
        raise ValueError(f"density operator has trace {np.trace(rho).real!r}")
    w = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    if w[0] < -tol:
        raise ValueError(f"density operator has negative eigenvalue {w[0]:.3e}")
    return rho


def check_state_vector(psi, subsystem_dims=None, tol=HERM_TOL):
    psi = np.asarray(psi, dtype=complex).ravel()
    if abs(np.vdot(psi, psi).real - 1.0) > tol:
        raise ValueError("state vector is not normalized")
    if subsystem_dims is not None and int(np.prod(subsystem_dims)) != psi.size:
        raise ValueError(f"subsystem dims {subsystem_dims} do not match size {psi.size}")
    return psi


def check_isometry(v, tol=HERM_TOL):
    v = np.asarray(v, dtype=complex)
    gram = v.conj().T @ v
    err = np.max(np.abs(gram - np.eye(v.shape[1])), initial=0.0)
    if err > tol:
        raise ValueError(f"matrix is not an isometry (max |V'V - I| = {err:.3e})")
    return v


def ket(index, dim):
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def projector(vec):
    vec = np.asarray(vec, dtype=complex).ravel()
    return np.outer(vec, vec.conj())


def random_isometry(in_dim, out_dim, rng):
    """Haar-random isometry ``in_dim -> out_dim`` from the QR of a Gaussian matrix."""
    if out_dim < in_dim:
        raise ValueError("an isometry needs out_dim >= in_dim")
    g = rng.standard_normal((out_dim, in_dim)) + 1j * rng.standard_normal((out_dim, in_dim))
    q, r = np.linalg.qr(g)
    # fix column phases so the distribution is Haar
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_density(dim, rng, rank=None):
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real
