"""Dense complex linear algebra shared by all simulators.

Conventions (hbar = 1 throughout):
  * Kronecker products are row-major with the FIRST factor varying
    slowest, i.e. kron(A, B)[i*dB + k, j*dB + l] = A[i, j] * B[k, l].
  * Propagators are exp(-i t H) for Hermitian H.
All functions are pure; none mutate their arguments.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import (
    DimensionMismatchError,
    EmptyKeepSetError,
    NoConvergenceError,
    NotHermitianError,
)
from .tolerances import DEFAULT_TOLERANCES

DEFAULT_KRYLOV_DIM = 30


def as_operator(a) -> np.ndarray:
    """Coerce to a square complex matrix."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] < 1:
        raise DimensionMismatchError("operator dimension must be >= 1")
    return m


def herm_defect(h) -> float:
    """max|H - H^dag|, the Hermiticity violation in the max norm."""
    h = np.asarray(h)
    return float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0


def require_hermitian(h, tol=None):
    """Return h unchanged, raising NotHermitianError if it fails the check.

    The tolerance is relative to max(1, max|entry|) so that zero and
    small matrices are not held to absurd absolute standards.
    """
    tol = DEFAULT_TOLERANCES.herm if tol is None else tol
    h = as_operator(h)
    scale = max(1.0, float(np.max(np.abs(h))) if h.size else 0.0)
    defect = herm_defect(h)
    if defect > tol * scale:
        raise NotHermitianError(defect, tol * scale)
    return h


def kron(a, b) -> np.ndarray:
    """Kronecker product, first factor slowest."""
    return np.kron(as_operator(a), as_operator(b))


def propagator(h, t, tol_herm=None) -> np.ndarray:
    """Unitary exp(-i t H) via full Hermitian eigendecomposition."""
    h = require_hermitian(h, tol_herm)
    evals, vecs = np.linalg.eigh(h)
    phases = np.exp(-1j * t * evals)
    return (vecs * phases) @ vecs.conj().T


@dataclass(frozen=True)
class KronTerm:
    """One scalar * (op on site i) * (op on site j) * ... tensor term.

    `dims` declares the full factor layout; sites not listed in
    `factors` act as identity.
    """

    dims: tuple
    factors: tuple  # ((site, matrix), ...)
    scalar: complex = 1.0

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        if any(d < 1 for d in dims):
            raise DimensionMismatchError("all factor dimensions must be >= 1")
        seen = set()
        norm_factors = []
        for site, op in self.factors:
            site = int(site)
            if site in seen:
                raise DimensionMismatchError(f"site {site} listed twice in KronTerm")
            if not 0 <= site < len(dims):
                raise DimensionMismatchError(
                    f"site {site} outside layout of {len(dims)} factors"
                )
            seen.add(site)
            op = as_operator(op)
            if op.shape[0] != dims[site]:
                raise DimensionMismatchError(
                    f"operator on site {site} has dim {op.shape[0]}, layout says {dims[site]}"
                )
            norm_factors.append((site, op))
        object.__setattr__(self, "factors", tuple(norm_factors))
        object.__setattr__(self, "scalar", complex(self.scalar))

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims, dtype=object))

    def dense(self) -> np.ndarray:
        """Materialize the full matrix of this term."""
        placed = dict(self.factors)
        out = np.array([[self.scalar]], dtype=complex)
        for site, d in enumerate(self.dims):
            op = placed.get(site, np.eye(d, dtype=complex))
            out = np.kron(out, op)
        return out


def _check_terms(terms, dim):
    if not terms:
        return None
    dims = terms[0].dims
    for term in terms:
        if term.dims != dims:
            raise DimensionMismatchError("KronTerm list mixes tensor layouts")
    if dim is not None and int(np.prod(dims, dtype=object)) != dim:
        raise DimensionMismatchError(
            f"layout dimension {int(np.prod(dims, dtype=object))} != state length {dim}"
        )
    return dims


def apply_generator(terms, psi) -> np.ndarray:
    """Apply (sum of KronTerms) to a state vector without materializing it."""
    psi = np.asarray(psi, dtype=complex)
    dims = _check_terms(list(terms), psi.size)
    out = np.zeros_like(psi)
    if dims is None:
        return out
    shaped = psi.reshape(dims)
    for term in terms:
        v = shaped
        for site, op in term.factors:
            v = np.tensordot(op, v, axes=(1, site))
            v = np.moveaxis(v, 0, site)
        out += term.scalar * v.reshape(-1)
    return out


def dense_generator(terms) -> np.ndarray:
    """Materialize the sum of KronTerms as one dense matrix."""
    terms = list(terms)
    _check_terms(terms, None)
    if not terms:
        raise DimensionMismatchError("cannot materialize an empty term list")
    out = np.zeros((terms[0].total_dim,) * 2, dtype=complex)
    for term in terms:
        out += term.dense()
    return out


def _lanczos_expv(terms, psi, dt, m, tol):
    """One Lanczos approximation of exp(-i dt H) psi.

    Returns (vector, residual_estimate). Uses full reorthogonalization;
    stops early on happy breakdown or once the a-posteriori estimate is
    below tol.
    """
    beta0 = float(np.linalg.norm(psi))
    if beta0 == 0.0:
        return psi.copy(), 0.0
    v = psi / beta0
    basis = [v]
    alphas, betas = [], []

    def assemble(k):
        if k == 1:
            evals = np.array([alphas[0]])
            evecs = np.array([[1.0]])
        else:
            evals, evecs = eigh_tridiagonal(np.array(alphas[:k]), np.array(betas[: k - 1]))
        y = evecs @ (np.exp(-1j * dt * evals) * evecs[0, :].conj())
        return beta0 * (np.stack(basis[:k], axis=1) @ y), y

    w = None
    for j in range(m):
        w = apply_generator(terms, basis[j])
        a = float(np.real(np.vdot(basis[j], w)))
        alphas.append(a)
        w = w - a * basis[j]
        if j > 0:
            w = w - betas[j - 1] * basis[j - 1]
        # full reorthogonalization; cheap next to the matvec
        vb = np.stack(basis, axis=1)
        w = w - vb @ (vb.conj().T @ w)
        b = float(np.linalg.norm(w))
        if b <= 1e-14 * max(1.0, beta0):
            out, _ = assemble(j + 1)
            return out, 0.0  # invariant subspace, result exact
        betas.append(b)
        basis.append(w / b)
        if j >= 1:
            out, y = assemble(j + 1)
            est = b * abs(dt) * abs(y[-1])
            if est <= 0.1 * tol:
                return out, est
    out, y = assemble(m)
    est = betas[-1] * abs(dt) * abs(y[-1])
    return out, est


def krylov_step(terms, psi, dt, m=DEFAULT_KRYLOV_DIM, tol=None, _depth=0):
    """Approximate exp(-i dt H) psi for the Hermitian generator sum(terms).

    Splits dt in half recursively whenever the Lanczos residual estimate
    exceeds tol, and raises NoConvergenceError if halving does not help.
    """
    tol = DEFAULT_TOLERANCES.krylov if tol is None else tol
    psi = np.asarray(psi, dtype=complex)
    _check_terms(list(terms), psi.size)
    if dt == 0.0:
        return psi.copy()
    out, est = _lanczos_expv(terms, psi, dt, m, tol)
    if est <= tol:
        return out
    if _depth >= 24:
        raise NoConvergenceError(est, "krylov_step exhausted dt halvings")
    half = krylov_step(terms, psi, dt / 2.0, m, tol, _depth + 1)
    return krylov_step(terms, half, dt / 2.0, m, tol, _depth + 1)


def _resolve_keep(dims, keep, ndim):
    keep = sorted({int(k) for k in keep})
    if not keep:
        raise EmptyKeepSetError("partial trace must keep at least one factor")
    if keep[0] < 0 or keep[-1] >= ndim:
        raise DimensionMismatchError(f"keep indices {keep} outside {ndim} factors")
    return keep


def partial_trace(rho, dims, keep) -> np.ndarray:
    """Trace out all tensor factors not in `keep`.

    `dims` lists the factor dimensions of rho; the result is ordered by
    the original factor order of the kept indices.
    """
    rho = as_operator(rho)
    dims = [int(d) for d in dims]
    if int(np.prod(dims, dtype=object)) != rho.shape[0]:
        raise DimensionMismatchError(
            f"product of dims {dims} != matrix dimension {rho.shape[0]}"
        )
    keep = _resolve_keep(dims, keep, len(dims))
    drop = [i for i in range(len(dims)) if i not in keep]
    t = rho.reshape(dims + dims)
    nd = len(dims)
    for ax in sorted(drop, reverse=True):
        t = np.trace(t, axis1=ax, axis2=ax + nd)
        nd -= 1
    d_keep = int(np.prod([dims[i] for i in keep], dtype=object))
    return t.reshape(d_keep, d_keep)


def reduced_state_from_vector(psi, dims, keep) -> np.ndarray:
    """Partial trace of |psi><psi| without forming the outer product."""
    psi = np.asarray(psi, dtype=complex)
    dims = [int(d) for d in dims]
    if int(np.prod(dims, dtype=object)) != psi.size:
        raise DimensionMismatchError("dims do not match state length")
    keep = _resolve_keep(dims, keep, len(dims))
    drop = [i for i in range(len(dims)) if i not in keep]
    t = np.transpose(psi.reshape(dims), axes=keep + drop)
    d_keep = int(np.prod([dims[i] for i in keep], dtype=object))
    x = t.reshape(d_keep, -1)
    return x @ x.conj().T


def trace_distance(rho, sigma) -> float:
    """(1/2) sum |eigenvalues(rho - sigma)| for Hermitian rho, sigma."""
    rho = as_operator(rho)
    sigma = as_operator(sigma)
    if rho.shape != sigma.shape:
        raise DimensionMismatchError("trace_distance requires equal dimensions")
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(rho - sigma))))


def partial_transpose(rho, d_a, d_b) -> np.ndarray:
    """Transpose the second tensor factor of a bipartite matrix."""
    rho = as_operator(rho)
    if d_a * d_b != rho.shape[0]:
        raise DimensionMismatchError(
            f"bipartition {d_a}x{d_b} does not match dimension {rho.shape[0]}"
        )
    t = rho.reshape(d_a, d_b, d_a, d_b)
    return np.transpose(t, (0, 3, 2, 1)).reshape(d_a * d_b, d_a * d_b)


def negativity(rho, d_a, d_b) -> float:
    """Entanglement negativity: |sum of negative eigenvalues| of the
    partial transpose over the second factor. Zero iff the state is PPT."""
    pt = partial_transpose(rho, d_a, d_b)
    evals = np.linalg.eigvalsh(pt)
    return float(-np.sum(evals[evals < 0.0]))


def multinomial_weight(counts) -> int:
    """Exact multinomial coefficient for integer counts."""
    n = sum(counts)
    out = math.factorial(n)
    for c in counts:
        out //= math.factorial(c)
    return out
