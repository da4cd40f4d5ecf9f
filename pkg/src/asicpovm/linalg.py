"""Dense complex linear algebra for frame operators and Gram matrices.

Eigen-decompositions go through LAPACK (``numpy.linalg.eigh``) by default.
A cyclic Jacobi solver is kept alongside as an independent route and is used
by the test-suite to cross-check the LAPACK results.
"""

from __future__ import annotations

from dataclasses import dataclass

import gmpy2
import numpy as np

DEFAULT_TOL = 1e-9
JACOBI_MAX_SWEEPS = 100


class NotHermitianError(ValueError):
    pass


class NotPositiveDefiniteError(ValueError):
    def __init__(self, min_eigenvalue: float):
        super().__init__(f"matrix is not positive definite (min eigenvalue {min_eigenvalue:.3e})")
        self.min_eigenvalue = min_eigenvalue


class ConvergenceError(RuntimeError):
    pass


def as_vector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1:
        raise ValueError(f"expected a vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    return v


def as_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def inner(u, v) -> complex:
    """<u|v>, conjugate-linear in u."""
    u, v = as_vector(u), as_vector(v)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape[0]} vs {v.shape[0]}")
    return complex(np.vdot(u, v))


def outer(v) -> np.ndarray:
    """|v><v|."""
    v = as_vector(v)
    return np.outer(v, v.conj())


def hermiticity_defect(m: np.ndarray) -> float:
    scale = np.linalg.norm(m)
    return float(np.linalg.norm(m - m.conj().T) / scale) if scale else 0.0


@dataclass(frozen=True)
class HermitianEigen:
    values: np.ndarray   # ascending
    vectors: np.ndarray  # orthonormal columns

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.conj().T


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    # largest-magnitude entry of each column made real positive
    idx = np.argmax(np.abs(vectors), axis=0)
    pivots = vectors[idx, np.arange(vectors.shape[1])]
    phases = np.where(np.abs(pivots) > 0, pivots / np.abs(pivots), 1.0)
    return vectors / phases


def jacobi_eigh(m, tol: float = 1e-14, max_sweeps: int = JACOBI_MAX_SWEEPS) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi for a complex Hermitian matrix.

    Stops when the off-diagonal Frobenius mass is <= tol * ||m||_F.
    Returns (eigenvalues, eigenvectors) unsorted.
    """
    a = np.array(m, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    norm = np.linalg.norm(a)
    if n < 2 or norm == 0:
        return a.diagonal().real.copy(), v
    for _ in range(max_sweeps):
        off = np.linalg.norm(a[~np.eye(n, dtype=bool)])
        if off <= tol * norm:
            return a.diagonal().real.copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag < 1e-300:
                    continue
                # reduce to a real symmetric 2x2 via the phase of a_pq
                phase = apq / mag
                app, aqq = a[p, p].real, a[q, q].real
                theta = 0.5 * np.arctan2(2 * mag, aqq - app)
                c, s = np.cos(theta), np.sin(theta)
                # unitary J acting on columns p, q
                jp = np.array([c, -s * np.conj(phase)])
                jq = np.array([s, c * np.conj(phase)])
                colp, colq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = colp * jp[0] + colq * jp[1]
                a[:, q] = colp * jq[0] + colq * jq[1]
                rowp, rowq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = rowp * np.conj(jp[0]) + rowq * np.conj(jp[1])
                a[q, :] = rowp * np.conj(jq[0]) + rowq * np.conj(jq[1])
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = vp * jp[0] + vq * jp[1]
                v[:, q] = vp * jq[0] + vq * jq[1]
    raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")


def hermitian_eig(m, tol: float = DEFAULT_TOL, method: str = "lapack") -> HermitianEigen:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix must be square, got {m.shape}")
    if hermiticity_defect(m) > tol:
        raise NotHermitianError(f"matrix is not Hermitian (relative defect {hermiticity_defect(m):.2e})")
    h = 0.5 * (m + m.conj().T)
    if method == "lapack":
        w, v = np.linalg.eigh(h)
    elif method == "jacobi":
        w, v = jacobi_eigh(h)
        order = np.argsort(w, kind="stable")
        w, v = w[order], v[:, order]
    else:
        raise ValueError(f"unknown eigen method {method!r}")
    return HermitianEigen(values=w, vectors=_fix_phases(v))


def _psd_power(m, power: float, tol: float) -> np.ndarray:
    eig = hermitian_eig(m, tol=tol)
    lo = float(eig.values[0])
    if lo <= tol:
        raise NotPositiveDefiniteError(lo)
    r = (eig.vectors * eig.values**power) @ eig.vectors.conj().T
    return 0.5 * (r + r.conj().T)


def inv_sqrt_psd(m, tol: float = DEFAULT_TOL) -> np.ndarray:
    """The positive definite R with R m R = I."""
    return _psd_power(m, -0.5, tol)


def sqrt_psd(m, tol: float = DEFAULT_TOL) -> np.ndarray:
    return _psd_power(m, 0.5, tol)


def numerical_rank(m, tol: float | None = None) -> int:
    """Count eigenvalues of m* m above tol * (largest eigenvalue).

    Default tol is n * eps.
    """
    m = as_matrix(m)
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    ev = s**2
    top = ev.max() if ev.size else 0.0
    if top == 0.0:
        return 0
    if tol is None:
        tol = max(m.shape) * np.finfo(float).eps
    return int(np.count_nonzero(ev > tol * top))


def extended_rank(rows, bits: int, rel_tol_bits: int | None = None) -> tuple[int, float]:
    """Rank by partial-pivoting elimination in ``bits``-bit complex arithmetic (gmpy2).

    ``rows`` holds values convertible to ``gmpy2.mpc``; build them at the same
    precision or the extra bits are wasted.  A pivot is accepted when it
    exceeds 2**-(bits - rel_tol_bits) times the largest row norm (default
    rel_tol_bits = 64).  Returns (rank, smallest accepted pivot relative to
    that scale).
    """
    if rel_tol_bits is None:
        rel_tol_bits = 64
    if bits < rel_tol_bits + 32:
        raise ValueError(f"{bits} bits leaves no room below the {rel_tol_bits}-bit pivot margin")
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        a = np.array([[gmpy2.mpc(x) for x in row] for row in rows], dtype=object)
        if a.size == 0:
            return 0, 0.0
        nrows, ncols = a.shape
        mags = np.vectorize(gmpy2.norm, otypes=[object])  # |z|**2
        scale = max(gmpy2.sqrt(sum(mags(row))) for row in a)
        if scale == 0:
            return 0, 0.0
        thresh = scale * gmpy2.mpfr(2) ** (rel_tol_bits - bits)
        rank, col, smallest = 0, 0, None
        while rank < nrows and col < ncols:
            column = mags(a[rank:, col])
            k = int(np.argmax(column))
            pv = gmpy2.sqrt(column[k])
            if pv <= thresh:
                col += 1
                continue
            if k:
                a[[rank, rank + k]] = a[[rank + k, rank]]
            factors = a[rank + 1:, col] / a[rank, col]
            a[rank + 1:, col + 1:] -= np.outer(factors, a[rank, col + 1:])
            a[rank + 1:, col] = gmpy2.mpc(0)
            smallest = pv if smallest is None else min(smallest, pv)
            rank += 1
            col += 1
        return rank, float(smallest / scale) if smallest is not None else 0.0


def extended_solve(a_rows, b_rows, bits: int) -> list[list]:
    """Solve A X = B for square real A in ``bits``-bit arithmetic (gmpy2 mpfr, partial pivoting).

    ``b_rows`` has one row per equation and one column per right-hand side.
    Returns X as nested lists of mpfr.
    """
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        a = np.array([[gmpy2.mpfr(x) for x in row] for row in a_rows], dtype=object)
        b = np.array([[gmpy2.mpfr(x) for x in row] for row in b_rows], dtype=object)
        n = a.shape[0]
        if a.shape != (n, n) or b.shape[0] != n:
            raise ValueError("extended_solve needs a square system")
        absval = np.vectorize(abs, otypes=[object])
        for col in range(n):
            k = col + int(np.argmax(absval(a[col:, col])))
            if a[k, col] == 0:
                raise np.linalg.LinAlgError("singular system at working precision")
            if k != col:
                a[[col, k]] = a[[k, col]]
                b[[col, k]] = b[[k, col]]
            factors = a[col + 1:, col] / a[col, col]
            a[col + 1:, col + 1:] -= np.outer(factors, a[col, col + 1:])
            b[col + 1:] -= np.outer(factors, b[col])
            a[col + 1:, col] = gmpy2.mpfr(0)
        x = np.empty_like(b)
        for row in range(n - 1, -1, -1):
            acc = b[row] - (a[row, row + 1:] @ x[row + 1:] if row + 1 < n else 0)
            x[row] = acc / a[row, row]
        return x.tolist()
