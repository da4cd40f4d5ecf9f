"""Measurements on vector systems and POVMs: completeness, rank, overlaps, frames, tomography."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .linalg import DEFAULT_TOL, extended_rank, extended_solve, hermitian_eig, numerical_rank
from .systems import ProjectorPOVM, VectorSystem, symmetrize_to_povm  # noqa: F401  (re-export)

EXHAUSTIVE_CAP = 4096
SAMPLE_PAIRS = 10**6
HIST_BINS = 64
_BLOCK = 512


class NotInformationallyCompleteError(ValueError):
    pass


class InvalidStateError(ValueError):
    pass


def _vectors_of(obj) -> np.ndarray:
    if isinstance(obj, (VectorSystem, ProjectorPOVM)):
        return obj.vectors
    return np.asarray(obj, dtype=complex)


# --- POVM conditions --------------------------------------------------------------


def check_completeness(povm: ProjectorPOVM) -> float:
    """||sum_i E_i - I||_F."""
    return float(np.linalg.norm(povm.element_sum() - np.eye(povm.n)))


def gram_matrix(povm: ProjectorPOVM) -> np.ndarray:
    """H_ij = tr(E_i E_j) = w^2 |<v_i|v_j>|^2."""
    v = povm.vectors
    return (povm.weight**2) * np.abs(v.conj() @ v.T) ** 2


@dataclass(frozen=True)
class RankCertificate:
    rank: int
    required: int
    method: str                 # "float64" or "extended"
    float_rank: int
    bits: int | None = None
    smallest_pivot: float | None = None

    @property
    def complete(self) -> bool:
        return self.rank == self.required


def _hp_projector_rows(system: VectorSystem, bits: int) -> list[list]:
    import gmpy2

    with gmpy2.context(gmpy2.get_context(), precision=bits):
        vecs = system.hp_builder(bits)
        return [[vx * vy.conjugate() for vx in v for vy in v] for v in vecs]


def informational_completeness(povm: ProjectorPOVM, tol: float | None = None,
                               extended: bool = True, bits: int | None = None) -> RankCertificate:
    """Gram rank of the elements, escalating to extended precision when float64 falls short.

    The escalation needs ``povm.source.hp_builder``; it computes the rank of the
    vectorized source projectors, which equals the Gram rank (G^{-1/2}
    conjugation is invertible on matrices).
    """
    required = povm.n**2
    if len(povm) != required:
        raise ValueError(f"expected {required} elements, got {len(povm)}")
    float_rank = numerical_rank(gram_matrix(povm), tol)
    if float_rank == required or not extended or povm.source.hp_builder is None:
        return RankCertificate(float_rank, required, "float64", float_rank)
    if bits is None:
        bits = 128 + 16 * povm.n
    rank, pivot = extended_rank(_hp_projector_rows(povm.source, bits), bits)
    return RankCertificate(rank, required, "extended", float_rank, bits, pivot)


def check_informational_completeness(povm: ProjectorPOVM, tol: float | None = None,
                                     extended: bool = True) -> tuple[int, bool]:
    cert = informational_completeness(povm, tol=tol, extended=extended)
    return cert.rank, cert.complete


# --- pair scans -----------------------------------------------------------------


@dataclass
class PairScan:
    """Running statistics of |<v_i|v_j>| over a set of pairs."""

    count: int = 0
    max_abs: float = 0.0
    min_abs: float = np.inf
    sum_sq: float = 0.0
    max_dev: float = 0.0
    target: float | None = None
    histogram: np.ndarray = field(default_factory=lambda: np.zeros(HIST_BINS, dtype=np.int64))
    argmax: tuple[int, int] | None = None
    mode: str = "exhaustive"
    seed: int | None = None

    def update(self, absvals: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> None:
        if absvals.size == 0:
            return
        self.count += absvals.size
        k = int(np.argmax(absvals))
        if absvals[k] > self.max_abs or self.argmax is None:
            self.max_abs = float(absvals[k])
            self.argmax = (int(rows[k]), int(cols[k]))
        self.min_abs = min(self.min_abs, float(absvals.min()))
        sq = absvals**2
        self.sum_sq += float(sq.sum())
        self.histogram += np.histogram(np.clip(sq, 0.0, 1.0), bins=HIST_BINS, range=(0.0, 1.0))[0]
        if self.target is not None:
            self.max_dev = max(self.max_dev, float(np.max(np.abs(absvals - self.target))))

    @property
    def max_sq(self) -> float:
        return self.max_abs**2

    @property
    def mean_sq(self) -> float:
        return self.sum_sq / self.count if self.count else 0.0

    @property
    def scan_mode(self) -> dict:
        if self.mode == "exhaustive":
            return {"mode": "exhaustive", "pairs": self.count}
        return {"mode": "sampled", "pairs": self.count, "seed": self.seed}


def _group_ids(system: VectorSystem) -> np.ndarray:
    gid = np.full(len(system), -1, dtype=np.int64)
    for g, members in enumerate(system.basis_groups or []):
        gid[members] = g
    # ungrouped vectors each form their own singleton group
    lone = np.flatnonzero(gid < 0)
    gid[lone] = len(system.basis_groups or []) + np.arange(lone.size)
    return gid


def scan_pairs(vectors, group_ids: np.ndarray | None = None, target: float | None = None,
               exhaustive_cap: int = EXHAUSTIVE_CAP, samples: int = SAMPLE_PAIRS, seed: int = 0) -> PairScan:
    """|<v_i|v_j>| over i < j, restricted to different groups when ``group_ids`` is given.

    Exhaustive up to ``exhaustive_cap`` vectors, otherwise ``samples`` pairs drawn
    uniformly with a fixed seed.
    """
    v = np.asarray(vectors, dtype=complex)
    k = len(v)
    scan = PairScan(target=target)
    if k < 2:
        return scan
    if k <= exhaustive_cap:
        for start in range(0, k, _BLOCK):
            stop = min(k, start + _BLOCK)
            absvals = np.abs(v[start:stop].conj() @ v.T)
            rows = np.arange(start, stop)[:, None]
            cols = np.arange(k)[None, :]
            mask = cols > rows
            if group_ids is not None:
                mask &= group_ids[start:stop, None] != group_ids[None, :]
            r, c = np.nonzero(mask)
            scan.update(absvals[r, c], r + start, c)
        return scan
    scan.mode, scan.seed = "sampled", seed
    rng = np.random.default_rng(seed)
    remaining = samples
    while remaining > 0:
        m = min(remaining, 1 << 16)
        i = rng.integers(0, k, size=m)
        j = rng.integers(0, k - 1, size=m)
        j = j + (j >= i)
        if group_ids is not None:
            keep = group_ids[i] != group_ids[j]
            i, j = i[keep], j[keep]
        absvals = np.abs(np.einsum("ij,ij->i", v[i].conj(), v[j]))
        scan.update(absvals, np.minimum(i, j), np.maximum(i, j))
        remaining -= m
    return scan


@dataclass(frozen=True)
class OverlapStats:
    max_sq: float
    mean_sq: float
    histogram: np.ndarray
    scan: PairScan


def overlap_stats(system, **scan_kw) -> OverlapStats:
    """Statistics of |<v_i|v_j>|^2 over distinct pairs; histogram of 64 bins on [0, 1]."""
    v = _vectors_of(system)
    if len(v) < 2:
        raise ValueError("overlap statistics need at least two vectors")
    scan = scan_pairs(v, **scan_kw)
    return OverlapStats(scan.max_sq, scan.mean_sq, scan.histogram.copy(), scan)


def cross_basis_scan(system: VectorSystem, **scan_kw) -> PairScan:
    if not system.basis_groups:
        raise ValueError("system has no basis groups")
    return scan_pairs(system.vectors, group_ids=_group_ids(system), target=system.n**-0.5, **scan_kw)


def check_unbiasedness(system: VectorSystem, **scan_kw) -> float:
    """max over cross-basis pairs of | |<u|v>| - n^{-1/2} |; 0 with a single basis."""
    return cross_basis_scan(system, **scan_kw).max_dev


def pairwise_traces(povm: ProjectorPOVM) -> np.ndarray:
    """tr(E_i E_j) for i < j, computed from the element matrices."""
    e = povm.elements
    k = len(e)
    iu, ju = np.triu_indices(k, 1)
    return np.einsum("kab,kba->k", e[iu], e[ju]).real


# --- bounds, frames ---------------------------------------------------------------


def special_bound(n: int, alpha):
    """n (1 - alpha) / (1 - n alpha); exact when alpha is a Fraction or int."""
    exact = isinstance(alpha, (Fraction, int))
    a = Fraction(alpha) if exact else float(alpha)
    if a < 0 or a * n >= 1:
        raise ValueError(f"special bound needs 0 <= alpha < 1/n, got alpha={alpha} for n={n}")
    return n * (1 - a) / (1 - n * a)


def frame_bounds(system) -> tuple[float, float]:
    """Extreme eigenvalues of sum_i |v_i><v_i|."""
    v = _vectors_of(system)
    if len(v) == 0:
        raise ValueError("frame bounds need at least one vector")
    s = v.T @ v.conj()
    w = hermitian_eig(s).values
    return float(w[0]), float(w[-1])


# --- tomography --------------------------------------------------------------------


def _validate_state(rho: np.ndarray, tol: float = 1e-10) -> None:
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidStateError(f"density matrix must be square, got {rho.shape}")
    if np.linalg.norm(rho - rho.conj().T) > tol:
        raise InvalidStateError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise InvalidStateError(f"density matrix has trace {np.trace(rho).real:.6g}")
    if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0] < -tol:
        raise InvalidStateError("density matrix is not positive semidefinite")


def born_probabilities(povm: ProjectorPOVM, rho) -> np.ndarray:
    """p_i = tr(rho E_i) = w <v_i|rho|v_i>."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (povm.n, povm.n):
        raise InvalidStateError(f"state has shape {rho.shape}, POVM acts on C^{povm.n}")
    _validate_state(rho)
    if check_completeness(povm) > 1e-8:
        raise ValueError("born probabilities need a complete POVM")
    v = povm.vectors
    return povm.weight * np.einsum("ia,ab,ib->i", v.conj(), rho, v).real


def hermitian_basis(n: int) -> np.ndarray:
    """Orthonormal (Hilbert-Schmidt) basis of n x n Hermitian matrices, shape (n^2, n, n)."""
    basis = []
    for j in range(n):
        m = np.zeros((n, n), dtype=complex)
        m[j, j] = 1
        basis.append(m)
    s = 1 / np.sqrt(2)
    for j in range(n):
        for k in range(j + 1, n):
            m = np.zeros((n, n), dtype=complex)
            m[j, k] = m[k, j] = s
            basis.append(m)
            m = np.zeros((n, n), dtype=complex)
            m[j, k], m[k, j] = -1j * s, 1j * s
            basis.append(m)
    return np.array(basis)


def reconstruct_state(povm: ProjectorPOVM, probs, full_output: bool = False, tol: float | None = None):
    """Least-squares Hermitian rho with tr(rho E_i) = p_i.

    With ``full_output`` returns (rho, residual) where residual is the
    Euclidean norm of the probability misfit.
    """
    probs = np.asarray(probs, dtype=float)
    if probs.shape != (len(povm),):
        raise ValueError(f"expected {len(povm)} probabilities, got shape {probs.shape}")
    basis = hermitian_basis(povm.n)
    # A[i, k] = tr(B_k E_i), real because both are Hermitian
    e = povm.elements
    a = np.einsum("kab,iba->ik", basis, e).real
    if numerical_rank(a, tol) < povm.n**2:
        raise NotInformationallyCompleteError("POVM elements do not span the Hermitian matrices")
    x, *_ = np.linalg.lstsq(a, probs, rcond=None)
    rho = np.einsum("k,kab->ab", x, basis)
    rho = 0.5 * (rho + rho.conj().T)
    if full_output:
        return rho, float(np.linalg.norm(a @ x - probs))
    return rho


def random_density_matrix(n: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def tomography_round_trip(povm: ProjectorPOVM, trials: int = 20, seed: int = 0) -> float:
    """Largest ||rho_hat - rho||_F over seeded random states."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        rho = random_density_matrix(povm.n, rng)
        rho_hat = reconstruct_state(povm, born_probabilities(povm, rho))
        worst = max(worst, float(np.linalg.norm(rho_hat - rho)))
    return worst


def _hermitian_coordinates_rows(u, weight):
    """Rows tr(B_k w |u><u|) over the ``hermitian_basis`` ordering, for high-precision u."""
    n = len(u)
    row = [weight * (u[j].conjugate() * u[j]).real for j in range(n)]
    s2 = 2 ** 0.5
    for j in range(n):
        for k in range(j + 1, n):
            z = u[j].conjugate() * u[k]
            row.append(weight * s2 * z.real)
            row.append(weight * s2 * z.imag)
    return row


def _hermitian_coordinates(rho: np.ndarray) -> np.ndarray:
    basis = hermitian_basis(rho.shape[0])
    return np.einsum("kab,ba->k", basis, rho).real


def extended_tomography_round_trip(povm: ProjectorPOVM, trials: int = 20, seed: int = 0,
                                   bits: int | None = None) -> float:
    """Born probabilities and their inversion carried out at ``bits`` precision.

    The POVM is taken to be exactly {w (R v_i)(R v_i)^*} with v_i rebuilt by
    the source's ``hp_builder`` and R the stored float64 symmetrizer (identity
    for raw POVMs).  Needs a square system (n^2 elements).  Returns the largest
    ||rho_hat - rho||_F over seeded random states.
    """
    import gmpy2

    if povm.source.hp_builder is None:
        raise ValueError("extended tomography needs a source with an hp_builder")
    n = povm.n
    if len(povm) != n * n:
        raise ValueError("extended tomography needs exactly n^2 elements")
    bits = 128 + 16 * n if bits is None else bits
    rng = np.random.default_rng(seed)
    states = [random_density_matrix(n, rng) for _ in range(trials)]
    r = np.eye(n) if povm.symmetrizer is None else povm.symmetrizer
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        hp = povm.source.hp_builder(bits)
        # rebuild the normalisation the float vectors carry
        r_hp = [[gmpy2.mpc(complex(x)) for x in row] for row in r]
        us = []
        for v, v_float in zip(hp, povm.source.vectors):
            norm = gmpy2.sqrt(sum(gmpy2.norm(x) for x in v))
            scale = np.linalg.norm(v_float)
            v = [x / norm * scale for x in v]
            us.append([sum(r_hp[a][b] * v[b] for b in range(n)) for a in range(n)])
        w = gmpy2.mpfr(povm.weight)
        a_rows = [_hermitian_coordinates_rows(u, w) for u in us]
        coords = [_hermitian_coordinates(rho) for rho in states]
        # probabilities p_i = sum_k A[i, k] x_k, exact in the working precision
        b_rows = [[sum(a_rows[i][k] * gmpy2.mpfr(float(c[k])) for k in range(n * n)) for c in coords]
                  for i in range(n * n)]
        x = extended_solve(a_rows, b_rows, bits)
        worst = 0.0
        for t, c in enumerate(coords):
            err = gmpy2.sqrt(sum((x[k][t] - gmpy2.mpfr(float(c[k]))) ** 2 for k in range(n * n)))
            worst = max(worst, float(err))
    return worst


__all__ = [
    "DEFAULT_TOL",
    "OverlapStats",
    "PairScan",
    "RankCertificate",
    "born_probabilities",
    "check_completeness",
    "check_informational_completeness",
    "check_unbiasedness",
    "cross_basis_scan",
    "extended_tomography_round_trip",
    "frame_bounds",
    "gram_matrix",
    "informational_completeness",
    "overlap_stats",
    "pairwise_traces",
    "reconstruct_state",
    "scan_pairs",
    "special_bound",
    "symmetrize_to_povm",
    "tomography_round_trip",
]
