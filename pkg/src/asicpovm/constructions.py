"""The vector systems: exact MUBs, two ASIC-POVM constructions, and approximate MUBs/SICs."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import gmpy2
import numpy as np

from .ffield import FiniteField, field_of_order, make_field
from .numtheory import (
    character_of_order,
    least_prime_ratio,
    next_prime_geq,
    roots_of_unity,
    smallest_prime_congruent_1,
    subgroup_un,
)
from .systems import ProjectorPOVM, VectorSystem, raw_povm, symmetrize_to_povm

log = logging.getLogger(__name__)

DEFAULT_ENTRY_CAP = 10**7  # complex entries held in one system


class CapExceededError(ValueError):
    pass


def _check_cap(count: int, n: int, cap: int) -> None:
    if count * n > cap:
        raise CapExceededError(f"{count} vectors of dimension {n} exceed the cap of {cap} entries")


def standard_basis(n: int) -> np.ndarray:
    return np.eye(n, dtype=complex)


# --- the two-dimensional example ---------------------------------------------


def intro_example() -> VectorSystem:
    """Four vectors in C^2 whose halved projectors form an IC-POVM."""
    w = 2 + 2j
    vecs = np.array([[1, w], [w, 1], [1, -w], [w, -1]], dtype=complex) / 3
    return VectorSystem(n=2, vectors=vecs, labels=[("intro", i) for i in range(1, 5)],
                        provenance={"construction": "intro", "n": 2})


# --- prime-power MUBs and construction I ---------------------------------------


def _quadratic_phase_exponents(f: FiniteField) -> np.ndarray:
    """Tr(a x^2 + b x) as an int array indexed [a, b, x]."""
    mul, add, tr = f.mul_table, f.add_table, f.trace_table
    idx = np.arange(f.q)
    ax2 = mul[:, mul[idx, idx]]          # [a, x]
    bx = mul                              # [b, x]
    return tr[add[ax2[:, None, :], bx[None, :, :]]]


def _field_provenance(name: str, f: FiniteField) -> dict:
    return {"construction": name, "q": f.q, "p": f.p, "r": f.r, "modulus": list(f.modulus)}


def mub_prime_power(q: int) -> VectorSystem:
    """Standard basis plus B_a = {q^{-1/2} e_p(Tr(a x^2 + b x))_x : b}, a in F_q."""
    f = field_of_order(q)
    phases = roots_of_unity(f.p, _quadratic_phase_exponents(f)) / np.sqrt(q)
    vecs = np.concatenate([standard_basis(q), phases.reshape(q * q, q)])
    labels = [("std", x) for x in range(q)] + [("quad", a, b) for a in range(q) for b in range(q)]
    groups = [list(range(q))] + [list(range(q + a * q, q + (a + 1) * q)) for a in range(q)]
    return VectorSystem(n=q, vectors=vecs, labels=labels, basis_groups=groups,
                        provenance=_field_provenance("mub", f))


def pruned_mub_system(q: int) -> VectorSystem:
    """psi_{a,b} for b != 0 (quadratic phase) and psi_{a,0} = e_a, ordered a-major."""
    f = field_of_order(q)
    phases = roots_of_unity(f.p, _quadratic_phase_exponents(f)) / np.sqrt(q)
    vecs = phases.copy()
    vecs[:, 0, :] = standard_basis(q)
    labels = [("std", a) if b == 0 else ("quad", a, b) for a in range(q) for b in range(q)]
    return VectorSystem(n=q, vectors=vecs.reshape(q * q, q), labels=labels,
                        provenance=_field_provenance("asic1", f))


def reflection_matrix(f: FiniteField) -> np.ndarray:
    """Q = sum_x |x><-x| in the field's index order."""
    q_mat = np.zeros((f.q, f.q), dtype=complex)
    q_mat[np.arange(f.q), f.neg_table] = 1.0
    return q_mat


def closed_form_G(q: int) -> np.ndarray:
    """I - Q/q + |0><0|/q."""
    f = field_of_order(q)
    g = np.eye(q, dtype=complex) - reflection_matrix(f) / q
    g[0, 0] += 1.0 / q
    return g


def closed_form_G_inverse(q: int) -> np.ndarray:
    """(1 + 1/(q^2-1)) I + q/(q^2-1) Q - 1/(q-1) |0><0|."""
    f = field_of_order(q)
    g_inv = (1 + 1 / (q * q - 1)) * np.eye(q, dtype=complex) + q / (q * q - 1) * reflection_matrix(f)
    g_inv[0, 0] -= 1.0 / (q - 1)
    return g_inv


def pruned_overlap_bound(q: int) -> float:
    """Upper bound on q^2 tr(F_i F_j), i != j, for construction I."""
    return ((1 + 1 / (q * q - 1)) ** 2 / q
            + (q / (q * q - 1)) ** 2 / q
            + (1 / (q * (q - 1))) ** 2)


def pruned_triangle_bound(q: int) -> float:
    """Rigorous bound on q^2 tr(F_i F_j), i != j: |<v_i|G^{-1}|v_j>|^2 via the triangle inequality.

    With G^{-1} = aI + bQ - c|0><0|, every pair has |<v_i|v_j>|, |<v_i|Q v_j>| <= q^{-1/2}
    unless one of them is 1 and the other 0; e_0 is an eigenvector of G^{-1} with eigenvalue 1.
    """
    a, b, c = 1 + 1 / (q * q - 1), q / (q * q - 1), 1 / (q - 1)
    return max((a + b) / np.sqrt(q) + c / q, b) ** 2


def asic_pruned(q: int) -> ProjectorPOVM:
    """Construction I: symmetrized projectors of q^2 vectors pruned from q + 1 MUBs."""
    return symmetrize_to_povm(pruned_mub_system(q))


# --- construction II ------------------------------------------------------------


def default_perturbation(p: int) -> Fraction:
    return 1 - Fraction(1, p**3)


def _perturbation_float(r) -> float:
    r_f = float(r)
    if not 0.0 < r_f < 1.0:
        raise ValueError(f"r must lie in (0, 1), got {r}")
    return r_f


def _check_odd_prime(p: int) -> FiniteField:
    if p == 2:
        raise ValueError("p must be an odd prime")
    f = make_field(p, 1)
    return f


def perturbed_normalizers(p: int, r) -> np.ndarray:
    """N_a = (sum_x r^{2ax})^{-1/2} for a = 0..p-1."""
    r_f = _perturbation_float(r)
    x = np.arange(p)
    return np.array([np.sum(r_f ** (2.0 * a * x)) ** -0.5 for a in range(p)])


def perturbed_system(p: int, r=None) -> VectorSystem:
    """phi_{a,b} = N_a (r^{ax} e_p(a x^2 + b x))_x; exponents a*x are plain integers."""
    _check_odd_prime(p)
    r = default_perturbation(p) if r is None else r
    r_f = _perturbation_float(r)
    x = np.arange(p, dtype=np.int64)
    a = x[:, None, None]
    b = x[None, :, None]
    amp = r_f ** (a * x[None, None, :]).astype(float)
    phase = roots_of_unity(p, a * x * x + b * x)
    vecs = perturbed_normalizers(p, r_f)[:, None, None] * amp * phase
    labels = [("pert", ai, bi) for ai in range(p) for bi in range(p)]
    prov = {"construction": "asic2", "p": p, "r": r_f}
    if isinstance(r, Fraction):
        prov["r_exact"] = f"{r.numerator}/{r.denominator}"

    def hp_builder(bits: int) -> list[list]:
        return _perturbed_vectors_hp(p, r, bits)

    return VectorSystem(n=p, vectors=vecs.reshape(p * p, p), labels=labels,
                        provenance=prov, hp_builder=hp_builder)


def _perturbed_vectors_hp(p: int, r, bits: int) -> list[list]:
    # unnormalized: row scaling does not change the span of the projectors
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        if isinstance(r, Fraction):
            r_hp = gmpy2.mpfr(r.numerator) / r.denominator
        else:
            r_hp = gmpy2.mpfr(float(r))
        two_pi = 2 * gmpy2.const_pi()
        zeta = [gmpy2.mpc(gmpy2.cos(two_pi * k / p), gmpy2.sin(two_pi * k / p)) for k in range(p)]
        return [[r_hp ** (a * x) * zeta[(a * x * x + b * x) % p] for x in range(p)]
                for a in range(p) for b in range(p)]


def perturbed_rank_bits(p: int) -> int:
    """Working precision for the rank certificate; the smallest pivot decays roughly like p^{-3p}."""
    return 128 + 16 * p


def perturbed_frame_diag(p: int, r=None) -> np.ndarray:
    """Diagonal of G = sum_{a,b} E_{a,b}: entry x is sum_a N_a^2 r^{2ax}."""
    _check_odd_prime(p)
    r_f = _perturbation_float(default_perturbation(p) if r is None else r)
    x = np.arange(p)
    n2 = perturbed_normalizers(p, r_f) ** 2
    return np.array([np.sum(n2 * r_f ** (2.0 * np.arange(p) * xi)) for xi in x])


def asic_perturbed(p: int, r=None) -> ProjectorPOVM:
    """Construction II: symmetrized projectors of the perturbed quadratic-phase vectors."""
    return symmetrize_to_povm(perturbed_system(p, r))


# --- polynomial families ---------------------------------------------------------


@dataclass(frozen=True)
class PolynomialFamily:
    """Polynomials sum a_nu X^nu over a fixed set of degrees, coefficients 0..n-1.

    kind "F": degrees 2..d+1; kind "G": degrees 1..d.
    """

    n: int
    d: int
    kind: str = "F"

    def __post_init__(self):
        if self.kind not in ("F", "G"):
            raise ValueError(f"family kind must be 'F' or 'G', got {self.kind!r}")
        if self.n < 1 or self.d < 1:
            raise ValueError("n and d must be positive")

    @property
    def degrees(self) -> tuple[int, ...]:
        start = 2 if self.kind == "F" else 1
        return tuple(range(start, start + self.d))

    def __len__(self) -> int:
        return self.n**self.d

    def coefficients(self, k: int) -> tuple[int, ...]:
        """Mixed-radix digits of k (least significant first), one per ascending degree."""
        if not 0 <= k < len(self):
            raise IndexError(k)
        digits = []
        for _ in range(self.d):
            digits.append(k % self.n)
            k //= self.n
        return tuple(digits)


def enumerate_poly_family(family: PolynomialFamily) -> Iterator[tuple[int, ...]]:
    for k in range(len(family)):
        yield family.coefficients(k)


def poly_values_mod(coeffs, degrees, us, p: int) -> np.ndarray:
    """sum_nu a_nu u^nu mod p evaluated at integer points ``us``."""
    us = np.asarray(us, dtype=np.int64) % p
    out = np.zeros(us.shape, dtype=np.int64)
    for a, nu in zip(coeffs, degrees):
        if a % p:
            powers = np.array([pow(int(u), nu, p) for u in us.ravel()], dtype=np.int64).reshape(us.shape)
            out = (out + (a % p) * powers) % p
    return out


def _family_phase_table(family: PolynomialFamily, us, p: int) -> np.ndarray:
    """e_p(f(u)) for every f in the family, shape (len(family), len(us))."""
    us = np.asarray(us, dtype=np.int64)
    pw = np.array([[pow(int(u), nu, p) for u in us] for nu in family.degrees], dtype=np.int64)
    coeffs = np.array(list(enumerate_poly_family(family)), dtype=np.int64).reshape(len(family), family.d)
    expo = (coeffs % p) @ pw % p
    return roots_of_unity(p, expo)


def amub_polynomial(n: int, d: int = 1, entry_cap: int = DEFAULT_ENTRY_CAP) -> VectorSystem:
    """Standard basis plus B_f = {n^{-1/2} (e_p(f(u)) e_n(iu))_{u=1..n} : i = 1..n}, f in F_d."""
    if n < 2 or d < 1:
        raise ValueError("need n >= 2 and d >= 1")
    family = PolynomialFamily(n, d, "F")
    _check_cap(n + len(family) * n, n, entry_cap)
    p = next_prime_geq(n)
    u = np.arange(1, n + 1)
    i = np.arange(1, n + 1)
    fourier = roots_of_unity(n, np.outer(i, u))                 # [i, u]
    phases = _family_phase_table(family, u, p)                  # [f, u]
    vecs = (phases[:, None, :] * fourier[None, :, :]).reshape(-1, n) / np.sqrt(n)
    vecs = np.concatenate([standard_basis(n), vecs])
    labels = [("std", x) for x in range(1, n + 1)]
    labels += [("poly", k, ii) for k in range(len(family)) for ii in range(1, n + 1)]
    groups = [list(range(n))] + [list(range(n + k * n, n + (k + 1) * n)) for k in range(len(family))]
    return VectorSystem(n=n, vectors=vecs, labels=labels, basis_groups=groups,
                        provenance={"construction": "amub-poly", "n": n, "d": d, "p": p, "prime_gap": p - n})


def approx_sic_vectors(n: int, entry_cap: int = DEFAULT_ENTRY_CAP) -> VectorSystem:
    """n^2 vectors n^{-1/2} (e_p(f(u)))_{u=1..n}, f = a_2 X^2 + a_3 X^3."""
    if n < 2:
        raise ValueError("need n >= 2")
    family = PolynomialFamily(n, 2, "F")
    _check_cap(len(family), n, entry_cap)
    p = next_prime_geq(n)
    vecs = _family_phase_table(family, np.arange(1, n + 1), p) / np.sqrt(n)
    labels = [("poly", k) + family.coefficients(k) for k in range(len(family))]
    return VectorSystem(n=n, vectors=vecs, labels=labels,
                        provenance={"construction": "asic-approx", "n": n, "p": p, "prime_gap": p - n})


def amub_character(n: int, d: int = 1, prime_cap: int | None = None,
                   entry_cap: int = DEFAULT_ENTRY_CAP) -> VectorSystem:
    """Standard basis plus B_f = {n^{-1/2} (e_p(f(u)) chi(u)^i)_{u in U_n} : i = 1..n}, f in G_d."""
    if n < 2 or d < 1:
        raise ValueError("need n >= 2 and d >= 1")
    family = PolynomialFamily(n, d, "G")
    _check_cap(n + len(family) * n, n, entry_cap)
    p = smallest_prime_congruent_1(n, cap=prime_cap)
    chi = character_of_order(p, n)
    # chi restricted to U_n has order n / gcd(n, (p-1)/n); the bases are orthonormal only when it is n
    faithful = math.gcd(n, (p - 1) // n) == 1
    if not faithful:
        log.warning("chi is not faithful on U_%d (p=%d); the bases B_f will not be orthonormal", n, p)
    units = np.array(subgroup_un(p, n).elements, dtype=np.int64)
    i = np.arange(1, n + 1)
    ind = np.asarray(chi.log_table, dtype=np.int64)[units]
    char_part = roots_of_unity(n, np.outer(i, ind))             # chi(u)^i, [i, u]
    phases = _family_phase_table(family, units, p)              # [f, u]
    vecs = (phases[:, None, :] * char_part[None, :, :]).reshape(-1, n) / np.sqrt(n)
    vecs = np.concatenate([standard_basis(n), vecs])
    labels = [("std", int(x)) for x in units]
    labels += [("char", k, ii) for k in range(len(family)) for ii in range(1, n + 1)]
    groups = [list(range(n))] + [list(range(n + k * n, n + (k + 1) * n)) for k in range(len(family))]
    return VectorSystem(n=n, vectors=vecs, labels=labels, basis_groups=groups,
                        provenance={"construction": "amub-char", "n": n, "d": d, "p": p,
                                    "generator": chi.g, "least_prime_ratio": least_prime_ratio(n, p),
                                    "character_faithful": faithful})


def character_bound(n: int, d: int, p: int) -> float:
    """d sqrt(p) / n."""
    return d * np.sqrt(p) / n


CONSTRUCTIONS = ("intro", "mub", "asic1", "asic2", "amub-poly", "asic-approx", "amub-char")


def build(name: str, q: int | None = None, p: int | None = None, n: int | None = None,
          d: int | None = None, r=None):
    """Dispatch by construction name; POVM constructions return ProjectorPOVM."""

    def need(value, flag):
        if value is None:
            raise ValueError(f"construction {name!r} needs --{flag}")
        return value

    if name == "intro":
        return raw_povm(intro_example(), weight=0.5)
    if name == "mub":
        return mub_prime_power(need(q, "q"))
    if name == "asic1":
        return asic_pruned(need(q, "q"))
    if name == "asic2":
        return asic_perturbed(need(p, "p"), r)
    if name == "amub-poly":
        return amub_polynomial(need(n, "n"), 1 if d is None else d)
    if name == "asic-approx":
        return approx_sic_vectors(need(n, "n"))
    if name == "amub-char":
        return amub_character(need(n, "n"), 1 if d is None else d)
    raise ValueError(f"unknown construction {name!r}; choose from {', '.join(CONSTRUCTIONS)}")
