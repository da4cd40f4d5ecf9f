"""Complete and incomplete exponential / character sums mod p against their classical bounds.

Weil-type bounds carry explicit constants and are asserted.  The mixed and
incomplete (Weyl) estimates only hold up to unknown constants, so those kinds
report a ratio and never fail.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .numtheory import Character, character_of_order, is_prime, roots_of_unity

ABS_TOL = 1e-8
REL_TOL = 1e-9


class BoundViolation(AssertionError):
    pass


@dataclass(frozen=True)
class SumBound:
    kind: str
    p: int
    degree: int
    sum_modulus: float
    bound_value: float
    ratio: float
    asserted: bool


def _degree(coeffs) -> int:
    d = len(coeffs) - 1
    while d > 0 and coeffs[d] == 0:
        d -= 1
    return d


def poly_eval_mod(coeffs, us, p: int) -> np.ndarray:
    """Horner evaluation of sum c_k X^k (low degree first) at integer points, mod p."""
    us = np.asarray(us, dtype=np.int64) % p
    out = np.zeros(us.shape, dtype=np.int64)
    for c in reversed(list(coeffs)):
        out = (out * us + int(c)) % p
    return out


def count_distinct_roots(coeffs, p: int) -> int:
    """Distinct roots in the algebraic closure, via the squarefree part's degree."""
    from .ffield import _poly_gcd, _trim

    f = _trim([int(c) % p for c in coeffs])
    if len(f) <= 1:
        return 0
    deriv = _trim([(k * c) % p for k, c in enumerate(f)][1:])
    if not deriv:
        # f is a p-th power; fall back to counting roots in F_p only
        return int(np.count_nonzero(poly_eval_mod(f, np.arange(p), p) == 0))
    g = _poly_gcd(f, deriv, p)
    return (len(f) - 1) - (len(g) - 1)


def _ratio(value: float, bound: float) -> float:
    if bound > 0:
        return value / bound
    return 0.0 if value <= ABS_TOL else math.inf


def _check(kind: str, p: int, d: int, modulus: float, bound: float, assert_bound: bool) -> SumBound:
    out = SumBound(kind, p, d, modulus, bound, _ratio(modulus, bound), assert_bound)
    if assert_bound and modulus > bound * (1 + REL_TOL) + ABS_TOL:
        raise BoundViolation(f"{kind} sum {modulus:.12g} exceeds bound {bound:.12g} (p={p}, deg={d})")
    return out


def weil_sum(p: int, F, chi: Character, G=(0, 1), power: int = 1) -> complex:
    """sum_{u=1}^p e_p(F(u)) chi^power(G(u)), with chi(0) taken as 0."""
    u = np.arange(1, p + 1)
    g_vals = poly_eval_mod(G, u, p)
    keep = g_vals != 0
    terms = roots_of_unity(p, poly_eval_mod(F, u[keep], p)) * chi.values(g_vals[keep], power)
    return complex(terms.sum())


def empirical_sum_bound(p: int, kind: str, F, **params) -> SumBound:
    """Evaluate one sum and compare it with the matching bound.

    kind="weil":  params order (>= 2, divides p - 1), power=1, G=(0, 1), nu (distinct roots of G,
                  computed when omitted).  Asserts |S| <= (d + nu - 1) sqrt(p).
    kind="gauss": complete additive sum over x in F_p; asserts |S| <= (d - 1) sqrt(p) for 1 <= d < p.
    kind="mixed": params k, n; S = sum_{u=1}^p e_p(F(u)) e_n(ku), d >= 2; reports |S| / p^{2/3}
                  (d = 2) or |S| / p^{3/4} (d >= 3).
    kind="weyl":  params h <= p, eps=0; S = sum_{u=1}^h e_p(F(u)), d >= 2; reports |S| divided by
                  h^{1+eps} (1/h + 1/p + p/h^d)^{1/2^{d-1}}.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    F = [int(c) % p for c in F] or [0]
    d = _degree(F)
    if kind == "weil":
        order = int(params.get("order", 0))
        if order < 2 or (p - 1) % order:
            raise ValueError("weil kind needs a nontrivial character order dividing p - 1")
        G = tuple(params.get("G", (0, 1)))
        power = int(params.get("power", 1))
        if math.gcd(power, order) != 1:
            raise ValueError("power must be coprime to the order so chi^power keeps exact order")
        nu = params.get("nu")
        nu = count_distinct_roots(G, p) if nu is None else int(nu)
        chi = character_of_order(p, order)
        s = abs(weil_sum(p, F, chi, G, power))
        return _check(kind, p, d, s, (d + nu - 1) * math.sqrt(p), True)
    if kind == "gauss":
        if not 1 <= d < p:
            raise ValueError("gauss kind needs 1 <= deg F < p")
        s = abs(roots_of_unity(p, poly_eval_mod(F, np.arange(p), p)).sum())
        return _check(kind, p, d, float(s), (d - 1) * math.sqrt(p), True)
    if kind == "mixed":
        if d < 2:
            raise ValueError("mixed kind needs deg F >= 2")
        k, n = int(params["k"]), int(params["n"])
        u = np.arange(1, p + 1)
        s = abs((roots_of_unity(p, poly_eval_mod(F, u, p)) * roots_of_unity(n, k * u)).sum())
        ref = p ** (2 / 3) if d == 2 else p ** 0.75
        return _check(kind, p, d, float(s), ref, False)
    if kind == "weyl":
        if d < 2:
            raise ValueError("weyl kind needs deg F >= 2")
        h = int(params["h"])
        if not 1 <= h <= p:
            raise ValueError("weyl kind needs 1 <= h <= p")
        eps = float(params.get("eps", 0.0))
        s = abs(roots_of_unity(p, poly_eval_mod(F, np.arange(1, h + 1), p)).sum())
        ref = h ** (1 + eps) * (1 / h + 1 / p + p / h**d) ** (1 / 2 ** (d - 1))
        return _check(kind, p, d, float(s), ref, False)
    raise ValueError(f"unknown sum kind {kind!r}")


@dataclass(frozen=True)
class WeilSweepRow:
    p: int
    order: int
    degree: int
    polynomials: int
    max_modulus: float
    bound: float
    max_ratio: float
    violations: int


def _odd_primes(limit: int) -> list[int]:
    return [m for m in range(3, limit + 1) if is_prime(m)]


def _monic_phase_rows(p: int, deg: int, u: np.ndarray) -> np.ndarray:
    """e_p(u^deg + sum_{k=2}^{deg-1} c_k u^k) for every choice of the middle coefficients."""
    powers = np.array([[pow(int(x), k, p) for x in u] for k in range(deg + 1)], dtype=np.int64)
    mids = np.array(list(itertools.product(range(p), repeat=deg - 2)), dtype=np.int64).reshape(p ** (deg - 2), deg - 2)
    expo = (powers[deg][None, :] + mids @ powers[2:deg]) % p
    return roots_of_unity(p, expo)


def weil_sweep(p_max: int = 61, deg_max: int = 4, p_min: int = 3) -> list[WeilSweepRow]:
    """Every monic F of degree <= deg_max against every nontrivial character, G(X) = X.

    The constant term of F only rotates the sum, and the linear coefficient
    enters as an additive character in u, so each batch of p linear
    coefficients is one DFT.  Rows aggregate over characters of equal order.
    """
    rows = []
    for p in _odd_primes(p_max):
        if p < p_min:
            continue
        u = np.arange(1, p)  # u = p contributes chi(0) = 0
        dft = roots_of_unity(p, np.outer(u, np.arange(p)))  # [u, a1]
        base = character_of_order(p, p - 1)
        tables = {deg: _monic_phase_rows(p, deg, u) for deg in range(2, deg_max + 1)}
        for order in sorted(s for s in range(2, p) if (p - 1) % s == 0):
            step = (p - 1) // order
            chis = [base.values(u, step * j) for j in range(1, order) if math.gcd(j, order) == 1]
            for deg in range(deg_max + 1):
                bound = deg * math.sqrt(p)  # (d + nu - 1) sqrt(p) with nu = 1
                worst, count, bad = 0.0, 0, 0
                for chi_vals in chis:
                    if deg == 0:
                        mods = np.array([abs(chi_vals.sum())])
                    elif deg == 1:
                        mods = np.array([abs((chi_vals * dft[:, 1]).sum())])
                    else:
                        mods = np.abs((tables[deg] * chi_vals[None, :]) @ dft).ravel()
                    count += mods.size
                    worst = max(worst, float(mods.max()))
                    bad += int(np.count_nonzero(mods > bound * (1 + REL_TOL) + ABS_TOL))
                rows.append(WeilSweepRow(p, order, deg, count, worst, bound, _ratio(worst, bound), bad))
    return rows


def mixed_sweep(primes, F=(0, 0, 0, 1), k: int = 1, n: int | None = None) -> list[SumBound]:
    """Mixed sums for each prime; n defaults to p - 1."""
    return [empirical_sum_bound(p, "mixed", F, k=k, n=(p - 1 if n is None else n)) for p in primes]
