"""Brute-force reference values in plain Python (cmath only, no package imports).

Run as a script to print the values frozen in ``frozen.py``:

    python3 tests/oracle.py
"""

from __future__ import annotations

import cmath
import math
from itertools import product


def is_prime_td(m: int) -> bool:
    if m < 2:
        return False
    k = 2
    while k * k <= m:
        if m % k == 0:
            return False
        k += 1
    return True


def next_prime_td(n: int) -> int:
    while not is_prime_td(n):
        n += 1
    return n


def prime_1_mod(n: int) -> int:
    p = n + 1
    while not is_prime_td(p):
        p += n
    return p


def primitive_root_td(p: int) -> int:
    for g in range(2, p):
        if len({pow(g, k, p) for k in range(p - 1)}) == p - 1:
            return g
    return 1


def e(m: int, k: int) -> complex:
    return cmath.exp(2j * math.pi * (k % m) / m)


def inner(u, v) -> complex:
    return sum(a.conjugate() * b for a, b in zip(u, v))


def max_cross(groups: list[list[list[complex]]]) -> float:
    """Largest |<u|v>| over vectors in different groups."""
    best = 0.0
    for gi in range(len(groups)):
        for gj in range(gi + 1, len(groups)):
            for u in groups[gi]:
                for v in groups[gj]:
                    best = max(best, abs(inner(u, v)))
    return best


# --- construction II ----------------------------------------------------------------


def perturbed_max_sq(p: int, r: float | None = None) -> dict:
    """max over distinct pairs of |<phi_i|G^{-1}|phi_j>|^2 with G = sum phi phi^* / p."""
    r = 1 - p**-3 if r is None else r
    vecs = []
    for a in range(p):
        norm = sum(r ** (2 * a * x) for x in range(p)) ** -0.5
        for b in range(p):
            vecs.append([norm * r ** (a * x) * e(p, a * x * x + b * x) for x in range(p)])
    g = [[sum(v[x] * v[y].conjugate() for v in vecs) / p for y in range(p)] for x in range(p)]
    off = math.sqrt(sum(abs(g[x][y]) ** 2 for x in range(p) for y in range(p) if x != y))
    diag = [g[x][x].real for x in range(p)]
    best = 0.0
    for i in range(len(vecs)):
        for j in range(i + 1, len(vecs)):
            z = sum(vecs[i][x].conjugate() * vecs[j][x] / diag[x] for x in range(p))
            best = max(best, abs(z) ** 2)
    return {"max_sq": best, "off_diagonal": off, "diag": diag}


# --- polynomial systems --------------------------------------------------------------


def poly_family(n: int, degrees: tuple[int, ...]):
    for coeffs in product(range(n), repeat=len(degrees)):
        yield coeffs


def poly_value(coeffs, degrees, u: int, p: int) -> int:
    return sum(a * pow(u, nu, p) for a, nu in zip(coeffs, degrees)) % p


def amub_poly_cross_max(n: int, d: int) -> float:
    p = next_prime_td(n)
    degrees = tuple(range(2, d + 2))
    s = 1 / math.sqrt(n)
    groups = [[[1.0 + 0j if x == k else 0j for x in range(n)] for k in range(n)]]
    for coeffs in poly_family(n, degrees):
        groups.append([[s * e(p, poly_value(coeffs, degrees, u, p)) * e(n, i * u) for u in range(1, n + 1)]
                       for i in range(1, n + 1)])
    return max_cross(groups)


def approx_sic_max(n: int) -> float:
    p = next_prime_td(n)
    degrees = (2, 3)
    s = 1 / math.sqrt(n)
    vecs = [[s * e(p, poly_value(c, degrees, u, p)) for u in range(1, n + 1)] for c in poly_family(n, degrees)]
    return max_cross([[v] for v in vecs])


def amub_char_cross_max(n: int, d: int) -> tuple[float, int]:
    p = prime_1_mod(n)
    g = primitive_root_td(p)
    h = pow(g, (p - 1) // n, p)
    units = sorted(pow(h, k, p) for k in range(n))
    dlog = {pow(g, k, p): k for k in range(p - 1)}
    degrees = tuple(range(1, d + 1))
    s = 1 / math.sqrt(n)
    groups = [[[1.0 + 0j if x == k else 0j for x in range(n)] for k in range(n)]]
    for coeffs in poly_family(n, degrees):
        groups.append([[s * e(p, poly_value(coeffs, degrees, u, p)) * e(n, i * dlog[u]) for u in units]
                       for i in range(1, n + 1)])
    return max_cross(groups), p


# --- construction I ------------------------------------------------------------------


def pruned_max_prime(q: int) -> float:
    """q^2 tr(F_i F_j) maximum for prime q, via the closed-form G^{-1} applied by hand."""
    s = 1 / math.sqrt(q)
    vecs = []
    for a in range(q):
        for b in range(q):
            if b == 0:
                vecs.append([1.0 + 0j if x == a else 0j for x in range(q)])
            else:
                vecs.append([s * e(q, a * x * x + b * x) for x in range(q)])
    alpha, beta, gamma = 1 + 1 / (q * q - 1), q / (q * q - 1), 1 / (q - 1)

    def g_inv(v):
        w = [alpha * v[x] + beta * v[(-x) % q] for x in range(q)]
        w[0] -= gamma * v[0]
        return w

    best = 0.0
    for i in range(len(vecs)):
        gi = g_inv(vecs[i])
        for j in range(i + 1, len(vecs)):
            best = max(best, abs(inner(vecs[j], gi)) ** 2)
    return best


def mixed_ratio(p: int, coeffs, k: int, n: int) -> float:
    """|sum_{u=1}^p e_p(F(u)) e_n(k u)| / p^{3/4}."""
    total = sum(e(p, sum(c * pow(u, j, p) for j, c in enumerate(coeffs))) * e(n, k * u) for u in range(1, p + 1))
    return abs(total) / p**0.75


if __name__ == "__main__":
    print(f"mixed p=101 F=X^3 k=1 n=100: ratio={mixed_ratio(101, (0, 0, 0, 1), 1, 100)!r}")
    for p in (3, 5, 7, 11, 13):
        res = perturbed_max_sq(p)
        print(f"perturbed p={p}: max_sq={res['max_sq']!r} max_sq*p={res['max_sq'] * p:.6f} off={res['off_diagonal']:.2e}")
    for n in (4, 6, 10, 12):
        for d in (1, 2):
            m = amub_poly_cross_max(n, d)
            expo = 1 / 3 if d == 1 else 1 / 4
            print(f"amub-poly n={n} d={d}: max={m!r} scaled={m * n**expo!r}")
    for n in (7, 8, 11, 12, 13):
        m = approx_sic_max(n)
        print(f"approx-sic n={n}: max={m!r} minus 2/sqrt(n)={m - 2 / math.sqrt(n)!r}")
    for n, d in ((4, 1), (6, 1), (10, 1), (12, 1), (6, 2)):
        m, p = amub_char_cross_max(n, d)
        print(f"amub-char n={n} d={d} p={p}: max={m!r} bound={d * math.sqrt(p) / n!r}")
    for q in (3, 5, 7, 13):
        print(f"pruned q={q}: max={pruned_max_prime(q)!r}")
