"""Primes, roots of unity, primitive roots and multiplicative characters mod p."""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field

import numpy as np

log = logging.getLogger(__name__)

UINT64_LIMIT = 1 << 64

# Strong-pseudoprime witnesses that are complete for every n < 2**64.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class SearchLimitError(RuntimeError):
    """A prime search ran past its configured cap."""


def is_prime(m: int) -> bool:
    """Deterministic primality test for 0 <= m < 2**64."""
    m = int(m)
    if m < 0 or m >= UINT64_LIMIT:
        raise ValueError(f"is_prime expects 0 <= m < 2**64, got {m}")
    if m < 2:
        return False
    for b in _MR_BASES:
        if m % b == 0:
            return m == b
    d, s = m - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, m)
        if x == 1 or x == m - 1:
            continue
        for _ in range(s - 1):
            x = x * x % m
            if x == m - 1:
                break
        else:
            return False
    return True


def next_prime_geq(n: int) -> int:
    """Smallest prime p >= n. The gap p - n is logged at debug level."""
    n = int(n)
    if n < 2:
        raise ValueError(f"next_prime_geq expects n >= 2, got {n}")
    p = n
    while not is_prime(p):
        p += 1
        if p >= UINT64_LIMIT:
            raise OverflowError(f"no prime >= {n} below 2**64")
    log.debug("next_prime_geq(%d) = %d, gap %d", n, p, p - n)
    return p


def smallest_prime_congruent_1(n: int, cap: int | None = None) -> int:
    """Least prime p with p = 1 (mod n).

    The search stops once p exceeds ``cap`` (default ``10**6 * n``).
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if cap is None:
        cap = 10**6 * n
    p = n + 1
    while p <= cap:
        if p < UINT64_LIMIT and is_prime(p):
            log.debug("least prime = 1 mod %d is %d (ratio %s)", n, p, least_prime_ratio(n, p))
            return p
        p += n
    raise SearchLimitError(f"no prime = 1 mod {n} found up to {cap}")


def least_prime_ratio(n: int, p: int) -> float | None:
    """Observed p / (n log^2 n); only a diagnostic, undefined for n < 2."""
    if n < 2:
        return None
    return p / (n * math.log(n) ** 2)


def root_of_unity(m: int, z: float) -> complex:
    """exp(2 pi i z / m). Integer z is reduced mod m first."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if isinstance(z, (int, np.integer)):
        z = int(z) % m
        if z == 0:
            return 1 + 0j
        if 4 * z == m:
            return 1j
        if 2 * z == m:
            return -1 + 0j
        if 4 * z == 3 * m:
            return -1j
    return cmath.exp(2j * math.pi * z / m)


def roots_of_unity(m: int, z) -> np.ndarray:
    """Vectorised e_m over an integer array (reduced mod m before exponentiation)."""
    z = np.mod(np.asarray(z, dtype=np.int64), m)
    table = np.exp(2j * np.pi * np.arange(m) / m)
    # exact values at the axis points keep orthogonality sums clean
    for k, val in ((0, 1.0), (m / 4, 1j), (m / 2, -1.0), (3 * m / 4, -1j)):
        if float(k).is_integer() and int(k) < m:
            table[int(k)] = val
    return table[z]


def _prime_factors(m: int) -> list[int]:
    out = []
    d = 2
    while d * d <= m:
        if m % d == 0:
            out.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        out.append(m)
    return out


def find_primitive_root(p: int) -> int:
    """Smallest generator of (Z/pZ)^x."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p == 2:
        return 1
    factors = _prime_factors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in factors):
            return g
    raise AssertionError("unreachable: every prime has a primitive root")


def _check_divisor(p: int, n: int) -> None:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if n < 1 or (p - 1) % n:
        raise ValueError(f"order {n} does not divide p - 1 = {p - 1}")


@dataclass(frozen=True)
class Character:
    """Multiplicative character chi mod p of exact order n with chi(g^k) = e_n(k)."""

    p: int
    n: int
    g: int
    log_table: tuple[int, ...] = field(repr=False)  # log_table[x] = ind_g(x), index 0 unused

    def index(self, x: int) -> int:
        x = int(x) % self.p
        if x == 0:
            raise ValueError("character is not evaluated at 0")
        return self.log_table[x]

    def exponent(self, x: int, power: int = 1) -> int:
        """k with chi(x)**power = e_n(k), 0 <= k < n."""
        return (self.index(x) * power) % self.n

    def __call__(self, x: int, power: int = 1) -> complex:
        return root_of_unity(self.n, self.exponent(x, power))

    def values(self, xs, power: int = 1) -> np.ndarray:
        xs = np.mod(np.asarray(xs, dtype=np.int64), self.p)
        if np.any(xs == 0):
            raise ValueError("character is not evaluated at 0")
        idx = np.asarray(self.log_table, dtype=np.int64)[xs]
        return roots_of_unity(self.n, idx * power)


def character_of_order(p: int, n: int) -> Character:
    _check_divisor(p, n)
    g = find_primitive_root(p)
    table = [0] * p
    x = 1
    for k in range(p - 1):
        table[x] = k
        x = x * g % p
    return Character(p=p, n=n, g=g, log_table=tuple(table))


@dataclass(frozen=True)
class SubgroupUn:
    """The n-th roots of unity in (Z/pZ)^x, sorted ascending."""

    p: int
    n: int
    elements: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x: int) -> bool:
        return int(x) % self.p in self.elements


def subgroup_un(p: int, n: int) -> SubgroupUn:
    _check_divisor(p, n)
    g = find_primitive_root(p)
    h = pow(g, (p - 1) // n, p)
    elems = sorted(pow(h, k, p) for k in range(n))
    return SubgroupUn(p=p, n=n, elements=tuple(elems))
