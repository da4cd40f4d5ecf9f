"""Arithmetic in F_{p^r} (odd p) in the power basis, with the absolute trace."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .numtheory import is_prime

DEFAULT_SIZE_CAP = 1 << 20


# --- dense polynomials over F_p, coefficient lists low degree first ---------


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: list[int], m: list[int], p: int) -> list[int]:
    a = [c % p for c in a]
    _trim(a)
    inv_lead = pow(m[-1], -1, p)
    dm = len(m) - 1
    while len(a) - 1 >= dm and a:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, mc in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mc) % p
        _trim(a)
    return a


def _poly_mul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _poly_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim([c % p for c in a]), _trim([c % p for c in b])
    while b:
        a, b = b, _poly_mod(a, b, p)
    return a


def _poly_powmod(base: list[int], e: int, m: list[int], p: int) -> list[int]:
    result = [1]
    base = _poly_mod(base, m, p)
    while e:
        if e & 1:
            result = _poly_mod(_poly_mul(result, base, p), m, p)
        base = _poly_mod(_poly_mul(base, base, p), m, p)
        e >>= 1
    return result


def is_irreducible(m: list[int], p: int) -> bool:
    """Ben-Or test: monic m of degree r is irreducible iff gcd(X^{p^i} - X, m) = 1 for i <= r/2."""
    r = len(m) - 1
    if r <= 0:
        return False
    if r == 1:
        return True
    xp = [0, 1]
    for _ in range(r // 2):
        xp = _poly_powmod(xp, p, m, p)
        diff = list(xp) + [0] * max(0, 2 - len(xp))
        diff[1] = (diff[1] - 1) % p
        if len(_poly_gcd(m, _trim(diff), p)) > 1:
            return False
    return True


def smallest_irreducible(p: int, r: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree r (lower coeffs, constant term most significant)."""
    if r == 1:
        return (0, 1)
    for low in itertools.product(range(p), repeat=r):
        m = list(low) + [1]
        if m[0] == 0:
            continue
        if is_irreducible(m, p):
            return tuple(m)
    raise AssertionError(f"no irreducible polynomial of degree {r} over F_{p}")


# --- fields ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FiniteField:
    """F_q, q = p**r, elements stored as coefficient tuples of length r.

    Elements are indexed in lexicographic order of their coefficient vectors
    (c_0, ..., c_{r-1}), so index 0 is zero and index 1 is 1 when r == 1.
    Index arrays from ``add_table`` etc. use this ordering.
    """

    p: int
    r: int
    modulus: tuple[int, ...]
    q: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "q", self.p**self.r)
        if len(self.modulus) != self.r + 1 or self.modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree r")
        if not is_irreducible(list(self.modulus), self.p):
            raise ValueError(f"modulus {self.modulus} is reducible over F_{self.p}")

    def __repr__(self) -> str:
        return f"FiniteField(p={self.p}, r={self.r}, modulus={self.modulus})"

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteField) and (self.p, self.modulus) == (other.p, other.modulus)

    def __hash__(self) -> int:
        return hash((self.p, self.modulus))

    # element construction
    def element(self, value) -> FieldElement:
        if isinstance(value, FieldElement):
            if value.field != self:
                raise ValueError("element belongs to a different field")
            return value
        if isinstance(value, (int, np.integer)):
            coeffs = [0] * self.r
            coeffs[0] = int(value) % self.p
            return FieldElement(self, tuple(coeffs))
        coeffs = [int(c) % self.p for c in value]
        if len(coeffs) > self.r:
            coeffs = _poly_mod(coeffs, list(self.modulus), self.p)
        coeffs += [0] * (self.r - len(coeffs))
        return FieldElement(self, tuple(coeffs))

    def from_index(self, k: int) -> FieldElement:
        digits = []
        for _ in range(self.r):
            digits.append(k % self.p)
            k //= self.p
        return FieldElement(self, tuple(reversed(digits)))

    def zero(self) -> FieldElement:
        return self.element(0)

    def one(self) -> FieldElement:
        return self.element(1)

    def generator(self) -> FieldElement:
        """The class of X (a root of the modulus)."""
        return self.element([0, 1]) if self.r > 1 else self.element(-self.modulus[0])

    def __iter__(self):
        return iter(enumerate_field(self))

    def __len__(self) -> int:
        return self.q

    # index tables, used by the vector constructions
    @cached_property
    def _elements(self) -> tuple[FieldElement, ...]:
        return tuple(self.from_index(k) for k in range(self.q))

    @cached_property
    def add_table(self) -> np.ndarray:
        coeffs = np.array([e.coeffs for e in self._elements], dtype=np.int64)
        weights = self.p ** np.arange(self.r - 1, -1, -1, dtype=np.int64)
        s = (coeffs[:, None, :] + coeffs[None, :, :]) % self.p
        return s @ weights

    @cached_property
    def mul_table(self) -> np.ndarray:
        els = self._elements
        t = np.empty((self.q, self.q), dtype=np.int64)
        for i, a in enumerate(els):
            for j in range(i, self.q):
                t[i, j] = t[j, i] = (a * els[j]).index
        return t

    @cached_property
    def neg_table(self) -> np.ndarray:
        return np.array([(-e).index for e in self._elements], dtype=np.int64)

    @cached_property
    def trace_table(self) -> np.ndarray:
        return np.array([trace_to_prime(e) for e in self._elements], dtype=np.int64)


@dataclass(frozen=True)
class FieldElement:
    field: FiniteField = field(repr=False)
    coeffs: tuple[int, ...]

    @property
    def index(self) -> int:
        k = 0
        for c in self.coeffs:
            k = k * self.field.p + c
        return k

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def _other(self, other) -> FieldElement:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError("arithmetic between different fields")
            return other
        return self.field.element(other)

    def __add__(self, other):
        o = self._other(other)
        p = self.field.p
        return FieldElement(self.field, tuple((a + b) % p for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return FieldElement(self.field, tuple((-a) % p for a in self.coeffs))

    def __sub__(self, other):
        return self + (-self._other(other))

    def __rsub__(self, other):
        return self._other(other) - self

    def __mul__(self, other):
        o = self._other(other)
        f = self.field
        prod = _poly_mod(_poly_mul(list(self.coeffs), list(o.coeffs), f.p), list(f.modulus), f.p)
        return f.element(prod) if prod else f.zero()

    __rmul__ = __mul__

    def __pow__(self, e: int):
        e = int(e)
        if e < 0:
            return self.inverse() ** (-e)
        result, base = self.field.one(), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self) -> FieldElement:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in a finite field")
        return self ** (self.field.q - 2)

    def __truediv__(self, other):
        return self * self._other(other).inverse()

    def __rtruediv__(self, other):
        return self._other(other) * self.inverse()

    def __int__(self) -> int:
        if any(self.coeffs[1:]):
            raise ValueError(f"{self} is not in the prime field")
        return self.coeffs[0]


def make_field(p: int, r: int = 1, size_cap: int = DEFAULT_SIZE_CAP) -> FiniteField:
    if p == 2:
        raise ValueError("characteristic 2 is not supported")
    if p < 2 or not is_prime(p):
        raise ValueError(f"characteristic must be an odd prime, got {p}")
    if r < 1:
        raise ValueError(f"extension degree must be >= 1, got {r}")
    if p**r > size_cap:
        raise ValueError(f"field of size {p}**{r} exceeds the cap {size_cap}")
    return FiniteField(p=p, r=r, modulus=smallest_irreducible(p, r))


def prime_power(q: int) -> tuple[int, int]:
    """Split q = p**r with p prime; raise if q is not a prime power."""
    q = int(q)
    if q < 2:
        raise ValueError(f"{q} is not a prime power")
    for p in range(2, int(q**0.5) + 2):
        if q % p == 0:
            r = 0
            while q % p == 0:
                q //= p
                r += 1
            if q != 1:
                raise ValueError("not a prime power")
            return p, r
    return q, 1


def field_of_order(q: int, size_cap: int = DEFAULT_SIZE_CAP) -> FiniteField:
    try:
        p, r = prime_power(q)
    except ValueError:
        raise ValueError(f"{q} is not a prime power") from None
    return make_field(p, r, size_cap=size_cap)


def field_arith(a: FieldElement, b: FieldElement | None, op: str) -> FieldElement:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "inv":
        return a.inverse()
    raise ValueError(f"unknown field operation {op!r}")


def trace_to_prime(a: FieldElement) -> int:
    """Absolute trace Tr(a) = a + a^p + ... + a^{p^{r-1}}, returned as a residue mod p."""
    f = a.field
    total, power = f.zero(), a
    for _ in range(f.r):
        total = total + power
        power = power**f.p
    if any(total.coeffs[1:]):
        raise ArithmeticError(f"trace of {a} left the prime field")
    return total.coeffs[0]


def enumerate_field(f: FiniteField) -> list[FieldElement]:
    return list(f._elements)
