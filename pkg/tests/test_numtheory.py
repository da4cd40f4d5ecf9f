from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from asicpovm.numtheory import (
    SearchLimitError,
    character_of_order,
    find_primitive_root,
    is_prime,
    least_prime_ratio,
    next_prime_geq,
    root_of_unity,
    roots_of_unity,
    smallest_prime_congruent_1,
    subgroup_un,
)
from oracle import is_prime_td, next_prime_td, prime_1_mod, primitive_root_td


def test_is_prime_examples():
    assert is_prime(2)
    assert not is_prime(1)
    assert not is_prime(0)
    assert not is_prime(561)  # Carmichael


def test_is_prime_matches_trial_division_below_5000():
    assert [m for m in range(5000) if is_prime(m)] == [m for m in range(5000) if is_prime_td(m)]


@given(st.integers(min_value=0, max_value=10**7))
def test_is_prime_property(m):
    assert is_prime(m) == is_prime_td(m)


def test_is_prime_64_bit_edge():
    assert is_prime(2**61 - 1)
    assert is_prime(18446744073709551557)  # largest prime below 2^64
    assert not is_prime(3825123056546413051)  # strong pseudoprime to bases 2..23
    with pytest.raises(ValueError):
        is_prime(2**64)
    with pytest.raises(ValueError):
        is_prime(-1)


def test_next_prime_examples():
    assert next_prime_geq(7) == 7
    assert next_prime_geq(8) == 11
    assert next_prime_geq(90) == 97
    with pytest.raises(OverflowError):
        next_prime_geq(2**64 - 58)


def test_prime_gap_desk_scale():
    for n in range(2, 2001):
        p = next_prime_geq(n)
        assert p == next_prime_td(n)
        assert p - n <= max(math.ceil(n**0.525), 12)


def test_smallest_prime_congruent_1():
    assert smallest_prime_congruent_1(1) == 2
    assert smallest_prime_congruent_1(4) == 5
    assert smallest_prime_congruent_1(6) == 7
    for n in range(2, 200):
        assert smallest_prime_congruent_1(n) == prime_1_mod(n)
    with pytest.raises(SearchLimitError):
        smallest_prime_congruent_1(16, cap=17 - 1)


def test_least_prime_ratio():
    assert least_prime_ratio(1, 2) is None
    assert least_prime_ratio(6, 7) == pytest.approx(7 / (6 * math.log(6) ** 2))


def test_root_of_unity_examples():
    assert root_of_unity(5, 0) == 1
    assert root_of_unity(4, 1) == 1j
    assert abs(root_of_unity(3, 1) - complex(-0.5, math.sqrt(3) / 2)) < 1e-15
    assert root_of_unity(4, 2) == -1
    assert root_of_unity(4, -1) == -1j


@given(st.integers(1, 1000), st.integers(-10**6, 10**6))
def test_roots_of_unity_unimodular_and_periodic(m, z):
    v = roots_of_unity(m, np.array([z, z + m]))
    assert abs(abs(v[0]) - 1) < 1e-15
    assert v[0] == v[1]
    assert abs(v[0] - root_of_unity(m, z)) < 1e-15


def test_primitive_roots():
    assert find_primitive_root(2) == 1
    assert find_primitive_root(3) == 2
    assert find_primitive_root(7) == 3
    for p in range(3, 400):
        if is_prime(p):
            assert find_primitive_root(p) == primitive_root_td(p)


def test_character_examples():
    chi = character_of_order(5, 4)
    assert chi.g == 2 and chi(2) == 1j
    triv = character_of_order(5, 1)
    assert all(triv(x) == 1 for x in range(1, 5))
    legendre = character_of_order(7, 2)
    assert legendre(2) == 1 and legendre(3) == -1
    with pytest.raises(ValueError):
        chi(0)
    with pytest.raises(ValueError):
        character_of_order(7, 4)


def _divisors(m: int) -> list[int]:
    return [k for k in range(1, m + 1) if m % k == 0]


def test_character_invariants_exhaustive():
    for p in range(3, 200):
        if not is_prime(p):
            continue
        for n in _divisors(p - 1):
            chi = character_of_order(p, n)
            xs = np.arange(1, p)
            vals = chi.values(xs)
            assert np.allclose(np.abs(vals), 1, atol=1e-14)
            # multiplicativity on exponents (exact integers)
            ex = np.array([chi.exponent(int(x)) for x in xs])
            prod = (xs[:, None] * xs[None, :]) % p
            lhs = np.array([[chi.exponent(int(v)) for v in row] for row in prod])
            assert np.array_equal(lhs, (ex[:, None] + ex[None, :]) % n)
            # exact order n
            for m in _divisors(n)[:-1]:
                assert np.any((ex * m) % n != 0)


def test_subgroup_examples():
    assert subgroup_un(7, 1).elements == (1,)
    assert subgroup_un(7, 2).elements == (1, 6)
    assert subgroup_un(5, 4).elements == (1, 2, 3, 4)
    with pytest.raises(ValueError):
        subgroup_un(7, 5)


@settings(max_examples=50)
@given(st.sampled_from([p for p in range(3, 200) if is_prime_td(p)]), st.data())
def test_subgroup_closed(p, data):
    n = data.draw(st.sampled_from(_divisors(p - 1)))
    u = subgroup_un(p, n)
    s = set(u.elements)
    assert len(s) == n == len(u)
    assert all(pow(x, n, p) == 1 for x in s)
    assert all((x * y) % p in s for x in s for y in s)
    assert all(pow(x, -1, p) in s for x in s)
    assert all(x in u for x in s)
    assert all(x not in u for x in range(1, p) if x not in s)
