import csv
from math import log

import numpy as np
import pytest
from hypothesis import given, strategies as st
from sympy import primerange
from sympy.functions.combinatorial.numbers import kronecker_symbol

from classmoments.quadforms import fundamental_discriminant
from classmoments.sieve import (
    character_sum_M,
    character_sums,
    chi,
    exceptional_set,
    kronecker,
    prime_window,
    split_partition,
    split_primes,
    squarefree_range,
    threshold,
    write_character_sums,
)


def _sqf(n):
    return all(n % (p * p) for p in range(2, int(n**0.5) + 1))


def test_squarefree_examples():
    assert squarefree_range(1, 11) == [1, 2, 3, 5, 6, 7, 10]
    assert squarefree_range(8, 10) == []
    assert squarefree_range(48, 51) == []
    for lo, hi in ((5, 5), (10, 3), (0, 4)):
        with pytest.raises(ValueError):
            squarefree_range(lo, hi)


@given(st.integers(1, 10**6), st.integers(1, 400))
def test_squarefree_against_trial_division(lo, n):
    assert squarefree_range(lo, lo + n) == [x for x in range(lo, lo + n) if _sqf(x)]


def test_square_free_count_below_100():
    assert len(squarefree_range(1, 100)) == 61


@given(st.integers(-10**6, 10**6), st.integers(1, 10**6))
def test_kronecker_matches_sympy(a, n):
    assert kronecker(a, n) == kronecker_symbol(a, n)


def test_chi_examples():
    assert chi(1, 5) == 1
    assert chi(1, 2) == 0
    assert chi(3, 7) == 1


@pytest.mark.parametrize("d", [1, 2, 3, 5, 7, 23, 105, 4093])
def test_chi_completely_multiplicative(d):
    vals = [0] + [chi(d, n) for n in range(1, 10**3 + 1)]
    for m in range(1, 101):
        for n in range(1, 10**3 // m + 1):
            assert vals[m * n] == vals[m] * vals[n]


@pytest.mark.parametrize("d", [1, 2, 3, 5, 23, 230, 1001])
def test_chi_against_residues(d):
    delta = fundamental_discriminant(d).delta
    for p in primerange(3, 10**3):
        v = chi(d, p)
        if delta % p == 0:
            assert v == 0
        else:
            solvable = any((x * x - delta) % p == 0 for x in range(p))
            assert v == (1 if solvable else -1)


def test_split_primes_examples():
    assert split_primes(1, 3).primes == (5,)
    assert split_primes(3, 5).primes == (7,)
    assert split_primes(1, 2).primes == ()
    assert all(chi(105, p) == 1 for p in split_primes(105, 50).primes)


def test_character_sum_examples():
    assert character_sum_M(1, 3).value == 0
    assert character_sum_M(3, 5).value == 0


@given(st.sampled_from(squarefree_range(1, 5000)), st.integers(2, 300))
def test_partition_and_vectorised_sums(d, Z):
    window = prime_window(Z).primes
    assert list(window) == list(primerange(Z, 2 * Z))
    s, i, r = split_partition(d, Z)
    assert s + i + r == len(window)
    M = character_sum_M(d, Z).value
    assert M == s - i and abs(M) <= len(window)
    assert character_sums([d], Z)[0] == M
    # split_primes drops p | 2d, which can only be ramified
    assert len(split_primes(d, Z).primes) == s - (2 in window and chi(d, 2) == 1)


def test_exceptional_small():
    ds = squarefree_range(100, 200)
    oracle = [d for d in ds if abs(chi(d, 3) + chi(d, 5)) >= 1]
    assert threshold(3) == pytest.approx(0.75 / log(3))
    E = exceptional_set(3, 100)
    assert E == oracle and len(E) == 40
    with pytest.raises(ValueError):
        exceptional_set(2, 100)


def test_exceptional_monotone_in_threshold():
    ds = np.asarray(squarefree_range(1000, 2000))
    sums = np.abs(character_sums(ds, 40))
    sizes = [int(np.count_nonzero(sums >= c)) for c in np.linspace(8, 0, 17)]
    assert sizes == sorted(sizes)


def test_exceptional_recorded_size_and_split_spot_check():
    X, Z = 10**4, 100
    E = set(exceptional_set(Z, X))
    assert len(E) == 1305  # recorded; not small at this scale
    for d in squarefree_range(X, 2 * X)[::37]:
        if d not in E:
            assert split_partition(d, Z)[0] >= Z / (8 * log(Z))


def test_csv_export(tmp_path):
    path = tmp_path / "m.csv"
    n = write_character_sums(path, 100, 3)
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["d", "Z", "M", "is_exceptional"] and len(rows) == n + 1
    assert sum(int(r[3]) for r in rows[1:]) == 40
