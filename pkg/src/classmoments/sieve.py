"""Square-free ranges, the character chi_d, prime windows [Z, 2Z) and the
exceptional set of discriminants with a large prime-window character sum."""

import csv
from dataclasses import dataclass
from math import isqrt, log

import numpy as np

from .arith import primes_below, primes_in
from .quadforms import fundamental_discriminant


def squarefree_mask(lo, hi):
    """Boolean mask over [lo, hi): True where the integer is square-free."""
    if not 1 <= lo < hi:
        raise ValueError(f"need 1 <= lo < hi, got [{lo}, {hi})")
    mask = np.ones(hi - lo, dtype=bool)
    for p in primes_below(isqrt(hi - 1) + 1):
        q = int(p) * int(p)
        start = -(-lo // q) * q
        mask[start - lo :: q] = False
    return mask


def squarefree_range(lo, hi):
    """Square-free integers in [lo, hi) via a squared-prime sieve."""
    return [int(x) for x in np.flatnonzero(squarefree_mask(lo, hi)) + lo]


def kronecker(a, n):
    """Kronecker symbol (a | n) for n >= 1."""
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return 1
    result = 1
    if n % 2 == 0:
        if a % 2 == 0:
            return 0
        while n % 2 == 0:
            n //= 2
            if a % 8 in (3, 5):
                result = -result
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def chi(d, n):
    """chi_d(n): the Kronecker symbol of the fundamental discriminant of Q(sqrt(-d))."""
    return kronecker(fundamental_discriminant(d).delta, n)


@dataclass(frozen=True)
class PrimeWindow:
    Z: int
    primes: tuple


@dataclass(frozen=True)
class CharacterSum:
    d: int
    Z: int
    value: int


def prime_window(Z):
    return PrimeWindow(Z, tuple(int(p) for p in primes_in(Z, 2 * Z)))


def split_primes(d, Z):
    """Primes p in [Z, 2Z) with p not dividing 2d and chi_d(p) = 1."""
    delta = fundamental_discriminant(d).delta
    keep = tuple(p for p in prime_window(Z).primes if (2 * d) % p and kronecker(delta, p) == 1)
    return PrimeWindow(Z, keep)


def character_sum_M(d, Z, window=None):
    """M(d; Z): sum of chi_d(p) over every prime of the window."""
    window = window or prime_window(Z)
    delta = fundamental_discriminant(d).delta
    return CharacterSum(d, Z, sum(kronecker(delta, p) for p in window.primes))


def character_sums(ds, Z):
    """M(d; Z) for many d at once (vectorised over d, one residue table per prime)."""
    ds = np.asarray(ds, dtype=np.int64)
    deltas = np.where(ds % 4 == 3, -ds, -4 * ds)
    total = np.zeros(len(ds), dtype=np.int64)
    for p in prime_window(Z).primes:
        if p == 2:
            # (delta | 2) from delta mod 8
            r = deltas % 8
            total += np.where(r == 1, 1, np.where(r == 5, -1, 0))
            continue
        table = np.full(p, -1, dtype=np.int64)
        table[(np.arange(1, p, dtype=np.int64) ** 2) % p] = 1
        table[0] = 0
        total += table[deltas % p]
    return total


def threshold(Z):
    """The exceptional-set cut-off Z / (4 log Z), natural log."""
    return Z / (4 * log(Z))


def exceptional_set(Z, X, sums=None):
    """Square-free d in [X, 2X) with |M(d; Z)| >= Z / (4 log Z)."""
    if Z < 3:
        raise ValueError("need Z >= 3 so that log Z > 1")
    ds = np.asarray(squarefree_range(X, 2 * X), dtype=np.int64)
    if sums is None:
        sums = character_sums(ds, Z)
    cut = threshold(Z)
    return [int(d) for d in ds[np.abs(sums) >= cut]]


def split_partition(d, Z):
    """(#split, #inert, #ramified) over the window; they sum to the window size."""
    delta = fundamental_discriminant(d).delta
    counts = [0, 0, 0]
    for p in prime_window(Z).primes:
        k = kronecker(delta, p)
        counts[0 if k == 1 else 1 if k == -1 else 2] += 1
    return tuple(counts)


def write_character_sums(path, X, Z):
    """CSV audit rows (d, Z, M, is_exceptional) for square-free d in [X, 2X)."""
    ds = np.asarray(squarefree_range(X, 2 * X), dtype=np.int64)
    sums = character_sums(ds, Z)
    cut = threshold(Z)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["d", "Z", "M", "is_exceptional"])
        for d, m in zip(ds, sums):
            w.writerow([int(d), Z, int(m), int(abs(m) >= cut)])
    return len(ds)
