"""Small exact-arithmetic helpers shared by the other modules."""

from math import gcd, isqrt
from itertools import product

import numpy as np


class WorkBudgetExceeded(RuntimeError):
    """Raised when an enumeration would exceed its configured work budget."""


def primes_below(n):
    """All primes p < n as a numpy int64 array."""
    if n <= 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n, dtype=bool)
    sieve[:2] = False
    sieve[4::2] = False
    for p in range(3, isqrt(n - 1) + 1, 2):
        if sieve[p]:
            sieve[p * p :: 2 * p] = False
    return np.flatnonzero(sieve).astype(np.int64)


def primes_in(lo, hi):
    """Primes p with lo <= p < hi, by a segmented sieve over [lo, hi)."""
    lo = max(lo, 2)
    if hi <= lo:
        return np.zeros(0, dtype=np.int64)
    seg = np.ones(hi - lo, dtype=bool)
    for p in primes_below(isqrt(hi - 1) + 1):
        p = int(p)
        start = max(p * p, -(-lo // p) * p)
        seg[start - lo :: p] = False
    return np.flatnonzero(seg).astype(np.int64) + lo


def is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def factorize(n):
    """Prime factorization of n >= 1 as a dict {p: e} (trial division)."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    out = {}
    while n % 2 == 0:
        out[2] = out.get(2, 0) + 1
        n //= 2
    f = 3
    while f * f <= n:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def omega(n):
    return len(factorize(n))


def is_squarefree(n):
    if n < 1:
        return False
    return all(e == 1 for e in factorize(n).values())


def is_square(n):
    return n >= 0 and isqrt(n) ** 2 == n


def is_cube(n):
    if n < 0:
        return is_cube(-n)
    r = round(n ** (1.0 / 3))
    for c in (r - 1, r, r + 1):
        if c >= 0 and c**3 == n:
            return True
    return False


def crt_pair(r1, m1, r2, m2):
    """Combine x = r1 (mod m1), x = r2 (mod m2) for coprime moduli."""
    inv = pow(m1, -1, m2)
    x = r1 + m1 * ((r2 - r1) * inv % m2)
    return x % (m1 * m2), m1 * m2


def crt_product(residue_sets):
    """CRT over coprime moduli.

    residue_sets is a list of (modulus, residues); returns the sorted list of
    all combined residues modulo the product of the moduli.
    """
    mods = [m for m, _ in residue_sets]
    total = 1
    for m in mods:
        total *= m
    coeffs = []
    for m in mods:
        rest = total // m
        coeffs.append(rest * pow(rest, -1, m) % total if m > 1 else 0)
    out = []
    for combo in product(*(rs for _, rs in residue_sets)):
        out.append(sum(c * r for c, r in zip(coeffs, combo)) % total)
    return sorted(out)


def legendre(a, p):
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def sqrt_mod_prime(a, p):
    """One square root of a modulo an odd prime p, or None (Tonelli-Shanks)."""
    a %= p
    if a == 0:
        return 0
    if legendre(a, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while legendre(z, p) != -1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def odd_kernel(k, excluded=(2,)):
    """Product of the distinct primes dividing k that are not in `excluded`."""
    out = 1
    for p in factorize(k):
        if p not in excluded:
            out *= p
    return out


__all__ = [
    "WorkBudgetExceeded",
    "crt_pair",
    "crt_product",
    "factorize",
    "gcd",
    "is_cube",
    "is_prime",
    "is_square",
    "is_squarefree",
    "legendre",
    "odd_kernel",
    "omega",
    "primes_below",
    "primes_in",
    "sqrt_mod_prime",
]
