from hypothesis import given, strategies as st
from sympy import factorint, isprime, primerange

from classmoments.arith import (
    crt_product,
    factorize,
    is_cube,
    is_prime,
    is_square,
    is_squarefree,
    primes_below,
    primes_in,
    sqrt_mod_prime,
)


def test_primes_match_sympy():
    assert primes_below(2000).tolist() == list(primerange(2, 2000))
    assert primes_in(1000, 1500).tolist() == list(primerange(1000, 1500))
    assert primes_in(0, 3).tolist() == [2]
    assert primes_in(10, 10).tolist() == []


@given(st.integers(1, 10**7))
def test_factorize(n):
    assert factorize(n) == factorint(n)
    assert is_prime(n) == isprime(n)
    assert is_squarefree(n) == all(e == 1 for e in factorint(n).values())


@given(st.integers(0, 10**6))
def test_powers(n):
    assert is_square(n * n) and is_cube(n**3) and is_cube(-(n**3))
    if n > 1:
        assert not is_square(n * n + 1)
        assert not is_cube(n**3 + 1)


def test_crt_product():
    res = crt_product([(3, [1, 2]), (5, [0]), (7, [3])])
    assert res == sorted(x for x in range(105) if x % 3 in (1, 2) and x % 5 == 0 and x % 7 == 3)
    assert crt_product([(1, [0])]) == [0]


@given(st.sampled_from(list(primerange(3, 2000))), st.integers(0, 10**6))
def test_sqrt_mod_prime(p, a):
    r = sqrt_mod_prime(a, p)
    has = any((x * x - a) % p == 0 for x in range(p))
    assert (r is not None) == has
    if r is not None:
        assert (r * r - a) % p == 0
