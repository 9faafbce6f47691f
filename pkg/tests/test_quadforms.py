import pytest
from hypothesis import given, strategies as st

from classmoments._kernels import class_data
from classmoments.quadforms import (
    GPart,
    class_group,
    class_number_by_generation,
    class_row,
    compose,
    composition_table,
    enumerate_class_group,
    form_order,
    form_pow,
    fundamental_discriminant,
    g_part,
    g_part_from_divisors,
    identity,
    inverse,
    is_fundamental,
    reduce,
    reduced_forms,
)
from classmoments.sieve import squarefree_range

SQUAREFREE = squarefree_range(1, 3000)


def test_fundamental_discriminant_examples():
    assert fundamental_discriminant(3).delta == -3
    assert fundamental_discriminant(1).delta == -4
    assert fundamental_discriminant(5).delta == -20
    for bad in (0, -3, 4, 12):
        with pytest.raises(ValueError):
            fundamental_discriminant(bad)


@given(st.sampled_from(SQUAREFREE))
def test_discriminant_invariants(d):
    delta = fundamental_discriminant(d).delta
    assert delta % 4 in (0, 1)
    assert delta == (-d if d % 4 == 3 else -4 * d)
    assert is_fundamental(delta)


def test_reduce_examples():
    assert reduce((1, 0, 1), -4) == (1, 0, 1)
    assert reduce((2, 2, 3), -20) == (2, 2, 3)
    assert reduce((3, 2, 1), -8) == (1, 0, 2)
    with pytest.raises(ValueError):
        reduce((1, 1, 1), -4)
    with pytest.raises(ValueError):
        reduce((-1, 0, -1), -4)


def _bruteforce_reduced(delta):
    # every reduced form straight from the definition, no shortcuts
    out = []
    for a in range(1, -delta + 1):
        for b in range(-a, a + 1):
            if (b * b - delta) % (4 * a):
                continue
            c = (b * b - delta) // (4 * a)
            if c < a or ((abs(b) == a or a == c) and b < 0):
                continue
            from math import gcd
            if gcd(gcd(a, b), c) == 1:
                out.append((a, b, c))
    return sorted(out)


@pytest.mark.parametrize("d", [1, 2, 3, 5, 23, 47, 71, 101, 105, 257])
def test_reduced_forms_against_definition(d):
    delta = fundamental_discriminant(d).delta
    assert [tuple(f) for f in reduced_forms(delta)] == _bruteforce_reduced(delta)


def test_compose_examples():
    e = identity(-23)
    for f in reduced_forms(-23):
        assert compose(e, f, -23) == f
    assert compose((2, 1, 3), (2, -1, 3), -23) == (1, 1, 6)
    assert compose((2, 1, 3), (2, 1, 3), -23) == (2, -1, 3)
    with pytest.raises(ValueError):
        compose((1, 1, 6), (1, 0, 5), -23)


@pytest.mark.parametrize("delta,h,divs", [(-4, 1, (1,)), (-23, 3, (3,)), (-20, 2, (2,)),
                                          (-47, 5, (5,)), (-3299, 27, (3, 9)), (-4027, 9, (3, 3))])
def test_class_group_examples(delta, h, divs):
    grp = enumerate_class_group(delta)
    assert grp.h == h and grp.divisors == divs
    assert grp.identity in grp.forms


def test_class_number_one():
    # the imaginary quadratic fields of class number one
    ones = [-fundamental_discriminant(d).delta for d in squarefree_range(1, 200) if class_group(d).h == 1]
    assert sorted(ones) == [3, 4, 7, 8, 11, 19, 43, 67, 163]


def test_g_part_examples():
    assert g_part(enumerate_class_group(-23), 3) == GPart(3, 3, 3)
    assert g_part(enumerate_class_group(-23), 5) == GPart(5, 1, 1)
    assert g_part(enumerate_class_group(-4), 3) == GPart(3, 1, 1)
    # non-elementary Sylow subgroup: torsion and Sylow order differ
    gp = g_part(enumerate_class_group(-3299), 3)
    assert (gp.sylow_order, gp.torsion_count) == (27, 9)
    for bad in (2, 9, 1):
        with pytest.raises(ValueError):
            g_part(enumerate_class_group(-23), bad)


forms_of = st.sampled_from(SQUAREFREE).flatmap(
    lambda d: st.tuples(st.just(fundamental_discriminant(d).delta),
                        *[st.sampled_from(reduced_forms(fundamental_discriminant(d).delta))] * 3))


@given(forms_of)
def test_group_laws(args):
    delta, f1, f2, f3 = args
    e = identity(delta)
    assert compose(compose(f1, f2, delta), f3, delta) == compose(f1, compose(f2, f3, delta), delta)
    assert compose(f1, f2, delta) == compose(f2, f1, delta)
    assert compose(f1, inverse(f1), delta) == e
    assert reduce(f1, delta) == f1
    assert form_pow(f1, -2, delta) == inverse(compose(f1, f1, delta))


@given(st.sampled_from(SQUAREFREE))
def test_structure_invariants(d):
    grp = class_group(d)
    prod = 1
    for n in grp.divisors:
        prod *= n
    assert prod == grp.h
    assert all(b % a == 0 for a, b in zip(grp.divisors, grp.divisors[1:]))
    for f in grp.forms[:50]:
        assert grp.h % form_order(f, grp.delta.delta) == 0
    for g in (3, 5, 7):
        gp = g_part(grp, g)
        assert gp.sylow_order % gp.torsion_count == 0 and grp.h % gp.sylow_order == 0
        assert gp == g_part_from_divisors(grp.divisors, g)


def test_inverse_exhaustive():
    # f o f^-1 = e for every reduced form with |delta| <= 10^4
    for d in squarefree_range(1, 2501):
        delta = fundamental_discriminant(d).delta
        e = identity(delta)
        for f in reduced_forms(delta):
            assert compose(f, inverse(f), delta) == e


def test_composition_table_is_latin_square():
    grp = class_group(3299)
    table = composition_table(grp)
    n = grp.h
    for row in table:
        assert sorted(row) == list(range(n))


def test_generation_route_matches_enumeration():
    for d in squarefree_range(1, 1500):
        delta = fundamental_discriminant(d).delta
        assert class_number_by_generation(delta) == len(reduced_forms(delta))


def test_compiled_kernel_matches():
    ds = squarefree_range(1, 1200)
    N = [d if d % 4 == 3 else 4 * d for d in ds]
    h, tors = class_data(N, (3, 5))
    for i, d in enumerate(ds):
        row = class_row(d, (3, 5))
        assert (h[i], tors[3][i], tors[5][i]) == (row[2], row[3], row[5])


def test_class_row_layout():
    assert class_row(23, (3, 5)) == (23, -23, 3, 3, 3, 1, 1)
    assert class_row(1) == (1, -4, 1, 1, 1)
