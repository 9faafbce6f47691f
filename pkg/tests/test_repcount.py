from itertools import combinations
from math import gcd, isqrt

import pytest
from hypothesis import given, strategies as st

from classmoments.arith import WorkBudgetExceeded
from classmoments.repcount import (
    RepWitness,
    TripleWitness,
    WindowParams,
    collision_pairs,
    cube_pair_related,
    cube_pair_search,
    dyadic_levels,
    interval_halfwidth,
    kernel,
    kernel_count,
    kernel_count_max,
    kernel_count_max_scan,
    m_solve,
    m_solve_bound,
    n_count,
    r_g,
    s_g_by_congruence,
    s_g_direct,
    s_g_range,
    t_g,
    triple_universe,
    u_interval,
    write_witnesses,
)
from classmoments.sieve import prime_window, split_primes, squarefree_range


def test_window_params():
    p = WindowParams(10**4, 10, 3)
    assert (p.W, p.U) == (100, 16000) and p.V == pytest.approx(160)
    assert p.V_bound == 160 and p.in_range()
    assert dyadic_levels(p) == [1, 2, 4, 8, 16, 32, 64, 128]
    assert WindowParams(10**4, 2, 3).in_relaxed_range()
    with pytest.raises(ValueError):
        WindowParams(10**4, 2, 3).check()
    WindowParams(10**4, 2, 3).check(allow_relaxed=True)


@given(st.integers(10, 10**8), st.sampled_from([3, 5, 7]))
def test_V_at_least_two_in_range(X, g):
    Z = 1
    while Z ** (2 * g) < X:
        Z += 1
    assert WindowParams(X, Z, g).V >= 2


def test_m_solve_examples():
    assert m_solve(7, 1, 3) == [0]
    assert m_solve(1, 3, 3) == [2, 7]
    assert m_solve(5, 3, 3) == []
    with pytest.raises(ValueError):
        m_solve(6, 3, 3)


@given(st.integers(1, 500), st.integers(1, 80), st.sampled_from([3, 5, 7]))
def test_m_solve_brute_force(w, v, g):
    if gcd(w, v) != 1:
        return
    mod = v * v
    target = 4 * pow(w, g, mod) % mod
    assert m_solve(w, v, g) == [u for u in range(mod) if u * u % mod == target]
    assert len(m_solve(w, v, g)) <= m_solve_bound(v)


def _oracle_sg(d, Z, g):
    # quadruple loop over (p, p', v, u)
    ps = split_primes(d, Z).primes
    found = set()
    for p in ps:
        for p2 in ps:
            if p >= p2:
                continue
            N = 4 * (p * p2) ** g
            v = 1
            while d * v * v < N:
                if gcd(v, p * p2) == 1:
                    u = isqrt(N - d * v * v)
                    if u * u == N - d * v * v:
                        found.add((p, p2, u, v))
                v += 1
    return found


def test_s_g_direct_against_oracle():
    for g in (3, 5):
        for d in squarefree_range(50, 100):
            res = s_g_direct(d, 5, g)
            assert {(w.p, w.p2, w.u, w.v) for w in res.witnesses} == _oracle_sg(d, 5, g)
            assert res.count == 2 * res.unordered
            assert all(w.check(g) for w in res.witnesses)


def test_s_g_empty_window_and_errors():
    assert s_g_direct(1, 2, 3).count == 0
    with pytest.raises(ValueError):
        s_g_direct(12, 5, 3)


def test_s_g_strategies_small():
    for Z in (6, 11):
        direct = {d: sorted(r.witnesses) for d, r in s_g_range(1000, Z, 3).items()}
        assert direct == s_g_by_congruence(1000, Z, 3)


def test_u_interval_example():
    params = WindowParams(10**4, 10, 3)
    w, V0 = 150, 1
    lo, hi = u_interval(w, V0, params)
    N = 4 * w**3
    hits = [u for u in range(1, params.U + 1) if params.X <= N - u * u < 2 * params.X]
    assert hits and all(lo <= u <= hi for u in hits)


@given(st.integers(100, 399), st.integers(0, 7))
def test_u_interval_contains_all_admissible(w, j):
    params = WindowParams(10**4, 10, 3)
    V0 = 2**j
    lo, hi = u_interval(w, V0, params)
    N = 4 * w**3
    for v in range(V0, 2 * V0):
        top = N - params.X * v * v
        if top < 1:
            continue
        for u in range(isqrt(max(N - 2 * params.X * v * v, 0)), isqrt(top) + 1):
            if u >= 1 and params.X * v * v <= N - u * u < 2 * params.X * v * v:
                assert lo <= u <= hi


def test_u_interval_scaling_and_errors():
    params = WindowParams(10**4, 10, 3)
    assert interval_halfwidth(4, params) == 4 * interval_halfwidth(2, params)
    for bad_w, bad_V0 in ((99, 1), (400, 1), (150, 0), (150, 200)):
        with pytest.raises(ValueError):
            u_interval(bad_w, bad_V0, params)


@pytest.mark.parametrize("V0", [1, 2, 4])
def test_n_count_strategies_agree(V0):
    params = WindowParams(10**4, 10, 3)
    a = n_count(params, V0, "direct", collect=True)
    b = n_count(params, V0, "congruence", collect=True)
    assert a.count == b.count and sorted(a.triples) == b.triples


def test_n_count_dominates_s_g():
    X, Z, g = 10**4, 10, 3
    params = WindowParams(X, Z, g)
    total = sum(n_count(params, V0).count for V0 in dyadic_levels(params))
    s_total = sum(r.unordered for r in s_g_range(X, Z, g).values())
    assert total >= s_total > 0


def test_n_count_budget():
    with pytest.raises(WorkBudgetExceeded):
        n_count(WindowParams(10**4, 10, 3), 1, "direct", budget=100)
    assert '"budget_exhausted": false' in n_count(WindowParams(10**4, 10, 3), 1).to_json()


def _oracle_rg(d, Z, g):
    out = set()
    for p1, p2 in combinations(prime_window(Z).primes, 2):
        w = p1 * p2
        N = 4 * w**g
        for v in range(1, isqrt(N // d) + 1):
            rest = N - d * v * v
            if rest > 0 and gcd(v, w) == 1 and isqrt(rest) ** 2 == rest:
                out.add((w, isqrt(rest), v))
    return out


def test_r_g():
    assert r_g(12, 5, 3) == (0, [])
    for d in squarefree_range(50, 100):
        n, trips = r_g(d, 5, 3)
        assert {(t.w, t.u, t.v) for t in trips} == _oracle_rg(d, 5, 3)
        assert all(t.check(3) for t in trips)
        # each S_g witness appears as a triple
        trip_set = {(t.w, t.u, t.v) for t in trips}
        for wit in s_g_direct(d, 5, 3).witnesses:
            assert (wit.p * wit.p2, wit.u, wit.v) in trip_set


def test_t_g():
    rep = t_g(1000, 6, 3)
    assert rep.total == rep.sum_r == 0
    rep = t_g(5000, 16, 3)
    assert rep.total == rep.sum_r == 44
    assert rep.t0 + sum(rep.by_delta.values()) == rep.total
    with pytest.raises(WorkBudgetExceeded):
        t_g(5000, 16, 3, budget=10)


def test_triple_universe_window():
    params = WindowParams(5000, 16, 3)
    for t in triple_universe(5000, 16, 3):
        assert params.W <= t.w < 4 * params.W and t.u <= params.U and t.v <= params.V


def test_cube_pairs():
    assert cube_pair_related(1, 1) and cube_pair_related(8, 27)
    assert not cube_pair_related(2, 3)
    with pytest.raises(ValueError):
        cube_pair_related(4, 6)


@given(st.integers(1, 300), st.integers(1, 300))
def test_cube_pair_matches_search(y1, y2):
    if gcd(y1, y2) != 1:
        return
    assert cube_pair_related(y1, y2) == (cube_pair_search(y1, y2, 60) is not None)


def test_kernel_examples():
    assert (kernel(8), kernel(12), kernel(45)) == (1, 3, 15)
    assert kernel_count(100, 3) == 13
    assert kernel_count(100, 4) == 0
    assert kernel_count(100, 200) == 0


@given(st.integers(1, 10**5), st.integers(1, 10**5))
def test_kernel_properties(a, b):
    k = kernel(a)
    assert a % k == 0 and kernel(k) == k
    if gcd(a, b) == 1:
        assert kernel(a * b) == kernel(a) * kernel(b)


def test_kernel_count_against_enumeration():
    K = 3000
    counts = {}
    for k in range(1, K + 1):
        counts[kernel(k)] = counts.get(kernel(k), 0) + 1
    for kappa in range(1, K + 1):
        assert kernel_count(K, kappa) == counts.get(kappa, 0)
    assert kernel_count_max(K) == kernel_count_max_scan(K)
    # a different excluded set
    assert kernel_count(100, 5, excluded=(2, 3)) == len(
        [k for k in range(1, 101) if kernel(k, excluded=(2, 3)) == 5])


def test_collision_pairs_match_witnesses():
    for g in (3, 5):
        for d in squarefree_range(50, 300):
            for Z in (5, 11):
                pairs = {(w.p, w.p2) for w in s_g_direct(d, Z, g).witnesses}
                assert set(collision_pairs(d, Z, g)) == pairs


def test_write_witnesses(tmp_path):
    path = tmp_path / "w.csv"
    write_witnesses(path, [RepWitness(23, 3, 5, 1, 2)])
    assert open(path).readline().strip() == "d,p,p',u,v"
    write_witnesses(path, [TripleWitness(23, 15, 1, 2)])
    assert open(path).readline().strip() == "d,w,u,v"
