"""Representations 4 w^g = u^2 + d v^2 and the counts built on them.

Covers the prime-pair count S_g(d; Z), the residue count M(w; v), the
dyadic counts N(Z, X; V0), the triple count R_g(d; Z), the pair count T_g
with its stratification, the cube-pair relation and odd square-free kernels.
All witnesses are verified in exact integer arithmetic.
"""

import json
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import combinations
from math import ceil, floor, gcd, isqrt, sqrt

import numpy as np

from .arith import (
    WorkBudgetExceeded,
    crt_product,
    factorize,
    is_cube,
    is_squarefree,
    primes_below,
    sqrt_mod_prime,
)
from .quadforms import class_group, form_pow, inverse, prime_form, _compose
from .sieve import prime_window, split_primes, squarefree_mask


@dataclass(frozen=True)
class WindowParams:
    X: int
    Z: int
    g: int

    @property
    def W(self):
        return self.Z**2

    @property
    def U(self):
        return 2 ** (self.g + 1) * self.Z**self.g

    @property
    def V(self):
        return self.U / sqrt(self.X)

    @property
    def V_bound(self):
        # largest integer v with v <= V, exactly
        return isqrt(self.U**2 // self.X)

    def in_range(self):
        """True when X^(1/2g) <= Z <= X (the range of the averaged counts)."""
        return self.Z ** (2 * self.g) >= self.X and self.Z <= self.X

    def in_relaxed_range(self):
        """True when (1/4) X^(1/2g) <= Z <= X (the pointwise-bound range)."""
        return (4 * self.Z) ** (2 * self.g) >= self.X and self.Z <= self.X

    def check(self, allow_relaxed=False):
        if self.in_range():
            return self
        if allow_relaxed and self.in_relaxed_range():
            return self
        raise ValueError(
            f"Z={self.Z} outside [X^(1/2g), X] for X={self.X}, g={self.g}"
            + (" (relaxed lower bound also fails)" if allow_relaxed else "")
        )


def dyadic_levels(params):
    """Dyadic V0 = 1, 2, 4, ... with V0 < V, so [V0, 2V0) tiles [1, V)."""
    out, v0 = [], 1
    while v0 <= params.V_bound and v0 < params.V:
        out.append(v0)
        v0 *= 2
    return out


@dataclass(frozen=True, order=True)
class RepWitness:
    d: int
    p: int
    p2: int
    u: int
    v: int

    def check(self, g):
        return 4 * (self.p * self.p2) ** g == self.u**2 + self.d * self.v**2


@dataclass(frozen=True, order=True)
class TripleWitness:
    d: int
    w: int
    u: int
    v: int

    def check(self, g):
        return 4 * self.w**g == self.u**2 + self.d * self.v**2


@dataclass
class SgCount:
    d: int
    Z: int
    g: int
    count: int
    unordered: int
    witnesses: list
    convention: str = "ordered pairs (p, p') with p != p'; witnesses listed once per unordered pair with p < p'"


def _square_hits(N, d, vmax):
    """All (u, v) with 1 <= v <= vmax and N = u^2 + d v^2, u >= 1."""
    if vmax < 1:
        return []
    if N < 2**52:
        vs = np.arange(1, vmax + 1, dtype=np.int64)
        r = N - d * vs * vs
        r = np.where(r > 0, r, 0)
        u = np.rint(np.sqrt(r.astype(np.float64))).astype(np.int64)
        ok = (u * u == r) & (r > 0)
        return [(int(uu), int(vv)) for uu, vv in zip(u[ok], vs[ok])]
    out = []
    for v in range(1, vmax + 1):
        r = N - d * v * v
        if r <= 0:
            break
        u = isqrt(r)
        if u * u == r:
            out.append((u, v))
    return out


def _vmax(N, d):
    # largest v with d v^2 < N
    v = isqrt(N // d)
    while v > 0 and d * v * v >= N:
        v -= 1
    return v


def s_g_direct(d, Z, g, primes=None):
    """S_g(d; Z) by exhaustive search over pairs of split primes and v.

    `count` is over ordered pairs p != p'; `unordered` counts each pair once.
    """
    if d < 1 or not is_squarefree(d):
        raise ValueError(f"d={d} is not square-free")
    if primes is None:
        primes = split_primes(d, Z).primes if Z >= 2 else ()
    witnesses = []
    pairs = 0
    for p, p2 in combinations(primes, 2):
        w = p * p2
        N = 4 * w**g
        found = False
        for u, v in _square_hits(N, d, _vmax(N, d)):
            if gcd(v, w) == 1:
                witnesses.append(RepWitness(d, p, p2, u, v))
                found = True
        pairs += found
    return SgCount(d, Z, g, 2 * pairs, pairs, witnesses)


def s_g_range(X, Z, g):
    """Direct S_g over square-free d in [X, 2X): {d: SgCount} for d with witnesses."""
    out = {}
    mask = squarefree_mask(X, 2 * X)
    window = [p for p in prime_window(Z).primes if p != 2]
    from .sieve import kronecker

    for i in np.flatnonzero(mask):
        d = int(i) + X
        delta = -d if d % 4 == 3 else -4 * d
        split = tuple(p for p in window if d % p and kronecker(delta, p) == 1)
        if len(split) < 2:
            continue
        res = s_g_direct(d, Z, g, primes=split)
        if res.witnesses:
            out[d] = res
    return out


def s_g_by_congruence(X, Z, g):
    """S_g witnesses over d in [X, 2X) assembled from the (w, u, v) side.

    For each w = p p' of window primes and each v coprime to w, the residues
    u (mod v^2) with u^2 = 4 w^g come from m_solve; every u in the exact
    interval with (4 w^g - u^2) / v^2 in [X, 2X) yields a candidate d.
    """
    params = WindowParams(X, Z, g)
    window = [p for p in prime_window(Z).primes if p != 2]
    out = defaultdict(list)
    for p, p2 in combinations(window, 2):
        w = p * p2
        N = 4 * w**g
        vtop = _vmax(N, X)
        for v in range(1, vtop + 1):
            if gcd(v, w) != 1:
                continue
            mod = v * v
            lo, hi = _exact_u_range(N, X, v)
            if lo > hi:
                continue
            for r in m_solve(w, v, g):
                u = lo + (r - lo) % mod
                while u <= hi:
                    dd, rem = divmod(N - u * u, mod)
                    if rem == 0 and X <= dd < 2 * X and is_squarefree(dd):
                        out[dd].append(RepWitness(dd, p, p2, u, v))
                    u += mod
    return {d: sorted(ws) for d, ws in out.items()}


def _exact_u_range(N, X, v):
    # integers u >= 1 with X v^2 <= N - u^2 < 2 X v^2
    top = N - X * v * v
    if top < 1:
        return 1, 0
    hi = isqrt(top)
    low_sq = N - 2 * X * v * v
    lo = 1 if low_sq < 0 else isqrt(low_sq) + 1
    return max(lo, 1), hi


def _sqrt_mod_two_power(n, m):
    """All x mod 2^m with x^2 = n (mod 2^m), n odd."""
    if m <= 3:
        return [x for x in range(2**m) if (x * x - n) % 2**m == 0]
    sols = _sqrt_mod_two_power(n, 3)
    for k in range(4, m + 1):
        mod = 2**k
        sols = sorted({y % mod for x in sols for y in (x, x + 2 ** (k - 1)) if (y * y - n) % mod == 0})
    return sols


def _sqrt_mod_odd_power(t, q, e):
    """All x mod q^e with x^2 = t, t a unit mod the odd prime q (Hensel)."""
    r = sqrt_mod_prime(t % q, q)
    if r is None:
        return []
    roots = []
    for x in {r, (q - r) % q}:
        mod = q
        for _ in range(1, e):
            mod2 = mod * q
            # x <- x - (x^2 - t) / (2x) mod q^(k+1)
            x = (x - (x * x - t) * pow(2 * x, -1, mod2)) % mod2
            mod = mod2
        roots.append(x)
    return sorted(roots)


def m_solve(w, v, g):
    """Residues u (mod v^2) with u^2 = 4 w^g (mod v^2); requires gcd(w, v) = 1."""
    if v < 1 or w < 1:
        raise ValueError("w and v must be positive")
    if gcd(w, v) != 1:
        raise ValueError(f"gcd(w={w}, v={v}) != 1")
    if v == 1:
        return [0]
    parts = []
    for q, r in sorted(factorize(v).items()):
        mod = q ** (2 * r)
        if q == 2:
            # u = 2u', u'^2 = w^g (mod 2^(2r-2)); each u' lifts to two u mod 2^(2r)
            half = _sqrt_mod_two_power(pow(w, g, 2 ** max(2 * r - 2, 1)), 2 * r - 2)
            sols = sorted({(2 * x + j * 2 ** (2 * r - 1)) % mod for x in half for j in (0, 1)})
        else:
            sols = _sqrt_mod_odd_power(4 * pow(w, g, mod) % mod, q, 2 * r)
        if not sols:
            return []
        parts.append((mod, sols))
    return crt_product(parts)


def m_solve_bound(v):
    """Upper bound 2^(2 + omega(v)) on the number of residues returned by m_solve."""
    return 2 ** (2 + len(factorize(v)))


def interval_halfwidth(V0, params):
    """Exact C W^(g/2) V0^2 V^-2 with C = 2^(2g+4); equals 4 X V0^2 / Z^g."""
    return Fraction(4 * params.X * V0 * V0, params.Z**params.g)


def u_interval(w, V0, params):
    """Integer interval around 2 w^(g/2) containing every admissible u.

    Any u with (4 w^g - u^2) / v^2 in [X, 2X) for some v in [V0, 2V0) lies
    inside; the returned bounds are clipped to [1, U].
    """
    W, g = params.W, params.g
    if not W <= w < 4 * W:
        raise ValueError(f"w={w} outside [W, 4W) = [{W}, {4 * W})")
    if not 0 < V0 < params.V:
        raise ValueError(f"V0={V0} outside (0, V) with V={params.V:.4g}")
    delta = interval_halfwidth(V0, params)
    N = 4 * w**g
    s = isqrt(N)  # s <= 2 w^(g/2) < s + 1
    lo = s - floor(delta)
    hi = s + 1 + floor(delta)
    return max(lo, 1), min(hi, params.U)


@dataclass
class NCount:
    params: dict
    V0: int
    count: int
    strategy: str
    budget_exhausted: bool = False
    triples: list = field(default=None, repr=False)

    def to_json(self):
        d = asdict(self)
        d.pop("triples")
        return json.dumps(d, sort_keys=True)


def _n_direct(params, V0, collect, budget):
    X, g, W, U = params.X, params.g, params.W, params.U
    us = np.arange(1, U + 1, dtype=object if 4 * (4 * W) ** g >= 2**62 else np.int64)
    work = 0
    count, triples = 0, []
    for w in range(W, 4 * W):
        N = 4 * w**g
        rest = N - us * us
        for v in range(V0, 2 * V0):
            if gcd(v, w) != 1:
                continue
            work += U
            if budget is not None and work > budget:
                raise WorkBudgetExceeded(f"n_count direct exceeded budget {budget}")
            mod = v * v
            ok = (rest % mod == 0) & (rest >= X * mod) & (rest < 2 * X * mod)
            hits = np.flatnonzero(ok)
            count += len(hits)
            if collect:
                triples += [(w, int(i) + 1, v) for i in hits]
    return count, triples


def _n_congruence(params, V0, collect, budget):
    X, g, W = params.X, params.g, params.W
    work = 0
    count, triples = 0, []
    for w in range(W, 4 * W):
        N = 4 * w**g
        lo, hi = u_interval(w, V0, params)
        for v in range(V0, 2 * V0):
            if gcd(v, w) != 1:
                continue
            mod = v * v
            for r in m_solve(w, v, g):
                u = lo + (r - lo) % mod
                while u <= hi:
                    work += 1
                    q, rem = divmod(N - u * u, mod)
                    if rem == 0 and X <= q < 2 * X:
                        count += 1
                        if collect:
                            triples.append((w, u, v))
                    u += mod
            if budget is not None and work > budget:
                raise WorkBudgetExceeded(f"n_count congruence exceeded budget {budget}")
    return count, sorted(triples)


def n_count(params, V0, strategy="congruence", collect=False, budget=None):
    """N(Z, X; V0): triples (w, u, v) with v^2 | 4w^g - u^2 and quotient in [X, 2X).

    strategy is "direct" (triple loop) or "congruence" (m_solve classes inside
    u_interval).
    """
    if not 1 <= V0 < params.V:
        raise ValueError(f"V0={V0} outside [1, V)")
    fn = {"direct": _n_direct, "congruence": _n_congruence}[strategy]
    count, triples = fn(params, V0, collect, budget)
    return NCount(asdict(params), V0, count, strategy, False, triples if collect else None)


def r_g(d, Z, g, X=None):
    """R_g(d; Z) and its triples (w, u, v) with w = p1 p2, p1 != p2 in [Z, 2Z)."""
    if d < 1 or not is_squarefree(d):
        return 0, []
    vcap = WindowParams(X, Z, g).V_bound if X is not None else None
    out = []
    for p1, p2 in combinations(prime_window(Z).primes, 2):
        w = p1 * p2
        N = 4 * w**g
        vmax = _vmax(N, d)
        if vcap is not None:
            vmax = min(vmax, vcap)
        for u, v in _square_hits(N, d, vmax):
            if gcd(w, v) == 1:
                out.append(TripleWitness(d, w, u, v))
    out.sort()
    return len(out), out


def triple_universe(X, Z, g):
    """Every R_g triple for d in [X, 2X), generated from the (w, v) side."""
    params = WindowParams(X, Z, g)
    out = []
    for p1, p2 in combinations(prime_window(Z).primes, 2):
        w = p1 * p2
        N = 4 * w**g
        for v in range(1, params.V_bound + 1):
            if gcd(v, w) != 1:
                continue
            lo, hi = _exact_u_range(N, X, v)
            if lo > hi:
                continue
            mod = v * v
            for r in m_solve(w, v, g):
                u = lo + (r - lo) % mod
                while u <= hi:
                    dd, rem = divmod(N - u * u, mod)
                    if rem == 0 and X <= dd < 2 * X and is_squarefree(dd):
                        out.append(TripleWitness(dd, w, u, v))
                    u += mod
    out.sort()
    return out


def cube_pair_related(y1, y2):
    """True iff y1^2 m2^3 = y2^2 m1^3 for some nonzero m1, m2 (coprime y's)."""
    if y1 < 1 or y2 < 1 or gcd(y1, y2) != 1:
        raise ValueError(f"need coprime positive y1, y2, got {y1}, {y2}")
    return is_cube(y1) and is_cube(y2)


def cube_pair_search(y1, y2, bound):
    """Bounded brute-force search for nonzero m1, m2 with |m_i| <= bound."""
    a, b = y1 * y1, y2 * y2
    cubes = {m**3: m for m in range(1, bound + 1)}
    for m1 in range(1, bound + 1):
        lhs = b * m1**3
        if lhs % a == 0 and lhs // a in cubes:
            return (m1, cubes[lhs // a])
    return None


def kernel(k, excluded=(2,)):
    """Odd square-free kernel: the product of the distinct odd primes dividing k."""
    if k < 1:
        raise ValueError("k must be positive")
    out = 1
    for p in factorize(k):
        if p not in excluded:
            out *= p
    return out


def kernel_count(K, kappa, excluded=(2,)):
    """#{k <= K : k(P) = kappa} by enumerating k = kappa * m, m built from P and primes of kappa."""
    excluded = tuple(sorted(set(excluded)))
    if kappa < 1 or kappa > K or not is_squarefree(kappa):
        return 0
    if any(kappa % p == 0 for p in excluded):
        return 0
    primes = sorted(set(factorize(kappa)) | set(excluded))
    # k/kappa is any product of primes from `primes` (kernel primes may repeat)
    count = 0
    stack = [(kappa, 0)]
    while stack:
        n, i = stack.pop()
        count += 1
        for j in range(i, len(primes)):
            m = n * primes[j]
            if m <= K:
                stack.append((m, j))
    return count


def kernel_table(K, excluded=(2,)):
    """Array kern[k] = k(P) for 0 <= k <= K (kern[0] unused), multiplicative sieve."""
    kern = np.ones(K + 1, dtype=np.int64)
    for p in primes_below(K + 1):
        p = int(p)
        if p in excluded:
            continue
        kern[p::p] *= p
    return kern


def kernel_count_max(K, excluded=(2,)):
    """(max count, smallest kappa attaining it) over all kappa <= K."""
    counts = np.bincount(kernel_table(K, excluded)[1:])
    kappa = int(np.argmax(counts))
    return int(counts[kappa]), kappa


def kernel_count_max_scan(K, excluded=(2,)):
    """Same maximum by a single pass with a smallest-prime-factor table."""
    spf = list(range(K + 1))
    for p in range(2, isqrt(K) + 1):
        if spf[p] == p:
            for m in range(p * p, K + 1, p):
                if spf[m] == m:
                    spf[m] = p
    excluded = set(excluded)
    counts = {}
    for k in range(1, K + 1):
        n, kern = k, 1
        while n > 1:
            p = spf[n]
            if p not in excluded:
                kern *= p
            while n % p == 0:
                n //= p
        counts[kern] = counts.get(kern, 0) + 1
    best = max(counts.values())
    return best, min(k for k, c in counts.items() if c == best)


@dataclass
class TgReport:
    X: int
    Z: int
    g: int
    total: int
    sum_r: int
    t0: int
    by_delta: dict
    cube_related: int
    n_triples: int
    pairs: list = field(default=None, repr=False)


def t_g(X, Z, g, budget=10**7, keep_pairs=False):
    """T_g = sum R_g(d)(R_g(d) - 1) over [X, 2X), cross-checked by pair enumeration.

    The pairwise route scans all ordered pairs of distinct triples and keeps
    those with v1^2 (4 w2^g - u2^2) = v2^2 (4 w1^g - u1^2) != 0.  Every kept
    pair is checked against the key factorization
    4 (v2^2 w1^g - v1^2 w2^g) = (v2 u1 - v1 u2)(v2 u1 + v1 u2).
    """
    params = WindowParams(X, Z, g)
    universe = triple_universe(X, Z, g)
    n = len(universe)
    if n * n > budget:
        raise WorkBudgetExceeded(f"T_g needs {n * n} pair checks, budget {budget}")

    # route 1: sum of R(R - 1), R computed per d by r_g
    sum_r = 0
    per_d = []
    mask = squarefree_mask(X, 2 * X)
    for i in np.flatnonzero(mask):
        r, trips = r_g(int(i) + X, Z, g, X=X)
        per_d += trips
        sum_r += r * (r - 1)
    if sorted(per_d) != universe:
        raise AssertionError("R_g triples per d disagree with the (w, v) enumeration")

    # route 2: ordered pairs of distinct triples
    total, t0 = 0, 0
    by_delta = defaultdict(int)
    cube_related = 0
    pairs = []
    for i, a in enumerate(universe):
        qa = 4 * a.w**g - a.u**2
        for j, b in enumerate(universe):
            if i == j:
                continue
            qb = 4 * b.w**g - b.u**2
            if a.v**2 * qb != b.v**2 * qa or qa == 0:
                continue
            w1, u1, v1, w2, u2, v2 = a.w, a.u, a.v, b.w, b.u, b.v
            lhs = 4 * (v2 * v2 * w1**g - v1 * v1 * w2**g)
            if lhs != (v2 * u1 - v1 * u2) * (v2 * u1 + v1 * u2):
                raise AssertionError(f"key factorization fails for {a}, {b}")
            if v1 * v1 * w2**g == v2 * v2 * w1**g:
                raise AssertionError(f"v1^2 w2^g = v2^2 w1^g for {a}, {b}")
            total += 1
            if gcd(w1, w2) != 1:
                t0 += 1
            else:
                delta = gcd(v1, v2)
                by_delta[delta] += 1
                if cube_pair_related(v1 // delta, v2 // delta):
                    cube_related += 1
            if keep_pairs:
                pairs.append((a, b))
    if total != sum_r:
        raise AssertionError(f"pair enumeration {total} != sum R(R-1) {sum_r}")
    return TgReport(X, Z, g, total, sum_r, t0, dict(sorted(by_delta.items())), cube_related, n,
                    pairs if keep_pairs else None)


def collision_pairs(d, Z, g):
    """Unordered split-prime pairs whose prime classes collide modulo Cl[g].

    p, p' collide when [P] [P']^(+-1) has order dividing g for prime ideals
    P | p, P' | p'; this happens exactly when 4 (p p')^g = u^2 + d v^2 has a
    solution with gcd(v, p p') = 1.
    """
    group = class_group(d)
    delta = group.delta.delta
    e = group.identity
    forms = {p: prime_form(p, delta) for p in split_primes(d, Z).primes}
    out = []
    for p, p2 in combinations(sorted(forms), 2):
        f, f2 = forms[p], forms[p2]
        if form_pow(_compose(f, f2), g, delta) == e or form_pow(_compose(f, inverse(f2)), g, delta) == e:
            out.append((p, p2))
    return out


def write_witnesses(path, witnesses):
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if witnesses and isinstance(witnesses[0], RepWitness):
            w.writerow(["d", "p", "p'", "u", "v"])
            for x in sorted(witnesses):
                w.writerow([x.d, x.p, x.p2, x.u, x.v])
        else:
            w.writerow(["d", "w", "u", "v"])
            for x in sorted(witnesses):
                w.writerow([x.d, x.w, x.u, x.v])
