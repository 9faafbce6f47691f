"""Compiled inner loops for class-number sweeps.

Forms are enumerated by (a, b, c) over a block of |D| values rather than
discriminant by discriminant; torsion is then tested only where g | h.
Every form of a fundamental discriminant is primitive, so no gcd filter is
applied: the counts are only meaningful at fundamental discriminants.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b != 0:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


@njit(cache=True)
def _reduce(a, b, c):
    while True:
        r = (a - b) // (2 * a)
        c = a * r * r + b * r + c
        b = b + 2 * r * a
        if a > c or (a == c and b < 0):
            a, b, c = c, -b, a
        else:
            return a, b, c


@njit(cache=True)
def _compose(a1, b1, c1, a2, b2, c2):
    if a1 > a2:
        a1, b1, c1, a2, b2, c2 = a2, b2, c2, a1, b1, c1
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1 = 0
        d = a1
    else:
        d, u, _ = _xgcd(a2, a1)
        y1 = u
    if s % d == 0:
        y2 = -1
        x2 = 0
        d1 = d
    else:
        d1, x2, y2 = _xgcd(s, d)
        y2 = -y2
    v1 = a1 // d1
    v2 = a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (c2 * d1 + r * (b2 + v2 * r)) // v1
    return _reduce(a3, b3, c3)


@njit(cache=True)
def _pow_is_identity(a, b, c, g, N):
    # f^g == identity, by left-to-right binary powering
    k = N % 2
    ra, rb, rc = 1, k, (k + N) // 4
    bits = 0
    t = g
    while t > 0:
        bits += 1
        t >>= 1
    for i in range(bits - 1, -1, -1):
        ra, rb, rc = _compose(ra, rb, rc, ra, rb, rc)
        if (g >> i) & 1:
            ra, rb, rc = _compose(ra, rb, rc, a, b, c)
    return ra == 1


@njit(cache=True)
def _a_max(hi):
    a = 1
    while 3 * (a + 1) * (a + 1) <= hi:
        a += 1
    return a


@njit(cache=True)
def class_counts(lo, hi):
    """h[N - lo] = number of reduced forms of discriminant -N, lo <= N < hi."""
    h = np.zeros(hi - lo, dtype=np.int64)
    amax = _a_max(hi)
    for a in range(1, amax + 1):
        for b in range(0, a + 1):
            cmin = (lo + b * b + 4 * a - 1) // (4 * a)
            if cmin < a:
                cmin = a
            cmax = (hi - 1 + b * b) // (4 * a)
            for c in range(cmin, cmax + 1):
                N = 4 * a * c - b * b
                if b == 0 or b == a or a == c:
                    h[N - lo] += 1
                else:
                    h[N - lo] += 2
    return h


@njit(cache=True)
def _fill_forms(lo, hi, offsets, forms):
    # offsets[N - lo] is the write cursor for targets, -1 elsewhere
    amax = _a_max(hi)
    for a in range(1, amax + 1):
        for b in range(0, a + 1):
            cmin = (lo + b * b + 4 * a - 1) // (4 * a)
            if cmin < a:
                cmin = a
            cmax = (hi - 1 + b * b) // (4 * a)
            for c in range(cmin, cmax + 1):
                N = 4 * a * c - b * b
                i = offsets[N - lo]
                if i < 0:
                    continue
                forms[i, 0] = a
                forms[i, 1] = b
                forms[i, 2] = c
                i += 1
                if not (b == 0 or b == a or a == c):
                    forms[i, 0] = a
                    forms[i, 1] = -b
                    forms[i, 2] = c
                    i += 1
                offsets[N - lo] = i


@njit(cache=True)
def _torsion(forms, starts, ends, Ns, g):
    out = np.zeros(len(Ns), dtype=np.int64)
    for t in range(len(Ns)):
        cnt = 0
        for i in range(starts[t], ends[t]):
            if _pow_is_identity(forms[i, 0], forms[i, 1], forms[i, 2], g, Ns[t]):
                cnt += 1
        out[t] = cnt
    return out


def class_data(Ns, g_list, block=1 << 14):
    """(h, {g: torsion}) for discriminants -N, N in the sorted array Ns.

    Each N must be the absolute value of a fundamental discriminant.
    """
    Ns = np.asarray(Ns, dtype=np.int64)
    h_out = np.zeros(len(Ns), dtype=np.int64)
    tors = {g: np.ones(len(Ns), dtype=np.int64) for g in g_list}
    if len(Ns) == 0:
        return h_out, tors
    order = np.argsort(Ns, kind="stable")
    sN = Ns[order]
    start = 0
    lo = int(sN[0])
    top = int(sN[-1]) + 1
    while lo < top:
        hi = min(lo + block, top)
        end = int(np.searchsorted(sN, hi, side="left"))
        idx = order[start:end]
        if len(idx):
            Nb = sN[start:end]
            h = class_counts(lo, hi)[Nb - lo]
            h_out[idx] = h
            for g in g_list:
                sel = np.flatnonzero(h % g == 0)
                if len(sel) == 0:
                    continue
                Nsel = Nb[sel]
                counts = h[sel]
                starts = np.concatenate(([0], np.cumsum(counts)[:-1])).astype(np.int64)
                offsets = np.full(hi - lo, -1, dtype=np.int64)
                offsets[Nsel - lo] = starts
                forms = np.zeros((int(counts.sum()), 3), dtype=np.int64)
                _fill_forms(lo, hi, offsets, forms)
                if not np.array_equal(offsets[Nsel - lo], starts + counts):
                    raise AssertionError("form fill disagrees with the class counts")
                tors[g][idx[sel]] = _torsion(forms, starts, starts + counts, Nsel, g)
        start = end
        lo = hi
    return h_out, tors
