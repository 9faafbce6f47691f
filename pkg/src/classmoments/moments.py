"""Class-number sweeps and the statistics built on them: moments, tail counts,
dyadic decompositions, exponent fits and the theoretical exponents."""

import csv
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__
from ._kernels import class_data
from .arith import is_prime
from .sieve import squarefree_mask


@dataclass
class SweepTable:
    """One row per square-free d in [lo, hi), sorted by d."""

    lo: int
    hi: int
    g_list: tuple
    d: np.ndarray
    delta: np.ndarray
    h: np.ndarray
    torsion: dict
    sylow: dict
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.d)

    def column(self, g, column="torsion"):
        if g not in self.g_list:
            raise KeyError(f"g={g} not in sweep (have {self.g_list})")
        if column not in ("torsion", "sylow"):
            raise ValueError(f"column must be torsion or sylow, got {column!r}")
        return (self.torsion if column == "torsion" else self.sylow)[g]

    def covers(self, lo, hi):
        """Raise unless every square-free d in [lo, hi) has a row."""
        if lo < self.lo or hi > self.hi:
            raise ValueError(f"table covers [{self.lo}, {self.hi}), need [{lo}, {hi})")
        a, b = np.searchsorted(self.d, [lo, hi])
        expect = np.flatnonzero(squarefree_mask(lo, hi)) + lo
        if b - a != len(expect) or not np.array_equal(self.d[a:b], expect):
            raise ValueError(f"table has gaps in [{lo}, {hi})")
        return slice(int(a), int(b))

    def rows(self):
        for i in range(len(self.d)):
            row = [int(self.d[i]), int(self.delta[i]), int(self.h[i])]
            for g in self.g_list:
                row += [int(self.torsion[g][i]), int(self.sylow[g][i])]
            yield row


def header(g_list):
    cols = ["d", "delta", "h"]
    for g in g_list:
        cols += [f"h{g}_torsion", f"h{g}_sylow"]
    return cols


def _g_power_part(h, g):
    out = np.ones_like(h)
    rest = h.copy()
    while True:
        m = rest % g == 0
        if not m.any():
            return out
        out[m] *= g
        rest[m] //= g


def _sweep_chunk(args):
    lo, hi, g_list = args
    d = np.flatnonzero(squarefree_mask(lo, hi)).astype(np.int64) + lo
    N = np.where(d % 4 == 3, d, 4 * d)
    h, tors = class_data(N, g_list)
    return d, -N, h, tors


def _empty(lo, g_list):
    z = np.zeros(0, dtype=np.int64)
    return SweepTable(lo, lo, tuple(g_list), z, z, z, {g: z for g in g_list}, {g: z for g in g_list})


def read_table(path):
    """Load a sweep CSV (and its .meta.json sidecar when present)."""
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        cols = next(r)
        data = [list(map(int, row)) for row in r if row]
    g_list = tuple(int(c[1:].split("_")[0]) for c in cols[3::2])
    if cols != header(g_list):
        raise ValueError(f"unexpected sweep header {cols}")
    arr = np.array(data, dtype=np.int64).reshape(-1, len(cols))
    meta = {}
    if os.path.exists(path + ".meta.json"):
        with open(path + ".meta.json") as fh:
            meta = json.load(fh)
    lo = meta.get("lo", int(arr[0, 0]) if len(arr) else 1)
    hi = meta.get("completed_to", int(arr[-1, 0]) + 1 if len(arr) else lo)
    tors = {g: arr[:, 3 + 2 * i] for i, g in enumerate(g_list)}
    syl = {g: arr[:, 4 + 2 * i] for i, g in enumerate(g_list)}
    return SweepTable(lo, hi, g_list, arr[:, 0], arr[:, 1], arr[:, 2], tors, syl, meta)


def _write_meta(path, meta):
    with open(path + ".meta.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)


def sweep(X_lo, X_hi, g_list=(3,), path=None, chunk=100_000, jobs=1, progress=None):
    """h and the g-parts for every square-free d in [X_lo, X_hi).

    With `path`, rows are appended chunk by chunk and a rerun resumes after
    the last completed chunk recorded in the sidecar.
    """
    if not 1 <= X_lo < X_hi:
        raise ValueError(f"need 1 <= X_lo < X_hi, got {X_lo}, {X_hi}")
    g_list = tuple(int(g) for g in g_list)
    for g in g_list:
        if g < 3 or not is_prime(g):
            raise ValueError(f"g must be an odd prime, got {g}")
    start = X_lo
    meta = {"lo": X_lo, "hi": X_hi, "g_list": list(g_list), "version": __version__}
    if path and os.path.exists(path):
        old = read_table(path)
        if old.g_list != g_list or old.lo != X_lo:
            raise ValueError(f"{path} holds a sweep with lo={old.lo}, g={old.g_list}")
        start = max(X_lo, old.hi)
    elif path:
        with open(path, "w", newline="") as fh:
            csv.writer(fh).writerow(header(g_list))
    bounds = list(range(start, X_hi, chunk))
    tasks = [(a, min(a + chunk, X_hi), g_list) for a in bounds]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            table = _collect(tasks, ex.map(_sweep_chunk, tasks), path, meta, g_list, progress)
    else:
        table = _collect(tasks, map(_sweep_chunk, tasks), path, meta, g_list, progress)
    if path:
        meta["completed_to"] = X_hi
        meta["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S")
        _write_meta(path, meta)
        table = read_table(path)
    table.covers(X_lo, X_hi)
    return table


def _collect(tasks, results, path, meta, g_list, progress):
    parts = []
    for (a, b, _), (d, delta, h, tors) in zip(tasks, results):
        syl = {g: _g_power_part(h, g) for g in g_list}
        if path:
            with open(path, "a", newline="") as fh:
                w = csv.writer(fh)
                cols = [d, delta, h]
                for g in g_list:
                    cols += [tors[g], syl[g]]
                w.writerows(np.column_stack(cols).tolist())
            meta["completed_to"] = b
            _write_meta(path, meta)
        else:
            parts.append((d, delta, h, tors, syl))
        if progress:
            progress(b)
    if path:
        return None
    lo = tasks[0][0] if tasks else meta["lo"]
    hi = tasks[-1][1] if tasks else meta["lo"]
    if not parts:
        return _empty(lo, g_list)
    cat = lambda i: np.concatenate([p[i] for p in parts])
    tors = {g: np.concatenate([p[3][g] for p in parts]) for g in g_list}
    syl = {g: np.concatenate([p[4][g] for p in parts]) for g in g_list}
    return SweepTable(lo, hi, g_list, cat(0), cat(1), cat(2), tors, syl, dict(meta))


def _is_int(k):
    return isinstance(k, int) or (isinstance(k, Fraction) and k.denominator == 1)


def moment_sum(table, g, k, X, column="torsion"):
    """Sum of h_g(-d)^k over square-free 0 < d < X.

    Exact (an int) for integer k; otherwise a float accurate to ~1e-12
    relative, summed with math.fsum.
    """
    vals = table.column(g, column)[table.covers(1, X)]
    if _is_int(k):
        k = int(k)
        if k < 0:
            raise ValueError("k must be non-negative")
        return sum(int(v) ** k for v in vals.tolist())
    k = float(k)
    return math.fsum(math.exp(k * math.log(v)) for v in vals.tolist())


@dataclass(frozen=True)
class TailCount:
    g: int
    H: float
    X: int
    count: int


def tail_count(table, g, H, X, column="torsion"):
    """N_g(H; X) = #{square-free d in [X, 2X) : h_g(-d) > H}."""
    vals = table.column(g, column)[table.covers(X, 2 * X)]
    return TailCount(g, H, X, int(np.count_nonzero(vals > H)))


def dyadic_tails(table, g, X, column="torsion"):
    """Tails at H = 1, 2, 4, ... up to the first H with an empty tail."""
    tails = []
    H = 1
    while True:
        t = tail_count(table, g, H, X, column)
        tails.append(t)
        if t.count == 0:
            return tails
        H *= 2


def dyadic_moment(tails, k, band=False):
    """Dyadic majorant of the moment over d with h_g > 1.

    Default: sum over H of N(H) (2H)^k, with N the tail count.  With
    band=True the tail is replaced by the band count N(H) - N(2H), which
    sits between the moment and 2^k times it.
    """
    Hs = [t.H for t in tails]
    if Hs != [2**i for i in range(len(Hs))]:
        raise ValueError("tails must be at H = 1, 2, 4, ...")
    if tails[-1].count != 0:
        raise ValueError("tails must run until an empty tail")
    total = 0
    for i, t in enumerate(tails):
        n = t.count - tails[i + 1].count if band and i + 1 < len(tails) else t.count
        w = (2 * t.H) ** k if _is_int(k) else (2.0 * t.H) ** float(k)
        total += n * w
    return total


def dyadic_sandwich(table, g, X, k, column="torsion"):
    """(lower, majorant, upper, band, band_upper) of the dyadic decomposition on [X, 2X).

    lower is the moment over d with h_g > 1; majorant is the tail-based sum
    (bounded by lower * 2^k / (1 - 2^-k)); band is the band sum (bounded by
    lower * 2^k).  Also returns the h_g = 1 mass, the part the dyadic sums omit.
    """
    vals = table.column(g, column)[table.covers(X, 2 * X)]
    k = int(k) if _is_int(k) else float(k)
    big = [int(v) for v in vals.tolist() if v > 1]
    lower = sum(v**k for v in big)
    tails = dyadic_tails(table, g, X, column)
    major = dyadic_moment(tails, k)
    band = dyadic_moment(tails, k, band=True)
    ones = int(np.count_nonzero(vals == 1))
    return {
        "lower": lower,
        "majorant": major,
        "upper": lower * 2**k / (1 - 2.0**-k) if k > 0 else None,
        "band": band,
        "band_upper": lower * 2**k,
        "ones_mass": ones,
        "full_moment": lower + ones,
    }


def telescoping_ok(tails):
    """Sum of band counts equals N(1) = #{h_g > 1}."""
    bands = [tails[i].count - tails[i + 1].count for i in range(len(tails) - 1)]
    return sum(bands) == tails[0].count


def theoretical_exponent(g, k):
    """(sigma, case) for sum_{d<X} h_g(-d)^k << X^(sigma + eps).

    Exact Fractions for rational k.  g = 3 uses the (5k+13)/18, (2k+3)/6
    pair; g >= 5 takes the largest of the three exponents.
    """
    if not isinstance(k, float):
        k = Fraction(k)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if g < 3 or not is_prime(g):
        raise ValueError(f"g must be an odd prime, got {g}")
    one = 1.0 if isinstance(k, float) else Fraction(1)
    if g == 3:
        if k <= 4:
            return (5 * k + 13) * one / 18, "g3_holder"
        return (2 * k + 3) * one / 6, "g3_pointwise"
    s1 = 1 + k * Fraction(g - 2, 2 * g + 2) * one
    s2 = 1 + k * Fraction(g - 1, 2 * g) * one - Fraction(g - 1, 2 * g) * one
    s3 = k * one / 2
    return max((s1, "sigma1"), (s2, "sigma2"), (s3, "sigma3"), key=lambda t: t[0])


def case_boundaries(g):
    return Fraction(g * g - 1, 2 * g - 1), Fraction(g + 1)


def optimal_Z(X, g):
    """Largest integer Z with Z^(2g+2) <= X^3, i.e. floor(X^(3/(2g+2)))."""
    if X < 2:
        raise ValueError("X must be >= 2")
    e = 2 * g + 2
    Z = max(1, int(round(X ** (3 / e))))
    while Z**e > X**3:
        Z -= 1
    while (Z + 1) ** e <= X**3:
        Z += 1
    return Z


def balance_ratio(X, g, Z=None):
    """X^(3/2) Z^-1 divided by Z^g at the chosen Z."""
    Z = Z or optimal_Z(X, g)
    return X**1.5 / Z ** (g + 1)


@dataclass(frozen=True)
class Fit:
    slope: float
    intercept: float
    residuals: tuple
    rms: float


def fit_exponent(points):
    """Least-squares slope of log S against log X."""
    if len(points) < 3:
        raise ValueError("need at least 3 points")
    xs = np.log([float(x) for x, _ in points])
    ys = np.log([float(s) for _, s in points])
    if np.ptp(xs) == 0:
        raise ValueError("all X values are equal")
    A = np.column_stack([xs, np.ones_like(xs)])
    (slope, icpt), *_ = np.linalg.lstsq(A, ys, rcond=None)
    res = ys - (slope * xs + icpt)
    return Fit(float(slope), float(icpt), tuple(float(r) for r in res),
               float(np.sqrt(np.mean(res**2))))


def dh_average(table, X, g=3):
    """Mean 3-torsion count over fundamental discriminants -N with N < X."""
    if X < 100:
        raise ValueError("X must be >= 100")
    sl = table.covers(1, X)
    N = -table.delta[sl]
    tors = table.column(g, "torsion")[sl]
    m = N < X
    return float(tors[m].sum() / m.sum())


@dataclass
class MomentReport:
    g: int
    k: str
    grid: list
    sums: list
    column: str
    fitted: float
    fit_rms: float
    sigma: str
    sigma_float: float
    case: str

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def moment_report(table, g, k, grid, column="torsion"):
    sums = [moment_sum(table, g, k, X, column) for X in grid]
    fit = fit_exponent(list(zip(grid, sums)))
    sigma, case = theoretical_exponent(g, k)
    return MomentReport(g, str(k), list(grid), [int(s) if _is_int(k) else float(s) for s in sums],
                        column, fit.slope, fit.rms, str(sigma), float(sigma), case)
