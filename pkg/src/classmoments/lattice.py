"""Rank-2 integer lattices: congruence lattices, Gauss reduction, successive
minima, point counts in discs, cube roots modulo square-free odd q and the
coset systems attached to the cube congruences of the T_3 analysis."""

from dataclasses import dataclass
from math import gcd, isqrt, sqrt

from .arith import WorkBudgetExceeded, crt_product, factorize, is_squarefree
from .repcount import kernel


@dataclass(frozen=True)
class Lattice2D:
    b1: tuple
    b2: tuple
    origin: tuple = (0, 0)

    @property
    def det(self):
        return abs(self.b1[0] * self.b2[1] - self.b1[1] * self.b2[0])

    def contains(self, z):
        """True if z - origin is an integer combination of b1, b2."""
        x, y = z[0] - self.origin[0], z[1] - self.origin[1]
        (a, b), (c, d) = self.b1, self.b2
        det = a * d - b * c
        i, j = x * d - y * c, a * y - b * x
        return i % det == 0 and j % det == 0


@dataclass(frozen=True)
class Minima:
    lambda1: float
    lambda2: float
    v1: tuple
    v2: tuple


def _norm(v):
    return v[0] * v[0] + v[1] * v[1]


def lattice_from_congruence(ell, b):
    """{(z1, z2) : z2 = b z1 (mod ell)} with basis (1, b), (0, ell)."""
    if ell < 1:
        raise ValueError("ell must be positive")
    if not 0 <= b < ell and not (ell == 1 and b == 0):
        raise ValueError(f"b={b} not a residue mod {ell}")
    return Lattice2D((1, b % ell), (0, ell))


def _canon(v):
    # sign-normalise into the upper half plane: z2 > 0, or z2 == 0 and z1 > 0
    if v[1] < 0 or (v[1] == 0 and v[0] < 0):
        return (-v[0], -v[1])
    return v


def _key(v):
    # ties between equal lengths go to the smaller polar angle
    return (_norm(v), -v[0])


def gauss_reduce(lat):
    """Lagrange-Gauss reduction; returns (reduced lattice, successive minima)."""
    b1, b2 = tuple(lat.b1), tuple(lat.b2)
    if b1[0] * b2[1] - b1[1] * b2[0] == 0:
        raise ValueError("degenerate basis")
    if _norm(b1) > _norm(b2):
        b1, b2 = b2, b1
    while True:
        n1 = _norm(b1)
        dot = b1[0] * b2[0] + b1[1] * b2[1]
        # nearest integer to dot / n1
        q = (2 * dot + n1) // (2 * n1)
        b2 = (b2[0] - q * b1[0], b2[1] - q * b1[1])
        if _norm(b2) >= n1:
            break
        b1, b2 = b2, b1
    # shortest and second-shortest vectors, deterministic on ties
    cands = {_canon((i * b1[0] + j * b2[0], i * b1[1] + j * b2[1]))
             for i in range(-2, 3) for j in range(-2, 3) if (i, j) != (0, 0)}
    v1 = min(cands, key=_key)
    v2 = min((c for c in cands if c[0] * v1[1] - c[1] * v1[0] != 0), key=_key)
    red = Lattice2D(v1, v2, lat.origin)
    if red.det != lat.det:
        raise AssertionError("reduction changed the determinant")
    return red, Minima(sqrt(_norm(v1)), sqrt(_norm(v2)), v1, v2)


def count_points(lat, x, budget=10**7):
    """Number of z in the lattice (through the origin) with |z| <= x.

    Uses the reduced basis: for z = i b1 + j b2 the component orthogonal to
    b1 has length |j| det / |b1|, which bounds j; each row j is an exact
    integer interval in i.
    """
    if x <= 0:
        raise ValueError("radius must be positive")
    red, _ = gauss_reduce(lat)
    b1, b2 = red.b1, red.b2
    n1 = _norm(b1)
    det = red.det
    # x may be real; compare squared norms against x^2 exactly for ints
    x2 = x * x
    jmax = int(x * sqrt(n1) / det) + 1
    if 2 * jmax + 1 > budget:
        raise WorkBudgetExceeded(f"count_points needs {2 * jmax + 1} rows, budget {budget}")
    dot = b1[0] * b2[0] + b1[1] * b2[1]
    n2 = _norm(b2)
    total = 0
    for j in range(-jmax, jmax + 1):
        # n1 i^2 + 2 j dot i + j^2 n2 <= x2
        B = j * dot
        C = j * j * n2
        disc = B * B - n1 * (C - x2)
        if disc < 0:
            continue
        r = sqrt(disc)
        lo = int((-B - r) // n1) - 1
        hi = int((-B + r) // n1) + 1
        while lo <= hi and n1 * lo * lo + 2 * B * lo + C > x2:
            lo += 1
        while hi >= lo and n1 * hi * hi + 2 * B * hi + C > x2:
            hi -= 1
        if hi >= lo:
            total += hi - lo + 1
    return total


def count_points_congruence(ell, b, x):
    """Disc count for {z2 = b z1 (mod ell)} by scanning z1 and counting z2 arithmetically."""
    X = int(x)
    total = 0
    for z1 in range(-X, X + 1):
        rem = x * x - z1 * z1
        if rem < 0:
            continue
        h = isqrt(int(rem)) if isinstance(rem, int) else int(sqrt(rem))
        while (h + 1) ** 2 <= rem:
            h += 1
        while h * h > rem:
            h -= 1
        r = (b * z1) % ell
        # z2 in [-h, h] with z2 = r (mod ell)
        total += (h - r) // ell - (-h - 1 - r) // ell
    return total


def davenport_bound(x, minima, constant=4):
    return constant * (1 + x / minima.lambda1) * (1 + x / minima.lambda2)


def _cube_roots_prime(a, p):
    a %= p
    if a == 0:
        return [0]
    if p == 3 or p % 3 == 2:
        # cubing is a bijection on (Z/p)^*
        return [pow(a, pow(3, -1, p - 1), p)]
    if pow(a, (p - 1) // 3, p) != 1:
        return []
    # p - 1 = 3^s t with 3 not dividing t
    s, t = 0, p - 1
    while t % 3 == 0:
        t //= 3
        s += 1
    z = 2
    while pow(z, (p - 1) // 3, p) == 1:
        z += 1
    c = pow(z, t, p)  # generates the 3-Sylow subgroup, order 3^s
    # x0 = a^u with 3u = 1 (mod t); then x0^3 / a lies in the 3-Sylow subgroup
    u = pow(3, -1, t) if t > 1 else 0
    x = pow(a, u, p)
    b = pow(x, 3, p) * pow(a, -1, p) % p
    cc, e = 1, 0
    while cc != b:
        cc = cc * c % p
        e += 1
        if e >= 3**s:
            raise AssertionError("cube root correction failed")
    if e % 3:
        raise AssertionError("cube root correction failed")
    x = x * pow(c, (-(e // 3)) % 3**s, p) % p
    omega = pow(c, 3 ** (s - 1), p)
    return sorted({x, x * omega % p, x * omega * omega % p})


def cube_roots_mod(a, q):
    """Residues x (mod q) with x^3 = a (mod q), for odd square-free q."""
    if q < 1 or q % 2 == 0 or not is_squarefree(q):
        raise ValueError(f"q={q} must be odd and square-free")
    if q == 1:
        return [0]
    parts = []
    for p in sorted(factorize(q)):
        roots = _cube_roots_prime(a, p)
        if not roots:
            return []
        parts.append((p, roots))
    return crt_product(parts)


@dataclass(frozen=True)
class CongruenceSystem:
    y1: int
    y2: int
    k: int
    q1: int
    q2: int
    ell: int
    a1: int
    a2: int

    def admits(self, w1, w2):
        """Direct check of w1^3 = a1 (q1), w2^3 = a2 (q2), y2^2 w1^3 = y1^2 w2^3 (ell)."""
        return ((w1**3 - self.a1) % self.q1 == 0
                and (w2**3 - self.a2) % self.q2 == 0
                and (self.y2**2 * w1**3 - self.y1**2 * w2**3) % self.ell == 0)


def congruence_system(y1, y2, k):
    """Reduce the cube congruences to square-free odd moduli q1, q2, ell."""
    if gcd(y1, y2) != 1:
        raise ValueError("y1 and y2 must be coprime")
    q1, q2, ell = kernel(y1), kernel(y2), kernel(k)
    if gcd(q1, q2) != 1 or gcd(q1, ell) != 1 or gcd(q2, ell) != 1:
        raise ValueError(f"q1={q1}, q2={q2}, ell={ell} are not pairwise coprime")
    # 4 y2^2 w1^3 = k^2 (mod q1)  ->  w1^3 = a1
    a1 = k * k * pow(4 * y2 * y2, -1, q1) % q1 if q1 > 1 else 0
    a2 = k * k * pow(4 * y1 * y1, -1, q2) % q2 if q2 > 1 else 0
    return CongruenceSystem(y1, y2, k, q1, q2, ell, a1, a2)


def lattice_system(y1, y2, k, W=None):
    """Lattice cosets (c1, c2) + Lambda, det Lambda = q1 q2 ell, covering the system.

    Every admissible (w1, w2) with gcd(w1, w2) = 1 lies in one of the cosets,
    and every point of every coset satisfies the three congruences.  With W
    given, shifts are moved to the smallest representatives >= W.
    """
    sys_ = congruence_system(y1, y2, k)
    q1, q2, ell = sys_.q1, sys_.q2, sys_.ell
    r1s = cube_roots_mod(sys_.a1, q1)
    r2s = cube_roots_mod(sys_.a2, q2)
    if ell > 1:
        y1inv = pow(y1, -1, ell)
        bs = cube_roots_mod((y2 * y1inv) ** 2 % ell, ell)
    else:
        bs = [0]
    out = []
    for b in bs:
        # Lambda = {(q1 t, beta t + q2 ell s)}, beta = 0 (q2), beta = b q1 (ell)
        beta, _ = _crt2(0, q2, b * q1 % ell, ell)
        base = Lattice2D((q1, beta), (0, q2 * ell))
        for r1 in r1s:
            for r2 in r2s:
                c1 = _crt2(r1, q1, 1, ell)[0] if ell > 1 else r1
                c2 = _crt2(r2, q2, b * c1 % ell, ell)[0]
                c1, c2 = _shift(c1, c2, q1, beta, q2 * ell, W)
                out.append(Lattice2D(base.b1, base.b2, (c1, c2)))
    return sys_, out


def _crt2(r1, m1, r2, m2):
    if m1 == 1:
        return r2 % m2, m2
    if m2 == 1:
        return r1 % m1, m1
    inv = pow(m1, -1, m2)
    return (r1 + m1 * ((r2 - r1) * inv % m2)) % (m1 * m2), m1 * m2


def _shift(c1, c2, q1, beta, m2, W):
    if W is None:
        return c1, c2
    t = -((c1 - W) // q1)  # smallest c1 + t q1 >= W
    c1, c2 = c1 + t * q1, c2 + t * beta
    c2 = W + (c2 - W) % m2
    return c1, c2


def in_some_coset(cosets, w):
    return any(L.contains(w) for L in cosets)


def replay_t3_pair(a, b, W=None):
    """Map a T_3 pair of triples with coprime w's to (y1, y2, k) and check coset membership.

    Returns (system, cosets, hit) where hit is the coset containing (w1, w2).
    """
    if gcd(a.w, b.w) != 1:
        raise ValueError("replay needs gcd(w1, w2) = 1")
    delta = gcd(a.v, b.v)
    y1, y2 = a.v // delta, b.v // delta
    k = y2 * a.u + y1 * b.u
    sys_, cosets = lattice_system(y1, y2, k, W=W)
    if not sys_.admits(a.w, b.w):
        raise AssertionError(f"pair {a}, {b} violates the reduced congruences")
    hits = [L for L in cosets if L.contains((a.w, b.w))]
    return sys_, cosets, hits[0] if hits else None
