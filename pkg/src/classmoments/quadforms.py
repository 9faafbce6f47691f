"""Class groups of imaginary quadratic fields via reduced binary quadratic forms.

A class of Cl(-d) is represented by the unique reduced form (a, b, c) of the
fundamental discriminant of Q(sqrt(-d)).  Everything here is exact integer
arithmetic on Python ints.
"""

from dataclasses import dataclass, field
from math import gcd, isqrt
from typing import NamedTuple

from .arith import factorize, is_prime, is_squarefree, primes_below, sqrt_mod_prime


@dataclass(frozen=True)
class Discriminant:
    d: int
    delta: int


class FormClass(NamedTuple):
    a: int
    b: int
    c: int

    def discriminant(self):
        return self.b * self.b - 4 * self.a * self.c

    def is_reduced(self):
        a, b, c = self
        if not (abs(b) <= a <= c):
            return False
        if (abs(b) == a or a == c) and b < 0:
            return False
        return True


def fundamental_discriminant(d):
    """Map square-free d >= 1 to the discriminant of Q(sqrt(-d))."""
    if d < 1 or not is_squarefree(d):
        raise ValueError(f"d must be a positive square-free integer, got {d}")
    delta = -d if d % 4 == 3 else -4 * d
    return Discriminant(d, delta)


def is_fundamental(delta):
    if delta >= 0:
        return False
    if delta % 4 == 1:
        return is_squarefree(-delta)
    if delta % 4 == 0:
        m = -delta // 4
        return m % 4 in (1, 2) and is_squarefree(m)
    return False


def discriminant_of(delta):
    """The Discriminant record for a negative fundamental discriminant."""
    if not is_fundamental(delta):
        raise ValueError(f"{delta} is not a negative fundamental discriminant")
    return Discriminant(-delta if delta % 4 == 1 else -delta // 4, delta)


def _delta(delta):
    return delta.delta if isinstance(delta, Discriminant) else delta


def _normalize(a, b, c):
    # b into (-a, a]
    r = (a - b) // (2 * a)
    return a, b + 2 * r * a, a * r * r + b * r + c


def _reduce(a, b, c):
    a, b, c = _normalize(a, b, c)
    while a > c or (a == c and b < 0):
        a, b, c = _normalize(c, -b, a)
    return FormClass(a, b, c)


def reduce(form, delta):
    """The reduced form equivalent to the positive definite form `form`."""
    a, b, c = form
    delta = _delta(delta)
    if b * b - 4 * a * c != delta:
        raise ValueError(f"{tuple(form)} does not have discriminant {delta}")
    if a <= 0:
        raise ValueError(f"{tuple(form)} is not positive definite")
    return _reduce(a, b, c)


def identity(delta):
    delta = _delta(delta)
    k = delta % 2
    return FormClass(1, k, (k - delta) // 4)


def inverse(f):
    return _reduce(f.a, -f.b, f.c)


def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def _compose(f1, f2):
    # Gauss composition of primitive forms of equal discriminant, followed
    # by reduction (Cohen, Algorithm 5.4.7).
    a1, b1, c1 = f1
    a2, b2, c2 = f2
    if a1 > a2:
        a1, b1, c1, a2, b2, c2 = a2, b2, c2, a1, b1, c1
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1, d = 0, a1
    else:
        d, u, _ = _xgcd(a2, a1)
        y1 = u
    if s % d == 0:
        y2, x2, d1 = -1, 0, d
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


def compose(f1, f2, delta):
    """Reduced representative of the product of two classes."""
    delta = _delta(delta)
    if FormClass(*f1).discriminant() != delta or FormClass(*f2).discriminant() != delta:
        raise ValueError("forms do not share the discriminant %d" % delta)
    return _compose(f1, f2)


def form_pow(f, n, delta):
    delta = _delta(delta)
    if n < 0:
        f, n = inverse(f), -n
    result = identity(delta)
    base = FormClass(*f)
    while n:
        if n & 1:
            result = _compose(result, base)
        n >>= 1
        if n:
            base = _compose(base, base)
    return result


def form_order(f, delta, bound=None):
    """Order of the class of f by repeated composition."""
    e = identity(delta)
    x, k = FormClass(*f), 1
    while x != e:
        x = _compose(x, f)
        k += 1
        if bound is not None and k > bound:
            raise ValueError("order exceeds bound")
    return k


def reduced_forms(delta):
    """All reduced forms of discriminant delta < 0, sorted by (a, b)."""
    delta = _delta(delta)
    D = -delta
    out = []
    amax = isqrt(D // 3)
    for a in range(1, amax + 1):
        four_a = 4 * a
        for b in range(delta % 2, a + 1, 2):
            num = b * b + D
            if num % four_a:
                continue
            c = num // four_a
            if c < a:
                continue
            if gcd(gcd(a, b), c) != 1:
                continue
            out.append(FormClass(a, b, c))
            if 0 < b < a and a != c:
                out.append(FormClass(a, -b, c))
    out.sort()
    return out


def prime_form(p, delta):
    """A form (p, b, c) of discriminant delta, or None if p is inert."""
    delta = _delta(delta)
    if p == 2:
        for b in range(0, 4):
            if (b * b - delta) % 8 == 0:
                return _reduce(2, b, (b * b - delta) // 8)
        return None
    r = sqrt_mod_prime(delta, p)
    if r is None:
        return None
    if (r - delta) % 2:
        r = p - r
    return _reduce(p, r, (r * r - delta) // (4 * p))


def _extend(subgroup, gen, delta):
    """Extend a subgroup {form: exponent vector} by a new generator.

    Returns the relation (k, vector of gen**k) with k the order of gen modulo
    the old subgroup; k == 1 means gen already lies in it and nothing changes.
    """
    powers = [None]
    x = FormClass(*gen)
    k = 1
    while x not in subgroup:
        powers.append(x)
        x = _compose(x, gen)
        k += 1
    rel = subgroup[x]
    if k == 1:
        return 1, rel
    old = list(subgroup.items())
    for j in range(1, k):
        gj = powers[j]
        for s, e in old:
            subgroup[_compose(s, gj)] = e + (j,)
    for s in list(subgroup):
        if len(subgroup[s]) < len(rel) + 1:
            subgroup[s] = subgroup[s] + (0,)
    return k, rel


def smith_invariants(rows):
    """Invariant factors (> 1) of the abelian group Z^n / rowspace(rows)."""
    m = [list(r) for r in rows]
    nr = len(m)
    nc = len(m[0]) if m else 0
    diag = []
    for t in range(min(nr, nc)):
        while True:
            cand = [(abs(m[i][j]), i, j) for i in range(t, nr) for j in range(t, nc) if m[i][j]]
            if not cand:
                return sorted(x for x in diag if x > 1)
            _, pi, pj = min(cand)
            m[t], m[pi] = m[pi], m[t]
            for row in m:
                row[t], row[pj] = row[pj], row[t]
            piv = m[t][t]
            clean = True
            for i in range(t + 1, nr):
                q = m[i][t] // piv
                if q:
                    m[i] = [x - q * y for x, y in zip(m[i], m[t])]
                clean = clean and m[i][t] == 0
            for j in range(t + 1, nc):
                q = m[t][j] // piv
                if q:
                    for row in m:
                        row[j] -= q * row[t]
                clean = clean and m[t][j] == 0
            if not clean:
                continue
            bad = next((i for i in range(t + 1, nr) for j in range(t + 1, nc) if m[i][j] % piv), None)
            if bad is None:
                break
            m[t] = [x + y for x, y in zip(m[t], m[bad])]
        diag.append(abs(m[t][t]))
    return sorted(x for x in diag if x > 1)


@dataclass(frozen=True)
class ClassGroup:
    delta: Discriminant
    forms: tuple
    h: int
    divisors: tuple
    generators: tuple = field(default=(), compare=False)

    @property
    def identity(self):
        return identity(self.delta.delta)


def _structure(gens, delta):
    e = identity(delta)
    subgroup = {e: ()}
    used, rels = [], []
    for g in gens:
        k, rel = _extend(subgroup, g, delta)
        if k == 1:
            continue
        used.append(g)
        rels.append((k, rel))
    r = len(used)
    rows = []
    for i, (k, rel) in enumerate(rels):
        row = [0] * r
        for j, x in enumerate(rel):
            row[j] = -x
        row[i] += k
        rows.append(row)
    return subgroup, tuple(used), rows


def enumerate_class_group(delta):
    """Cl(delta) from exhaustive reduced-form enumeration."""
    disc = delta if isinstance(delta, Discriminant) else discriminant_of(delta)
    forms = tuple(reduced_forms(disc.delta))
    subgroup, gens, rows = _structure(forms, disc.delta)
    if len(subgroup) != len(forms):
        raise AssertionError("composition closure disagrees with enumeration")
    divisors = tuple(smith_invariants(rows)) if rows else ()
    return ClassGroup(disc, forms, len(forms), divisors or (1,), gens)


def class_group(d):
    """Cl(-d) for square-free d."""
    return enumerate_class_group(fundamental_discriminant(d))


def class_number_by_generation(delta):
    """h(delta) as the order of the subgroup generated by small prime forms.

    Every reduced form has a <= sqrt(|delta|/3), so prime forms up to that
    bound generate Cl(delta); the group is grown by coset extension and
    never consults the reduced-form enumeration.
    """
    delta = _delta(delta)
    bound = isqrt(-delta // 3)
    gens = []
    for p in primes_below(bound + 1):
        f = prime_form(int(p), delta)
        if f is not None:
            gens.append(f)
    subgroup, _, rows = _structure(gens, delta)
    h = 1
    for i, row in enumerate(rows):
        h *= row[i]
    assert h == len(subgroup)
    return h


def composition_table(group):
    """Full h x h table of indices into group.forms."""
    index = {f: i for i, f in enumerate(group.forms)}
    delta = group.delta.delta
    return [[index[_compose(f, g)] for g in group.forms] for f in group.forms]


def orders_from_table(table, identity_index):
    out = []
    for i in range(len(table)):
        x, k = i, 1
        while x != identity_index:
            x = table[x][i]
            k += 1
        out.append(k)
    return out


@dataclass(frozen=True)
class GPart:
    g: int
    sylow_order: int
    torsion_count: int


def g_part(group, g):
    """Sylow g-subgroup order and g-torsion count of a class group."""
    if g < 3 or g % 2 == 0 or not is_prime(g):
        raise ValueError(f"g must be an odd prime, got {g}")
    sylow = 1
    h = group.h
    while h % g == 0:
        sylow *= g
        h //= g
    if sylow == 1:
        return GPart(g, 1, 1)
    e = group.identity
    delta = group.delta.delta
    torsion = sum(1 for f in group.forms if form_pow(f, g, delta) == e)
    return GPart(g, sylow, torsion)


def g_part_from_divisors(divisors, g):
    sylow, rank = 1, 0
    for n in divisors:
        if n % g == 0:
            rank += 1
        while n % g == 0:
            sylow *= g
            n //= g
    return GPart(g, sylow, g**rank)


def class_row(d, g_list=(3,)):
    """(d, delta, h, torsion_g, sylow_g, ...) for one square-free d."""
    group = class_group(d)
    row = [d, group.delta.delta, group.h]
    for g in g_list:
        gp = g_part(group, g)
        row += [gp.torsion_count, gp.sylow_order]
    return tuple(row)


def group_exponent_ok(group):
    """Lagrange check: every class has order dividing h."""
    delta = group.delta.delta
    e = group.identity
    return all(form_pow(f, group.h, delta) == e for f in group.forms)


__all__ = [
    "ClassGroup",
    "Discriminant",
    "FormClass",
    "GPart",
    "class_group",
    "class_number_by_generation",
    "class_row",
    "compose",
    "composition_table",
    "discriminant_of",
    "enumerate_class_group",
    "form_order",
    "form_pow",
    "fundamental_discriminant",
    "g_part",
    "g_part_from_divisors",
    "identity",
    "inverse",
    "is_fundamental",
    "orders_from_table",
    "prime_form",
    "reduce",
    "reduced_forms",
    "smith_invariants",
]
