"""Brute-force reference computations that read only the composition table.

Nothing here uses the cached structure of PathCategory (tails, segments,
factor); each function rescans ``cat.table``.
"""
from itertools import combinations, product


def tails(cat, a):
    return frozenset(ab for (x, _), ab in cat.table.items() if x == a)


def segments(cat, m):
    return frozenset(x for (x, _), ab in cat.table.items() if ab == m)


def at(cat, v):
    return frozenset(m for m in range(len(cat)) if cat.rng[m] == v)


def meets(cat, a, b):
    return bool(tails(cat, a) & tails(cat, b))


def join(cat, fam):
    common = frozenset.intersection(*(tails(cat, a) for a in fam))
    return frozenset(m for m in common
                     if not any(d != m and m in tails(cat, d) for d in common))


def shift(cat, a, m):
    """The unique c with a·c = m, or None."""
    hits = [c for (x, c), ab in cat.table.items() if x == a and ab == m]
    assert len(hits) <= 1
    return hits[0] if hits else None


def zigzag_eval(cat, zz, m):
    for a, b in reversed(zz):
        m = cat.table.get((b, m))
        if m is None:
            return None
        m = shift(cat, a, m)
        if m is None:
            return None
    return m


def subsets(items):
    items = sorted(items)
    for k in range(len(items) + 1):
        yield from combinations(items, k)


def is_hereditary_directed(cat, v, members):
    members = frozenset(members)
    if v not in members:
        return False
    for m in members:
        if not segments(cat, m) <= members:
            return False
    for a, b in combinations(sorted(members), 2):
        if not (tails(cat, a) & tails(cat, b) & members):
            return False
    return True


def lambda_star(cat, v):
    rest = at(cat, v) - {v}
    return {frozenset(s) | {v} for s in subsets(rest)
            if is_hereditary_directed(cat, v, frozenset(s) | {v})}


def maximal(points):
    return {x for x in points if not any(x < y for y in points)}


def exhaustive(cat, v, fam):
    return all(any(meets(cat, m, a) for a in fam) for m in at(cat, v))


def minimal_fe(cat, v):
    found = []
    for s in subsets(at(cat, v)):
        s = frozenset(s)
        if s and exhaustive(cat, v, s) and not any(f < s for f in found):
            found.append(s)
    return {f for f in found if not any(g < f for g in found)}


def concat(cat, a, x):
    """αx as a set: the hereditary closure of {αγ : γ ∈ x}."""
    out = set()
    for g in x:
        out |= segments(cat, cat.table[(a, g)])
    return frozenset(out)


def count_homs_mod(cat, p):
    """Number of functors into Z/p vanishing on vertices, by enumeration."""
    arrows = [a for a in range(len(cat)) if cat.src[a] != a]
    count = 0
    for vals in product(range(p), repeat=len(arrows)):
        val = dict.fromkeys(range(len(cat)), 0)
        val.update(zip(arrows, vals))
        if all((val[a] + val[b] - val[ab]) % p == 0 for (a, b), ab in cat.table.items()):
            count += 1
    return count


def axioms(cat):
    """Names of the violated axioms, straight from the definitions."""
    n, t = len(cat), cat.table
    verts = {a for a in range(n) if cat.src[a] == a}
    bad = set()
    for (a, b), ab in t.items():
        if cat.rng[ab] != cat.rng[a] or cat.src[ab] != cat.src[b]:
            bad.add("endpoints")
        if (a in verts and ab != b) or (b in verts and ab != a):
            bad.add("identity")
        if ab in verts and not a == b == ab:
            bad.add("no-inverses")
    for (a, b), ab in t.items():
        for c in range(n):
            if (b, c) in t and (ab, c) in t and (a, t[(b, c)]) in t:
                if t[(ab, c)] != t[(a, t[(b, c)])]:
                    bad.add("associativity")
    for (a, b), ab in t.items():
        for (a2, b2), ab2 in t.items():
            if a == a2 and ab == ab2 and b != b2:
                bad.add("left-cancellation")
            if b == b2 and ab == ab2 and a != a2:
                bad.add("right-cancellation")
    if any(a not in verts and cat.src[a] == cat.rng[a] for a in range(n)):
        bad.add("acyclicity")
    return bad
