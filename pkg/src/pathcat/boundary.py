"""Hereditary directed sets, ultrafilters of 𝒜_v, exhaustive sets, boundary."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

from .boolring import generate_ring
from .core import CategoryError, meets


@dataclass(frozen=True)
class Point:
    """A hereditary directed subset of vΛ."""
    vertex: int
    members: frozenset

    def __contains__(self, path):
        return path in self.members

    def display(self, cat):
        return "{" + ", ".join(cat.fmt(self.members)) + "}"

    def sort_key(self):
        return (self.vertex, len(self.members), sorted(self.members))


def is_hereditary(cat, members):
    return all(cat.segments[m] <= members for m in members)


def is_directed(cat, members):
    members = frozenset(members)
    items = sorted(members)
    for i, a in enumerate(items):
        for b in items[i + 1:]:
            if not (cat.tails[a] & cat.tails[b] & members):
                return False
    return True


def hereditary_closure(cat, members):
    return frozenset().union(*(cat.segments[m] for m in members)) if members else frozenset()


def point(cat, members) -> Point:
    """Validate and wrap a hereditary directed set."""
    members = cat.ids(members)
    ranges = {cat.rng[m] for m in members}
    if len(ranges) != 1:
        raise CategoryError("a point needs members sharing one range vertex")
    (v,) = ranges
    if v not in members:
        raise CategoryError("a point must contain its vertex")
    if not is_hereditary(cat, members):
        raise CategoryError(f"{cat.fmt(members)} is not hereditary")
    if not is_directed(cat, members):
        raise CategoryError(f"{cat.fmt(members)} is not directed")
    return Point(v, members)


def segment_point(cat, path) -> Point:
    """[μ] as a point."""
    path = cat.id(path)
    return Point(cat.rng[path], cat.segments[path])


def _require_exact(cat):
    if not cat.exact:
        raise CategoryError("this computation needs an exact category, not a truncated ball")


@lru_cache(maxsize=256)
def _lambda_star(cat, v):
    start = frozenset({v})
    seen = {start}
    stack = [start]
    paths = sorted(cat.paths_at(v))
    while stack:
        cur = stack.pop()
        for a in paths:
            if a in cur or not all(meets(cat, a, b) for b in cur):
                continue
            grown = cur | cat.segments[a]
            if grown not in seen and is_directed(cat, grown):
                seen.add(grown)
                stack.append(grown)
    pts = [Point(v, m) for m in seen]
    return tuple(sorted(pts, key=Point.sort_key))


def enumerate_lambda_star(cat, v) -> list[Point]:
    """Λ* at ``v`` by depth-first growth from {v}."""
    _require_exact(cat)
    return list(_lambda_star(cat, cat.id(v)))


def lambda_star_by_subsets(cat, v) -> list[Point]:
    """Λ* at ``v`` by scanning every subset of vΛ."""
    v = cat.id(v)
    paths = sorted(cat.paths_at(v) - {v})
    out = []
    for k in range(len(paths) + 1):
        for pick in combinations(paths, k):
            s = frozenset(pick) | {v}
            if is_hereditary(cat, s) and is_directed(cat, s):
                out.append(Point(v, s))
    return sorted(out, key=Point.sort_key)


def all_points(cat) -> list[Point]:
    return [x for v in cat.vertices for x in enumerate_lambda_star(cat, v)]


def is_maximal(cat, x: Point) -> bool:
    return not any(x.members < y.members for y in enumerate_lambda_star(cat, x.vertex))


def maximal_sets(cat, v) -> list[Point]:
    """Λ** at ``v``."""
    return [x for x in enumerate_lambda_star(cat, v) if is_maximal(cat, x)]


# ultrafilters

def ultrafilter_of(cat, x: Point, base=False):
    """𝒰_C (or the base family 𝒰_{C,0} when ``base``) as RingSets of 𝒜_v."""
    x = point(cat, x.members)
    if base:
        gens = [cat.tails[a] for a in x.members]
    else:
        gens = [cat.tails[a] & x.members for a in x.members]
    return [e for e in generate_ring(cat, x.vertex)
            if any(g <= e.members for g in gens)]


def is_ultrafilter(cat, v, family) -> bool:
    """Proper, closed under ∩ and upward, and prime, inside 𝒜_v."""
    chosen = {e.members for e in family}
    ring = [e.members for e in generate_ring(cat, v)]
    top = cat.paths_at(v)
    if not chosen or frozenset() in chosen:
        return False
    if any(a & b not in chosen for a in chosen for b in chosen):
        return False
    if any(e in chosen and not all(f in chosen for f in ring if e <= f) for e in ring):
        return False
    return all((e in chosen) != ((top - e) in chosen) for e in ring)


def is_fixed(cat, v, family) -> bool:
    """True when the family is {E : μ ∈ E} for some path μ."""
    chosen = {e.members for e in family}
    ring = [e.members for e in generate_ring(cat, v)]
    return any(chosen == {e for e in ring if m in e} for m in cat.paths_at(v))


# exhaustive sets

def is_exhaustive(cat, v, paths) -> bool:
    v = cat.id(v)
    paths = cat.ids(paths)
    if not paths <= cat.paths_at(v):
        raise CategoryError(f"{cat.fmt(paths - cat.paths_at(v))} not based at {cat.names[v]}")
    return all(any(meets(cat, a, b) for b in paths) for a in cat.paths_at(v))


@lru_cache(maxsize=256)
def _fe(cat, v, minimal_only):
    paths = sorted(cat.paths_at(v))
    found = []
    for k in range(1, len(paths) + 1):
        for pick in combinations(paths, k):
            s = frozenset(pick)
            if minimal_only and any(m <= s for m in found):
                continue
            if is_exhaustive(cat, v, s):
                found.append(s)
    return tuple(found)


def finite_exhaustive_sets(cat, v, minimal_only=False) -> list[frozenset]:
    """FE(v), or its inclusion-minimal members."""
    _require_exact(cat)
    return list(_fe(cat, cat.id(v), bool(minimal_only)))


# boundary

def is_boundary(cat, x: Point) -> bool:
    """For every α ∈ C some α' ∈ C ∩ αΛ has σ^{α'}C meeting every F ∈ FE(s(α')).

    Only the minimal exhaustive sets are tested; supersets meet whatever a
    subset meets.
    """
    _require_exact(cat)
    c = x.members
    for a in c:
        ok = False
        for a2 in sorted(c & cat.tails[a]):
            f = cat.factor[a2]
            shifted = frozenset(f[m] for m in c if m in f)
            if all(shifted & fe for fe in _fe(cat, cat.src[a2], True)):
                ok = True
                break
        if not ok:
            return False
    return True


@lru_cache(maxsize=64)
def _boundary(cat):
    pts = tuple(x for x in all_points(cat) if is_boundary(cat, x))
    maximal = tuple(x for v in cat.vertices for x in maximal_sets(cat, v))
    if set(pts) != set(maximal):
        raise RuntimeError("boundary criterion disagrees with the maximal directed sets")
    return pts


def boundary(cat) -> list[Point]:
    """∂Λ; on a finite category this is Λ**, and the two are compared."""
    _require_exact(cat)
    return list(_boundary(cat))


def boundary_at(cat, v) -> list[Point]:
    v = cat.id(v)
    return [x for x in boundary(cat) if x.vertex == v]


def exhaustive_coverage(cat, v, paths) -> bool:
    """Every boundary point at ``v`` contains some member of ``paths``."""
    paths = cat.ids(paths)
    return all(x.members & paths for x in boundary_at(cat, v))
