"""Finite categories of paths stored as explicit composition tables.

Morphisms are interned as integers ``0..n-1`` with display names.  Composition
``compose(a, b)`` is the path ``ab``: first ``b``, then ``a``, so it is defined
when ``src(a) == rng(b)``; the result has ``rng(a)`` and ``src(b)``.

A category may carry a ``bound``: it is then a truncated ball of an infinite
category, composition is partial, and ``weight`` records the length of each
element.  Verdicts computed on a ball are stamped with that bound.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Iterable, Mapping, Sequence


class CategoryError(ValueError):
    """Malformed input: unknown identifiers, bad tables, empty categories."""


class StructuralError(CategoryError):
    def __init__(self, message, pairs=()):
        super().__init__(message)
        self.pairs = list(pairs)


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple

    def __str__(self):
        return f"{self.axiom}: {', '.join(map(str, self.witness))}"


@dataclass(frozen=True)
class Verdict:
    """A yes/no answer that may be inconclusive on a truncated ball.

    ``value`` is True, False, or None (unknown up to ``bound``).
    """
    value: bool | None
    witness: object = None
    bound: int | None = None

    def __bool__(self):
        return self.value is True

    @property
    def status(self):
        if self.value is None:
            return f"unknown up to bound {self.bound}"
        word = "holds" if self.value else "fails"
        return word if self.bound is None else f"{word} within bound {self.bound}"


class PathCategory:
    def __init__(self, names: Sequence[str], src: Sequence[int], rng: Sequence[int],
                 table: Mapping[tuple[int, int], int], bound: int | None = None,
                 weight: Sequence[int] | None = None):
        self.names = tuple(names)
        self.src = tuple(src)
        self.rng = tuple(rng)
        self.table = dict(table)
        self.bound = bound
        self.weight = tuple(weight) if weight is not None else None
        if len(set(self.names)) != len(self.names):
            raise CategoryError("duplicate morphism names")
        if not (len(self.src) == len(self.rng) == len(self.names)):
            raise CategoryError("src/rng maps must cover every morphism")

    @classmethod
    def from_table(cls, morphisms, src, rng, compose, bound=None, weight=None):
        """Build from names.  ``src``/``rng`` map names to vertex names and
        ``compose`` is an iterable of ``(a, b, ab)`` name triples.  Vertices
        are the morphisms that are their own source.  Identity compositions
        are filled in when absent.
        """
        morphisms = list(morphisms)
        index = {m: i for i, m in enumerate(morphisms)}
        if len(index) != len(morphisms):
            raise CategoryError("duplicate morphism names")

        def look(name, what):
            try:
                return index[name]
            except KeyError:
                raise CategoryError(f"unknown {what} {name!r}") from None

        s = [look(src[m], "vertex") if m in src else None for m in morphisms]
        r = [look(rng[m], "vertex") if m in rng else None for m in morphisms]
        missing = [m for m, a, b in zip(morphisms, s, r) if a is None or b is None]
        if missing:
            raise CategoryError(f"src/rng undefined for {missing}")
        table = {}
        for a, b, ab in compose:
            key = (look(a, "morphism"), look(b, "morphism"))
            if key in table and table[key] != look(ab, "morphism"):
                raise StructuralError(f"conflicting entries for ({a}, {b})", [(a, b)])
            table[key] = look(ab, "morphism")
        for i in range(len(morphisms)):
            table.setdefault((r[i], i), i)
            table.setdefault((i, s[i]), i)
        w = None if weight is None else [weight[m] for m in morphisms]
        return cls(morphisms, s, r, table, bound=bound, weight=w)

    def __len__(self):
        return len(self.names)

    def __repr__(self):
        kind = "exact" if self.bound is None else f"ball({self.bound})"
        return f"<PathCategory {kind}: {len(self.vertices)} vertices, {len(self)} morphisms>"

    @property
    def exact(self):
        return self.bound is None

    # identifiers

    @cached_property
    def index(self):
        return {n: i for i, n in enumerate(self.names)}

    def id(self, x):
        if isinstance(x, int):
            if 0 <= x < len(self.names):
                return x
            raise CategoryError(f"unknown path id {x}")
        try:
            return self.index[x]
        except KeyError:
            raise CategoryError(f"unknown path {x!r}") from None

    def ids(self, xs):
        return frozenset(self.id(x) for x in xs)

    def name(self, i):
        return self.names[i]

    def fmt(self, paths):
        """Sorted display names, for messages and reports."""
        return sorted(self.names[i] for i in paths)

    # structure

    @cached_property
    def vertices(self):
        return tuple(i for i in range(len(self)) if self.src[i] == i)

    def is_vertex(self, a):
        return self.src[a] == a

    def compose(self, a, b):
        """The path ``ab`` or None when undefined."""
        return self.table.get((a, b))

    def length(self, a):
        return self.weight[a] if self.weight is not None else None

    @cached_property
    def tails(self):
        out = [set() for _ in self.names]
        for (a, _), ab in self.table.items():
            out[a].add(ab)
        return tuple(frozenset(t) for t in out)

    @cached_property
    def segments(self):
        out = [set() for _ in self.names]
        for a, tail in enumerate(self.tails):
            for m in tail:
                out[m].add(a)
        return tuple(frozenset(s) for s in out)

    @cached_property
    def factor(self):
        """``factor[a][ab] = b``."""
        out = [dict() for _ in self.names]
        for (a, b), ab in self.table.items():
            out[a].setdefault(ab, b)
        return tuple(out)

    @cached_property
    def incoming(self):
        """``incoming[v]`` = the paths with source ``v``."""
        out = {v: set() for v in self.vertices}
        for a in range(len(self)):
            out.setdefault(self.src[a], set()).add(a)
        return {v: frozenset(s) for v, s in out.items()}

    def paths_at(self, v):
        """vΛ: the paths with range ``v``."""
        return self.tails[v]

    def between(self, u, w):
        """uΛw."""
        return frozenset(a for a in self.tails[u] if self.src[a] == w)

    def maximal_paths(self, v):
        return frozenset(a for a in self.tails[v] if self.tails[a] == {a})

    def decided(self, a, b):
        """Whether the truncation settles that ``a`` and ``b`` do not meet.

        Meeting inside the ball is always conclusive.  Failing to meet is
        conclusive on an exact category, and on a ball when the two lengths
        sum to at most the bound: graded examples never need a longer common
        extension than that.
        """
        if self.bound is None:
            return True
        return self.weight[a] + self.weight[b] <= self.bound

    def meet_status(self, a, b):
        """True (they meet), False (provably disjoint) or None (unknown)."""
        if not self.tails[a].isdisjoint(self.tails[b]):
            return True
        return False if self.decided(a, b) else None


def _check_ids(cat, *xs):
    return [cat.id(x) for x in xs]


def validate_category(cat: PathCategory) -> list[Violation]:
    """Every violated axiom with a witness; an empty list means valid.

    Raises StructuralError when the table itself is malformed: no vertices,
    endpoints that are not vertices, or composition defined off (or, for an
    exact category, missing on) the composable pairs.
    """
    n = len(cat)
    if not cat.vertices:
        raise StructuralError("a category of paths needs at least one vertex")
    nm = cat.names
    bad_ends = [nm[a] for a in range(n) if not cat.is_vertex(cat.src[a])
                or not cat.is_vertex(cat.rng[a])]
    bad_ends += [nm[v] for v in cat.vertices if cat.rng[v] != v]
    if bad_ends:
        raise StructuralError(f"endpoints are not vertices for {bad_ends}")
    off = [(nm[a], nm[b]) for (a, b) in cat.table if cat.src[a] != cat.rng[b]]
    missing = []
    if cat.exact:
        missing = [(nm[a], nm[b]) for a, b in product(range(n), repeat=2)
                   if cat.src[a] == cat.rng[b] and (a, b) not in cat.table]
    if off or missing:
        pairs = off + missing
        raise StructuralError(
            f"composition defined off the composable pairs {off} or missing on {missing}",
            pairs)

    out = []
    table = cat.table
    for (a, b), ab in sorted(table.items()):
        if cat.rng[ab] != cat.rng[a] or cat.src[ab] != cat.src[b]:
            out.append(Violation("endpoints", (nm[a], nm[b], nm[ab])))
        if cat.is_vertex(a) and ab != b:
            out.append(Violation("identity", (nm[a], nm[b], nm[ab])))
        if cat.is_vertex(b) and ab != a:
            out.append(Violation("identity", (nm[a], nm[b], nm[ab])))
        if cat.is_vertex(ab) and not (a == b == ab):
            out.append(Violation("no-inverses", (nm[a], nm[b], nm[ab])))
    for (a, b), ab in sorted(table.items()):
        for c in range(n):
            if (ab, c) not in table or (b, c) not in table:
                continue
            bc = table[(b, c)]
            if (a, bc) in table and table[(ab, c)] != table[(a, bc)]:
                out.append(Violation("associativity", (nm[a], nm[b], nm[c])))
    seen_left, seen_right = {}, {}
    for (a, b), ab in sorted(table.items()):
        prev = seen_left.setdefault((a, ab), b)
        if prev != b:
            out.append(Violation("left-cancellation", (nm[a], nm[prev], nm[b])))
        prev = seen_right.setdefault((b, ab), a)
        if prev != a:
            out.append(Violation("right-cancellation", (nm[b], nm[prev], nm[a])))
    for a in range(n):
        if not cat.is_vertex(a) and cat.src[a] == cat.rng[a] and cat.exact:
            out.append(Violation("acyclicity", (nm[a],)))
    return out


def is_category_of_paths(cat) -> bool:
    try:
        return not validate_category(cat)
    except StructuralError:
        return False


def initial_segments(cat, a) -> frozenset:
    """[a]: every μ with a ∈ μΛ."""
    (a,) = _check_ids(cat, a)
    return cat.segments[a]


def tail_set(cat, a) -> frozenset:
    (a,) = _check_ids(cat, a)
    return cat.tails[a]


def meets(cat, a, b) -> bool:
    a, b = _check_ids(cat, a, b)
    return not cat.tails[a].isdisjoint(cat.tails[b])


def disjoint(cat, a, b) -> bool:
    return not meets(cat, a, b)


def left_shift(cat, a, paths: Iterable) -> frozenset:
    """σ^a(E ∩ aΛ) = {b : ab ∈ E}, based at src(a)."""
    (a,) = _check_ids(cat, a)
    paths = cat.ids(paths)
    bad = [cat.names[m] for m in paths if cat.rng[m] != cat.rng[a]]
    if bad:
        raise CategoryError(f"paths {bad} are not based at {cat.names[cat.rng[a]]}")
    f = cat.factor[a]
    return frozenset(f[m] for m in paths if m in f)


def min_common_extensions(cat, paths: Iterable) -> frozenset:
    """∨F: the minimal elements of the intersection of the tail sets."""
    paths = sorted(cat.ids(paths))
    if not paths:
        raise CategoryError("the join of an empty family is not defined")
    ranges = {cat.rng[a] for a in paths}
    if len(ranges) > 1:
        raise CategoryError(f"paths {cat.fmt(paths)} do not share a range")
    common = frozenset.intersection(*(cat.tails[a] for a in paths))
    return frozenset(m for m in common
                     if not any(d != m and d in common for d in cat.segments[m]))


def check_finitely_aligned(cat):
    """(True, None), or (False, (a, b)) if the union identity fails for a pair.

    Finite categories are always finitely aligned; the pairwise check guards
    against internal inconsistencies in the table.
    """
    for v in cat.vertices:
        at_v = sorted(cat.tails[v])
        for i, a in enumerate(at_v):
            for b in at_v[i:]:
                join = min_common_extensions(cat, (a, b))
                union = frozenset().union(*(cat.tails[e] for e in join))
                if union != cat.tails[a] & cat.tails[b]:
                    return False, (cat.names[a], cat.names[b])
    return True, None
