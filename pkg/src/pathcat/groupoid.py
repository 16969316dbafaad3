"""The groupoid of a finite category of paths.

Elements are classes of triples ``[α, β, x]`` with ``src(α) = src(β)`` the
vertex of the point ``x``.  Range is ``αx`` and source is ``βx``.  Each class
is stored with the largest common tail cancelled: ``x = [μ]`` becomes
``(αμ, βμ, {s(μ)})``, which is unique by right cancellation.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from networkx.utils import UnionFind

from .boundary import Point, all_points, boundary
from .core import CategoryError, min_common_extensions


@dataclass(frozen=True)
class Element:
    alpha: int
    beta: int
    x: Point

    def display(self, cat):
        return f"[{cat.names[self.alpha]}, {cat.names[self.beta]}, {self.x.display(cat)}]"

    def sort_key(self):
        return (self.alpha, self.beta, self.x.sort_key())


def top_of(cat, x: Point):
    """The largest member μ of a finite point, so that x = [μ]."""
    for m in x.members:
        if cat.segments[m] == x.members:
            return m
    raise CategoryError("point has no largest member")


def concat_point(cat, a, x: Point) -> Point:
    """αx: the hereditary closure of {αγ : γ ∈ x}."""
    a = cat.id(a)
    if cat.src[a] != x.vertex:
        raise CategoryError(f"{cat.names[a]} does not end at the vertex of the point")
    grown = [cat.compose(a, g) for g in x.members]
    return Point(cat.rng[a], frozenset().union(*(cat.segments[m] for m in grown)))


def shift_point(cat, a, x: Point) -> Point:
    """σ^α x = {β : αβ ∈ x}, for α ∈ x."""
    a = cat.id(a)
    if a not in x.members:
        raise CategoryError(f"{cat.names[a]} is not in the point")
    f = cat.factor[a]
    return Point(cat.src[a], frozenset(f[m] for m in x.members if m in f))


def common_tail(cat, a, x: Point, a2, x2: Point):
    """(δ, δ', z) with x = δz, x' = δ'z and αδ = α'δ' ∈ α∨α', when αx = α'x'."""
    a, a2 = cat.id(a), cat.id(a2)
    if cat.rng[a] != cat.rng[a2]:
        raise CategoryError("common tails need paths with the same range")
    y = concat_point(cat, a, x)
    if y != concat_point(cat, a2, x2):
        return None
    for e in sorted(min_common_extensions(cat, (a, a2))):
        if e in y.members:
            d, d2 = cat.factor[a][e], cat.factor[a2][e]
            return d, d2, shift_point(cat, d, x)
    raise RuntimeError("equal concatenations without a common extension")


def canonical(cat, a, b, x: Point) -> Element:
    a, b = cat.id(a), cat.id(b)
    if not cat.src[a] == cat.src[b] == x.vertex:
        raise CategoryError("triple endpoints do not match")
    mu = top_of(cat, x)
    s = cat.src[mu]
    return Element(cat.compose(a, mu), cat.compose(b, mu), Point(s, frozenset({s})))


def equivalent(cat, t1, t2):
    """The defining relation on triples, checked by search over x = δz."""
    (a, b, x), (a2, b2, x2) = t1, t2
    for d in x.members:
        z = shift_point(cat, d, x)
        for d2 in x2.members:
            if shift_point(cat, d2, x2) != z:
                continue
            if (cat.compose(a, d) == cat.compose(a2, d2)
                    and cat.compose(b, d) == cat.compose(b2, d2)):
                return True
    return False


def range_of(cat, g: Element) -> Point:
    return concat_point(cat, g.alpha, g.x)


def source_of(cat, g: Element) -> Point:
    return concat_point(cat, g.beta, g.x)


def inverse(g: Element) -> Element:
    return Element(g.beta, g.alpha, g.x)


def multiply(cat, g: Element, h: Element) -> Element:
    """[α,β,x][γ,δ,y] = [αξ, δη, z] through a common tail of (β,x) and (γ,y)."""
    tail = common_tail(cat, g.beta, g.x, h.alpha, h.x)
    if tail is None:
        raise CategoryError("elements are not composable")
    xi, eta, z = tail
    return canonical(cat, cat.compose(g.alpha, xi), cat.compose(h.beta, eta), z)


def unit(cat, x: Point) -> Element:
    return canonical(cat, x.vertex, x.vertex, x)


class Groupoid:
    def __init__(self, cat, units, on_boundary):
        self.cat = cat
        self.units = tuple(units)
        self.on_boundary = on_boundary
        unit_set = set(self.units)
        elems = set()
        for x in self.units:
            for a in cat.incoming[x.vertex]:
                for b in cat.incoming[x.vertex]:
                    elems.add(canonical(cat, a, b, x))
        self.elements = tuple(sorted(elems, key=Element.sort_key))
        for g in self.elements:
            if range_of(cat, g) not in unit_set or source_of(cat, g) not in unit_set:
                raise RuntimeError("unit space is not invariant")

    def __len__(self):
        return len(self.elements)

    def r(self, g):
        return range_of(self.cat, g)

    def s(self, g):
        return source_of(self.cat, g)

    def mul(self, g, h):
        return multiply(self.cat, g, h)

    def inv(self, g):
        return inverse(g)

    def unit(self, x):
        return unit(self.cat, x)

    @cached_property
    def by_range(self):
        out = {x: [] for x in self.units}
        for g in self.elements:
            out[self.r(g)].append(g)
        return out

    @cached_property
    def by_source(self):
        out = {x: [] for x in self.units}
        for g in self.elements:
            out[self.s(g)].append(g)
        return out

    def composable_pairs(self):
        for g in self.elements:
            for h in self.by_range[self.s(g)]:
                yield g, h

    def isotropy(self, x):
        return [g for g in self.by_range[x] if self.s(g) == x]

    def orbits(self):
        uf = UnionFind(self.units)
        for g in self.elements:
            uf.union(self.r(g), self.s(g))
        groups = [sorted(c, key=Point.sort_key) for c in uf.to_sets()]
        return sorted(groups, key=lambda c: c[0].sort_key())

    def restrict(self, keep):
        """The subgroupoid on the same units with the elements satisfying ``keep``."""
        sub = object.__new__(Groupoid)
        sub.cat, sub.units, sub.on_boundary = self.cat, self.units, self.on_boundary
        sub.elements = tuple(g for g in self.elements if keep(g))
        return sub


def build_groupoid(cat, restrict_to_boundary=False) -> Groupoid:
    if not cat.exact:
        raise CategoryError("the groupoid needs an exact category")
    units = boundary(cat) if restrict_to_boundary else all_points(cat)
    return Groupoid(cat, units, restrict_to_boundary)


def cocycle(G: Groupoid, psi, g: Element):
    """c_ψ([α, β, x]) = ψ(α) - ψ(β)."""
    for v in G.cat.vertices:
        if psi(v) != psi.zero():
            raise CategoryError("degree functor must vanish on vertices")
    return psi.sub(psi(g.alpha), psi(g.beta))


def kernel_subgroupoid(G: Groupoid, psi) -> Groupoid:
    zero = psi.zero()
    return G.restrict(lambda g: cocycle(G, psi, g) == zero)


def is_principal(G: Groupoid) -> bool:
    """Trivial isotropy at every unit."""
    return all(len(G.isotropy(x)) == 1 for x in G.units)
