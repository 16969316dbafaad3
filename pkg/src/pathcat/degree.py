"""Degree functors into finitely generated abelian groups, and H(Λ).

A degree functor assigns each morphism a vector ``(free part, torsion part)``
with ψ(αβ) = ψ(α) + ψ(β) and ψ(v) = 0.  H(Λ) is the free abelian group on the
morphisms modulo ``e_α + e_β - e_{αβ}``; θ sends α to the class of e_α.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import networkx as nx
from sympy import ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import smith_normal_decomp

from .core import CategoryError, Verdict, min_common_extensions


@dataclass(frozen=True)
class DegreeFunctor:
    rank: int
    torsion: tuple
    values: tuple  # per morphism id, a tuple of length rank + len(torsion)

    @property
    def width(self):
        return self.rank + len(self.torsion)

    def reduce(self, vec):
        vec = list(vec)
        for i, n in enumerate(self.torsion):
            vec[self.rank + i] %= n
        return tuple(vec)

    def zero(self):
        return (0,) * self.width

    def add(self, x, y):
        return self.reduce(a + b for a, b in zip(x, y))

    def sub(self, x, y):
        return self.reduce(a - b for a, b in zip(x, y))

    def __call__(self, a):
        return self.values[a]

    def table(self, cat):
        return {cat.names[a]: list(v) for a, v in enumerate(self.values)}


def functoriality_violation(cat, psi):
    """First composable pair where ψ fails to add up, or a vertex with ψ != 0."""
    if len(psi.values) != len(cat):
        raise CategoryError("degree functor does not cover every morphism")
    for v in cat.vertices:
        if psi(v) != psi.zero():
            return (cat.names[v],)
    for (a, b), ab in sorted(cat.table.items()):
        if psi.add(psi(a), psi(b)) != psi(ab):
            return (cat.names[a], cat.names[b], cat.names[ab])
    return None


def degree_functor(cat, values, torsion=()):
    """Build ψ from values on some morphisms (names or ids), filling in the rest
    through the composition table.  Raises CategoryError when ψ is not
    determined or not functorial.
    """
    torsion = tuple(int(n) for n in torsion)
    known = {}
    width = None
    for k, vec in values.items():
        vec = tuple(int(x) for x in vec)
        if width is None:
            width = len(vec)
        elif len(vec) != width:
            raise CategoryError("degree vectors have different lengths")
        known[cat.id(k)] = vec
    if width is None:
        width = 1
    rank = width - len(torsion)
    if rank < 0:
        raise CategoryError("more torsion moduli than coordinates")
    probe = DegreeFunctor(rank, torsion, ())
    known = {a: probe.reduce(v) for a, v in known.items()}
    for v in cat.vertices:
        if v in known and known[v] != probe.zero():
            raise CategoryError(f"vertex {cat.names[v]} must have degree 0")
        known[v] = probe.zero()
    changed = True
    while changed:
        changed = False
        for (a, b), ab in cat.table.items():
            have = [x in known for x in (a, b, ab)]
            if have == [True, True, False]:
                known[ab] = probe.add(known[a], known[b])
            elif have == [True, False, True]:
                known[b] = probe.sub(known[ab], known[a])
            elif have == [False, True, True]:
                known[a] = probe.sub(known[ab], known[b])
            else:
                continue
            changed = True
    missing = [cat.names[a] for a in range(len(cat)) if a not in known]
    if missing:
        raise CategoryError(f"degree not determined for {missing}")
    psi = DegreeFunctor(rank, torsion, tuple(known[a] for a in range(len(cat))))
    bad = functoriality_violation(cat, psi)
    if bad:
        raise CategoryError(f"degree functor is not functorial at {bad}")
    return psi


# H(Λ)

@dataclass(frozen=True)
class DegreeGroup:
    rank: int
    torsion: tuple
    theta: DegreeFunctor
    # coordinates of the quotient: (index into the Smith basis, modulus or 0)
    coords: tuple = field(repr=False)
    tinv: tuple = field(repr=False)  # rows of T^{-1}

    def describe(self):
        parts = [f"Z^{self.rank}"] if self.rank else []
        parts += [f"Z/{n}" for n in self.torsion]
        return " + ".join(parts) if parts else "0"


def _relation_rows(cat):
    n = len(cat)
    rows = []
    for (a, b), ab in sorted(cat.table.items()):
        row = [0] * n
        row[a] += 1
        row[b] += 1
        row[ab] -= 1
        rows.append(row)
    return rows


@lru_cache(maxsize=64)
def compute_H(cat) -> DegreeGroup:
    """H(Λ) and θ from the Smith normal form of the relation matrix."""
    if not cat.exact:
        raise CategoryError("H(Λ) needs an exact category")
    n = len(cat)
    rows = _relation_rows(cat)
    dm = DomainMatrix([[ZZ(x) for x in r] for r in rows], (len(rows), n), ZZ)
    d, _, t = smith_normal_decomp(dm)
    d = d.to_Matrix()
    t = t.to_Matrix()
    diag = [int(d[i, i]) for i in range(min(d.shape))]
    diag += [0] * (n - len(diag))
    free = [i for i in range(n) if diag[i] == 0]
    tors = [i for i in range(n) if diag[i] not in (0, 1, -1)]
    coords = tuple((i, 0) for i in free) + tuple((i, abs(diag[i])) for i in tors)
    torsion = tuple(abs(diag[i]) for i in tors)
    theta_vals = []
    for a in range(n):
        vec = []
        for i, mod in coords:
            x = int(t[a, i])
            vec.append(x % mod if mod else x)
        theta_vals.append(tuple(vec))
    theta = DegreeFunctor(len(free), torsion, tuple(theta_vals))
    tinv = t.inv()
    if any(x != int(x) for x in tinv):
        raise ArithmeticError("Smith transform is not unimodular")
    tinv_rows = tuple(tuple(int(tinv[i, j]) for j in range(n)) for i in range(n))
    return DegreeGroup(len(free), torsion, theta, coords, tinv_rows)


def factor_through_theta(cat, group: DegreeGroup, psi: DegreeFunctor):
    """The unique homomorphism h with ψ = h∘θ, as the list of images of the
    coordinate generators of H(Λ).  Raises CategoryError if ψ is not a degree
    functor (then no such h exists).
    """
    bad = functoriality_violation(cat, psi)
    if bad:
        raise CategoryError(f"not functorial at {bad}")
    n = len(cat)
    images = []
    for i, mod in group.coords:
        img = [0] * psi.width
        for j in range(n):
            c = group.tinv[i][j]
            if c:
                img = [x + c * y for x, y in zip(img, psi(j))]
        img = psi.reduce(img)
        if mod and psi.reduce(x * mod for x in img) != psi.zero():
            raise CategoryError("degree functor does not factor through the torsion of H")
        images.append(img)
    for a in range(n):
        got = psi.zero()
        for coef, img in zip(group.theta(a), images):
            got = psi.add(got, tuple(coef * x for x in img))
        if got != psi(a):
            raise ArithmeticError(f"factorization through θ fails at {cat.names[a]}")
    # Smith rows with unit divisor are relations and must vanish
    for i in range(n):
        if all(i != idx for idx, _ in group.coords):
            img = [0] * psi.width
            for j in range(n):
                c = group.tinv[i][j]
                if c:
                    img = [x + c * y for x, y in zip(img, psi(j))]
            if psi.reduce(img) != psi.zero():
                raise CategoryError("degree functor does not vanish on the relations")
    return images


# checks

def is_nondegenerate(cat, psi) -> Verdict:
    bad = functoriality_violation(cat, psi)
    if bad:
        raise CategoryError(f"not functorial at {bad}")
    for a in range(len(cat)):
        if not cat.is_vertex(a) and psi(a) == psi.zero():
            return Verdict(False, cat.names[a], cat.bound)
    return Verdict(True, None, cat.bound)


def pair_graph(cat, psi=None):
    """Nodes (α, β), α != β, equal range; an edge to (α', β') when αα' = ββ'.

    With ``psi`` given, only pairs with ψ(α) = ψ(β) are kept; edges never
    leave that set.
    """
    g = nx.DiGraph()
    facts = {}
    for (a, b), ab in cat.table.items():
        facts.setdefault(ab, []).append((a, b))
    for ab, fs in facts.items():
        for (a, a2), (b, b2) in combinations(sorted(fs), 2):
            if a == b or a2 == b2:
                continue
            for x, x2, y, y2 in ((a, a2, b, b2), (b, b2, a, a2)):
                if psi is None or psi(x) == psi(y):
                    g.add_edge((x, y), (x2, y2))
    return g


def is_non_isotropic(cat, psi) -> Verdict:
    """Fails exactly when some (α, β) with α != β and ψ(α) = ψ(β) starts an
    infinite walk in the pair graph; the witness is the lasso, as names."""
    bad = functoriality_violation(cat, psi)
    if bad:
        raise CategoryError(f"not functorial at {bad}")
    g = pair_graph(cat, psi)
    on_cycle = set()
    for comp in nx.strongly_connected_components(g):
        if len(comp) > 1 or any(g.has_edge(x, x) for x in comp):
            on_cycle |= comp
    if not on_cycle:
        return Verdict(True, None, cat.bound)
    # every node of g already has ψ(α) = ψ(β); walk back from a cycle node
    target = min(on_cycle)
    start = min(nx.ancestors(g, target) | {target})
    stem = nx.shortest_path(g, start, target)
    loop = _cycle_through(g, target)
    name = lambda p: (cat.names[p[0]], cat.names[p[1]])
    witness = {"stem": [name(p) for p in stem], "cycle": [name(p) for p in loop]}
    return Verdict(False, witness, cat.bound)


def _cycle_through(g, node):
    if g.has_edge(node, node):
        return [node, node]
    prev = {node: None}
    queue = deque([node])
    while queue:
        x = queue.popleft()
        for y in g.successors(x):
            if y == node:
                path = [x]
                while prev[path[-1]] is not None:
                    path.append(prev[path[-1]])
                return list(reversed(path)) + [node]
            if y not in prev:
                prev[y] = x
                queue.append(y)
    raise ValueError("node is not on a cycle")


def check_af_conditions(cat, psi, degrees=()):
    """Conditions (a) and (b) of the AF-core criterion.

    (a) holds vacuously on an exact finite category.  For (b) the smallest set
    T containing ``degrees`` with ψ(∨E) ⊆ T whenever ψ(E) ⊆ T is computed;
    closing under pairs suffices since ∨ of a larger family is reached by
    iterating pairwise joins.
    """
    wanted = {psi.reduce(tuple(d)) for d in degrees}
    closure = set(wanted)
    changed = True
    while changed:
        changed = False
        for v in cat.vertices:
            inside = sorted(a for a in cat.paths_at(v) if psi(a) in closure)
            for i, a in enumerate(inside):
                for b in inside[i:]:
                    for e in min_common_extensions(cat, (a, b)):
                        if psi(e) not in closure:
                            closure.add(psi(e))
                            changed = True
    a_status = "holds (finite category)" if cat.exact else f"unknown up to bound {cat.bound}"
    b_status = "holds" if cat.exact else f"holds within bound {cat.bound}"
    return {"a": a_status, "b": b_status, "T": sorted(closure)}
