"""Rings of subsets of vΛ generated by tail sets, and homomorphism extension.

An element is kept as a disjoint union of cells ``head·Λ minus the tail sets
of the holes``.  Each ring element has exactly one stored form, derived from
the set it denotes, so equality of RingSets is equality of sets.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Mapping

from .core import CategoryError, min_common_extensions


@dataclass(frozen=True)
class RingSet:
    vertex: int
    cells: tuple  # ((head, frozenset(holes)), ...)
    members: frozenset

    def __bool__(self):
        return bool(self.members)

    def __contains__(self, path):
        return path in self.members

    def display(self, cat):
        parts = []
        for head, holes in self.cells:
            s = cat.names[head]
            if holes:
                s += " \\ {" + ", ".join(cat.fmt(holes)) + "}"
            parts.append(s)
        return " ⊔ ".join(parts) if parts else "∅"


def ring_set(cat, v, members) -> RingSet:
    """The canonical RingSet denoting ``members`` ⊆ vΛ."""
    members = frozenset(members)
    if not members <= cat.paths_at(v):
        raise CategoryError(f"{cat.fmt(members - cat.paths_at(v))} not based at {cat.names[v]}")
    rest = set(members)
    cells = []
    while rest:
        head = min(m for m in rest if not any(d != m and d in rest for d in cat.segments[m]))
        outside = cat.tails[head] - rest
        holes = frozenset(h for h in outside
                          if not any(d != h and d in outside for d in cat.segments[h]))
        blocked = set().union(*(cat.tails[h] for h in holes)) if holes else set()
        cell = cat.tails[head] - blocked
        cells.append((head, holes))
        rest -= cell
    return RingSet(v, tuple(cells), members)


def cell_members(cat, head, holes):
    out = set(cat.tails[head])
    for h in holes:
        out -= cat.tails[h]
    return frozenset(out)


# expressions

_TOKEN = re.compile(r"\s*(?:([()&|\-])|([^\s()&|\-]+))")


def parse_expr(text):
    """``"t - (eps0 | eps1)"`` -> nested tuples.  ``&`` binds tighter than
    ``|`` and ``-``, which associate to the left.
    """
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise CategoryError(f"cannot parse set expression at column {pos + 1}")
        tokens.append(m.group(1) or ("name", m.group(2)))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    tokens.append(None)
    i = 0

    def atom():
        nonlocal i
        tok = tokens[i]
        i += 1
        if tok == "(":
            e = union()
            if tokens[i] != ")":
                raise CategoryError("unbalanced parentheses in set expression")
            i += 1
            return e
        if isinstance(tok, tuple):
            return ("tail", tok[1])
        raise CategoryError(f"unexpected token {tok!r} in set expression")

    def meet():
        nonlocal i
        e = atom()
        while tokens[i] == "&":
            i += 1
            e = ("and", e, atom())
        return e

    def union():
        nonlocal i
        e = meet()
        while tokens[i] in ("|", "-"):
            op = "or" if tokens[i] == "|" else "minus"
            i += 1
            e = (op, e, meet())
        return e

    e = union()
    if tokens[i] is not None:
        raise CategoryError(f"trailing input in set expression: {tokens[i]!r}")
    return e


def evaluate_expr(cat, v, expr):
    """Direct set semantics of an expression."""
    if isinstance(expr, str):
        expr = parse_expr(expr)
    op = expr[0]
    if op == "tail":
        a = cat.id(expr[1])
        if cat.rng[a] != v:
            raise CategoryError(f"{cat.names[a]}Λ is not based at {cat.names[v]}")
        return cat.tails[a]
    left, right = evaluate_expr(cat, v, expr[1]), evaluate_expr(cat, v, expr[2])
    if op == "and":
        return left & right
    if op == "or":
        return left | right
    if op == "minus":
        return left - right
    raise CategoryError(f"unknown set operation {op!r}")


def normalize(cat, v, expr) -> RingSet:
    v = cat.id(v)
    return ring_set(cat, v, evaluate_expr(cat, v, expr))


# the ring at a vertex

def atoms(cat, v):
    """Atoms of the ring generated by the tail sets at ``v``: paths grouped by
    which tail sets contain them."""
    groups = {}
    for m in sorted(cat.paths_at(v)):
        groups.setdefault(frozenset(cat.segments[m]), set()).add(m)
    return sorted((frozenset(g) for g in groups.values()), key=sorted)


@lru_cache(maxsize=256)
def _ring_members(cat, v):
    ats = atoms(cat, v)
    out = []
    for k in range(len(ats) + 1):
        for pick in combinations(ats, k):
            out.append(frozenset().union(*pick))
    return tuple(out)


def generate_ring(cat, v) -> list[RingSet]:
    """All of 𝒜_v as RingSets."""
    v = cat.id(v)
    if not cat.exact:
        raise CategoryError("ring generation needs an exact category")
    return [ring_set(cat, v, s) for s in _ring_members(cat, v)]


def ring_family(cat, v) -> frozenset:
    """𝒜_v as a family of path sets."""
    return frozenset(_ring_members(cat, cat.id(v)))


def saturate(generators, limit=1 << 14):
    """Close a family of sets under ∩, ∪ and difference by brute force."""
    family = set(map(frozenset, generators)) | {frozenset()}
    while True:
        new = set()
        items = list(family)
        for a in items:
            for b in items:
                for c in (a & b, a | b, a - b):
                    if c not in family:
                        new.add(c)
        if not new:
            return frozenset(family)
        family |= new
        if len(family) > limit:
            raise CategoryError("saturation exceeded its size limit")


def check_shift_invariance(cat):
    """Counterexamples to α𝒜_{s(α)} = 𝒜_{r(α)} ∩ αΛ and σ^α𝒜_{r(α)} = 𝒜_{s(α)}."""
    report = []
    for a in range(len(cat)):
        r, s = cat.rng[a], cat.src[a]
        up, down = ring_family(cat, r), ring_family(cat, s)
        pushed = frozenset(frozenset(cat.compose(a, m) for m in e) for e in down)
        cut = frozenset(e & cat.tails[a] for e in up)
        if pushed != cut:
            report.append(("concatenation", cat.names[a]))
        f = cat.factor[a]
        shifted = frozenset(frozenset(f[m] for m in e if m in f) for e in up)
        if shifted != down:
            report.append(("shift", cat.names[a]))
    return report


# homomorphisms

class ExtensionRejected(ValueError):
    def __init__(self, witness, message):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class RingHom:
    source_vertex: int
    carrier: frozenset
    assignment: Mapping  # tail-set generator (path id) -> frozenset of carrier

    def on_cell(self, head, holes):
        out = set(self.assignment[head])
        for h in holes:
            out -= self.assignment[h]
        return frozenset(out)

    def __call__(self, element: RingSet):
        out = set()
        for head, holes in element.cells:
            out |= self.on_cell(head, holes)
        return frozenset(out)


def _check_ring(family):
    family = set(family)
    if frozenset() not in family:
        return False
    return all(a & b in family and a | b in family and a - b in family
               for a in family for b in family)


def alignment_violation(cat, v, assignment):
    """First pair (a, b) at ``v`` breaking μ(aΛ) ∩ μ(bΛ) = ⋃_{ε∈a∨b} μ(εΛ)."""
    at_v = sorted(cat.paths_at(v))
    for i, a in enumerate(at_v):
        for b in at_v[i:]:
            lhs = assignment[a] & assignment[b]
            rhs = frozenset().union(*(assignment[e] for e in min_common_extensions(cat, (a, b))))
            if lhs != rhs:
                return a, b
    return None


def extend_homomorphism(cat, v, assignment, carrier=None, ring=None) -> RingHom:
    """Extend an assignment on the tail sets at ``v`` to a ring homomorphism.

    ``assignment`` maps each path at ``v`` (standing for its tail set) to a
    subset of ``carrier``.  The target is the power set of ``carrier`` unless
    an explicit ``ring`` of subsets is given.  Raises ExtensionRejected with
    the offending pair when the alignment condition fails.
    """
    v = cat.id(v)
    values = {cat.id(k): frozenset(x) for k, x in assignment.items()}
    missing = cat.paths_at(v) - set(values)
    if missing:
        raise CategoryError(f"assignment is not total: missing {cat.fmt(missing)}")
    extra = set(values) - cat.paths_at(v)
    if extra:
        raise CategoryError(f"assignment has paths not based at {cat.names[v]}: {cat.fmt(extra)}")
    if carrier is None:
        carrier = frozenset().union(*values.values()) if values else frozenset()
    carrier = frozenset(carrier)
    if ring is not None:
        ring = frozenset(map(frozenset, ring))
        if not _check_ring(ring):
            raise CategoryError("target family is not a ring of sets")
        if any(x not in ring for x in values.values()):
            raise CategoryError("assignment leaves the target ring")
    if any(not x <= carrier for x in values.values()):
        raise CategoryError("assignment leaves the target carrier")
    bad = alignment_violation(cat, v, values)
    if bad is not None:
        a, b = bad
        raise ExtensionRejected((cat.names[a], cat.names[b]),
                                f"alignment condition fails for ({cat.names[a]}, {cat.names[b]})")
    return RingHom(v, carrier, values)


def brute_force_ultrafilters(family, top):
    """Ultrafilters of a finite ring of sets containing ``top``, by checking
    every principal up-set against the ultrafilter axioms."""
    family = list(family)
    out = set()
    for e in family:
        if not e:
            continue
        up = frozenset(f for f in family if e <= f)
        closed = all((a & b) in up for a in up for b in up)
        prime = all((f in up) != ((top - f) in up) for f in family)
        if closed and frozenset() not in up and prime:
            out.add(up)
    return out
