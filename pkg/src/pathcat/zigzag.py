"""Zigzags ``((a1, b1), ..., (an, bn))`` and the partial maps they define.

The map of a zigzag is ``σ^{a1} b1 σ^{a2} b2 ... σ^{an} bn``, read right to
left: prefix ``bn``, strip ``an``, and so on.  It is defined on paths with
range ``src(bn)`` and lands in paths with range ``src(a1)``.
"""
from __future__ import annotations

from dataclasses import dataclass

from .core import CategoryError, min_common_extensions


def make(cat, pairs):
    """Intern and type-check a zigzag given by ids or names."""
    zz = tuple((cat.id(a), cat.id(b)) for a, b in pairs)
    if not zz:
        raise CategoryError("a zigzag needs at least one pair")
    for i, (a, b) in enumerate(zz):
        if cat.rng[a] != cat.rng[b]:
            raise CategoryError(
                f"pair {i + 1}: {cat.names[a]} and {cat.names[b]} have different ranges")
        if i + 1 < len(zz) and cat.src[zz[i + 1][0]] != cat.src[b]:
            raise CategoryError(
                f"pairs {i + 1} and {i + 2} do not chain: "
                f"src({cat.names[zz[i + 1][0]]}) != src({cat.names[b]})")
    return zz


def parse(cat, text):
    """``"a1,b1;a2,b2"`` -> zigzag."""
    pairs = []
    for chunk in text.split(";"):
        parts = [p.strip() for p in chunk.split(",")]
        if len(parts) != 2 or not all(parts):
            raise CategoryError(f"bad zigzag pair {chunk!r}; expected 'a,b'")
        pairs.append(parts)
    return make(cat, pairs)


def source(cat, zz):
    return cat.src[zz[-1][1]]


def target(cat, zz):
    return cat.src[zz[0][0]]


def reverse(zz):
    return tuple((b, a) for a, b in reversed(zz))


def compose(cat, z1, z2):
    if source(cat, z1) != target(cat, z2):
        raise CategoryError("zigzags do not compose: endpoints differ")
    return tuple(z1) + tuple(z2)


def evaluate(cat, zz, path):
    """φ_ζ(path), or None outside the domain."""
    path = cat.id(path)
    if cat.rng[path] != source(cat, zz):
        raise CategoryError(
            f"{cat.names[path]} is not based at {cat.names[source(cat, zz)]}")
    m = path
    for a, b in reversed(zz):
        m = cat.compose(b, m)
        if m is None:
            return None
        m = cat.factor[a].get(m)
        if m is None:
            return None
    return m


def domain(cat, zz):
    """A(ζ) as a set of paths."""
    return frozenset(m for m in cat.paths_at(source(cat, zz))
                     if evaluate(cat, zz, m) is not None)


def image(cat, zz):
    return frozenset(evaluate(cat, zz, m) for m in domain(cat, zz))


def normal_form(cat, zz):
    """Drop ``(v, v)`` pairs at vertices unless nothing else is left."""
    kept = tuple((a, b) for a, b in zz if not (a == b and cat.is_vertex(a)))
    return kept or tuple(zz[:1])


def display(cat, zz):
    return ";".join(f"{cat.names[a]},{cat.names[b]}" for a, b in zz)


@dataclass(frozen=True)
class ShiftPairUnion:
    """A finite union of maps ``γσ^δ``, stored as ``(γ, δ)`` pairs."""
    terms: frozenset

    def apply(self, cat, path):
        for g, d in self.terms:
            rest = cat.factor[d].get(path)
            if rest is not None:
                return cat.compose(g, rest)
        return None

    def display(self, cat):
        return sorted((cat.names[g], cat.names[d]) for g, d in self.terms)


def _prune(cat, terms):
    """Remove terms that restrict another one: δ = δ'μ and γ = γ'μ."""
    terms = set(terms)
    for t in sorted(terms):
        g, d = t
        for g2, d2 in terms:
            if (g2, d2) == t:
                continue
            mu = cat.factor[d2].get(d)
            if mu is not None and cat.compose(g2, mu) == g:
                terms.discard(t)
                break
    return frozenset(terms)


def reduce_to_shift_pairs(cat, zz):
    """Rewrite φ_ζ as a union of ``γσ^δ`` terms.

    Uses σ^a γσ^δ = ⋃_{ε ∈ γ∨a} (σ^a ε) σ^{δ σ^γ ε}, working from the right.
    """
    if not cat.exact:
        raise CategoryError("reduction needs an exact category")
    s = source(cat, zz)
    terms = {(s, s)}
    for a, b in reversed(zz):
        terms = {(cat.compose(b, g), d) for g, d in terms}
        nxt = set()
        for g, d in terms:
            for e in min_common_extensions(cat, (g, a)):
                nxt.add((cat.factor[a][e], cat.compose(d, cat.factor[g][e])))
        terms = _prune(cat, nxt)
    return ShiftPairUnion(frozenset(terms))
