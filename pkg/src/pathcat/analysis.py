"""Aperiodicity, minimality, generalized cycles and entrances.

On a truncated ball an instance counts when its paths lie in the ball.  A
universal check fails on a decided counterexample, is unknown when some
instance cannot be decided (see ``PathCategory.meet_status``), and otherwise
holds within the bound.  Existential searches that find nothing on a ball are
reported as unknown.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .boundary import Point, boundary, boundary_at, finite_exhaustive_sets, is_exhaustive
from .core import CategoryError, Verdict, min_common_extensions
from .groupoid import concat_point, shift_point


def _exact(cat):
    if not cat.exact:
        raise CategoryError("this check needs an exact category")


def is_aperiodic_point(cat, x: Point) -> bool:
    """σ^α x != σ^β x for all distinct α, β in x."""
    _exact(cat)
    if x not in set(boundary(cat)):
        raise CategoryError("not a boundary point")
    items = sorted(x.members)
    shifted = [shift_point(cat, a, x) for a in items]
    return len(set(shifted)) == len(shifted)


def is_right_aperiodic(cat, x: Point) -> bool:
    """αx != βx for distinct parallel α, β ending at the vertex of x."""
    into = sorted(cat.incoming[x.vertex])
    for i, a in enumerate(into):
        for b in into[i + 1:]:
            if cat.rng[a] == cat.rng[b] and concat_point(cat, a, x) == concat_point(cat, b, x):
                return False
    return True


def _parallel(cat, a, b):
    return a != b and cat.src[a] == cat.src[b] and cat.rng[a] == cat.rng[b]


def _scanned(cat, a, b):
    """Pairs examined by the category-wide scans.  On a ball both paths need
    room for one more letter, otherwise every instance is cut off."""
    if cat.exact:
        return True
    return max(cat.weight[a], cat.weight[b]) < cat.bound


def has_periodicity(cat, a, b) -> Verdict:
    """{α, β}-periodicity: αγ meets βγ for every γ ∈ s(α)Λ."""
    a, b = cat.id(a), cat.id(b)
    if not _parallel(cat, a, b):
        raise CategoryError("periodicity needs distinct parallel paths")
    verdict = Verdict(True, None, cat.bound)
    for g in sorted(cat.paths_at(cat.src[a])):
        ag, bg = cat.compose(a, g), cat.compose(b, g)
        if ag is None or bg is None:
            continue
        status = cat.meet_status(ag, bg)
        if status is False:
            verdict = Verdict(False, cat.names[g], cat.bound)
            break
        if status is None:
            verdict = Verdict(None, None, cat.bound)
    if cat.exact:
        through = all(concat_point(cat, a, x) == concat_point(cat, b, x)
                      for x in boundary_at(cat, cat.src[a]))
        if through != verdict.value:
            raise RuntimeError("periodicity disagrees with its boundary form")
    return verdict


def is_aperiodic_category(cat) -> Verdict:
    """No parallel pair is periodic; the witness is a periodic pair."""
    value = True
    for a in range(len(cat)):
        for b in range(a + 1, len(cat)):
            if not _parallel(cat, a, b) or not _scanned(cat, a, b):
                continue
            p = has_periodicity(cat, a, b)
            if p.value:
                return Verdict(False, (cat.names[a], cat.names[b]), cat.bound)
            if p.value is None:
                value = None
    return Verdict(value, None, cat.bound)


def is_minimal(cat) -> Verdict:
    """For all vertices u, v some F ∈ FE(v) has uΛs(α) nonempty for every α ∈ F.

    Minimal exhaustive sets suffice: the condition passes to subsets.  The
    witness of failure is the pair (u, v).
    """
    _exact(cat)
    reach = {u: {cat.src[m] for m in cat.paths_at(u)} for u in cat.vertices}
    for u in cat.vertices:
        for v in cat.vertices:
            if not any(all(cat.src[a] in reach[u] for a in f)
                       for f in finite_exhaustive_sets(cat, v, minimal_only=True)):
                return Verdict(False, (cat.names[u], cat.names[v]))
    return Verdict(True)


# generalized cycles

def is_generalized_cycle(cat, mu, nu) -> Verdict:
    """μτ meets ν for every τ ∈ s(μ)Λ; the witness of failure is τ."""
    mu, nu = cat.id(mu), cat.id(nu)
    if not _parallel(cat, mu, nu):
        raise CategoryError("generalized cycles need distinct parallel paths")
    value = True
    for t in sorted(cat.paths_at(cat.src[mu])):
        mt = cat.compose(mu, t)
        if mt is None:
            continue
        status = cat.meet_status(mt, nu)
        if status is False:
            return Verdict(False, cat.names[t], cat.bound)
        if status is None:
            value = None
    return Verdict(value, None, cat.bound)


def cycle_by_exhaustive(cat, mu, nu) -> bool:
    """σ^μ(μ ∨ ν) is exhaustive at s(μ)."""
    mu, nu = cat.id(mu), cat.id(nu)
    shifted = {cat.factor[mu][e] for e in min_common_extensions(cat, (mu, nu))}
    return is_exhaustive(cat, cat.src[mu], shifted)


def _image(cat, a):
    return {concat_point(cat, a, x) for x in boundary_at(cat, cat.src[a])}


def cycle_by_boundary(cat, mu, nu) -> bool:
    """μ∂Λ ⊆ ν∂Λ."""
    _exact(cat)
    mu, nu = cat.id(mu), cat.id(nu)
    return _image(cat, mu) <= _image(cat, nu)


def has_entrance(cat, mu, nu) -> Verdict:
    """Some τ ∈ s(μ)Λ has μ disjoint from ντ; the witness is τ."""
    mu, nu = cat.id(mu), cat.id(nu)
    found = None
    for t in sorted(cat.paths_at(cat.src[mu])):
        nt = cat.compose(nu, t)
        if nt is not None and cat.meet_status(mu, nt) is False:
            found = t
            break
    if cat.exact:
        strict = _image(cat, mu) < _image(cat, nu)
        if strict != (found is not None) and is_generalized_cycle(cat, mu, nu):
            raise RuntimeError("entrance disagrees with strict boundary inclusion")
        return Verdict(found is not None, None if found is None else cat.names[found])
    if found is None:
        return Verdict(None, None, cat.bound)
    return Verdict(True, cat.names[found], cat.bound)


def generalized_cycles(cat):
    """All generalized cycles (μ, ν) as id pairs.  On an exact category the
    three characterizations are compared for every parallel pair."""
    out = []
    for mu in range(len(cat)):
        for nu in range(len(cat)):
            if not _parallel(cat, mu, nu) or not _scanned(cat, mu, nu):
                continue
            verdict = bool(is_generalized_cycle(cat, mu, nu))
            if cat.exact:
                if not (verdict == cycle_by_exhaustive(cat, mu, nu) == cycle_by_boundary(cat, mu, nu)):
                    raise RuntimeError("generalized cycle characterizations disagree")
            if verdict:
                out.append((mu, nu))
    return out


def local_contractivity_hypothesis(cat) -> Verdict:
    """Every vertex v sees a generalized cycle (μ, ν) with an entrance:
    vΛr(μ) is nonempty.  The witness maps vertices to their cycles, or names
    the first vertex without one."""
    with_entrance = [(mu, nu) for mu, nu in generalized_cycles(cat)
                     if has_entrance(cat, mu, nu)]
    seen = {}
    for v in cat.vertices:
        reach = {cat.src[m] for m in cat.paths_at(v)}
        hit = next(((mu, nu) for mu, nu in with_entrance if cat.rng[mu] in reach), None)
        if hit is None:
            value = False if cat.exact else None
            return Verdict(value, cat.names[v], cat.bound)
        seen[cat.names[v]] = (cat.names[hit[0]], cat.names[hit[1]])
    return Verdict(True, seen, cat.bound)


@dataclass
class StructureReport:
    aperiodic: Verdict
    minimal: Verdict | None
    generalized_cycles: list = field(default_factory=list)  # (μ, ν, entrance verdict)
    locally_contractive_hypothesis: Verdict | None = None

    def as_dict(self, cat):
        def v(x):
            if x is None:
                return None
            return {"value": x.value, "status": x.status, "witness": x.witness}
        return {
            "aperiodic": v(self.aperiodic),
            "minimal": v(self.minimal),
            "generalized_cycles": [
                {"mu": cat.names[m], "nu": cat.names[n], "entrance": v(e)}
                for m, n, e in self.generalized_cycles],
            "locally_contractive_hypothesis": v(self.locally_contractive_hypothesis),
            "bound": cat.bound,
        }


def structure_report(cat) -> StructureReport:
    cycles = [(m, n, has_entrance(cat, m, n)) for m, n in generalized_cycles(cat)]
    return StructureReport(
        aperiodic=is_aperiodic_category(cat),
        minimal=is_minimal(cat) if cat.exact else None,
        generalized_cycles=cycles,
        locally_contractive_hypothesis=local_contractivity_hypothesis(cat),
    )
