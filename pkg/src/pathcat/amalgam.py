"""Amalgamations of categories of paths, normal forms, and truncated balls.

A word is a sequence of letters ``(component, key)`` in the same order as a
composite: ``s(α_j) ~ r(α_{j+1})``.  Its normal form deletes vertices and
composes neighbours from one component whenever ``s(α_j) = r(α_{j+1})`` on
the nose.  Components are finite categories or free categories on graphs.
Extra relations are imposed by congruence closure inside the ball.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property

import networkx as nx
from networkx.utils import UnionFind

from .core import CategoryError, PathCategory, Verdict, min_common_extensions, validate_category
from .degree import DegreeFunctor, functoriality_violation, is_nondegenerate, is_non_isotropic


class FiniteComponent:
    def __init__(self, cat: PathCategory, label=None):
        if not cat.exact:
            raise CategoryError("components must be exact categories")
        self.cat = cat
        self.label = label

    @property
    def vertices(self):
        return list(self.cat.vertices)

    def is_vertex(self, k):
        return self.cat.is_vertex(k)

    def src(self, k):
        return self.cat.src[k]

    def rng(self, k):
        return self.cat.rng[k]

    def compose(self, k1, k2):
        return self.cat.compose(k1, k2)

    def weight(self, k):
        return 0 if self.cat.is_vertex(k) else 1

    def name(self, k):
        return self.cat.names[k]

    def lookup(self, name):
        return self.cat.index.get(name)

    def nonvertex_at(self, v, max_weight):
        if max_weight < 1:
            return []
        return sorted(k for k in self.cat.paths_at(v) if not self.cat.is_vertex(k))

    def extends(self, longer, shorter):
        return longer in self.cat.tails[shorter]

    def join(self, k1, k2):
        return sorted(min_common_extensions(self.cat, (k1, k2)))

    def is_finite(self):
        return True


class FreeComponent:
    """The free category on a directed graph.  Keys are ``(range, arrows)``;
    a vertex is ``(v, ())``."""

    def __init__(self, vertices, arrows, label=None):
        self.vertex_names = list(vertices)
        self.arrows = dict(arrows)  # name -> (src, rng)
        self.label = label
        known = set(self.vertex_names)
        for a, (s, r) in self.arrows.items():
            if s not in known or r not in known:
                raise CategoryError(f"arrow {a!r} has an unknown endpoint")
            if a in known:
                raise CategoryError(f"arrow {a!r} shares a name with a vertex")
        self.into = {v: sorted(a for a, (_, r) in self.arrows.items() if r == v)
                     for v in self.vertex_names}

    @property
    def vertices(self):
        return [(v, ()) for v in self.vertex_names]

    def is_vertex(self, k):
        return not k[1]

    def src(self, k):
        return (k[0], ()) if not k[1] else (self.arrows[k[1][-1]][0], ())

    def rng(self, k):
        return (k[0], ())

    def compose(self, k1, k2):
        if self.src(k1) != self.rng(k2):
            return None
        return (k1[0], k1[1] + k2[1])

    def weight(self, k):
        return len(k[1])

    def name(self, k):
        return ".".join(k[1]) if k[1] else k[0]

    def lookup(self, name):
        if name in self.arrows:
            return (self.arrows[name][1], (name,))
        if name in self.vertex_names:
            return (name, ())
        return None

    def nonvertex_at(self, v, max_weight):
        out = []
        frontier = [(v[0], ())]
        for _ in range(max_weight):
            nxt = []
            for r, p in frontier:
                end = self.src((r, p))[0]
                for a in self.into_src(end):
                    nxt.append((r, p + (a,)))
            out.extend(nxt)
            frontier = nxt
        return out

    def into_src(self, v):
        """Arrows whose range is ``v`` (they can follow a path with source v)."""
        return self.into[v]

    def extends(self, longer, shorter):
        return longer[0] == shorter[0] and longer[1][:len(shorter[1])] == shorter[1]

    def join(self, k1, k2):
        if self.extends(k1, k2):
            return [k1]
        if self.extends(k2, k1):
            return [k2]
        return []

    def is_finite(self):
        g = nx.DiGraph()
        g.add_nodes_from(self.vertex_names)
        g.add_edges_from((s, r) for s, r in self.arrows.values())
        return nx.is_directed_acyclic_graph(g)


@dataclass(frozen=True)
class NormalForm:
    letters: tuple  # ((component, key), ...)
    unit: int | None = None  # vertex class when there are no letters


class Presentation:
    def __init__(self, components, glue=(), relations=()):
        self.components = list(components)
        if not self.components:
            raise CategoryError("a presentation needs at least one component")
        for i, c in enumerate(self.components):
            if c.label is None:
                c.label = str(i)
        labels = [c.label for c in self.components]
        if len(set(labels)) != len(labels):
            raise CategoryError("component labels must be distinct")
        uf = UnionFind()
        order = []
        for ci, c in enumerate(self.components):
            for v in c.vertices:
                uf[(ci, v)]
                order.append((ci, v))
        for a, b in glue:
            va, vb = self.vertex_ref(a), self.vertex_ref(b)
            uf.union(va, vb)
        classes = {}
        for key in order:
            classes.setdefault(uf[key], len(classes))
        self.klass = {key: classes[uf[key]] for key in order}
        self.class_rep = {}
        for key in order:
            self.class_rep.setdefault(self.klass[key], key)
        counts = {}
        for ci, c in enumerate(self.components):
            for nm in self._names(c):
                counts[nm] = counts.get(nm, 0) + 1
        self._ambiguous = {nm for nm, n in counts.items() if n > 1}
        self.relations = [(self.word(u), self.word(v)) for u, v in relations]
        for u, v in self.relations:
            nu, nv = self.normal_form(u), self.normal_form(v)
            if (self.rng_class(nu), self.src_class(nu)) != (self.rng_class(nv), self.src_class(nv)):
                raise CategoryError("relation sides have different endpoints")

    @staticmethod
    def _names(c):
        if isinstance(c, FiniteComponent):
            return list(c.cat.names)
        return list(c.vertex_names) + list(c.arrows)

    # references

    def letter(self, ref):
        """Resolve ``name`` or ``label:name`` to a letter."""
        if isinstance(ref, tuple):
            return ref
        if ":" in ref:
            label, name = ref.split(":", 1)
            for ci, c in enumerate(self.components):
                if c.label == label:
                    k = c.lookup(name)
                    if k is None:
                        raise CategoryError(f"unknown path {name!r} in component {label!r}")
                    return (ci, k)
            raise CategoryError(f"unknown component {label!r}")
        hits = [(ci, c.lookup(ref)) for ci, c in enumerate(self.components)
                if c.lookup(ref) is not None]
        if not hits:
            raise CategoryError(f"unknown path {ref!r}")
        if len(hits) > 1:
            raise CategoryError(f"ambiguous path {ref!r}; qualify it as label:{ref}")
        return hits[0]

    def vertex_ref(self, ref):
        ci, k = self.letter(ref)
        if not self.components[ci].is_vertex(k):
            raise CategoryError(f"{ref!r} is not a vertex")
        return (ci, k)

    def word(self, refs):
        return tuple(self.letter(r) for r in refs)

    # letters

    def comp(self, letter):
        return self.components[letter[0]]

    def is_vertex(self, letter):
        return self.comp(letter).is_vertex(letter[1])

    def letter_src(self, letter):
        return self.klass[(letter[0], self.comp(letter).src(letter[1]))]

    def letter_rng(self, letter):
        return self.klass[(letter[0], self.comp(letter).rng(letter[1]))]

    def letter_name(self, letter):
        c = self.comp(letter)
        nm = c.name(letter[1])
        parts = nm.split(".")
        if any(p in self._ambiguous for p in parts):
            return f"{c.label}:{nm}"
        return nm

    def weight(self, nf: NormalForm):
        return sum(self.comp(x).weight(x[1]) for x in nf.letters)

    def rng_class(self, nf: NormalForm):
        return nf.unit if not nf.letters else self.letter_rng(nf.letters[0])

    def src_class(self, nf: NormalForm):
        return nf.unit if not nf.letters else self.letter_src(nf.letters[-1])

    def display(self, nf: NormalForm):
        if not nf.letters:
            ci, v = self.class_rep[nf.unit]
            return self.letter_name((ci, v))
        return ".".join(self.letter_name(x) for x in nf.letters)

    def unit(self, cls):
        return NormalForm((), cls)

    # normal forms

    def check_word(self, word):
        word = tuple(word)
        if not word:
            raise CategoryError("empty word")
        for x, y in zip(word, word[1:]):
            if self.letter_src(x) != self.letter_rng(y):
                raise CategoryError(
                    f"ill-typed word: {self.letter_name(x)} then {self.letter_name(y)}")
        return word

    def _joinable(self, x, y):
        return x[0] == y[0] and self.comp(x).src(x[1]) == self.comp(y).rng(y[1])

    def normal_form(self, word) -> NormalForm:
        """Delete vertices, then compose neighbours from one component."""
        if isinstance(word, NormalForm):
            return word
        word = self.check_word(self.word(word))
        stack = []
        for x in word:
            if self.is_vertex(x):
                continue
            if stack and self._joinable(stack[-1], x):
                top = stack.pop()
                stack.append((x[0], self.comp(x).compose(top[1], x[1])))
            else:
                stack.append(x)
        if not stack:
            return NormalForm((), self.letter_rng(word[0]))
        return NormalForm(tuple(stack))

    def reduce_randomly(self, word, rng: random.Random) -> NormalForm:
        """Apply deletion and composition moves in a random order."""
        word = list(self.check_word(self.word(word)))
        while True:
            moves = [("del", i) for i, x in enumerate(word)
                     if len(word) > 1 and self.is_vertex(x)]
            moves += [("join", i) for i in range(len(word) - 1)
                      if self._joinable(word[i], word[i + 1])]
            if not moves:
                break
            kind, i = rng.choice(moves)
            if kind == "del":
                del word[i]
            else:
                x, y = word[i], word[i + 1]
                word[i:i + 2] = [(x[0], self.comp(x).compose(x[1], y[1]))]
        if len(word) == 1 and self.is_vertex(word[0]):
            return NormalForm((), self.letter_rng(word[0]))
        return NormalForm(tuple(word))

    def concat(self, u: NormalForm, w: NormalForm) -> NormalForm:
        if self.src_class(u) != self.rng_class(w):
            raise CategoryError("normal forms do not compose")
        if not u.letters:
            return w
        if not w.letters:
            return u
        return self.normal_form(u.letters + w.letters)

    def is_normal(self, nf: NormalForm):
        if not nf.letters:
            return True
        if any(self.is_vertex(x) for x in nf.letters):
            return False
        return not any(self._joinable(x, y) for x, y in zip(nf.letters, nf.letters[1:]))

    # enumeration

    def classes(self):
        return sorted(set(self.klass.values()))

    def _letters_into(self, cls, max_weight):
        """Non-vertex letters whose range lies in vertex class ``cls``."""
        out = []
        for (ci, v), k in self.klass.items():
            if k == cls:
                for key in self.components[ci].nonvertex_at(v, max_weight):
                    out.append((ci, key))
        return out

    def enumerate_ball(self, bound) -> list[NormalForm]:
        out = [self.unit(c) for c in self.classes()]
        frontier = [x for x in out]
        while frontier:
            nxt = []
            for w in frontier:
                room = bound - self.weight(w)
                if room <= 0:
                    continue
                for x in self._letters_into(self.src_class(w), room):
                    if self.comp(x).weight(x[1]) > room:
                        continue
                    if w.letters and self._joinable(w.letters[-1], x):
                        continue
                    nxt.append(NormalForm(w.letters + (x,)))
            out.extend(nxt)
            frontier = nxt
        return out

    def is_finite(self):
        """Finite when every component is and normal forms cannot repeat
        letters indefinitely.  Returns (finite, longest weight or None)."""
        if not all(c.is_finite() for c in self.components):
            return False, None
        letters = self._all_letters()
        g = nx.DiGraph()
        for x in letters:
            g.add_node(x)
        for x in letters:
            for y in letters:
                if self.letter_src(x) == self.letter_rng(y) and not self._joinable(x, y):
                    g.add_edge(x, y)
        if not nx.is_directed_acyclic_graph(g):
            return False, None
        best = {}
        for x in reversed(list(nx.topological_sort(g))):
            w = self.comp(x).weight(x[1])
            best[x] = w + max((best[y] for y in g.successors(x)), default=0)
        return True, max(best.values(), default=0)

    def _all_letters(self):
        out = []
        for ci, c in enumerate(self.components):
            if isinstance(c, FiniteComponent):
                out += [(ci, k) for k in range(len(c.cat)) if not c.cat.is_vertex(k)]
            else:
                longest = len(c.arrows)
                for v in c.vertices:
                    out += [(ci, k) for k in c.nonvertex_at(v, longest)]
        return out


@dataclass
class Amalgam:
    pres: Presentation
    cat: PathCategory
    elements: list  # NormalForm representatives, aligned with cat ids
    index: dict  # NormalForm -> id (every member of a class)
    bound: int | None
    ball_bound: int

    def id_of(self, word):
        nf = self.pres.normal_form(word) if not isinstance(word, NormalForm) else word
        try:
            return self.index[nf]
        except KeyError:
            raise CategoryError(f"{self.pres.display(nf)} lies outside the ball") from None

    @cached_property
    def exact(self):
        return self.bound is None


def _closure(pres, elems, bound):
    uf = UnionFind(elems)
    if not pres.relations:
        return uf
    by_src, by_rng = {}, {}
    for w in elems:
        by_src.setdefault(pres.src_class(w), []).append(w)
        by_rng.setdefault(pres.rng_class(w), []).append(w)
    members = set(elems)
    for u, v in pres.relations:
        nu, nv = pres.normal_form(u), pres.normal_form(v)
        for x in by_src.get(pres.rng_class(nu), []):
            xu, xv = pres.concat(x, nu), pres.concat(x, nv)
            if pres.weight(xu) > bound and pres.weight(xv) > bound:
                continue
            for y in by_rng.get(pres.src_class(nu), []):
                a, b = pres.concat(xu, y), pres.concat(xv, y)
                if a in members and b in members:
                    uf.union(a, b)
    return uf


def amalgamate(pres: Presentation, bound=None) -> Amalgam:
    """Normal forms of weight at most ``bound`` with their partial composition.

    When the amalgamation is finite the whole category is built exactly and
    validated; otherwise ``bound`` is required and the result is a ball.
    """
    finite, longest = pres.is_finite()
    if finite:
        ball_bound = longest
        exact = True
    else:
        if bound is None:
            raise CategoryError("infinite amalgamation: a bound is required")
        ball_bound = int(bound)
        exact = False
    elems = pres.enumerate_ball(ball_bound)
    uf = _closure(pres, elems, ball_bound)
    key = lambda w: (pres.weight(w), pres.display(w))
    groups = {}
    for w in elems:
        groups.setdefault(uf[w], []).append(w)
    reps = sorted((min(g, key=key) for g in groups.values()), key=key)
    rep_id = {w: i for i, w in enumerate(reps)}
    index = {}
    for g in groups.values():
        i = rep_id[min(g, key=key)]
        for w in g:
            index[w] = i
    names = [pres.display(w) for w in reps]
    src = [rep_id[pres.unit(pres.src_class(w))] for w in reps]
    rng = [rep_id[pres.unit(pres.rng_class(w))] for w in reps]
    by_rng = {}
    for i, w in enumerate(reps):
        by_rng.setdefault(pres.rng_class(w), []).append(i)
    table = {}
    for i, w in enumerate(reps):
        for j in by_rng.get(pres.src_class(w), []):
            z = pres.concat(w, reps[j])
            if z in index:
                table[(i, j)] = index[z]
    weight = [pres.weight(w) for w in reps]
    cat = PathCategory(names, src, rng, table, bound=None if exact else ball_bound,
                       weight=weight)
    result = Amalgam(pres, cat, reps, index, None if exact else ball_bound, ball_bound)
    if exact:
        bad = validate_category(cat)
        if bad:
            raise CategoryError(f"amalgamation is not a category of paths: {bad[0]}")
    return result


def bound_sensitive_pairs(pres: Presentation, bound):
    """Pairs of normal forms within ``bound`` that the relations identify one
    step further out but not at ``bound`` itself."""
    if not pres.relations:
        return []
    near = pres.enumerate_ball(bound)
    far = pres.enumerate_ball(bound + 1)
    uf_near = _closure(pres, near, bound)
    uf_far = _closure(pres, far, bound + 1)
    out = []
    for i, a in enumerate(near):
        for b in near[i + 1:]:
            if uf_far[a] == uf_far[b] and uf_near[a] != uf_near[b]:
                out.append((pres.display(a), pres.display(b)))
    return out


# common extensions

def meets_amalgam(pres: Presentation, w1, w2):
    """Whether two normal forms have a common extension, and one of them.

    Words of different lengths meet when they agree before the last letter of
    the shorter one and the longer one's letter there extends it; words of
    equal length meet when they agree before the last letter and the last
    letters come from one component and meet there.
    """
    if pres.relations:
        raise CategoryError("the common-extension rule assumes no extra relations")
    w1, w2 = pres.normal_form(w1), pres.normal_form(w2)
    if pres.rng_class(w1) != pres.rng_class(w2):
        raise CategoryError("normal forms have different ranges")
    if not w1.letters:
        return True, w2
    if not w2.letters:
        return True, w1
    short, long_ = (w1, w2) if len(w1.letters) <= len(w2.letters) else (w2, w1)
    m, k = len(short.letters), len(long_.letters)
    if short.letters[:m - 1] != long_.letters[:m - 1]:
        return False, None
    x, y = short.letters[m - 1], long_.letters[m - 1]
    if x[0] != y[0]:
        return False, None
    comp = pres.components[x[0]]
    if m < k:
        return (True, long_) if comp.extends(y[1], x[1]) else (False, None)
    joins = comp.join(x[1], y[1])
    if not joins:
        return False, None
    return True, NormalForm(short.letters[:m - 1] + ((x[0], joins[0]),))


# degrees

class ComponentCheckError(CategoryError):
    def __init__(self, failures):
        super().__init__("; ".join(f"{c}: {h} ({d})" for c, h, d in failures))
        self.failures = failures


def _component_category(comp, bound):
    if isinstance(comp, FiniteComponent):
        return comp.cat, None
    am = amalgamate(Presentation([FreeComponent(comp.vertex_names, comp.arrows, "c")]), bound)
    return am.cat, am


def _component_degree(comp, cat, am, psi):
    if isinstance(comp, FiniteComponent):
        return psi
    width = len(next(iter(psi.values()))) if psi else 1
    vals = []
    for nf in am.elements:
        vec = [0] * width
        for ci, key in nf.letters:
            for a in key[1]:
                vec = [p + q for p, q in zip(vec, psi[a])]
        vals.append(tuple(vec))
    return DegreeFunctor(width, (), tuple(vals))


def check_b_prime(cat, psi, degrees):
    """Close ``degrees`` under ψ(αβ) ∈ T ⇒ ψ(α), ψ(β) ∈ T and under joins.
    Returns the closure, or None when it reaches a degree of a path that the
    truncation cannot see (so finiteness cannot be confirmed)."""
    closure = {tuple(d) for d in degrees}
    changed = True
    while changed:
        changed = False
        for (a, b), ab in cat.table.items():
            if psi(ab) in closure:
                for x in (psi(a), psi(b)):
                    if x not in closure:
                        closure.add(x)
                        changed = True
        for v in cat.vertices:
            inside = sorted(a for a in cat.paths_at(v) if psi(a) in closure)
            for i, a in enumerate(inside):
                for b in inside[i:]:
                    for e in min_common_extensions(cat, (a, b)):
                        if psi(e) not in closure:
                            closure.add(psi(e))
                            changed = True
    return sorted(closure)


def sum_degree(pres: Presentation, psis, bound=None):
    """ψ([α_1, ..., α_m]) = Σ ψ_{i_j}(α_j) into the direct sum of the targets.

    ``psis[i]`` is a DegreeFunctor for a finite component or a mapping from
    arrow names to vectors for a free one.  Each component is checked for
    nondegeneracy, non-isotropy, a coordinatewise nonnegative range, and the
    strengthened closure condition on the degrees it takes.  Returns
    ``(amalgam, psi, report)``.
    """
    if len(psis) != len(pres.components):
        raise CategoryError("one degree functor per component is required")
    failures, report, widths, comp_psis = [], {}, [], []
    for comp, psi in zip(pres.components, psis):
        ccat, cam = _component_category(comp, bound if bound is not None else 4)
        cpsi = _component_degree(comp, ccat, cam, psi)
        if cpsi.torsion:
            failures.append((comp.label, "free target", "torsion is not supported"))
        bad = functoriality_violation(ccat, cpsi)
        if bad:
            failures.append((comp.label, "functorial", bad))
            comp_psis.append(cpsi)
            widths.append(cpsi.width)
            continue
        nd = is_nondegenerate(ccat, cpsi)
        ni = is_non_isotropic(ccat, cpsi)
        cone = all(x >= 0 for a in range(len(ccat)) for x in cpsi(a))
        closure = check_b_prime(ccat, cpsi, {cpsi(a) for a in range(len(ccat))})
        report[comp.label] = {
            "nondegenerate": nd.status, "non_isotropic": ni.status,
            "positive_cone": cone, "closure_size": len(closure),
        }
        if not nd:
            failures.append((comp.label, "nondegenerate", nd.witness))
        if ni.value is False:
            failures.append((comp.label, "non-isotropic", ni.witness))
        if not cone:
            failures.append((comp.label, "positive cone", "negative coordinate"))
        comp_psis.append(cpsi)
        widths.append(cpsi.width)
    if failures:
        raise ComponentCheckError(failures)
    am = amalgamate(pres, bound)
    offsets = [sum(widths[:i]) for i in range(len(widths))]
    total = sum(widths)
    vals = []
    for nf in am.elements:
        vec = [0] * total
        for ci, key in nf.letters:
            comp = pres.components[ci]
            if isinstance(comp, FiniteComponent):
                part = comp_psis[ci](key)
            else:
                part = [0] * widths[ci]
                for a in key[1]:
                    part = [p + q for p, q in zip(part, psis[ci][a])]
            for j, x in enumerate(part):
                vec[offsets[ci] + j] += x
        vals.append(tuple(vec))
    psi = DegreeFunctor(total, (), tuple(vals))
    return am, psi, report


def verify_sum_degree(am: Amalgam, psi: DegreeFunctor):
    """Functoriality, nondegeneracy and (bounded) non-isotropy of ψ."""
    cat = am.cat
    return {
        "functorial": functoriality_violation(cat, psi) is None,
        "nondegenerate": is_nondegenerate(cat, psi),
        "non_isotropic": is_non_isotropic(cat, psi),
    }
