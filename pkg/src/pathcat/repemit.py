"""Toeplitz and Cuntz-Krieger relations, and 0/1 matrix representations.

Each morphism α acts on a basis of points by x ↦ αx.  The basis is every
hereditary directed set for the Toeplitz flavour and the boundary for the
Cuntz-Krieger flavour.  Joins of commuting projections are entrywise maxima.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .boundary import all_points, boundary, finite_exhaustive_sets
from .core import CategoryError, min_common_extensions
from .groupoid import concat_point

FLAVORS = ("toeplitz", "ck")


@dataclass(frozen=True)
class Relation:
    tag: str      # T1, T2, T3 or CK4
    lhs: tuple    # product of factors ("T" | "T*", path id)
    rhs: tuple    # join of products; () is the zero operator

    def render(self, cat, letter="T"):
        def prod(fs):
            return "".join(f"{letter}_{cat.names[a]}" + ("*" if k == "T*" else "") for k, a in fs)
        right = " ∨ ".join(prod(p) for p in self.rhs) if self.rhs else "0"
        return f"({self.tag}) {prod(self.lhs)} = {right}"

    def record(self, cat):
        def prod(fs):
            return [[k, cat.names[a]] for k, a in fs]
        return {"tag": self.tag, "lhs": prod(self.lhs), "rhs": [prod(p) for p in self.rhs]}


@dataclass(frozen=True)
class RelationDoc:
    flavor: str
    generators: tuple
    relations: tuple

    def render(self, cat):
        letter = "S" if self.flavor == "ck" else "T"
        lines = [f"# {self.flavor} relations", "generators: " + ", ".join(
            f"{letter}_{cat.names[a]}" for a in self.generators)]
        lines += [r.render(cat, letter) for r in self.relations]
        return "\n".join(lines) + "\n"

    def records(self, cat):
        return {"flavor": self.flavor,
                "generators": [cat.names[a] for a in self.generators],
                "relations": [r.record(cat) for r in self.relations]}


def emit_relations(cat, flavor="toeplitz") -> RelationDoc:
    if flavor not in FLAVORS:
        raise CategoryError(f"unknown flavor {flavor!r}")
    if not cat.exact:
        raise CategoryError("relations are emitted for exact categories only")
    n = len(cat)
    rels = []
    for a in range(n):
        rels.append(Relation("T1", (("T*", a), ("T", a)), ((("T", cat.src[a]),),)))
    for (a, b), ab in sorted(cat.table.items()):
        rels.append(Relation("T2", (("T", a), ("T", b)), ((("T", ab),),)))
    for a in range(n):
        for b in range(a, n):
            if cat.rng[a] != cat.rng[b]:
                continue
            join = sorted(min_common_extensions(cat, (a, b)))
            rels.append(Relation(
                "T3", (("T", a), ("T*", a), ("T", b), ("T*", b)),
                tuple(((("T", g), ("T*", g))) for g in join)))
    if flavor == "ck":
        for v in cat.vertices:
            for f in finite_exhaustive_sets(cat, v, minimal_only=True):
                rels.append(Relation("CK4", (("T", v),),
                                     tuple((("T", b), ("T*", b)) for b in sorted(f))))
    return RelationDoc(flavor, tuple(range(n)), tuple(rels))


def ck4_relations(cat):
    return [r for r in emit_relations(cat, "ck").relations if r.tag == "CK4"]


@dataclass
class MatrixRep:
    flavor: str
    basis: list
    mats: dict  # path id -> int matrix

    @property
    def dim(self):
        return len(self.basis)


def build_matrix_rep(cat, flavor="toeplitz") -> MatrixRep:
    if flavor not in FLAVORS:
        raise CategoryError(f"unknown flavor {flavor!r}")
    basis = all_points(cat) if flavor == "toeplitz" else boundary(cat)
    pos = {x: i for i, x in enumerate(basis)}
    mats = {}
    for a in range(len(cat)):
        m = np.zeros((len(basis), len(basis)), dtype=np.int64)
        for x in basis:
            if x.vertex == cat.src[a]:
                m[pos[concat_point(cat, a, x)], pos[x]] = 1
        mats[a] = m
    return MatrixRep(flavor, basis, mats)


def is_partial_isometry(m):
    return (m.sum(axis=0) <= 1).all() and (m.sum(axis=1) <= 1).all() and set(np.unique(m)) <= {0, 1}


def _product(rep, factors):
    out = np.eye(rep.dim, dtype=np.int64)
    for kind, a in factors:
        m = rep.mats[a]
        out = out @ (m.T if kind == "T*" else m)
    return out


def join(mats, dim):
    """Entrywise maximum of commuting 0/1 projections."""
    mats = list(mats)
    for i, p in enumerate(mats):
        for q in mats[i + 1:]:
            if not np.array_equal(p @ q, q @ p):
                raise ArithmeticError("join of non-commuting projections")
    out = np.zeros((dim, dim), dtype=np.int64)
    for p in mats:
        out = np.maximum(out, p)
    return out


def join_partial(mats, dim):
    """Union of 0/1 partial isometries that agree where their domains overlap."""
    out = np.zeros((dim, dim), dtype=np.int64)
    for m in mats:
        out = np.maximum(out, m)
    if not is_partial_isometry(out):
        raise ArithmeticError("join of incompatible partial isometries")
    return out


def evaluate(rep, rel: Relation):
    lhs = _product(rep, rel.lhs)
    rhs = join((_product(rep, p) for p in rel.rhs), rep.dim)
    return lhs, rhs


@dataclass
class VerifyReport:
    passed: list
    failed: list  # (relation, basis indices where the sides differ)
    wick_failures: list
    ck4_failures: list = field(default_factory=list)  # extra CK4 checks on a Toeplitz rep

    @property
    def ok(self):
        return not self.failed and not self.wick_failures


def wick_pairs(cat, rep):
    """Pairs (α, β) where T_α*T_β differs from ⋁_{ε∈α∨β} T_{σ^α ε} T_{σ^β ε}*."""
    bad = []
    zero = np.zeros((rep.dim, rep.dim), dtype=np.int64)
    for a in range(len(cat)):
        for b in range(len(cat)):
            lhs = rep.mats[a].T @ rep.mats[b]
            if cat.rng[a] != cat.rng[b]:
                rhs = zero
            else:
                rhs = join_partial((rep.mats[cat.factor[a][e]] @ rep.mats[cat.factor[b][e]].T
                                    for e in min_common_extensions(cat, (a, b))), rep.dim)
            if not np.array_equal(lhs, rhs):
                bad.append((a, b))
    return bad


def verify_relations(cat, rep: MatrixRep, doc: RelationDoc, extra_ck=True) -> VerifyReport:
    """Check every relation of ``doc`` in ``rep`` as an exact integer identity.

    For a Toeplitz document the CK4 instances are tested as well, when
    ``extra_ck`` is set; their failures are listed separately and do not
    make the report fail.
    """
    if any(m.shape != (rep.dim, rep.dim) for m in rep.mats.values()) or len(rep.mats) != len(cat):
        raise CategoryError("representation does not match the category")
    for m in rep.mats.values():
        if not is_partial_isometry(m):
            raise ArithmeticError("generator is not a 0/1 partial isometry")
    passed, failed, extra = [], [], []

    def check(rel, sink):
        lhs, rhs = evaluate(rep, rel)
        if np.array_equal(lhs, rhs):
            passed.append(rel)
        else:
            sink.append((rel, sorted(set(np.nonzero(lhs != rhs)[1].tolist()))))

    for rel in doc.relations:
        check(rel, failed)
    if doc.flavor == "toeplitz" and extra_ck:
        for rel in ck4_relations(cat):
            check(rel, extra)
    return VerifyReport(passed, failed, wick_pairs(cat, rep), extra)
