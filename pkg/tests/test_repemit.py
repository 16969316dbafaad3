from pathlib import Path

import numpy as np
import pytest

import oracles
from conftest import FINITE, corpus
from pathcat import repemit as rp
from pathcat.core import CategoryError
from pathcat.boundary import all_points, segment_point

GOLDEN = Path(__file__).parent / "golden"


def rels(doc, tag):
    return [r for r in doc.relations if r.tag == tag]


def test_toeplitz_join_on_sq2(sq2):
    doc = rp.emit_relations(sq2, "toeplitz")
    text = doc.render(sq2)
    assert "(T3) T_alphaT_alpha*T_betaT_beta* = T_eps0T_eps0* ∨ T_eps1T_eps1*" in text
    assert "(T3) T_eps0T_eps0*T_eps1T_eps1* = 0" in text
    assert not rels(doc, "CK4")


def test_single_vertex_relations():
    cat = corpus("vertex").cat
    lines = rp.emit_relations(cat, "toeplitz").render(cat).splitlines()[2:]
    assert lines == ["(T1) T_v*T_v = T_v", "(T2) T_vT_v = T_v", "(T3) T_vT_v*T_vT_v* = T_vT_v*"]
    rep = rp.build_matrix_rep(cat, "toeplitz")
    assert rep.dim == 1 and (rep.mats[0] == np.eye(1, dtype=np.int64)).all()


def test_ck_relations_on_sq2(sq2):
    doc = rp.emit_relations(sq2, "ck")
    assert "(CK4) S_t = S_alphaS_alpha*" in doc.render(sq2)


def test_sq2_golden_text(sq2):
    assert rp.emit_relations(sq2, "ck").render(sq2) == (GOLDEN / "sq2_ck.txt").read_text()


def test_instances_are_exact(finite_cat):
    cat = finite_cat
    doc = rp.emit_relations(cat, "ck")
    for r in rels(doc, "T3"):
        a, b = r.lhs[0][1], r.lhs[2][1]
        assert {p[0][1] for p in r.rhs} == oracles.join(cat, (a, b))
    ck = {(r.lhs[0][1], frozenset(p[0][1] for p in r.rhs)) for r in rels(doc, "CK4")}
    assert ck == {(v, f) for v in cat.vertices for f in oracles.minimal_fe(cat, v)}
    assert len(set(doc.relations)) == len(doc.relations)


def test_dimensions(sq2):
    # Λ* has 5 points at t, 3 each at p and q, 1 each at v0 and v1
    toeplitz = rp.build_matrix_rep(sq2, "toeplitz")
    assert toeplitz.dim == 13
    per_vertex = {sq2.names[v]: sum(1 for x in toeplitz.basis if x.vertex == v) for v in sq2.vertices}
    assert per_vertex == {"t": 5, "p": 3, "q": 3, "v0": 1, "v1": 1}
    assert rp.build_matrix_rep(sq2, "ck").dim == 8


def test_toeplitz_separates_from_ck(sq2):
    rep = rp.build_matrix_rep(sq2, "toeplitz")
    report = rp.verify_relations(sq2, rep, rp.emit_relations(sq2, "toeplitz"))
    assert report.ok and not report.failed and not report.wick_failures
    fails = {(r.lhs[0][1], frozenset(p[0][1] for p in r.rhs)): cols for r, cols in report.ck4_failures}
    key = (sq2.id("t"), frozenset({sq2.id("alpha")}))
    assert key in fails
    failing = [rep.basis[i] for i in fails[key]]
    assert segment_point(sq2, "t") in failing
    assert all(sq2.id("alpha") not in x for x in failing)
    ck = rp.build_matrix_rep(sq2, "ck")
    full = rp.verify_relations(sq2, ck, rp.emit_relations(sq2, "ck"))
    assert full.ok and len(full.passed) == len(rp.emit_relations(sq2, "ck").relations)


@pytest.mark.parametrize("name", FINITE)
def test_all_relations_hold(name):
    cat = corpus(name).cat
    for flavor in rp.FLAVORS:
        rep = rp.build_matrix_rep(cat, flavor)
        report = rp.verify_relations(cat, rep, rp.emit_relations(cat, flavor))
        assert report.ok, [r.render(cat) for r, _ in report.failed]
        ranges = [m @ m.T for m in rep.mats.values()]
        for m in rep.mats.values():
            assert rp.is_partial_isometry(m)
            for p in (m @ m.T, m.T @ m):
                assert (p == np.diag(np.diag(p))).all()
        for p in ranges:
            for q in ranges:
                assert (p @ q == q @ p).all()
        if flavor == "toeplitz":
            nontrivial = any(f != frozenset({v}) for v in cat.vertices for f in oracles.minimal_fe(cat, v))
            assert bool(report.ck4_failures) == nontrivial


def test_matrices_act_by_concatenation(sq2):
    rep = rp.build_matrix_rep(sq2, "toeplitz")
    pos = {x.members: i for i, x in enumerate(rep.basis)}
    for a, m in rep.mats.items():
        for x in all_points(sq2):
            col = m[:, pos[x.members]]
            if x.vertex == sq2.src[a]:
                assert col[pos[oracles.concat(sq2, a, x.members)]] == 1 and col.sum() == 1
            else:
                assert col.sum() == 0


def test_errors(sq2, sq1):
    with pytest.raises(CategoryError):
        rp.emit_relations(sq2, "graph")
    with pytest.raises(CategoryError):
        rp.emit_relations(corpus("free2").cat)
    with pytest.raises(CategoryError, match="does not match"):
        rp.verify_relations(sq2, rp.build_matrix_rep(sq1), rp.emit_relations(sq2))
    with pytest.raises(ArithmeticError):
        rp.join([np.array([[1, 1], [1, 1]]), np.array([[1, 0], [0, 0]])], 2)
