"""Command-line interface.

Exit codes: 0 success, 1 a checked property fails (or an oracle disagrees),
2 bad input.
"""
from __future__ import annotations

import json
import logging
import sys
from functools import wraps
from itertools import combinations

import click

from . import analysis, boolring, boundary, core, degree, groupoid, repemit, zigzag
from .amalgam import ComponentCheckError, bound_sensitive_pairs, sum_degree, verify_sum_degree
from .boolring import ExtensionRejected
from .formats import load, load_assignment, load_degree

log = logging.getLogger("pathcat")


class PropertyFailure(Exception):
    """Raised by a subcommand to exit with status 1 after printing its report."""


class Report:
    """Collects output as records (machine) or lines (text)."""

    def __init__(self, fmt, cat=None):
        self.fmt = fmt
        self.records = {}
        self.lines = []
        if cat is not None and not cat.exact:
            self.add("bound", cat.bound, f"truncated ball, bound {cat.bound}")

    def add(self, key, value, text=None):
        self.records[key] = value
        if text is not None:
            self.lines.append(text)

    def line(self, text):
        self.lines.append(text)

    def render(self):
        if self.fmt == "machine":
            return json.dumps(self.records, sort_keys=True, indent=1, ensure_ascii=False) + "\n"
        return "\n".join(self.lines) + ("\n" if self.lines else "")


def _emit(report, output):
    text = report.render()
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def common(fn):
    """Shared flags: input file, bound, format, oracle, output."""
    @click.argument("path", type=click.Path(dir_okay=False))
    @click.option("--bound", type=click.IntRange(min=0), default=None,
                  help="Ball radius for infinite presentations.")
    @click.option("--format", "fmt", type=click.Choice(["text", "machine"]), default="text")
    @click.option("--oracle/--no-oracle", default=False,
                  help="Re-run brute-force cross-checks.")
    @click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
    @wraps(fn)
    def wrapper(path, bound, fmt, oracle, output, **kw):
        loaded = load(path, bound)
        report = Report(fmt, loaded.cat)
        failed = False
        try:
            fn(loaded, report, oracle=oracle, **kw)
        except PropertyFailure:
            failed = True
        _emit(report, output)
        if failed:
            sys.exit(1)
    return wrapper


def _oracle_fail(what):
    raise RuntimeError(f"oracle disagreement: {what}")


def _names(cat, ids):
    return cat.fmt(ids)


# commands

@click.group()
@click.option("-v", "--verbose", count=True)
def cli(verbose):
    """Compute with finite categories of paths."""
    logging.basicConfig(level=logging.WARNING - 10 * verbose, format="%(levelname)s %(message)s")


@cli.command()
@common
def validate(loaded, report, oracle):
    """Check the axioms of a category of paths."""
    cat = loaded.cat
    bad = core.validate_category(cat)
    report.add("morphisms", len(cat), f"{len(cat)} morphisms, {len(cat.vertices)} vertices")
    report.add("vertices", len(cat.vertices))
    report.add("violations", [{"axiom": v.axiom, "witness": list(v.witness)} for v in bad])
    for v in bad:
        report.line(f"violation {v}")
    if not bad:
        aligned, witness = core.check_finitely_aligned(cat)
        report.add("finitely_aligned", aligned, f"finitely aligned: {aligned}")
        if not aligned:
            report.line(f"alignment fails at {witness}")
            bad = [witness]
        if oracle:
            for a in range(len(cat)):
                if cat.tails[a] != frozenset(m for m in range(len(cat)) if a in cat.segments[m]):
                    _oracle_fail(f"tails and segments of {cat.names[a]}")
    report.line("ok" if not bad else "invalid")
    if bad:
        raise PropertyFailure


@cli.command()
@common
@click.option("--paths", default=None, help="Comma-separated family F; all pairs when omitted.")
def align(loaded, report, oracle, paths):
    """Minimal common extensions."""
    cat = loaded.cat
    if paths:
        fam = [p.strip() for p in paths.split(",")]
        join = core.min_common_extensions(cat, fam)
        report.add("join", _names(cat, join), "∨{" + ", ".join(fam) + "} = {" +
                   ", ".join(_names(cat, join)) + "}")
        families = [cat.ids(fam)]
    else:
        rows = []
        families = []
        for v in cat.vertices:
            for a, b in combinations(sorted(cat.paths_at(v)), 2):
                join = core.min_common_extensions(cat, (a, b))
                rows.append({"pair": [cat.names[a], cat.names[b]], "join": _names(cat, join)})
                families.append(frozenset((a, b)))
                report.line(f"{cat.names[a]} ∨ {cat.names[b]} = {{{', '.join(_names(cat, join))}}}")
        report.add("joins", rows)
    if oracle:
        for fam in families:
            fam = sorted(fam)
            common_ = frozenset.intersection(*(cat.tails[a] for a in fam))
            join = core.min_common_extensions(cat, fam)
            union = frozenset().union(*(cat.tails[e] for e in join))
            if cat.exact and union != common_:
                _oracle_fail(f"join of {cat.fmt(fam)}")


@cli.command(name="zigzag")
@common
@click.argument("pairs")
def zigzag_cmd(loaded, report, oracle, pairs):
    """Domain, image and shift-pair form of a zigzag 'a1,b1;a2,b2'."""
    cat = loaded.cat
    zz = zigzag.parse(cat, pairs)
    dom = zigzag.domain(cat, zz)
    mapping = {cat.names[m]: cat.names[zigzag.evaluate(cat, zz, m)] for m in sorted(dom)}
    report.add("zigzag", zigzag.display(cat, zz), f"zigzag {zigzag.display(cat, zz)}")
    report.add("domain", _names(cat, dom), "domain {" + ", ".join(_names(cat, dom)) + "}")
    report.add("map", mapping)
    for k, v in mapping.items():
        report.line(f"  {k} -> {v}")
    if cat.exact:
        union = zigzag.reduce_to_shift_pairs(cat, zz)
        terms = union.display(cat)
        report.add("shift_pairs", [list(t) for t in terms],
                   "shift pairs " + " ∪ ".join(f"{g}σ^{d}" for g, d in terms))
        if oracle:
            for m in sorted(cat.paths_at(zigzag.source(cat, zz))):
                if union.apply(cat, m) != zigzag.evaluate(cat, zz, m):
                    _oracle_fail(f"shift pairs at {cat.names[m]}")


@cli.command()
@common
@click.option("--vertex", default=None, help="Only this vertex.")
def ring(loaded, report, oracle, vertex):
    """Atoms and size of the ring generated by tail sets."""
    cat = loaded.cat
    vs = [cat.id(vertex)] if vertex else list(cat.vertices)
    out = {}
    for v in vs:
        ats = boolring.atoms(cat, v)
        size = 2 ** len(ats)
        out[cat.names[v]] = {"atoms": [_names(cat, a) for a in ats], "size": size}
        report.line(f"{cat.names[v]}: {size} elements, atoms " +
                    " ".join("{" + ", ".join(_names(cat, a)) + "}" for a in ats))
        if oracle:
            gens = [cat.tails[m] for m in cat.paths_at(v)]
            if boolring.saturate(gens) != boolring.ring_family(cat, v):
                _oracle_fail(f"ring at {cat.names[v]}")
    report.add("rings", out)
    if oracle and boolring.check_shift_invariance(cat):
        _oracle_fail("shift invariance")


@cli.command(name="hom-check")
@common
@click.argument("assignment", type=click.Path(dir_okay=False, exists=True))
def hom_check(loaded, report, oracle, assignment):
    """Extend an assignment on tail sets to a ring homomorphism."""
    cat = loaded.cat
    vertex, values, carrier = load_assignment(assignment)
    try:
        hom = boolring.extend_homomorphism(cat, vertex, values, carrier)
    except ExtensionRejected as exc:
        report.add("accepted", False, f"rejected: {exc}")
        report.add("witness", list(exc.witness))
        raise PropertyFailure from None
    report.add("accepted", True, "accepted")
    images = {}
    for el in boolring.generate_ring(cat, vertex):
        images[el.display(cat)] = sorted(hom(el))
    report.add("images", images)
    for k in sorted(images):
        report.line(f"  {k} ↦ {{{', '.join(images[k])}}}")
    if oracle:
        fam = boolring.ring_family(cat, vertex)
        for a in fam:
            for b in fam:
                ra, rb = boolring.ring_set(cat, hom.source_vertex, a), boolring.ring_set(cat, hom.source_vertex, b)
                for op in (frozenset.__and__, frozenset.__or__, frozenset.__sub__):
                    got = hom(boolring.ring_set(cat, hom.source_vertex, op(a, b)))
                    if got != op(hom(ra), hom(rb)):
                        _oracle_fail("homomorphism law")


def _point_names(cat, pts):
    return [_names(cat, x.members) for x in pts]


@cli.command(name="boundary")
@common
def boundary_cmd(loaded, report, oracle):
    """Λ*, maximal points and the boundary, per vertex."""
    cat = loaded.cat
    out = {}
    for v in cat.vertices:
        star = boundary.enumerate_lambda_star(cat, v)
        maximal = boundary.maximal_sets(cat, v)
        bd = boundary.boundary_at(cat, v)
        out[cat.names[v]] = {"all": _point_names(cat, star), "maximal": _point_names(cat, maximal),
                             "boundary": _point_names(cat, bd)}
        report.line(f"{cat.names[v]}: {len(star)} points, {len(bd)} on the boundary")
        for x in star:
            tag = "boundary" if x in bd else ""
            report.line(f"  {x.display(cat)} {tag}".rstrip())
        if oracle:
            if set(star) != set(boundary.lambda_star_by_subsets(cat, v)):
                _oracle_fail(f"points at {cat.names[v]}")
            fam = boolring.ring_family(cat, v)
            ultra = boolring.brute_force_ultrafilters(fam, cat.paths_at(v))
            if ultra != {frozenset(e.members for e in boundary.ultrafilter_of(cat, x)) for x in star}:
                _oracle_fail(f"ultrafilters at {cat.names[v]}")
    report.add("points", out)
    report.add("boundary_size", len(boundary.boundary(cat)),
               f"boundary: {len(boundary.boundary(cat))} points")


@cli.command()
@common
def fe(loaded, report, oracle):
    """Minimal finite exhaustive sets per vertex."""
    cat = loaded.cat
    out = {}
    for v in cat.vertices:
        sets = boundary.finite_exhaustive_sets(cat, v, minimal_only=True)
        out[cat.names[v]] = [_names(cat, f) for f in sets]
        report.line(f"{cat.names[v]}: " + "  ".join("{" + ", ".join(_names(cat, f)) + "}"
                                                    for f in sets))
        if oracle:
            for f in sets:
                if boundary.exhaustive_coverage(cat, v, f) != boundary.is_exhaustive(cat, v, f):
                    _oracle_fail(f"exhaustive coverage of {cat.fmt(f)}")
    report.add("minimal_fe", out)


@cli.command(name="groupoid")
@common
@click.option("--on-boundary/--all-points", default=False)
@click.option("--degree", "degree_path", type=click.Path(dir_okay=False, exists=True), default=None)
def groupoid_cmd(loaded, report, oracle, on_boundary, degree_path):
    """Elements, orbits, isotropy and cocycle values of the groupoid."""
    cat = loaded.cat
    G = groupoid.build_groupoid(cat, on_boundary)
    report.add("units", len(G.units), f"{len(G.units)} units, {len(G)} elements")
    report.add("elements", [g.display(cat) for g in G.elements])
    orbits = [[x.display(cat) for x in o] for o in G.orbits()]
    report.add("orbits", orbits, f"{len(orbits)} orbits")
    for o in orbits:
        report.line("  " + " ".join(o))
    iso = {x.display(cat): len(G.isotropy(x)) for x in G.units}
    report.add("isotropy", iso, "principal" if groupoid.is_principal(G) else "nontrivial isotropy")
    if degree_path:
        kind, psi = load_degree(degree_path, cat)
        table = {g.display(cat): list(groupoid.cocycle(G, psi, g)) for g in G.elements}
        report.add("cocycle", table)
        ker = groupoid.kernel_subgroupoid(G, psi)
        report.add("kernel_principal", groupoid.is_principal(ker),
                   f"kernel of the cocycle principal: {groupoid.is_principal(ker)}")
    if oracle:
        for g, h in G.composable_pairs():
            gh = G.mul(g, h)
            if G.r(gh) != G.r(g) or G.s(gh) != G.s(h):
                _oracle_fail("range/source of a product")
        for x in G.units:
            point_free = len(G.isotropy(x)) == 1
            if on_boundary and point_free != analysis.is_aperiodic_point(cat, x):
                _oracle_fail(f"isotropy at {x.display(cat)}")


@cli.command(name="degree")
@common
@click.argument("psi_path", required=False, type=click.Path(dir_okay=False, exists=True))
def degree_cmd(loaded, report, oracle, psi_path):
    """H(Λ), the θ table, and checks on a degree functor."""
    cat = loaded.cat
    if psi_path:
        kind, psi = load_degree(psi_path, cat, loaded.pres)
        if kind == "components":
            _sum_degree(loaded, report, psi)
            return
    group = degree.compute_H(cat) if cat.exact else None
    if group is not None:
        report.add("H", group.describe(), f"H = {group.describe()}")
        report.add("theta", group.theta.table(cat))
        for a in range(len(cat)):
            if not cat.is_vertex(a):
                report.line(f"  θ({cat.names[a]}) = {list(group.theta(a))}")
    if not psi_path:
        return
    report.add("psi", psi.table(cat))
    nd = degree.is_nondegenerate(cat, psi)
    ni = degree.is_non_isotropic(cat, psi)
    report.add("nondegenerate", {"status": nd.status, "witness": nd.witness},
               f"nondegenerate: {nd.status}" + (f" ({nd.witness})" if nd.witness else ""))
    report.add("non_isotropic", {"status": ni.status, "witness": ni.witness},
               f"non-isotropic: {ni.status}")
    if group is not None:
        images = degree.factor_through_theta(cat, group, psi)
        report.add("factorization", images, f"ψ = h∘θ with h = {images}")
        af = degree.check_af_conditions(cat, psi, [psi(a) for a in range(len(cat))])
        report.add("af", {"a": af["a"], "b": af["b"], "T": [list(t) for t in af["T"]]})
    if oracle and cat.exact and nd:
        G = groupoid.build_groupoid(cat)
        principal = groupoid.is_principal(groupoid.kernel_subgroupoid(G, psi))
        if principal != bool(ni):
            _oracle_fail("non-isotropy against the kernel groupoid")
    if nd.value is False or ni.value is False:
        raise PropertyFailure


def _sum_degree(loaded, report, psis):
    if loaded.pres is None:
        raise core.CategoryError("per-component degrees need a presentation")
    try:
        am, psi, comp = sum_degree(loaded.pres, psis, loaded.cat.bound)
    except ComponentCheckError as exc:
        report.add("component_failures", [list(map(str, f)) for f in exc.failures],
                   f"component check failed: {exc}")
        raise PropertyFailure from None
    report.add("components", comp)
    report.add("psi", psi.table(am.cat))
    checks = verify_sum_degree(am, psi)
    for k, v in checks.items():
        status = v if isinstance(v, bool) else v.status
        report.add(k, status, f"{k}: {status}")
    if not checks["functorial"] or checks["nondegenerate"].value is False \
            or checks["non_isotropic"].value is False:
        raise PropertyFailure


@cli.command()
@common
def analyze(loaded, report, oracle):
    """Aperiodicity, minimality, generalized cycles and entrances."""
    cat = loaded.cat
    rep = analysis.structure_report(cat)
    d = rep.as_dict(cat)
    report.records.update(d)
    report.line(f"aperiodic: {rep.aperiodic.status}" +
                (f" (periodic pair {rep.aperiodic.witness})" if rep.aperiodic.witness else ""))
    if rep.minimal is not None:
        report.line(f"minimal: {rep.minimal.status}")
    for c in d["generalized_cycles"]:
        report.line(f"generalized cycle ({c['mu']}, {c['nu']}), entrance: {c['entrance']['status']}")
    report.line(f"local contractivity hypothesis: {rep.locally_contractive_hypothesis.status}")
    if oracle and cat.exact:
        G = groupoid.build_groupoid(cat, restrict_to_boundary=True)
        free = all(len(G.isotropy(x)) == 1 for x in G.units)
        if free != bool(rep.aperiodic):
            _oracle_fail("aperiodicity against isotropy")
        if rep.minimal.value != (len(G.orbits()) == 1) and _connected(cat):
            _oracle_fail("minimality against orbits")


def _connected(cat):
    import networkx as nx
    g = nx.Graph()
    g.add_nodes_from(cat.vertices)
    g.add_edges_from((cat.src[a], cat.rng[a]) for a in range(len(cat)))
    return nx.is_connected(g)


@cli.command()
@common
def amalgamate(loaded, report, oracle):
    """Normal forms of a presentation (or a ball of them)."""
    if loaded.pres is None:
        raise core.CategoryError("amalgamate needs a presentation file")
    am, pres = loaded.amalgam, loaded.pres
    report.add("finite", am.exact, "finite" if am.exact else f"infinite; ball of radius {am.ball_bound}")
    report.add("size", len(am.cat), f"{len(am.cat)} elements")
    report.add("elements", list(am.cat.names))
    for nm in am.cat.names:
        report.line(f"  {nm}")
    if not am.exact:
        sens = bound_sensitive_pairs(pres, am.ball_bound)
        report.add("bound_sensitive", [list(p) for p in sens])
    if am.exact:
        bad = core.validate_category(am.cat)
        if bad:
            report.line(f"not a category of paths: {bad[0]}")
            raise PropertyFailure
    if oracle:
        import random
        rng = random.Random(0)
        for nf in am.elements:
            if nf.letters and pres.reduce_randomly(nf.letters, rng) != nf:
                _oracle_fail("random reduction order")


@cli.command()
@common
@click.option("--flavor", type=click.Choice(repemit.FLAVORS), default="toeplitz")
def emit(loaded, report, oracle, flavor):
    """Generators and relations of the Toeplitz or Cuntz-Krieger algebra."""
    cat = loaded.cat
    doc = repemit.emit_relations(cat, flavor)
    report.records.update(doc.records(cat))
    report.lines.extend(doc.render(cat).rstrip("\n").split("\n"))
    if oracle:
        rep = repemit.build_matrix_rep(cat, flavor)
        if not repemit.verify_relations(cat, rep, doc).ok:
            _oracle_fail("emitted relations fail in the matrix representation")


@cli.command()
@common
@click.option("--flavor", type=click.Choice(repemit.FLAVORS), default="toeplitz")
def verify(loaded, report, oracle, flavor):
    """Build the 0/1 matrix representation and check every relation."""
    cat = loaded.cat
    doc = repemit.emit_relations(cat, flavor)
    rep = repemit.build_matrix_rep(cat, flavor)
    res = repemit.verify_relations(cat, rep, doc)
    basis = [x.display(cat) for x in rep.basis]
    report.add("dimension", rep.dim, f"{flavor} representation of dimension {rep.dim}")
    report.add("passed", len(res.passed), f"{len(res.passed)} relations hold")
    report.add("failed", [{"relation": r.render(cat), "basis": [basis[i] for i in cols]}
                          for r, cols in res.failed])
    for r, cols in res.failed:
        report.line(f"FAIL {r.render(cat)} on {', '.join(basis[i] for i in cols)}")
    report.add("wick_failures", [[cat.names[a], cat.names[b]] for a, b in res.wick_failures])
    for a, b in res.wick_failures:
        report.line(f"FAIL Wick expansion for ({cat.names[a]}, {cat.names[b]})")
    report.add("ck4_failures", [{"relation": r.render(cat), "basis": [basis[i] for i in cols]}
                                for r, cols in res.ck4_failures])
    for r, cols in res.ck4_failures:
        report.line(f"CK4 not satisfied: {r.render(cat)} on {', '.join(basis[i] for i in cols)}")
    report.add("ok", res.ok, "ok" if res.ok else "FAILED")
    if not res.ok:
        raise PropertyFailure


def main(argv=None):
    try:
        cli.main(args=argv, prog_name="pathcat", standalone_mode=False)
    except click.exceptions.Abort:
        sys.exit(2)
    except click.ClickException as exc:
        exc.show()
        sys.exit(2)
    except core.CategoryError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    except (RuntimeError, ArithmeticError) as exc:
        click.echo(f"check failed: {exc}", err=True)
        sys.exit(1)
    except SystemExit:
        raise
    sys.exit(0)


if __name__ == "__main__":
    main()
