"""Reading category, presentation, degree and assignment files.

Files are YAML (JSON is accepted as a subset).  A category file holds either
an explicit ``table`` or ``vertices``/``arrows``/``relations``; a presentation
adds ``components``, ``glue`` and ``bound``.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import yaml

from .amalgam import Amalgam, FiniteComponent, FreeComponent, Presentation, amalgamate
from .core import CategoryError, PathCategory


class InputError(CategoryError):
    """Unreadable or malformed input; carries a location when known."""


@dataclass
class Loaded:
    cat: PathCategory
    path: Path | None = None
    pres: Presentation | None = None
    amalgam: Amalgam | None = None


def read_document(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: cannot read ({exc.strerror})") from None
    return parse_document(text, str(path))


def parse_document(text, where="<input>"):
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        problem = getattr(exc, "problem", None) or str(exc)
        if mark is not None:
            raise InputError(f"{where}:{mark.line + 1}:{mark.column + 1}: {problem}") from None
        raise InputError(f"{where}: {problem}") from None
    if not isinstance(doc, dict):
        raise InputError(f"{where}: expected a mapping at the top level")
    return doc


def _require(doc, key, kind, where):
    if key not in doc:
        raise InputError(f"{where}: missing field {key!r}")
    value = doc[key]
    if not isinstance(value, kind):
        raise InputError(f"{where}: field {key!r} has the wrong type")
    return value


def _endpoint_map(value, morphisms, key, where):
    if isinstance(value, dict):
        return {str(k): str(v) for k, v in value.items()}
    if isinstance(value, list):
        if len(value) != len(morphisms):
            raise InputError(f"{where}: {key!r} must list one entry per morphism")
        return {m: str(v) for m, v in zip(morphisms, value)}
    raise InputError(f"{where}: field {key!r} must be a list or a mapping")


def table_category(table, where="<input>") -> PathCategory:
    morphisms = [str(m) for m in _require(table, "morphisms", list, where)]
    src = _endpoint_map(table.get("src", {}), morphisms, "src", where)
    rng = _endpoint_map(table.get("rng", {}), morphisms, "rng", where)
    # anything used as an endpoint without endpoints of its own is a vertex
    named = set(src.values()) | set(rng.values()) | {str(v) for v in table.get("vertices", [])}
    for m in morphisms:
        if m in named:
            src.setdefault(m, m)
            rng.setdefault(m, m)
    compose = []
    for entry in table.get("compose", []) or []:
        if not isinstance(entry, list) or len(entry) != 3:
            raise InputError(f"{where}: compose entries are [a, b, ab], got {entry!r}")
        compose.append(tuple(str(x) for x in entry))
    return PathCategory.from_table(morphisms, src, rng, compose)


def _free_component(doc, label, where):
    vertices = [str(v) for v in _require(doc, "vertices", list, where)]
    if not vertices:
        raise InputError(f"{where}: the category has no vertices")
    arrows = {}
    for a in doc.get("arrows", []) or []:
        if not isinstance(a, dict) or not {"id", "src", "rng"} <= set(a):
            raise InputError(f"{where}: arrows need id, src and rng, got {a!r}")
        name = str(a["id"])
        if name in arrows:
            raise InputError(f"{where}: duplicate arrow {name!r}")
        arrows[name] = (str(a["src"]), str(a["rng"]))
    return FreeComponent(vertices, arrows, label)


def _relations(doc, where):
    out = []
    for rel in doc.get("relations", []) or []:
        if not isinstance(rel, list) or len(rel) != 2 or not all(isinstance(w, list) for w in rel):
            raise InputError(f"{where}: relations are pairs of words, got {rel!r}")
        out.append(tuple(tuple(str(x) for x in w) for w in rel))
    return out


def _component(doc, label, base, where):
    if "file" in doc:
        sub = base / str(doc["file"])
        inner = read_document(sub)
        return _component(inner, label, sub.parent, str(sub))
    if "table" in doc:
        return FiniteComponent(table_category(doc["table"], where), label)
    if "relations" in doc and doc["relations"]:
        loaded = _load_doc(doc, base, where)
        return FiniteComponent(loaded.cat, label)
    return _free_component(doc, label, where)


def presentation_of(doc, base=Path("."), where="<input>") -> Presentation:
    if "components" not in doc:
        return Presentation([_free_component(doc, None, where)], (), _relations(doc, where))
    entries = doc["components"]
    if not isinstance(entries, list) or not entries:
        raise InputError(f"{where}: components must be a nonempty list")
    comps = []
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict):
            raise InputError(f"{where}: component {i} is not a mapping")
        label = entry.get("name")
        comps.append(_component(entry, None if label is None else str(label), base, where))
    glue = [tuple(str(x) for x in g) for g in doc.get("glue", []) or []]
    if any(len(g) != 2 for g in glue):
        raise InputError(f"{where}: glue entries are pairs of vertices")
    return Presentation(comps, glue, _relations(doc, where))


def _load_doc(doc, base, where, bound=None) -> Loaded:
    if "table" in doc and "components" not in doc:
        return Loaded(table_category(_require(doc, "table", dict, where), where))
    if "components" not in doc and "vertices" not in doc:
        raise InputError(f"{where}: expected 'table', 'vertices' or 'components'")
    pres = presentation_of(doc, base, where)
    if bound is None and doc.get("bound") is not None:
        bound = int(doc["bound"])
    finite, _ = pres.is_finite()
    if "components" not in doc and not finite:
        # a plain category file must describe a finite category
        if bound is None:
            raise InputError(f"{where}: the relations form must describe a finite category")
    am = amalgamate(pres, bound)
    return Loaded(am.cat, None, pres, am)


def load(path, bound=None) -> Loaded:
    """Load any category or presentation file into a PathCategory."""
    path = Path(path)
    doc = read_document(path)
    loaded = _load_doc(doc, path.parent, str(path), bound)
    loaded.path = path
    return loaded


# auxiliary files

def load_degree(path, cat, pres=None):
    """``psi: {arrow: [ints]}`` with optional ``torsion: [moduli]``; for a
    presentation, ``components: {label: {arrow: [ints]}}``."""
    from .degree import degree_functor

    doc = read_document(path)
    if "components" in doc:
        if pres is None:
            raise InputError(f"{path}: per-component degrees need a presentation")
        table = doc["components"]
        if not isinstance(table, dict):
            raise InputError(f"{path}: components must map labels to degree tables")
        psis = []
        for comp in pres.components:
            if comp.label not in table:
                raise InputError(f"{path}: no degrees for component {comp.label!r}")
            raw = {str(k): tuple(int(x) for x in v) for k, v in table[comp.label].items()}
            if isinstance(comp, FiniteComponent):
                psis.append(degree_functor(comp.cat, raw))
            else:
                unknown = set(raw) - set(comp.arrows)
                if unknown:
                    raise InputError(f"{path}: unknown arrows {sorted(unknown)}")
                psis.append(raw)
        return "components", psis
    raw = _require(doc, "psi", dict, str(path))
    values = {}
    for k, v in raw.items():
        if not isinstance(v, list):
            v = [v]
        values[str(k)] = [int(x) for x in v]
    torsion = [int(n) for n in doc.get("torsion", []) or []]
    return "psi", degree_functor(cat, values, torsion)


def load_assignment(path):
    """``vertex: v``, ``assignment: {path: [targets]}``, optional ``carrier``."""
    doc = read_document(path)
    vertex = str(_require(doc, "vertex", (str, int), str(path)))
    raw = _require(doc, "assignment", dict, str(path))
    assignment = {str(k): frozenset(str(x) for x in (v or [])) for k, v in raw.items()}
    carrier = doc.get("carrier")
    if carrier is not None:
        carrier = frozenset(str(x) for x in carrier)
    return vertex, assignment, carrier
