import sys
from importlib import resources
from pathlib import Path

import pytest
from hypothesis import assume, settings, strategies as st

from pathcat import load
from pathcat.amalgam import FreeComponent, Presentation, amalgamate
from pathcat.core import is_category_of_paths

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

CORPUS = Path(resources.files("pathcat") / "corpus")
FINITE = ["sq1", "sq2", "glued", "flip", "fig1", "fig2", "fig3", "arrow", "vertex"]
BALLS = ["free2", "onegen", "kgraph"]


def corpus(name, bound=None):
    return load(CORPUS / f"{name}.cat", bound)


@pytest.fixture(scope="session")
def sq1():
    return corpus("sq1").cat


@pytest.fixture(scope="session")
def sq2():
    return corpus("sq2").cat


@pytest.fixture(scope="session", params=FINITE)
def finite_cat(request):
    return corpus(request.param).cat


@st.composite
def random_categories(draw, max_vertices=5, max_arrows=6, squares=True):
    """A random finite category of paths: a free category on a random acyclic
    graph, optionally with commuting squares imposed."""
    n = draw(st.integers(1, max_vertices))
    vertices = [f"v{i}" for i in range(n)]
    edges = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
                          .filter(lambda e: e[0] > e[1]), max_size=max_arrows)) if n > 1 else []
    arrows = {f"e{k}": (vertices[s], vertices[r]) for k, (s, r) in enumerate(edges)}
    relations = []
    if squares:
        two = [(x, y) for x, (sx, _) in arrows.items() for y, (_, ry) in arrows.items() if sx == ry]
        for i, (x, y) in enumerate(two):
            for z, w in two[i + 1:]:
                same = arrows[x][1] == arrows[z][1] and arrows[y][0] == arrows[w][0]
                if same and x != z and y != w and draw(st.booleans()):
                    relations.append(((x, y), (z, w)))
    pres = Presentation([FreeComponent(vertices, arrows, "r")], (), relations)
    cat = amalgamate(pres).cat if not relations else _try(pres)
    assume(cat is not None and is_category_of_paths(cat))
    return cat


def _try(pres):
    try:
        return amalgamate(pres).cat
    except ValueError:
        return None
