"""Shared builders for the test suite.

The four worked single-tree instances reused across modules (named after
their shapes) all have unit lengths:

* two_leaf_broom: a handle from the root to a hub with two leaves below
  (optimum 3 + 2*sqrt(2))
* three_leaf_broom: same with three leaves (optimum 4 + 2*sqrt(3))
* double_broom: two two-leaf brooms joined at the root (optimum doubles)
* broom_plus_path: a three-leaf broom and a two-edge path joined at the
  root (optima add)
"""

from __future__ import annotations

import random

import pytest

from budgetgraph import BudgetGraph, load_graph, root_tree


def tree_from_text(text: str, root_label: str):
    g = load_graph(text)
    return g, root_tree(g, g.vertex(root_label))


@pytest.fixture
def two_leaf_broom():
    return tree_from_text("r v 1\nv l1 1\nv l2 1", "r")


@pytest.fixture
def three_leaf_broom():
    return tree_from_text("r v 1\nv l1 1\nv l2 1\nv l3 1", "r")


@pytest.fixture
def double_broom():
    text = "r v1 1\nv1 a1 1\nv1 a2 1\nr v2 1\nv2 b1 1\nv2 b2 1"
    return tree_from_text(text, "r")


@pytest.fixture
def broom_plus_path():
    text = "r p1 1\np1 p2 1\nr v 1\nv l1 1\nv l2 1\nv l3 1"
    return tree_from_text(text, "r")


def random_tree(rng: random.Random, n: int, lo: float = 0.01, hi: float = 100.0) -> BudgetGraph:
    """Uniform random attachment tree with lengths in [lo, hi]."""
    edges = [(rng.randrange(i), i, rng.uniform(lo, hi)) for i in range(1, n)]
    return BudgetGraph.build(n, edges)


def random_connected_graph(
    rng: random.Random, n: int, lo: float = 0.01, hi: float = 100.0, extra: float = 0.5
) -> BudgetGraph:
    """Random tree plus each remaining pair independently with prob ``extra``."""
    edges = [(rng.randrange(i), i, rng.uniform(lo, hi)) for i in range(1, n)]
    present = {(min(u, v), max(u, v)) for u, v, _ in edges}
    for u in range(n):
        for v in range(u + 1, n):
            if (u, v) not in present and rng.random() < extra:
                edges.append((u, v, rng.uniform(lo, hi)))
                present.add((u, v))
    return BudgetGraph.build(n, edges)


def minimize_unimodal(f, lo: float, hi: float, iters: int = 200) -> float:
    """Golden-section minimum of a unimodal function on (lo, hi).

    Small independent referee for hand-derived optima of one-parameter
    allocation families.
    """
    phi = (5 ** 0.5 - 1) / 2
    a, b = lo, hi
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = f(d)
    x = (a + b) / 2
    return f(x)
