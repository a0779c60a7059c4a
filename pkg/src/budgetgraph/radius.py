"""Exact budget-radius solvers on trees.

The optimal allocation for a subtree hanging below an edge of length ``q``
with inner optimum ``R`` puts fraction ``sqrt(q) / (sqrt(R) + sqrt(q))`` on
the edge, which composes to the closed form ``(sqrt(q) + sqrt(R))**2`` for
the edge-plus-subtree block. Sibling blocks split the budget proportionally
to their block values, so a parent's optimum is simply the sum of its
children's block values. One bottom-up sweep therefore solves the rooted
problem, and a second top-down sweep yields the optimum for every root.

Everything is iterative (no recursion), so path-like trees with millions of
vertices are fine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .core import Allocation, RootedTree, SolveReport, root_tree


@dataclass(frozen=True)
class RadiusDP:
    """Bottom-up tables for the rooted budget radius.

    ``sub[v]`` is the optimal radius of v's own subtree measured from v
    (0 for leaves). ``aug[v]`` is the optimal radius of the block formed by
    v's subtree plus the edge to its parent, measured from the parent;
    it equals ``(sqrt(parent_len[v]) + sqrt(sub[v]))**2``. ``aug[root]`` is 0.
    """

    sub: tuple[float, ...]
    aug: tuple[float, ...]


def compute_radius_dp(tree: RootedTree) -> RadiusDP:
    n = tree.n
    sub = [0.0] * n
    aug = [0.0] * n
    parent = tree.parent
    plen = tree.parent_len
    sqrt = math.sqrt
    for v in reversed(tree.order):
        p = parent[v]
        if p >= 0:
            a = (sqrt(plen[v]) + sqrt(sub[v])) ** 2
            aug[v] = a
            sub[p] += a
    return RadiusDP(sub=tuple(sub), aug=tuple(aug))


def _extract_allocation(tree: RootedTree, dp: RadiusDP) -> tuple[list[float], list[float]]:
    """Top-down pass: per-edge fractions and per-vertex distances under them.

    The budget mass available inside a vertex's subtree is split among the
    child blocks proportionally to their ``aug`` values; inside a block the
    edge takes the ``sqrt(q)/(sqrt(sub)+sqrt(q))`` share (all of it when the
    child's subtree is bare).
    """
    n = tree.n
    mass = [0.0] * n
    mass[tree.root] = 1.0
    frac = [0.0] * (n - 1) if n > 1 else []
    dist = [0.0] * n
    parent = tree.parent
    plen = tree.parent_len
    pedge = tree.parent_edge
    sub, aug = dp.sub, dp.aug
    sqrt = math.sqrt
    for v in tree.order:
        p = parent[v]
        if p < 0:
            continue
        block = mass[p] * aug[v] / sub[p]
        s = sub[v]
        if s == 0.0:
            edge = block
        else:
            sq = sqrt(plen[v])
            edge = block * sq / (sqrt(s) + sq)
        frac[pedge[v]] = edge
        mass[v] = block - edge
        dist[v] = dist[p] + plen[v] / edge
    return frac, dist


def solve_rooted_radius(tree: RootedTree) -> SolveReport:
    """Optimal rooted budget radius with its explicit allocation. O(n)."""
    dp = compute_radius_dp(tree)
    frac, dist = _extract_allocation(tree, dp)
    return SolveReport(
        kind="radius",
        objective=dp.sub[tree.root],
        allocation=Allocation(fractions=tuple(frac)),
        distances=tuple(dist),
        root=tree.root,
        lower_bound=tree.graph.total_length(),
    )


def radius_lower_bound(tree: RootedTree) -> float:
    """Sum of edge lengths: a lower bound on the budget radius for any root."""
    return tree.graph.total_length()


@dataclass(frozen=True)
class AllRootsRadius:
    """Budget radius of the whole tree for every candidate root."""

    values: tuple[float, ...]
    best_root: int
    best: Optional[SolveReport] = None


def solve_all_roots_radius(tree: RootedTree, with_report: bool = True) -> AllRootsRadius:
    """Budget radius for every root in O(n) total via two tree sweeps.

    After the bottom-up tables are known, a child v of u satisfies
    ``value[v] = sub[v] + (sqrt(len(u,v)) + sqrt(value[u] - aug[v]))**2``:
    the complement of v's branch, seen from u, is itself a block hanging
    above v. Ties for the best root go to the smallest vertex id.
    """
    dp = compute_radius_dp(tree)
    n = tree.n
    total = [0.0] * n
    total[tree.root] = dp.sub[tree.root]
    parent = tree.parent
    plen = tree.parent_len
    sub, aug = dp.sub, dp.aug
    sqrt = math.sqrt
    for v in tree.order:
        p = parent[v]
        if p < 0:
            continue
        rest = total[p] - aug[v]
        if rest < 0.0:  # cancellation guard; exact value is >= 0
            rest = 0.0
        total[v] = sub[v] + (sqrt(plen[v]) + sqrt(rest)) ** 2
    best_root = 0
    best_val = total[0]
    for v in range(1, n):
        if total[v] < best_val:
            best_val = total[v]
            best_root = v
    best = None
    if with_report:
        best = solve_rooted_radius(root_tree(tree.graph, best_root))
    return AllRootsRadius(values=tuple(total), best_root=best_root, best=best)
