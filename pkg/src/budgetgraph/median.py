"""Exact budget-median solvers on trees.

The objective is the sum of weighted distances from a candidate vertex.
For a block made of an edge of length ``q`` with ``k`` vertices hanging
below it and inner optimal sum ``S``, every one of the k vertices pays the
edge weight, so the block optimum is ``(sqrt(k*q) + sqrt(S))**2`` with
fraction ``sqrt(k*q) / (sqrt(k*q) + sqrt(S))`` on the edge. Sibling blocks
with values ``X_i`` combine as ``min sum X_i / B_i`` over budget splits,
whose unique stationary point is ``B_i ~ sqrt(X_i)`` with value
``(sum sqrt(X_i))**2``.

Because both combination rules are sums in the square-root domain, the
whole bottom-up sweep is carried in square roots (``s[v] = sqrt(sub[v])``),
which also keeps the all-roots complement subtraction well conditioned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import Allocation, RootedTree, SolveReport, root_tree


@dataclass(frozen=True)
class MedianDP:
    """Bottom-up tables for the rooted budget median.

    ``sub[v]``: optimal distance sum over v's subtree, measured from v.
    ``aug[v]``: optimal sum over v's subtree plus its parent edge, measured
    from the parent. ``sqrt_sub[v]`` is ``sqrt(sub[v])``, the quantity the
    recursion is actually linear in.
    """

    sub: tuple[float, ...]
    aug: tuple[float, ...]
    sqrt_sub: tuple[float, ...]


def compute_median_dp(tree: RootedTree) -> MedianDP:
    n = tree.n
    s = [0.0] * n
    aug = [0.0] * n
    parent = tree.parent
    plen = tree.parent_len
    size = tree.subtree_size
    sqrt = math.sqrt
    for v in reversed(tree.order):
        p = parent[v]
        if p >= 0:
            root_term = sqrt(size[v] * plen[v]) + s[v]
            aug[v] = root_term * root_term
            s[p] += root_term
    return MedianDP(
        sub=tuple(x * x for x in s),
        aug=tuple(aug),
        sqrt_sub=tuple(s),
    )


def _extract_allocation(tree: RootedTree, dp: MedianDP) -> tuple[list[float], list[float]]:
    """Per-edge fractions and per-vertex distances of the optimal median allocation."""
    n = tree.n
    mass = [0.0] * n
    mass[tree.root] = 1.0
    frac = [0.0] * (n - 1) if n > 1 else []
    dist = [0.0] * n
    parent = tree.parent
    plen = tree.parent_len
    pedge = tree.parent_edge
    size = tree.subtree_size
    sqrt_sub = dp.sqrt_sub
    sqrt = math.sqrt
    for v in tree.order:
        p = parent[v]
        if p < 0:
            continue
        edge_term = sqrt(size[v] * plen[v])
        # sibling blocks split mass[p] proportionally to sqrt of their values,
        # and sqrt_sub[p] is exactly the sum of those square roots
        block = mass[p] * (edge_term + sqrt_sub[v]) / sqrt_sub[p]
        if sqrt_sub[v] == 0.0:
            edge = block
        else:
            edge = block * edge_term / (edge_term + sqrt_sub[v])
        frac[pedge[v]] = edge
        mass[v] = block - edge
        dist[v] = dist[p] + plen[v] / edge
    return frac, dist


def solve_rooted_median(tree: RootedTree) -> SolveReport:
    """Optimal rooted budget median (distance sum) with its allocation. O(n)."""
    dp = compute_median_dp(tree)
    frac, dist = _extract_allocation(tree, dp)
    value = dp.sub[tree.root]
    return SolveReport(
        kind="median",
        objective=value,
        allocation=Allocation(fractions=tuple(frac)),
        distances=tuple(dist),
        root=tree.root,
        average=value / tree.n,
    )


def solve_all_roots_median(tree: RootedTree) -> tuple[float, ...]:
    """Optimal median sum for every candidate root in O(n) total.

    The top-down pass carries ``up[v]``, the square root of the optimal sum
    of the complement block (everything outside v's subtree plus the parent
    edge, measured from v). The complement of v seen from its parent p is
    p's own total minus v's contribution, and all of that algebra is linear
    in the square-root domain.
    """
    dp = compute_median_dp(tree)
    n = tree.n
    size = tree.subtree_size
    parent = tree.parent
    plen = tree.parent_len
    sqrt_sub = dp.sqrt_sub
    sqrt = math.sqrt
    up = [0.0] * n
    total = [0.0] * n
    total[tree.root] = dp.sub[tree.root]
    for v in tree.order:
        p = parent[v]
        if p < 0:
            continue
        inner = sqrt_sub[p] - (sqrt(size[v] * plen[v]) + sqrt_sub[v]) + up[p]
        if inner < 0.0:  # cancellation guard
            inner = 0.0
        up[v] = sqrt((n - size[v]) * plen[v]) + inner
        root_term = sqrt_sub[v] + up[v]
        total[v] = root_term * root_term
    return tuple(total)


def unweighted_tree_medians(tree: RootedTree) -> list[int]:
    """Vertices minimizing the plain hop-count distance sum (1 or 2 of them)."""
    n = tree.n
    size = tree.subtree_size
    parent = tree.parent
    depth = tree.depth
    sums = [0] * n
    sums[tree.root] = sum(depth)
    for v in tree.order:
        p = parent[v]
        if p >= 0:
            # moving the root across the edge: size[v] vertices get closer,
            # the other n - size[v] get farther
            sums[v] = sums[p] + n - 2 * size[v]
    best = min(sums)
    return [v for v in range(n) if sums[v] == best]


def solve_unrooted_median(tree: RootedTree) -> SolveReport:
    """Best median vertex over all roots, with its allocation.

    Ties go to the smallest vertex id. The report's diagnostics carry the
    plain unweighted tree medians and whether the budget median landed on
    one of them, so a structural mismatch surfaces as data rather than a
    silent wrong answer.
    """
    values = solve_all_roots_median(tree)
    best_root = 0
    best_val = values[0]
    for v in range(1, tree.n):
        if values[v] < best_val:
            best_val = values[v]
            best_root = v
    report = solve_rooted_median(root_tree(tree.graph, best_root))
    plain = unweighted_tree_medians(tree)
    labels = tree.graph.labels
    diagnostics = {
        "all_roots": {labels[v]: values[v] for v in range(tree.n)},
        "unweighted_medians": [labels[v] for v in plain],
        "coincides_with_unweighted_median": best_root in plain,
    }
    return SolveReport(
        kind="median",
        objective=report.objective,
        allocation=report.allocation,
        distances=report.distances,
        root=best_root,
        average=report.average,
        diagnostics=diagnostics,
    )
