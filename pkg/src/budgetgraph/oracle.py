"""Independent verification machinery for budget-allocation solvers.

Two referees, deliberately separate from the closed-form tree recursions:

* a numerical optimizer over the budget simplex, and
* an exact small-graph solver that enumerates every spanning tree, since an
  optimal radius or median allocation is always supported on one.

The numerical optimizer layers three phases. Projected subgradient descent
with diminishing steps and multiple restarts does the coarse search. Its
incumbents, together with structural candidates (minimum spanning tree,
shortest-path trees under a few length transforms, randomized spanning
trees), seed a local search over spanning-tree supports by single edge
swaps. A candidate support is scored by solving the budget problem
restricted to its paths, which is convex: the median sum has the closed
form (sum_e sqrt(count_e * len_e))^2, and the min-max radius is valued
through its concave dual max over vertex weights lam of
(sum_e sqrt(len_e * (paths through e weighted by lam)))^2, ascended by
multiplicative weights with the closed-form inner minimum. Supports whose
total length already exceeds the incumbent value are pruned outright,
because any support's optimum is at least its total length. The winning
support is refined once by an interior-point solve (cvxpy) for the final
allocation.

Both referees are desk-scale: the numerical route is only trusted on small
instances at cross-checked tolerances, and the enumeration refuses to run
past a configurable spanning-tree cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from .core import (
    Allocation,
    BudgetGraph,
    GraphError,
    SolveReport,
    evaluate_median,
    evaluate_radius,
    root_tree,
    shortest_path_tree,
    weighted_distances,
)
from .radius import solve_rooted_radius

# Budget floor used while searching, so shortest paths stay defined even
# when the projection zeroes an edge out. Final reports always re-evaluate
# with the true weights.
_FLOOR = 1e-12


class EnumerationCapError(GraphError):
    """Spanning-tree enumeration refused: the instance is too large."""

    def __init__(self, count: float, cap: int):
        super().__init__(
            f"graph has about {count:.3g} spanning trees, above the cap of {cap}"
        )
        self.estimate = count
        self.cap = cap


@dataclass(frozen=True)
class OracleConfig:
    """Knobs for the numerical optimizer.

    The descent step schedule is diminishing: ``step_scale / sqrt(t)`` along
    the normalized subgradient. ``restarts`` counts starting points (uniform
    plus seeded Dirichlet draws); an explicit initial allocation, when given,
    replaces the first of them. ``swap_solve_budget`` caps how many restricted
    convex solves the support search may spend.
    """

    max_iters: int = 400
    step_scale: float = 0.25
    tol: float = 1e-6
    restarts: int = 5
    seed: int = 0
    support_swaps: bool = True
    swap_solve_budget: int = 800
    enum_cap: int = 1_000_000

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")


def _project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort-based)."""
    n = v.shape[0]
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, n + 1)
    cond = u - css / idx > 0
    rho = idx[cond][-1]
    theta = css[rho - 1] / rho
    return np.maximum(v - theta, 0.0)


def _path_edges(graph: BudgetGraph, pred: Sequence[int], v: int, root: int) -> list[int]:
    """Edge ids along the predecessor path from root to v."""
    path = []
    while v != root:
        e = pred[v]
        if e < 0:
            return []
        path.append(e)
        u, w, _ = graph.edges[e]
        v = u if w == v else w
    return path


def _edge_multiplicities(graph: BudgetGraph, dist, pred, root: int) -> np.ndarray:
    """How many vertices' shortest paths traverse each edge."""
    mult = np.zeros(graph.m)
    count = [1] * graph.n
    count[root] = 0
    # children before parents: distances increase along every pred path
    for v in sorted(range(graph.n), key=lambda x: -dist[x]):
        if v == root:
            continue
        e = pred[v]
        if e < 0:
            continue
        mult[e] += count[v]
        u, w, _ = graph.edges[e]
        parent = u if w == v else w
        count[parent] += count[v]
    return mult


class _Objective:
    """Radius (max) or median (sum) of root distances, with subgradients."""

    def __init__(self, graph: BudgetGraph, root: int, kind: str):
        self.graph = graph
        self.root = root
        self.kind = kind
        self.lengths = np.array([e[2] for e in graph.edges])

    def true_value(self, b: np.ndarray) -> float:
        alloc = Allocation(fractions=tuple(np.maximum(b, 0.0) / max(b.sum(), _FLOOR)))
        if self.kind == "radius":
            return evaluate_radius(self.graph, alloc, self.root)
        return evaluate_median(self.graph, alloc, self.root)[0]

    def floored_sp(self, b: np.ndarray):
        weights = (self.lengths / np.maximum(b, _FLOOR)).tolist()
        return shortest_path_tree(self.graph, weights, self.root)

    def floored_value_and_subgradient(self, b: np.ndarray) -> tuple[float, np.ndarray]:
        dist, pred = self.floored_sp(b)
        bsafe = np.maximum(b, _FLOOR)
        grad = np.zeros(self.graph.m)
        if self.kind == "radius":
            # lexicographically smallest maximizer breaks ties
            target = max(
                (v for v in range(self.graph.n) if v != self.root),
                key=lambda v: (dist[v], -v),
                default=self.root,
            )
            value = dist[target] if self.graph.n > 1 else 0.0
            for e in _path_edges(self.graph, pred, target, self.root):
                grad[e] -= self.lengths[e] / (bsafe[e] * bsafe[e])
        else:
            value = sum(dist)
            mult = _edge_multiplicities(self.graph, dist, pred, self.root)
            grad = -mult * self.lengths / (bsafe * bsafe)
        return value, grad


def _descend(obj: _Objective, b0: np.ndarray, cfg: OracleConfig) -> tuple[np.ndarray, list[float]]:
    """Projected subgradient descent; returns the best iterate and the
    running best-value history (floored objective)."""
    b = b0.copy()
    best_b = b.copy()
    best = math.inf
    history = []
    for t in range(1, cfg.max_iters + 1):
        value, grad = obj.floored_value_and_subgradient(b)
        if value < best:
            best = value
            best_b = b.copy()
        history.append(best)
        norm = float(np.linalg.norm(grad))
        if norm > 0:
            b = _project_simplex(b - (cfg.step_scale / math.sqrt(t)) * grad / norm)
    return best_b, history


# ---------------------------------------------------------------------------
# support search
# ---------------------------------------------------------------------------


def _kruskal_support(graph: BudgetGraph, order: Sequence[int]) -> frozenset[int]:
    """Spanning tree greedily built over the given edge ordering."""
    parent = list(range(graph.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    out = []
    for i in order:
        u, v, _ = graph.edges[i]
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            out.append(i)
    return frozenset(out)


def _mst_support(graph: BudgetGraph) -> frozenset[int]:
    """Minimum spanning tree by length (Kruskal, lexicographic ties)."""
    return _kruskal_support(
        graph, sorted(range(graph.m), key=lambda i: (graph.edges[i][2], i))
    )


def _spt_support(graph: BudgetGraph, root: int, weights: Sequence[float]) -> frozenset[int]:
    _, pred = shortest_path_tree(graph, list(weights), root)
    return frozenset(pred[v] for v in range(graph.n) if v != root and pred[v] >= 0)


def _tree_paths(graph: BudgetGraph, support: frozenset[int], root: int) -> Optional[list[list[int]]]:
    """Root-to-vertex edge paths within a spanning-tree support, or None."""
    adj: list[list[tuple[int, int]]] = [[] for _ in range(graph.n)]
    for e in support:
        u, v, _ = graph.edges[e]
        adj[u].append((v, e))
        adj[v].append((u, e))
    paths: dict[int, list[int]] = {root: []}
    stack = [root]
    while stack:
        u = stack.pop()
        for v, e in adj[u]:
            if v not in paths:
                paths[v] = paths[u] + [e]
                stack.append(v)
    if len(paths) != graph.n:
        return None
    return [paths[v] for v in range(graph.n) if v != root]


def _cycle_edges(graph: BudgetGraph, support: frozenset[int], e_in: int) -> list[int]:
    """Support edges on the unique cycle closed by adding e_in."""
    u0, v0, _ = graph.edges[e_in]
    adj: list[list[tuple[int, int]]] = [[] for _ in range(graph.n)]
    for e in support:
        u, v, _ = graph.edges[e]
        adj[u].append((v, e))
        adj[v].append((u, e))
    prev: dict[int, tuple[int, int]] = {u0: (-1, -1)}
    stack = [u0]
    while stack:
        x = stack.pop()
        for y, e in adj[x]:
            if y not in prev:
                prev[y] = (x, e)
                stack.append(y)
    out = []
    x = v0
    while x != u0:
        px, e = prev[x]
        out.append(e)
        x = px
    return out


class _SupportScorer:
    """Scores a spanning-tree support by its restricted convex optimum.

    Median: exact closed form. Radius: multiplicative-weights ascent on the
    concave dual over vertex weights, whose inner minimum is closed-form;
    the returned value is the achievable primal upper bound of the best
    iterate (within ~1e-7 of the true restricted optimum in practice).
    """

    def __init__(self, obj: _Objective, hedge_iters: int = 200):
        self.obj = obj
        self.hedge_iters = hedge_iters
        self.cache: dict[frozenset[int], tuple[float, Optional[np.ndarray]]] = {}
        self.solves = 0

    def score(self, support: frozenset[int]) -> tuple[float, Optional[np.ndarray]]:
        if support in self.cache:
            return self.cache[support]
        paths = _tree_paths(self.obj.graph, support, self.obj.root)
        if paths is None:
            result: tuple[float, Optional[np.ndarray]] = (math.inf, None)
        elif self.obj.kind == "median":
            result = self._median_closed_form(paths)
        else:
            result = self._radius_dual_ascent(paths)
        self.cache[support] = result
        self.solves += 1
        return result

    def _median_closed_form(self, paths):
        # min over the simplex of sum_e (count_e * len_e) / b_e, minimized
        # at b_e proportional to sqrt(count_e * len_e)
        m = self.obj.graph.m
        count = np.zeros(m)
        for path in paths:
            for e in path:
                count[e] += 1
        c = count * self.obj.lengths
        b = np.sqrt(c)
        total = b.sum()
        if total == 0:
            return math.inf, None
        b /= total
        return float(c[c > 0] @ (1.0 / b[c > 0])), b

    def _radius_dual_ascent(self, paths):
        paths = [p for p in paths if p]
        if not paths:
            return 0.0, None
        m = self.obj.graph.m
        lengths = self.obj.lengths
        incidence = np.zeros((len(paths), m))
        for i, p in enumerate(paths):
            incidence[i, p] = 1.0
        lam = np.full(len(paths), 1.0 / len(paths))
        best_value = math.inf
        best_b = None
        for _ in range(self.hedge_iters):
            w = incidence.T @ lam
            s = np.sqrt(lengths * w)
            total = s.sum()
            if total == 0.0:
                break
            b = s / total
            costs = incidence @ np.divide(
                lengths, b, out=np.zeros(m), where=b > 0
            )
            value = float(costs.max())
            if value < best_value:
                best_value = value
                best_b = b
            lam = lam * np.exp(1.2 * (costs / value))
            lam /= lam.sum()
        return best_value, best_b


def _support_search(
    obj: _Objective, seeds: list[frozenset[int]], cfg: OracleConfig
) -> tuple[float, Optional[np.ndarray], Optional[frozenset[int]], int]:
    """Single-swap local search over tree supports, one chain per seed.

    Any support's optimum is at least its total edge length, so candidate
    swaps already longer than the global incumbent are skipped outright.
    Chains share the score cache and the budget on scored candidates.
    """
    graph = obj.graph
    scorer = _SupportScorer(obj)
    total_len = [graph.edges[e][2] for e in range(graph.m)]
    best_val = math.inf
    best_b: Optional[np.ndarray] = None
    best_support: Optional[frozenset[int]] = None

    def consider(support, val, b):
        nonlocal best_val, best_b, best_support
        if val < best_val:
            best_val, best_b, best_support = val, b, support

    scored_seeds = []
    for support in seeds:
        val, b = scorer.score(support)
        scored_seeds.append((val, support, b))
        consider(support, val, b)
    if best_support is None:
        return best_val, best_b, best_support, scorer.solves

    for seed_val, seed_support, _ in scored_seeds:
        current, current_val = seed_support, seed_val
        while scorer.solves < cfg.swap_solve_budget:
            move = None
            for e_in in range(graph.m):
                if e_in in current:
                    continue
                for e_out in _cycle_edges(graph, current, e_in):
                    cand = frozenset((current - {e_out}) | {e_in})
                    if sum(total_len[e] for e in cand) >= min(current_val, best_val):
                        continue
                    val, b = scorer.score(cand)
                    consider(cand, val, b)
                    if val < current_val * (1 - 1e-12) and (
                        move is None or val < move[0]
                    ):
                        move = (val, cand)
                    if scorer.solves >= cfg.swap_solve_budget:
                        break
                if scorer.solves >= cfg.swap_solve_budget:
                    break
            if move is None:
                break
            current_val, current = move
    return best_val, best_b, best_support, scorer.solves


def _refine_support_interior_point(
    obj: _Objective, support: frozenset[int], fallback: np.ndarray
) -> np.ndarray:
    """One high-precision solve of the winning support's min-max program."""
    import cvxpy as cp

    paths = _tree_paths(obj.graph, support, obj.root)
    if paths is None:
        return fallback
    m = obj.graph.m
    var = cp.Variable(m, nonneg=True)
    t = cp.Variable()
    cons = [cp.sum(var) == 1]
    off = [i for i in range(m) if i not in support]
    if off:
        cons.append(var[off] == 0)
    for path in paths:
        if path:
            cons.append(
                cp.sum(cp.multiply(obj.lengths[path], cp.inv_pos(var[path]))) <= t
            )
    problem = cp.Problem(cp.Minimize(t), cons)
    try:
        problem.solve(solver=cp.CLARABEL)
    except cp.SolverError:
        return fallback
    if var.value is None:
        return fallback
    b = np.maximum(np.asarray(var.value).reshape(-1), 0.0)
    if off:
        b[off] = 0.0
    total = b.sum()
    if total <= 0:
        return fallback
    b /= total
    if obj.true_value(b) <= obj.true_value(fallback):
        return b
    return fallback


# ---------------------------------------------------------------------------
# numeric oracles
# ---------------------------------------------------------------------------


def _numeric_optimize(
    graph: BudgetGraph,
    root: int,
    kind: str,
    cfg: Optional[OracleConfig],
    init: Optional[Sequence[float]],
) -> SolveReport:
    cfg = cfg or OracleConfig()
    if graph.n == 1:
        return SolveReport(
            kind=kind,
            objective=0.0,
            allocation=Allocation(()),
            distances=(0.0,),
            root=root,
            average=0.0 if kind == "median" else None,
            diagnostics={"iterations": 0, "converged": True, "restarts": 0},
        )
    obj = _Objective(graph, root, kind)
    rng = np.random.default_rng(cfg.seed)
    m = graph.m
    starts: list[np.ndarray] = []
    if init is not None:
        b0 = np.asarray(init, dtype=float)
        if b0.shape != (m,):
            raise GraphError(f"initial allocation must have {m} fractions")
        starts.append(np.maximum(b0, 0.0) / max(b0.sum(), _FLOOR))
    if len(starts) < cfg.restarts:
        starts.append(np.full(m, 1.0 / m))
    while len(starts) < cfg.restarts:
        starts.append(rng.dirichlet(np.ones(m)))

    best_b: Optional[np.ndarray] = None
    best_val = math.inf
    best_history: list[float] = []
    incumbents: list[np.ndarray] = []
    for b0 in starts:
        b, history = _descend(obj, b0, cfg)
        incumbents.append(b)
        value = obj.true_value(b)
        if value < best_val:
            best_val = value
            best_b = b
            best_history = history

    support_solves = 0
    if cfg.support_swaps:
        lengths = obj.lengths
        seeds: list[frozenset[int]] = []

        def add_seed(s: frozenset[int]):
            if len(s) == graph.n - 1 and s not in seeds:
                seeds.append(s)

        add_seed(_mst_support(graph))
        add_seed(_spt_support(graph, root, lengths.tolist()))
        add_seed(_spt_support(graph, root, np.sqrt(lengths).tolist()))
        add_seed(_spt_support(graph, root, (lengths * lengths).tolist()))
        for b in incumbents:
            add_seed(_spt_support(graph, root, (lengths / np.maximum(b, _FLOOR)).tolist()))
        for _ in range(2):
            add_seed(_kruskal_support(graph, rng.permutation(m).tolist()))
        val, b, support, support_solves = _support_search(obj, seeds, cfg)
        if b is not None and val < best_val:
            if kind == "radius" and support is not None:
                b = _refine_support_interior_point(obj, support, b)
            best_b = b
            best_val = obj.true_value(b)

    # convergence flag: did the raw descent still improve materially over
    # its last 10% of iterations?
    window = max(1, cfg.max_iters // 10)
    if len(best_history) > window:
        earlier = best_history[-window - 1]
        late_gain = (earlier - best_history[-1]) / max(abs(best_history[-1]), _FLOOR)
        converged = late_gain <= cfg.tol
    else:
        converged = False

    alloc = Allocation(fractions=tuple(best_b / best_b.sum()))
    dist = weighted_distances(graph, alloc, root)
    if kind == "radius":
        objective = max(dist)
        average = None
    else:
        objective = sum(dist)
        average = objective / graph.n
    return SolveReport(
        kind=kind,
        objective=objective,
        allocation=alloc,
        distances=tuple(dist),
        root=root,
        average=average,
        diagnostics={
            "iterations": len(best_history),
            "converged": converged,
            "restarts": len(starts),
            "support_solves": support_solves,
        },
    )


def numeric_optimize_radius(
    graph: BudgetGraph,
    root: int,
    cfg: Optional[OracleConfig] = None,
    init: Optional[Sequence[float]] = None,
) -> SolveReport:
    """Numerically minimize the rooted radius over the budget simplex.

    Deterministic given the config seed. Not guaranteed globally tight on
    general graphs (the problem is not convex there); meant for small
    instances with cross-checked tolerances.
    """
    return _numeric_optimize(graph, root, "radius", cfg, init)


def numeric_optimize_median(
    graph: BudgetGraph,
    root: int,
    cfg: Optional[OracleConfig] = None,
    init: Optional[Sequence[float]] = None,
) -> SolveReport:
    """Numerically minimize the rooted distance sum over the budget simplex."""
    return _numeric_optimize(graph, root, "median", cfg, init)


# ---------------------------------------------------------------------------
# exact enumeration
# ---------------------------------------------------------------------------


def spanning_tree_count(graph: BudgetGraph) -> float:
    """Number of spanning trees, via the Laplacian minor determinant."""
    n = graph.n
    if n == 1:
        return 1.0
    lap = np.zeros((n, n))
    for u, v, _ in graph.edges:
        lap[u, u] += 1
        lap[v, v] += 1
        lap[u, v] -= 1
        lap[v, u] -= 1
    minor = lap[1:, 1:]
    sign, logdet = np.linalg.slogdet(minor)
    if sign <= 0:
        return 0.0
    return float(round(math.exp(logdet))) if logdet < 40 else math.exp(logdet)


def iter_spanning_trees(graph: BudgetGraph) -> Iterator[tuple[int, ...]]:
    """All spanning trees as sorted edge-id tuples, in lexicographic order.

    Classic include/exclude recursion over the (already canonical) edge
    order: an edge is included unless it closes a cycle, and excluded only
    when the remaining edges can still span.
    """
    n, m = graph.n, graph.m
    edges = graph.edges
    chosen: list[int] = []

    def spans_without(start: int) -> bool:
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        comps = n
        for e in chosen:
            u, v, _ = edges[e]
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
                comps -= 1
        for e in range(start, m):
            u, v, _ = edges[e]
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
                comps -= 1
                if comps == 1:
                    return True
        return comps == 1

    def closes_cycle(idx: int) -> bool:
        parent = {}

        def find(x):
            while parent.get(x, x) != x:
                x = parent[x]
            return x

        for e in chosen:
            a, b, _ = edges[e]
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
        u, v, _ = edges[idx]
        return find(u) == find(v)

    def rec(idx: int) -> Iterator[tuple[int, ...]]:
        if len(chosen) == n - 1:
            yield tuple(chosen)
            return
        if idx == m or len(chosen) + (m - idx) < n - 1:
            return
        if not closes_cycle(idx):
            chosen.append(idx)
            yield from rec(idx + 1)
            chosen.pop()
        if spans_without(idx + 1):
            yield from rec(idx + 1)

    yield from rec(0)


def _tree_radius_value(graph: BudgetGraph, tree_edges: Sequence[int], root: int) -> float:
    """Rooted radius of one spanning tree, valued without object overhead."""
    n = graph.n
    adj: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for e in tree_edges:
        u, v, length = graph.edges[e]
        adj[u].append((v, length))
        adj[v].append((u, length))
    sub = [0.0] * n
    parent = [-1] * n
    plen = [0.0] * n
    order = [root]
    seen = [False] * n
    seen[root] = True
    head = 0
    while head < len(order):
        x = order[head]
        head += 1
        for y, length in adj[x]:
            if not seen[y]:
                seen[y] = True
                parent[y] = x
                plen[y] = length
                order.append(y)
    sqrt = math.sqrt
    for v in reversed(order):
        p = parent[v]
        if p >= 0:
            sub[p] += (sqrt(plen[v]) + sqrt(sub[v])) ** 2
    return sub[root]


def exact_small_graph_radius(
    graph: BudgetGraph, root: int, cap: int = 1_000_000
) -> SolveReport:
    """Exact rooted budget radius by spanning-tree enumeration.

    The optimal allocation's support is a spanning tree, so the optimum is
    the best rooted tree solution over all spanning trees. Refuses (with a
    count estimate) when the tree count exceeds the cap.
    """
    count = spanning_tree_count(graph)
    if count > cap:
        raise EnumerationCapError(count, cap)
    best_edges: Optional[tuple[int, ...]] = None
    best_val = math.inf
    for tree_edges in iter_spanning_trees(graph):
        val = _tree_radius_value(graph, tree_edges, root)
        if val < best_val:
            best_val = val
            best_edges = tree_edges
    if best_edges is None:
        raise GraphError("no spanning tree found")
    sub = BudgetGraph.build(
        graph.n, [graph.edges[e] for e in best_edges], labels=graph.labels
    )
    tree_report = solve_rooted_radius(root_tree(sub, root))
    fractions = [0.0] * graph.m
    for i in range(sub.m):
        u, v, _ = sub.edges[i]
        fractions[graph.edge_index[(u, v)]] = tree_report.allocation.fractions[i]
    alloc = Allocation(fractions=tuple(fractions))
    dist = weighted_distances(graph, alloc, root)
    return SolveReport(
        kind="radius",
        objective=tree_report.objective,
        allocation=alloc,
        distances=tuple(dist),
        root=root,
        diagnostics={
            "spanning_trees": count,
            "support": sorted(
                graph.edge_key(graph.edge_index[(u, v)]) for u, v, _ in sub.edges
            ),
        },
    )
