"""Budget graph instances, allocations, and the ground-truth evaluator.

A budget graph is an undirected graph with positive edge lengths. An
allocation assigns a nonnegative fraction of a total budget to every edge;
an edge of length ``l`` holding absolute budget ``b`` acquires weight
``l / b`` (``+inf`` when ``b == 0``). Everything downstream (tree solvers,
the approximation pipeline, the oracles) is checked against the plain
shortest-path evaluator defined here.

All types are immutable after construction and all functions are pure, so
shared instances are safe to use concurrently.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from heapq import heappop, heappush
from typing import Iterable, Mapping, Optional, Sequence

INF = math.inf

# Default comparison tolerances (relative with an absolute floor). Callers
# may pass their own where a looser or tighter check is wanted.
REL_TOL = 1e-9
ABS_TOL = 1e-12


class GraphError(ValueError):
    """Malformed or invalid graph input."""


class AllocationError(ValueError):
    """Allocation violates the budget constraints or does not fit the graph."""


def close(a: float, b: float, rel: float = REL_TOL, abs_floor: float = ABS_TOL) -> bool:
    """True when a and b agree to relative tolerance with an absolute floor."""
    if a == b:
        return True
    if math.isinf(a) or math.isinf(b):
        return False
    return abs(a - b) <= max(abs_floor, rel * max(abs(a), abs(b)))


def edge_weight(length: float, b: float, total_budget: float = 1.0) -> float:
    """Weight of an edge of the given length holding fraction ``b`` of the budget.

    Zero budget cuts the edge: the weight is +inf.
    """
    if length <= 0:
        raise GraphError(f"edge length must be positive, got {length}")
    if b < 0:
        raise AllocationError(f"budget fraction must be nonnegative, got {b}")
    absolute = b * total_budget
    if absolute == 0.0:
        return INF
    return length / absolute


@dataclass(frozen=True)
class BudgetGraph:
    """Undirected connected graph with positive edge lengths.

    Vertices are dense internal ids ``0..n-1``; ``labels`` carries the
    external names. Edges are stored canonically as ``(u, v, length)`` with
    ``u < v``, sorted by ``(u, v)``.
    """

    n: int
    edges: tuple[tuple[int, int, float], ...]
    labels: tuple[str, ...]

    @staticmethod
    def build(
        n: int,
        edges: Iterable[tuple[int, int, float]],
        labels: Optional[Sequence[str]] = None,
    ) -> "BudgetGraph":
        """Validate and canonicalize an edge list over vertex ids 0..n-1."""
        if n <= 0:
            raise GraphError("graph needs at least one vertex")
        if labels is None:
            labels = tuple(str(i) for i in range(n))
        else:
            labels = tuple(str(x) for x in labels)
            if len(labels) != n:
                raise GraphError(f"expected {n} labels, got {len(labels)}")
            if len(set(labels)) != n:
                raise GraphError("duplicate vertex labels")
        canon = []
        seen = set()
        for u, v, length in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u},{v}) references an unknown vertex")
            if u == v:
                raise GraphError(f"self-loop at vertex {labels[u]}")
            length = float(length)
            if not (length > 0) or math.isinf(length):
                raise GraphError(
                    f"non-positive length {length} on edge {labels[u]}-{labels[v]}"
                )
            if u > v:
                u, v = v, u
            if (u, v) in seen:
                raise GraphError(f"duplicate edge {labels[u]}-{labels[v]}")
            seen.add((u, v))
            canon.append((u, v, length))
        canon.sort(key=lambda e: (e[0], e[1]))
        g = BudgetGraph(n=n, edges=tuple(canon), labels=labels)
        g._check_connected()
        return g

    def _check_connected(self) -> None:
        if self.n == 1:
            return
        seen = [False] * self.n
        seen[0] = True
        stack = [0]
        adj = self.adjacency
        count = 1
        while stack:
            u = stack.pop()
            for v, _ in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    count += 1
                    stack.append(v)
        if count != self.n:
            raise GraphError(f"graph is disconnected ({count} of {self.n} vertices reachable)")

    @cached_property
    def adjacency(self) -> list[list[tuple[int, int]]]:
        """Per-vertex list of (neighbor, edge index) pairs."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for i, (u, v, _) in enumerate(self.edges):
            adj[u].append((v, i))
            adj[v].append((u, i))
        return adj

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        """Canonical (u,v) with u<v -> position in ``edges``."""
        return {(u, v): i for i, (u, v, _) in enumerate(self.edges)}

    @cached_property
    def label_to_id(self) -> dict[str, int]:
        return {lab: i for i, lab in enumerate(self.labels)}

    @property
    def m(self) -> int:
        return len(self.edges)

    def total_length(self) -> float:
        return sum(e[2] for e in self.edges)

    def vertex(self, label: str) -> int:
        try:
            return self.label_to_id[label]
        except KeyError:
            raise GraphError(f"unknown vertex label {label!r}") from None

    def edge_key(self, i: int) -> str:
        """Canonical textual key for edge i: lexicographic min-max of the labels."""
        u, v, _ = self.edges[i]
        a, b = self.labels[u], self.labels[v]
        return f"{a}-{b}" if a <= b else f"{b}-{a}"

    def scale_lengths(self, factor: float) -> "BudgetGraph":
        if factor <= 0:
            raise GraphError("scale factor must be positive")
        return BudgetGraph(
            n=self.n,
            edges=tuple((u, v, length * factor) for u, v, length in self.edges),
            labels=self.labels,
        )

    def to_json_obj(self) -> dict:
        return {
            "nodes": list(self.labels),
            "edges": [
                {"u": self.labels[u], "v": self.labels[v], "len": length}
                for u, v, length in self.edges
            ],
        }


def load_graph(source: str) -> BudgetGraph:
    """Parse a graph from edge-list text or the JSON format.

    Edge list: one ``<u> <v> <length>`` per line, ``#`` starts a comment.
    JSON: ``{"nodes": [...], "edges": [{"u":..., "v":..., "len":...}]}``.
    Labels are mapped to dense ids in sorted label order.
    """
    stripped = source.lstrip()
    if stripped.startswith("{"):
        return _load_graph_json(source)
    return _load_graph_edgelist(source)


def _load_graph_edgelist(text: str) -> BudgetGraph:
    raw = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise GraphError(f"line {lineno}: expected '<u> <v> <length>', got {line!r}")
        u, v, raw_len = parts
        try:
            length = float(raw_len)
        except ValueError:
            raise GraphError(f"line {lineno}: bad length {raw_len!r}") from None
        raw.append((u, v, length))
    if not raw:
        raise GraphError("empty graph input")
    return _from_labeled_edges(raw)


def _load_graph_json(text: str) -> BudgetGraph:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError(f"bad JSON graph: {exc}") from None
    if not isinstance(obj, dict) or "edges" not in obj:
        raise GraphError("JSON graph must be an object with an 'edges' array")
    raw = []
    for e in obj["edges"]:
        try:
            raw.append((str(e["u"]), str(e["v"]), float(e["len"])))
        except (KeyError, TypeError, ValueError):
            raise GraphError(f"bad edge record {e!r}") from None
    extra_nodes = [str(x) for x in obj.get("nodes", [])]
    return _from_labeled_edges(raw, extra_nodes)


def _from_labeled_edges(
    raw: Sequence[tuple[str, str, float]], extra_nodes: Sequence[str] = ()
) -> BudgetGraph:
    names = set(extra_nodes)
    for u, v, _ in raw:
        names.add(u)
        names.add(v)
    labels = sorted(names)
    ids = {lab: i for i, lab in enumerate(labels)}
    edges = [(ids[u], ids[v], length) for u, v, length in raw]
    return BudgetGraph.build(len(labels), edges, labels)


@dataclass(frozen=True)
class Allocation:
    """Per-edge budget fractions summing to 1, plus the absolute total budget.

    The fraction vector is aligned with ``BudgetGraph.edges``. The absolute
    budget on edge i is ``total_budget * fractions[i]``.
    """

    fractions: tuple[float, ...]
    total_budget: float = 1.0

    SUM_TOL = 1e-9

    def __post_init__(self):
        if self.total_budget <= 0:
            raise AllocationError(f"total budget must be positive, got {self.total_budget}")
        cleaned = []
        for b in self.fractions:
            if b < -ABS_TOL:
                raise AllocationError(f"negative budget fraction {b}")
            cleaned.append(0.0 if b < 0 else float(b))
        # an edgeless graph has exactly one (empty) allocation
        if cleaned:
            total = sum(cleaned)
            if abs(total - 1.0) > self.SUM_TOL:
                raise AllocationError(f"fractions sum to {total}, expected 1")
        object.__setattr__(self, "fractions", tuple(cleaned))

    @staticmethod
    def uniform(m: int, total_budget: float = 1.0) -> "Allocation":
        if m <= 0:
            raise AllocationError("no edges to allocate to")
        return Allocation(fractions=(1.0 / m,) * m, total_budget=total_budget)

    @staticmethod
    def from_mapping(
        graph: BudgetGraph, fractions: Mapping[str, float], total_budget: float = 1.0
    ) -> "Allocation":
        """Build from canonical ``"<u>-<v>": fraction`` keys; absent edges get 0."""
        key_to_idx = {graph.edge_key(i): i for i in range(graph.m)}
        vec = [0.0] * graph.m
        for key, b in fractions.items():
            if key not in key_to_idx:
                raise AllocationError(f"allocation references unknown edge {key!r}")
            vec[key_to_idx[key]] = float(b)
        return Allocation(fractions=tuple(vec), total_budget=total_budget)

    def to_mapping(self, graph: BudgetGraph) -> dict[str, float]:
        if len(self.fractions) != graph.m:
            raise AllocationError("allocation does not match the graph")
        return {graph.edge_key(i): self.fractions[i] for i in range(graph.m)}

    def to_json_obj(self, graph: BudgetGraph) -> dict:
        return {"budget": self.total_budget, "fractions": self.to_mapping(graph)}

    def with_budget(self, total_budget: float) -> "Allocation":
        return Allocation(fractions=self.fractions, total_budget=total_budget)


def load_allocation(source: str) -> tuple[dict[str, float], float]:
    """Parse allocation JSON into (fractions-by-edge-key, total budget)."""
    try:
        obj = json.loads(source)
    except json.JSONDecodeError as exc:
        raise AllocationError(f"bad allocation JSON: {exc}") from None
    if not isinstance(obj, dict) or "fractions" not in obj:
        raise AllocationError("allocation JSON must contain a 'fractions' object")
    fractions = {str(k): float(v) for k, v in obj["fractions"].items()}
    budget = float(obj.get("budget", 1.0))
    return fractions, budget


def weighted_distances(graph: BudgetGraph, alloc: Allocation, src: int) -> list[float]:
    """Single-source shortest paths under the budget-implied edge weights.

    Vertices separated from ``src`` by zero-budget cuts come back as +inf.
    """
    if len(alloc.fractions) != graph.m:
        raise AllocationError(
            f"allocation has {len(alloc.fractions)} fractions, graph has {graph.m} edges"
        )
    dist = [INF] * graph.n
    dist[src] = 0.0
    weights = [
        edge_weight(length, alloc.fractions[i], alloc.total_budget)
        for i, (_, _, length) in enumerate(graph.edges)
    ]
    heap = [(0.0, src)]
    adj = graph.adjacency
    while heap:
        d, u = heappop(heap)
        if d > dist[u]:
            continue
        for v, i in adj[u]:
            w = weights[i]
            if w == INF:
                continue
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                heappush(heap, (nd, v))
    return dist


def shortest_path_tree(
    graph: BudgetGraph, weights: Sequence[float], src: int
) -> tuple[list[float], list[int]]:
    """Dijkstra with explicit edge weights; returns (distances, predecessor edge ids).

    Ties are broken deterministically toward the smaller predecessor vertex.
    ``pred[v]`` is the edge index leading into v, -1 for src and unreachable
    vertices.
    """
    dist = [INF] * graph.n
    pred = [-1] * graph.n
    dist[src] = 0.0
    heap = [(0.0, src)]
    adj = graph.adjacency
    while heap:
        d, u = heappop(heap)
        if d > dist[u]:
            continue
        for v, i in adj[u]:
            w = weights[i]
            if w == INF:
                continue
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                pred[v] = i
                heappush(heap, (nd, v))
    return dist, pred


def evaluate_radius(graph: BudgetGraph, alloc: Allocation, root: int) -> float:
    """Maximum weighted distance from the root (0 for a single vertex)."""
    dist = weighted_distances(graph, alloc, root)
    if graph.n == 1:
        return 0.0
    return max(dist)


def evaluate_median(graph: BudgetGraph, alloc: Allocation, root: int) -> tuple[float, float]:
    """(sum, average) of weighted distances from the root.

    The sum is the canonical objective; the average is sum / n. They share
    an argmin, so both are reported rather than choosing one.
    """
    dist = weighted_distances(graph, alloc, root)
    total = 0.0
    for d in dist:
        total += d
    return total, total / graph.n


@dataclass(frozen=True)
class SolveReport:
    """Result of a solver run: objective value plus its certificate data.

    ``kind`` is "radius" or "median"; ``objective`` is the max (radius) or
    sum (median) of ``distances``. ``average`` is filled for medians.
    ``diagnostics`` carries optimizer metadata (iterations, convergence).
    """

    kind: str
    objective: float
    allocation: Allocation
    distances: tuple[float, ...]
    root: int
    lower_bound: Optional[float] = None
    ratio_certificate: Optional[float] = None
    average: Optional[float] = None
    diagnostics: Optional[dict] = None

    def recomputed_objective(self) -> float:
        if self.kind == "radius":
            return max(self.distances) if len(self.distances) > 1 else 0.0
        return sum(self.distances)

    def check(self, rel: float = REL_TOL) -> None:
        """Raise if the stored objective disagrees with the stored distances."""
        recomputed = self.recomputed_objective()
        if not close(self.objective, recomputed, rel=rel):
            raise AssertionError(
                f"objective {self.objective} != recomputed {recomputed}"
            )

    def to_json_obj(self, graph: BudgetGraph, budget: float = 1.0) -> dict:
        """Serialize with objectives and budgets rescaled to the given total budget."""
        scale = 1.0 / budget
        obj = {
            "kind": self.kind,
            "objective": self.objective * scale,
            "root": graph.labels[self.root],
            "budget": budget,
            "allocation": self.allocation.with_budget(budget).to_json_obj(graph),
            "distances": {
                graph.labels[v]: self.distances[v] * scale for v in range(graph.n)
            },
        }
        if self.kind == "median":
            obj["average"] = (self.average if self.average is not None else
                              self.objective / graph.n) * scale
        if self.lower_bound is not None:
            obj["lower_bound"] = self.lower_bound * scale
        if self.ratio_certificate is not None:
            obj["ratio_certificate"] = self.ratio_certificate
        if self.diagnostics is not None:
            obj["diagnostics"] = self.diagnostics
        return obj


@dataclass(frozen=True)
class RootedTree:
    """A budget graph that is a tree, with a designated root.

    ``order`` is a breadth-first vertex order starting at the root, so a
    forward scan visits parents before children and a reverse scan is a
    valid bottom-up schedule. ``parent_edge[v]`` indexes ``graph.edges``.
    """

    graph: BudgetGraph
    root: int
    parent: tuple[int, ...]
    parent_len: tuple[float, ...]
    parent_edge: tuple[int, ...]
    order: tuple[int, ...]

    @property
    def n(self) -> int:
        return self.graph.n

    @cached_property
    def children(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.n)]
        for v in self.order:
            p = self.parent[v]
            if p >= 0:
                out[p].append(v)
        return out

    @cached_property
    def subtree_size(self) -> list[int]:
        size = [1] * self.n
        parent = self.parent
        for v in reversed(self.order):
            p = parent[v]
            if p >= 0:
                size[p] += size[v]
        return size

    @cached_property
    def depth(self) -> list[int]:
        d = [0] * self.n
        parent = self.parent
        for v in self.order:
            if parent[v] >= 0:
                d[v] = d[parent[v]] + 1
        return d

    def is_leaf(self, v: int) -> bool:
        return not self.children[v]


def root_tree(graph: BudgetGraph, root: int) -> RootedTree:
    """Orient a tree-shaped budget graph away from the root."""
    if graph.m != graph.n - 1:
        raise GraphError(
            f"not a tree: {graph.m} edges for {graph.n} vertices"
        )
    if not (0 <= root < graph.n):
        raise GraphError(f"root {root} out of range")
    parent = [-1] * graph.n
    parent_len = [0.0] * graph.n
    parent_edge = [-1] * graph.n
    order = [root]
    seen = [False] * graph.n
    seen[root] = True
    adj = graph.adjacency
    edges = graph.edges
    head = 0
    while head < len(order):
        u = order[head]
        head += 1
        for v, i in adj[u]:
            if not seen[v]:
                seen[v] = True
                parent[v] = u
                parent_len[v] = edges[i][2]
                parent_edge[v] = i
                order.append(v)
    # connectivity was validated at graph construction; this is a safety net
    if len(order) != graph.n:
        raise GraphError("tree traversal did not reach every vertex")
    return RootedTree(
        graph=graph,
        root=root,
        parent=tuple(parent),
        parent_len=tuple(parent_len),
        parent_edge=tuple(parent_edge),
        order=tuple(order),
    )
