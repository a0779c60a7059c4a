"""Set-cover reduction instances for the rooted budget radius.

The generator embodies the hardness construction: a root, one node per
universe element, and per input set one gadget node for every nonempty
subset of it (seven nodes for a full 3-element set). A gadget node hangs
off the root by a unit edge and reaches its subset's elements by edges
whose length depends on the subset size: 1 for singletons, (sqrt(6)-1)^2/2
for pairs, (sqrt(8)-1)^2/3 for triples. Those constants make a gadget star
that covers c elements at radius 1 cost exactly 4, 6, or 8 budget units,
so with covered elements paying 2 each and used sets one extra overhead
unit, the cheapest radius-1 budget equals 7|S| + 2|E| + (number of used
sets): minimizing budget is minimizing the set cover.

``cover_to_allocation`` builds that witness allocation explicitly, which
certifies the upper-bound direction and gives the oracles a concrete
optimum to fail to beat.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .core import Allocation, BudgetGraph

X = 1.0
Y = (math.sqrt(6.0) - 1.0) ** 2 / 2.0
Z = (math.sqrt(8.0) - 1.0) ** 2 / 3.0

# spoke length by number of elements a gadget node serves
SPOKE_LENGTH = {1: X, 2: Y, 3: Z}


class ReductionError(ValueError):
    """Invalid set-cover instance or cover assignment."""


def star_optimal_radius(x: float, k: int, total_budget: float = 1.0) -> tuple[float, float, float]:
    """Optimal budget radius of a two-level star.

    The star has a unit-length handle from the root to the hub and k spokes
    of length x. Equalizing the root-to-leaf weights gives the closed form
    radius (1 + sqrt(x*k))^2 / B with the handle holding a
    1 / (1 + sqrt(x*k)) fraction of the budget and each spoke an equal
    share of the rest. Returns (radius, handle fraction, per-spoke fraction).
    """
    if x <= 0:
        raise ReductionError(f"spoke length must be positive, got {x}")
    if k < 1:
        raise ReductionError(f"need at least one spoke, got {k}")
    if total_budget <= 0:
        raise ReductionError(f"budget must be positive, got {total_budget}")
    s = math.sqrt(x * k)
    radius = (1.0 + s) ** 2 / total_budget
    handle = 1.0 / (1.0 + s)
    spoke = s / (k * (1.0 + s))
    return radius, handle, spoke


@dataclass(frozen=True)
class SetCoverInstance:
    """Sets of size at most 3 over a universe of integer elements."""

    universe: tuple[int, ...]
    sets: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.universe:
            raise ReductionError("empty universe")
        if not self.sets:
            raise ReductionError("no sets")
        if len(set(self.universe)) != len(self.universe):
            raise ReductionError("duplicate universe elements")
        elems = set(self.universe)
        covered = set()
        norm = []
        for j, s in enumerate(self.sets):
            members = tuple(sorted(set(s)))
            if not 1 <= len(members) <= 3:
                raise ReductionError(f"set {j} must have 1..3 distinct elements, got {s!r}")
            if not set(members) <= elems:
                raise ReductionError(f"set {j} contains unknown elements {set(members) - elems}")
            covered |= set(members)
            norm.append(members)
        missing = elems - covered
        if missing:
            raise ReductionError(f"elements {sorted(missing)} appear in no set")
        object.__setattr__(self, "universe", tuple(sorted(set(self.universe))))
        object.__setattr__(self, "sets", tuple(norm))

    @staticmethod
    def from_json(source: str) -> "SetCoverInstance":
        try:
            obj = json.loads(source)
            return SetCoverInstance(
                universe=tuple(int(e) for e in obj["universe"]),
                sets=tuple(tuple(int(e) for e in s) for s in obj["sets"]),
            )
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ReductionError):
                raise
            raise ReductionError(f"bad set-cover JSON: {exc}") from None

    def to_json_obj(self) -> dict:
        return {"universe": list(self.universe), "sets": [list(s) for s in self.sets]}


def _subsets(members: Sequence[int]) -> list[tuple[int, ...]]:
    """Nonempty subsets, ordered by size then lexicographically."""
    out = []
    k = len(members)
    for mask in range(1, 1 << k):
        out.append(tuple(members[i] for i in range(k) if mask & (1 << i)))
    out.sort(key=lambda s: (len(s), s))
    return out


def _gadget_label(set_idx: int, subset: Sequence[int]) -> str:
    return f"s{set_idx}_" + "+".join(str(e) for e in subset)


@dataclass(frozen=True)
class ReductionOutput:
    """The generated instance plus enough structure to build witnesses."""

    instance: SetCoverInstance
    graph: BudgetGraph
    root: int
    node_roles: dict[str, dict]
    constants: dict[str, float]

    def gadget_vertex(self, set_idx: int, subset: Sequence[int]) -> int:
        return self.graph.vertex(_gadget_label(set_idx, tuple(sorted(subset))))

    def element_vertex(self, element: int) -> int:
        return self.graph.vertex(f"e{element}")


def reduce_setcover(instance: SetCoverInstance) -> ReductionOutput:
    """Build the reduction graph with a stable, reproducible labeling.

    Full 3-element sets contribute 7 gadget nodes and 19 edges each; smaller
    sets get the construction restricted to their existing nonempty subsets
    (2^size - 1 gadget nodes).
    """
    labels = ["r"]
    labels += [f"e{e}" for e in instance.universe]
    roles: dict[str, dict] = {"r": {"role": "root"}}
    for e in instance.universe:
        roles[f"e{e}"] = {"role": "element", "element": e}
    edges_by_label: list[tuple[str, str, float]] = []
    for j, members in enumerate(instance.sets):
        for subset in _subsets(members):
            label = _gadget_label(j, subset)
            labels.append(label)
            roles[label] = {"role": "set", "set": j, "covers": list(subset)}
            edges_by_label.append(("r", label, 1.0))
            spoke = SPOKE_LENGTH[len(subset)]
            for e in subset:
                edges_by_label.append((label, f"e{e}", spoke))
    ids = {lab: i for i, lab in enumerate(labels)}
    edges = [(ids[u], ids[v], length) for u, v, length in edges_by_label]
    graph = BudgetGraph.build(len(labels), edges, labels=labels)
    return ReductionOutput(
        instance=instance,
        graph=graph,
        root=ids["r"],
        node_roles=roles,
        constants={"x": X, "y": Y, "z": Z},
    )


def load_cover(source: str) -> dict[int, tuple[int, ...]]:
    """Parse cover JSON: {"cover": {"<set index>": [elements...]}}."""
    try:
        obj = json.loads(source)
        raw = obj["cover"] if isinstance(obj, dict) and "cover" in obj else obj
        return {int(j): tuple(int(e) for e in elems) for j, elems in raw.items()}
    except (json.JSONDecodeError, AttributeError, KeyError, TypeError, ValueError):
        raise ReductionError("bad cover JSON; expected {\"cover\": {\"<set>\": [elements]}}") from None


def cover_to_allocation(
    reduction: ReductionOutput, cover: Mapping[int, Sequence[int]]
) -> tuple[Allocation, float]:
    """Witness allocation reaching radius exactly 1, and its budget cost.

    ``cover`` assigns every universe element to exactly one set that is used
    to cover it. Each used set routes its covered elements through the one
    gadget node matching that exact subset, allocated as an optimal star;
    every other gadget node gets one budget unit on its root edge. The cost
    comes out to 7|S| + 2|E| + (number of used sets) when all sets have
    three elements.
    """
    instance = reduction.instance
    assigned: dict[int, int] = {}
    for j, elems in cover.items():
        if not 0 <= j < len(instance.sets):
            raise ReductionError(f"cover references unknown set {j}")
        members = set(instance.sets[j])
        for e in elems:
            if e not in members:
                raise ReductionError(f"set {j} does not contain element {e}")
            if e in assigned:
                raise ReductionError(f"element {e} covered twice (sets {assigned[e]} and {j})")
            assigned[e] = j
    uncovered = set(instance.universe) - set(assigned)
    if uncovered:
        raise ReductionError(f"elements {sorted(uncovered)} left uncovered")

    graph = reduction.graph
    budgets = [0.0] * graph.m

    def edge_id(a: int, b: int) -> int:
        return graph.edge_index[(a, b) if a < b else (b, a)]

    root = reduction.root
    total = 0.0
    for j, members in enumerate(instance.sets):
        used_subset = tuple(sorted(e for e in assigned if assigned[e] == j))
        for subset in _subsets(members):
            gadget = reduction.gadget_vertex(j, subset)
            if subset == used_subset:
                c = len(subset)
                spoke_len = SPOKE_LENGTH[c]
                s = math.sqrt(spoke_len * c)
                star_budget = (1.0 + s) ** 2
                budgets[edge_id(root, gadget)] = 1.0 + s
                per_spoke = (1.0 + s) * s / c
                for e in subset:
                    budgets[edge_id(gadget, reduction.element_vertex(e))] = per_spoke
                total += star_budget
            else:
                budgets[edge_id(root, gadget)] = 1.0
                total += 1.0
    allocation = Allocation(
        fractions=tuple(b / total for b in budgets), total_budget=total
    )
    return allocation, total


def witness_cost_formula(instance: SetCoverInstance, used_sets: int) -> float:
    """Closed-form witness cost for instances whose sets all have 3 elements."""
    if any(len(s) != 3 for s in instance.sets):
        raise ReductionError("closed-form cost only applies to full 3-element sets")
    return 7.0 * len(instance.sets) + 2.0 * len(instance.universe) + used_sets
