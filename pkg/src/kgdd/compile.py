"""Compiling graph structure into decision diagrams.

Two modes.  Combination diagrams lay out a schema of layers (each a set
of candidate entities) and accept exactly the assignments whose
consecutive choices are adjacent in the graph, optionally pinned to a
root and end anchor.  Activity diagrams give every entity of a directed
acyclic pathway a binary active/inactive variable and accept an
assignment iff the active vertices contain a directed source-to-sink
path.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Sequence

from .errors import (
    AnchorNotInLayer,
    EmptyLayerDomain,
    NotADag,
    OrderIncomplete,
)
from .graph import EntityId, Graph
from .mdd import FALSE, TRUE, Handle, Mdd, MddSpace, VariableSpec

ADJ_CONSECUTIVE = "consecutive"
ADJ_ALL_PAIRS = "all-pairs"


@dataclass(frozen=True, slots=True)
class LayerSpec:
    """One schema layer: a name and its candidate entities, in order."""

    name: str
    entities: tuple[EntityId, ...]

    @classmethod
    def from_namespace(cls, graph: Graph, ns: int, name: str | None = None) -> "LayerSpec":
        namespace = graph.namespace(ns)
        return cls(name=name or namespace.name, entities=tuple(sorted(namespace.members)))


@dataclass(frozen=True, slots=True)
class CompilationSpec:
    layers: tuple[LayerSpec, ...]
    root_anchor: EntityId | None = None
    end_anchor: EntityId | None = None
    depth_limit: int | None = None
    adjacency: str = ADJ_CONSECUTIVE

    def __post_init__(self):
        if self.adjacency not in (ADJ_CONSECUTIVE, ADJ_ALL_PAIRS):
            raise ValueError(f"unknown adjacency mode: {self.adjacency!r}")

    @classmethod
    def cycled(cls, template: Sequence[LayerSpec], *,
               depth_limit: int | None = None,
               root_anchor: EntityId | None = None,
               end_anchor: EntityId | None = None,
               adjacency: str = ADJ_CONSECUTIVE) -> "CompilationSpec":
        """Unroll a repeating layer template into a finite schema.

        Exactly one of depth_limit and end_anchor must be given: a depth
        limit unrolls the template cyclically to that many layers, an end
        anchor (together with a root anchor) unrolls one extra cycle up to
        the first template layer containing the anchor.
        """
        template = tuple(template)
        if not template:
            raise EmptyLayerDomain("cycled schema needs a nonempty template")
        if (depth_limit is None) == (end_anchor is None):
            raise ValueError("cycled schema needs exactly one of depth_limit, end_anchor")
        if depth_limit is not None:
            if depth_limit < 1:
                raise ValueError("depth_limit must be positive")
            layers = tuple(
                LayerSpec(name=f"{template[i % len(template)].name}#{i}",
                          entities=template[i % len(template)].entities)
                for i in range(depth_limit)
            )
            return cls(layers=layers, root_anchor=root_anchor, adjacency=adjacency)
        if root_anchor is None:
            raise ValueError("an end anchor requires a root anchor as well")
        stop = next((i for i, layer in enumerate(template)
                     if end_anchor in layer.entities), None)
        if stop is None:
            raise AnchorNotInLayer(
                f"end anchor {end_anchor} appears in no template layer", param="end_anchor")
        raw = list(template) + list(template[: stop + 1])
        layers = tuple(LayerSpec(name=f"{layer.name}#{i}", entities=layer.entities)
                       for i, layer in enumerate(raw))
        return cls(layers=layers, root_anchor=root_anchor,
                   end_anchor=end_anchor, adjacency=adjacency)


def compile_combinations(graph: Graph, spec: CompilationSpec) -> Mdd:
    """Diagram of all schema assignments consistent with graph adjacency.

    TRUE assignments pick one entity per layer such that each consecutive
    pair (or every pair, in all-pairs mode) is connected in the graph and
    the anchors, when set, are matched.
    """
    layers = spec.layers
    if spec.depth_limit is not None:
        layers = layers[: spec.depth_limit]
    if not layers:
        raise EmptyLayerDomain("schema has no layers")
    for layer in layers:
        if not layer.entities:
            raise EmptyLayerDomain(f"layer {layer.name!r} has no entities", param=layer.name)
        for e in layer.entities:
            graph.entity(e)
    if spec.root_anchor is not None and spec.root_anchor not in layers[0].entities:
        raise AnchorNotInLayer(
            f"root anchor {spec.root_anchor} not in layer {layers[0].name!r}",
            param="root_anchor")
    if spec.end_anchor is not None and spec.end_anchor not in layers[-1].entities:
        raise AnchorNotInLayer(
            f"end anchor {spec.end_anchor} not in layer {layers[-1].name!r}",
            param="end_anchor")

    space = MddSpace([VariableSpec(name=layer.name, values=layer.entities)
                      for layer in layers])
    neighbor_cache: dict[EntityId, set[EntityId]] = {}

    def adjacent(a: EntityId, b: EntityId) -> bool:
        near = neighbor_cache.get(a)
        if near is None:
            near = graph.neighbors(a)
            neighbor_cache[a] = near
        return b in near

    k = len(layers)

    if spec.adjacency == ADJ_CONSECUTIVE:
        memo: dict[tuple[int, EntityId | None], Handle] = {}

        def build(i: int, prev: EntityId | None) -> Handle:
            if i == k:
                return TRUE
            key = (i, prev)
            found = memo.get(key)
            if found is not None:
                return found
            children = []
            for v in layers[i].entities:
                if i == 0 and spec.root_anchor is not None and v != spec.root_anchor:
                    children.append(FALSE)
                elif i == k - 1 and spec.end_anchor is not None and v != spec.end_anchor:
                    children.append(FALSE)
                elif prev is not None and not adjacent(prev, v):
                    children.append(FALSE)
                else:
                    children.append(build(i + 1, v))
            result = space.make_node(i, children)
            memo[key] = result
            return result

        return space.mdd(build(0, None))

    # all-pairs mode: every chosen pair must be adjacent, so the state is
    # the whole prefix; fine for the small schemas this mode is meant for
    memo_ap: dict[tuple[int, tuple[EntityId, ...]], Handle] = {}

    def build_ap(i: int, chosen: tuple[EntityId, ...]) -> Handle:
        if i == k:
            return TRUE
        key = (i, chosen)
        found = memo_ap.get(key)
        if found is not None:
            return found
        children = []
        for v in layers[i].entities:
            if i == 0 and spec.root_anchor is not None and v != spec.root_anchor:
                children.append(FALSE)
            elif i == k - 1 and spec.end_anchor is not None and v != spec.end_anchor:
                children.append(FALSE)
            elif any(not adjacent(prev, v) for prev in chosen):
                children.append(FALSE)
            else:
                children.append(build_ap(i + 1, chosen + (v,)))
        result = space.make_node(i, children)
        memo_ap[key] = result
        return result

    return space.mdd(build_ap(0, ()))


INACTIVE = "inactive"
ACTIVE = "active"


def topological_order(pathway: Graph) -> list[EntityId]:
    """Deterministic topological order of a directed pathway graph."""
    indegree = {e: 0 for e in pathway.entity_ids()}
    for rel in pathway.iter_relations():
        if rel.source != rel.target:
            indegree[rel.target] += 1
    heap = [e for e, d in indegree.items() if d == 0]
    heapq.heapify(heap)
    order: list[EntityId] = []
    while heap:
        node = heapq.heappop(heap)
        order.append(node)
        for rid in pathway.out_relations(node):
            target = pathway.relation(rid).target
            if target == node:
                continue
            indegree[target] -= 1
            if indegree[target] == 0:
                heapq.heappush(heap, target)
    if len(order) != pathway.entity_count:
        cycle = sorted(e for e in indegree if indegree[e] > 0)
        raise NotADag("pathway contains a directed cycle", cycle=cycle)
    return order


def directed_paths(pathway: Graph, source: EntityId, sink: EntityId) -> list[list[EntityId]]:
    """All directed source-to-sink vertex sequences, DFS order."""
    paths: list[list[EntityId]] = []
    trail = [source]

    def walk(node: EntityId) -> None:
        if node == sink:
            paths.append(list(trail))
            return
        targets = sorted({pathway.relation(rid).target
                          for rid in pathway.out_relations(node)})
        for nxt in targets:
            if nxt in trail:
                continue
            trail.append(nxt)
            walk(nxt)
            trail.pop()

    walk(source)
    return paths


def compile_activity(pathway: Graph, source: EntityId, sink: EntityId,
                     order: Sequence[EntityId] | None = None) -> Mdd:
    """Diagram over active/inactive variables, TRUE iff the active
    vertices contain a directed source-to-sink path."""
    pathway.entity(source)
    pathway.entity(sink)
    for rel in pathway.iter_relations():
        if rel.source == rel.target:
            raise NotADag(f"pathway has a self-loop at entity {rel.source}",
                          cycle=[rel.source])
    default_order = topological_order(pathway)
    if order is None:
        order = default_order
    else:
        order = list(order)
        if sorted(order) != sorted(default_order):
            raise OrderIncomplete(
                "order must list every pathway entity exactly once", param="order")

    labels: dict[EntityId, str] = {}
    seen: dict[str, int] = {}
    for e in order:
        label = pathway.entity(e).preferred_label
        if label in seen:
            seen[label] += 1
            label = f"{label}#{seen[label]}"
        else:
            seen[label] = 0
        labels[e] = label
    space = MddSpace([
        VariableSpec(name=labels[e], values=(INACTIVE, ACTIVE), entity=e)
        for e in order
    ])
    position = {e: i for i, e in enumerate(order)}

    root = FALSE
    for path in directed_paths(pathway, source, sink):
        assignment: list[str | None] = [None] * len(order)
        for e in path:
            assignment[position[e]] = ACTIVE
        root = space.apply("union", root, space.cube(assignment))
    return space.mdd(root)
