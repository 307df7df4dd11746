"""Hypothesis validation between two entities.

Three views of the same question "how does a influence b": the shortest
connecting path, the knowledge stream (all simple paths up to a hop
bound), and a decision diagram whose satisfying assignments are exactly
the stream's paths.  Traversal ignores relation direction and can be
filtered by relation kind.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .graph import EntityId, Graph, RelationId
from .mdd import FALSE, TRUE, Handle, Mdd, MddSpace, VariableSpec

SKIP = "skip"

DEFAULT_MAX_LENGTH = 4


@dataclass(frozen=True, slots=True)
class PathQuery:
    source: EntityId
    target: EntityId
    max_length: int = DEFAULT_MAX_LENGTH
    allowed_kinds: frozenset[str] | None = None
    max_paths: int | None = None

    def __post_init__(self):
        if self.max_length < 1:
            raise ValueError("max_length must be at least 1")
        if self.source == self.target:
            raise ValueError("source and target must differ")
        if self.allowed_kinds is not None:
            object.__setattr__(self, "allowed_kinds", frozenset(self.allowed_kinds))


@dataclass(frozen=True, slots=True)
class Path:
    """Alternating entity/relation sequence; len(relations) hops."""

    entities: tuple[EntityId, ...]
    relations: tuple[RelationId, ...]

    @property
    def length(self) -> int:
        return len(self.relations)


@dataclass(slots=True)
class KnowledgeStream:
    query: PathQuery
    paths: list[Path] = field(default_factory=list)
    truncated: bool = False

    def __len__(self) -> int:
        return len(self.paths)


class _Adjacency:
    """Kind-filtered undirected adjacency with per-vertex lazy caching."""

    def __init__(self, graph: Graph, allowed_kinds: frozenset[str] | None):
        self.graph = graph
        self.allowed = allowed_kinds
        self._cache: dict[EntityId, tuple[EntityId, ...]] = {}

    def neighbors(self, v: EntityId) -> tuple[EntityId, ...]:
        found = self._cache.get(v)
        if found is not None:
            return found
        out: set[EntityId] = set()
        for rid in self.graph.incident(v):
            rel = self.graph.relation(rid)
            if self.allowed is not None and rel.kind not in self.allowed:
                continue
            other = rel.other(v)
            if other != v:
                out.add(other)
        result = tuple(sorted(out))
        self._cache[v] = result
        return result

    def relation_between(self, u: EntityId, v: EntityId) -> RelationId:
        """Smallest allowed relation id joining u and v (either direction)."""
        best: RelationId | None = None
        for rid in self.graph.incident(u):
            rel = self.graph.relation(rid)
            if self.allowed is not None and rel.kind not in self.allowed:
                continue
            if rel.other(u) == v and (best is None or rid < best):
                best = rid
        if best is None:
            raise ValueError(f"no allowed relation between {u} and {v}")
        return best

    def distances_from(self, start: EntityId) -> dict[EntityId, int]:
        dist = {start: 0}
        queue = deque([start])
        while queue:
            node = queue.popleft()
            for nxt in self.neighbors(node):
                if nxt not in dist:
                    dist[nxt] = dist[node] + 1
                    queue.append(nxt)
        return dist


def _path_from_entities(adj: _Adjacency, entities: list[EntityId]) -> Path:
    relations = tuple(adj.relation_between(entities[i], entities[i + 1])
                      for i in range(len(entities) - 1))
    return Path(entities=tuple(entities), relations=relations)


def shortest_path(graph: Graph, query: PathQuery) -> Path | None:
    """Minimum-hop path, lexicographically smallest entity sequence among
    ties; None when the endpoints are not connected (a result, not an
    error)."""
    graph.entity(query.source)
    graph.entity(query.target)
    adj = _Adjacency(graph, query.allowed_kinds)
    dist = adj.distances_from(query.target)
    if query.source not in dist:
        return None
    entities = [query.source]
    node = query.source
    while node != query.target:
        remaining = dist[node]
        node = next(n for n in adj.neighbors(node) if dist.get(n) == remaining - 1)
        entities.append(node)
    return _path_from_entities(adj, entities)


def knowledge_stream(graph: Graph, query: PathQuery) -> KnowledgeStream:
    """All simple paths from source to target within the hop bound.

    Paths are distinct by entity sequence (parallel relations collapse to
    the smallest allowed relation id) and come out in lexicographic order
    of that sequence.  max_paths truncates and sets the flag.
    """
    graph.entity(query.source)
    graph.entity(query.target)
    adj = _Adjacency(graph, query.allowed_kinds)
    stream = KnowledgeStream(query=query)
    trail = [query.source]
    on_trail = {query.source}

    def walk() -> bool:
        # returns False when the path budget is exhausted
        node = trail[-1]
        for nxt in adj.neighbors(node):
            if nxt == query.target:
                if query.max_paths is not None and len(stream.paths) >= query.max_paths:
                    stream.truncated = True
                    return False
                stream.paths.append(_path_from_entities(adj, trail + [nxt]))
                continue
            if len(trail) >= query.max_length or nxt in on_trail:
                continue
            trail.append(nxt)
            on_trail.add(nxt)
            alive = walk()
            trail.pop()
            on_trail.discard(nxt)
            if not alive:
                return False
        return True

    walk()
    return stream


def validate_influence(graph: Graph, query: PathQuery) -> Mdd:
    """Decision diagram whose TRUE assignments are the knowledge stream.

    One variable per intermediate hop slot; each domain holds the
    entities that can sit at that position of some path within the bound,
    plus a trailing skip value so shorter paths share the variable order.
    Choosing skip ends the path (the remaining slots must skip too).
    """
    graph.entity(query.source)
    graph.entity(query.target)
    adj = _Adjacency(graph, query.allowed_kinds)
    dist_a = adj.distances_from(query.source)
    dist_b = adj.distances_from(query.target)
    slots = query.max_length - 1
    endpoints = {query.source, query.target}
    domains: list[tuple] = []
    for idx in range(slots):
        position = idx + 1
        candidates = sorted(
            v for v in dist_a
            if v not in endpoints
            and dist_a[v] <= position
            and dist_b.get(v, position + query.max_length) <= query.max_length - position
        )
        domains.append(tuple(candidates) + (SKIP,))
    space = MddSpace([VariableSpec(name=f"hop{idx + 1}", values=domain)
                      for idx, domain in enumerate(domains)])

    neighbor_sets = {v: set(adj.neighbors(v)) for v in dist_a}
    target_adjacent = neighbor_sets.get(query.target, set())

    skip_chain: list[Handle] = [TRUE] * (slots + 1)
    for idx in range(slots - 1, -1, -1):
        children = [FALSE] * len(domains[idx])
        children[-1] = skip_chain[idx + 1]
        skip_chain[idx] = space.make_node(idx, children)

    memo: dict[tuple[int, EntityId, frozenset[EntityId]], Handle] = {}

    def build(idx: int, prev: EntityId, used: frozenset[EntityId]) -> Handle:
        if idx == slots:
            return TRUE if prev in target_adjacent else FALSE
        key = (idx, prev, used)
        found = memo.get(key)
        if found is not None:
            return found
        children = []
        near = neighbor_sets.get(prev, set())
        for value in domains[idx]:
            if value == SKIP:
                children.append(skip_chain[idx + 1] if prev in target_adjacent else FALSE)
            elif value in used or value not in near:
                children.append(FALSE)
            else:
                children.append(build(idx + 1, value, used | {value}))
        result = space.make_node(idx, children)
        memo[key] = result
        return result

    if slots == 0:
        root = TRUE if query.source in target_adjacent else FALSE
    else:
        root = build(0, query.source, frozenset())
    return space.mdd(root)


def assignment_to_entities(query: PathQuery, assignment: Iterable) -> tuple[EntityId, ...]:
    """Entity sequence of one satisfying influence-diagram assignment."""
    middle = []
    for value in assignment:
        if value == SKIP:
            break
        middle.append(value)
    return (query.source, *middle, query.target)


# ----------------------------------------------------------------------
# exports

def stream_to_dict(graph: Graph, stream: KnowledgeStream) -> dict:
    paths = []
    for path in stream.paths:
        paths.append({
            "entities": list(path.entities),
            "labels": [graph.entity(e).preferred_label for e in path.entities],
            "relations": list(path.relations),
            "kinds": [graph.relation(r).kind for r in path.relations],
            "length": path.length,
        })
    return {
        "source": stream.query.source,
        "target": stream.query.target,
        "max_length": stream.query.max_length,
        "path_count": len(stream.paths),
        "truncated": stream.truncated,
        "paths": paths,
    }


def stream_to_dot(graph: Graph, stream: KnowledgeStream) -> str:
    """Stream paths overlaid on the subgraph they induce."""
    vertices: set[EntityId] = {stream.query.source, stream.query.target}
    for path in stream.paths:
        vertices.update(path.entities)
    on_path: set[RelationId] = set()
    for path in stream.paths:
        on_path.update(path.relations)
    sub = graph.induced_subgraph(vertices)
    out = ["digraph stream {", "  rankdir=LR;", "  node [shape=box];"]
    for eid in sub.entity_ids():
        label = sub.entity(eid).preferred_label.replace('"', '\\"')
        shape = ' penwidth=2' if eid in (stream.query.source, stream.query.target) else ""
        out.append(f'  n{eid} [label="{label}"{shape}];')
    for rel in sub.iter_relations():
        style = "" if rel.id in on_path else " [color=gray, style=dashed]"
        if rel.id in on_path:
            style = f' [label="{rel.kind}"]'
        out.append(f"  n{rel.source} -> n{rel.target}{style};")
    out.append("}")
    return "\n".join(out) + "\n"
