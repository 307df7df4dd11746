"""In-memory property-graph store.

Entities live in exactly one namespace (a terminology, ontology or plain
entity class), relations are directed and typed, and every relation keeps
a provenance record saying how it entered the graph.  The store is
append-only: ids are dense integers handed out in insertion order and are
never reused.  All query methods are pure reads; the intended concurrency
contract is many readers or a single writer per graph instance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator

from .errors import (
    DuplicateLabelInNamespace,
    UnknownEntity,
    UnknownNamespace,
    UnknownRelation,
)

EntityId = int
RelationId = int
NamespaceId = int

# Relation kinds treated as undirected when checking whether two entities
# are already connected (ensure_relation, cross-context inference).
DEFAULT_SYMMETRIC_KINDS = frozenset({"sameAffiliation", "isCoAuthor", "associative"})


class NamespaceKind(str, Enum):
    TERMINOLOGY = "terminology"
    ONTOLOGY = "ontology"
    ENTITY_CLASS = "entity-class"


class Origin(str, Enum):
    INGESTED = "ingested"
    DERIVED_CROSS_CONTEXT = "derived-cross-context"
    DERIVED_META = "derived-meta"


@dataclass(frozen=True, slots=True)
class Provenance:
    """How a relation entered the graph."""

    origin: Origin = Origin.INGESTED
    source_document: EntityId | None = None
    derived_from: NamespaceId | None = None
    note: str = ""

    def __post_init__(self):
        if self.origin is Origin.DERIVED_CROSS_CONTEXT and self.derived_from is None:
            raise ValueError("cross-context provenance requires derived_from")


INGESTED = Provenance()


@dataclass(slots=True)
class Entity:
    id: EntityId
    namespace: NamespaceId
    preferred_label: str
    synonyms: list[str] = field(default_factory=list)
    meta: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True, slots=True)
class Relation:
    id: RelationId
    source: EntityId
    target: EntityId
    kind: str
    provenance: Provenance = INGESTED

    def other(self, e: EntityId) -> EntityId:
        return self.target if e == self.source else self.source


@dataclass(slots=True)
class Namespace:
    id: NamespaceId
    name: str
    kind: NamespaceKind = NamespaceKind.TERMINOLOGY
    members: set[EntityId] = field(default_factory=set)


class Graph:
    """Append-only multigraph of entities and typed relations.

    ``duplicate_policy`` controls what add_entity does when the label is
    already indexed in the namespace: ``"merge"`` returns the existing
    entity id (synonyms and meta are unioned in), ``"reject"`` raises
    DuplicateLabelInNamespace.
    """

    def __init__(self, *, duplicate_policy: str = "merge",
                 symmetric_kinds: Iterable[str] = DEFAULT_SYMMETRIC_KINDS):
        if duplicate_policy not in ("merge", "reject"):
            raise ValueError(f"unknown duplicate policy: {duplicate_policy!r}")
        self.duplicate_policy = duplicate_policy
        self.symmetric_kinds = set(symmetric_kinds)
        self._namespaces: dict[NamespaceId, Namespace] = {}
        self._ns_by_name: dict[str, NamespaceId] = {}
        self._entities: dict[EntityId, Entity] = {}
        self._relations: dict[RelationId, Relation] = {}
        self._out: dict[EntityId, list[RelationId]] = {}
        self._in: dict[EntityId, list[RelationId]] = {}
        # (namespace, label) -> entity id, covering preferred labels and synonyms
        self._label_index: dict[tuple[NamespaceId, str], EntityId] = {}
        self._next_entity = 0
        self._next_relation = 0
        self._next_namespace = 0
        self.version = 0

    # ------------------------------------------------------------------
    # namespaces

    def add_namespace(self, name: str, kind: NamespaceKind = NamespaceKind.TERMINOLOGY) -> NamespaceId:
        """Create a namespace, or return the existing one with the same name."""
        if not name:
            raise ValueError("namespace name must be non-empty")
        existing = self._ns_by_name.get(name)
        if existing is not None:
            ns = self._namespaces[existing]
            if ns.kind is not kind:
                raise ValueError(f"namespace {name!r} already exists with kind {ns.kind.value}")
            return existing
        ns_id = self._next_namespace
        self._next_namespace += 1
        self._namespaces[ns_id] = Namespace(id=ns_id, name=name, kind=kind)
        self._ns_by_name[name] = ns_id
        self.version += 1
        return ns_id

    def namespace(self, ns: NamespaceId) -> Namespace:
        try:
            return self._namespaces[ns]
        except KeyError:
            raise UnknownNamespace(f"no namespace with id {ns}") from None

    def namespace_id(self, name: str) -> NamespaceId:
        try:
            return self._ns_by_name[name]
        except KeyError:
            raise UnknownNamespace(f"no namespace named {name!r}") from None

    def has_namespace(self, name: str) -> bool:
        return name in self._ns_by_name

    def namespaces(self) -> list[Namespace]:
        return [self._namespaces[i] for i in sorted(self._namespaces)]

    # ------------------------------------------------------------------
    # entities

    def add_entity(self, namespace: NamespaceId, preferred_label: str,
                   synonyms: Iterable[str] = (), meta: dict[str, str] | None = None) -> EntityId:
        """Add an entity; under the merge policy an already-indexed label
        returns (and enriches) the existing entity instead."""
        ns = self.namespace(namespace)
        if not preferred_label:
            raise ValueError("preferred_label must be non-empty")
        synonyms = [s for s in synonyms if s and s != preferred_label]
        existing = self._label_index.get((namespace, preferred_label))
        if existing is not None:
            if self.duplicate_policy == "reject":
                raise DuplicateLabelInNamespace(
                    f"label {preferred_label!r} already present in namespace {ns.name!r}",
                    param="preferred_label")
            ent = self._entities[existing]
            for syn in synonyms:
                if syn != ent.preferred_label and syn not in ent.synonyms:
                    ent.synonyms.append(syn)
                    self._label_index.setdefault((namespace, syn), existing)
            if meta:
                for k, v in meta.items():
                    ent.meta.setdefault(k, v)
            self.version += 1
            return existing
        eid = self._next_entity
        self._next_entity += 1
        ent = Entity(id=eid, namespace=namespace, preferred_label=preferred_label,
                     synonyms=list(synonyms), meta=dict(meta or {}))
        self._entities[eid] = ent
        self._out[eid] = []
        self._in[eid] = []
        ns.members.add(eid)
        self._label_index[(namespace, preferred_label)] = eid
        for syn in ent.synonyms:
            # first writer wins; deliberate duplicates are a fixture problem
            self._label_index.setdefault((namespace, syn), eid)
        self.version += 1
        return eid

    def entity(self, e: EntityId) -> Entity:
        try:
            return self._entities[e]
        except KeyError:
            raise UnknownEntity(f"no entity with id {e}") from None

    def has_entity(self, e: EntityId) -> bool:
        return e in self._entities

    def find_entity(self, namespace: NamespaceId, label: str) -> EntityId | None:
        """Look up an entity by preferred label or synonym."""
        return self._label_index.get((namespace, label))

    def entity_ids(self) -> list[EntityId]:
        return sorted(self._entities)

    def iter_entities(self) -> Iterator[Entity]:
        for eid in sorted(self._entities):
            yield self._entities[eid]

    @property
    def entity_count(self) -> int:
        return len(self._entities)

    # ------------------------------------------------------------------
    # relations

    def add_relation(self, source: EntityId, target: EntityId, kind: str,
                     provenance: Provenance = INGESTED) -> RelationId:
        if source not in self._entities:
            raise UnknownEntity(f"relation source {source} does not exist", param="source")
        if target not in self._entities:
            raise UnknownEntity(f"relation target {target} does not exist", param="target")
        if not kind:
            raise ValueError("relation kind must be non-empty")
        rid = self._next_relation
        self._next_relation += 1
        rel = Relation(id=rid, source=source, target=target, kind=kind, provenance=provenance)
        self._relations[rid] = rel
        self._out[source].append(rid)
        self._in[target].append(rid)
        self.version += 1
        return rid

    def ensure_relation(self, source: EntityId, target: EntityId, kind: str,
                        provenance: Provenance = INGESTED) -> tuple[RelationId, bool]:
        """Add a relation unless an equal one exists; symmetric kinds match
        either direction.  Returns (relation id, created flag)."""
        for rid in self._out.get(source, ()):
            rel = self._relations[rid]
            if rel.target == target and rel.kind == kind:
                return rid, False
        if kind in self.symmetric_kinds:
            for rid in self._out.get(target, ()):
                rel = self._relations[rid]
                if rel.target == source and rel.kind == kind:
                    return rid, False
        return self.add_relation(source, target, kind, provenance), True

    def relation(self, r: RelationId) -> Relation:
        try:
            return self._relations[r]
        except KeyError:
            raise UnknownRelation(f"no relation with id {r}") from None

    def has_relation(self, r: RelationId) -> bool:
        return r in self._relations

    def relation_ids(self) -> list[RelationId]:
        return sorted(self._relations)

    def iter_relations(self) -> Iterator[Relation]:
        for rid in sorted(self._relations):
            yield self._relations[rid]

    @property
    def relation_count(self) -> int:
        return len(self._relations)

    def incident(self, e: EntityId) -> list[RelationId]:
        """All relation ids touching e, either direction, self-loops once."""
        self.entity(e)
        out = self._out[e]
        inc = [rid for rid in self._in[e] if self._relations[rid].source != e]
        return out + inc

    def out_relations(self, e: EntityId) -> list[RelationId]:
        self.entity(e)
        return list(self._out[e])

    def in_relations(self, e: EntityId) -> list[RelationId]:
        self.entity(e)
        return list(self._in[e])

    def neighbors(self, e: EntityId) -> set[EntityId]:
        """Entities adjacent to e via any relation, ignoring direction."""
        self.entity(e)
        result: set[EntityId] = set()
        for rid in self._out[e]:
            result.add(self._relations[rid].target)
        for rid in self._in[e]:
            result.add(self._relations[rid].source)
        return result

    def connected(self, a: EntityId, b: EntityId) -> bool:
        """True if any relation joins a and b, in either direction."""
        if len(self._out.get(a, ())) + len(self._in.get(a, ())) <= \
           len(self._out.get(b, ())) + len(self._in.get(b, ())):
            probe, other = a, b
        else:
            probe, other = b, a
        for rid in self._out.get(probe, ()):
            rel = self._relations[rid]
            if rel.target == other or rel.source == other:
                return True
        for rid in self._in.get(probe, ()):
            rel = self._relations[rid]
            if rel.source == other or rel.target == other:
                return True
        return False

    # ------------------------------------------------------------------
    # subgraphs

    def induced_subgraph(self, vertex_set: Iterable[EntityId],
                         kinds: Iterable[str] | None = None) -> "Graph":
        """Subgraph with exactly the given vertices and every relation
        whose endpoints both lie inside, optionally restricted to kinds."""
        vertices = set(vertex_set)
        for v in vertices:
            self.entity(v)
        allowed = None if kinds is None else set(kinds)
        relations = [
            rid for v in vertices for rid in self._out[v]
            if self._relations[rid].target in vertices
            and (allowed is None or self._relations[rid].kind in allowed)
        ]
        return self._subgraph(vertices, relations)

    def namespace_subgraph(self, ns: NamespaceId) -> "Graph":
        """Members of the namespace plus intra-namespace relations only."""
        namespace = self.namespace(ns)
        vertices = set(namespace.members)
        relations = [
            rid for v in vertices for rid in self._out[v]
            if self._relations[rid].target in vertices
        ]
        return self._subgraph(vertices, relations)

    def _subgraph(self, vertices: set[EntityId], relation_ids: Iterable[RelationId]) -> "Graph":
        g = Graph(duplicate_policy=self.duplicate_policy, symmetric_kinds=self.symmetric_kinds)
        ns_ids = {self._entities[v].namespace for v in vertices}
        for ns_id in sorted(ns_ids):
            ns = self._namespaces[ns_id]
            g._namespaces[ns_id] = Namespace(id=ns_id, name=ns.name, kind=ns.kind)
            g._ns_by_name[ns.name] = ns_id
        for v in sorted(vertices):
            ent = self._entities[v]
            g._entities[v] = Entity(id=v, namespace=ent.namespace,
                                    preferred_label=ent.preferred_label,
                                    synonyms=list(ent.synonyms), meta=dict(ent.meta))
            g._out[v] = []
            g._in[v] = []
            g._namespaces[ent.namespace].members.add(v)
            g._label_index[(ent.namespace, ent.preferred_label)] = v
            for syn in ent.synonyms:
                g._label_index.setdefault((ent.namespace, syn), v)
        for rid in sorted(set(relation_ids)):
            rel = self._relations[rid]
            g._relations[rid] = rel
            g._out[rel.source].append(rid)
            g._in[rel.target].append(rid)
        g._next_entity = self._next_entity
        g._next_relation = self._next_relation
        g._next_namespace = self._next_namespace
        return g

    # ------------------------------------------------------------------
    # hierarchy checks

    def hierarchy_order(self, ns: NamespaceId, kind: str = "childOf") -> list[EntityId]:
        """Topological order of the namespace hierarchy (children first).

        Raises CycleDetected when the hierarchy edges do not form a DAG.
        """
        from .errors import CycleDetected

        namespace = self.namespace(ns)
        members = namespace.members
        parents: dict[EntityId, list[EntityId]] = {m: [] for m in members}
        indegree: dict[EntityId, int] = {m: 0 for m in members}
        for m in members:
            for rid in self._out[m]:
                rel = self._relations[rid]
                if rel.kind == kind and rel.target in members:
                    parents[m].append(rel.target)
                    indegree[rel.target] += 1
        queue = sorted(m for m in members if indegree[m] == 0)
        order: list[EntityId] = []
        while queue:
            node = queue.pop(0)
            order.append(node)
            for parent in sorted(parents[node]):
                indegree[parent] -= 1
                if indegree[parent] == 0:
                    queue.append(parent)
            queue.sort()
        if len(order) != len(members):
            cycle = self._find_hierarchy_cycle(members, parents)
            labels = [self._entities[e].preferred_label for e in cycle]
            raise CycleDetected(
                f"hierarchy of namespace {namespace.name!r} contains a cycle: "
                + " -> ".join(labels), cycle=cycle)
        return order

    def _find_hierarchy_cycle(self, members: set[EntityId],
                              parents: dict[EntityId, list[EntityId]]) -> list[EntityId]:
        color: dict[EntityId, int] = {}
        stack: list[EntityId] = []

        def visit(node: EntityId) -> list[EntityId] | None:
            color[node] = 1
            stack.append(node)
            for nxt in parents[node]:
                if color.get(nxt, 0) == 1:
                    return stack[stack.index(nxt):] + [nxt]
                if color.get(nxt, 0) == 0:
                    found = visit(nxt)
                    if found:
                        return found
            stack.pop()
            color[node] = 2
            return None

        for m in sorted(members):
            if color.get(m, 0) == 0:
                found = visit(m)
                if found:
                    return found
        return []
