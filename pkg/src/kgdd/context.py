"""Context algebra over the graph.

A context of a node or relation is a set of other entities that situate
it: the annotations, authors, keywords and so on attached across
namespace boundaries.  Contexts can be stored explicitly, but the usual
source is implicit: every inter-namespace relation of a configured kind
makes each endpoint a context of the other, and a relation's provenance
document makes the document and the relation contexts of each other.

On top of the con mapping this module builds extended induced subgraphs
(a vertex set plus the context neighborhood), context hypergraphs
(grouping nodes with their contexts and nodes sharing a context), and
cross-context inference (porting connectivity from one namespace onto
the context images in another).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

from .errors import UnknownElement, UnknownEntity, UnknownRelation
from .graph import EntityId, Graph, NamespaceId, Origin, Provenance, Relation, RelationId

CROSS_CONTEXT_KIND = "crossContext"


class SubgraphMode(str, Enum):
    VERTEX_CONTEXTS_ONLY = "VertexContextsOnly"
    WITH_EDGE_CONTEXTS = "WithEdgeContexts"


@dataclass(slots=True)
class Hypergraph:
    vertices: set[EntityId]
    hyperedges: set[frozenset[EntityId]]

    def to_dict(self, graph: Graph | None = None) -> dict:
        """JSON-friendly form; labels included when a graph is supplied."""
        doc: dict = {
            "vertices": sorted(self.vertices),
            "hyperedges": sorted(sorted(edge) for edge in self.hyperedges),
        }
        if graph is not None:
            doc["labels"] = {
                str(v): graph.entity(v).preferred_label for v in sorted(self.vertices)
            }
        return doc

    def to_dot(self, graph: Graph | None = None) -> str:
        """Star expansion: one synthetic point node per hyperedge."""
        out = ["graph hypergraph {", "  node [shape=box];"]
        for v in sorted(self.vertices):
            label = graph.entity(v).preferred_label if graph is not None else str(v)
            label = label.replace("\\", "\\\\").replace('"', '\\"')
            out.append(f'  n{v} [label="{label}"];')
        for i, edge in enumerate(sorted(sorted(e) for e in self.hyperedges)):
            out.append(f"  h{i} [shape=point, width=0.08];")
            for v in edge:
                out.append(f"  h{i} -- n{v};")
        out.append("}")
        return "\n".join(out) + "\n"


class ContextMap:
    """The con mapping for one graph.

    context_kinds restricts which relation kinds carry implicit context
    (None means every kind).  Implicit node contexts cross namespace
    boundaries unless include_intra_namespace is set.  Provenance source
    documents act as contexts of their relations (and vice versa) while
    provenance_as_context holds.  Setting relations_as_context to False
    turns all implicit contexts off, leaving only explicit annotations.
    """

    def __init__(self, graph: Graph, *,
                 context_kinds: Iterable[str] | None = None,
                 relations_as_context: bool = True,
                 provenance_as_context: bool = True,
                 include_intra_namespace: bool = False):
        self.graph = graph
        self.context_kinds = None if context_kinds is None else set(context_kinds)
        self.relations_as_context = relations_as_context
        self.provenance_as_context = provenance_as_context
        self.include_intra_namespace = include_intra_namespace
        self.node_contexts: dict[EntityId, set[EntityId]] = {}
        self.edge_contexts: dict[RelationId, set[EntityId]] = {}
        self._edge_inverse: dict[EntityId, set[RelationId]] | None = None
        self._edge_inverse_version = -1

    # ------------------------------------------------------------------
    # explicit annotations

    def annotate(self, e: EntityId, contexts: Iterable[EntityId]) -> None:
        self.graph.entity(e)
        contexts = set(contexts)
        for c in contexts:
            self.graph.entity(c)
        self.node_contexts.setdefault(e, set()).update(contexts)

    def annotate_relation(self, r: RelationId, contexts: Iterable[EntityId]) -> None:
        self.graph.relation(r)
        contexts = set(contexts)
        for c in contexts:
            self.graph.entity(c)
        self.edge_contexts.setdefault(r, set()).update(contexts)
        self._edge_inverse = None

    # ------------------------------------------------------------------
    # con

    def con(self, x: EntityId | RelationId | Relation) -> set[EntityId]:
        """Context set of an entity or a relation.

        A bare int is looked up as an entity first, then as a relation
        id; pass a Relation object to force edge semantics.
        """
        if isinstance(x, Relation):
            return self.con_relation(x.id)
        if self.graph.has_entity(x):
            return self.con_entity(x)
        if self.graph.has_relation(x):
            return self.con_relation(x)
        raise UnknownElement(f"no entity or relation with id {x}")

    def con_entity(self, e: EntityId) -> set[EntityId]:
        ent = self.graph.entity(e)
        result = set(self.node_contexts.get(e, ()))
        if not self.relations_as_context:
            return result
        for rid in self.graph.incident(e):
            rel = self.graph.relation(rid)
            if self.context_kinds is not None and rel.kind not in self.context_kinds:
                continue
            other = rel.other(e)
            if other == e:
                continue
            if not self.include_intra_namespace and \
                    self.graph.entity(other).namespace == ent.namespace:
                continue
            result.add(other)
        return result

    def con_relation(self, r: RelationId) -> set[EntityId]:
        rel = self.graph.relation(r)
        result = set(self.edge_contexts.get(r, ()))
        if self.provenance_as_context and rel.provenance.source_document is not None:
            result.add(rel.provenance.source_document)
        return result

    def con_restricted_to_relations(self, e: EntityId) -> set[RelationId]:
        """The edge-valued share of e's context: relations r with e in con(r)."""
        self.graph.entity(e)
        if self._edge_inverse is None or self._edge_inverse_version != self.graph.version:
            inverse: dict[EntityId, set[RelationId]] = {}
            for rel in self.graph.iter_relations():
                for c in self.con_relation(rel.id):
                    inverse.setdefault(c, set()).add(rel.id)
            self._edge_inverse = inverse
            self._edge_inverse_version = self.graph.version
        return set(self._edge_inverse.get(e, ()))

    def context_elements(self, e: EntityId) -> set[tuple[str, int]]:
        """con(e) in its mixed entity/relation form, tagged by sort."""
        out = {("entity", c) for c in self.con_entity(e)}
        out |= {("relation", r) for r in self.con_restricted_to_relations(e)}
        return out

    # ------------------------------------------------------------------
    # extended induced subgraph

    def extended_induced_subgraph(self, vertex_set: Iterable[EntityId],
                                  mode: SubgraphMode = SubgraphMode.VERTEX_CONTEXTS_ONLY) -> Graph:
        """Induced subgraph of the vertex set widened by one context hop.

        Both modes take every relation incident to the vertex set along
        with its opposite endpoint.  WITH_EDGE_CONTEXTS additionally pulls
        in each relation that has a query vertex as context, together with
        both of that relation's endpoints.
        """
        mode = SubgraphMode(mode)
        base = set(vertex_set)
        for v in base:
            self.graph.entity(v)
        vertices = set(base)
        relations: set[RelationId] = set()
        for v in base:
            for rid in self.graph.incident(v):
                rel = self.graph.relation(rid)
                relations.add(rid)
                vertices.add(rel.source)
                vertices.add(rel.target)
        if mode is SubgraphMode.WITH_EDGE_CONTEXTS:
            for v in base:
                for rid in self.con_restricted_to_relations(v):
                    rel = self.graph.relation(rid)
                    relations.add(rid)
                    vertices.add(rel.source)
                    vertices.add(rel.target)
        return self.graph._subgraph(vertices, relations)

    # ------------------------------------------------------------------
    # context hypergraph

    def context_hypergraph(self, subgraph: Graph | Iterable[EntityId]) -> Hypergraph:
        """Hypergraph over a vertex set and its contexts.

        Vertices are the query set E' plus every context of a member.
        Each vertex contributes the hyperedge {v} | (con(v) & X); every
        context shared by two or more members of E' contributes the
        hyperedge {context} | sharers.  Hyperedges are deduplicated.
        """
        if isinstance(subgraph, Graph):
            base = set(subgraph.entity_ids())
        else:
            base = set(subgraph)
        for v in base:
            self.graph.entity(v)
        contexts_of: dict[EntityId, set[EntityId]] = {v: self.con_entity(v) for v in base}
        vertices = set(base)
        for ctx in contexts_of.values():
            vertices.update(ctx)
        hyperedges: set[frozenset[EntityId]] = set()
        for v in sorted(vertices):
            ctx = contexts_of[v] if v in contexts_of else self.con_entity(v)
            hyperedges.add(frozenset({v}) | (ctx & vertices))
        sharers: dict[EntityId, set[EntityId]] = {}
        for v in base:
            for c in contexts_of[v]:
                sharers.setdefault(c, set()).add(v)
        for c, members in sharers.items():
            if len(members) >= 2:
                hyperedges.add(frozenset({c}) | frozenset(members))
        return Hypergraph(vertices=vertices, hyperedges=hyperedges)

    # ------------------------------------------------------------------
    # cross-context inference

    def infer_cross_context_relations(self, source_ns: NamespaceId,
                                      target_ns: NamespaceId, *,
                                      mode: str = "images") -> list[Relation]:
        """Port connectivity between namespaces through context images.

        Default mode "images": every connected pair inside source_ns whose
        members have context images in target_ns yields new relations
        between all unconnected image pairs.  Mode "source-pair" goes the
        other way: unconnected source pairs whose images are connected in
        target_ns get a new edge themselves.  Both modes add the relations
        to the graph (kind "crossContext") and return the new ones;
        re-running adds nothing.
        """
        if mode not in ("images", "source-pair"):
            raise ValueError(f"unknown inference mode: {mode!r}")
        source_members = self.graph.namespace(source_ns).members
        target_members = self.graph.namespace(target_ns).members
        added: list[Relation] = []
        if mode == "images":
            provenance = Provenance(origin=Origin.DERIVED_CROSS_CONTEXT,
                                    derived_from=source_ns)
            for rel in self.graph.iter_relations():
                if rel.source == rel.target:
                    continue
                if rel.source not in source_members or rel.target not in source_members:
                    continue
                img_src = sorted(self.con_entity(rel.source) & target_members)
                img_tgt = sorted(self.con_entity(rel.target) & target_members)
                if not img_src or not img_tgt:
                    continue
                for x in img_src:
                    for y in img_tgt:
                        if x == y or self.graph.connected(x, y):
                            continue
                        rid = self.graph.add_relation(x, y, CROSS_CONTEXT_KIND, provenance)
                        added.append(self.graph.relation(rid))
            return added
        provenance = Provenance(origin=Origin.DERIVED_CROSS_CONTEXT,
                                derived_from=target_ns)
        members = sorted(source_members)
        images = {e: self.con_entity(e) & target_members for e in members}
        for i, e1 in enumerate(members):
            for e2 in members[i + 1:]:
                if self.graph.connected(e1, e2):
                    continue
                if not images[e1] or not images[e2]:
                    continue
                linked = any(x != y and self.graph.connected(x, y)
                             for x in images[e1] for y in images[e2])
                if linked:
                    rid = self.graph.add_relation(e1, e2, CROSS_CONTEXT_KIND, provenance)
                    added.append(self.graph.relation(rid))
        return added
