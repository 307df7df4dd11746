"""Serialization: versioned JSON snapshots, N-Triples, Graphviz DOT.

Snapshots are loss-free and id-preserving: loading a snapshot yields a
graph whose entity/relation/namespace ids match the original exactly, so
external references into the graph stay valid.  Serialization output is
deterministic byte-for-byte for a given graph state.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import IO
from urllib.parse import quote

from .errors import SnapshotFormatError
from .graph import Entity, Graph, Namespace, NamespaceKind, Origin, Provenance, Relation

SNAPSHOT_FORMAT = "kgdd-graph"
SNAPSHOT_VERSION = 1

BASE_IRI = "http://example.org/kg/"


def graph_to_dict(graph: Graph) -> dict:
    """Plain-dict snapshot of the full graph state."""
    namespaces = [
        {"id": ns.id, "name": ns.name, "kind": ns.kind.value}
        for ns in graph.namespaces()
    ]
    entities = []
    for ent in graph.iter_entities():
        item: dict = {
            "id": ent.id,
            "namespace": ent.namespace,
            "label": ent.preferred_label,
        }
        if ent.synonyms:
            item["synonyms"] = list(ent.synonyms)
        if ent.meta:
            item["meta"] = dict(sorted(ent.meta.items()))
        entities.append(item)
    relations = []
    for rel in graph.iter_relations():
        item = {
            "id": rel.id,
            "source": rel.source,
            "target": rel.target,
            "kind": rel.kind,
        }
        prov = rel.provenance
        if prov.origin is not Origin.INGESTED or prov.source_document is not None \
                or prov.derived_from is not None or prov.note:
            p: dict = {"origin": prov.origin.value}
            if prov.source_document is not None:
                p["source_document"] = prov.source_document
            if prov.derived_from is not None:
                p["derived_from"] = prov.derived_from
            if prov.note:
                p["note"] = prov.note
            item["provenance"] = p
        relations.append(item)
    return {
        "format": SNAPSHOT_FORMAT,
        "version": SNAPSHOT_VERSION,
        "duplicate_policy": graph.duplicate_policy,
        "symmetric_kinds": sorted(graph.symmetric_kinds),
        "namespaces": namespaces,
        "entities": entities,
        "relations": relations,
    }


def graph_from_dict(data: dict) -> Graph:
    """Rebuild a graph from a snapshot dict, preserving all ids."""
    if not isinstance(data, dict):
        raise SnapshotFormatError("snapshot must be a JSON object")
    if data.get("format") != SNAPSHOT_FORMAT:
        raise SnapshotFormatError(f"unrecognized snapshot format: {data.get('format')!r}")
    if data.get("version") != SNAPSHOT_VERSION:
        raise SnapshotFormatError(f"unsupported snapshot version: {data.get('version')!r}")
    try:
        g = Graph(duplicate_policy=data.get("duplicate_policy", "merge"),
                  symmetric_kinds=data.get("symmetric_kinds",
                                           ("sameAffiliation", "isCoAuthor", "associative")))
        for ns in data["namespaces"]:
            ns_id = int(ns["id"])
            g._namespaces[ns_id] = Namespace(id=ns_id, name=ns["name"],
                                             kind=NamespaceKind(ns["kind"]))
            g._ns_by_name[ns["name"]] = ns_id
        for item in data["entities"]:
            eid = int(item["id"])
            ent = Entity(id=eid, namespace=int(item["namespace"]),
                         preferred_label=item["label"],
                         synonyms=list(item.get("synonyms", [])),
                         meta=dict(item.get("meta", {})))
            g._entities[eid] = ent
            g._out[eid] = []
            g._in[eid] = []
            g._namespaces[ent.namespace].members.add(eid)
            g._label_index[(ent.namespace, ent.preferred_label)] = eid
            for syn in ent.synonyms:
                g._label_index.setdefault((ent.namespace, syn), eid)
        for item in data["relations"]:
            rid = int(item["id"])
            p = item.get("provenance")
            if p:
                prov = Provenance(
                    origin=Origin(p.get("origin", "ingested")),
                    source_document=p.get("source_document"),
                    derived_from=p.get("derived_from"),
                    note=p.get("note", ""))
            else:
                prov = Provenance()
            rel = Relation(id=rid, source=int(item["source"]), target=int(item["target"]),
                           kind=item["kind"], provenance=prov)
            g._relations[rid] = rel
            g._out[rel.source].append(rid)
            g._in[rel.target].append(rid)
    except SnapshotFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SnapshotFormatError(f"malformed snapshot: {exc}") from exc
    g._next_namespace = max(g._namespaces, default=-1) + 1
    g._next_entity = max(g._entities, default=-1) + 1
    g._next_relation = max(g._relations, default=-1) + 1
    return g


def dumps(graph: Graph) -> str:
    return json.dumps(graph_to_dict(graph), indent=2, sort_keys=True) + "\n"


def save(graph: Graph, fp: str | Path | IO[str]) -> None:
    if isinstance(fp, (str, Path)):
        Path(fp).write_text(dumps(graph), encoding="utf-8")
    else:
        fp.write(dumps(graph))


def loads(text: str) -> Graph:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SnapshotFormatError(f"snapshot is not valid JSON: {exc}") from exc
    return graph_from_dict(data)


def load(fp: str | Path | IO[str]) -> Graph:
    if isinstance(fp, (str, Path)):
        return loads(Path(fp).read_text(encoding="utf-8"))
    return loads(fp.read())


# ----------------------------------------------------------------------
# N-Triples

def _entity_iri(graph: Graph, e: int) -> str:
    ent = graph.entity(e)
    ns = graph.namespace(ent.namespace)
    return (BASE_IRI + "entity/"
            + quote(ns.name, safe="") + "/"
            + quote(ent.preferred_label, safe=""))


def _predicate_iri(kind: str) -> str:
    return BASE_IRI + "relation/" + quote(kind, safe="")


def to_ntriples(graph: Graph) -> str:
    """One triple per relation, sorted, parallel edges kept as-is."""
    lines = []
    for rel in graph.iter_relations():
        lines.append("<%s> <%s> <%s> ." % (
            _entity_iri(graph, rel.source),
            _predicate_iri(rel.kind),
            _entity_iri(graph, rel.target)))
    lines.sort()
    return "".join(line + "\n" for line in lines)


# ----------------------------------------------------------------------
# DOT

def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def graph_to_dot(graph: Graph, *, max_label: int = 40) -> str:
    """Graphviz digraph with entities grouped by namespace."""
    out = ["digraph kg {", "  rankdir=LR;", "  node [shape=box];"]
    for ns in graph.namespaces():
        if not ns.members:
            continue
        out.append(f"  subgraph cluster_ns{ns.id} {{")
        out.append(f'    label="{_dot_escape(ns.name)}";')
        for eid in sorted(ns.members):
            label = graph.entity(eid).preferred_label
            if len(label) > max_label:
                label = label[: max_label - 3] + "..."
            out.append(f'    n{eid} [label="{_dot_escape(label)}"];')
        out.append("  }")
    for rel in graph.iter_relations():
        out.append(f'  n{rel.source} -> n{rel.target} [label="{_dot_escape(rel.kind)}"];')
    out.append("}")
    return "\n".join(out) + "\n"
