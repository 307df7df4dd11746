"""Building the document-context graph from files.

Terminologies arrive as flat TSV trees or minimal OBO-like stanzas and
become namespaces with childOf hierarchies.  A corpus arrives as JSON
Lines, one document record per line, and contributes document, author,
affiliation, origin and article-type entities plus the context relations
between them.  Pre-extracted BEL triples become relations between
ontology concepts with the evidence document recorded as provenance.

Ingest is deterministic (same files, same graph bytes) and re-running it
over an existing graph is a no-op thanks to the merge-on-label policy
and ensure_relation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import MissingTerminology, ParseError, UnresolvedParent
from .graph import (
    EntityId,
    Graph,
    NamespaceId,
    NamespaceKind,
    Origin,
    Provenance,
)

FLAT_TSV = "tsv"
OBO_LIKE = "obo"

DOCUMENT_NS = "document"
AUTHOR_NS = "author"
AFFILIATION_NS = "affiliation"
ORIGIN_NS = "origin"
ARTICLE_TYPE_NS = "article-type"

DERIVED_META = Provenance(origin=Origin.DERIVED_META)


@dataclass(slots=True)
class IngestReport:
    """Graph tallies after an ingest step plus anything left unresolved."""

    entities: dict[str, int] = field(default_factory=dict)
    relations: dict[str, int] = field(default_factory=dict)
    unresolved: list[dict] = field(default_factory=list)

    @classmethod
    def tally(cls, graph: Graph, unresolved: list[dict] | None = None) -> "IngestReport":
        report = cls(unresolved=list(unresolved or []))
        for ns in graph.namespaces():
            report.entities[ns.name] = len(ns.members)
        for rel in graph.iter_relations():
            report.relations[rel.kind] = report.relations.get(rel.kind, 0) + 1
        return report

    @property
    def entity_total(self) -> int:
        return sum(self.entities.values())

    @property
    def relation_total(self) -> int:
        return sum(self.relations.values())

    def to_dict(self) -> dict:
        return {
            "entities": dict(sorted(self.entities.items())),
            "entity_total": self.entity_total,
            "relations": dict(sorted(self.relations.items())),
            "relation_total": self.relation_total,
            "unresolved": self.unresolved,
        }


def _split_list(cell: str) -> list[str]:
    return [part.strip() for part in cell.split("|") if part.strip()]


class Ingestor:
    """Stateful loader binding terminologies and corpora to one graph."""

    def __init__(self, graph: Graph | None = None):
        self.graph = graph if graph is not None else Graph()
        self.default_keyword_ns: NamespaceId | None = None

    # ------------------------------------------------------------------
    # terminologies

    def load_terminology(self, path: str | Path, format: str | None = None,
                         *, name: str | None = None) -> NamespaceId:
        """Load a concept tree; the format defaults from the extension."""
        path = Path(path)
        if format is None:
            format = OBO_LIKE if path.suffix.lower() == ".obo" else FLAT_TSV
        if format not in (FLAT_TSV, OBO_LIKE):
            raise ValueError(f"unknown terminology format: {format!r}")
        ns_name = name or path.stem
        if format == FLAT_TSV:
            ns = self.graph.add_namespace(ns_name, NamespaceKind.TERMINOLOGY)
            concepts = self._parse_tsv(path)
        else:
            ns = self.graph.add_namespace(ns_name, NamespaceKind.ONTOLOGY)
            concepts = self._parse_obo(path)
        by_source_id: dict[str, EntityId] = {}
        for concept in concepts:
            synonyms = list(concept["synonyms"])
            if concept["id"] not in synonyms and concept["id"] != concept["label"]:
                synonyms.append(concept["id"])
            eid = self.graph.add_entity(ns, concept["label"], synonyms,
                                        meta={"identifier": concept["id"]})
            by_source_id[concept["id"]] = eid
        for concept in concepts:
            child = by_source_id[concept["id"]]
            for parent_id in concept["parents"]:
                parent = by_source_id.get(parent_id)
                if parent is None:
                    parent = self.graph.find_entity(ns, parent_id)
                if parent is None:
                    raise UnresolvedParent(
                        f"{path}: concept {concept['id']!r} names unknown parent "
                        f"{parent_id!r}", param="parents")
                self.graph.ensure_relation(child, parent, "childOf")
        self.graph.hierarchy_order(ns)
        if self.default_keyword_ns is None:
            self.default_keyword_ns = ns
        return ns

    def _parse_tsv(self, path: Path) -> list[dict]:
        concepts = []
        seen: set[str] = set()
        for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            cells = line.split("\t")
            if len(cells) < 2 or not cells[0].strip() or not cells[1].strip():
                raise ParseError("expected at least id and label columns",
                                 line=lineno, path=str(path))
            concept_id = cells[0].strip()
            if concept_id in seen:
                raise ParseError(f"duplicate concept id {concept_id!r}",
                                 line=lineno, path=str(path))
            seen.add(concept_id)
            concepts.append({
                "id": concept_id,
                "label": cells[1].strip(),
                "synonyms": _split_list(cells[2]) if len(cells) > 2 else [],
                "parents": _split_list(cells[3]) if len(cells) > 3 else [],
            })
        return concepts

    def _parse_obo(self, path: Path) -> list[dict]:
        concepts = []
        current: dict | None = None
        in_term = False
        lines = path.read_text(encoding="utf-8").splitlines()

        def flush(lineno: int) -> None:
            nonlocal current
            if current is None:
                return
            if not current.get("id"):
                raise ParseError("[Term] stanza without id", line=lineno, path=str(path))
            if not current.get("label"):
                raise ParseError(f"term {current['id']!r} has no name",
                                 line=lineno, path=str(path))
            concepts.append(current)
            current = None

        for lineno, raw in enumerate(lines, 1):
            line = raw.strip()
            if not line or line.startswith("!"):
                continue
            if line.startswith("["):
                flush(lineno)
                in_term = line == "[Term]"
                if in_term:
                    current = {"id": "", "label": "", "synonyms": [], "parents": []}
                continue
            if not in_term or current is None:
                continue
            if ":" not in line:
                raise ParseError(f"expected key: value, got {line!r}",
                                 line=lineno, path=str(path))
            key, _, value = line.partition(":")
            key = key.strip()
            value = value.strip()
            if key == "id":
                current["id"] = value
            elif key == "name":
                current["label"] = value
            elif key == "synonym":
                # synonym: "text" EXACT [] -- keep the quoted part
                if value.startswith('"'):
                    end = value.find('"', 1)
                    if end < 0:
                        raise ParseError("unterminated synonym quote",
                                         line=lineno, path=str(path))
                    value = value[1:end]
                if value:
                    current["synonyms"].append(value)
            elif key == "is_a":
                parent = value.split("!", 1)[0].strip()
                if parent:
                    current["parents"].append(parent)
        flush(len(lines) + 1)
        return concepts

    # ------------------------------------------------------------------
    # corpus

    def ingest_corpus(self, path: str | Path,
                      keyword_ns: NamespaceId | str | None = None) -> IngestReport:
        """Ingest a JSON Lines corpus; returns post-ingest graph tallies."""
        path = Path(path)
        if keyword_ns is None:
            kw_ns = self.default_keyword_ns
        elif isinstance(keyword_ns, str):
            kw_ns = self.graph.namespace_id(keyword_ns)
        else:
            kw_ns = keyword_ns
        records = self._parse_corpus(path)
        unresolved: list[dict] = []

        doc_ns = self.graph.add_namespace(DOCUMENT_NS, NamespaceKind.ENTITY_CLASS)
        author_ns = self.graph.add_namespace(AUTHOR_NS, NamespaceKind.ENTITY_CLASS)
        affiliation_ns = self.graph.add_namespace(AFFILIATION_NS, NamespaceKind.ENTITY_CLASS)
        origin_ns = self.graph.add_namespace(ORIGIN_NS, NamespaceKind.ENTITY_CLASS)
        type_ns = self.graph.add_namespace(ARTICLE_TYPE_NS, NamespaceKind.ENTITY_CLASS)

        # documents first so citations and BEL evidence can point anywhere
        docs: dict[str, EntityId] = {}
        for record, lineno in records:
            doc_id = record["doc_id"]
            synonyms = [record["title"]] if record.get("title") else []
            meta = {"identifier": doc_id}
            if record.get("title"):
                meta["title"] = record["title"]
            docs[doc_id] = self.graph.add_entity(doc_ns, doc_id, synonyms, meta=meta)

        for record, lineno in records:
            doc = docs[record["doc_id"]]
            if record.get("origin"):
                origin = self.graph.add_entity(origin_ns, record["origin"])
                self.graph.ensure_relation(doc, origin, "hasOrigin")
            for type_name in record.get("article_types", []):
                article_type = self.graph.add_entity(type_ns, type_name)
                self.graph.ensure_relation(doc, article_type, "hasType")
            for author_rec in record.get("authors", []):
                author = self.graph.add_entity(author_ns, author_rec["name"])
                self.graph.ensure_relation(author, doc, "isAuthor")
                for affiliation_name in author_rec.get("affiliations", []):
                    affiliation = self.graph.add_entity(affiliation_ns, affiliation_name)
                    self.graph.ensure_relation(author, affiliation, "hasAffiliation")
            for keyword in record.get("keywords", []):
                if kw_ns is None:
                    raise MissingTerminology(
                        "corpus has keywords but no terminology is loaded",
                        param="keywords")
                target = self.graph.find_entity(kw_ns, keyword)
                if target is None:
                    unresolved.append({"record": record["doc_id"], "field": "keywords",
                                       "value": keyword})
                    continue
                self.graph.ensure_relation(doc, target, "hasKeyword")
            for annotation in record.get("annotations", []):
                self._ingest_annotation(doc, record["doc_id"], annotation,
                                        unresolved, lineno, path)
            for cited_id in record.get("citations", []):
                cited = docs.get(cited_id)
                if cited is None:
                    cited = self.graph.find_entity(doc_ns, cited_id)
                if cited is None:
                    unresolved.append({"record": record["doc_id"], "field": "citations",
                                       "value": cited_id})
                    continue
                self.graph.ensure_relation(doc, cited, "hasCitation")
            for triple in record.get("bel_triples", []):
                self._ingest_bel(docs, record["doc_id"], triple,
                                 unresolved, lineno, path)
        return IngestReport.tally(self.graph, unresolved)

    def _ingest_annotation(self, doc: EntityId, doc_id: str, annotation: dict,
                           unresolved: list[dict], lineno: int, path: Path) -> None:
        ns_name = annotation["namespace"]
        if not self.graph.has_namespace(ns_name):
            raise MissingTerminology(
                f"{path}:{lineno}: annotation references namespace {ns_name!r} "
                "which is not loaded", param="namespace")
        ns = self.graph.namespace_id(ns_name)
        if self.graph.namespace(ns).kind is NamespaceKind.ENTITY_CLASS:
            raise MissingTerminology(
                f"{path}:{lineno}: namespace {ns_name!r} is not a terminology or "
                "ontology", param="namespace")
        concept = self.graph.find_entity(ns, annotation["concept_id"])
        if concept is None:
            unresolved.append({"record": doc_id, "field": "annotations",
                               "value": f"{ns_name}:{annotation['concept_id']}"})
            return
        note = f"offset={annotation['offset']}" if "offset" in annotation else ""
        self.graph.ensure_relation(
            doc, concept, "hasAnnotation",
            Provenance(source_document=doc, note=note))

    def _ingest_bel(self, docs: dict[str, EntityId], doc_id: str, triple: dict,
                    unresolved: list[dict], lineno: int, path: Path) -> None:
        for role in ("subject", "object"):
            if "(" in triple[role] or ")" in triple[role]:
                raise ParseError(
                    f"nested BEL terms are not supported: {triple[role]!r}",
                    line=lineno, path=str(path))
        subject = self._resolve_concept(triple["subject"], triple.get("namespace"))
        target = self._resolve_concept(triple["object"], triple.get("namespace"))
        missing = [role for role, eid in (("subject", subject), ("object", target))
                   if eid is None]
        if missing:
            for role in missing:
                unresolved.append({"record": doc_id, "field": "bel_triples",
                                   "value": triple[role]})
            return
        evidence_id = triple.get("evidence", doc_id)
        evidence = docs.get(evidence_id)
        if evidence is None:
            evidence = self.graph.find_entity(
                self.graph.namespace_id(DOCUMENT_NS), evidence_id)
        if evidence is None:
            unresolved.append({"record": doc_id, "field": "bel_triples",
                               "value": evidence_id})
            return
        self.graph.ensure_relation(
            subject, target, f"BEL:{triple['predicate']}",
            Provenance(source_document=evidence))

    def _resolve_concept(self, concept_id: str, ns_name: str | None) -> EntityId | None:
        if ns_name is not None:
            if not self.graph.has_namespace(ns_name):
                raise MissingTerminology(
                    f"BEL triple references namespace {ns_name!r} which is not loaded",
                    param="namespace")
            return self.graph.find_entity(self.graph.namespace_id(ns_name), concept_id)
        for ns in self.graph.namespaces():
            if ns.kind is NamespaceKind.ENTITY_CLASS:
                continue
            found = self.graph.find_entity(ns.id, concept_id)
            if found is not None:
                return found
        return None

    def _parse_corpus(self, path: Path) -> list[tuple[dict, int]]:
        records: list[tuple[dict, int]] = []
        seen: set[str] = set()
        for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
            line = raw.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}",
                                 line=lineno, path=str(path)) from exc
            if not isinstance(record, dict):
                raise ParseError("record must be a JSON object",
                                 line=lineno, path=str(path))
            doc_id = record.get("doc_id")
            if not isinstance(doc_id, str) or not doc_id:
                raise ParseError("record needs a nonempty doc_id string",
                                 line=lineno, path=str(path))
            if doc_id in seen:
                raise ParseError(f"duplicate doc_id {doc_id!r}",
                                 line=lineno, path=str(path))
            seen.add(doc_id)
            self._check_record_shape(record, lineno, path)
            records.append((record, lineno))
        return records

    def _check_record_shape(self, record: dict, lineno: int, path: Path) -> None:
        def fail(message: str) -> ParseError:
            return ParseError(message, line=lineno, path=str(path))

        for key, kind in (("origin", str), ("title", str)):
            if key in record and not isinstance(record[key], kind):
                raise fail(f"{key} must be a string")
        for key in ("article_types", "keywords", "citations"):
            value = record.get(key, [])
            if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
                raise fail(f"{key} must be a list of strings")
        authors = record.get("authors", [])
        if not isinstance(authors, list):
            raise fail("authors must be a list")
        for author in authors:
            if not isinstance(author, dict) or not isinstance(author.get("name"), str) \
                    or not author["name"]:
                raise fail("each author needs a nonempty name")
            affiliations = author.get("affiliations", [])
            if not isinstance(affiliations, list) \
                    or not all(isinstance(a, str) for a in affiliations):
                raise fail("author affiliations must be a list of strings")
        for annotation in record.get("annotations", []):
            if not isinstance(annotation, dict) \
                    or not isinstance(annotation.get("namespace"), str) \
                    or not isinstance(annotation.get("concept_id"), str):
                raise fail("each annotation needs namespace and concept_id strings")
        for triple in record.get("bel_triples", []):
            if not isinstance(triple, dict) or not all(
                    isinstance(triple.get(k), str) and triple.get(k)
                    for k in ("subject", "predicate", "object")):
                raise fail("each BEL triple needs subject, predicate and object strings")


# ----------------------------------------------------------------------
# meta relations

def derive_meta_relations(graph: Graph) -> IngestReport:
    """Add sameAffiliation and isCoAuthor edges between authors.

    Authors sharing an affiliation entity get sameAffiliation, authors
    sharing a document get isCoAuthor; both symmetric, stored once in
    canonical low-to-high id direction.  Idempotent.
    """
    by_affiliation: dict[EntityId, set[EntityId]] = {}
    by_document: dict[EntityId, set[EntityId]] = {}
    for rel in graph.iter_relations():
        if rel.kind == "hasAffiliation":
            by_affiliation.setdefault(rel.target, set()).add(rel.source)
        elif rel.kind == "isAuthor":
            by_document.setdefault(rel.target, set()).add(rel.source)
    for kind, groups in (("sameAffiliation", by_affiliation),
                         ("isCoAuthor", by_document)):
        for _, members in sorted(groups.items()):
            ordered = sorted(members)
            for i, a in enumerate(ordered):
                for b in ordered[i + 1:]:
                    graph.ensure_relation(a, b, kind, DERIVED_META)
    return IngestReport.tally(graph)
