"""Shared fixture builders: the ingested corpus, small hand-made
pathways, and seeded random graph generators used by property tests."""

from pathlib import Path

import pytest

from kgdd.graph import Graph, NamespaceKind, Provenance
from kgdd.ingest import Ingestor, derive_meta_relations

FIXTURES = Path(__file__).parent / "fixtures"

RELATION_KIND_POOL = ("annotates", "cites", "links", "mentions")


@pytest.fixture(scope="session")
def fixture_dir() -> Path:
    return FIXTURES


def build_corpus_graph(derive: bool = False) -> Graph:
    ingestor = Ingestor()
    ingestor.load_terminology(FIXTURES / "mesh.tsv")
    ingestor.load_terminology(FIXTURES / "neuro.obo")
    ingestor.ingest_corpus(FIXTURES / "corpus.jsonl")
    if derive:
        derive_meta_relations(ingestor.graph)
    return ingestor.graph


@pytest.fixture
def corpus_graph() -> Graph:
    return build_corpus_graph()


@pytest.fixture
def enriched_graph() -> Graph:
    graph = build_corpus_graph()
    derive_meta_relations(graph)
    return graph


def linear_pathway() -> tuple[Graph, int, int]:
    """source -> mid -> sink; exactly one all-active assignment."""
    g = Graph()
    ns = g.add_namespace("pathway", NamespaceKind.ONTOLOGY)
    source = g.add_entity(ns, "source")
    mid = g.add_entity(ns, "mid")
    sink = g.add_entity(ns, "sink")
    g.add_relation(source, mid, "activates")
    g.add_relation(mid, sink, "activates")
    return g, source, sink


def diamond_pathway() -> tuple[Graph, int, int]:
    """source -> {A|B} -> sink; 3 of 16 assignments reach the sink."""
    g = Graph()
    ns = g.add_namespace("pathway", NamespaceKind.ONTOLOGY)
    source = g.add_entity(ns, "source")
    a = g.add_entity(ns, "A")
    b = g.add_entity(ns, "B")
    sink = g.add_entity(ns, "sink")
    g.add_relation(source, a, "activates")
    g.add_relation(source, b, "activates")
    g.add_relation(a, sink, "activates")
    g.add_relation(b, sink, "activates")
    return g, source, sink


def nachr_pathway() -> tuple[Graph, int, int]:
    """Receptor feeding three transmitter systems that all converge on
    one cognitive-operations node."""
    g = Graph()
    ns = g.add_namespace("pathway", NamespaceKind.ONTOLOGY)
    receptor = g.add_entity(ns, "nAChR")
    systems = [g.add_entity(ns, name) for name in
               ("cholinergic system", "glutamatergic system", "dopaminergic system")]
    cognition = g.add_entity(ns, "cognitive operations")
    for system in systems:
        g.add_relation(receptor, system, "activates")
        g.add_relation(system, cognition, "activates")
    return g, receptor, cognition


def random_context_graph(rng, max_entities: int = 30, max_namespaces: int = 3,
                         documents: bool = True) -> Graph:
    """Random multigraph over up to three namespaces with occasional
    provenance documents on relations (edge contexts)."""
    g = Graph()
    ns_count = rng.randint(1, max_namespaces)
    namespaces = [
        g.add_namespace(f"ns{i}", rng.choice(list(NamespaceKind)))
        for i in range(ns_count)
    ]
    n = rng.randint(1, max_entities)
    for i in range(n):
        g.add_entity(rng.choice(namespaces), f"e{i}")
    ids = g.entity_ids()
    edge_count = rng.randint(0, 3 * n)
    for _ in range(edge_count):
        a = rng.choice(ids)
        b = rng.choice(ids)
        if a == b:
            continue
        if documents and rng.random() < 0.2:
            prov = Provenance(source_document=rng.choice(ids))
        else:
            prov = Provenance()
        g.add_relation(a, b, rng.choice(RELATION_KIND_POOL), prov)
    return g


def random_layered_graph(rng, max_layers: int = 4, max_width: int = 6):
    """Entities grouped into schema layers plus random edges; returns the
    graph and the list of per-layer entity tuples."""
    g = Graph()
    ns = g.add_namespace("things", NamespaceKind.ENTITY_CLASS)
    layer_count = rng.randint(2, max_layers)
    layers = []
    for i in range(layer_count):
        width = rng.randint(1, max_width)
        layers.append(tuple(g.add_entity(ns, f"L{i}e{j}") for j in range(width)))
    for i in range(layer_count - 1):
        for a in layers[i]:
            for b in layers[i + 1]:
                if rng.random() < 0.45:
                    g.add_relation(a, b, "links")
    # edges inside a layer should never satisfy consecutive adjacency
    ids = g.entity_ids()
    for _ in range(rng.randint(0, 4)):
        a, b = rng.choice(ids), rng.choice(ids)
        if a != b:
            g.add_relation(a, b, "links")
    return g, layers


def random_dag(rng, n: int) -> tuple[Graph, int, int]:
    """Random DAG on n vertices with forward edges only; endpoints are
    the first and last vertex."""
    g = Graph()
    ns = g.add_namespace("pathway", NamespaceKind.ONTOLOGY)
    ids = [g.add_entity(ns, f"v{i}") for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.3:
                g.add_relation(ids[i], ids[j], "activates")
    return g, ids[0], ids[-1]


def random_query_graph(rng, max_entities: int = 12) -> Graph:
    """Small connected-ish random graph for path queries."""
    g = Graph()
    ns = g.add_namespace("net", NamespaceKind.ENTITY_CLASS)
    n = rng.randint(2, max_entities)
    ids = [g.add_entity(ns, f"n{i}") for i in range(n)]
    for _ in range(rng.randint(1, 3 * n)):
        a, b = rng.choice(ids), rng.choice(ids)
        if a != b:
            g.add_relation(a, b, rng.choice(RELATION_KIND_POOL))
    return g
