import random

import pytest

from kgdd.context import CROSS_CONTEXT_KIND, ContextMap, SubgraphMode
from kgdd.errors import UnknownElement
from kgdd.export import graph_from_dict, graph_to_dict
from kgdd.graph import Graph, Origin, Provenance

from conftest import random_context_graph


def two_namespace_graph():
    g = Graph()
    ns_a = g.add_namespace("alpha")
    ns_b = g.add_namespace("beta")
    a1 = g.add_entity(ns_a, "a1")
    a2 = g.add_entity(ns_a, "a2")
    b1 = g.add_entity(ns_b, "b1")
    b2 = g.add_entity(ns_b, "b2")
    return g, ns_a, ns_b, a1, a2, b1, b2


# ----------------------------------------------------------------------
# con

def test_con_of_entity_is_cross_namespace_neighbors():
    g, ns_a, ns_b, a1, a2, b1, b2 = two_namespace_graph()
    g.add_relation(a1, b1, "k")
    g.add_relation(b2, a1, "k")
    g.add_relation(a1, a2, "k")  # intra-namespace, excluded by default
    ctx = ContextMap(g)
    assert ctx.con(a1) == {b1, b2}
    assert ctx.con(a2) == set()


def test_con_intra_namespace_flag():
    g, ns_a, ns_b, a1, a2, b1, b2 = two_namespace_graph()
    g.add_relation(a1, a2, "k")
    ctx = ContextMap(g, include_intra_namespace=True)
    assert ctx.con(a1) == {a2}


def test_con_kind_filter():
    g, ns_a, ns_b, a1, a2, b1, b2 = two_namespace_graph()
    g.add_relation(a1, b1, "keep")
    g.add_relation(a1, b2, "drop")
    ctx = ContextMap(g, context_kinds=["keep"])
    assert ctx.con(a1) == {b1}


def test_explicit_annotations_union_with_implicit():
    g, ns_a, ns_b, a1, a2, b1, b2 = two_namespace_graph()
    g.add_relation(a1, b1, "k")
    ctx = ContextMap(g)
    ctx.annotate(a1, [b2])
    assert ctx.con(a1) == {b1, b2}
    # explicit contexts survive turning implicit ones off
    quiet = ContextMap(g, relations_as_context=False)
    quiet.annotate(a1, [b2])
    assert quiet.con(a1) == {b2}


def test_con_of_relation_uses_provenance_document(corpus_graph):
    g = corpus_graph
    ctx = ContextMap(g)
    doc_ns = g.namespace_id("document")
    d1 = g.find_entity(doc_ns, "d1")
    for rid in g.incident(d1):
        rel = g.relation(rid)
        if rel.kind == "hasAnnotation":
            assert ctx.con(rel) == {d1}
    # the flag removes provenance contexts
    bare = ContextMap(g, provenance_as_context=False)
    for rid in g.incident(d1):
        if g.relation(rid).kind == "hasAnnotation":
            assert bare.con(g.relation(rid)) == set()


def test_con_relation_explicit_annotation():
    g, ns_a, ns_b, a1, a2, b1, b2 = two_namespace_graph()
    rid = g.add_relation(a1, a2, "k")
    ctx = ContextMap(g)
    ctx.annotate_relation(rid, [b1])
    assert ctx.con(g.relation(rid)) == {b1}
    assert ctx.con_restricted_to_relations(b1) == {rid}


def test_con_int_prefers_entity_over_relation():
    g, ns_a, ns_b, a1, a2, b1, b2 = two_namespace_graph()
    rid = g.add_relation(a1, b1, "k")
    assert rid == 0 and a1 == 0  # ids collide across sorts
    ctx = ContextMap(g)
    assert ctx.con(0) == ctx.con_entity(a1)
    # a Relation object forces edge semantics
    assert ctx.con(g.relation(rid)) == ctx.con_relation(rid)


def test_con_unknown_element():
    g = Graph()
    ctx = ContextMap(g)
    with pytest.raises(UnknownElement):
        ctx.con(123)


def test_con_restricted_to_relations_matches_scan():
    rng = random.Random(31)
    for _ in range(20):
        g = random_context_graph(rng)
        ctx = ContextMap(g)
        for e in g.entity_ids():
            expected = {rel.id for rel in g.iter_relations() if e in ctx.con_relation(rel.id)}
            assert ctx.con_restricted_to_relations(e) == expected


def test_con_restricted_cache_tracks_mutation():
    g, ns_a, ns_b, a1, a2, b1, b2 = two_namespace_graph()
    ctx = ContextMap(g)
    assert ctx.con_restricted_to_relations(b1) == set()
    rid = g.add_relation(a1, a2, "k", Provenance(source_document=b1))
    assert ctx.con_restricted_to_relations(b1) == {rid}


def test_context_elements_tags_both_sorts(corpus_graph):
    g = corpus_graph
    ctx = ContextMap(g)
    doc_ns = g.namespace_id("document")
    d1 = g.find_entity(doc_ns, "d1")
    elements = ctx.context_elements(d1)
    entities = {c for sort, c in elements if sort == "entity"}
    relations = {c for sort, c in elements if sort == "relation"}
    assert entities == ctx.con_entity(d1)
    assert relations == ctx.con_restricted_to_relations(d1)
    assert relations  # d1 is provenance for annotation and BEL edges


# ----------------------------------------------------------------------
# extended induced subgraph

def extended_oracle(g, ctx, base, mode):
    """Direct transcription of the widening rule."""
    relations = set()
    vertices = set(base)
    for v in base:
        for rid in g.incident(v):
            rel = g.relation(rid)
            relations.add(rid)
            vertices.update((rel.source, rel.target))
    if mode is SubgraphMode.WITH_EDGE_CONTEXTS:
        for rel in g.iter_relations():
            if base & ctx.con_relation(rel.id):
                relations.add(rel.id)
                vertices.update((rel.source, rel.target))
    return vertices, relations


def test_extended_subgraph_isolated_vertex():
    g = Graph()
    ns = g.add_namespace("t")
    a = g.add_entity(ns, "a")
    ctx = ContextMap(g)
    sub = ctx.extended_induced_subgraph([a])
    assert sub.entity_ids() == [a]
    assert sub.relation_ids() == []


def test_extended_subgraph_single_document(corpus_graph):
    g = corpus_graph
    ctx = ContextMap(g)
    doc_ns = g.namespace_id("document")
    d1 = g.find_entity(doc_ns, "d1")
    only = ctx.extended_induced_subgraph([d1], SubgraphMode.VERTEX_CONTEXTS_ONLY)
    wide = ctx.extended_induced_subgraph([d1], SubgraphMode.WITH_EDGE_CONTEXTS)
    # every relation of the narrow mode touches d1
    for rel in only.iter_relations():
        assert d1 in (rel.source, rel.target)
    # the wide mode adds the BEL edge recorded from d1 between two concepts
    extra = set(wide.relation_ids()) - set(only.relation_ids())
    assert extra
    for rid in extra:
        rel = g.relation(rid)
        assert rel.provenance.source_document == d1
        assert d1 not in (rel.source, rel.target)


def test_extended_subgraph_modes_nest():
    rng = random.Random(47)
    for _ in range(20):
        g = random_context_graph(rng)
        ctx = ContextMap(g)
        ids = g.entity_ids()
        base = {e for e in ids if rng.random() < 0.3} or {ids[0]}
        narrow = ctx.extended_induced_subgraph(base, SubgraphMode.VERTEX_CONTEXTS_ONLY)
        wide = ctx.extended_induced_subgraph(base, SubgraphMode.WITH_EDGE_CONTEXTS)
        assert set(narrow.entity_ids()) <= set(wide.entity_ids())
        assert set(narrow.relation_ids()) <= set(wide.relation_ids())


def test_extended_subgraph_matches_oracle():
    rng = random.Random(53)
    for _ in range(30):
        g = random_context_graph(rng)
        ctx = ContextMap(g)
        ids = g.entity_ids()
        base = {e for e in ids if rng.random() < 0.3} or {ids[0]}
        for mode in SubgraphMode:
            sub = ctx.extended_induced_subgraph(base, mode)
            vertices, relations = extended_oracle(g, ctx, base, mode)
            assert set(sub.entity_ids()) == vertices
            assert set(sub.relation_ids()) == relations


def test_extended_subgraph_of_everything_is_whole_graph(corpus_graph):
    g = corpus_graph
    ctx = ContextMap(g)
    sub = ctx.extended_induced_subgraph(g.entity_ids(), SubgraphMode.WITH_EDGE_CONTEXTS)
    assert sub.entity_ids() == g.entity_ids()
    assert sub.relation_ids() == g.relation_ids()


def test_extended_subgraph_accepts_mode_string(corpus_graph):
    ctx = ContextMap(corpus_graph)
    d1 = corpus_graph.find_entity(corpus_graph.namespace_id("document"), "d1")
    sub = ctx.extended_induced_subgraph([d1], "WithEdgeContexts")
    assert sub.entity_count >= 1


# ----------------------------------------------------------------------
# context hypergraph

def hypergraph_oracle(ctx, base):
    """Direct transcription of the hyperedge definition."""
    contexts_of = {v: ctx.con_entity(v) for v in base}
    x = set(base)
    for c in contexts_of.values():
        x |= c
    edges = set()
    for v in x:
        edges.add(frozenset({v}) | (ctx.con_entity(v) & x))
    sharers = {}
    for v in base:
        for c in contexts_of[v]:
            sharers.setdefault(c, set()).add(v)
    for c, members in sharers.items():
        if len(members) >= 2:
            edges.add(frozenset({c}) | frozenset(members))
    return x, edges


def test_hypergraph_isolated_vertices():
    g = Graph()
    ns = g.add_namespace("t")
    a = g.add_entity(ns, "a")
    b = g.add_entity(ns, "b")
    ctx = ContextMap(g)
    hg = ctx.context_hypergraph([a, b])
    assert hg.vertices == {a, b}
    assert hg.hyperedges == {frozenset({a}), frozenset({b})}


def test_hypergraph_shared_context(corpus_graph):
    g = corpus_graph
    ctx = ContextMap(g)
    doc_ns = g.namespace_id("document")
    mesh_ns = g.namespace_id("mesh")
    d1 = g.find_entity(doc_ns, "d1")
    d2 = g.find_entity(doc_ns, "d2")
    nachr = g.find_entity(mesh_ns, "M09")
    hg = ctx.context_hypergraph([d1, d2])
    # M09 is a keyword on both documents, so it binds them into one hyperedge
    assert frozenset({nachr, d1, d2}) in hg.hyperedges


def test_hypergraph_matches_definition():
    rng = random.Random(61)
    for _ in range(30):
        g = random_context_graph(rng)
        ctx = ContextMap(g)
        ids = g.entity_ids()
        base = {e for e in ids if rng.random() < 0.4} or {ids[0]}
        hg = ctx.context_hypergraph(base)
        vertices, edges = hypergraph_oracle(ctx, base)
        assert hg.vertices == vertices
        assert hg.hyperedges == edges


def test_hypergraph_invariants():
    rng = random.Random(67)
    for _ in range(20):
        g = random_context_graph(rng)
        ctx = ContextMap(g)
        ids = g.entity_ids()
        base = {e for e in ids if rng.random() < 0.4} or {ids[0]}
        hg = ctx.context_hypergraph(base)
        assert base <= hg.vertices
        for edge in hg.hyperedges:
            assert edge  # never empty
            assert edge <= hg.vertices
        covered = set().union(*hg.hyperedges)
        assert covered == hg.vertices


def test_hypergraph_accepts_subgraph(corpus_graph):
    g = corpus_graph
    ctx = ContextMap(g)
    doc_ns = g.namespace_id("document")
    sub = g.namespace_subgraph(doc_ns)
    hg = ctx.context_hypergraph(sub)
    assert set(sub.entity_ids()) <= hg.vertices


def test_hypergraph_serialization(corpus_graph):
    ctx = ContextMap(corpus_graph)
    doc_ns = corpus_graph.namespace_id("document")
    d1 = corpus_graph.find_entity(doc_ns, "d1")
    hg = ctx.context_hypergraph([d1])
    doc = hg.to_dict(corpus_graph)
    assert set(doc["vertices"]) == hg.vertices
    assert len(doc["hyperedges"]) == len(hg.hyperedges)
    assert doc["labels"][str(d1)] == "d1"
    dot = hg.to_dot(corpus_graph)
    assert dot.startswith("graph hypergraph")
    assert "--" in dot


# ----------------------------------------------------------------------
# cross-context inference

def inference_oracle_images(g, ctx, source_ns, target_ns):
    """Quadratic brute force over the pre-mutation graph."""
    src = g.namespace(source_ns).members
    tgt = g.namespace(target_ns).members
    pairs = set()
    for rel in g.iter_relations():
        if rel.source == rel.target:
            continue
        if rel.source not in src or rel.target not in src:
            continue
        for x in ctx.con_entity(rel.source) & tgt:
            for y in ctx.con_entity(rel.target) & tgt:
                if x != y and not g.connected(x, y):
                    pairs.add(frozenset({x, y}))
    return pairs


def inference_oracle_source_pair(g, ctx, source_ns, target_ns):
    src = sorted(g.namespace(source_ns).members)
    tgt = g.namespace(target_ns).members
    pairs = set()
    for i, e1 in enumerate(src):
        for e2 in src[i + 1:]:
            if g.connected(e1, e2):
                continue
            img1 = ctx.con_entity(e1) & tgt
            img2 = ctx.con_entity(e2) & tgt
            if any(x != y and g.connected(x, y) for x in img1 for y in img2):
                pairs.add(frozenset({e1, e2}))
    return pairs


def clone(g):
    return graph_from_dict(graph_to_dict(g))


def test_inference_bipartite_product():
    # one source relation, two images a side: expect the full 2x2 product
    g = Graph()
    src = g.add_namespace("src")
    tgt = g.add_namespace("tgt")
    s1 = g.add_entity(src, "s1")
    s2 = g.add_entity(src, "s2")
    images = [g.add_entity(tgt, f"t{i}") for i in range(4)]
    g.add_relation(s1, s2, "link")
    g.add_relation(s1, images[0], "ctx")
    g.add_relation(s1, images[1], "ctx")
    g.add_relation(s2, images[2], "ctx")
    g.add_relation(s2, images[3], "ctx")
    ctx = ContextMap(g)
    added = ctx.infer_cross_context_relations(src, tgt)
    got = {frozenset({r.source, r.target}) for r in added}
    assert got == {frozenset({images[i], images[j]}) for i in (0, 1) for j in (2, 3)}
    for rel in added:
        assert rel.kind == CROSS_CONTEXT_KIND
        assert rel.provenance.origin == Origin.DERIVED_CROSS_CONTEXT
        assert rel.provenance.derived_from == src


def test_inference_skips_connected_and_self_images():
    g = Graph()
    src = g.add_namespace("src")
    tgt = g.add_namespace("tgt")
    s1 = g.add_entity(src, "s1")
    s2 = g.add_entity(src, "s2")
    t1 = g.add_entity(tgt, "t1")
    t2 = g.add_entity(tgt, "t2")
    g.add_relation(s1, s2, "link")
    # shared image t1 on both sides; t2 already wired to t1
    g.add_relation(s1, t1, "ctx")
    g.add_relation(s2, t1, "ctx")
    g.add_relation(s2, t2, "ctx")
    g.add_relation(t1, t2, "existing")
    ctx = ContextMap(g)
    assert ctx.infer_cross_context_relations(src, tgt) == []


def test_inference_idempotent(enriched_graph):
    g = enriched_graph
    ctx = ContextMap(g)
    doc_ns = g.namespace_id("document")
    mesh_ns = g.namespace_id("mesh")
    first = ctx.infer_cross_context_relations(doc_ns, mesh_ns)
    assert first
    before = g.relation_count
    again = ctx.infer_cross_context_relations(doc_ns, mesh_ns)
    assert again == []
    assert g.relation_count == before


def test_inference_no_parallel_duplicates(enriched_graph):
    g = enriched_graph
    ctx = ContextMap(g)
    doc_ns = g.namespace_id("document")
    mesh_ns = g.namespace_id("mesh")
    added = ctx.infer_cross_context_relations(doc_ns, mesh_ns)
    seen = set()
    for rel in added:
        key = frozenset({rel.source, rel.target})
        assert key not in seen
        seen.add(key)


def test_inference_matches_brute_force():
    rng = random.Random(71)
    checked = 0
    for _ in range(40):
        g = random_context_graph(rng)
        namespaces = [ns.id for ns in g.namespaces()]
        if len(namespaces) < 2:
            continue
        source_ns, target_ns = rng.sample(namespaces, 2)
        pre = clone(g)
        expected = inference_oracle_images(pre, ContextMap(pre), source_ns, target_ns)
        ctx = ContextMap(g)
        added = ctx.infer_cross_context_relations(source_ns, target_ns)
        got = {frozenset({r.source, r.target}) for r in added}
        assert got == expected
        assert len(added) == len(got)  # one edge per unordered pair
        checked += 1
    assert checked >= 20


def test_inference_source_pair_mode():
    g = Graph()
    src = g.add_namespace("src")
    tgt = g.add_namespace("tgt")
    s1 = g.add_entity(src, "s1")
    s2 = g.add_entity(src, "s2")
    s3 = g.add_entity(src, "s3")
    t1 = g.add_entity(tgt, "t1")
    t2 = g.add_entity(tgt, "t2")
    g.add_relation(s1, t1, "ctx")
    g.add_relation(s2, t2, "ctx")
    g.add_relation(s3, t2, "ctx")
    g.add_relation(t1, t2, "link")
    ctx = ContextMap(g)
    added = ctx.infer_cross_context_relations(src, tgt, mode="source-pair")
    got = {frozenset({r.source, r.target}) for r in added}
    # s1/s2 and s1/s3 have linked images; s2/s3 share an image with no link
    assert got == {frozenset({s1, s2}), frozenset({s1, s3})}
    for rel in added:
        assert rel.provenance.derived_from == tgt


def test_inference_source_pair_matches_brute_force():
    rng = random.Random(79)
    checked = 0
    for _ in range(40):
        g = random_context_graph(rng)
        namespaces = [ns.id for ns in g.namespaces()]
        if len(namespaces) < 2:
            continue
        source_ns, target_ns = rng.sample(namespaces, 2)
        pre = clone(g)
        expected = inference_oracle_source_pair(pre, ContextMap(pre), source_ns, target_ns)
        ctx = ContextMap(g)
        added = ctx.infer_cross_context_relations(source_ns, target_ns, mode="source-pair")
        got = {frozenset({r.source, r.target}) for r in added}
        assert got == expected
        checked += 1
    assert checked >= 20


def test_inference_rejects_unknown_mode(corpus_graph):
    ctx = ContextMap(corpus_graph)
    with pytest.raises(ValueError):
        ctx.infer_cross_context_relations(0, 1, mode="sideways")
