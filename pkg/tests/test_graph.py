import random

import pytest

from kgdd.errors import (
    CycleDetected,
    DuplicateLabelInNamespace,
    UnknownEntity,
    UnknownNamespace,
)
from kgdd.graph import Graph, NamespaceKind, Origin, Provenance

from conftest import random_context_graph


def small_graph():
    g = Graph()
    ns = g.add_namespace("things", NamespaceKind.ENTITY_CLASS)
    a = g.add_entity(ns, "a")
    b = g.add_entity(ns, "b")
    c = g.add_entity(ns, "c")
    return g, ns, a, b, c


def test_add_entity_merges_on_duplicate_label():
    g = Graph()
    ns = g.add_namespace("t")
    first = g.add_entity(ns, "thing", ["syn1"])
    second = g.add_entity(ns, "thing", ["syn2"], meta={"k": "v"})
    assert first == second
    ent = g.entity(first)
    assert ent.synonyms == ["syn1", "syn2"]
    assert ent.meta == {"k": "v"}
    assert g.entity_count == 1


def test_add_entity_reject_policy():
    g = Graph(duplicate_policy="reject")
    ns = g.add_namespace("t")
    g.add_entity(ns, "thing")
    with pytest.raises(DuplicateLabelInNamespace):
        g.add_entity(ns, "thing")


def test_find_entity_covers_synonyms():
    g = Graph()
    ns = g.add_namespace("t")
    eid = g.add_entity(ns, "preferred", ["alias one", "alias two"])
    assert g.find_entity(ns, "preferred") == eid
    assert g.find_entity(ns, "alias two") == eid
    assert g.find_entity(ns, "missing") is None


def test_same_label_in_different_namespaces_is_fine():
    g = Graph()
    ns1 = g.add_namespace("one")
    ns2 = g.add_namespace("two")
    a = g.add_entity(ns1, "shared")
    b = g.add_entity(ns2, "shared")
    assert a != b


def test_namespace_reuse_and_kind_conflict():
    g = Graph()
    ns = g.add_namespace("t", NamespaceKind.TERMINOLOGY)
    assert g.add_namespace("t", NamespaceKind.TERMINOLOGY) == ns
    with pytest.raises(ValueError):
        g.add_namespace("t", NamespaceKind.ONTOLOGY)


def test_unknown_lookups_raise():
    g = Graph()
    with pytest.raises(UnknownNamespace):
        g.namespace(99)
    with pytest.raises(UnknownNamespace):
        g.namespace_id("missing")
    with pytest.raises(UnknownEntity):
        g.entity(0)
    ns = g.add_namespace("t")
    a = g.add_entity(ns, "a")
    with pytest.raises(UnknownEntity):
        g.add_relation(a, 42, "k")


def test_neighbors_ignores_direction():
    g, ns, a, b, c = small_graph()
    g.add_relation(a, b, "x")
    g.add_relation(c, a, "y")
    assert g.neighbors(a) == {b, c}
    assert g.neighbors(b) == {a}


def test_incident_counts_self_loop_once():
    g, ns, a, b, c = small_graph()
    loop = g.add_relation(a, a, "self")
    out = g.add_relation(a, b, "x")
    inc = g.add_relation(c, a, "y")
    assert sorted(g.incident(a)) == sorted([loop, out, inc])


def test_ensure_relation_deduplicates():
    g, ns, a, b, c = small_graph()
    rid, created = g.ensure_relation(a, b, "x")
    assert created
    rid2, created2 = g.ensure_relation(a, b, "x")
    assert rid2 == rid and not created2
    # directed kinds may exist in both directions
    rid3, created3 = g.ensure_relation(b, a, "x")
    assert created3 and rid3 != rid


def test_ensure_relation_symmetric_kinds_match_either_direction():
    g, ns, a, b, c = small_graph()
    rid, created = g.ensure_relation(a, b, "isCoAuthor")
    assert created
    rid2, created2 = g.ensure_relation(b, a, "isCoAuthor")
    assert rid2 == rid and not created2


def test_connected_any_direction():
    g, ns, a, b, c = small_graph()
    g.add_relation(a, b, "x")
    assert g.connected(a, b) and g.connected(b, a)
    assert not g.connected(a, c)


def test_relations_are_append_only_with_dense_ids():
    g, ns, a, b, c = small_graph()
    ids = [g.add_relation(a, b, "x") for _ in range(3)]
    assert ids == [0, 1, 2]
    assert g.relation_count == 3


def test_version_counter_bumps_on_mutation():
    g = Graph()
    v0 = g.version
    ns = g.add_namespace("t")
    a = g.add_entity(ns, "a")
    b = g.add_entity(ns, "b")
    g.add_relation(a, b, "x")
    assert g.version > v0


def test_adjacency_matches_relation_scan():
    # neighbor sets must equal a from-scratch rebuild off the relation list
    rng = random.Random(11)
    for _ in range(25):
        g = random_context_graph(rng)
        rebuilt: dict[int, set[int]] = {e: set() for e in g.entity_ids()}
        for rel in g.iter_relations():
            if rel.source != rel.target:
                rebuilt[rel.source].add(rel.target)
                rebuilt[rel.target].add(rel.source)
            else:
                rebuilt[rel.source].add(rel.source)
        for e in g.entity_ids():
            assert g.neighbors(e) == rebuilt[e]


def test_induced_subgraph_matches_filter():
    rng = random.Random(23)
    for _ in range(25):
        g = random_context_graph(rng)
        ids = g.entity_ids()
        chosen = {e for e in ids if rng.random() < 0.5}
        sub = g.induced_subgraph(chosen)
        assert set(sub.entity_ids()) == chosen
        expected = {rel.id for rel in g.iter_relations()
                    if rel.source in chosen and rel.target in chosen}
        assert set(sub.relation_ids()) == expected
        # ids and payloads preserved
        for e in chosen:
            assert sub.entity(e).preferred_label == g.entity(e).preferred_label
        for rid in expected:
            assert sub.relation(rid) == g.relation(rid)


def test_induced_subgraph_kind_filter():
    g, ns, a, b, c = small_graph()
    keep = g.add_relation(a, b, "keep")
    g.add_relation(a, b, "drop")
    sub = g.induced_subgraph([a, b], kinds=["keep"])
    assert sub.relation_ids() == [keep]


def test_namespace_subgraph_keeps_only_internal_relations():
    g = Graph()
    ns1 = g.add_namespace("one")
    ns2 = g.add_namespace("two")
    a = g.add_entity(ns1, "a")
    b = g.add_entity(ns1, "b")
    x = g.add_entity(ns2, "x")
    inside = g.add_relation(a, b, "k")
    g.add_relation(a, x, "k")
    sub = g.namespace_subgraph(ns1)
    assert set(sub.entity_ids()) == {a, b}
    assert sub.relation_ids() == [inside]


def test_subgraph_namespace_membership_is_rebuilt():
    g = Graph()
    ns = g.add_namespace("one")
    a = g.add_entity(ns, "a")
    g.add_entity(ns, "b")
    sub = g.induced_subgraph([a])
    assert sub.namespace(ns).members == {a}
    # the original is untouched
    assert len(g.namespace(ns).members) == 2


def test_hierarchy_order_children_before_parents():
    g = Graph()
    ns = g.add_namespace("t")
    root = g.add_entity(ns, "root")
    mid = g.add_entity(ns, "mid")
    leaf = g.add_entity(ns, "leaf")
    g.add_relation(mid, root, "childOf")
    g.add_relation(leaf, mid, "childOf")
    order = g.hierarchy_order(ns)
    assert order.index(leaf) < order.index(mid) < order.index(root)


def test_hierarchy_cycle_detected():
    g = Graph()
    ns = g.add_namespace("t")
    a = g.add_entity(ns, "a")
    b = g.add_entity(ns, "b")
    g.add_relation(a, b, "childOf")
    g.add_relation(b, a, "childOf")
    with pytest.raises(CycleDetected) as err:
        g.hierarchy_order(ns)
    assert err.value.cycle


def test_cross_context_provenance_requires_origin_namespace():
    with pytest.raises(ValueError):
        Provenance(origin=Origin.DERIVED_CROSS_CONTEXT)
    prov = Provenance(origin=Origin.DERIVED_CROSS_CONTEXT, derived_from=0)
    assert prov.derived_from == 0
