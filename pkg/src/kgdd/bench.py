"""Seeded desk-scale benchmark.

Generates a dense random graph, replays a deterministic mixed workload
of neighborhood, extended-subgraph and stream queries against it, and
reports nearest-rank latency percentiles.  The workload (not the
timings) is fully determined by the seed; its hash lets two runs prove
they measured the same thing.
"""

from __future__ import annotations

import hashlib
import json
import random
import time

from .context import ContextMap, SubgraphMode
from .graph import Graph, NamespaceKind
from .validation import PathQuery, knowledge_stream

RELATION_KINDS = ("rel0", "rel1", "rel2", "rel3", "rel4")
NAMESPACE_NAMES = ("alpha", "beta", "gamma")

NEIGHBORS = "neighbors"
SUBGRAPH = "subgraph"
STREAM = "stream"

STREAM_MAX_LENGTH = 2
STREAM_MAX_PATHS = 50


def build_random_graph(nodes: int, edges: int, seed: int) -> Graph:
    """Random multigraph: nodes spread round-robin over three namespaces,
    edges drawn uniformly (no self-loops)."""
    rng = random.Random(seed)
    graph = Graph()
    namespaces = [graph.add_namespace(name, NamespaceKind.ENTITY_CLASS)
                  for name in NAMESPACE_NAMES]
    for i in range(nodes):
        graph.add_entity(namespaces[i % len(namespaces)], f"e{i}")
    for _ in range(edges):
        source = rng.randrange(nodes)
        target = rng.randrange(nodes)
        while target == source:
            target = rng.randrange(nodes)
        graph.add_relation(source, target, RELATION_KINDS[rng.randrange(len(RELATION_KINDS))])
    return graph


def build_workload(nodes: int, queries: int, seed: int) -> list[tuple]:
    """Deterministic query sequence: 80% neighborhood lookups, 15%
    extended subgraphs, 5% bounded knowledge streams."""
    rng = random.Random(seed + 1)
    workload: list[tuple] = []
    for _ in range(queries):
        roll = rng.random()
        if roll < 0.80:
            workload.append((NEIGHBORS, rng.randrange(nodes)))
        elif roll < 0.95:
            workload.append((SUBGRAPH, rng.randrange(nodes)))
        else:
            source = rng.randrange(nodes)
            target = rng.randrange(nodes)
            while target == source:
                target = rng.randrange(nodes)
            workload.append((STREAM, source, target))
    return workload


def workload_hash(workload: list[tuple]) -> str:
    payload = json.dumps(workload, separators=(",", ":")).encode()
    return hashlib.sha256(payload).hexdigest()


def percentile(sorted_times: list[float], q: float) -> float:
    """Nearest-rank percentile over an ascending list."""
    if not sorted_times:
        return 0.0
    rank = max(1, -(-len(sorted_times) * q // 100))
    return sorted_times[int(rank) - 1]


def run(nodes: int, edges: int, queries: int, seed: int) -> dict:
    if nodes < 2 or edges < 0 or queries < 0:
        raise ValueError("need nodes >= 2, edges >= 0, queries >= 0")
    started = time.perf_counter()
    graph = build_random_graph(nodes, edges, seed)
    build_seconds = time.perf_counter() - started
    contexts = ContextMap(graph)
    workload = build_workload(nodes, queries, seed)

    timings: dict[str, list[float]] = {NEIGHBORS: [], SUBGRAPH: [], STREAM: []}
    for query in workload:
        kind = query[0]
        t0 = time.perf_counter()
        if kind == NEIGHBORS:
            graph.neighbors(query[1])
        elif kind == SUBGRAPH:
            contexts.extended_induced_subgraph(
                [query[1]], SubgraphMode.VERTEX_CONTEXTS_ONLY)
        else:
            knowledge_stream(graph, PathQuery(
                source=query[1], target=query[2],
                max_length=STREAM_MAX_LENGTH, max_paths=STREAM_MAX_PATHS))
        timings[kind].append(time.perf_counter() - t0)

    report: dict = {
        "parameters": {"nodes": nodes, "edges": edges, "queries": queries, "seed": seed},
        "workload_hash": workload_hash(workload),
        "build_seconds": round(build_seconds, 3),
        "total_seconds": round(time.perf_counter() - started, 3),
        "timings_ms": {},
    }
    for kind, times in timings.items():
        times.sort()
        report["timings_ms"][kind] = {
            "count": len(times),
            "p50": round(percentile(times, 50) * 1000, 4),
            "p90": round(percentile(times, 90) * 1000, 4),
            "p99": round(percentile(times, 99) * 1000, 4),
            "max": round((times[-1] if times else 0.0) * 1000, 4),
        }
    return report
