"""Command-line entry point.

Subcommands are thin wrappers over the library: ingest builds a snapshot
from terminology and corpus files, validate answers a path query against
a snapshot, bench runs the seeded benchmark, serve starts the HTTP API,
and export writes a snapshot in another format.  Results go to stdout as
JSON (or the requested text format); logs and errors go to stderr.

Exit codes: 0 success (a not-connected validation result is still a
result), 1 runtime error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import bench as bench_mod
from . import export as export_mod
from .errors import KgddError
from .graph import Graph
from .ingest import Ingestor, derive_meta_relations
from .validation import PathQuery, knowledge_stream, shortest_path, validate_influence

log = logging.getLogger("kgdd")


def _load_snapshot(path: str) -> Graph:
    with open(path, encoding="utf-8") as fp:
        return export_mod.load(fp)


def _print_json(data: dict) -> None:
    json.dump(data, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def cmd_ingest(args: argparse.Namespace) -> int:
    ingestor = Ingestor()
    for term_path in args.terminology:
        ns = ingestor.load_terminology(term_path)
        log.info("loaded terminology %s as namespace %s", term_path,
                 ingestor.graph.namespace(ns).name)
    report = ingestor.ingest_corpus(args.corpus, keyword_ns=args.keyword_ns)
    if args.derive_meta:
        report = derive_meta_relations(ingestor.graph)
        report.unresolved = report.unresolved or []
    out = Path(args.out)
    with open(out, "w", encoding="utf-8") as fp:
        export_mod.save(ingestor.graph, fp)
    log.info("wrote snapshot %s", out)
    _print_json(report.to_dict())
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    graph = _load_snapshot(args.snapshot)
    kinds = frozenset(args.kinds.split(",")) if args.kinds else None
    query = PathQuery(source=args.source, target=args.target,
                      max_length=args.max_len, allowed_kinds=kinds,
                      max_paths=args.max_paths)
    best = shortest_path(graph, query)
    stream = knowledge_stream(graph, query)
    result: dict = {
        "status": "ok" if best is not None else "not_connected",
        "source": args.source,
        "target": args.target,
        "max_length": args.max_len,
        "shortest": None,
        "stream": {"path_count": len(stream), "truncated": stream.truncated},
    }
    if best is not None:
        result["shortest"] = {
            "entities": list(best.entities),
            "labels": [graph.entity(e).preferred_label for e in best.entities],
            "length": best.length,
        }
    if args.mdd:
        mdd = validate_influence(graph, query)
        result["mdd"] = {
            "solution_count": mdd.count_solutions(),
            "node_count": mdd.node_count,
        }
        if args.dot_out:
            Path(args.dot_out).write_text(mdd.to_dot(), encoding="utf-8")
            result["mdd"]["dot"] = args.dot_out
    _print_json(result)
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    report = bench_mod.run(args.nodes, args.edges, args.queries, args.seed)
    _print_json(report)
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    if not args.snapshot:
        raise KgddError("serve needs --snapshot or KGDD_SNAPSHOT")
    host, _, port_text = args.listen.rpartition(":")
    if not host or not port_text.isdigit():
        raise KgddError(f"listen address must be host:port, got {args.listen!r}")
    graph = _load_snapshot(args.snapshot)
    app = create_app(graph, session_ttl=args.session_ttl)
    log.info("serving %d entities / %d relations on %s",
             graph.entity_count, graph.relation_count, args.listen)
    uvicorn.run(app, host=host, port=int(port_text), log_level="warning")
    return 0


def cmd_export(args: argparse.Namespace) -> int:
    graph = _load_snapshot(args.snapshot)
    if args.format == "ntriples":
        sys.stdout.write(export_mod.to_ntriples(graph))
    elif args.format == "json":
        sys.stdout.write(export_mod.dumps(graph))
    else:
        sys.stdout.write(export_mod.graph_to_dot(graph))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kgdd",
        description="Context-annotated knowledge graphs with decision-diagram "
                    "compilation.")
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="build a graph snapshot from files")
    p.add_argument("--terminology", action="append", default=[],
                   help="terminology file (.tsv or .obo); repeatable")
    p.add_argument("--corpus", required=True, help="JSON Lines corpus file")
    p.add_argument("--out", required=True, help="snapshot output path")
    p.add_argument("--keyword-ns", default=None,
                   help="namespace for keyword resolution (default: first terminology)")
    p.add_argument("--no-derive-meta", dest="derive_meta", action="store_false",
                   help="skip sameAffiliation/isCoAuthor derivation")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("validate", help="path and influence validation")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--from", dest="source", type=int, required=True,
                   help="source entity id")
    p.add_argument("--to", dest="target", type=int, required=True,
                   help="target entity id")
    p.add_argument("--max-len", type=int, default=4)
    p.add_argument("--kinds", default=None, help="comma-separated relation kinds")
    p.add_argument("--max-paths", type=int, default=None)
    p.add_argument("--mdd", action="store_true",
                   help="also compile the influence diagram")
    p.add_argument("--dot-out", default=None,
                   help="write the influence diagram as DOT (needs --mdd)")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("bench", help="seeded desk-scale benchmark")
    p.add_argument("--nodes", type=int, default=10000)
    p.add_argument("--edges", type=int, default=100000)
    p.add_argument("--queries", type=int, default=1000)
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("serve", help="start the HTTP API")
    p.add_argument("--snapshot", default=os.environ.get("KGDD_SNAPSHOT"),
                   help="snapshot path (env KGDD_SNAPSHOT)")
    p.add_argument("--listen", default=os.environ.get("KGDD_LISTEN", "127.0.0.1:8000"),
                   help="host:port (env KGDD_LISTEN)")
    p.add_argument("--session-ttl", type=float, default=1800.0,
                   help="route session idle expiry in seconds")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("export", help="write a snapshot in another format")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--format", choices=("ntriples", "json", "dot"), default="json")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "validate" and args.dot_out and not args.mdd:
        parser.error("--dot-out requires --mdd")
    try:
        return args.func(args)
    except KgddError as exc:
        json.dump({"error": exc.code, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 1
    except (OSError, ValueError) as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
