"""HTTP facade over a read-only graph snapshot.

Every endpoint is a thin serialization of a library call: entity search,
extended subgraphs, MDD compilation, and stateful decision-route
sessions (restrict step by step, undo by replaying the trail).  Sessions
and compiled diagrams live in memory; sessions expire after an idle TTL.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from typing import Callable

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse

from . import export as export_mod
from .compile import CompilationSpec, LayerSpec, compile_activity, compile_combinations
from .context import ContextMap, SubgraphMode
from .errors import KgddError
from .graph import Graph
from .mdd import Mdd

DEFAULT_SESSION_TTL = 1800.0
MAX_PAGE_SIZE = 500

# HTTP status per stable error code; anything unlisted is a 400.
STATUS_BY_CODE = {
    "UnknownNamespace": 404,
    "UnknownEntity": 404,
    "UnknownRelation": 404,
    "UnknownElement": 404,
    "UnknownMdd": 404,
    "UnknownSession": 404,
    "UnknownLayer": 400,
    "ValueOutOfDomain": 400,
    "BadRequest": 400,
    "NothingToUndo": 400,
    "DeadEndChoice": 409,
    "SessionExpired": 410,
}


class ServiceError(Exception):
    def __init__(self, code: str, message: str, param: str | None = None):
        super().__init__(message)
        self.code = code
        self.message = message
        self.param = param


def _error_response(code: str, message: str, param: str | None) -> JSONResponse:
    body = {"code": code, "message": message, "param": param}
    return JSONResponse(status_code=STATUS_BY_CODE.get(code, 400), content=body)


@dataclass(slots=True)
class RouteSession:
    id: str
    mdd_id: str
    base: Mdd
    current: Mdd
    trail: list[tuple[str, object]] = field(default_factory=list)
    last_access: float = 0.0


def _require(payload: dict, key: str, kinds: tuple[type, ...], what: str):
    value = payload.get(key)
    if not isinstance(value, kinds) or isinstance(value, bool):
        raise ServiceError("BadRequest", f"field {key!r} must be {what}", param=key)
    return value


def create_app(graph: Graph, *, session_ttl: float = DEFAULT_SESSION_TTL,
               clock: Callable[[], float] = time.monotonic) -> FastAPI:
    app = FastAPI(title="kgdd", docs_url=None, redoc_url=None)
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                       allow_headers=["*"])
    contexts = ContextMap(graph)
    lock = threading.Lock()
    mdds: dict[str, Mdd] = {}
    sessions: dict[str, RouteSession] = {}
    counters = {"mdd": 0, "route": 0}

    @app.exception_handler(KgddError)
    def _kgdd_error(request: Request, exc: KgddError) -> JSONResponse:
        return _error_response(exc.code, str(exc), getattr(exc, "param", None))

    @app.exception_handler(ServiceError)
    def _service_error(request: Request, exc: ServiceError) -> JSONResponse:
        return _error_response(exc.code, exc.message, exc.param)

    @app.exception_handler(RequestValidationError)
    def _validation_error(request: Request, exc: RequestValidationError) -> JSONResponse:
        first = exc.errors()[0] if exc.errors() else {}
        param = ".".join(str(part) for part in first.get("loc", ())) or None
        return _error_response("BadRequest", first.get("msg", "invalid request"), param)

    @app.exception_handler(ValueError)
    def _value_error(request: Request, exc: ValueError) -> JSONResponse:
        return _error_response("BadRequest", str(exc), None)

    # ------------------------------------------------------------------
    # lookup helpers

    def get_mdd(mdd_id: str) -> Mdd:
        with lock:
            found = mdds.get(mdd_id)
        if found is None:
            raise ServiceError("UnknownMdd", f"no compiled diagram {mdd_id!r}")
        return found

    def get_session(session_id: str) -> RouteSession:
        now = clock()
        with lock:
            session = sessions.get(session_id)
            if session is None:
                raise ServiceError("UnknownSession", f"no route session {session_id!r}")
            if now - session.last_access > session_ttl:
                del sessions[session_id]
                raise ServiceError("SessionExpired",
                                   f"route session {session_id!r} expired")
            session.last_access = now
            return session

    def session_summary(session: RouteSession) -> dict:
        current = session.current
        layers = []
        decided = {name: value for name, value in session.trail}
        for var in session.base.variables:
            if var.name in decided:
                item: dict = {"name": var.name, "decided": True,
                              "chosen": decided[var.name]}
                if var.entity is not None:
                    item["entity"] = var.entity
                layers.append(item)
                continue
            idx = current.space.var_index(var.name)
            values = [
                {"value": value,
                 "count": current.restrict(idx, value).count_solutions()}
                for value in var.values
            ]
            item = {"name": var.name, "decided": False, "values": values}
            if var.entity is not None:
                item["entity"] = var.entity
            layers.append(item)
        return {
            "session_id": session.id,
            "mdd_id": session.mdd_id,
            "solution_count": current.count_solutions(),
            "trail": [{"layer": name, "value": value} for name, value in session.trail],
            "layers": layers,
        }

    # ------------------------------------------------------------------
    # graph reads

    @app.get("/namespaces")
    def list_namespaces() -> list[dict]:
        return [
            {"id": ns.id, "name": ns.name, "kind": ns.kind.value, "size": len(ns.members)}
            for ns in graph.namespaces()
        ]

    @app.get("/entities")
    def list_entities(ns: str | None = None, label: str | None = None,
                      page: int = 1, page_size: int = 50) -> dict:
        if page < 1 or page_size < 1 or page_size > MAX_PAGE_SIZE:
            raise ServiceError("BadRequest",
                               f"page must be >= 1 and page_size in 1..{MAX_PAGE_SIZE}",
                               param="page")
        ns_id = graph.namespace_id(ns) if ns is not None else None
        needle = label.lower() if label else None
        matches = []
        for ent in graph.iter_entities():
            if ns_id is not None and ent.namespace != ns_id:
                continue
            if needle is not None:
                haystack = [ent.preferred_label.lower()]
                haystack.extend(s.lower() for s in ent.synonyms)
                if not any(needle in h for h in haystack):
                    continue
            matches.append(ent)
        start = (page - 1) * page_size
        items = [
            {"id": ent.id, "namespace": graph.namespace(ent.namespace).name,
             "label": ent.preferred_label, "synonyms": list(ent.synonyms)}
            for ent in matches[start:start + page_size]
        ]
        return {"total": len(matches), "page": page, "page_size": page_size,
                "items": items}

    @app.post("/subgraph/extended")
    def subgraph_extended(payload: dict) -> dict:
        vertices = _require(payload, "vertices", (list,), "a list of entity ids")
        mode_name = payload.get("mode", SubgraphMode.VERTEX_CONTEXTS_ONLY.value)
        try:
            mode = SubgraphMode(mode_name)
        except ValueError:
            raise ServiceError("BadRequest", f"unknown mode {mode_name!r}", param="mode")
        result = contexts.extended_induced_subgraph(vertices, mode)
        return export_mod.graph_to_dict(result)

    # ------------------------------------------------------------------
    # compilation and routes

    def parse_layers(raw_layers: list) -> list[LayerSpec]:
        layers = []
        for i, raw in enumerate(raw_layers):
            if not isinstance(raw, dict):
                raise ServiceError("BadRequest", "each layer must be an object",
                                   param="layers")
            if "namespace" in raw:
                ns_id = graph.namespace_id(raw["namespace"])
                layers.append(LayerSpec.from_namespace(graph, ns_id,
                                                       raw.get("name")))
                continue
            entities = raw.get("entities")
            if not isinstance(entities, list) or not entities:
                raise ServiceError("BadRequest",
                                   f"layer {i} needs a namespace or an entity list",
                                   param="layers")
            layers.append(LayerSpec(name=raw.get("name", f"layer{i}"),
                                    entities=tuple(entities)))
        return layers

    @app.post("/mdd/compile")
    def mdd_compile(payload: dict) -> dict:
        kind = payload.get("kind", "combinations")
        if kind == "combinations":
            raw_layers = _require(payload, "layers", (list,), "a list of layers")
            spec = CompilationSpec(
                layers=tuple(parse_layers(raw_layers)),
                root_anchor=payload.get("root_anchor"),
                end_anchor=payload.get("end_anchor"),
                depth_limit=payload.get("depth_limit"),
                adjacency=payload.get("adjacency", "consecutive"),
            )
            mdd = compile_combinations(graph, spec)
        elif kind == "activity":
            entities = _require(payload, "entities", (list,), "a list of entity ids")
            source = _require(payload, "source", (int,), "an entity id")
            sink = _require(payload, "sink", (int,), "an entity id")
            kinds = payload.get("kinds")
            pathway = graph.induced_subgraph(entities, kinds)
            mdd = compile_activity(pathway, source, sink, payload.get("order"))
        else:
            raise ServiceError("BadRequest", f"unknown compile kind {kind!r}",
                               param="kind")
        with lock:
            counters["mdd"] += 1
            mdd_id = f"mdd-{counters['mdd']}"
            mdds[mdd_id] = mdd
        variables = []
        for var in mdd.variables:
            item: dict = {"name": var.name, "values": list(var.values)}
            if var.entity is not None:
                item["entity"] = var.entity
            variables.append(item)
        return {"mdd_id": mdd_id, "node_count": mdd.node_count,
                "solution_count": mdd.count_solutions(), "variables": variables}

    @app.post("/mdd/{mdd_id}/route")
    def route_start(mdd_id: str) -> dict:
        mdd = get_mdd(mdd_id)
        now = clock()
        with lock:
            for sid in [s for s, sess in sessions.items()
                        if now - sess.last_access > session_ttl]:
                del sessions[sid]
            counters["route"] += 1
            session = RouteSession(id=f"route-{counters['route']}", mdd_id=mdd_id,
                                   base=mdd, current=mdd, last_access=now)
            sessions[session.id] = session
        return session_summary(session)

    @app.post("/route/{session_id}/choose")
    def route_choose(session_id: str, payload: dict) -> dict:
        session = get_session(session_id)
        layer = _require(payload, "layer", (str,), "a layer name")
        if "value" not in payload:
            raise ServiceError("BadRequest", "field 'value' is required", param="value")
        value = payload["value"]
        try:
            idx = session.current.space.var_index(layer)
        except KeyError:
            raise ServiceError("UnknownLayer",
                               f"layer {layer!r} is not open in this session",
                               param="layer")
        restricted = session.current.restrict(idx, value)
        if restricted.count_solutions() == 0:
            raise ServiceError("DeadEndChoice",
                               f"choosing {value!r} at {layer!r} leaves no solutions",
                               param="value")
        with lock:
            session.current = restricted
            session.trail.append((layer, value))
        return session_summary(session)

    @app.post("/route/{session_id}/undo")
    def route_undo(session_id: str) -> dict:
        session = get_session(session_id)
        with lock:
            if not session.trail:
                raise ServiceError("NothingToUndo", "the decision trail is empty")
            session.trail.pop()
            current = session.base
            for name, value in session.trail:
                current = current.restrict(current.space.var_index(name), value)
            session.current = current
        return session_summary(session)

    @app.get("/mdd/{mdd_id}/paths")
    def mdd_paths(mdd_id: str, limit: int = 100) -> dict:
        if limit < 1:
            raise ServiceError("BadRequest", "limit must be positive", param="limit")
        mdd = get_mdd(mdd_id)
        names = [var.name for var in mdd.variables]
        paths = [dict(zip(names, assignment))
                 for assignment in mdd.enumerate_paths(limit)]
        return {"mdd_id": mdd_id, "count": len(paths), "paths": paths}

    @app.get("/mdd/{mdd_id}/dot")
    def mdd_dot(mdd_id: str) -> PlainTextResponse:
        mdd = get_mdd(mdd_id)
        return PlainTextResponse(mdd.to_dot(), media_type="text/vnd.graphviz")

    # ------------------------------------------------------------------
    # export

    @app.get("/export")
    def export_graph(request: Request) -> Response:
        accept = request.headers.get("accept", "")
        if "application/n-triples" in accept:
            return PlainTextResponse(export_mod.to_ntriples(graph),
                                     media_type="application/n-triples")
        return JSONResponse(export_mod.graph_to_dict(graph))

    return app
