"""Context-annotated knowledge graphs with decision-diagram compilation.

The package splits into a small number of layers: an append-only graph
store (graph), the context algebra over it (context), file ingestion
(ingest), serialization (export), the decision-diagram engine and the
two graph compilers (mdd, compile), path-based hypothesis validation
(validation), and the HTTP/CLI surfaces (service, cli).
"""

from .compile import (
    CompilationSpec,
    LayerSpec,
    compile_activity,
    compile_combinations,
    topological_order,
)
from .context import CROSS_CONTEXT_KIND, ContextMap, Hypergraph, SubgraphMode
from .errors import KgddError
from .export import graph_from_dict, graph_to_dict, load, loads, save, to_ntriples
from .graph import (
    Entity,
    Graph,
    Namespace,
    NamespaceKind,
    Origin,
    Provenance,
    Relation,
)
from .ingest import IngestReport, Ingestor, derive_meta_relations
from .mdd import (
    FALSE,
    TRUE,
    Mdd,
    MddSpace,
    RawDiagram,
    RawNode,
    VariableSpec,
    mdd_to_fsm,
)
from .validation import (
    KnowledgeStream,
    Path,
    PathQuery,
    knowledge_stream,
    shortest_path,
    validate_influence,
)

__version__ = "0.1.0"

__all__ = [
    "CROSS_CONTEXT_KIND",
    "CompilationSpec",
    "ContextMap",
    "Entity",
    "FALSE",
    "Graph",
    "Hypergraph",
    "IngestReport",
    "Ingestor",
    "KgddError",
    "KnowledgeStream",
    "LayerSpec",
    "Mdd",
    "MddSpace",
    "Namespace",
    "NamespaceKind",
    "Origin",
    "Path",
    "PathQuery",
    "Provenance",
    "RawDiagram",
    "RawNode",
    "Relation",
    "SubgraphMode",
    "TRUE",
    "VariableSpec",
    "compile_activity",
    "compile_combinations",
    "derive_meta_relations",
    "graph_from_dict",
    "graph_to_dict",
    "knowledge_stream",
    "load",
    "loads",
    "mdd_to_fsm",
    "save",
    "shortest_path",
    "to_ntriples",
    "topological_order",
    "validate_influence",
]
