"""Reduced ordered multi-valued decision diagrams.

An MDD over variables x_1..x_k with finite domains represents a binary
function of those variables as a rooted layered DAG.  Nodes are stored
hash-consed in an MddSpace: building the same structure twice yields the
same handle, so semantic equality of two diagrams over one space is
pointer equality of their roots.

Reduction uses the long-edge convention: a node's children may sit on
any strictly deeper layer (or a terminal), and a skipped layer means the
function does not depend on that variable.  This is what repeatedly
applying the redundant-node rule produces, and it keeps the form
canonical: no node has all-equal children and no two stored nodes share
(layer, children).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

from .errors import (
    ArityMismatch,
    NotLayered,
    OrderMismatch,
    UnknownEntityInConflictEdge,
    ValueOutOfDomain,
)

Value = str | int
Handle = int

FALSE: Handle = 0
TRUE: Handle = 1

OP_UNION = "union"
OP_INTERSECTION = "intersection"


@dataclass(frozen=True, slots=True)
class VariableSpec:
    """One decision layer: a name, its ordered domain, and optionally the
    graph entity the variable itself stands for (activity diagrams)."""

    name: str
    values: tuple[Value, ...]
    entity: int | None = None

    def __post_init__(self):
        if len(self.values) < 1:
            raise ValueError(f"variable {self.name!r} needs a nonempty domain")
        if len(set(self.values)) != len(self.values):
            raise ValueError(f"variable {self.name!r} has duplicate domain values")

    def index_of(self, value: Value) -> int:
        try:
            return self.values.index(value)
        except ValueError:
            raise ValueOutOfDomain(
                f"value {value!r} not in domain of variable {self.name!r}",
                param=self.name) from None


@dataclass(slots=True)
class RawNode:
    layer: int
    children: list[int | bool]


@dataclass(slots=True)
class RawDiagram:
    """Unreduced layered diagram as plain data; children are raw node ids
    or booleans for the terminals."""

    nodes: dict[int, RawNode]
    root: int | bool


class MddSpace:
    """Node store for one variable order.

    Handles 0 and 1 are the FALSE and TRUE terminals; internal nodes get
    handles from 2 up.  Terminals live conceptually on layer k so that
    every edge goes to a strictly deeper layer.
    """

    def __init__(self, variables: Sequence[VariableSpec]):
        self.variables = tuple(variables)
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise ValueError("variable names must be unique")
        self._layers: list[int] = [len(self.variables), len(self.variables)]
        self._children: list[tuple[Handle, ...]] = [(), ()]
        self._unique: dict[tuple[int, tuple[Handle, ...]], Handle] = {}
        self._apply_memo: dict[tuple[str, Handle, Handle], Handle] = {}
        self._negate_memo: dict[Handle, Handle] = {}
        self._count_memo: dict[Handle, int] = {}

    @property
    def num_layers(self) -> int:
        return len(self.variables)

    def layer_of(self, h: Handle) -> int:
        return self._layers[h]

    def children_of(self, h: Handle) -> tuple[Handle, ...]:
        return self._children[h]

    def domain_size(self, layer: int) -> int:
        return len(self.variables[layer].values)

    def var_index(self, name: str) -> int:
        for i, var in enumerate(self.variables):
            if var.name == name:
                return i
        raise KeyError(name)

    # ------------------------------------------------------------------
    # construction

    def make_node(self, layer: int, children: Sequence[Handle]) -> Handle:
        """Canonical constructor: applies the redundant-node rule, then
        hash-conses against the uniqueness table."""
        if not 0 <= layer < len(self.variables):
            raise NotLayered(f"layer {layer} outside 0..{len(self.variables) - 1}")
        children = tuple(children)
        if len(children) != self.domain_size(layer):
            raise ArityMismatch(
                f"layer {layer} has domain size {self.domain_size(layer)}, "
                f"got {len(children)} children")
        for c in children:
            if not 0 <= c < len(self._layers):
                raise ValueError(f"unknown child handle {c}")
            if self._layers[c] <= layer:
                raise NotLayered(
                    f"child on layer {self._layers[c]} not below layer {layer}")
        first = children[0]
        if all(c == first for c in children):
            return first
        key = (layer, children)
        found = self._unique.get(key)
        if found is not None:
            return found
        handle = len(self._layers)
        self._layers.append(layer)
        self._children.append(children)
        self._unique[key] = handle
        return handle

    def constant(self, value: bool) -> Handle:
        return TRUE if value else FALSE

    def cube(self, assignment: Sequence[Value | None]) -> Handle:
        """Conjunction fixing given values; None entries stay free."""
        if len(assignment) != len(self.variables):
            raise ArityMismatch(
                f"assignment length {len(assignment)} != {len(self.variables)} variables")
        h = TRUE
        for layer in range(len(self.variables) - 1, -1, -1):
            value = assignment[layer]
            if value is None:
                continue
            idx = self.variables[layer].index_of(value)
            children = [FALSE] * self.domain_size(layer)
            children[idx] = h
            h = self.make_node(layer, children)
        return h

    def from_function(self, fn: Callable[[tuple[Value, ...]], bool]) -> Handle:
        """Builds the full assignment tree, reducing on the way up."""

        def build(layer: int, prefix: tuple[Value, ...]) -> Handle:
            if layer == len(self.variables):
                return TRUE if fn(prefix) else FALSE
            children = [build(layer + 1, prefix + (v,))
                        for v in self.variables[layer].values]
            return self.make_node(layer, children)

        return build(0, ())

    def reduce(self, raw: RawDiagram) -> Handle:
        """Canonical handle for an unreduced layered diagram."""
        if isinstance(raw.root, bool):
            return self.constant(raw.root)
        if raw.root not in raw.nodes:
            raise NotLayered(f"root {raw.root} not among raw nodes")
        mapped: dict[int, Handle] = {}
        for node_id in sorted(raw.nodes, key=lambda n: -raw.nodes[n].layer):
            node = raw.nodes[node_id]
            children = []
            for child in node.children:
                if isinstance(child, bool):
                    children.append(self.constant(child))
                    continue
                if child not in raw.nodes:
                    raise NotLayered(f"raw node {node_id} references unknown node {child}")
                if raw.nodes[child].layer <= node.layer:
                    raise NotLayered(
                        f"raw node {node_id} (layer {node.layer}) points to "
                        f"node {child} on layer {raw.nodes[child].layer}")
                children.append(mapped[child])
            mapped[node_id] = self.make_node(node.layer, children)
        return mapped[raw.root]

    # ------------------------------------------------------------------
    # operators

    def _cofactor(self, h: Handle, layer: int, idx: int) -> Handle:
        if self._layers[h] > layer:
            return h
        return self._children[h][idx]

    def apply(self, op: str, f: Handle, g: Handle) -> Handle:
        op = op.lower()
        if op not in (OP_UNION, OP_INTERSECTION):
            raise ValueError(f"unknown operator {op!r}")
        return self._apply(op, f, g)

    def _apply(self, op: str, f: Handle, g: Handle) -> Handle:
        if f == g:
            return f
        if op == OP_UNION:
            if f == TRUE or g == TRUE:
                return TRUE
            if f == FALSE:
                return g
            if g == FALSE:
                return f
        else:
            if f == FALSE or g == FALSE:
                return FALSE
            if f == TRUE:
                return g
            if g == TRUE:
                return f
        if g < f:
            f, g = g, f
        key = (op, f, g)
        found = self._apply_memo.get(key)
        if found is not None:
            return found
        layer = min(self._layers[f], self._layers[g])
        children = [
            self._apply(op, self._cofactor(f, layer, i), self._cofactor(g, layer, i))
            for i in range(self.domain_size(layer))
        ]
        result = self.make_node(layer, children)
        self._apply_memo[key] = result
        return result

    def negate(self, f: Handle) -> Handle:
        if f == TRUE:
            return FALSE
        if f == FALSE:
            return TRUE
        found = self._negate_memo.get(f)
        if found is not None:
            return found
        layer = self._layers[f]
        result = self.make_node(layer, [self.negate(c) for c in self._children[f]])
        self._negate_memo[f] = result
        return result

    def adopt(self, other: "Mdd") -> Handle:
        """Copy a diagram from another space with the same variable order."""
        if other.space is self:
            return other.root
        if other.space.variables != self.variables:
            raise OrderMismatch("diagrams use different variable orders")
        memo: dict[Handle, Handle] = {FALSE: FALSE, TRUE: TRUE}

        def walk(h: Handle) -> Handle:
            found = memo.get(h)
            if found is not None:
                return found
            result = self.make_node(other.space.layer_of(h),
                                    [walk(c) for c in other.space.children_of(h)])
            memo[h] = result
            return result

        return walk(other.root)

    # ------------------------------------------------------------------
    # queries

    def evaluate(self, root: Handle, assignment: Sequence[Value]) -> bool:
        if len(assignment) != len(self.variables):
            raise ArityMismatch(
                f"assignment length {len(assignment)} != {len(self.variables)} variables")
        indices = [self.variables[i].index_of(v) for i, v in enumerate(assignment)]
        h = root
        while h > TRUE:
            h = self._children[h][indices[self._layers[h]]]
        return h == TRUE

    def count(self, root: Handle) -> int:
        """Number of full assignments reaching TRUE (exact integer)."""
        sizes = [self.domain_size(i) for i in range(len(self.variables))]
        suffix = [1] * (len(sizes) + 1)
        for i in range(len(sizes) - 1, -1, -1):
            suffix[i] = suffix[i + 1] * sizes[i]

        def below(h: Handle) -> int:
            # assignments of variables from layer_of(h) onward
            if h == FALSE:
                return 0
            if h == TRUE:
                return 1
            found = self._count_memo.get(h)
            if found is not None:
                return found
            layer = self._layers[h]
            total = 0
            for child in self._children[h]:
                gap = suffix[layer + 1] // suffix[self._layers[child]]
                total += below(child) * gap
            self._count_memo[h] = total
            return total

        top_gap = suffix[0] // suffix[self._layers[root]] if root > TRUE else suffix[0]
        if root == FALSE:
            return 0
        if root == TRUE:
            return suffix[0]
        return below(root) * top_gap

    def iter_assignments(self, root: Handle) -> Iterator[tuple[Value, ...]]:
        """Satisfying assignments in lexicographic domain-index order."""
        k = len(self.variables)

        def walk(h: Handle, layer: int) -> Iterator[tuple[Value, ...]]:
            if h == FALSE:
                return
            if layer == k:
                yield ()
                return
            var = self.variables[layer]
            if h == TRUE or self._layers[h] > layer:
                for v in var.values:
                    for rest in walk(h, layer + 1):
                        yield (v,) + rest
                return
            for idx, child in enumerate(self._children[h]):
                for rest in walk(child, layer + 1):
                    yield (var.values[idx],) + rest

        return walk(root, 0)

    def reachable(self, root: Handle) -> list[Handle]:
        """Reachable internal nodes, ascending handle order."""
        seen: set[Handle] = set()
        stack = [root]
        while stack:
            h = stack.pop()
            if h <= TRUE or h in seen:
                continue
            seen.add(h)
            stack.extend(self._children[h])
        return sorted(seen)

    def mdd(self, root: Handle) -> "Mdd":
        return Mdd(self, root)


@dataclass(frozen=True)
class Mdd:
    """A diagram: a node space plus a root handle within it."""

    space: MddSpace
    root: Handle

    @property
    def variables(self) -> tuple[VariableSpec, ...]:
        return self.space.variables

    @property
    def node_count(self) -> int:
        return len(self.space.reachable(self.root))

    def evaluate(self, assignment: Sequence[Value]) -> bool:
        return self.space.evaluate(self.root, assignment)

    def count_solutions(self) -> int:
        return self.space.count(self.root)

    def enumerate_paths(self, limit: int | None = None) -> list[tuple[Value, ...]]:
        out: list[tuple[Value, ...]] = []
        for assignment in self.space.iter_assignments(self.root):
            if limit is not None and len(out) >= limit:
                break
            out.append(assignment)
        return out

    def union(self, other: "Mdd") -> "Mdd":
        return Mdd(self.space, self.space.apply(OP_UNION, self.root, self.space.adopt(other)))

    def intersection(self, other: "Mdd") -> "Mdd":
        return Mdd(self.space,
                   self.space.apply(OP_INTERSECTION, self.root, self.space.adopt(other)))

    def negate(self) -> "Mdd":
        return Mdd(self.space, self.space.negate(self.root))

    def same_function(self, other: "Mdd") -> bool:
        return self.root == self.space.adopt(other)

    def restrict(self, layer: int, value: Value) -> "Mdd":
        """Fix one variable and drop its layer from the space.

        Summing count_solutions over every value of a layer therefore
        reproduces the unrestricted count exactly.
        """
        if not 0 <= layer < len(self.variables):
            raise ValueError(f"layer {layer} outside 0..{len(self.variables) - 1}")
        idx = self.variables[layer].index_of(value)
        new_space = MddSpace(self.variables[:layer] + self.variables[layer + 1:])
        memo: dict[Handle, Handle] = {FALSE: FALSE, TRUE: TRUE}

        def walk(h: Handle) -> Handle:
            found = memo.get(h)
            if found is not None:
                return found
            old_layer = self.space.layer_of(h)
            if old_layer == layer:
                result = walk(self.space.children_of(h)[idx])
            else:
                new_layer = old_layer if old_layer < layer else old_layer - 1
                result = new_space.make_node(
                    new_layer, [walk(c) for c in self.space.children_of(h)])
            memo[h] = result
            return result

        return Mdd(new_space, walk(self.root))

    # ------------------------------------------------------------------
    # export

    def to_dict(self) -> dict:
        variables = []
        for var in self.variables:
            item: dict = {"name": var.name, "values": list(var.values)}
            if var.entity is not None:
                item["entity"] = var.entity
            variables.append(item)
        nodes = [
            {"id": h, "layer": self.space.layer_of(h),
             "children": list(self.space.children_of(h))}
            for h in self.space.reachable(self.root)
        ]
        return {
            "variables": variables,
            "terminals": {"false": FALSE, "true": TRUE},
            "nodes": nodes,
            "root": self.root,
            "node_count": len(nodes),
            "solution_count": self.count_solutions(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_dot(self, *, show_false_edges: bool = False) -> str:
        out = ["digraph mdd {", "  rankdir=TB;"]
        nodes = self.space.reachable(self.root)
        by_layer: dict[int, list[Handle]] = {}
        for h in nodes:
            by_layer.setdefault(self.space.layer_of(h), []).append(h)
        show_true = self.root == TRUE
        show_false = self.root == FALSE or show_false_edges
        for layer in sorted(by_layer):
            var = self.variables[layer]
            out.append(f'  n{layer}_rank [shape=plaintext, label="{_esc(var.name)}"];')
            members = " ".join(f"n{h};" for h in by_layer[layer])
            out.append(f"  {{ rank=same; n{layer}_rank; {members} }}")
        for h in nodes:
            var = self.variables[self.space.layer_of(h)]
            out.append(f'  n{h} [shape=circle, label="{_esc(var.name)}"];')
            for idx, child in enumerate(self.space.children_of(h)):
                if child == FALSE and not show_false_edges:
                    continue
                if child == TRUE:
                    show_true = True
                label = _esc(str(var.values[idx]))
                target = {FALSE: "false", TRUE: "true"}.get(child, f"n{child}")
                out.append(f'  n{h} -> {target} [label="{label}"];')
        if show_true:
            out.append('  true [shape=box, label="T"];')
        if show_false:
            out.append('  false [shape=box, label="F"];')
        out.append("}")
        return "\n".join(out) + "\n"


def _esc(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def mdd_to_fsm(mdd: Mdd, conflict_edges: Iterable[tuple[int, int]] = ()) -> dict:
    """Transition-table description of a diagram.

    States are the reachable internal nodes plus the two terminals.
    Conflict edges (pairs of compiled entities) each append exactly one
    back-transition between the layers those entities belong to; they are
    descriptive only and carry no evaluation semantics.
    """
    space = mdd.space

    def entity_layer(entity: int) -> int:
        for i, var in enumerate(space.variables):
            if var.entity == entity or entity in var.values:
                return i
        raise UnknownEntityInConflictEdge(
            f"entity {entity} is not part of any compiled layer")

    nodes = space.reachable(mdd.root)
    states = [{"id": f"n{h}", "layer": space.layer_of(h),
               "variable": space.variables[space.layer_of(h)].name}
              for h in nodes]
    states.append({"id": "false", "terminal": True, "accepting": False})
    states.append({"id": "true", "terminal": True, "accepting": True})
    name = {FALSE: "false", TRUE: "true"}
    transitions = []
    for h in nodes:
        var = space.variables[space.layer_of(h)]
        for idx, child in enumerate(space.children_of(h)):
            transitions.append({
                "from": f"n{h}",
                "to": name.get(child, f"n{child}"),
                "value": var.values[idx],
                "variable": var.name,
            })
    back_transitions = []
    for source, target in conflict_edges:
        back_transitions.append({
            "source_entity": source,
            "target_entity": target,
            "from_layer": space.variables[entity_layer(source)].name,
            "to_layer": space.variables[entity_layer(target)].name,
            "kind": "conflict",
        })
    root_state = name.get(mdd.root, f"n{mdd.root}")
    return {
        "states": states,
        "initial": root_state,
        "transitions": transitions,
        "back_transitions": back_transitions,
    }
