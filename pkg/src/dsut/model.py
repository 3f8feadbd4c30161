"""Four-layer graph model of a distributed system under test.

Layers are numbered bottom-up: 1 physical, 2 logical, 3 system/service,
4 functional. Each layer is an undirected graph of components; projections
link a component on layer ``n`` to the components on ``n - 1`` realising it.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, NamedTuple

from dsut.errors import BuildError, ModelBuildError, NoProjection, UnknownComponent
from dsut.factlang import (
    LAYERS,
    ComponentRef,
    ConnectionFact,
    FactSet,
    MapFact,
    ObjectFact,
)

LAYER_NAMES = {4: "Functional", 3: "System", 2: "Logical", 1: "Physical"}


@dataclass(frozen=True, order=True)
class Component:
    layer: int
    ref: ComponentRef
    type_label: str | None = None  # None marks a virtual object
    params: tuple[str, ...] = ()

    @property
    def is_virtual(self) -> bool:
        return self.type_label is None


@dataclass(frozen=True, order=True)
class Connection:
    """Undirected edge, stored with the smaller endpoint in ``a``."""

    layer: int
    a: ComponentRef
    b: ComponentRef
    params: tuple[str, ...] = ()

    @classmethod
    def make(cls, layer: int, x: ComponentRef, y: ComponentRef, params=()) -> "Connection":
        a, b = (x, y) if x <= y else (y, x)
        return cls(layer, a, b, tuple(params))

    @property
    def key(self) -> tuple[int, ComponentRef, ComponentRef]:
        return (self.layer, self.a, self.b)


@dataclass(frozen=True, order=True)
class Projection:
    upper_layer: int
    upper: ComponentRef
    lower: ComponentRef
    params: tuple[str, ...] = ()

    @property
    def lower_layer(self) -> int:
        return self.upper_layer - 1


class Arity(str, Enum):
    ONE_TO_ONE = "one_to_one"
    ONE_TO_MANY = "one_to_many"
    MANY_TO_ONE = "many_to_one"
    MANY_TO_MANY = "many_to_many"


class LayerView(NamedTuple):
    layer: int
    components: tuple[Component, ...]
    connections: tuple[Connection, ...]
    projections: tuple[Projection, ...]
    lower_components: tuple[Component, ...]


@dataclass(frozen=True, eq=False)
class SystemModel:
    """Immutable layered graph. Build it with :func:`build_model`."""

    components: frozenset[Component] = frozenset()
    connections: frozenset[Connection] = frozenset()
    projections: frozenset[Projection] = frozenset()
    _by_key: dict = field(init=False, repr=False)
    _adj: dict = field(init=False, repr=False)
    _down: dict = field(init=False, repr=False)
    _up: dict = field(init=False, repr=False)
    _edges: dict = field(init=False, repr=False)

    def __post_init__(self):
        by_key = {(c.layer, c.ref): c for c in self.components}
        adj: dict = defaultdict(set)
        for e in self.connections:
            adj[(e.layer, e.a)].add(e.b)
            adj[(e.layer, e.b)].add(e.a)
        down: dict = defaultdict(set)
        up: dict = defaultdict(set)
        for p in self.projections:
            down[(p.upper_layer, p.upper)].add(p.lower)
            up[(p.lower_layer, p.lower)].add(p.upper)
        freeze = lambda d: {k: tuple(sorted(v)) for k, v in d.items()}  # noqa: E731
        object.__setattr__(self, "_by_key", by_key)
        object.__setattr__(self, "_adj", freeze(adj))
        object.__setattr__(self, "_down", freeze(down))
        object.__setattr__(self, "_up", freeze(up))
        object.__setattr__(self, "_edges", {e.key: e for e in self.connections})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SystemModel):
            return NotImplemented
        return (
            self.components == other.components
            and self.connections == other.connections
            and self.projections == other.projections
        )

    def __hash__(self) -> int:
        return hash((self.components, self.connections, self.projections))

    def has(self, layer: int, ref: ComponentRef) -> bool:
        return (layer, ref) in self._by_key

    def component(self, layer: int, ref: ComponentRef) -> Component:
        try:
            return self._by_key[(layer, ref)]
        except KeyError:
            raise UnknownComponent(f"no component {ref} on layer {layer}") from None

    def layer_components(self, layer: int) -> tuple[Component, ...]:
        return tuple(sorted((c for c in self.components if c.layer == layer), key=lambda c: c.ref))

    def layer_refs(self, layer: int) -> tuple[ComponentRef, ...]:
        return tuple(c.ref for c in self.layer_components(layer))

    def layer_connections(self, layer: int) -> tuple[Connection, ...]:
        return tuple(sorted(e for e in self.connections if e.layer == layer))

    def connection(self, layer: int, x: ComponentRef, y: ComponentRef) -> Connection | None:
        a, b = (x, y) if x <= y else (y, x)
        return self._edges.get((layer, a, b))

    def upper_images(self, layer: int, ref: ComponentRef) -> tuple[ComponentRef, ...]:
        """Components on ``layer + 1`` that project onto ``ref``."""
        self.component(layer, ref)
        return self._up.get((layer, ref), ())

    def adjacency(self, layer: int) -> dict[ComponentRef, tuple[ComponentRef, ...]]:
        return {ref: self._adj.get((layer, ref), ()) for ref in self.layer_refs(layer)}


def build_model(facts: FactSet) -> SystemModel:
    """Assemble a :class:`SystemModel` from parsed facts.

    Requirement facts are ignored here. All problems are collected and raised
    together as :class:`ModelBuildError`.
    """
    errors: list[BuildError] = []

    def err(code: str, msg: str, fact) -> None:
        line, col = fact.pos if fact.pos else (None, None)
        errors.append(BuildError(code, msg, line, col))

    components: dict[tuple[int, ComponentRef], Component] = {}
    layers_of: dict[ComponentRef, set[int]] = defaultdict(set)
    for f in facts.object_facts:
        key = (f.layer, f.ref)
        if key in components:
            err("DuplicateComponent", f"component {f.ref} declared twice on layer {f.layer}", f)
            continue
        components[key] = Component(f.layer, f.ref, f.type_label, f.params)
        layers_of[f.ref].add(f.layer)

    def resolve(layer: int, ref: ComponentRef, fact, wrong_layer_code: str) -> bool:
        if (layer, ref) in components:
            return True
        if layers_of.get(ref):
            found = ",".join(str(n) for n in sorted(layers_of[ref]))
            err(wrong_layer_code, f"{ref} is on layer {found}, expected layer {layer}", fact)
        else:
            err("DanglingEndpoint", f"{ref} is not declared on any layer", fact)
        return False

    connections: dict[tuple, Connection] = {}
    for f in facts.connection_facts:
        if f.a == f.b:
            err("SelfLoop", f"connection of {f.a} to itself on layer {f.layer}", f)
            continue
        ok_a = resolve(f.layer, f.a, f, "CrossLayerConnection")
        ok_b = resolve(f.layer, f.b, f, "CrossLayerConnection")
        if not (ok_a and ok_b):
            continue
        conn = Connection.make(f.layer, f.a, f.b, f.params)
        if conn.key in connections:
            err("DuplicateConnection", f"{conn.a}-{conn.b} connected twice on layer {f.layer}", f)
            continue
        connections[conn.key] = conn

    projections: dict[tuple, Projection] = {}
    for f in facts.map_facts:
        if f.layer < 2:
            err("BadProjectionLayers", "layer 1 components have no lower layer to map to", f)
            continue
        ok_upper = resolve(f.layer, f.upper, f, "BadProjectionLayers")
        ok_lower = resolve(f.layer - 1, f.lower, f, "BadProjectionLayers")
        if not (ok_upper and ok_lower):
            continue
        key = (f.layer, f.upper, f.lower)
        if key in projections:
            err("DuplicateProjection", f"{f.upper} -> {f.lower} mapped twice on layer {f.layer}", f)
            continue
        projections[key] = Projection(f.layer, f.upper, f.lower, f.params)

    if errors:
        raise ModelBuildError(errors)
    return SystemModel(
        frozenset(components.values()), frozenset(connections.values()), frozenset(projections.values())
    )


def model_facts(model: SystemModel) -> FactSet:
    """Inverse of :func:`build_model` (no requirement facts)."""
    facts = FactSet()
    for c in sorted(model.components):
        facts.add(ObjectFact(c.layer, c.ref, c.type_label, c.params))
    for e in sorted(model.connections):
        facts.add(ConnectionFact(e.layer, e.a, e.b, e.params))
    for p in sorted(model.projections):
        facts.add(MapFact(p.upper_layer, p.upper, p.lower, p.params))
    return facts


def layer_view(model: SystemModel, n: int) -> LayerView:
    comps = model.layer_components(n)
    if n == 1:
        return LayerView(n, comps, model.layer_connections(n), (), ())
    projs = tuple(sorted(p for p in model.projections if p.upper_layer == n))
    lowers = sorted({p.lower for p in projs})
    return LayerView(
        n, comps, model.layer_connections(n), projs, tuple(model.component(n - 1, r) for r in lowers)
    )


def neighbors(model: SystemModel, n: int, c: ComponentRef) -> tuple[ComponentRef, ...]:
    model.component(n, c)
    return model._adj.get((n, c), ())


def lower_images(model: SystemModel, n: int, c: ComponentRef) -> tuple[ComponentRef, ...]:
    model.component(n, c)
    return model._down.get((n, c), ())


def projection_arity(model: SystemModel, n: int, c: ComponentRef) -> Arity:
    images = lower_images(model, n, c)
    if not images:
        raise NoProjection(f"{c} on layer {n} has no lower image")
    exclusive = all(model.upper_images(n - 1, p) == (c,) for p in images)
    if len(images) == 1:
        return Arity.ONE_TO_ONE if exclusive else Arity.MANY_TO_ONE
    return Arity.ONE_TO_MANY if exclusive else Arity.MANY_TO_MANY


def iter_layers(top_down: bool = True) -> Iterable[int]:
    return reversed(LAYERS) if top_down else iter(LAYERS)
