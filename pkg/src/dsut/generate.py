"""Requirements-coverage test template generation.

The strategy walks the layers top-down. On every layer it

* emits one node-coverage template per component,
* covers the requirements declared for that layer with path templates
  (the *direct* set),
* projects the endpoints of the layer above's templates down one layer and
  covers the induced requirements the same way (the *projected* set),
* merges both sets into the layer's template union.

A declared requirement that no template can satisfy is a CRITERION1
violation; an unsatisfiable induced requirement is a CRITERION2 violation.
Both mean the model is inconsistent with the end-user requirements.
"""
from __future__ import annotations

import hashlib
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from dsut.diagnostics import Diagnostic
from dsut.errors import SameEndpoints
from dsut.factlang import ComponentPattern, ComponentRef, FactSet
from dsut.model import SystemModel, lower_images

FULL = "full"
MINIMAL = "minimal"


@dataclass(frozen=True)
class Limits:
    """Bounds on path enumeration. ``None`` disables a bound."""

    max_len: int | None = 16
    max_paths: int | None = 64

    def __post_init__(self):
        if self.max_len is not None and self.max_len < 2:
            raise ValueError("max_len must be at least 2")
        if self.max_paths is not None and self.max_paths < 1:
            raise ValueError("max_paths must be at least 1")


UNLIMITED = Limits(None, None)


@dataclass(frozen=True)
class StrategyConfig:
    mode: str = FULL
    limits: Limits = Limits()
    physical_edge_coverage: bool = True

    def __post_init__(self):
        if self.mode not in (FULL, MINIMAL):
            raise ValueError(f"unknown mode {self.mode!r}")


# --------------------------------------------------------------------------
# Data types
# --------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Path:
    """Simple undirected path, oriented with the smaller endpoint first."""

    layer: int
    nodes: tuple[ComponentRef, ...]

    @classmethod
    def make(cls, layer: int, nodes: Sequence[ComponentRef]) -> "Path":
        nodes = tuple(nodes)
        if len(nodes) < 2:
            raise ValueError("a path needs at least two nodes")
        if nodes[-1] < nodes[0]:
            nodes = nodes[::-1]
        return cls(layer, nodes)

    @property
    def endpoints(self) -> tuple[ComponentRef, ComponentRef]:
        return self.nodes[0], self.nodes[-1]


@dataclass(frozen=True, order=True)
class Origin:
    kind: str  # node_coverage | direct | projected
    ref: str = ""

    def to_dict(self) -> dict:
        return {"kind": self.kind, "ref": self.ref or None}


@dataclass(frozen=True)
class TestTemplate:
    """A node-coverage entry, a path, or (physical layer) a single link.

    Identity is ``(layer, kind, nodes, params)``; ``id`` is derived from it.
    """

    __test__ = False

    id: str
    layer: int
    kind: str  # component | path | link
    nodes: tuple[ComponentRef, ...]
    params: tuple[str, ...] = ()
    origins: tuple[Origin, ...] = ()

    @property
    def identity(self) -> tuple:
        return (self.layer, self.kind, self.nodes, self.params)

    @property
    def endpoints(self) -> tuple[ComponentRef, ComponentRef]:
        return self.nodes[0], self.nodes[-1]

    def sort_key(self) -> tuple:
        return (self.kind, len(self.nodes), self.nodes, self.params)


_KIND_PREFIX = {"component": "C", "path": "P", "link": "E"}


def make_template(layer: int, kind: str, nodes: Iterable[ComponentRef], params=(), origins=()) -> TestTemplate:
    nodes = tuple(nodes)
    params = tuple(params)
    if kind == "component":
        (ref,) = nodes
        tid = f"C{layer}:{ref.cls}.{ref.index}"
        if params:
            tid += "#" + _digest(repr(params))
    else:
        body = "|".join(f"{r.cls}.{r.index}" for r in nodes) + "#" + repr(params)
        tid = f"{_KIND_PREFIX[kind]}{layer}:{_digest(body)}"
    return TestTemplate(tid, layer, kind, nodes, params, tuple(sorted(set(origins))))


def _digest(text: str) -> str:
    return hashlib.sha1(text.encode("utf-8")).hexdigest()[:10]


def merge_templates(*groups: Iterable[TestTemplate]) -> list[TestTemplate]:
    """Deduplicate by identity, keeping every origin; deterministic order."""
    merged: dict[tuple, TestTemplate] = {}
    for group in groups:
        for t in group:
            prev = merged.get(t.identity)
            if prev is None:
                merged[t.identity] = t
            else:
                origins = tuple(sorted(set(prev.origins) | set(t.origins)))
                merged[t.identity] = TestTemplate(prev.id, prev.layer, prev.kind, prev.nodes, prev.params, origins)
    return sorted(merged.values(), key=TestTemplate.sort_key)


@dataclass(frozen=True)
class Requirement:
    """A communication demand on one layer.

    Declared requirements come from the requirement facts; induced ones are
    produced by projecting templates from the layer above and list the ids of
    those templates in ``origins``.
    """

    id: str
    layer: int
    source: ComponentPattern
    target: ComponentPattern
    params: tuple[str, ...] = ()
    origins: tuple[str, ...] = ()

    @property
    def induced(self) -> bool:
        return bool(self.origins)

    @property
    def is_placeholder(self) -> bool:
        return self.source.is_any and self.target.is_any


@dataclass(frozen=True)
class Obligation:
    """Expanded requirement: every conjunct must reach at least one disjunct."""

    requirement: Requirement
    conjuncts: tuple[ComponentRef, ...]
    disjuncts: tuple[ComponentRef, ...]

    @property
    def layer(self) -> int:
        return self.requirement.layer

    @property
    def params(self) -> tuple[str, ...]:
        return self.requirement.params


@dataclass(frozen=True)
class TrivialRecord:
    """An induced pair whose two endpoints share one lower component."""

    layer: int
    component: ComponentRef
    template_id: str
    upper_endpoints: tuple[ComponentRef, ComponentRef]

    def to_dict(self) -> dict:
        return {
            "component": _ref_json(self.component),
            "template": self.template_id,
            "upper_endpoints": [_ref_json(r) for r in self.upper_endpoints],
        }


@dataclass(frozen=True)
class ProjectionResult:
    induced: list[Requirement]
    trivially_satisfied: list[TrivialRecord]
    diagnostics: list[Diagnostic]


@dataclass
class LayerReport:
    layer: int
    inventory: list[str] = field(default_factory=list)
    component_templates: list[TestTemplate] = field(default_factory=list)
    obligations: list[Obligation] = field(default_factory=list)
    induced: list[Requirement] = field(default_factory=list)
    t_n1: list[TestTemplate] = field(default_factory=list)
    t_n2: list[TestTemplate] = field(default_factory=list)
    t_union: list[TestTemplate] = field(default_factory=list)
    links: list[TestTemplate] | None = None
    trivially_satisfied: list[TrivialRecord] = field(default_factory=list)
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def distributed(self) -> list[TestTemplate]:
        """Templates counted as the layer's distributed aspect."""
        return self.t_union if self.links is None else self.links


@dataclass
class StrategyReport:
    config: StrategyConfig
    layers: list[LayerReport]  # top-down: 4, 3, 2, 1

    def layer(self, n: int) -> LayerReport:
        for lr in self.layers:
            if lr.layer == n:
                return lr
        raise KeyError(n)

    @property
    def diagnostics(self) -> list[Diagnostic]:
        return [d for lr in self.layers for d in lr.diagnostics]

    @property
    def totals(self) -> dict[str, int]:
        t_comp = sum(len(lr.component_templates) for lr in self.layers)
        t_dist = sum(len(lr.distributed) for lr in self.layers)
        return {"t_comp": t_comp, "t_dist": t_dist, "total": t_comp + t_dist}


def _ref_json(ref: ComponentRef) -> list:
    return [ref.cls, ref.index]


# --------------------------------------------------------------------------
# Operations
# --------------------------------------------------------------------------


def requirements_from_facts(facts: FactSet) -> list[Requirement]:
    """Declared requirements, numbered ``R<layer>.<k>`` in source order."""
    counters: dict[int, int] = defaultdict(int)
    out = []
    for f in facts.requirement_facts:
        counters[f.layer] += 1
        out.append(Requirement(f"R{f.layer}.{counters[f.layer]}", f.layer, f.source, f.target, f.params))
    return out


def inventory_types(model: SystemModel, n: int) -> list[str]:
    return sorted({c.type_label for c in model.layer_components(n) if c.type_label is not None})


def component_templates(model: SystemModel) -> dict[int, list[TestTemplate]]:
    origin = (Origin("node_coverage"),)
    return {
        n: [make_template(n, "component", [c.ref], (), origin) for c in model.layer_components(n)]
        for n in (4, 3, 2, 1)
    }


def _expand(model: SystemModel, layer: int, p: ComponentPattern) -> tuple[ComponentRef, ...]:
    refs = model.layer_refs(layer)
    if p.kind == "any":
        return refs
    if p.kind == "class_all":
        return tuple(r for r in refs if r.cls == p.cls)
    ref = ComponentRef(p.cls, p.index)
    return (ref,) if model.has(layer, ref) else ()


def expand_requirement(model: SystemModel, r: Requirement) -> Obligation | None:
    """Expand patterns into conjuncts/disjuncts; ``None`` for a ``_, _`` placeholder."""
    if r.is_placeholder:
        return None
    return Obligation(r, _expand(model, r.layer, r.source), _expand(model, r.layer, r.target))


def _distances(model: SystemModel, n: int, goal: ComponentRef) -> dict[ComponentRef, int]:
    dist = {goal: 0}
    queue = deque([goal])
    while queue:
        u = queue.popleft()
        for v in model._adj.get((n, u), ()):
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def enumerate_paths(
    model: SystemModel, n: int, s: ComponentRef, t: ComponentRef, limits: Limits = Limits()
) -> tuple[list[Path], bool]:
    """All simple paths between ``s`` and ``t`` on layer ``n``.

    Paths come shortest first, then in lexicographic order of their canonical
    node sequence. The flag is True when ``limits.max_paths`` cut the list
    short (more paths exist within ``limits.max_len``).
    """
    if s == t:
        raise SameEndpoints(f"path endpoints are both {s}")
    model.component(n, s)
    model.component(n, t)
    start, goal = (s, t) if s < t else (t, s)
    dist = _distances(model, n, goal)
    if start not in dist:
        return [], False

    max_len = limits.max_len or len(model.layer_refs(n))
    max_len = min(max_len, len(model.layer_refs(n)))
    cap = limits.max_paths
    found: list[Path] = []
    adj = model._adj

    # one pass per node count keeps the output shortest-first without
    # materialising every path; sorted neighbours give lexicographic order
    for length in range(dist[start] + 1, max_len + 1):
        path = [start]
        on_path = {start}

        def extend(u: ComponentRef) -> bool:
            remaining = length - len(path)
            if remaining == 0:
                if u == goal:
                    if cap is not None and len(found) == cap:
                        return True
                    found.append(Path(n, tuple(path)))
                return False
            if u == goal:
                return False
            for v in adj.get((n, u), ()):
                if v in on_path or dist.get(v, remaining + 1) > remaining - 1:
                    continue
                path.append(v)
                on_path.add(v)
                stop = extend(v)
                path.pop()
                on_path.discard(v)
                if stop:
                    return True
            return False

        if extend(start):
            return found, True
    return found, False


def _cover(
    model: SystemModel,
    n: int,
    obligations: Iterable[Obligation],
    mode: str,
    limits: Limits,
    criterion: str,
) -> tuple[list[TestTemplate], list[Diagnostic]]:
    templates: list[TestTemplate] = []
    diags: list[Diagnostic] = []
    for ob in obligations:
        req = ob.requirement
        if req.induced:
            origins = tuple(Origin("projected", tid) for tid in req.origins)
        else:
            origins = (Origin("direct", req.id),)
        for s in ob.conjuncts:
            satisfied = False
            for t in ob.disjuncts:
                if t == s:
                    continue
                if mode == MINIMAL:
                    paths, _ = enumerate_paths(model, n, s, t, Limits(limits.max_len, 1))
                else:
                    paths, truncated = enumerate_paths(model, n, s, t, limits)
                    if truncated:
                        a, b = sorted((s, t))
                        diags.append(
                            Diagnostic.of("PATH_TRUNCATED", n, f"{a}~{b}", f"more than {limits.max_paths} paths")
                        )
                for p in paths:
                    templates.append(make_template(n, "path", p.nodes, ob.params, origins))
                if paths:
                    satisfied = True
                    if mode == MINIMAL:
                        break
            if not satisfied:
                targets = ",".join(str(t) for t in ob.disjuncts) or "nothing"
                diags.append(
                    Diagnostic.of(
                        criterion, n, f"{req.id}/{s}",
                        f"{s} cannot reach any of {targets}; requirement {req.id} is unsatisfiable",
                    )
                )
    return merge_templates(templates), list(dict.fromkeys(diags))


def direct_templates(
    model: SystemModel,
    n: int,
    obligations: Iterable[Obligation],
    mode: str = FULL,
    limits: Limits = Limits(),
) -> tuple[list[TestTemplate], list[Diagnostic]]:
    """Cover declared obligations with path templates; report CRITERION1 failures."""
    return _cover(model, n, obligations, mode, limits, "CRITERION1_VIOLATION")


def induced_templates(
    model: SystemModel,
    n: int,
    obligations: Iterable[Obligation],
    mode: str = FULL,
    limits: Limits = Limits(),
) -> tuple[list[TestTemplate], list[Diagnostic]]:
    """Same as :func:`direct_templates` for projected requirements (CRITERION2)."""
    return _cover(model, n, obligations, mode, limits, "CRITERION2_VIOLATION")


def project_templates(model: SystemModel, n: int, templates: Iterable[TestTemplate]) -> ProjectionResult:
    """Map path-template endpoints from layer ``n`` onto layer ``n - 1``.

    Each pair of lower images becomes an induced requirement; pairs whose two
    images coincide are recorded as trivially satisfied instead.
    """
    if n < 2:
        raise ValueError("the physical layer has nothing below it")
    pairs: dict[tuple[ComponentRef, ComponentRef], set[str]] = defaultdict(set)
    trivial: set[TrivialRecord] = set()
    diags = []
    for tpl in templates:
        if tpl.kind != "path":
            continue
        a, z = tpl.endpoints
        below_a, below_z = lower_images(model, n, a), lower_images(model, n, z)
        missing = [r for r, imgs in ((a, below_a), (z, below_z)) if not imgs]
        for r in missing:
            diags.append(
                Diagnostic.of("NO_PROJECTION_FOR_TEMPLATE", n, f"{tpl.id}/{r}", f"endpoint {r} has no lower image")
            )
        for x in below_a:
            for y in below_z:
                if x == y:
                    trivial.add(TrivialRecord(n - 1, x, tpl.id, (a, z)))
                else:
                    pairs[(x, y) if x < y else (y, x)].add(tpl.id)
    induced = [
        Requirement(
            f"I{n - 1}:{x}~{y}", n - 1, ComponentPattern.exact(x.cls, x.index),
            ComponentPattern.exact(y.cls, y.index), (), tuple(sorted(origins)),
        )
        for (x, y), origins in sorted(pairs.items())
    ]
    trivial_sorted = sorted(trivial, key=lambda r: (r.component, r.template_id))
    return ProjectionResult(induced, trivial_sorted, diags)


def link_templates(model: SystemModel, n: int, templates: Iterable[TestTemplate]) -> list[TestTemplate]:
    """One template per distinct connection traversed by the given paths."""
    out = []
    for tpl in templates:
        if tpl.kind != "path":
            continue
        for u, v in zip(tpl.nodes, tpl.nodes[1:]):
            conn = model.connection(n, u, v)
            out.append(make_template(n, "link", (conn.a, conn.b), conn.params, tpl.origins))
    return merge_templates(out)


def run_strategy(
    model: SystemModel, declared: Iterable[Requirement], config: StrategyConfig = StrategyConfig()
) -> StrategyReport:
    """Apply the requirements-coverage strategy to every layer, top-down."""
    declared = list(declared)
    comps = component_templates(model)
    layers: list[LayerReport] = []
    above: LayerReport | None = None
    for n in (4, 3, 2, 1):
        lr = LayerReport(n, inventory_types(model, n), comps[n])
        direct_obs = [
            ob for r in declared if r.layer == n and (ob := expand_requirement(model, r)) is not None
        ]
        lr.t_n1, diags1 = direct_templates(model, n, direct_obs, config.mode, config.limits)
        lr.diagnostics.extend(diags1)

        induced_obs: list[Obligation] = []
        if above is not None:
            projection = project_templates(model, n + 1, above.t_union)
            above.diagnostics.extend(projection.diagnostics)
            lr.induced = projection.induced
            lr.trivially_satisfied = projection.trivially_satisfied
            induced_obs = [expand_requirement(model, r) for r in projection.induced]
            lr.t_n2, diags2 = induced_templates(model, n, induced_obs, config.mode, config.limits)
            lr.diagnostics.extend(diags2)

        lr.obligations = direct_obs + induced_obs
        lr.t_union = merge_templates(lr.t_n1, lr.t_n2)
        if n == 1 and config.physical_edge_coverage:
            lr.links = link_templates(model, n, lr.t_union)
        layers.append(lr)
        above = lr
    return StrategyReport(config, layers)


def endpoint_pairs(templates: Iterable[TestTemplate]) -> set[tuple[ComponentRef, ComponentRef]]:
    """Distinct unordered endpoint pairs among path/link templates."""
    out = set()
    for t in templates:
        if t.kind == "component":
            continue
        a, z = t.endpoints
        out.add((a, z) if a < z else (z, a))
    return out


def trace_to_declared(report: StrategyReport, template: TestTemplate) -> set[str]:
    """Follow origin links upward; return the declared requirement ids reached."""
    by_id = {t.id: t for lr in report.layers for t in lr.t_union}
    seen: set[str] = set()
    found: set[str] = set()
    stack = [template]
    while stack:
        t = stack.pop()
        if t.id in seen:
            continue
        seen.add(t.id)
        for o in t.origins:
            if o.kind == "direct":
                found.add(o.ref)
            elif o.kind == "projected" and o.ref in by_id:
                stack.append(by_id[o.ref])
    return found
