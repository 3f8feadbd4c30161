"""Structural checks on a model and its requirements, plus modelling lints."""
from __future__ import annotations

from typing import Iterable

import networkx as nx

from dsut.diagnostics import Diagnostic
from dsut.factlang import LAYERS, ComponentPattern, ComponentRef, RequirementFact
from dsut.model import SystemModel, lower_images


def _sorted(diags: Iterable[Diagnostic]) -> list[Diagnostic]:
    # top layer first, errors before warnings before info
    return sorted(diags, key=lambda d: (-(d.layer or 0), -d.severity, d.code, d.subject))


def validate_model(model: SystemModel) -> list[Diagnostic]:
    """Check the layered-graph constraints. An empty list means valid."""
    out = []
    for n in LAYERS:
        comps = model.layer_components(n)
        if not comps:
            out.append(Diagnostic.of("EMPTY_LAYER", n, f"layer({n})", "layer has no components"))
        for c in comps:
            if n >= 2 and not lower_images(model, n, c.ref):
                out.append(Diagnostic.of("NO_PROJECTION", n, str(c.ref), f"no projection onto layer {n - 1}"))
            if n in (1, 3) and c.is_virtual:
                out.append(Diagnostic.of("UNTYPED_CONCRETE", n, str(c.ref), "concrete layer component has no type"))
            if n <= 3 and not model.upper_images(n, c.ref):
                out.append(Diagnostic.of("NO_UPWARD_IMAGE", n, str(c.ref), f"not realising any layer {n + 1} component"))
    return _sorted(out)


def _pattern_problem(model: SystemModel, layer: int, p: ComponentPattern) -> tuple[str, str] | None:
    if p.is_any:
        return None
    refs = model.layer_refs(layer)
    if not any(r.cls == p.cls for r in refs):
        return "UNKNOWN_CLASS", f"class {p.cls!r} does not exist on layer {layer}"
    if p.kind == "exact" and not model.has(layer, ComponentRef(p.cls, p.index)):
        return "UNKNOWN_COMPONENT", f"component {p} does not exist on layer {layer}"
    return None


def validate_requirements(model: SystemModel, reqs: Iterable[RequirementFact]) -> list[Diagnostic]:
    out = []
    top_level = False
    for r in reqs:
        subject = f"{r.source}->{r.target}"
        if r.layer not in LAYERS:
            out.append(Diagnostic.of("BAD_REQ_LAYER", r.layer, subject, f"layer {r.layer} is not one of 1..4"))
            continue
        if r.layer == 4 and not (r.source.is_any and r.target.is_any):
            top_level = True
        for p in (r.source, r.target):
            problem = _pattern_problem(model, r.layer, p)
            if problem:
                out.append(Diagnostic.of(problem[0], r.layer, str(p), problem[1]))
    if not top_level:
        out.append(
            Diagnostic.of("NO_TOP_LEVEL_REQUIREMENT", 4, "layer(4)", "no end-user requirement on the functional layer")
        )
    return _sorted(dict.fromkeys(out))


def layer_graph(model: SystemModel, n: int) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(model.layer_refs(n))
    g.add_edges_from((e.a, e.b) for e in model.layer_connections(n))
    return g


def lint_phantom_risk(model: SystemModel) -> list[Diagnostic]:
    """Flag transit components (cut vertices) on layers 2-4.

    Every path between the two sides of a cut vertex is routed through it,
    which is how over-connected shared services create spurious paths.
    """
    out = []
    for n in (4, 3, 2):
        for ref in sorted(nx.articulation_points(layer_graph(model, n))):
            out.append(Diagnostic.of("PHANTOM_RISK", n, str(ref), "all paths between its neighbours transit here"))
    return _sorted(out)
