"""Analytic upper bounds on the number of test templates.

For each layer with ``C`` components of which ``G`` must communicate:

* node coverage needs exactly ``C`` templates;
* with one route per pair, at most ``G(G-1)/2`` distributed templates;
* with ``r`` redundant routes per pair, at most ``r * G(G-1)/2``.

Under the worst case ``G = C`` the per-layer totals become ``C(C+1)/2``
(single route) and ``C**2`` (two routes). All arithmetic is integer.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from dsut.diagnostics import Diagnostic
from dsut.factlang import LAYERS, ComponentRef
from dsut.generate import Obligation, StrategyReport, endpoint_pairs
from dsut.model import SystemModel

DEFAULT_REDUNDANCY = 2


@dataclass(frozen=True)
class LayerCounts:
    layer: int
    components: int  # C_n
    communicating: int  # |G'_n|


@dataclass(frozen=True)
class LayerBound:
    layer: int
    components: int
    communicating: int
    dist_bound: int
    total_bound: int


@dataclass(frozen=True)
class BoundsFragment:
    """Bounds for one communication model (single route or redundant)."""

    redundancy: int
    layers: tuple[LayerBound, ...]

    @property
    def t_comp(self) -> int:
        return sum(lb.components for lb in self.layers)

    @property
    def t_dist_bound(self) -> int:
        return sum(lb.dist_bound for lb in self.layers)

    @property
    def total_bound(self) -> int:
        return sum(lb.total_bound for lb in self.layers)

    def layer(self, n: int) -> LayerBound:
        return next(lb for lb in self.layers if lb.layer == n)


@dataclass(frozen=True)
class BoundsReport:
    counts: tuple[LayerCounts, ...]
    simple: BoundsFragment
    complex: BoundsFragment

    @property
    def redundancy(self) -> int:
        return self.complex.redundancy

    @property
    def t_comp(self) -> int:
        return self.simple.t_comp


def pairs(k: int) -> int:
    return k * (k - 1) // 2


def communicating_subgraph(
    model: SystemModel, n: int, obligations: Iterable[Obligation], worst_case: bool = False
) -> frozenset[ComponentRef]:
    """Components that appear as a conjunct or disjunct of a layer-``n`` obligation."""
    if worst_case:
        return frozenset(model.layer_refs(n))
    refs: set[ComponentRef] = set()
    for ob in obligations:
        if ob.layer == n:
            refs.update(ob.conjuncts)
            refs.update(ob.disjuncts)
    return frozenset(refs)


def layer_counts(
    model: SystemModel,
    obligations: Mapping[int, Iterable[Obligation]] | None = None,
    worst_case: bool = False,
) -> tuple[LayerCounts, ...]:
    obligations = obligations or {}
    out = []
    for n in sorted(LAYERS, reverse=True):
        comm = communicating_subgraph(model, n, obligations.get(n, ()), worst_case)
        out.append(LayerCounts(n, len(model.layer_refs(n)), len(comm)))
    return tuple(out)


def counts_from_report(model: SystemModel, report: StrategyReport) -> tuple[LayerCounts, ...]:
    return layer_counts(model, {lr.layer: lr.obligations for lr in report.layers})


def simple_bounds(counts: Sequence[LayerCounts]) -> BoundsFragment:
    """Single route per communicating pair."""
    layers = []
    for c in counts:
        dist = pairs(c.communicating)
        layers.append(LayerBound(c.layer, c.components, c.communicating, dist, c.components + dist))
    return BoundsFragment(1, tuple(layers))


def complex_bounds(counts: Sequence[LayerCounts], redundancy: int = DEFAULT_REDUNDANCY) -> BoundsFragment:
    """Uniform ``redundancy`` parallel routes per communicating pair."""
    if redundancy < 1:
        raise ValueError("redundancy must be at least 1")
    layers = []
    for c in counts:
        dist = redundancy * pairs(c.communicating)
        layers.append(LayerBound(c.layer, c.components, c.communicating, dist, c.components + dist))
    return BoundsFragment(redundancy, tuple(layers))


def estimate(counts: Sequence[LayerCounts], redundancy: int = DEFAULT_REDUNDANCY) -> BoundsReport:
    return BoundsReport(tuple(counts), simple_bounds(counts), complex_bounds(counts, redundancy))


def check_against_generation(report: StrategyReport, bounds: BoundsReport) -> list[Diagnostic]:
    """Warn if a layer produced more distinct endpoint pairs than it can have.

    A hit here indicates a counting bug, not a modelling problem.
    """
    out = []
    by_layer = {c.layer: c for c in bounds.counts}
    for lr in report.layers:
        counts = by_layer.get(lr.layer)
        if counts is None:
            continue
        found = len(endpoint_pairs(lr.t_union))
        limit = pairs(counts.communicating)
        if found > limit:
            out.append(
                Diagnostic.of(
                    "BOUND_EXCEEDED", lr.layer, f"layer({lr.layer})",
                    f"{found} endpoint pairs exceed the bound {limit} for {counts.communicating} communicating components",
                )
            )
    return out
