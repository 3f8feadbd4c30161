"""Brute-force reference implementations used only by the tests."""
from __future__ import annotations

import itertools
import random

from dsut.factlang import ComponentRef, ConnectionFact, FactSet, ObjectFact
from dsut.model import SystemModel, build_model


def node(i: int) -> ComponentRef:
    return ComponentRef("n", i)


def graph_model(n_nodes: int, edges, layer: int = 2) -> SystemModel:
    """A model holding one undirected graph on ``layer`` (nodes ``(n, 1..k)``)."""
    facts = FactSet()
    for i in range(1, n_nodes + 1):
        facts.add(ObjectFact(layer, node(i), None))
    for a, b in edges:
        facts.add(ConnectionFact(layer, node(a), node(b)))
    return build_model(facts)


def random_connected_graph(rng: random.Random, max_nodes: int) -> tuple[int, list[tuple[int, int]]]:
    k = rng.randint(2, max_nodes)
    edges = set()
    for v in range(2, k + 1):
        edges.add((rng.randint(1, v - 1), v))
    for a, b in itertools.combinations(range(1, k + 1), 2):
        if rng.random() < 0.3:
            edges.add((a, b))
    return k, sorted(edges)


def random_graph(rng: random.Random, max_nodes: int) -> tuple[int, list[tuple[int, int]]]:
    k = rng.randint(1, max_nodes)
    p = rng.choice([0.15, 0.3, 0.5])
    edges = [(a, b) for a, b in itertools.combinations(range(1, k + 1), 2) if rng.random() < p]
    return k, edges


def brute_force_paths(n_nodes: int, edges, s: int, t: int) -> set[tuple[int, ...]]:
    """Every vertex sequence from s to t, kept if consecutive vertices are adjacent."""
    adj = {frozenset(e) for e in edges}
    others = [v for v in range(1, n_nodes + 1) if v not in (s, t)]
    found = set()
    for k in range(len(others) + 1):
        for middle in itertools.permutations(others, k):
            seq = (s, *middle, t)
            if all(frozenset(p) in adj for p in zip(seq, seq[1:])):
                found.add(seq)
    return found


def _components(nodes, edges) -> int:
    parent = {v: v for v in nodes}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b in edges:
        parent[find(a)] = find(b)
    return len({find(v) for v in nodes})


def brute_force_cut_vertices(n_nodes: int, edges) -> set[int]:
    """Vertices whose removal increases the component count of the rest."""
    nodes = list(range(1, n_nodes + 1))
    base = _components(nodes, edges)
    out = set()
    for v in nodes:
        rest = [u for u in nodes if u != v]
        rest_edges = [e for e in edges if v not in e]
        # removing an isolated vertex drops one component; compare like with like
        isolated = all(v not in e for e in edges)
        if _components(rest, rest_edges) > base - (1 if isolated else 0):
            out.add(v)
    return out
