"""Alignment and union of input DAGs.

Every input is first re-expressed as a minimal independence map consistent
with one shared node ordering, so that taking the edge union cannot create a
directed cycle.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError
from .graphs import (
    Dag,
    Ordering,
    _connected,
    conditioned_moral_adjacency,
    topological_sort,
)


@dataclass(frozen=True)
class FusionInput:
    """A batch of DAGs over one node set, with an optional ordering override."""

    graphs: tuple[Dag, ...]
    ordering_override: Ordering | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "graphs", tuple(self.graphs))
        if not self.graphs:
            raise InputError("fusion needs at least one input graph")
        nodes = self.graphs[0].nodes
        for g in self.graphs[1:]:
            if g.nodes != nodes:
                raise InputError("all input graphs must share one node set")
        if self.ordering_override is not None and self.ordering_override.nodes != nodes:
            raise InputError("ordering override must cover the shared node set")

    @property
    def nodes(self):
        return self.graphs[0].nodes


@dataclass(frozen=True)
class FusionResult:
    """The fused union graph, the ordering used, and the aligned inputs."""

    fused: Dag
    ordering: Ordering
    aligned: tuple[Dag, ...]


def heuristic_ordering(graphs: tuple[Dag, ...] | list[Dag]) -> Ordering:
    """Order nodes by mean topological depth across the inputs.

    A node's depth in one graph is the length of the longest directed path
    from any root to it.  Ties break toward the smaller label, so the result
    is a deterministic function of the inputs.
    """
    if not graphs:
        raise InputError("ordering heuristic needs at least one graph")
    nodes = graphs[0].nodes
    for g in graphs[1:]:
        if g.nodes != nodes:
            raise InputError("all input graphs must share one node set")
    totals = [0] * len(nodes)
    for g in graphs:
        order = topological_sort(g)
        depth = [0] * len(nodes)
        for label in order:
            v = nodes.id_of(label)
            parents = g.parent_ids(v)
            if parents:
                depth[v] = 1 + max(depth[p] for p in parents)
            totals[v] += depth[v]
    ranked = sorted(range(len(nodes)), key=lambda v: (totals[v], v))
    return Ordering(nodes, [nodes.label_of(v) for v in ranked])


def minimal_imap(g: Dag, sigma: Ordering) -> Dag:
    """Minimal independence map of ``g`` consistent with ``sigma``.

    Each node starts with all of its sigma-predecessors as parents; scanning
    the candidates in reverse sigma order, a parent is dropped whenever the
    node is d-separated from it given the remaining parents.  The result is
    acyclic by construction and minimal: dropping any kept parent would break
    the independence-map property.
    """
    if sigma.nodes != g.nodes:
        raise InputError("ordering must cover the graph's node set")
    n = len(g.nodes)
    parent_sets = [g.parent_ids(i) for i in range(n)]
    order_ids = [g.nodes.id_of(label) for label in sigma.labels]
    lab = g.nodes.label_of
    edges: list[tuple[str, str]] = []
    for pos, v in enumerate(order_ids):
        kept = set(order_ids[:pos])
        for w in reversed(order_ids[:pos]):
            rest = kept - {w}
            adj = conditioned_moral_adjacency(parent_sets, (v, w), rest)
            if not _connected(adj, v, w):
                kept.discard(w)
        edges.extend((lab(w), lab(v)) for w in kept)
    return Dag(g.nodes, edges)


def fuse(fusion_input: FusionInput) -> FusionResult:
    """Align every input to one ordering and take the union of their edges."""
    sigma = fusion_input.ordering_override
    if sigma is None:
        sigma = heuristic_ordering(fusion_input.graphs)
    aligned = tuple(minimal_imap(g, sigma) for g in fusion_input.graphs)
    union: set[tuple[str, str]] = set()
    for g in aligned:
        union.update(g.edges)
    fused = Dag(fusion_input.nodes, sorted(union))
    return FusionResult(fused=fused, ordering=sigma, aligned=aligned)
