"""Structural comparison metrics."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .equivalence import Pdag, pdag_to_dag
from .errors import InputError
from .graphs import Dag, UGraph, moralize

GraphLike = Union[Dag, Pdag]


def _moral_edge_ids(g: GraphLike) -> frozenset[tuple[int, int]]:
    if isinstance(g, Pdag):
        g = pdag_to_dag(g)
    return moralize(g).edge_ids


def smhd(a: GraphLike, b: GraphLike) -> int:
    """Structural moral Hamming distance.

    The number of edges by which the moral graphs of ``a`` and ``b`` differ
    (symmetric difference of their edge sets).  Partially directed inputs are
    first extended to a member DAG of their class.
    """
    if a.nodes != b.nodes:
        raise InputError("metrics need graphs over the same node set")
    return len(_moral_edge_ids(a) ^ _moral_edge_ids(b))


def treewidth_upper(g: GraphLike | UGraph) -> int:
    """Upper bound on treewidth via min-fill elimination.

    Directed inputs are moralized first; undirected inputs are eliminated
    as given.  At every step the node requiring the fewest fill-in edges is
    eliminated, breaking ties toward smaller current degree and then smaller
    label.  Returns the largest clique formed during elimination minus one,
    which for an isolated or empty graph is zero.
    """
    if isinstance(g, Pdag):
        g = pdag_to_dag(g)
    moral = moralize(g) if isinstance(g, Dag) else g
    n = len(moral.nodes)
    adj: list[set[int]] = [set(moral.neighbor_ids(i)) for i in range(n)]
    remaining = set(range(n))
    width = 0
    while remaining:
        best = None
        best_key = None
        for v in sorted(remaining):
            nbrs = adj[v]
            fill = 0
            nbr_list = sorted(nbrs)
            for i, a in enumerate(nbr_list):
                for b in nbr_list[i + 1:]:
                    if b not in adj[a]:
                        fill += 1
            key = (fill, len(nbrs), v)
            if best_key is None or key < best_key:
                best, best_key = v, key
        nbrs = sorted(adj[best])
        width = max(width, len(nbrs))
        for i, a in enumerate(nbrs):
            for b in nbrs[i + 1:]:
                adj[a].add(b)
                adj[b].add(a)
        for a in nbrs:
            adj[a].discard(best)
        adj[best].clear()
        remaining.discard(best)
    return width


@dataclass(frozen=True)
class MetricsReport:
    """One comparison row: names, distance and simple size statistics."""

    name_a: str
    name_b: str
    smhd: int
    edges_a: int
    edges_b: int
    treewidth_ub_a: int
    treewidth_ub_b: int


def compare(name_a: str, a: GraphLike, name_b: str, b: GraphLike) -> MetricsReport:
    """Pairwise report between two graphs over the same node set."""
    return MetricsReport(
        name_a=name_a,
        name_b=name_b,
        smhd=smhd(a, b),
        edges_a=a.skeleton_edge_count if isinstance(a, Pdag) else a.edge_count,
        edges_b=b.skeleton_edge_count if isinstance(b, Pdag) else b.edge_count,
        treewidth_ub_a=treewidth_upper(a),
        treewidth_ub_b=treewidth_upper(b),
    )


def mean_smhd(reference: GraphLike, others: list[GraphLike] | tuple[GraphLike, ...]) -> Fraction:
    """Exact mean distance from ``reference`` to each graph in ``others``."""
    if not others:
        raise InputError("mean distance needs at least one comparison graph")
    return Fraction(sum(smhd(reference, g) for g in others), len(others))
