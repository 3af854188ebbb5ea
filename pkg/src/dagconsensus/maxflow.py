"""Unit-capacity min cut on undirected graphs.

Each undirected edge is modeled as a pair of opposing arcs of capacity one.
Augmentation follows shortest paths found by breadth-first search with
neighbors visited in sorted id order, so the flow, the residual graph and the
reported cut are all deterministic functions of the input.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Collection, Mapping

from .errors import InputError
from .graphs import UGraph, _canonical_pair


@dataclass(frozen=True)
class CutResult:
    """A minimum s-t cut: its size, the crossing edges and the source side.

    ``cut_edges`` holds canonical ``(a, b)`` label pairs with ``a < b``;
    ``source_side`` is the set of nodes still reachable from the source in
    the final residual network (it always contains the source and never the
    sink).
    """

    value: int
    cut_edges: frozenset[tuple[str, str]]
    source_side: frozenset[str]


def min_cut(g: UGraph, s: str, t: str) -> CutResult:
    """Minimum number of edges whose removal disconnects ``s`` from ``t``.

    Disconnected inputs yield value 0 with an empty cut.  The returned cut
    is the canonical one induced by residual reachability from ``s``.
    """
    si, ti = g.nodes.id_of(s), g.nodes.id_of(t)
    if si == ti:
        raise InputError("min cut needs two distinct terminals")
    adj = {i: g.neighbor_ids(i) for i in range(len(g.nodes))}
    value, cut_ids, side_ids = min_cut_ids(adj, si, ti)
    lab = g.nodes.label_of
    cut = frozenset((lab(a), lab(b)) for a, b in cut_ids)
    side = frozenset(lab(i) for i in side_ids)
    return CutResult(value, cut, side)


def min_cut_ids(
    adj: Mapping[int, Collection[int]], s: int, t: int, limit: int | None = None
) -> tuple[int, frozenset[tuple[int, int]] | None, frozenset[int] | None]:
    """Id-level worker behind :func:`min_cut`.

    ``adj`` maps node ids to neighbor collections; nodes absent from the
    mapping are treated as isolated.  Returns ``(value, cut_pairs,
    source_side)`` with pairs in canonical (small, large) order.

    With a ``limit``, augmentation stops as soon as the flow exceeds it and
    ``(lower bound, None, None)`` comes back instead; callers that only need
    to know a cut is too expensive can skip the rest of the computation.
    """
    # symmetric listings expected: every edge appears under both endpoints
    nbrs: dict[int, list[int]] = {node: sorted(col) for node, col in adj.items()}
    nbrs.setdefault(s, [])
    nbrs.setdefault(t, [])
    cap: dict[tuple[int, int], int] = {}
    for node, col in nbrs.items():
        for nb in col:
            cap[(node, nb)] = 1

    value = 0
    while True:
        parent = _augmenting_path(nbrs, cap, s, t)
        if parent is None:
            break
        # Walk back from t, find the bottleneck, then apply it.
        bottleneck = None
        node = t
        while node != s:
            prev = parent[node]
            c = cap[(prev, node)]
            bottleneck = c if bottleneck is None else min(bottleneck, c)
            node = prev
        node = t
        while node != s:
            prev = parent[node]
            cap[(prev, node)] -= bottleneck
            cap[(node, prev)] += bottleneck
            node = prev
        value += bottleneck
        if limit is not None and value > limit:
            return value, None, None

    source_side = _reachable(nbrs, cap, s)
    cut: set[tuple[int, int]] = set()
    for node, col in adj.items():
        in_side = node in source_side
        for nb in col:
            if in_side != (nb in source_side):
                cut.add(_canonical_pair(node, nb))
    assert len(cut) == value, "cut size must equal the max-flow value"
    return value, frozenset(cut), frozenset(source_side)


def _augmenting_path(
    nbrs: dict[int, list[int]], cap: dict[tuple[int, int], int], s: int, t: int
) -> dict[int, int] | None:
    parent: dict[int, int] = {s: s}
    queue = deque([s])
    while queue:
        node = queue.popleft()
        for nb in nbrs[node]:
            if nb not in parent and cap[(node, nb)] > 0:
                parent[nb] = node
                if nb == t:
                    return parent
                queue.append(nb)
    return None


def _reachable(
    nbrs: dict[int, list[int]], cap: dict[tuple[int, int], int], s: int
) -> set[int]:
    seen = {s}
    queue = deque([s])
    while queue:
        node = queue.popleft()
        for nb in nbrs[node]:
            if nb not in seen and cap[(node, nb)] > 0:
                seen.add(nb)
                queue.append(nb)
    return seen
