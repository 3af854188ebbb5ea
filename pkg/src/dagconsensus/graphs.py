"""Core graph types and operations.

Graphs are immutable and live over a fixed :class:`NodeSet`.  Node labels are
strings; internally every structure works on dense integer ids assigned in
sorted label order, which is what makes iteration order (and therefore every
downstream artifact) deterministic.
"""

from __future__ import annotations

import heapq
from collections import Counter, deque
from itertools import combinations
from typing import Collection, Iterable, Iterator, Sequence

from .errors import CycleError, InputError


class NodeSet:
    """A fixed universe of node labels, indexed densely in sorted order."""

    __slots__ = ("labels", "_index")

    def __init__(self, labels: Iterable[str]) -> None:
        ordered = tuple(sorted(labels))
        if not ordered:
            raise InputError("node set must not be empty")
        if len(set(ordered)) != len(ordered):
            counts = Counter(ordered)
            dupes = sorted(l for l, c in counts.items() if c > 1)
            raise InputError(f"duplicate node labels: {', '.join(dupes)}")
        for label in ordered:
            if not label or any(ch.isspace() for ch in label) or "," in label:
                raise InputError(f"invalid node label: {label!r}")
        self.labels = ordered
        self._index = {label: i for i, label in enumerate(ordered)}

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[str]:
        return iter(self.labels)

    def __contains__(self, label: object) -> bool:
        return label in self._index

    def __eq__(self, other: object) -> bool:
        return isinstance(other, NodeSet) and self.labels == other.labels

    def __hash__(self) -> int:
        return hash(self.labels)

    def __repr__(self) -> str:
        return f"NodeSet({list(self.labels)!r})"

    def id_of(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise InputError(f"unknown node label: {label!r}") from None

    def label_of(self, node_id: int) -> str:
        return self.labels[node_id]

    def ids_of(self, labels: Iterable[str]) -> frozenset[int]:
        return frozenset(self.id_of(l) for l in labels)


class Ordering:
    """A total order over the labels of a :class:`NodeSet`."""

    __slots__ = ("nodes", "labels", "_rank")

    def __init__(self, nodes: NodeSet, labels: Sequence[str]) -> None:
        self.nodes = nodes
        self.labels = tuple(labels)
        if sorted(self.labels) != list(nodes.labels):
            raise InputError("ordering is not a permutation of the node set")
        rank = [0] * len(nodes)
        for pos, label in enumerate(self.labels):
            rank[nodes.id_of(label)] = pos
        self._rank = tuple(rank)

    def rank_of(self, label: str) -> int:
        return self._rank[self.nodes.id_of(label)]

    def rank_of_id(self, node_id: int) -> int:
        return self._rank[node_id]

    def __iter__(self) -> Iterator[str]:
        return iter(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Ordering)
            and self.nodes == other.nodes
            and self.labels == other.labels
        )

    def __hash__(self) -> int:
        return hash((self.nodes, self.labels))

    def __repr__(self) -> str:
        return f"Ordering({list(self.labels)!r})"


def _canonical_pair(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


class Dag:
    """An immutable directed acyclic graph.

    Edges are given as ``(tail, head)`` label pairs.  Construction rejects
    self-loops, duplicate edges and directed cycles.
    """

    __slots__ = ("nodes", "_edges", "_parents", "_children")

    def __init__(self, nodes: NodeSet, edges: Iterable[tuple[str, str]] = ()) -> None:
        self.nodes = nodes
        edge_ids: set[tuple[int, int]] = set()
        for u, v in edges:
            ui, vi = nodes.id_of(u), nodes.id_of(v)
            if ui == vi:
                raise InputError(f"self-loop on node {u!r}")
            edge_ids.add((ui, vi))
        self._edges = frozenset(edge_ids)
        n = len(nodes)
        parents: list[set[int]] = [set() for _ in range(n)]
        children: list[set[int]] = [set() for _ in range(n)]
        for ui, vi in edge_ids:
            if (vi, ui) in edge_ids:
                a, b = nodes.label_of(ui), nodes.label_of(vi)
                raise CycleError(f"directed cycle through edge {a} -> {b}")
            parents[vi].add(ui)
            children[ui].add(vi)
        self._parents = tuple(frozenset(p) for p in parents)
        self._children = tuple(frozenset(c) for c in children)
        _check_acyclic(self)

    # -- id-level accessors used by the algorithms ------------------------

    def parent_ids(self, node_id: int) -> frozenset[int]:
        return self._parents[node_id]

    def child_ids(self, node_id: int) -> frozenset[int]:
        return self._children[node_id]

    @property
    def edge_ids(self) -> frozenset[tuple[int, int]]:
        return self._edges

    # -- label-level accessors --------------------------------------------

    @property
    def edges(self) -> tuple[tuple[str, str], ...]:
        lab = self.nodes.label_of
        return tuple(sorted((lab(u), lab(v)) for u, v in self._edges))

    def parents(self, label: str) -> tuple[str, ...]:
        lab = self.nodes.label_of
        return tuple(sorted(lab(p) for p in self._parents[self.nodes.id_of(label)]))

    def children(self, label: str) -> tuple[str, ...]:
        lab = self.nodes.label_of
        return tuple(sorted(lab(c) for c in self._children[self.nodes.id_of(label)]))

    def has_edge(self, u: str, v: str) -> bool:
        return (self.nodes.id_of(u), self.nodes.id_of(v)) in self._edges

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Dag)
            and self.nodes == other.nodes
            and self._edges == other._edges
        )

    def __hash__(self) -> int:
        return hash((self.nodes, self._edges))

    def __repr__(self) -> str:
        return f"Dag({len(self.nodes)} nodes, {len(self._edges)} edges)"


class UGraph:
    """An immutable undirected graph over a fixed :class:`NodeSet`."""

    __slots__ = ("nodes", "_edges", "_adj")

    def __init__(self, nodes: NodeSet, edges: Iterable[tuple[str, str]] = ()) -> None:
        self.nodes = nodes
        edge_ids: set[tuple[int, int]] = set()
        for a, b in edges:
            ai, bi = nodes.id_of(a), nodes.id_of(b)
            if ai == bi:
                raise InputError(f"self-loop on node {a!r}")
            edge_ids.add(_canonical_pair(ai, bi))
        self._edges = frozenset(edge_ids)
        adj: list[set[int]] = [set() for _ in range(len(nodes))]
        for ai, bi in edge_ids:
            adj[ai].add(bi)
            adj[bi].add(ai)
        self._adj = tuple(frozenset(a) for a in adj)

    def neighbor_ids(self, node_id: int) -> frozenset[int]:
        return self._adj[node_id]

    @property
    def edge_ids(self) -> frozenset[tuple[int, int]]:
        return self._edges

    @property
    def edges(self) -> tuple[tuple[str, str], ...]:
        lab = self.nodes.label_of
        return tuple(sorted((lab(a), lab(b)) for a, b in self._edges))

    def neighbors(self, label: str) -> tuple[str, ...]:
        lab = self.nodes.label_of
        return tuple(sorted(lab(n) for n in self._adj[self.nodes.id_of(label)]))

    def has_edge(self, a: str, b: str) -> bool:
        ai, bi = self.nodes.id_of(a), self.nodes.id_of(b)
        return _canonical_pair(ai, bi) in self._edges

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, UGraph)
            and self.nodes == other.nodes
            and self._edges == other._edges
        )

    def __hash__(self) -> int:
        return hash((self.nodes, self._edges))

    def __repr__(self) -> str:
        return f"UGraph({len(self.nodes)} nodes, {len(self._edges)} edges)"


def _check_acyclic(g: Dag) -> None:
    n = len(g.nodes)
    indegree = [len(g.parent_ids(i)) for i in range(n)]
    ready = [i for i in range(n) if indegree[i] == 0]
    done = 0
    while ready:
        node = ready.pop()
        done += 1
        for child in g.child_ids(node):
            indegree[child] -= 1
            if indegree[child] == 0:
                ready.append(child)
    if done != n:
        remaining = {i for i in range(n) if indegree[i] > 0}
        edge = _find_cycle_edge(g, remaining)
        a, b = g.nodes.label_of(edge[0]), g.nodes.label_of(edge[1])
        raise CycleError(f"directed cycle through edge {a} -> {b}")


def _find_cycle_edge(g: Dag, remaining: set[int]) -> tuple[int, int]:
    # Walk backwards through parents inside the cyclic core until a repeat.
    start = min(remaining)
    seen = [start]
    node = start
    while True:
        parent = min(p for p in g.parent_ids(node) if p in remaining)
        if parent in seen:
            return (parent, node)
        seen.append(parent)
        node = parent


def topological_sort(g: Dag) -> Ordering:
    """Return the unique topological order that always picks the smallest
    available label first (Kahn's algorithm with a sorted frontier)."""
    n = len(g.nodes)
    indegree = [len(g.parent_ids(i)) for i in range(n)]
    frontier = [i for i in range(n) if indegree[i] == 0]
    heapq.heapify(frontier)
    order: list[int] = []
    while frontier:
        node = heapq.heappop(frontier)
        order.append(node)
        for child in g.child_ids(node):
            indegree[child] -= 1
            if indegree[child] == 0:
                heapq.heappush(frontier, child)
    if len(order) != n:
        # Dag construction already rejects cycles; kept as a guard for
        # subclasses or future mutation paths.
        remaining = set(range(n)) - set(order)
        edge = _find_cycle_edge(g, remaining)
        a, b = g.nodes.label_of(edge[0]), g.nodes.label_of(edge[1])
        raise CycleError(f"directed cycle through edge {a} -> {b}")
    lab = g.nodes.label_of
    return Ordering(g.nodes, [lab(i) for i in order])


def ancestral_closure_ids(
    parents: Sequence[Collection[int]], seeds: Iterable[int]
) -> set[int]:
    """Ids of ``seeds`` plus every node with a directed path into them."""
    closure = set(seeds)
    stack = list(closure)
    while stack:
        node = stack.pop()
        for p in parents[node]:
            if p not in closure:
                closure.add(p)
                stack.append(p)
    return closure


def ancestral_subgraph(g: Dag, targets: Iterable[str]) -> Dag:
    """The subgraph induced by ``targets`` and all of their ancestors."""
    seed_ids = [g.nodes.id_of(t) for t in targets]
    closure = ancestral_closure_ids(g._parents, seed_ids)
    lab = g.nodes.label_of
    sub_nodes = NodeSet(lab(i) for i in closure)
    edges = [
        (lab(u), lab(v)) for u, v in g.edge_ids if v in closure
    ]  # tails of kept heads are ancestors themselves
    return Dag(sub_nodes, edges)


def moralize(g: Dag) -> UGraph:
    """Drop directions and marry every pair of co-parents."""
    lab = g.nodes.label_of
    edges = {(lab(u), lab(v)) for u, v in g.edge_ids}
    for node in range(len(g.nodes)):
        for a, b in combinations(sorted(g.parent_ids(node)), 2):
            edges.add((lab(a), lab(b)))
    return UGraph(g.nodes, edges)


def conditioned_moral_adjacency(
    parents: Sequence[Collection[int]],
    seeds: Iterable[int],
    cond: Collection[int],
) -> dict[int, set[int]]:
    """Adjacency of the moralized ancestral subgraph of ``seeds`` plus
    ``cond``, with the ``cond`` nodes removed afterwards.

    Marriages are added before removal, so two co-parents of a conditioning
    node stay connected.  Shared by d-separation and the criticality score.
    """
    closure = ancestral_closure_ids(parents, [*seeds, *cond])
    return moral_adjacency_of_closure(parents, closure, cond)


def moral_adjacency_of_closure(
    parents: Sequence[Collection[int]],
    closure: Collection[int],
    cond: Collection[int],
) -> dict[int, set[int]]:
    """Moralize an already-computed ancestral closure, dropping ``cond``."""
    cond_set = set(cond)
    adj: dict[int, set[int]] = {n: set() for n in closure if n not in cond_set}
    for node in closure:
        node_parents = parents[node]  # all inside the closure by construction
        if node not in cond_set:
            for p in node_parents:
                if p not in cond_set:
                    adj[node].add(p)
                    adj[p].add(node)
        for a, b in combinations(node_parents, 2):
            if a not in cond_set and b not in cond_set:
                adj[a].add(b)
                adj[b].add(a)
    return adj


def d_separated(g: Dag, u: str, v: str, z: Iterable[str] = ()) -> bool:
    """Whether ``u`` and ``v`` are d-separated given ``z``.

    Uses the moral-graph criterion: take the ancestral subgraph of
    ``{u, v} | z``, moralize it, delete ``z``; separation holds exactly when
    ``u`` and ``v`` fall in different connected components.
    """
    ui, vi = g.nodes.id_of(u), g.nodes.id_of(v)
    if ui == vi:
        raise InputError("d-separation query needs two distinct nodes")
    cond = g.nodes.ids_of(z)
    if ui in cond or vi in cond:
        raise InputError("conditioning set must not contain the queried nodes")
    adj = conditioned_moral_adjacency(g._parents, (ui, vi), cond)
    return not _connected(adj, ui, vi)


def _connected(adj: dict[int, set[int]], s: int, t: int) -> bool:
    if s not in adj or t not in adj:
        return False
    seen = {s}
    queue = deque([s])
    while queue:
        node = queue.popleft()
        if node == t:
            return True
        for nb in adj[node]:
            if nb not in seen:
                seen.add(nb)
                queue.append(nb)
    return False
