"""Markov equivalence machinery: patterns, extensions and the delete operator.

A :class:`Pdag` mixes directed and undirected edges over a fixed node set.
``dag_to_cpdag`` labels the compelled edges of a DAG (the completed pattern of
its equivalence class); ``pdag_to_dag`` picks one consistent extension
deterministically.  ``na_set`` and ``apply_delete`` implement the
backward delete operator used by the pruning loop.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import InputError, OperatorError, StructuralError
from .graphs import Dag, NodeSet, _canonical_pair, topological_sort


class Pdag:
    """A partially directed graph over a fixed :class:`NodeSet`.

    An unordered pair of nodes carries at most one edge, either directed or
    undirected.  Instances are immutable; operators return new objects.
    """

    __slots__ = ("nodes", "_dir", "_und", "_dir_parents", "_dir_children",
                 "_und_nbrs", "_adj")

    def __init__(
        self,
        nodes: NodeSet,
        directed: Iterable[tuple[str, str]] = (),
        undirected: Iterable[tuple[str, str]] = (),
    ) -> None:
        self.nodes = nodes
        dir_ids: set[tuple[int, int]] = set()
        und_ids: set[tuple[int, int]] = set()
        seen_pairs: set[tuple[int, int]] = set()

        def claim(a: int, b: int, u: str, v: str) -> None:
            pair = _canonical_pair(a, b)
            if pair in seen_pairs:
                raise InputError(f"pair {u!r}, {v!r} carries more than one edge")
            seen_pairs.add(pair)

        for u, v in directed:
            ui, vi = nodes.id_of(u), nodes.id_of(v)
            if ui == vi:
                raise InputError(f"self-loop on node {u!r}")
            claim(ui, vi, u, v)
            dir_ids.add((ui, vi))
        for a, b in undirected:
            ai, bi = nodes.id_of(a), nodes.id_of(b)
            if ai == bi:
                raise InputError(f"self-loop on node {a!r}")
            claim(ai, bi, a, b)
            und_ids.add(_canonical_pair(ai, bi))

        self._dir = frozenset(dir_ids)
        self._und = frozenset(und_ids)
        n = len(nodes)
        parents: list[set[int]] = [set() for _ in range(n)]
        children: list[set[int]] = [set() for _ in range(n)]
        nbrs: list[set[int]] = [set() for _ in range(n)]
        adj: list[set[int]] = [set() for _ in range(n)]
        for u_id, v_id in dir_ids:
            parents[v_id].add(u_id)
            children[u_id].add(v_id)
            adj[u_id].add(v_id)
            adj[v_id].add(u_id)
        for a_id, b_id in und_ids:
            nbrs[a_id].add(b_id)
            nbrs[b_id].add(a_id)
            adj[a_id].add(b_id)
            adj[b_id].add(a_id)
        self._dir_parents = tuple(frozenset(p) for p in parents)
        self._dir_children = tuple(frozenset(c) for c in children)
        self._und_nbrs = tuple(frozenset(m) for m in nbrs)
        self._adj = tuple(frozenset(a) for a in adj)

    # -- id-level accessors -------------------------------------------------

    @property
    def directed_ids(self) -> frozenset[tuple[int, int]]:
        return self._dir

    @property
    def undirected_ids(self) -> frozenset[tuple[int, int]]:
        return self._und

    def parent_ids(self, node_id: int) -> frozenset[int]:
        return self._dir_parents[node_id]

    def child_ids(self, node_id: int) -> frozenset[int]:
        return self._dir_children[node_id]

    def neighbor_ids(self, node_id: int) -> frozenset[int]:
        return self._und_nbrs[node_id]

    def adjacent_ids(self, node_id: int) -> frozenset[int]:
        return self._adj[node_id]

    # -- label-level accessors ----------------------------------------------

    @property
    def directed_edges(self) -> tuple[tuple[str, str], ...]:
        lab = self.nodes.label_of
        return tuple(sorted((lab(u), lab(v)) for u, v in self._dir))

    @property
    def undirected_edges(self) -> tuple[tuple[str, str], ...]:
        lab = self.nodes.label_of
        return tuple(sorted((lab(a), lab(b)) for a, b in self._und))

    @property
    def skeleton_edges(self) -> tuple[tuple[str, str], ...]:
        lab = self.nodes.label_of
        pairs = {_canonical_pair(u, v) for u, v in self._dir} | self._und
        return tuple(sorted((lab(a), lab(b)) for a, b in pairs))

    @property
    def skeleton_edge_count(self) -> int:
        return len(self._dir) + len(self._und)

    def has_directed(self, u: str, v: str) -> bool:
        return (self.nodes.id_of(u), self.nodes.id_of(v)) in self._dir

    def has_undirected(self, a: str, b: str) -> bool:
        ai, bi = self.nodes.id_of(a), self.nodes.id_of(b)
        return _canonical_pair(ai, bi) in self._und

    def adjacent(self, a: str, b: str) -> bool:
        return self.nodes.id_of(b) in self._adj[self.nodes.id_of(a)]

    def undirected_neighbors(self, label: str) -> tuple[str, ...]:
        lab = self.nodes.label_of
        return tuple(sorted(lab(n) for n in self._und_nbrs[self.nodes.id_of(label)]))

    def directed_parents(self, label: str) -> tuple[str, ...]:
        lab = self.nodes.label_of
        return tuple(sorted(lab(p) for p in self._dir_parents[self.nodes.id_of(label)]))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Pdag)
            and self.nodes == other.nodes
            and self._dir == other._dir
            and self._und == other._und
        )

    def __hash__(self) -> int:
        return hash((self.nodes, self._dir, self._und))

    def __repr__(self) -> str:
        return (
            f"Pdag({len(self.nodes)} nodes, {len(self._dir)} directed, "
            f"{len(self._und)} undirected)"
        )


@dataclass(frozen=True)
class DeleteChoice:
    """One delete operation: drop the edge between ``u`` and ``v``, evaluated
    in the orientation u -> v, steering the neighbors in ``h_set``."""

    u: str
    v: str
    h_set: frozenset[str]

    def __post_init__(self) -> None:
        object.__setattr__(self, "h_set", frozenset(self.h_set))


def dag_to_cpdag(g: Dag) -> Pdag:
    """The completed pattern of ``g``'s equivalence class.

    Edges oriented the same way in every member stay directed (compelled);
    the rest become undirected.  Uses the classic two-pass edge labeling:
    first give edges a total order from a topological sort, then propagate
    compelled/reversible labels in that order.
    """
    order = topological_sort(g)
    pos = order.rank_of_id

    # Total order over edges: by head position ascending, then tail
    # position descending.
    edges = sorted(g.edge_ids, key=lambda e: (pos(e[1]), -pos(e[0])))
    UNKNOWN, COMPELLED, REVERSIBLE = 0, 1, 2
    label = {e: UNKNOWN for e in edges}
    cursor = 0

    while cursor < len(edges):
        if label[edges[cursor]] != UNKNOWN:
            cursor += 1
            continue
        x, y = edges[cursor]
        done = False
        for w in sorted(g.parent_ids(x)):
            if label[(w, x)] != COMPELLED:
                continue
            if w not in g.parent_ids(y):
                for p in g.parent_ids(y):
                    label[(p, y)] = COMPELLED
                done = True
                break
            label[(w, y)] = COMPELLED
        if done:
            continue
        incident = [(p, y) for p in g.parent_ids(y)]
        if any(z != x and z not in g.parent_ids(x) for z in g.parent_ids(y)):
            for e in incident:
                if label[e] == UNKNOWN:
                    label[e] = COMPELLED
        else:
            for e in incident:
                if label[e] == UNKNOWN:
                    label[e] = REVERSIBLE

    lab = g.nodes.label_of
    directed = [(lab(u), lab(v)) for (u, v), state in label.items() if state == COMPELLED]
    undirected = [(lab(u), lab(v)) for (u, v), state in label.items() if state == REVERSIBLE]
    return Pdag(g.nodes, directed, undirected)


def pdag_to_dag(p: Pdag) -> Dag:
    """One consistent extension of ``p``: same skeleton, directed edges kept,
    no new v-structures.

    Repeatedly retires the smallest-id node that (a) has no outgoing directed
    edge and (b) whose undirected neighbors are adjacent to all of its other
    adjacent nodes, orienting that node's undirected edges into it.  Raises
    :class:`StructuralError` when no consistent extension exists.
    """
    n = len(p.nodes)
    alive = set(range(n))
    out_deg = [len(p.child_ids(i)) for i in range(n)]
    dir_in = [set(p.parent_ids(i)) for i in range(n)]
    und = [set(p.neighbor_ids(i)) for i in range(n)]
    adj = [set(p.adjacent_ids(i)) for i in range(n)]

    oriented: list[tuple[int, int]] = []
    while alive:
        chosen = -1
        for x in sorted(alive):
            if out_deg[x] > 0:
                continue
            if all(adj[x] <= adj[y] | {y} for y in und[x]):
                chosen = x
                break
        if chosen < 0:
            raise StructuralError("graph admits no consistent extension")
        for y in und[chosen]:
            oriented.append((y, chosen))
            und[y].discard(chosen)
        for y in dir_in[chosen]:
            out_deg[y] -= 1
        for y in adj[chosen]:
            adj[y].discard(chosen)
        alive.discard(chosen)

    lab = p.nodes.label_of
    edges = [(lab(u), lab(v)) for u, v in p.directed_ids]
    edges.extend((lab(u), lab(v)) for u, v in oriented)
    return Dag(p.nodes, edges)


def na_pool_ids(p: Pdag, v_id: int, u_id: int) -> tuple[int, ...]:
    """Id-level pool behind :func:`na_set`; sorted ascending."""
    pool = []
    for w in sorted(p.neighbor_ids(v_id)):
        if w != u_id and w in p.adjacent_ids(u_id):
            pool.append(w)
    return tuple(pool)


def na_set(p: Pdag, v: str, u: str) -> tuple[str, ...]:
    """Steerable neighborhood for deleting the edge between ``u`` and ``v``
    (evaluated as u -> v): nodes undirected with ``v`` that are adjacent to
    ``u`` by any edge.  Leaving this set minus the steering choice a clique
    is what keeps the post-deletion graph extendable.  Sorted by label."""
    ui, vi = p.nodes.id_of(u), p.nodes.id_of(v)
    _require_deletable_edge(p, ui, vi, u, v)
    lab = p.nodes.label_of
    return tuple(lab(w) for w in na_pool_ids(p, vi, ui))


def delete_is_valid_ids(p: Pdag, u_id: int, v_id: int, h_ids: frozenset[int]) -> bool:
    """Whether ``h_ids`` is an admissible steering set: it must come from the
    pool and leave the remainder of the pool a clique in the skeleton."""
    pool = na_pool_ids(p, v_id, u_id)
    if not h_ids <= set(pool):
        return False
    remainder = [w for w in pool if w not in h_ids]
    for i, a in enumerate(remainder):
        for b in remainder[i + 1:]:
            if b not in p.adjacent_ids(a):
                return False
    return True


def apply_delete(p: Pdag, choice: DeleteChoice) -> Pdag:
    """Remove the chosen edge and steer the ``h_set`` neighbors.

    Undirected v-h edges become v -> h; undirected u-h edges become u -> h.
    The caller is expected to renormalize the result back to a completed
    pattern (extend to a DAG, then relabel).
    """
    ui, vi = p.nodes.id_of(choice.u), p.nodes.id_of(choice.v)
    _require_deletable_edge(p, ui, vi, choice.u, choice.v)
    h_ids = frozenset(p.nodes.id_of(h) for h in choice.h_set)
    if ui in h_ids or vi in h_ids:
        raise OperatorError("h_set must not contain the deleted edge's endpoints")
    if not delete_is_valid_ids(p, ui, vi, h_ids):
        raise OperatorError(
            f"invalid delete of {choice.u!r} -> {choice.v!r}: "
            f"h_set {sorted(choice.h_set)!r} fails the clique condition"
        )

    new_dir = set(p.directed_ids)
    new_und = set(p.undirected_ids)
    new_dir.discard((ui, vi))
    new_und.discard(_canonical_pair(ui, vi))
    for h in h_ids:
        vh = _canonical_pair(vi, h)
        if vh in new_und:
            new_und.discard(vh)
            new_dir.add((vi, h))
        uh = _canonical_pair(ui, h)
        if uh in new_und:
            new_und.discard(uh)
            new_dir.add((ui, h))

    lab = p.nodes.label_of
    return Pdag(
        p.nodes,
        [(lab(a), lab(b)) for a, b in new_dir],
        [(lab(a), lab(b)) for a, b in new_und],
    )


def _require_deletable_edge(p: Pdag, ui: int, vi: int, u: str, v: str) -> None:
    if ui == vi:
        raise InputError("edge endpoints must be distinct")
    if (ui, vi) not in p.directed_ids and _canonical_pair(ui, vi) not in p.undirected_ids:
        raise InputError(f"no edge {u!r} -> {v!r} (directed or undirected) in graph")
