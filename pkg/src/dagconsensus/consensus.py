"""Backward pruning of a fused graph guided by min-cut support.

The pipeline: align and union the inputs, convert the union to its completed
pattern, then repeatedly delete the least critical edge.  An edge's
criticality is the mean, over the input graphs, of the minimum number of
moral edges that must be removed to separate its endpoints given a
conditioning set; the edges of each graph's minimum cut are removed from that
graph as the loop proceeds, so later scores reflect only still-unexplained
support.  The loop stops once the best score exceeds the threshold theta, or,
in trajectory mode, runs until no edge remains, recording every deletion so
any threshold's result can be replayed cheaply.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .equivalence import (
    DeleteChoice,
    Pdag,
    apply_delete,
    dag_to_cpdag,
    na_pool_ids,
    pdag_to_dag,
)
from .errors import InputError, StateError
from .fusion import FusionInput, fuse
from .graphs import Dag, NodeSet, Ordering, _canonical_pair
from .metrics import smhd, treewidth_upper


def as_theta(value: Fraction | float | int | str) -> Fraction:
    """Coerce a threshold to an exact rational in [0, 1].

    Strings accept both decimal ("0.5") and ratio ("1/3") forms; floats are
    converted exactly, so pass a string or Fraction when a decimal such as
    0.1 must be exact.
    """
    try:
        theta = Fraction(value)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise InputError(f"cannot read threshold from {value!r}") from exc
    if not 0 <= theta <= 1:
        raise InputError("theta must lie in [0, 1]")
    return theta


@dataclass(frozen=True)
class Config:
    """Run parameters: ``theta=None`` selects trajectory mode."""

    theta: Fraction | float | int | str | None = None
    k_max: int = 10

    def __post_init__(self) -> None:
        if self.theta is not None:
            object.__setattr__(self, "theta", as_theta(self.theta))
        if not isinstance(self.k_max, int) or self.k_max < 0:
            raise InputError("k_max must be a non-negative integer")


@dataclass(frozen=True)
class CriticalityResult:
    """Mean min-cut size and the per-graph cut edge sets behind it."""

    psi: Fraction
    per_graph_cuts: tuple[frozenset[tuple[str, str]], ...]


@dataclass(frozen=True)
class Candidate:
    """One scored deletion option.

    ``u``/``v`` give the evaluated orientation, ``directed`` whether the
    pattern edge itself was directed, ``h_set`` the steered neighbors and
    ``s_set`` the conditioning set actually used for the cut queries.
    """

    u: str
    v: str
    directed: bool
    h_set: tuple[str, ...]
    s_set: tuple[str, ...]
    psi: Fraction
    per_graph_cuts: tuple[frozenset[tuple[str, str]], ...]


@dataclass(frozen=True)
class PruneStep:
    """One recorded deletion plus post-step summary statistics."""

    index: int
    u: str
    v: str
    directed: bool
    h_set: tuple[str, ...]
    s_set: tuple[str, ...]
    psi_star: Fraction
    per_graph_cuts: tuple[frozenset[tuple[str, str]], ...]
    skeleton_edges: int
    treewidth_ub: int
    input_edge_counts: tuple[int, ...]


@dataclass(frozen=True)
class Trajectory:
    """A full pruning record: replaying any prefix reproduces the state."""

    sigma: Ordering
    g_plus: Dag
    steps: tuple[PruneStep, ...]
    final_state: Pdag


@dataclass(frozen=True)
class RunResult:
    consensus: Dag
    cpdag: Pdag
    trajectory: Trajectory


@dataclass(frozen=True)
class ThetaSelection:
    """The threshold chosen by trajectory scan and the graph it selects."""

    theta: Fraction
    prefix: int
    pattern: Pdag
    mean_distance: Fraction


def _unit_min_cut_masks(
    nbr: dict[int, int], s: int, t: int, budget: int | None
) -> tuple[int, frozenset[tuple[int, int]] | None, int]:
    """Unit-capacity min cut on adjacency bitmasks.

    ``nbr`` maps node ids to neighbor masks (symmetric); isolated nodes may
    be absent.  Augmenting paths are found breadth-first with neighbors in
    ascending id order, exactly like the list-based solver, so the reported
    cut is the same canonical one.  Past ``budget`` the scan stops and a
    lower bound comes back as ``(value, None, support)``.

    The third result is the flow's support: the nodes its augmenting paths
    ever touched.  While every edge between non-support nodes outside that
    set stays put, the flow remains feasible, so the value (and for exact
    results the cut) stays correct even if the graph loses other edges.
    """
    nbr_get = nbr.get
    blocked: dict[int, int] = {}
    blocked_get = blocked.get
    net: dict[tuple[int, int], int] = {}
    s_bit = 1 << s
    support = 0
    value = 0
    while True:
        parent: dict[int, int] = {}
        visited = s_bit
        frontier = [s]
        found = False
        while frontier and not found:
            nxt: list[int] = []
            for a in frontier:
                avail = nbr_get(a, 0) & ~blocked_get(a, 0) & ~visited
                while avail:
                    lsb = avail & -avail
                    b = lsb.bit_length() - 1
                    avail ^= lsb
                    parent[b] = a
                    if b == t:
                        found = True
                        break
                    visited |= lsb
                    nxt.append(b)
                if found:
                    break
            frontier = nxt
        if not found:
            break
        # unit capacities from the source side: the bottleneck is always 1
        b = t
        support |= s_bit
        while b != s:
            support |= 1 << b
            a = parent[b]
            if a < b:
                key, sign = (a, b), 1
            else:
                key, sign = (b, a), -1
            d = net.get(key, 0) + sign
            net[key] = d
            nd = d * sign
            if nd == 1:
                blocked[a] = blocked_get(a, 0) | (1 << b)
            else:
                blocked[a] = blocked_get(a, 0) & ~(1 << b)
            if nd == -1:
                blocked[b] = blocked_get(b, 0) | (1 << a)
            else:
                blocked[b] = blocked_get(b, 0) & ~(1 << a)
            b = a
        value += 1
        if budget is not None and value > budget:
            return value, None, support
    reach = s_bit
    frontier = [s]
    while frontier:
        nxt = []
        for a in frontier:
            avail = nbr_get(a, 0) & ~blocked_get(a, 0) & ~reach
            while avail:
                lsb = avail & -avail
                b = lsb.bit_length() - 1
                avail ^= lsb
                reach |= lsb
                nxt.append(b)
        frontier = nxt
    cut = set()
    for a, mask in nbr.items():
        if reach >> a & 1:
            cross = mask & ~reach
            while cross:
                lsb = cross & -cross
                b = lsb.bit_length() - 1
                cross ^= lsb
                cut.add((a, b) if a < b else (b, a))
    assert len(cut) == value, "cut size must equal the max-flow value"
    return value, frozenset(cut), support


class _InputState:
    """Mutable per-input adjacency plus a cut cache.

    Node sets live as bitmasks.  Cache keys are ``(min(s, t), max(s, t),
    conditioning frozenset)`` (the cut is symmetric); entries carry the
    flow's support mask and the state version they were computed at.
    Removing edges only ever shrinks a query's moralized ancestral graph,
    and the shrinkage is confined to moral edges incident to an ancestor of
    a removed edge's tail.  A stored flow that avoids all such nodes is
    still feasible, so its value, and for exact entries its cut, remain
    correct.  Staleness is therefore checked lazily per hit: an entry
    survives while no mutation since its version touched its support.
    Non-exact entries are lower bounds left behind by budgeted queries;
    their partial flows earn the same treatment.
    """

    __slots__ = (
        "parents",
        "parent_mask",
        "cache",
        "edge_count",
        "version",
        "n",
        "_log",
        "_since",
        "_anc",
    )

    def __init__(self, g: Dag) -> None:
        n = len(g.nodes)
        self.parents = [set(g.parent_ids(i)) for i in range(n)]
        self.parent_mask = [
            sum(1 << p for p in ps) for ps in self.parents
        ]
        self.cache: dict = {}
        self.edge_count = g.edge_count
        self.version = 0
        self.n = n
        self._log: list[int] = []  # per mutation, mask of vulnerable nodes
        self._since: dict[int, int] = {}
        self._anc: list[int | None] = [None] * n

    def dirty_since(self, version: int) -> int:
        """Mask of nodes whose incident moral edges may have vanished in any
        conditioned ancestral graph since ``version``: the ancestors (at
        removal time) of the tails of all removed edges."""
        if version == self.version:
            return 0
        got = self._since.get(version)
        if got is None:
            got = 0
            for mask in self._log[version:]:
                got |= mask
            self._since[version] = got
        return got

    def _anc_mask(self, x: int) -> int:
        got = self._anc[x]
        if got is None:
            got = 1 << x
            for p in self.parents[x]:
                got |= self._anc_mask(p)
            self._anc[x] = got
        return got

    def cut(
        self, s: int, t: int, cond: frozenset[int], budget: int | None = None
    ) -> tuple[int, frozenset[tuple[int, int]] | None, int]:
        """The conditioned min cut, or a lower bound past ``budget``.

        Returns ``(value, cut pairs, support mask)``; a ``None`` cut means
        the true size is at least ``value``, which already exceeds the
        budget.  Exact results always carry their cut pairs.
        """
        key = (s, t, cond) if s < t else (t, s, cond)
        entry = self.cache.get(key)
        if entry is not None:
            support, version, exact, value, cut_pairs = entry
            if version != self.version and self.dirty_since(version) & support:
                entry = None
            elif exact or (budget is not None and value > budget):
                if version != self.version:
                    self.cache[key] = (support, self.version, exact, value, cut_pairs)
                return value, cut_pairs, support
        anc = self._anc_mask
        closure = anc(s) | anc(t)
        cond_mask = 0
        for c in cond:
            closure |= anc(c)
            cond_mask |= 1 << c
        parent_mask = self.parent_mask
        nbr: dict[int, int] = {}
        nbr_get = nbr.get
        m = closure
        while m:
            lsb = m & -m
            c = lsb.bit_length() - 1
            m ^= lsb
            pm = parent_mask[c] & ~cond_mask
            if lsb & cond_mask:
                c_add = 0
            else:
                c_add = lsb
                if pm:
                    nbr[c] = nbr_get(c, 0) | pm
            pmm = pm
            while pmm:
                pl = pmm & -pmm
                p = pl.bit_length() - 1
                pmm ^= pl
                nbr[p] = nbr_get(p, 0) | ((pm ^ pl) | c_add)
        value, cut_pairs, support = _unit_min_cut_masks(nbr, s, t, budget)
        self.cache[key] = (support, self.version, cut_pairs is not None, value, cut_pairs)
        return value, cut_pairs, support

    def remove_pairs(self, pairs: Iterable[tuple[int, int]]) -> None:
        """Drop the pairs' directed counterparts and log the mutation."""
        removals = []
        for a, b in pairs:
            if a in self.parents[b]:
                removals.append((a, b))
            if b in self.parents[a]:
                removals.append((b, a))
        if not removals:
            return
        vulnerable = 0
        for p, _c in removals:  # ancestors on the pre-removal graph
            vulnerable |= self._anc_mask(p)
        for p, c in removals:
            self.parents[c].discard(p)
            self.parent_mask[c] &= ~(1 << p)
            self.edge_count -= 1
        self._log.append(vulnerable)
        self.version += 1
        self._since = {}
        self._anc = [None] * self.n


def _shared_nodes(graphs: Sequence[Dag]) -> NodeSet:
    if not graphs:
        raise InputError("need at least one input graph")
    nodes = graphs[0].nodes
    for g in graphs[1:]:
        if g.nodes != nodes:
            raise InputError("all input graphs must share one node set")
    return nodes


def _label_cuts(
    nodes: NodeSet, cuts: Sequence[frozenset[tuple[int, int]]]
) -> tuple[frozenset[tuple[str, str]], ...]:
    lab = nodes.label_of
    return tuple(
        frozenset((lab(a), lab(b)) for a, b in cut) for cut in cuts
    )


def criticality(
    edge: tuple[str, str], graphs: Sequence[Dag], cond: Iterable[str] = ()
) -> CriticalityResult:
    """Score one oriented edge against the inputs given a conditioning set.

    For each graph: take the ancestral subgraph of the endpoints plus
    ``cond``, moralize it, drop the conditioning nodes, and find a minimum
    edge cut between the endpoints.  The score is the mean cut size; the cut
    edge sets are returned per graph, in input order.
    """
    nodes = _shared_nodes(graphs)
    u, v = edge
    ui, vi = nodes.id_of(u), nodes.id_of(v)
    if ui == vi:
        raise InputError("edge endpoints must be distinct")
    cond_ids = nodes.ids_of(cond)
    if ui in cond_ids or vi in cond_ids:
        raise InputError("conditioning set must not contain the edge endpoints")
    total = 0
    cuts = []
    for g in graphs:
        state = _InputState(g)
        value, cut_pairs, _ = state.cut(ui, vi, cond_ids)
        total += value
        cuts.append(cut_pairs)
    return CriticalityResult(
        psi=Fraction(total, len(graphs)),
        per_graph_cuts=_label_cuts(nodes, cuts),
    )


def _iter_candidate_ids(
    pattern: Pdag, states: Sequence[_InputState], k_max: int, best_total: list
) -> Iterator[tuple]:
    """Yield scored candidates as id-level tuples.

    Each item is ``(total, pair, h_key, flag, u, v, h_ids, s_ids, cuts)``
    where ``total`` is the summed cut value (psi times the graph count).
    Candidates whose partial sum already exceeds ``best_total[0]`` are
    skipped; pass ``[None]`` to disable that pruning and see every candidate.
    """
    directed = pattern.directed_ids
    pairs = sorted({_canonical_pair(u, v) for u, v in directed} | set(pattern.undirected_ids))
    for a, b in pairs:
        if (a, b) in directed:
            orientations = ((a, b, 0, True),)
        elif (b, a) in directed:
            orientations = ((b, a, 0, True),)
        else:
            orientations = ((a, b, 0, False), (b, a, 1, False))
        for u, v, flag, is_directed in orientations:
            pool = na_pool_ids(pattern, v, u)
            base = frozenset(pattern.parent_ids(v) - {u})
            pool_set = frozenset(pool)
            # adjacency of the pool as bitmasks over pool positions
            masks = []
            for w in pool:
                adj_w = pattern.adjacent_ids(w)
                m = 0
                for j, x in enumerate(pool):
                    if x != w and x in adj_w:
                        m |= 1 << j
                masks.append(m)
            max_h = min(len(pool), k_max)
            positions = range(len(pool))
            for size in range(max_h + 1):
                for picked in combinations(positions, size):
                    h_mask = 0
                    for j in picked:
                        h_mask |= 1 << j
                    if not _remainder_is_clique(masks, h_mask):
                        continue
                    h = tuple(pool[j] for j in picked)
                    h_ids = frozenset(h)
                    s_ids = pool_set.difference(h_ids).union(base)
                    total = 0
                    cuts = []
                    cap = best_total[0]
                    for state in states:
                        if cap is None:
                            value, cut_pairs, _ = state.cut(u, v, s_ids)
                        else:
                            value, cut_pairs, _ = state.cut(u, v, s_ids, cap - total)
                        total += value
                        cuts.append(cut_pairs)
                        if cap is not None and total > cap:
                            break
                    else:
                        yield (
                            total,
                            (a, b),
                            (size, h),
                            flag,
                            u,
                            v,
                            h_ids,
                            s_ids,
                            tuple(cuts),
                        )


def _remainder_is_clique(masks: list[int], h_mask: int) -> bool:
    remainder = (1 << len(masks)) - 1 & ~h_mask
    for j, m in enumerate(masks):
        bit = 1 << j
        if remainder & bit and (m & remainder) != (remainder & ~bit):
            return False
    return True


def _valid_h_masks(masks: list[int], k_max: int) -> list[int]:
    """Position masks of every admissible H over the pool.

    H is admissible when the rest of the pool is a clique and ``|H|`` is at
    most ``k_max``, so the admissible H are exactly the complements of the
    pool graph's cliques of size at least ``len(pool) - k_max``.  Walking
    cliques directly keeps the work proportional to the admissible count
    instead of the full subset lattice.
    """
    n = len(masks)
    full = (1 << n) - 1
    min_k = n - k_max
    out: list[int] = []

    def extend(k_mask: int, k_size: int, cand: int) -> None:
        if k_size >= min_k:
            out.append(full & ~k_mask)
        if k_size + cand.bit_count() < min_k:
            return
        m = cand
        while m:
            lsb = m & -m
            j = lsb.bit_length() - 1
            m ^= lsb
            extend(k_mask | lsb, k_size + 1, cand & masks[j] & ~((lsb << 1) - 1))

    extend(0, 0, full)
    return out


def _best_candidate_ids(
    pattern: Pdag, states: Sequence[_InputState], k_max: int, seed: int | None = None
) -> tuple | None:
    """The canonical minimum-key candidate, or None if nothing scores
    within ``seed`` (a cap on totals; candidates above it are discarded)."""
    best = None
    best_total = [seed]
    for item in _iter_candidate_ids(pattern, states, k_max, best_total):
        key = item[:4]
        if best is None or key < best[:4]:
            best = item
            best_total[0] = item[0]
    return best


def _pair_profile(pattern: Pdag, a: int, b: int) -> tuple:
    """Everything a pair's score depends on from the pattern side: the
    orientations to evaluate, each with its deletion pool, the pool's
    internal adjacency as bitmasks, and the fixed parents of the head."""
    directed = pattern.directed_ids
    if (a, b) in directed:
        orientations = ((a, b, 0),)
    elif (b, a) in directed:
        orientations = ((b, a, 0),)
    else:
        orientations = ((a, b, 0), (b, a, 1))
    profile = []
    for u, v, flag in orientations:
        pool = na_pool_ids(pattern, v, u)
        base = frozenset(pattern.parent_ids(v) - {u})
        masks = []
        for w in pool:
            adj_w = pattern.adjacent_ids(w)
            m = 0
            for j, x in enumerate(pool):
                if x != w and x in adj_w:
                    m |= 1 << j
            masks.append(m)
        profile.append((u, v, flag, pool, base, tuple(masks)))
    return tuple(profile)


def _score_pair(
    states: Sequence[_InputState],
    k_max: int,
    pair: tuple[int, int],
    profile: tuple,
    cap: int | None,
) -> tuple[tuple | None, tuple[int, ...]]:
    """The pair's best candidate within ``cap``, plus its closure footprint.

    Steering sets whose partial sum strictly exceeds the running cap are
    skipped, so a found item is the pair's exact minimum whenever that
    minimum is at most the starting cap; ``None`` certifies the minimum
    exceeds it.  Ties resolve by H size, H members, then listed orientation
    before reversed, matching full enumeration order.  The footprint holds,
    per input, the union of the support masks of every consulted query; the
    result stays valid while no input mutation touches its footprint.
    """
    a, b = pair
    best = None
    footprint = [0] * len(states)
    r = len(states)
    # densest graphs bust the cap soonest; totals do not depend on order
    order = sorted(range(r), key=lambda i: -states[i].edge_count)
    for u, v, flag, pool, base, masks in profile:
        pool_set = frozenset(pool)
        for h_mask in _valid_h_masks(masks, k_max):
            h_list = []
            m = h_mask
            while m:
                lsb = m & -m
                h_list.append(pool[lsb.bit_length() - 1])
                m ^= lsb
            h = tuple(h_list)
            h_ids = frozenset(h)
            s_ids = pool_set.difference(h_ids).union(base)
            total = 0
            cuts: list = [None] * r
            complete = True
            for idx in order:
                budget = None if cap is None else cap - total
                value, cut_pairs, support = states[idx].cut(u, v, s_ids, budget)
                footprint[idx] |= support
                total += value
                cuts[idx] = cut_pairs
                if cap is not None and total > cap:
                    complete = False
                    break
            if complete:
                item = (total, (a, b), (len(h), h), flag, u, v, h_ids, s_ids, tuple(cuts))
                if best is None or item[:4] < best[:4]:
                    best = item
                    cap = total
    return best, tuple(footprint)


_RESCORE = object()


def _memo_best(
    pattern: Pdag,
    states: Sequence[_InputState],
    k_max: int,
    memo: dict,
    seed: int | None,
) -> tuple | None:
    """Minimum-key candidate over all pairs, reusing per-pair results.

    A memo entry ``(profile, item, footprint, versions, cap)`` survives an
    iteration when the pair's pattern profile is unchanged and no input
    mutation since ``versions`` touched the entry's closure footprint.  A
    surviving found item is the pair's exact minimum; a surviving ``None``
    certifies the minimum exceeds ``cap``, which rules the pair out whenever
    the current running best is at least as tight.  Everything else is
    rescored under the running cap, seeded by ``seed``; a ``None`` return
    therefore only means nothing scored within the seed.
    """
    directed = pattern.directed_ids
    pairs = sorted(
        {_canonical_pair(u, v) for u, v in directed} | set(pattern.undirected_ids)
    )
    versions = tuple(state.version for state in states)
    best = None
    cap = seed
    for pair in pairs:
        profile = _pair_profile(pattern, *pair)
        entry = memo.get(pair)
        item = _RESCORE
        if entry is not None and entry[0] == profile:
            _, prev_item, footprint, prev_versions, prev_cap = entry
            clean = True
            if prev_versions != versions:
                for state, ver, mask in zip(states, prev_versions, footprint):
                    if mask and state.dirty_since(ver) & mask:
                        clean = False
                        break
            if clean:
                if prev_item is not None:
                    item = prev_item
                elif prev_cap is None or (cap is not None and cap <= prev_cap):
                    item = None
                if item is not _RESCORE and prev_versions != versions:
                    memo[pair] = (profile, prev_item, footprint, versions, prev_cap)
        if item is _RESCORE:
            item, footprint = _score_pair(states, k_max, pair, profile, cap)
            memo[pair] = (profile, item, footprint, versions, cap)
        if item is not None and (best is None or item[:4] < best[:4]):
            best = item
            cap = item[0]
    return best


def _candidate_from_ids(
    nodes: NodeSet, item: tuple, r: int, directed_ids: frozenset[tuple[int, int]]
) -> Candidate:
    total, _pair, _h_key, _flag, u, v, h_ids, s_ids, cuts = item
    lab = nodes.label_of
    return Candidate(
        u=lab(u),
        v=lab(v),
        directed=(u, v) in directed_ids,
        h_set=tuple(sorted(lab(h) for h in h_ids)),
        s_set=tuple(sorted(lab(s) for s in s_ids)),
        psi=Fraction(total, r),
        per_graph_cuts=_label_cuts(nodes, cuts),
    )


def scan_candidates(
    pattern: Pdag, graphs: Sequence[Dag], k_max: int = 10
) -> list[Candidate]:
    """Score every admissible deletion of ``pattern`` against ``graphs``.

    Directed pattern edges are evaluated once, in their own orientation;
    undirected edges are evaluated both ways.  Steering sets H are drawn
    from the deletion pool, capped at ``k_max`` nodes, and must leave the
    rest of the pool a clique.  Candidates appear in canonical enumeration
    order: skeleton pair, orientation, H by size then lexicographic ids.
    """
    nodes = _shared_nodes(graphs)
    if pattern.nodes != nodes:
        raise InputError("pattern and input graphs must share one node set")
    states = [_InputState(g) for g in graphs]
    r = len(graphs)
    directed = pattern.directed_ids
    return [
        _candidate_from_ids(nodes, item, r, directed)
        for item in _iter_candidate_ids(pattern, states, k_max, [None])
    ]


def best_edge(pattern: Pdag, graphs: Sequence[Dag], k_max: int = 10) -> Candidate:
    """The minimum-criticality deletion of ``pattern``.

    Ties break by skeleton pair, then smaller and lexicographically earlier
    H, then the listed orientation before the reversed one.  Raises
    :class:`StateError` when the pattern has no edges, or none of its edges
    admits a valid steering set under ``k_max``.
    """
    nodes = _shared_nodes(graphs)
    if pattern.nodes != nodes:
        raise InputError("pattern and input graphs must share one node set")
    if pattern.skeleton_edge_count == 0:
        raise StateError("pattern has no edges to score")
    states = [_InputState(g) for g in graphs]
    item = _best_candidate_ids(pattern, states, k_max)
    if item is None:
        raise StateError("no deletable edge under k_max")
    return _candidate_from_ids(nodes, item, len(graphs), pattern.directed_ids)


def remove_cut_edges(
    graphs: Sequence[Dag],
    per_graph_cuts: Sequence[Iterable[tuple[str, str]]],
) -> tuple[Dag, ...]:
    """Drop from each graph the directed counterparts of its cut pairs.

    Cut pairs are unordered; a pair with no corresponding directed edge in
    its graph (a moral marriage) is ignored.  Removing edges never creates a
    cycle, so the results are valid DAGs over the same node set.
    """
    if len(graphs) != len(per_graph_cuts):
        raise InputError("need exactly one cut set per input graph")
    out = []
    for g, cut in zip(graphs, per_graph_cuts):
        banned = set()
        for x, y in cut:
            xi, yi = g.nodes.id_of(x), g.nodes.id_of(y)
            banned.add((xi, yi))
            banned.add((yi, xi))
        if banned & g.edge_ids:
            lab = g.nodes.label_of
            kept = [(lab(s), lab(t)) for s, t in g.edge_ids if (s, t) not in banned]
            out.append(Dag(g.nodes, kept))
        else:
            out.append(g)
    return tuple(out)


def _renormalize(pattern: Pdag) -> Pdag:
    """Back to a completed pattern: extend to a member, then relabel."""
    return dag_to_cpdag(pdag_to_dag(pattern))


def run(fusion_input: FusionInput, config: Config = Config(theta=None)) -> RunResult:
    """Fuse the inputs and prune the result edge by edge.

    With a threshold, pruning stops at the first candidate whose score
    strictly exceeds it; in trajectory mode every edge is eventually deleted
    and the full record is returned for replay.  The consensus DAG is a
    deterministic member of the final pattern's class.
    """
    fusion = fuse(fusion_input)
    nodes = fusion_input.nodes
    lab = nodes.label_of
    pattern = dag_to_cpdag(fusion.fused)
    states = [_InputState(g) for g in fusion_input.graphs]
    r = len(states)
    theta = config.theta
    steps: list[PruneStep] = []
    memo: dict = {}
    seed = None
    while pattern.skeleton_edge_count > 0:
        # the previous winner's total usually still caps the next sweep;
        # when it does not (scores can jump), sweep again without the guess
        item = _memo_best(pattern, states, config.k_max, memo, seed)
        if item is None and seed is not None:
            item = _memo_best(pattern, states, config.k_max, memo, None)
        if item is None:
            if theta is None:
                raise StateError("no deletable edge under k_max")
            break
        seed = item[0]
        total, _pair, _h_key, _flag, u, v, h_ids, s_ids, cuts = item
        if theta is not None and total * theta.denominator > theta.numerator * r:
            break
        was_directed = (u, v) in pattern.directed_ids
        choice = DeleteChoice(
            u=lab(u), v=lab(v), h_set=frozenset(lab(h) for h in h_ids)
        )
        pattern = _renormalize(apply_delete(pattern, choice))
        for state, cut_pairs in zip(states, cuts):
            state.remove_pairs(cut_pairs)
        steps.append(
            PruneStep(
                index=len(steps) + 1,
                u=lab(u),
                v=lab(v),
                directed=was_directed,
                h_set=tuple(sorted(lab(h) for h in h_ids)),
                s_set=tuple(sorted(lab(s) for s in s_ids)),
                psi_star=Fraction(total, r),
                per_graph_cuts=_label_cuts(nodes, cuts),
                skeleton_edges=pattern.skeleton_edge_count,
                treewidth_ub=treewidth_upper(pattern),
                input_edge_counts=tuple(state.edge_count for state in states),
            )
        )
    trajectory = Trajectory(
        sigma=fusion.ordering,
        g_plus=fusion.fused,
        steps=tuple(steps),
        final_state=pattern,
    )
    return RunResult(consensus=pdag_to_dag(pattern), cpdag=pattern, trajectory=trajectory)


def prefix_states(trajectory: Trajectory) -> Iterator[tuple[int, Pdag]]:
    """Yield ``(prefix length, pattern)`` for every prefix of the record,
    starting from the untouched fused pattern at prefix 0."""
    pattern = dag_to_cpdag(trajectory.g_plus)
    yield 0, pattern
    for i, step in enumerate(trajectory.steps, start=1):
        choice = DeleteChoice(u=step.u, v=step.v, h_set=frozenset(step.h_set))
        pattern = _renormalize(apply_delete(pattern, choice))
        yield i, pattern


def prefix_state(trajectory: Trajectory, prefix: int) -> Pdag:
    """The pattern after replaying the first ``prefix`` recorded steps."""
    if not 0 <= prefix <= len(trajectory.steps):
        raise InputError(
            f"prefix must lie in [0, {len(trajectory.steps)}], got {prefix}"
        )
    result = None
    for i, pattern in prefix_states(trajectory):
        result = pattern
        if i == prefix:
            break
    return result


def graph_at_theta(trajectory: Trajectory, theta: Fraction | float | int | str) -> Pdag:
    """The pattern a thresholded run would have stopped at.

    Replays recorded steps while their score stays within ``theta`` and
    stops before the first one that exceeds it.
    """
    theta = as_theta(theta)
    take = 0
    for step in trajectory.steps:
        if step.psi_star > theta:
            break
        take += 1
    return prefix_state(trajectory, take)


def select_theta(trajectory: Trajectory, graphs: Sequence[Dag]) -> ThetaSelection:
    """Scan every trajectory prefix and keep the one closest to ``graphs``.

    Distance is the exact mean moral Hamming distance from the prefix's
    member DAG to each input; ties prefer the longer prefix (the sparser
    graph).  The reported threshold is the score of the last included step,
    zero for the empty prefix.
    """
    nodes = _shared_nodes(graphs)
    if trajectory.g_plus.nodes != nodes:
        raise InputError("trajectory and input graphs must share one node set")
    best: tuple[Fraction, int, Pdag] | None = None
    for prefix, pattern in prefix_states(trajectory):
        member = pdag_to_dag(pattern)
        mean = Fraction(sum(smhd(member, g) for g in graphs), len(graphs))
        if best is None or mean <= best[0]:
            best = (mean, prefix, pattern)
    mean, prefix, pattern = best
    theta = Fraction(0) if prefix == 0 else trajectory.steps[prefix - 1].psi_star
    return ThetaSelection(theta=theta, prefix=prefix, pattern=pattern, mean_distance=mean)
