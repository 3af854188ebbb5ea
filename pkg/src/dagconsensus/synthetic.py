"""Seeded generation of ground-truth DAGs and noisy variants."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .graphs import Dag, NodeSet


@dataclass(frozen=True)
class GenConstraints:
    """Structural limits for generation and perturbation.

    ``max_edges`` and ``perturbations`` default to 2.5 and 0.75 times the
    node count (rounded down) when left unset.
    """

    max_parents: int = 3
    max_children: int = 4
    max_edges: int | None = None
    perturbations: int | None = None

    def __post_init__(self) -> None:
        if self.max_parents < 1 or self.max_children < 1:
            raise InputError("degree limits must be positive")
        if self.max_edges is not None and self.max_edges < 1:
            raise InputError("max_edges must be positive when given")
        if self.perturbations is not None and self.perturbations < 0:
            raise InputError("perturbations must not be negative")

    def edge_cap(self, n: int) -> int:
        return self.max_edges if self.max_edges is not None else int(2.5 * n)

    def perturbation_count(self, n: int) -> int:
        return self.perturbations if self.perturbations is not None else int(0.75 * n)


def node_labels(n: int) -> list[str]:
    """Canonical labels v1..vn used by all generated graphs."""
    return [f"v{i}" for i in range(1, n + 1)]


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def random_dag(n: int, constraints: GenConstraints = GenConstraints(), seed: int = 0) -> Dag:
    """A random DAG over ``v1..vn`` honoring the degree and size limits.

    A random node permutation fixes the edge directions; ordered pairs along
    it are then sampled uniformly, skipping any that would repeat an edge or
    exceed a degree limit, until the edge budget or the attempt budget runs
    out.  Fully deterministic in ``seed``.
    """
    if n < 2:
        raise InputError("need at least two nodes")
    labels = node_labels(n)
    rng = _rng(seed)
    order = [int(x) for x in rng.permutation(n)]
    cap = min(constraints.edge_cap(n), n * (n - 1) // 2)
    edges: set[tuple[int, int]] = set()
    in_deg = [0] * n
    out_deg = [0] * n
    attempts = 0
    budget = 20 * n * n
    while len(edges) < cap and attempts < budget:
        attempts += 1
        i, j = (int(x) for x in rng.integers(0, n, size=2))
        if i == j:
            continue
        if i > j:
            i, j = j, i
        u, v = order[i], order[j]
        if (u, v) in edges:
            continue
        if in_deg[v] >= constraints.max_parents or out_deg[u] >= constraints.max_children:
            continue
        edges.add((u, v))
        in_deg[v] += 1
        out_deg[u] += 1
    nodes = NodeSet(labels)
    return Dag(nodes, [(labels[u], labels[v]) for u, v in edges])


def perturb(g: Dag, constraints: GenConstraints = GenConstraints(), seed: int = 0) -> Dag:
    """A noisy copy of ``g``: a fixed number of single-edge edits.

    Each operation is an addition or a deletion with equal probability.
    Additions respect acyclicity, the degree limits and the edge budget,
    retried up to n*n times before falling back to a deletion; deletions
    pick uniformly among current edges and become no-ops only when none
    remain.  The edit distance to ``g`` is therefore at most the operation
    count.  Fully deterministic in ``seed``.
    """
    n = len(g.nodes)
    rng = _rng(seed)
    edges = set(g.edge_ids)
    in_deg = [len(g.parent_ids(i)) for i in range(n)]
    out_deg = [len(g.child_ids(i)) for i in range(n)]
    cap = min(constraints.edge_cap(n), n * (n - 1) // 2)
    ops = constraints.perturbation_count(n)

    def reaches(src: int, dst: int) -> bool:
        # is there a directed path src -> ... -> dst?
        stack = [src]
        seen = {src}
        children: dict[int, list[int]] = {}
        for (a, b) in edges:
            children.setdefault(a, []).append(b)
        while stack:
            node = stack.pop()
            if node == dst:
                return True
            for child in children.get(node, ()):
                if child not in seen:
                    seen.add(child)
                    stack.append(child)
        return False

    for _ in range(ops):
        add = bool(rng.integers(0, 2))
        if add and len(edges) < cap:
            placed = False
            for _ in range(n * n):
                u, v = (int(x) for x in rng.integers(0, n, size=2))
                if u == v or (u, v) in edges or (v, u) in edges:
                    continue
                if in_deg[v] >= constraints.max_parents or out_deg[u] >= constraints.max_children:
                    continue
                if reaches(v, u):
                    continue
                edges.add((u, v))
                in_deg[v] += 1
                out_deg[u] += 1
                placed = True
                break
            if placed:
                continue
            add = False
        if edges:
            pool = sorted(edges)
            u, v = pool[int(rng.integers(0, len(pool)))]
            edges.discard((u, v))
            in_deg[v] -= 1
            out_deg[u] -= 1

    lab = g.nodes.label_of
    return Dag(g.nodes, [(lab(u), lab(v)) for u, v in edges])
