"""Shared fixtures and generators for the test suite.

Random test graphs come from the stdlib ``random`` module on purpose: the
package's own generator uses a different engine, so the two cannot agree by
construction.
"""

from __future__ import annotations

import random

import pytest

from dagconsensus import Dag, NodeSet, Ordering


@pytest.fixture
def worked():
    """The three-input example used throughout the golden tests."""
    nodes = NodeSet(["w", "x", "y", "z"])
    g1 = Dag(nodes, [("w", "x"), ("x", "y"), ("y", "z")])
    g2 = Dag(nodes, [("w", "x"), ("w", "y"), ("x", "z")])
    g3 = Dag(nodes, [("w", "x"), ("y", "x"), ("x", "z")])
    sigma = Ordering(nodes, ["w", "y", "x", "z"])
    return nodes, (g1, g2, g3), sigma


def letters(n: int) -> list[str]:
    assert n <= 26
    return [chr(ord("a") + i) for i in range(n)]


def random_dag_plain(rng: random.Random, n: int, p: float = 0.4):
    """A random DAG as (labels, directed edge frozenset)."""
    labels = letters(n)
    order = labels[:]
    rng.shuffle(order)
    edges = set()
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                edges.add((order[i], order[j]))
    return tuple(labels), frozenset(edges)


def random_ugraph_plain(rng: random.Random, n: int, p: float = 0.4):
    labels = letters(n)
    edges = set()
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                edges.add((labels[i], labels[j]))
    return tuple(labels), frozenset(edges)


def to_dag(plain) -> Dag:
    labels, edges = plain
    return Dag(NodeSet(labels), sorted(edges))


def as_plain(g: Dag):
    return tuple(g.nodes.labels), frozenset(g.edges)
