"""Equivalence-class machinery: CPDAGs, consistent extensions, Delete."""

from __future__ import annotations

import random

import pytest

from dagconsensus import (
    Dag,
    DeleteChoice,
    InputError,
    NodeSet,
    OperatorError,
    Pdag,
    StructuralError,
    apply_delete,
    dag_to_cpdag,
    na_set,
    pdag_to_dag,
)
from conftest import random_dag_plain, to_dag

import oracles


def worked_pattern() -> Pdag:
    ns = NodeSet(["w", "x", "y", "z"])
    return Pdag(ns, [], [("w", "x"), ("w", "y"), ("x", "z"), ("x", "y")])


def skeleton_of(g: Dag) -> set[tuple[str, str]]:
    return {tuple(sorted(e)) for e in g.edges}


def test_pdag_rejects_conflicting_and_degenerate_pairs():
    ns = NodeSet(["a", "b"])
    with pytest.raises(InputError):
        Pdag(ns, [("a", "b")], [("a", "b")])
    with pytest.raises(InputError):
        Pdag(ns, [("a", "b"), ("b", "a")], [])
    with pytest.raises(InputError):
        Pdag(ns, [("a", "a")], [])
    with pytest.raises(InputError):
        Pdag(ns, [], [("b", "b")])


def test_dag_to_cpdag_goldens(worked):
    nodes, _, _ = worked
    after_first_delete = Dag(
        nodes, [("w", "x"), ("w", "y"), ("x", "z"), ("y", "x")]
    )
    p = dag_to_cpdag(after_first_delete)
    assert p.directed_edges == ()
    assert p.undirected_edges == (("w", "x"), ("w", "y"), ("x", "y"), ("x", "z"))

    ns2 = NodeSet(["a", "b"])
    p2 = dag_to_cpdag(Dag(ns2, [("a", "b")]))
    assert p2.directed_edges == () and p2.undirected_edges == (("a", "b"),)

    ns3 = NodeSet(["a", "b", "c"])
    p3 = dag_to_cpdag(Dag(ns3, [("a", "c"), ("b", "c")]))
    assert p3.undirected_edges == ()
    assert p3.directed_edges == (("a", "c"), ("b", "c"))


def test_dag_to_cpdag_matches_class_enumeration():
    rng = random.Random(13)
    for _ in range(40):
        plain = random_dag_plain(rng, rng.randint(2, 6))
        directed, undirected = oracles.cpdag_bruteforce(*plain)
        p = dag_to_cpdag(to_dag(plain))
        assert set(p.directed_edges) == directed
        assert set(p.undirected_edges) == undirected


def test_dag_to_cpdag_preserves_skeleton_and_v_structures():
    rng = random.Random(17)
    for _ in range(60):
        plain = random_dag_plain(rng, rng.randint(2, 8))
        g = to_dag(plain)
        p = dag_to_cpdag(g)
        assert set(p.skeleton_edges) == skeleton_of(g)
        member = pdag_to_dag(p)
        assert oracles.v_structures(*plain) == oracles.v_structures(
            plain[0], frozenset(member.edges)
        )


def test_covered_edge_reversal_keeps_the_pattern():
    rng = random.Random(59)
    found = 0
    while found < 25:
        plain = random_dag_plain(rng, rng.randint(3, 7))
        labels, dedges = plain
        g = to_dag(plain)
        covered = [
            (u, v)
            for u, v in dedges
            if set(g.parents(v)) - {u} == set(g.parents(u))
        ]
        if not covered:
            continue
        u, v = rng.choice(covered)
        flipped = to_dag((labels, dedges - {(u, v)} | {(v, u)}))
        assert dag_to_cpdag(g) == dag_to_cpdag(flipped)
        found += 1


def test_round_trip_on_cpdags():
    rng = random.Random(61)
    for _ in range(60):
        p = dag_to_cpdag(to_dag(random_dag_plain(rng, rng.randint(2, 8))))
        assert dag_to_cpdag(pdag_to_dag(p)) == p


def test_pdag_to_dag_returns_a_class_member(worked):
    p = worked_pattern()
    member = pdag_to_dag(p)
    assert skeleton_of(member) == set(p.skeleton_edges)
    # no collider may appear on this skeleton: every orientation with one
    # would leave the class
    assert oracles.v_structures(
        member.nodes.labels, frozenset(member.edges)
    ) == frozenset()
    assert dag_to_cpdag(member) == p


def test_pdag_to_dag_identity_on_fully_directed(worked):
    _, (g1, _, _), _ = worked
    p = Pdag(g1.nodes, g1.edges, [])
    assert pdag_to_dag(p) == g1


def test_pdag_to_dag_preserves_directed_edges():
    rng = random.Random(67)
    for _ in range(40):
        p = dag_to_cpdag(to_dag(random_dag_plain(rng, rng.randint(2, 7))))
        member = pdag_to_dag(p)
        for u, v in p.directed_edges:
            assert member.has_edge(u, v)


def test_pdag_to_dag_rejects_chordless_square():
    ns = NodeSet(["a", "b", "c", "d"])
    square = Pdag(ns, [], [("a", "b"), ("b", "c"), ("c", "d"), ("a", "d")])
    with pytest.raises(StructuralError):
        pdag_to_dag(square)


def test_na_set_goldens(worked):
    nodes, _, _ = worked
    fused = Dag(
        nodes, [("w", "x"), ("w", "y"), ("x", "z"), ("y", "x"), ("y", "z")]
    )
    all_directed = Pdag(nodes, fused.edges, [])
    assert na_set(all_directed, "z", "y") == ()

    assert na_set(worked_pattern(), "x", "w") == ("y",)

    ns = NodeSet(["a", "b", "c"])
    lone = Pdag(ns, [], [("a", "b")])
    assert na_set(lone, "b", "a") == ()
    with pytest.raises(InputError):
        na_set(lone, "c", "a")


def test_na_set_needs_undirected_link_to_v():
    # w -> v is directed, so w cannot be steered away from v
    ns = NodeSet(["u", "v", "w"])
    p = Pdag(ns, [("w", "v"), ("u", "v")], [("w", "u")])
    assert na_set(p, "v", "u") == ()


def test_na_set_accepts_directed_adjacency_to_u():
    # w - v undirected qualifies even though u reaches w by a directed edge
    ns = NodeSet(["u", "v", "w"])
    p = Pdag(ns, [("u", "w")], [("w", "v"), ("u", "v")])
    assert na_set(p, "v", "u") == ("w",)


def test_apply_delete_guards_directed_edge_fan():
    # dropping x -> y may not leave y's unsteered neighborhood a non-clique
    ns = NodeSet(["a", "b", "x", "y"])
    p = Pdag(
        ns, [("x", "y"), ("x", "a"), ("x", "b")], [("y", "a"), ("y", "b")]
    )
    assert na_set(p, "y", "x") == ("a", "b")
    with pytest.raises(OperatorError):
        apply_delete(p, DeleteChoice("x", "y", frozenset()))
    out = apply_delete(p, DeleteChoice("x", "y", frozenset({"a"})))
    assert ("y", "a") in out.directed_edges
    assert dag_to_cpdag(pdag_to_dag(out)) is not None


def test_apply_delete_worked_step(worked):
    nodes, _, _ = worked
    fused = Dag(
        nodes, [("w", "x"), ("w", "y"), ("x", "z"), ("y", "x"), ("y", "z")]
    )
    p = Pdag(nodes, fused.edges, [])
    out = apply_delete(p, DeleteChoice("y", "z", frozenset()))
    assert set(out.directed_edges) == {
        ("w", "x"),
        ("w", "y"),
        ("x", "z"),
        ("y", "x"),
    }
    assert dag_to_cpdag(pdag_to_dag(out)) == worked_pattern()


def test_apply_delete_last_edge():
    ns = NodeSet(["a", "b"])
    p = Pdag(ns, [], [("a", "b")])
    out = apply_delete(p, DeleteChoice("a", "b", frozenset()))
    assert out.skeleton_edge_count == 0


def test_apply_delete_orients_h_members():
    ns = NodeSet(["a", "b", "h"])
    p = Pdag(ns, [], [("a", "b"), ("a", "h"), ("b", "h")])
    out = apply_delete(p, DeleteChoice("a", "b", frozenset({"h"})))
    assert not out.adjacent("a", "b")
    assert out.has_directed("a", "h")
    assert out.has_directed("b", "h")


def test_apply_delete_errors():
    ns = NodeSet(["a", "b", "c", "d"])
    p = Pdag(ns, [], [("a", "b")])
    with pytest.raises(InputError):
        apply_delete(p, DeleteChoice("a", "c", frozenset()))
    with pytest.raises(OperatorError):
        apply_delete(p, DeleteChoice("a", "b", frozenset({"a"})))
    # pool {c, d} is not a clique, so H = {} fails the validity condition
    diamond = Pdag(
        ns, [], [("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")]
    )
    with pytest.raises(OperatorError):
        apply_delete(diamond, DeleteChoice("a", "b", frozenset()))
    # conditioning both pool members away restores validity
    out = apply_delete(diamond, DeleteChoice("a", "b", frozenset({"c", "d"})))
    assert not out.adjacent("a", "b")


def test_apply_delete_removes_exactly_one_skeleton_edge():
    rng = random.Random(71)
    checked = 0
    while checked < 30:
        p = dag_to_cpdag(to_dag(random_dag_plain(rng, rng.randint(2, 7))))
        pairs = list(p.skeleton_edges)
        if not pairs:
            continue
        a, b = rng.choice(pairs)
        u, v = (a, b) if p.has_directed(a, b) or not p.has_directed(b, a) else (b, a)
        # conditioning on the whole pool always satisfies the clique condition
        pool = frozenset(na_set(p, v, u))
        out = apply_delete(p, DeleteChoice(u, v, pool))
        assert out.skeleton_edge_count == p.skeleton_edge_count - 1
        checked += 1


def test_delete_choice_coerces_h_set():
    c = DeleteChoice("a", "b", {"h"})
    assert isinstance(c.h_set, frozenset)
