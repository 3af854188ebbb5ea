"""Line-oriented text format for graphs and orderings.

A graph file starts with a ``nodes:`` header followed by one edge per line::

    # optional comments
    nodes: a,b,c
    a -> b
    b -- c

``->`` lines are directed, ``--`` lines undirected (pattern files only).
Blank lines and ``#`` comments are ignored; writers emit a canonical sorted
form with no comments, so equal graphs serialize to identical bytes.

An ordering file lists one label per line.
"""

from __future__ import annotations

import os
from typing import Iterable

from .equivalence import Pdag
from .errors import InputError
from .graphs import Dag, NodeSet, Ordering, UGraph


def _content_lines(text: str, source: str) -> list[tuple[int, str]]:
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((lineno, line))
    if not lines:
        raise InputError(f"{source}: no content lines")
    return lines


def _parse(text: str, source: str) -> tuple[NodeSet, list[tuple[str, str]], list[tuple[str, str]]]:
    lines = _content_lines(text, source)
    lineno, header = lines[0]
    if not header.startswith("nodes:"):
        raise InputError(f"{source}:{lineno}: expected 'nodes:' header first")
    labels = [part.strip() for part in header[len("nodes:"):].split(",")]
    labels = [l for l in labels if l]
    if not labels:
        raise InputError(f"{source}:{lineno}: empty node list")
    nodes = NodeSet(labels)
    directed: list[tuple[str, str]] = []
    undirected: list[tuple[str, str]] = []
    for lineno, line in lines[1:]:
        if "->" in line:
            parts = line.split("->")
            bucket = directed
        elif "--" in line:
            parts = line.split("--")
            bucket = undirected
        else:
            raise InputError(f"{source}:{lineno}: expected 'u -> v' or 'u -- v'")
        if len(parts) != 2:
            raise InputError(f"{source}:{lineno}: malformed edge line")
        u, v = parts[0].strip(), parts[1].strip()
        if u not in nodes or v not in nodes:
            missing = u if u not in nodes else v
            raise InputError(f"{source}:{lineno}: unknown node label: {missing!r}")
        bucket.append((u, v))
    return nodes, directed, undirected


def parse_dag(text: str, source: str = "<string>") -> Dag:
    nodes, directed, undirected = _parse(text, source)
    if undirected:
        raise InputError(f"{source}: undirected '--' lines are not allowed in a DAG file")
    return Dag(nodes, directed)


def parse_pdag(text: str, source: str = "<string>") -> Pdag:
    nodes, directed, undirected = _parse(text, source)
    return Pdag(nodes, directed, undirected)


def read_dag(path: str | os.PathLike) -> Dag:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_dag(fh.read(), source=str(path))


def read_pdag(path: str | os.PathLike) -> Pdag:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_pdag(fh.read(), source=str(path))


def format_graph(g: Dag | Pdag | UGraph) -> str:
    """Canonical text form: header, then sorted directed lines, then sorted
    undirected lines."""
    lines = ["nodes: " + ",".join(g.nodes.labels)]
    if isinstance(g, Dag):
        lines.extend(f"{u} -> {v}" for u, v in g.edges)
    elif isinstance(g, Pdag):
        lines.extend(f"{u} -> {v}" for u, v in g.directed_edges)
        lines.extend(f"{a} -- {b}" for a, b in g.undirected_edges)
    else:
        lines.extend(f"{a} -- {b}" for a, b in g.edges)
    return "\n".join(lines) + "\n"


def write_graph(g: Dag | Pdag | UGraph, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_graph(g))


def parse_ordering(text: str, nodes: NodeSet, source: str = "<string>") -> Ordering:
    labels = [line for _, line in _content_lines(text, source)]
    return Ordering(nodes, labels)


def read_ordering(path: str | os.PathLike, nodes: NodeSet) -> Ordering:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_ordering(fh.read(), nodes, source=str(path))


def format_ordering(ordering: Ordering) -> str:
    return "\n".join(ordering.labels) + "\n"


def write_ordering(ordering: Ordering, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_ordering(ordering))


def read_dags(paths: Iterable[str | os.PathLike]) -> list[Dag]:
    """Read several DAG files that must share one node set."""
    paths = list(paths)
    graphs = [read_dag(p) for p in paths]
    if not graphs:
        raise InputError("no input graph files given")
    nodes = graphs[0].nodes
    for path, g in zip(paths, graphs):
        if g.nodes != nodes:
            raise InputError(f"{path}: node set differs from the first input")
    return graphs


def read_pdags(paths: Iterable[str | os.PathLike]) -> list[Pdag]:
    """Read several pattern files that must share one node set."""
    paths = list(paths)
    graphs = [read_pdag(p) for p in paths]
    if not graphs:
        raise InputError("no input graph files given")
    nodes = graphs[0].nodes
    for path, g in zip(paths, graphs):
        if g.nodes != nodes:
            raise InputError(f"{path}: node set differs from the first input")
    return graphs
