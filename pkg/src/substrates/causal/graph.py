"""Trivalent undirected multigraphs with per-edge event provenance.

Every vertex keeps degree exactly 3, with multi-edges and self-loops counted
with multiplicity (a loop contributes 2).  Each edge carries the id of the
rewrite event that created it; 0 marks initial edges.
"""
from __future__ import annotations

import json
from collections import deque


class SpaceGraph:
    """Mutable trivalent multigraph.  Vertices and edges have stable int ids."""

    def __init__(self) -> None:
        self.vertices: set[int] = set()
        self.edges: dict[int, tuple[int, int]] = {}
        self.provenance: dict[int, int] = {}
        self._next_vertex = 0
        self._next_edge = 1

    # -- construction ------------------------------------------------------

    def add_vertex(self) -> int:
        v = self._next_vertex
        self._next_vertex += 1
        self.vertices.add(v)
        return v

    def add_edge(self, u: int, v: int, provenance: int = 0) -> int:
        if u not in self.vertices or v not in self.vertices:
            raise ValueError(f"edge endpoints {u}, {v} must be existing vertices")
        e = self._next_edge
        self._next_edge += 1
        self.edges[e] = (u, v)
        self.provenance[e] = provenance
        return e

    def remove_edge(self, e: int) -> None:
        del self.edges[e]
        del self.provenance[e]

    def remove_vertex(self, v: int) -> None:
        if any(v in ends for ends in self.edges.values()):
            raise ValueError(f"vertex {v} still has incident edges")
        self.vertices.remove(v)

    def reattach(self, e: int, end: int, new_vertex: int) -> None:
        """Move one endpoint of an existing edge; provenance is unchanged."""
        u, v = self.edges[e]
        if new_vertex not in self.vertices:
            raise ValueError(f"vertex {new_vertex} does not exist")
        self.edges[e] = (new_vertex, v) if end == 0 else (u, new_vertex)

    def copy(self) -> SpaceGraph:
        g = SpaceGraph()
        g.vertices = set(self.vertices)
        g.edges = dict(self.edges)
        g.provenance = dict(self.provenance)
        g._next_vertex = self._next_vertex
        g._next_edge = self._next_edge
        return g

    # -- queries -------------------------------------------------------------

    def degree(self, v: int) -> int:
        return sum((u == v) + (w == v) for u, w in self.edges.values())

    def incident_ends(self, v: int) -> list[tuple[int, int]]:
        """(edge id, end index) pairs at v, loops contributing both ends."""
        ends = []
        for e, (u, w) in self.edges.items():
            if u == v:
                ends.append((e, 0))
            if w == v:
                ends.append((e, 1))
        return sorted(ends)

    def multiplicity(self, u: int, v: int) -> int:
        """Number of parallel edges between u and v (loop count when u == v)."""
        if u == v:
            return sum(1 for a, b in self.edges.values() if a == v and b == v)
        return sum(1 for a, b in self.edges.values() if {a, b} == {u, v})

    def neighbors(self, v: int) -> set[int]:
        out = set()
        for a, b in self.edges.values():
            if a == v:
                out.add(b)
            if b == v:
                out.add(a)
        return out

    def is_trivalent(self) -> bool:
        return all(self.degree(v) == 3 for v in self.vertices)

    def check_trivalent(self) -> None:
        for v in self.vertices:
            d = self.degree(v)
            if d != 3:
                raise ValueError(f"vertex {v} has degree {d}, expected 3")

    def bfs_distances(self, source: int) -> dict[int, int]:
        dist = {source: 0}
        queue = deque([source])
        while queue:
            v = queue.popleft()
            for w in self.neighbors(v):
                if w not in dist:
                    dist[w] = dist[v] + 1
                    queue.append(w)
        return dist

    # -- serialization ----------------------------------------------------------

    def to_json(self) -> str:
        return json.dumps(
            {
                "vertices": sorted(self.vertices),
                "edges": [list(self.edges[e]) for e in sorted(self.edges)],
            },
            indent=2,
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> SpaceGraph:
        data = json.loads(text)
        g = cls()
        ids = {}
        for v in data["vertices"]:
            ids[v] = g.add_vertex()
        for u, v in data["edges"]:
            g.add_edge(ids[u], ids[v])
        g.check_trivalent()
        return g


def from_edge_list(n_vertices: int, edges: list[tuple[int, int]]) -> SpaceGraph:
    g = SpaceGraph()
    ids = [g.add_vertex() for _ in range(n_vertices)]
    for u, v in edges:
        g.add_edge(ids[u], ids[v])
    g.check_trivalent()
    return g


# -- stock trivalent graphs ---------------------------------------------------

def k4() -> SpaceGraph:
    return from_edge_list(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])


def theta_graph() -> SpaceGraph:
    """Two vertices joined by three parallel edges."""
    return from_edge_list(2, [(0, 1), (0, 1), (0, 1)])


def dumbbell() -> SpaceGraph:
    """Two loop-carrying vertices joined by an edge."""
    return from_edge_list(2, [(0, 0), (0, 1), (1, 1)])


def prism_ladder(length: int) -> SpaceGraph:
    """Circular ladder: two rims of `length` vertices plus rungs.

    Ball sizes grow linearly in the radius, so its estimated dimension is 1.
    """
    if length < 3:
        raise ValueError("ladder length must be at least 3")
    edges = []
    for i in range(length):
        j = (i + 1) % length
        edges.append((i, j))
        edges.append((length + i, length + j))
        edges.append((i, length + i))
    return from_edge_list(2 * length, edges)


def hex_torus(rows: int, cols: int) -> SpaceGraph:
    """Honeycomb lattice on a torus in brick-wall coordinates.

    Vertices (i, j) on a 2*rows x cols grid; every vertex has its two row
    neighbors plus one vertical edge on alternating parity, giving degree 3
    and quadratic ball growth (dimension 2).
    """
    if rows < 2 or cols < 4 or cols % 2:
        raise ValueError("need rows >= 2 and even cols >= 4")
    height = 2 * rows
    idx = lambda i, j: i * cols + j
    edges = []
    for i in range(height):
        for j in range(cols):
            edges.append((idx(i, j), idx(i, (j + 1) % cols)))
            if (i + j) % 2 == 0:
                edges.append((idx(i, j), idx((i + 1) % height, j)))
    return from_edge_list(height * cols, edges)
