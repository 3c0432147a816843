"""Update rules over trivalent graphs: matching, splicing, overlap analysis.

A rule side is a small multigraph plus numbered boundary half-edges; every
vertex accounts for exactly 3 edge-ends (internal ends plus half-edges), so
patterns embed into trivalent hosts with all ends explained.  Matches are
induced: host edges among matched vertices must reproduce the pattern's
edge multiset exactly, and each boundary half-edge claims one host edge-end
leaving the matched set.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property

from .graph import SpaceGraph


class PatternTooLargeError(Exception):
    """Pattern exceeds the configured matching size limit."""


class StaleSiteError(Exception):
    """A previously found match site no longer embeds in the host."""


@dataclass(frozen=True)
class RuleGraph:
    """One side of a rule: vertices 0..n-1, internal edges, boundary half-edges.

    boundary[i] is the vertex carrying half-edge number i.
    """

    n_vertices: int
    edges: tuple[tuple[int, int], ...]
    boundary: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.n_vertices < 0:
            raise ValueError("vertex count must be nonnegative")
        norm = tuple(tuple(sorted(e)) for e in self.edges)
        object.__setattr__(self, "edges", norm)
        for u, v in norm:
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
                raise ValueError(f"edge ({u}, {v}) out of range")
        for v in self.boundary:
            if not 0 <= v < self.n_vertices:
                raise ValueError(f"boundary vertex {v} out of range")
        for v in range(self.n_vertices):
            ends = self.internal_ends(v) + self.half_edge_count(v)
            if ends != 3:
                raise ValueError(
                    f"vertex {v} accounts for {ends} edge-ends, expected 3"
                )

    def internal_ends(self, v: int) -> int:
        return sum((u == v) + (w == v) for u, w in self.edges)

    def half_edge_count(self, v: int) -> int:
        return sum(1 for b in self.boundary if b == v)

    def multiplicity(self, u: int, v: int) -> int:
        if u == v:
            return sum(1 for a, b in self.edges if a == v and b == v)
        return sum(1 for a, b in self.edges if {a, b} == {u, v})

    def is_connected(self) -> bool:
        if self.n_vertices <= 1:
            return True
        seen = {0}
        frontier = [0]
        while frontier:
            v = frontier.pop()
            for a, b in self.edges:
                for x, y in ((a, b), (b, a)):
                    if x == v and y not in seen:
                        seen.add(y)
                        frontier.append(y)
        return len(seen) == self.n_vertices

    def vertex_automorphisms(self) -> list[tuple[int, ...]]:
        """All vertex permutations preserving edge multiplicities and
        half-edge counts."""
        autos = []
        counts = [self.half_edge_count(v) for v in range(self.n_vertices)]
        for perm in itertools.permutations(range(self.n_vertices)):
            if any(counts[v] != counts[perm[v]] for v in range(self.n_vertices)):
                continue
            if all(
                self.multiplicity(perm[u], perm[v]) == self.multiplicity(u, v)
                for u in range(self.n_vertices)
                for v in range(u, self.n_vertices)
            ):
                autos.append(perm)
        return autos

    def half_edge_permutations(self, vertex_perm: tuple[int, ...]) -> list[tuple[int, ...]]:
        """Half-edge bijections consistent with a vertex permutation."""
        slots: list[list[int]] = []
        for i, v in enumerate(self.boundary):
            target = vertex_perm[v]
            slots.append([j for j, w in enumerate(self.boundary) if w == target])
        perms = []
        for choice in itertools.product(*slots) if self.boundary else [()]:
            if len(set(choice)) == len(choice):
                perms.append(tuple(choice))
        return perms


@dataclass(frozen=True)
class UpdateRule:
    """Pattern-to-replacement rewrite with corresponding boundary half-edges."""

    name: str
    pattern: RuleGraph
    replacement: RuleGraph

    def __post_init__(self) -> None:
        if len(self.pattern.boundary) != len(self.replacement.boundary):
            raise ValueError(
                "pattern and replacement must expose the same number of half-edges"
            )
        if self.pattern.n_vertices < 1:
            raise ValueError("pattern needs at least one vertex")
        if not self.pattern.is_connected():
            raise ValueError("pattern must be connected")
        self._check_symmetry()

    def _check_symmetry(self) -> None:
        """The replacement must support every boundary symmetry of the pattern.

        For each pattern automorphism, its induced permutation of the numbered
        half-edges must also be realized by some replacement automorphism;
        otherwise a rewrite at a symmetric site would be ambiguous.
        """
        pattern_sigmas = set()
        for perm in self.pattern.vertex_automorphisms():
            pattern_sigmas.update(self.pattern.half_edge_permutations(perm))
        replacement_sigmas = set()
        for perm in self.replacement.vertex_automorphisms():
            replacement_sigmas.update(self.replacement.half_edge_permutations(perm))
        missing = pattern_sigmas - replacement_sigmas
        if missing:
            raise ValueError(
                f"rule {self.name!r} breaks pattern symmetry: half-edge "
                f"permutation {sorted(missing)[0]} has no replacement counterpart"
            )

    @cached_property
    def pattern_automorphisms(self) -> list[tuple[int, ...]]:
        return self.pattern.vertex_automorphisms()


@dataclass(frozen=True)
class MatchSite:
    """An embedding: host vertex per pattern vertex and, per half-edge, the
    (host edge id, end index) it claims at its matched vertex."""

    vertices: tuple[int, ...]
    anchors: tuple[tuple[int, int], ...]


def find_matches(
    g: SpaceGraph, rule: UpdateRule, *, max_pattern_vertices: int = 8
) -> list[MatchSite]:
    """All induced embeddings of the rule's pattern, deduplicated up to
    pattern automorphism, sorted by matched vertex tuple."""
    pattern = rule.pattern
    if pattern.n_vertices > max_pattern_vertices:
        raise PatternTooLargeError(
            f"pattern has {pattern.n_vertices} vertices, limit {max_pattern_vertices}"
        )
    order = _search_order(pattern)
    host_vertices = sorted(g.vertices)
    raw: list[tuple[int, ...]] = []

    def backtrack(pos: int, image: dict[int, int]) -> None:
        if pos == len(order):
            raw.append(tuple(image[p] for p in range(pattern.n_vertices)))
            return
        p = order[pos]
        anchored = [q for q in order[:pos] if pattern.multiplicity(p, q) > 0]
        if anchored:
            candidates = sorted(g.neighbors(image[anchored[0]]))
        else:
            candidates = host_vertices
        used = set(image.values())
        for h in candidates:
            if h in used:
                continue
            if g.multiplicity(h, h) != pattern.multiplicity(p, p):
                continue
            if any(
                g.multiplicity(h, image[q]) != pattern.multiplicity(p, q)
                for q in order[:pos]
            ):
                continue
            image[p] = h
            backtrack(pos + 1, image)
            del image[p]

    backtrack(0, {})
    canonical: dict[tuple[int, ...], tuple[int, ...]] = {}
    for tup in raw:
        rep = min(
            tuple(tup[perm[i]] for i in range(len(tup)))
            for perm in rule.pattern_automorphisms
        )
        canonical[rep] = rep
    sites = []
    for tup in sorted(canonical):
        sites.append(MatchSite(tup, _anchor_half_edges(g, pattern, tup)))
    return sites


def _search_order(pattern: RuleGraph) -> list[int]:
    """BFS order from vertex 0 so each placed vertex anchors to a neighbor."""
    order = [0]
    seen = {0}
    i = 0
    while i < len(order):
        v = order[i]
        for u in range(pattern.n_vertices):
            if u not in seen and pattern.multiplicity(v, u) > 0:
                seen.add(u)
                order.append(u)
        i += 1
    for u in range(pattern.n_vertices):
        if u not in seen:
            order.append(u)  # unreachable only for disconnected patterns
    return order


def _anchor_half_edges(
    g: SpaceGraph, pattern: RuleGraph, image: tuple[int, ...]
) -> tuple[tuple[int, int], ...]:
    """Assign each numbered half-edge a host edge-end leaving the matched set.

    Ends at one vertex are taken in (edge id, end) order; co-attached
    half-edges are interchangeable by the rule symmetry check, so the sorted
    assignment is well-defined.
    """
    matched = set(image)
    anchors: list[tuple[int, int] | None] = [None] * len(pattern.boundary)
    for p, h in enumerate(image):
        outgoing = [
            (e, end)
            for e, end in g.incident_ends(h)
            if g.edges[e][1 - end] not in matched
        ]
        slots = [i for i, b in enumerate(pattern.boundary) if b == p]
        if len(outgoing) != len(slots):
            raise StaleSiteError(
                f"vertex {h} offers {len(outgoing)} outgoing ends for "
                f"{len(slots)} half-edges"
            )
        for slot, end in zip(slots, outgoing):
            anchors[slot] = end
    return tuple(a for a in anchors if a is not None)


def _site_is_current(g: SpaceGraph, rule: UpdateRule, site: MatchSite) -> bool:
    pattern = rule.pattern
    image = site.vertices
    if len(set(image)) != len(image) or any(v not in g.vertices for v in image):
        return False
    for p in range(pattern.n_vertices):
        for q in range(p, pattern.n_vertices):
            if g.multiplicity(image[p], image[q]) != pattern.multiplicity(p, q):
                return False
    try:
        return _anchor_half_edges(g, pattern, image) == site.anchors
    except StaleSiteError:
        return False


def site_edges(g: SpaceGraph, site: MatchSite) -> set[int]:
    """All host edges incident to the matched vertices (internal + boundary)."""
    matched = set(site.vertices)
    return {e for e, (u, v) in g.edges.items() if u in matched or v in matched}


def apply_rule(
    g: SpaceGraph, rule: UpdateRule, site: MatchSite, event_id: int = 0
) -> SpaceGraph:
    """Splice the replacement over a match site, returning a new graph.

    Pattern-internal host edges and matched vertices are removed, replacement
    internals are created with the event's provenance, and each boundary host
    edge is re-anchored to its corresponding replacement vertex (keeping the
    provenance it already had).
    """
    out = g.copy()
    apply_rule_in_place(out, rule, site, event_id)
    return out


def apply_rule_in_place(
    g: SpaceGraph, rule: UpdateRule, site: MatchSite, event_id: int
) -> None:
    if not _site_is_current(g, rule, site):
        raise StaleSiteError(f"site {site.vertices} is no longer a match")
    matched = set(site.vertices)
    internal = [
        e for e, (u, v) in g.edges.items() if u in matched and v in matched
    ]
    for e in internal:
        g.remove_edge(e)
    new_vertices = [g.add_vertex() for _ in range(rule.replacement.n_vertices)]
    for u, v in rule.replacement.edges:
        g.add_edge(new_vertices[u], new_vertices[v], provenance=event_id)
    for half_edge, (e, end) in enumerate(site.anchors):
        g.reattach(e, end, new_vertices[rule.replacement.boundary[half_edge]])
    for v in matched:
        g.remove_vertex(v)
    g.check_trivalent()


# -- overlap freedom -----------------------------------------------------------

@dataclass(frozen=True)
class OverlapWitness:
    rule_a: str
    rule_b: str
    glued: tuple[tuple[int, int], ...]  # (pattern-a vertex, pattern-b vertex)
    amalgam_vertices: int
    amalgam_edges: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class OverlapReport:
    overlap_free: bool
    witness: OverlapWitness | None = None


def check_overlap_freedom(rules: list[UpdateRule]) -> OverlapReport:
    """Decide whether two replaceable-subgraph instances can ever share a vertex.

    Every pair of patterns is amalgamated over every nonempty partial vertex
    identification; an identification is feasible when shared vertices agree
    on internal edge multiplicities (matches are induced) and each glued
    vertex's combined edge-ends fit within degree 3.  Identifications that
    just rename one instance of a pattern onto itself (full automorphisms)
    are the same site, not an overlap.  Any feasible amalgam extends to a
    trivalent host, so feasibility is equivalent to overlap somewhere.
    """
    for ia, rule_a in enumerate(rules):
        for ib in range(ia, len(rules)):
            rule_b = rules[ib]
            witness = _amalgamation_witness(
                rule_a.pattern, rule_b.pattern, same_rule=(ia == ib)
            )
            if witness is not None:
                glued, n_vertices, edges = witness
                return OverlapReport(
                    False,
                    OverlapWitness(rule_a.name, rule_b.name, glued, n_vertices, edges),
                )
    return OverlapReport(True)


def _amalgamation_witness(
    p: RuleGraph, q: RuleGraph, same_rule: bool
) -> tuple[tuple[tuple[int, int], ...], int, tuple[tuple[int, int], ...]] | None:
    autos = set(p.vertex_automorphisms()) if same_rule else set()
    p_vertices = range(p.n_vertices)
    q_vertices = range(q.n_vertices)
    for size in range(1, min(p.n_vertices, q.n_vertices) + 1):
        for dom in itertools.combinations(p_vertices, size):
            for img in itertools.permutations(q_vertices, size):
                phi = dict(zip(dom, img))
                if same_rule and size == p.n_vertices == q.n_vertices:
                    full = tuple(phi[v] for v in range(p.n_vertices))
                    if full in autos:
                        continue
                if not _feasible(p, q, phi):
                    continue
                return _build_amalgam(p, q, phi)
    return None


def _feasible(p: RuleGraph, q: RuleGraph, phi: dict[int, int]) -> bool:
    dom = list(phi)
    # induced matches force shared pairs to agree exactly
    for i, u in enumerate(dom):
        for v in dom[i:]:
            if p.multiplicity(u, v) != q.multiplicity(phi[u], phi[v]):
                return False
    # each glued vertex's union of required ends must fit in degree 3
    for u in dom:
        shared_ends = sum(
            p.multiplicity(u, v) * (2 if v == u else 1) for v in dom
        )
        total = p.internal_ends(u) + q.internal_ends(phi[u]) - shared_ends
        if total > 3:
            return False
    return True


def _build_amalgam(
    p: RuleGraph, q: RuleGraph, phi: dict[int, int]
) -> tuple[tuple[tuple[int, int], ...], int, tuple[tuple[int, int], ...]]:
    """Merge the two patterns over phi into one small graph description."""
    ids: dict[tuple[str, int], int] = {}
    counter = 0
    for v in range(p.n_vertices):
        ids[("p", v)] = counter
        counter += 1
    inv = {pv: qv for pv, qv in phi.items()}
    for v in range(q.n_vertices):
        if v in inv.values():
            owner = next(pv for pv, qv in phi.items() if qv == v)
            ids[("q", v)] = ids[("p", owner)]
        else:
            ids[("q", v)] = counter
            counter += 1
    edges: list[tuple[int, int]] = []
    for u, v in p.edges:
        edges.append(tuple(sorted((ids[("p", u)], ids[("p", v)]))))
    shared_pairs = {
        tuple(sorted((ids[("p", u)], ids[("p", v)])))
        for u in phi
        for v in phi
        if p.multiplicity(u, v) > 0
    }
    for u, v in q.edges:
        pair = tuple(sorted((ids[("q", u)], ids[("q", v)])))
        if pair in shared_pairs:
            continue  # already contributed by the pattern side
        edges.append(pair)
    glued = tuple(sorted((u, phi[u]) for u in phi))
    return glued, counter, tuple(sorted(edges))


# -- serialization ----------------------------------------------------------------

def rule_graph_from_dict(data: dict) -> RuleGraph:
    return RuleGraph(
        int(data["vertices"]),
        tuple((int(u), int(v)) for u, v in data.get("edges", [])),
        tuple(int(v) for v in data.get("boundary", [])),
    )


def rules_from_json(text: str) -> list[UpdateRule]:
    data = json.loads(text)
    return [
        UpdateRule(
            str(entry.get("name", f"rule{i}")),
            rule_graph_from_dict(entry["pattern"]),
            rule_graph_from_dict(entry["replacement"]),
        )
        for i, entry in enumerate(data["rules"])
    ]
