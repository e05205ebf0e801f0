"""Vertex-typed multigraphs: canonical forms, automorphisms, enumeration, 1PI structure.

Graphs are small (a dozen vertices at most), so canonical labeling is
plain colour refinement followed by individualisation over the stabilised
partition, taking the lexicographically least adjacency code. Vertices
that are twins (swapping them is an automorphism) are branched on once.
"""

from __future__ import annotations

import json
import os
from collections import Counter
from dataclasses import dataclass, field
from math import factorial
from typing import Iterable, Sequence

from .errors import DomainError, ResourceError

INTERNAL = "internal"
SOURCE = "source"
POINT = "point"

DEFAULT_MAX_VERTICES = 16


def max_vertices() -> int:
    return int(os.environ.get("PERTURBIA_MAX_GRAPH_VERTICES", DEFAULT_MAX_VERTICES))


@dataclass(frozen=True)
class Vertex:
    id: int
    kind: str
    valence: int


class MultiGraph:
    """Undirected multigraph with self-loops; a self-loop uses two edge-ends."""

    __slots__ = ("vertices", "edges", "_index", "_canon")

    def __init__(self, vertices: Iterable[Vertex], edges: Iterable[Sequence[int]], validate: bool = True):
        self.vertices = tuple(vertices)
        self.edges = tuple(sorted(tuple(sorted(e)) for e in edges))
        self._index = {v.id: i for i, v in enumerate(self.vertices)}
        self._canon = None
        if len(self._index) != len(self.vertices):
            raise DomainError("duplicate vertex ids")
        for a, b in self.edges:
            if a not in self._index or b not in self._index:
                raise DomainError(f"edge ({a},{b}) references an unknown vertex")
        if validate:
            deg = self.degrees()
            for v in self.vertices:
                if deg[v.id] != v.valence:
                    raise DomainError(f"vertex {v.id} has {deg[v.id]} edge-ends but valence {v.valence}")

    # -- constructors
    @classmethod
    def phi4(cls, internal: int, sources: int, edges) -> "MultiGraph":
        """Internal valence-4 vertices ``0..internal-1`` then sources."""
        vs = [Vertex(i, INTERNAL, 4) for i in range(internal)]
        vs += [Vertex(internal + k, SOURCE, 1) for k in range(sources)]
        return cls(vs, edges)

    @classmethod
    def points(cls, n: int, edges) -> "MultiGraph":
        """Untyped graph whose valences are whatever the edges give."""
        edges = list(edges)
        deg = Counter()
        for a, b in edges:
            deg[a] += 1
            deg[b] += 1
        return cls([Vertex(i, POINT, deg[i]) for i in range(n)], edges)

    # -- structure
    @property
    def n(self) -> int:
        return len(self.vertices)

    def degrees(self) -> dict:
        deg = {v.id: 0 for v in self.vertices}
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg

    def adjacency(self) -> list:
        """Dense multiplicity matrix by vertex position; diagonal counts loops."""
        n = self.n
        A = [[0] * n for _ in range(n)]
        for a, b in self.edges:
            i, j = self._index[a], self._index[b]
            A[i][j] += 1
            if i != j:
                A[j][i] += 1
        return A

    def count(self, kind: str) -> int:
        return sum(1 for v in self.vertices if v.kind == kind)

    def kind_of(self, vid: int) -> str:
        return self.vertices[self._index[vid]].kind

    def components(self, edges=None) -> list:
        edges = self.edges if edges is None else edges
        parent = {v.id: v.id for v in self.vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in edges:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
        groups: dict = {}
        for v in self.vertices:
            groups.setdefault(find(v.id), []).append(v.id)
        return sorted(groups.values())

    def is_connected(self) -> bool:
        return len(self.components()) == 1

    def bridges(self) -> list:
        """Indices into ``edges`` of the cut-edges (Tarjan low-link on edge ids)."""
        adj = {v.id: [] for v in self.vertices}
        for k, (a, b) in enumerate(self.edges):
            if a == b:
                continue
            adj[a].append((b, k))
            adj[b].append((a, k))
        disc, low, out = {}, {}, []
        counter = [0]

        def dfs(u, via):
            disc[u] = low[u] = counter[0]
            counter[0] += 1
            for w, k in adj[u]:
                if k == via:
                    continue
                if w in disc:
                    low[u] = min(low[u], disc[w])
                else:
                    dfs(w, k)
                    low[u] = min(low[u], low[w])
                    if low[w] > disc[u]:
                        out.append(k)

        for v in self.vertices:
            if v.id not in disc:
                dfs(v.id, None)
        return sorted(out)

    def subgraph(self, vertex_ids) -> "MultiGraph":
        keep = set(vertex_ids)
        return MultiGraph([v for v in self.vertices if v.id in keep],
                          [e for e in self.edges if e[0] in keep], validate=False)

    # -- canonical data
    def canonical(self) -> "CanonicalForm":
        if self._canon is None:
            self._canon = canonical_form(self)
        return self._canon

    @property
    def code(self) -> bytes:
        return self.canonical().canonical_code

    def __eq__(self, other):
        return isinstance(other, MultiGraph) and self.vertices == other.vertices and self.edges == other.edges

    def __hash__(self):
        return hash((self.vertices, self.edges))

    def __repr__(self):
        kinds = Counter(v.kind for v in self.vertices)
        return f"MultiGraph({dict(kinds)}, edges={list(self.edges)})"

    # -- exchange format
    def to_json(self) -> dict:
        return {
            "vertices": [{"id": v.id, "kind": v.kind, "valence": v.valence} for v in self.vertices],
            "edges": [list(e) for e in self.edges],
        }

    @classmethod
    def from_json(cls, data: dict) -> "MultiGraph":
        return cls([Vertex(int(v["id"]), v["kind"], int(v["valence"])) for v in data["vertices"]],
                   [tuple(e) for e in data["edges"]])


@dataclass(frozen=True)
class CanonicalForm:
    canonical_code: bytes
    aut_order: int

    @property
    def hex(self) -> str:
        return self.canonical_code.hex()


# ----------------------------------------------------------- refinement core

def _initial_cells(labels, A):
    n = len(labels)
    keys = [(labels[v], sum(A[v]) + A[v][v], A[v][v]) for v in range(n)]
    groups: dict = {}
    for v in range(n):
        groups.setdefault(keys[v], []).append(v)
    return [groups[k] for k in sorted(groups)]


def _refine(A, cells):
    """Equitable refinement; returns (cells, trace)."""
    n = len(A)
    trace = []
    while True:
        where = [0] * n
        for i, c in enumerate(cells):
            for v in c:
                where[v] = i
        m = len(cells)
        sig = []
        for v in range(n):
            row = [0] * m
            Av = A[v]
            for u in range(n):
                if Av[u]:
                    row[where[u]] += Av[u]
            sig.append(tuple(row))
        new = []
        changed = False
        step = []
        for c in cells:
            if len(c) == 1:
                new.append(c)
                step.append((sig[c[0]],))
                continue
            groups: dict = {}
            for v in c:
                groups.setdefault(sig[v], []).append(v)
            ks = sorted(groups)
            if len(ks) > 1:
                changed = True
            step.append(tuple((k, len(groups[k])) for k in ks))
            new.extend(groups[k] for k in ks)
        trace.append(tuple(step))
        cells = new
        if not changed:
            return cells, tuple(trace)


def _individualize(cells, k, v):
    c = cells[k]
    return cells[:k] + [[v], [u for u in c if u != v]] + cells[k + 1:]


def _target(cells):
    for k, c in enumerate(cells):
        if len(c) > 1:
            return k
    return None


def _twin_classes(labels, A):
    n = len(labels)
    rep = list(range(n))
    for v in range(n):
        for u in range(v):
            if rep[u] != u:
                continue
            if labels[u] != labels[v] or A[u][u] != A[v][v]:
                continue
            if all(A[u][w] == A[v][w] for w in range(n) if w != u and w != v):
                rep[v] = u
                break
    return rep


def _leaf_code(labels, A, order):
    lab = tuple(labels[v] for v in order)
    n = len(order)
    adj = tuple(A[order[i]][order[j]] for i in range(n) for j in range(i, n))
    return lab, adj


def _is_automorphism(labels, A, perm):
    n = len(A)
    return all(labels[v] == labels[perm[v]] for v in range(n)) and all(
        A[u][v] == A[perm[u]][perm[v]] for u in range(n) for v in range(u, n))


def _canonical_search(labels, A):
    twins = _twin_classes(labels, A)
    best = [None]

    def rec(cells):
        cells, _ = _refine(A, cells)
        k = _target(cells)
        if k is None:
            code = _leaf_code(labels, A, [c[0] for c in cells])
            if best[0] is None or code < best[0]:
                best[0] = code
            return
        seen = set()
        for v in cells[k]:
            if twins[v] in seen:
                continue
            seen.add(twins[v])
            rec(_individualize(cells, k, v))

    rec(_initial_cells(labels, A))
    return best[0]


def _vertex_automorphisms(labels, A) -> int:
    twins = _twin_classes(labels, A)

    def exists(PL, PR):
        PL, tl = _refine(A, PL)
        PR, tr = _refine(A, PR)
        if tl != tr:
            return False
        k = _target(PL)
        if k is None:
            perm = [0] * len(A)
            for cl, cr in zip(PL, PR):
                perm[cl[0]] = cr[0]
            return _is_automorphism(labels, A, perm)
        v = PL[k][0]
        left = _individualize(PL, k, v)
        return any(exists(left, _individualize(PR, k, w)) for w in PR[k])

    def count(P):
        P, _ = _refine(A, P)
        k = _target(P)
        if k is None:
            return 1
        v = P[k][0]
        left = _individualize(P, k, v)
        orbit = 0
        for w in P[k]:
            if w == v or twins[w] == twins[v] or exists(left, _individualize(P, k, w)):
                orbit += 1
        return orbit * count(left)

    return count(_initial_cells(labels, A))


def edge_symmetry_factor(A) -> int:
    """Permutations of parallel edges and flips/permutations of self-loops."""
    n = len(A)
    out = 1
    for i in range(n):
        out *= factorial(A[i][i]) * 2 ** A[i][i]
        for j in range(i + 1, n):
            out *= factorial(A[i][j])
    return out


def _labels(g: MultiGraph):
    return [(v.kind, v.valence) for v in g.vertices]


def canonical_form(g: MultiGraph) -> CanonicalForm:
    return CanonicalForm(canonical_code(g), aut_order(g))


def canonical_code(g: MultiGraph) -> bytes:
    """Isomorphism-invariant byte code (vertex labels plus adjacency multiplicities)."""
    labels, A = _labels(g), g.adjacency()
    lab, adj = _canonical_search(labels, A) if g.n else ((), ())
    n = len(lab)
    triples = []
    k = 0
    for i in range(n):
        for j in range(i, n):
            if adj[k]:
                triples.append([i, j, adj[k]])
            k += 1
    return json.dumps([[list(x) for x in lab], triples], separators=(",", ":")).encode()


def graph_from_code(code: bytes) -> MultiGraph:
    lab, triples = json.loads(code.decode())
    vs = [Vertex(i, kind, val) for i, (kind, val) in enumerate(lab)]
    edges = []
    for i, j, m in triples:
        edges += [(i, j)] * m
    return MultiGraph(vs, edges)


def aut_order(g: MultiGraph) -> int:
    """Order of the automorphism group acting on vertices and edge-ends."""
    if g.n == 0:
        return 1
    labels, A = _labels(g), g.adjacency()
    return _vertex_automorphisms(labels, A) * edge_symmetry_factor(A)


def brute_force_aut_order(g: MultiGraph) -> int:
    """Reference: all kind-preserving vertex permutations (small graphs only)."""
    from itertools import permutations

    labels, A = _labels(g), g.adjacency()
    count = sum(1 for p in permutations(range(g.n)) if _is_automorphism(labels, A, list(p)))
    return count * edge_symmetry_factor(A)


def is_isomorphic_brute(g: MultiGraph, h: MultiGraph) -> bool:
    from itertools import permutations

    if g.n != h.n:
        return False
    lg, Ag = _labels(g), g.adjacency()
    lh, Ah = _labels(h), h.adjacency()
    n = g.n
    for p in permutations(range(n)):
        if all(lg[v] == lh[p[v]] for v in range(n)) and all(
                Ag[u][v] == Ah[p[u]][p[v]] for u in range(n) for v in range(u, n)):
            return True
    return False


def relabel(g: MultiGraph, perm: Sequence[int]) -> MultiGraph:
    """Move the vertex at position ``i`` to id ``perm[i]`` and shuffle order."""
    ids = {v.id: perm[i] for i, v in enumerate(g.vertices)}
    vs = sorted((Vertex(ids[v.id], v.kind, v.valence) for v in g.vertices), key=lambda v: v.id)
    return MultiGraph(vs, [(ids[a], ids[b]) for a, b in g.edges])


# ---------------------------------------------------------------- analysis

def loop_number(g: MultiGraph) -> int:
    return len(g.edges) - g.n + len(g.components())


@dataclass
class OnePIDecomposition:
    pieces: list
    bridges: list
    tree: dict = field(default_factory=dict)


def one_pi_decompose(g: MultiGraph) -> OnePIDecomposition:
    comps = g.components()
    if len(comps) > 1:
        raise DomainError(f"graph is disconnected; components: {comps}")
    bidx = g.bridges()
    bset = set(bidx)
    inner = [e for k, e in enumerate(g.edges) if k not in bset]
    sources = {v.id for v in g.vertices if v.kind == SOURCE}
    pieces = []
    where = {}
    for comp in g.components(inner):
        if len(comp) == 1 and comp[0] in sources:
            continue
        where.update({v: ("piece", len(pieces)) for v in comp})
        pieces.append(comp)
    for s in sources:
        where[s] = ("source", s)
    tree: dict = {node: [] for node in set(where.values())}
    bridges = [g.edges[k] for k in bidx]
    for a, b in bridges:
        tree[where[a]].append(where[b])
        tree[where[b]].append(where[a])
    return OnePIDecomposition(pieces, bridges, tree)


def tree_form_defect(g: MultiGraph) -> int:
    """``-1 + v1 - bridges + pieces``; vanishes on every connected graph."""
    d = one_pi_decompose(g)
    return -1 + g.count(SOURCE) - len(d.bridges) + len(d.pieces)


def is_one_pi(g: MultiGraph) -> bool:
    """Connected, at least one internal vertex, sources hang off internal
    vertices, and only source edges are bridges."""
    if not g.is_connected() or g.count(SOURCE) == len(g.vertices):
        return False
    for a, b in g.edges:
        if g.kind_of(a) == SOURCE and g.kind_of(b) == SOURCE:
            return False
    n_src_edges = sum(1 for a, b in g.edges if SOURCE in (g.kind_of(a), g.kind_of(b)))
    return len(g.bridges()) == n_src_edges


# -------------------------------------------------------------- enumeration

FILTERS = ("all", "connected", "trees", "one_pi")


class Enumeration(list):
    """List of ``(graph, aut_order)``; ``diagnostic`` explains an empty result."""

    diagnostic: str | None = None


def _partitions_nonincreasing(total, parts, cap):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(min(total, cap), -1, -1):
        if first * parts < total:
            break
        for rest in _partitions_nonincreasing(total - first, parts - 1, first):
            yield (first,) + rest


def _degree_multigraphs(deg):
    """Labeled loop-multigraphs realising degree sequence ``deg``."""
    n = len(deg)
    A = [[0] * n for _ in range(n)]
    rem = list(deg)

    def rec(i):
        if i == n:
            yield [row[:] for row in A]
            return
        for loops in range(rem[i] // 2, -1, -1):
            rem[i] -= 2 * loops
            A[i][i] = loops
            yield from spread(i, i + 1)
            A[i][i] = 0
            rem[i] += 2 * loops

    def spread(i, j):
        if rem[i] == 0:
            yield from rec(i + 1)
            return
        if j >= n:
            return
        for m in range(min(rem[i], rem[j]), -1, -1):
            A[i][j] = A[j][i] = m
            rem[i] -= m
            rem[j] -= m
            yield from spread(i, j + 1)
            rem[i] += m
            rem[j] += m
            A[i][j] = A[j][i] = 0

    yield from rec(0)


def _build(v_int, valence, s_pairs, legs, A):
    vs = [Vertex(i, INTERNAL, valence) for i in range(v_int)]
    edges = []
    for i in range(v_int):
        edges += [(i, i)] * A[i][i]
        for j in range(i + 1, v_int):
            edges += [(i, j)] * A[i][j]
    sid = v_int
    for _ in range(s_pairs):
        vs += [Vertex(sid, SOURCE, 1), Vertex(sid + 1, SOURCE, 1)]
        edges.append((sid, sid + 1))
        sid += 2
    for i, l in enumerate(legs):
        for _ in range(l):
            vs.append(Vertex(sid, SOURCE, 1))
            edges.append((i, sid))
            sid += 1
    return MultiGraph(vs, edges)


def _passes(g: MultiGraph, flt: str) -> bool:
    if flt == "all":
        return True
    if flt == "connected":
        return g.is_connected()
    if flt == "trees":
        return g.is_connected() and loop_number(g) == 0
    if flt == "one_pi":
        return is_one_pi(g)
    raise DomainError(f"unknown filter {flt!r}")


def enumerate_graphs(v4: int, v1: int, filter: str = "all", valence: int = 4) -> Enumeration:
    """One representative per isomorphism class with ``v4`` internal vertices
    of the given valence and ``v1`` sources, with its automorphism order."""
    if v4 < 0 or v1 < 0:
        raise DomainError("vertex counts must be nonnegative")
    if filter not in FILTERS:
        raise DomainError(f"unknown filter {filter!r}")
    out = Enumeration()
    if (valence * v4 + v1) % 2:
        out.diagnostic = "odd number of edge-ends: no perfect matching exists"
        return out
    if v4 + v1 > max_vertices():
        raise ResourceError(f"{v4 + v1} vertices exceeds the cap of {max_vertices()}")
    seen: dict = {}
    for s in range(v1 // 2 + 1):
        for legs in _partitions_nonincreasing(v1 - 2 * s, v4, valence):
            for A in _degree_multigraphs([valence - l for l in legs]):
                g = _build(v4, valence, s, legs, A)
                code = g.code
                if code not in seen:
                    seen[code] = g
    for code in sorted(seen):
        g = seen[code]
        if _passes(g, filter):
            out.append((g, g.canonical().aut_order))
    return out


def label_group_order(v4: int, v1: int, valence: int = 4) -> int:
    return factorial(valence) ** v4 * factorial(v4) * factorial(v1)


def double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def matching_orbit_counts(v4: int, v1: int, valence: int = 4) -> Counter:
    """Canonical code -> number of labeled end-matchings realising it.

    Brute force over all perfect matchings of labeled edge-ends; each
    count times the automorphism order equals the label group order.
    """
    ends = [(i, k) for i in range(v4) for k in range(valence)] + [(v4 + s, 0) for s in range(v1)]
    if len(ends) % 2:
        return Counter()
    vs = [Vertex(i, INTERNAL, valence) for i in range(v4)] + [Vertex(v4 + s, SOURCE, 1) for s in range(v1)]
    counts: Counter = Counter()

    def rec(remaining, edges):
        if not remaining:
            counts[MultiGraph(vs, edges).code] += 1
            return
        a = remaining[0]
        for idx in range(1, len(remaining)):
            b = remaining[idx]
            rec(remaining[1:idx] + remaining[idx + 1:], edges + [(a[0], b[0])])

    rec(ends, [])
    return counts
