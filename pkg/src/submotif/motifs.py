"""Motifs, their Hamiltonian profile (h_F, kappa_F), copies, and exact counting."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from pathlib import Path
from typing import Iterable, Sequence

from .graph import Graph, parse_edge_list

MAX_K = 10
DEFAULT_MAX_WORK = 50_000_000


class WorkBoundExceeded(RuntimeError):
    pass


def _norm(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


class Motif:
    """A connected simple graph on k vertices (3 <= k <= 10).

    Vertices are relabeled on construction by (degree, original id) so that
    equal motifs given with different vertex orders share one cache entry.
    """

    __slots__ = ("k", "edges", "name", "_adj")

    def __init__(self, k: int, edges: Iterable[tuple[int, int]], name: str | None = None):
        k = int(k)
        if not 3 <= k <= MAX_K:
            raise ValueError(f"motif size must be in [3, {MAX_K}]")
        es = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError("motif has a self-loop")
            if not (0 <= u < k and 0 <= v < k):
                raise ValueError("motif edge endpoint out of range")
            es.add(_norm(u, v))
        deg = [0] * k
        for u, v in es:
            deg[u] += 1
            deg[v] += 1
        order = sorted(range(k), key=lambda x: (deg[x], x))
        relabel = {old: new for new, old in enumerate(order)}
        self.k = k
        self.edges = frozenset(_norm(relabel[u], relabel[v]) for u, v in es)
        adj = [set() for _ in range(k)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        self._adj = tuple(frozenset(a) for a in adj)
        if not _connected(k, self._adj):
            raise ValueError("motif must be connected")
        self.name = name or f"motif:k={k},m={len(self.edges)}"

    @property
    def adjacency(self) -> tuple[frozenset, ...]:
        return self._adj

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    @property
    def is_clique(self) -> bool:
        return len(self.edges) == self.k * (self.k - 1) // 2

    @property
    def is_star(self) -> bool:
        return len(self.edges) == self.k - 1 and max(len(a) for a in self._adj) == self.k - 1

    @property
    def is_cycle(self) -> bool:
        return len(self.edges) == self.k and all(len(a) == 2 for a in self._adj)

    def as_graph(self) -> Graph:
        return Graph(self.k, sorted(self.edges))

    def __eq__(self, other) -> bool:
        return isinstance(other, Motif) and self.k == other.k and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.k, self.edges))

    def __repr__(self) -> str:
        return f"Motif({self.name})"


def _connected(k: int, adj) -> bool:
    seen = {0}
    stack = [0]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == k


def cycle(k: int) -> Motif:
    return Motif(k, [(i, (i + 1) % k) for i in range(k)], name=f"cycle:{k}")


def clique(k: int) -> Motif:
    return Motif(k, [(i, j) for i in range(k) for j in range(i + 1, k)], name=f"clique:{k}")


def star(k: int) -> Motif:
    """Star with one center and k-1 leaves (k vertices in total)."""
    return Motif(k, [(0, i) for i in range(1, k)], name=f"star:{k}")


def diamond() -> Motif:
    """K4 minus one edge."""
    return Motif(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)], name="diamond")


def load_motif(path) -> Motif:
    path = Path(path)
    g = parse_edge_list(path.read_text(encoding="utf-8"), source=str(path), require_header=True)
    return Motif(g.n, g.edges(), name=f"file:{path}")


def parse_motif(spec: str) -> Motif:
    """Parse ``cycle:<k>``, ``clique:<k>``, ``star:<k>`` or ``file:<path>``."""
    kind, _, arg = spec.partition(":")
    if kind == "file":
        return load_motif(arg)
    builders = {"cycle": cycle, "clique": clique, "star": star}
    if kind not in builders or not arg.isdigit():
        raise ValueError(f"invalid motif spec {spec!r}")
    return builders[kind](int(arg))


# Hamiltonian structure

def canonical_cycle(seq: Sequence[int]) -> tuple[int, ...]:
    """Rotate so the lowest vertex is first, then pick the smaller direction."""
    k = len(seq)
    i = min(range(k), key=lambda j: seq[j])
    fwd = tuple(seq[(i + j) % k] for j in range(k))
    bwd = (fwd[0],) + tuple(reversed(fwd[1:]))
    return min(fwd, bwd)


def cycles_in(k: int, adj) -> list[tuple[int, ...]]:
    """Hamiltonian cycles of a k-vertex graph given by adjacency sets."""
    found = []
    path = [0]
    used = [False] * k
    used[0] = True

    def extend():
        last = path[-1]
        if len(path) == k:
            if 0 in adj[last] and path[1] < path[-1]:
                found.append(tuple(path))
            return
        for w in sorted(adj[last]):
            if not used[w]:
                used[w] = True
                path.append(w)
                extend()
                path.pop()
                used[w] = False

    extend()
    return sorted(found)


def cycle_edges(seq: Sequence[int]) -> frozenset:
    k = len(seq)
    return frozenset(_norm(seq[i], seq[(i + 1) % k]) for i in range(k))


@dataclass(frozen=True)
class HamiltonianProfile:
    h_F: int
    kappa_F: int
    is_hamiltonian: bool
    cycles: tuple = ()
    # edge sets over cycle positions 0..k-1 that contain the cycle 0-1-...-(k-1)-0
    templates: tuple = ()
    # Hamiltonian cycles (position sequences) of each template
    template_cycles: tuple = ()
    # positions pairs outside the reference cycle used by any template
    chord_pairs: tuple = field(default=())


@lru_cache(maxsize=None)
def hamiltonian_profile(motif: Motif) -> HamiltonianProfile:
    k = motif.k
    hs = cycles_in(k, motif.adjacency)
    templates = []
    seen = set()
    for h in hs:
        for start in range(k):
            for step in (1, -1):
                pos = {h[(start + step * i) % k]: i for i in range(k)}
                image = frozenset(_norm(pos[u], pos[v]) for u, v in motif.edges)
                if image not in seen:
                    seen.add(image)
                    templates.append(image)
    templates.sort(key=sorted)
    ref = cycle_edges(range(k))
    tcycles = []
    for t in templates:
        adj = [set() for _ in range(k)]
        for u, v in t:
            adj[u].add(v)
            adj[v].add(u)
        tcycles.append(tuple(cycles_in(k, adj)))
    chords = sorted(set().union(*templates) - ref) if templates else []
    return HamiltonianProfile(len(hs), len(templates), bool(hs), tuple(hs), tuple(templates),
                              tuple(tcycles), tuple(chords))


def hamiltonian_cycles(motif: Motif) -> list[tuple[int, ...]]:
    return list(hamiltonian_profile(motif).cycles)


def kappa(motif: Motif) -> int:
    return hamiltonian_profile(motif).kappa_F


def is_hamiltonian(motif: Motif) -> bool:
    return hamiltonian_profile(motif).is_hamiltonian


@dataclass(frozen=True, eq=False)
class CopyRecord:
    """A copy of a motif in a host graph; identity is (vertex set, edge set)."""

    vertices: tuple
    edges: frozenset
    witness_cycle: tuple | None = None

    @property
    def key(self) -> tuple[frozenset, frozenset]:
        return (frozenset(self.vertices), self.edges)

    def __eq__(self, other) -> bool:
        return isinstance(other, CopyRecord) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)


def copies_containing_cycle(host_edges: Iterable[tuple[int, int]], cycle_seq: Sequence[int],
                            motif: Motif) -> list[CopyRecord]:
    """Copies of ``motif`` inside the k-vertex host that contain every edge of ``cycle_seq``."""
    k = motif.k
    if len(cycle_seq) != k or len(set(cycle_seq)) != k:
        raise ValueError("cycle must list k distinct vertices")
    host = {_norm(u, v) for u, v in host_edges}
    cyc = cycle_edges(cycle_seq)
    if not cyc <= host:
        raise ValueError("cycle is not contained in the host subgraph")
    prof = hamiltonian_profile(motif)
    out = []
    for t in prof.templates:
        es = frozenset(_norm(cycle_seq[a], cycle_seq[b]) for a, b in t)
        if es <= host:
            out.append(CopyRecord(tuple(cycle_seq), es, tuple(cycle_seq)))
    return out


def is_copy(graph: Graph, copy: CopyRecord, motif: Motif) -> bool:
    """Check that the copy's edges exist in ``graph`` and form a graph isomorphic to the motif."""
    vs = list(copy.vertices)
    if len(set(vs)) != motif.k or any(not graph.has_edge(u, v) for u, v in copy.edges):
        return False
    if any(u not in copy.vertices or v not in copy.vertices for u, v in copy.edges):
        return False
    index = {v: i for i, v in enumerate(vs)}
    local = Graph(motif.k, [(index[u], index[v]) for u, v in copy.edges])
    return len(local.edges()) == len(motif.edges) and _embedding_count(local, motif, first_only=True) > 0


# exact counting by backtracking

def _search_order(motif: Motif) -> tuple[list[int], list[list[int]]]:
    k = motif.k
    adj = motif.adjacency
    start = max(range(k), key=lambda v: (len(adj[v]), -v))
    order = [start]
    while len(order) < k:
        placed = set(order)
        best = max((v for v in range(k) if v not in placed),
                   key=lambda v: (len(adj[v] & placed), len(adj[v]), -v))
        order.append(best)
    back = [[order.index(u) for u in adj[v] if u in order[:i]] for i, v in enumerate(order)]
    return order, back


def _embedding_count(graph: Graph, motif: Motif, *, max_work: int = DEFAULT_MAX_WORK,
                     first_only: bool = False, collect: list | None = None) -> int:
    """Count injective edge-preserving maps motif -> graph."""
    k = motif.k
    order, back = _search_order(motif)
    need = [len(motif.adjacency[v]) for v in order]
    sets = graph.neighbor_sets
    adj = graph.adjacency
    deg = graph.degrees.tolist()
    image = [0] * k
    count = 0
    work = 0

    def rec(i: int) -> None:
        nonlocal count, work
        work += 1
        if work > max_work:
            raise WorkBoundExceeded(f"exact count exceeded work bound {max_work}")
        if i == k:
            count += 1
            if collect is not None:
                collect.append(tuple(image))
            return
        b = back[i]
        if b:
            anchor = image[b[0]]
            cands = adj[anchor]
            rest = [image[j] for j in b[1:]]
        else:
            cands = range(graph.n)
            rest = []
        used = image[:i]
        for c in cands:
            if deg[c] < need[i] or c in used:
                continue
            sc = sets[c]
            if all(r in sc for r in rest):
                image[i] = c
                rec(i + 1)
                if first_only and count:
                    return

    rec(0)
    if collect is not None:
        # translate from search order back to motif vertex order
        inv = [order.index(v) for v in range(k)]
        collect[:] = [tuple(t[inv[v]] for v in range(k)) for t in collect]
    return count


@lru_cache(maxsize=None)
def automorphism_count(motif: Motif) -> int:
    return _embedding_count(motif.as_graph(), motif)


def exact_motif_count(graph: Graph, motif: Motif, *, max_work: int = DEFAULT_MAX_WORK) -> int:
    """Number of subgraphs of ``graph`` isomorphic to ``motif`` (not necessarily induced)."""
    if motif.is_star:
        return sum(comb(int(d), motif.k - 1) for d in graph.degrees)
    emb = _embedding_count(graph, motif, max_work=max_work)
    aut = automorphism_count(motif)
    assert emb % aut == 0
    return emb // aut


def enumerate_copies(graph: Graph, motif: Motif, *, max_work: int = DEFAULT_MAX_WORK) -> list[CopyRecord]:
    """All distinct copies of ``motif`` in ``graph``."""
    maps: list = []
    _embedding_count(graph, motif, max_work=max_work, collect=maps)
    out = {}
    for img in maps:
        es = frozenset(_norm(img[u], img[v]) for u, v in motif.edges)
        key = (frozenset(img), es)
        if key not in out:
            out[key] = CopyRecord(tuple(sorted(img)), es)
    return sorted(out.values(), key=lambda c: (sorted(c.vertices), sorted(c.edges)))
