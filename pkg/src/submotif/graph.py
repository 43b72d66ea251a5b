"""Immutable graph storage, standard-model query oracle, and edge-list I/O."""
from __future__ import annotations

import re
import warnings
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .rng import RandomStream


class EdgeListError(ValueError):
    """Malformed edge-list input."""


class DuplicateEdgeWarning(UserWarning):
    pass


class QueryBudgetExceeded(RuntimeError):
    """Raised before a query that would push the ledger past the active budget."""


class Graph:
    """Simple undirected graph in CSR form with ascending neighbor lists."""

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = (), *, planted=()):
        n = int(n)
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        arr = arr.reshape(-1, 2)
        if arr.size:
            if arr.min() < 0 or arr.max() >= n:
                raise ValueError("edge endpoint out of range")
            if np.any(arr[:, 0] == arr[:, 1]):
                raise ValueError("self-loops are not allowed")
        both = np.concatenate([arr, arr[:, ::-1]]) if arr.size else arr
        if both.size:
            keys = np.unique(both[:, 0] * n + both[:, 1])
            src, dst = keys // n, keys % n
        else:
            src = dst = np.zeros(0, dtype=np.int64)
        self.n = n
        self.degrees = np.bincount(src, minlength=n).astype(np.int64)
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(self.degrees, out=self.indptr[1:])
        self.indices = dst.astype(np.int64)
        self.m_ordered = int(self.indices.size)
        self.planted = tuple(tuple(int(x) for x in c) for c in planted)
        self._adj = None
        self._sets = None
        self._lists = None

    @classmethod
    def from_csr(cls, n: int, indptr: np.ndarray, indices: np.ndarray, planted=()) -> "Graph":
        """Wrap already-valid CSR arrays (sorted, symmetric, loop-free) without copying."""
        g = cls.__new__(cls)
        g.n = int(n)
        g.indptr = np.asarray(indptr, dtype=np.int64)
        g.indices = np.asarray(indices, dtype=np.int64)
        g.degrees = np.diff(g.indptr)
        g.m_ordered = int(g.indices.size)
        g.planted = tuple(planted)
        g._adj = g._sets = g._lists = None
        return g

    @property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        if self._adj is None:
            ind = self.indices.tolist()
            ptr = self.indptr.tolist()
            self._adj = tuple(tuple(ind[ptr[v]:ptr[v + 1]]) for v in range(self.n))
        return self._adj

    @property
    def neighbor_sets(self) -> list[frozenset]:
        if self._sets is None:
            self._sets = [frozenset(a) for a in self.adjacency]
        return self._sets

    def lists(self):
        """(indptr, indices, degrees) as Python lists for the pure-Python walker."""
        if self._lists is None:
            self._lists = (self.indptr.tolist(), self.indices.tolist(), self.degrees.tolist())
        return self._lists

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.neighbor_sets[u]

    def edges(self) -> list[tuple[int, int]]:
        """Undirected edges as (u, v) with u < v, sorted."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
        mask = src < self.indices
        return list(zip(src[mask].tolist(), self.indices[mask].tolist()))

    @property
    def num_edges(self) -> int:
        return self.m_ordered // 2

    def degree(self, v: int) -> int:
        return int(self.degrees[v])

    def __eq__(self, other) -> bool:
        return (isinstance(other, Graph) and self.n == other.n
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))

    def __hash__(self):
        return hash((self.n, self.indices.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m_ordered={self.m_ordered})"


@dataclass
class QueryLedger:
    degree_queries: int = 0
    neighbor_queries: int = 0
    pair_queries: int = 0
    uniform_vertex_draws: int = 0

    def total(self) -> int:
        return self.degree_queries + self.neighbor_queries + self.pair_queries

    def snapshot(self) -> "QueryLedger":
        return QueryLedger(self.degree_queries, self.neighbor_queries,
                           self.pair_queries, self.uniform_vertex_draws)

    def __sub__(self, other: "QueryLedger") -> "QueryLedger":
        return QueryLedger(self.degree_queries - other.degree_queries,
                           self.neighbor_queries - other.neighbor_queries,
                           self.pair_queries - other.pair_queries,
                           self.uniform_vertex_draws - other.uniform_vertex_draws)

    def __add__(self, other: "QueryLedger") -> "QueryLedger":
        return QueryLedger(self.degree_queries + other.degree_queries,
                           self.neighbor_queries + other.neighbor_queries,
                           self.pair_queries + other.pair_queries,
                           self.uniform_vertex_draws + other.uniform_vertex_draws)

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.degree_queries, self.neighbor_queries, self.pair_queries, self.uniform_vertex_draws)

    def as_dict(self) -> dict:
        return {"degree": self.degree_queries, "neighbor": self.neighbor_queries,
                "pair": self.pair_queries, "uniform": self.uniform_vertex_draws}


class QueryOracle:
    """Standard-model access to a Graph: degree, i-th neighbor and pair queries.

    Every query is tallied in ``ledger``. An optional absolute limit on
    ``ledger.total()`` can be installed with :meth:`budget`; a query that
    would exceed it raises :class:`QueryBudgetExceeded` without being charged.
    """

    def __init__(self, graph: Graph, ledger: QueryLedger | None = None):
        self.graph = graph
        self.n = graph.n
        self.ledger = ledger if ledger is not None else QueryLedger()
        self.limit: int | None = None
        self._deg = graph.degrees
        self._sets = graph.neighbor_sets
        self._adj = graph.adjacency

    # budget handling
    @contextmanager
    def budget(self, extra: int):
        """Allow at most ``extra`` further graph queries inside the block."""
        previous = self.limit
        limit = self.ledger.total() + int(extra)
        self.limit = limit if previous is None else min(previous, limit)
        try:
            yield self
        finally:
            self.limit = previous

    def remaining(self) -> int | None:
        if self.limit is None:
            return None
        return self.limit - self.ledger.total()

    def charge(self, degree: int = 0, neighbor: int = 0, pair: int = 0, uniform: int = 0) -> None:
        extra = degree + neighbor + pair
        if self.limit is not None and extra and self.ledger.total() + extra > self.limit:
            raise QueryBudgetExceeded(f"query budget of {self.limit} exhausted")
        led = self.ledger
        led.degree_queries += degree
        led.neighbor_queries += neighbor
        led.pair_queries += pair
        led.uniform_vertex_draws += uniform

    def _check_vertex(self, v) -> int:
        v = int(v)
        if not 0 <= v < self.n:
            raise IndexError(f"vertex {v} out of range [0, {self.n})")
        return v

    # single queries
    def degree(self, v: int) -> int:
        v = self._check_vertex(v)
        self.charge(degree=1)
        return int(self._deg[v])

    def neighbor(self, v: int, i: int) -> int | None:
        """The i-th neighbor (1-based) of v, or None when i > d(v)."""
        v = self._check_vertex(v)
        if i < 1:
            raise ValueError("neighbor index is 1-based")
        self.charge(neighbor=1)
        adj = self._adj[v]
        return adj[i - 1] if i <= len(adj) else None

    def pair(self, u: int, v: int) -> bool:
        u = self._check_vertex(u)
        v = self._check_vertex(v)
        self.charge(pair=1)
        return v in self._sets[u]

    def uniform_vertex(self, rng: RandomStream) -> int:
        if self.n < 1:
            raise ValueError("empty graph")
        v = rng.integer(self.n)
        self.charge(uniform=1)
        return v

    def precedes(self, u: int, v: int) -> bool:
        """u comes before v in the (degree, id) order; costs two degree queries."""
        if int(u) == int(v):
            raise ValueError("precedes needs two distinct vertices")
        du = self.degree(u)
        dv = self.degree(v)
        return (du, int(u)) < (dv, int(v))

    # bulk queries (vectorized, charged per element)
    def degrees_of(self, vs: np.ndarray) -> np.ndarray:
        vs = np.asarray(vs, dtype=np.int64)
        if vs.size and (vs.min() < 0 or vs.max() >= self.n):
            raise IndexError("vertex out of range")
        self.charge(degree=int(vs.size))
        return self._deg[vs]

    def uniform_vertices(self, rng: RandomStream, size: int) -> np.ndarray:
        if self.n < 1:
            raise ValueError("empty graph")
        out = rng.generator.integers(0, self.n, size=int(size), dtype=np.int64)
        self.charge(uniform=int(size))
        return out

    def uniform_multiset(self, rng: RandomStream, size: int) -> np.ndarray:
        """Multiplicity vector of ``size`` independent uniform vertex draws."""
        if self.n < 1:
            raise ValueError("empty graph")
        counts = rng.generator.multinomial(int(size), np.full(self.n, 1.0 / self.n))
        self.charge(uniform=int(size))
        return counts.astype(np.int64)

    def multiset_degrees(self, counts: np.ndarray) -> np.ndarray:
        """Degrees of a sampled multiset, charging one query per element."""
        self.charge(degree=int(np.sum(counts)))
        return self._deg.copy()

    def random_neighbors(self, vs: np.ndarray, degs: np.ndarray, rng: RandomStream) -> np.ndarray:
        """One uniform neighbor for each vertex in ``vs`` (all must have degree > 0)."""
        if vs.size == 0:
            return vs.copy()
        self.charge(neighbor=int(vs.size))
        offs = rng.generator.integers(0, degs)
        return self.graph.indices[self.graph.indptr[vs] + offs]

    def read_graph(self) -> Graph:
        """Read the whole graph: n degree queries plus one neighbor query per ordered edge."""
        self.charge(degree=self.n, neighbor=self.graph.m_ordered)
        g = self.graph
        return Graph.from_csr(g.n, g.indptr.copy(), g.indices.copy())


# module-level query functions mirroring the oracle methods
def degree(oracle: QueryOracle, v: int) -> int:
    return oracle.degree(v)


def neighbor(oracle: QueryOracle, v: int, i: int) -> int | None:
    return oracle.neighbor(v, i)


def pair(oracle: QueryOracle, u: int, v: int) -> bool:
    return oracle.pair(u, v)


def uniform_vertex(oracle: QueryOracle, rng: RandomStream) -> int:
    return oracle.uniform_vertex(rng)


def precedes(oracle: QueryOracle, u: int, v: int) -> bool:
    return oracle.precedes(u, v)


def ledger_report(oracle: QueryOracle) -> QueryLedger:
    return oracle.ledger.snapshot()


# edge-list I/O
_HEADER = re.compile(r"^n\s*=\s*(\d+)$")
_EDGE = re.compile(r"^(\d+)[ \t]+(\d+)$")


def parse_edge_list(text: str, *, source: str = "<string>", require_header: bool = False) -> Graph:
    """Parse edge-list text: comments, optional ``n=<int>`` header, ``u v`` lines."""
    declared = None
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    duplicates = 0
    first = True
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        header = _HEADER.match(line)
        if header:
            if not first:
                raise EdgeListError(f"{source}: line {lineno}: header only allowed on first non-comment line")
            declared = int(header.group(1))
            first = False
            continue
        if first and require_header:
            raise EdgeListError(f"{source}: line {lineno}: missing mandatory n=<k> header")
        first = False
        match = _EDGE.match(line)
        if not match:
            raise EdgeListError(f"{source}: line {lineno}: cannot parse {raw!r}")
        u, v = int(match.group(1)), int(match.group(2))
        if u == v:
            raise EdgeListError(f"{source}: self-loop at line {lineno}")
        if declared is not None and max(u, v) >= declared:
            raise EdgeListError(f"{source}: line {lineno}: id {max(u, v)} >= declared n={declared}")
        key = (u, v) if u < v else (v, u)
        if key in seen:
            duplicates += 1
            continue
        seen.add(key)
        edges.append(key)
    if require_header and declared is None:
        raise EdgeListError(f"{source}: missing mandatory n=<k> header")
    if duplicates:
        warnings.warn(f"{source}: {duplicates} duplicate edge(s) ignored", DuplicateEdgeWarning, stacklevel=2)
    n = 1 + max((max(e) for e in edges), default=-1)
    if declared is not None:
        n = max(n, declared)
    return Graph(n, edges)


def load_edge_list(path) -> Graph:
    path = Path(path)
    return parse_edge_list(path.read_text(encoding="utf-8"), source=str(path))


def format_edge_list(graph: Graph) -> str:
    lines = [f"n={graph.n}"]
    lines.extend(f"{u} {v}" for u, v in graph.edges())
    return "\n".join(lines) + "\n"


def write_edge_list(graph: Graph, path) -> None:
    Path(path).write_text(format_edge_list(graph), encoding="utf-8")
