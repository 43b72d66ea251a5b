"""Attempted samplers for Hamiltonian motifs: low copies, mixed copies, and their combination.

The random-walk phase of each attempt runs in the selected walker backend;
copy selection among copies containing the walked cycle and the final
acceptance coin are done here, on the same random stream.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from . import backend
from ._walkdefs import (ATTEMPTS, BRANCH, DEGREE_Q, HAM, HAM_LOW, HAM_MIXED, HIGH,
                        LOW, NCOUNTERS, NEIGHBOR_Q, NO_COPY, PAIR_Q, REASON_BASE, REASONS,
                        REJECTION, UNIFORM_D, VERTEX)
from .graph import QueryBudgetExceeded, QueryLedger, QueryOracle
from .motifs import CopyRecord, Motif, _norm, cycles_in, hamiltonian_profile
from .rng import RandomStream, as_stream
from .typical import DegreesTypicalStructure

BRANCH_NAMES = {LOW: "low", 1: "mixed", HIGH: "high"}


# compositions

def composition_from_mask(mask: int, k: int) -> tuple[int, ...]:
    """Bit b of ``mask`` set means a path break between positions b and b+1."""
    parts = []
    length = 1
    for b in range(k - 1):
        if (mask >> b) & 1:
            parts.append(length)
            length = 1
        else:
            length += 1
    parts.append(length)
    return tuple(parts)


def mask_from_composition(parts: Sequence[int]) -> int:
    mask = 0
    pos = 0
    for x in parts[:-1]:
        pos += x
        mask |= 1 << (pos - 1)
    return mask


def enumerate_compositions(k: int) -> list[tuple[int, ...]]:
    """All 2^(k-1) compositions of k, ordered by break mask."""
    if k < 1:
        raise ValueError("k must be positive")
    return [composition_from_mask(mask, k) for mask in range(1 << (k - 1))]


def sample_composition(rng: RandomStream, k: int) -> tuple[int, ...]:
    """Uniform composition: the k-1 break bits of one uniform integer in [0, 2^(k-1))."""
    return composition_from_mask(rng.integer(1 << (k - 1)), k)


# degree classes and path covers

def degree_class(d: int, gamma_bar: int, m_bar: int) -> str:
    if d <= gamma_bar:
        return "low"
    if d * d <= m_bar:
        return "medium"
    return "high"


@dataclass(frozen=True)
class PathCoverWitness:
    paths: tuple
    degree_classes: tuple


def _cover_ok(classes: Sequence[str], parts: Sequence[int]) -> bool:
    pos = 0
    for x in parts:
        if classes[pos] == "low":
            return False
        if x == 1 and classes[pos] != "high":
            return False
        for y in range(pos + 1, pos + x):
            if classes[y] == "high":
                return False
        pos += x
    return True


def _orientations(k: int):
    for start in range(k):
        for step in (1, -1):
            yield [(start + step * i) % k for i in range(k)]


@lru_cache(maxsize=1 << 16)
def _nu_classes(classes: tuple[str, ...]) -> int:
    k = len(classes)
    comps = enumerate_compositions(k)
    total = 0
    for order in _orientations(k):
        cls = [classes[i] for i in order]
        total += sum(1 for parts in comps if _cover_ok(cls, parts))
    return total


def nu_of_cycle(cycle_degrees: Sequence[int], gamma_bar: int, m_bar: int) -> int:
    """Number of (start, direction, composition) path sequences that cover the cycle.

    ``cycle_degrees`` lists the degrees of the cycle's vertices in cyclic order.
    """
    return _nu_classes(tuple(degree_class(int(d), gamma_bar, m_bar) for d in cycle_degrees))


def path_covers(cycle: Sequence[int], degrees: Mapping[int, int], gamma_bar: int, m_bar: int) -> list[PathCoverWitness]:
    """Every path sequence counted by nu_of_cycle, as explicit witnesses."""
    k = len(cycle)
    out = []
    for order in _orientations(k):
        seq = [cycle[i] for i in order]
        cls = tuple(degree_class(degrees[v], gamma_bar, m_bar) for v in seq)
        for parts in enumerate_compositions(k):
            if _cover_ok(cls, parts):
                paths, pos = [], 0
                for x in parts:
                    paths.append(tuple(seq[pos:pos + x]))
                    pos += x
                out.append(PathCoverWitness(tuple(paths), cls))
    return out


def nu_of_copy(copy: CopyRecord, degrees: Mapping[int, int], gamma_bar: int, m_bar: int) -> int:
    """Sum of nu over the Hamiltonian cycles of the copy's own edge set."""
    vs = sorted(copy.vertices)
    index = {v: i for i, v in enumerate(vs)}
    adj = [set() for _ in vs]
    for u, v in copy.edges:
        adj[index[u]].add(index[v])
        adj[index[v]].add(index[u])
    total = 0
    for cyc in cycles_in(len(vs), adj):
        total += nu_of_cycle([degrees[vs[i]] for i in cyc], gamma_bar, m_bar)
    return total


# normalization

def _root_power(m_bar: int, k: int):
    """m_bar^(k/2), exact integer when m_bar is a perfect square."""
    r = math.isqrt(m_bar)
    if r * r == m_bar:
        return r ** k
    return m_bar ** (k / 2)


def square_ceil(x) -> int:
    """Smallest perfect square >= x (for x >= 0)."""
    r = math.isqrt(max(0, math.ceil(x)))
    if r * r < x:
        r += 1
    return r * r


@dataclass(frozen=True)
class NormalizationConstants:
    B_low: int
    B_mixed: float
    B: float
    B_mixed_nominal: float
    B_mixed_calibrated: float


def normalization_constants(n: int, motif: Motif, gamma_bar: int, m_bar: int, *,
                            nominal_constant: bool = False) -> NormalizationConstants:
    """Branch constants; B_mixed is the exact inverse per-copy probability of the mixed sampler.

    With exact degree-proportional sampling and a perfect-square m_bar, the
    mixed sampler returns each mixed copy with probability
    2^-(k-1) (composition) * (2 sqrt(m_bar))^-k (path steps) / kappa_F,
    hence B_mixed = 2^(2k-1) m_bar^(k/2) kappa_F. ``nominal_constant`` swaps in
    2^k m_bar^(k/2) kappa_F for comparison runs.
    """
    prof = hamiltonian_profile(motif)
    k = motif.k
    kap = prof.kappa_F
    b_low = n * gamma_bar ** (k - 1) * kap
    root = _root_power(m_bar, k)
    calibrated = 2 ** (2 * k - 1) * root * kap
    nominal = 2 ** k * root * kap
    b_mixed = nominal if nominal_constant else calibrated
    return NormalizationConstants(b_low, b_mixed, b_low + b_mixed, nominal, calibrated)


# outcomes and the shared attempt engine

@dataclass
class AttemptOutcome:
    copy: CopyRecord | None
    reason: str | None
    queries: QueryLedger
    branch: str | None = None
    vertex: int | None = None

    @property
    def success(self) -> bool:
        return self.reason is None


@dataclass
class RunResult:
    attempts: int
    successes: int
    counts: Counter | None = None
    reasons: Counter = field(default_factory=Counter)


def _structure_arrays(D: DegreesTypicalStructure | None):
    if D is None or D.alias is None:
        z = np.zeros(0, dtype=np.int64)
        return z, z, np.zeros(0, dtype=np.float64), z, 0.0
    return D.support, D.support_degrees, D.alias.prob, D.alias.alias, D.p_hit


class AttemptEngine:
    """Drives a walker and finishes its candidates; subclasses define ``_finish``."""

    def __init__(self, oracle: QueryOracle, rng, k: int, mode: int, gamma_bar: int, m_bar: int,
                 D: DegreesTypicalStructure | None, *, dmax: int = 1, c1: float = 1.0, c2: float = 1.0,
                 qmax: int, walker_backend: str | None = None):
        self.oracle = oracle
        self.rng = as_stream(rng)
        self.k = k
        self.qmax = qmax
        sup, sdeg, sprob, salias, p_hit = _structure_arrays(D)
        cls = backend.walker_class(walker_backend)
        self.walker = cls(oracle.graph, mode, k, int(gamma_bar), int(m_bar), int(dmax), float(c1), float(c2),
                          sup, sdeg, sprob, salias, float(p_hit), self.rng.bitgen)
        self.seq = np.zeros(k, dtype=np.int64)
        self.deg = np.zeros(k, dtype=np.int64)
        self.counters = np.zeros(NCOUNTERS, dtype=np.int64)
        self.reasons: Counter = Counter()

    def _walk(self, max_attempts: int) -> tuple[int, int]:
        rem = self.oracle.remaining()
        if rem is not None:
            cap = rem // self.qmax
            if cap <= 0:
                raise QueryBudgetExceeded("query budget exhausted")
            max_attempts = min(max_attempts, cap)
        c = self.counters
        c[:] = 0
        status = self.walker.run(int(max_attempts), self.seq, self.deg, c)
        self.oracle.charge(degree=int(c[DEGREE_Q]), neighbor=int(c[NEIGHBOR_Q]),
                           pair=int(c[PAIR_Q]), uniform=int(c[UNIFORM_D]))
        for i, name in enumerate(REASONS):
            if c[REASON_BASE + i]:
                self.reasons[name] += int(c[REASON_BASE + i])
        return status, int(c[ATTEMPTS])

    def _finish(self):
        """Return (copy or None, failure reason or None, branch name)."""
        raise NotImplementedError

    def attempt(self) -> AttemptOutcome:
        before = self.oracle.ledger.snapshot()
        reasons_before = self.reasons.copy()
        status, _ = self._walk(1)
        if status:
            copy, reason, branch = self._finish()
            if reason is not None:
                self.reasons[reason] += 1
        else:
            copy, branch = None, None
            reason = next(iter((self.reasons - reasons_before).keys()))
        return AttemptOutcome(copy, reason, self.oracle.ledger.snapshot() - before, branch)

    def run(self, attempts: int, *, collect: bool = False) -> RunResult:
        """Perform exactly ``attempts`` attempts; count successes (and per-copy tallies)."""
        done = 0
        successes = 0
        counts = Counter() if collect else None
        while done < attempts:
            status, used = self._walk(attempts - done)
            done += used
            if status:
                copy, reason, _ = self._finish()
                if reason is None:
                    successes += 1
                    if collect:
                        counts[copy.key] += 1
                else:
                    self.reasons[reason] += 1
        return RunResult(done, successes, counts, self.reasons.copy())

    def sample(self, max_attempts: int | None = None) -> tuple[CopyRecord | None, int]:
        """Attempt until success; returns (copy, attempts used) or (None, cap) at the cap."""
        done = 0
        cap = max_attempts if max_attempts is not None else 1 << 62
        while done < cap:
            status, used = self._walk(cap - done)
            done += used
            if status:
                copy, reason, _ = self._finish()
                if reason is None:
                    return copy, done
                self.reasons[reason] += 1
        return None, done


class HamiltonianSampler(AttemptEngine):
    """Low, mixed, or combined attempted sampler for a Hamiltonian motif."""

    def __init__(self, oracle: QueryOracle, motif: Motif, gamma_bar: int, m_bar: int | None,
                 D: DegreesTypicalStructure | None, rng, *, branch: str = "combined",
                 n: int | None = None, nominal_constant: bool = False, walker_backend: str | None = None):
        prof = hamiltonian_profile(motif)
        if not prof.is_hamiltonian:
            raise ValueError("motif is not Hamiltonian")
        if gamma_bar < 1:
            raise ValueError("gamma_bar must be positive")
        k = motif.k
        n = oracle.n if n is None else n
        if branch == "low":
            m_bar = m_bar or gamma_bar * gamma_bar
            mode, c1 = HAM_LOW, 1.0
            self.constants = None
        else:
            if D is None or m_bar is None:
                raise ValueError("mixed sampling needs a degrees-typical structure and m_bar")
            if math.isqrt(m_bar) < 1 or gamma_bar * gamma_bar > m_bar:
                raise ValueError("need 1 <= gamma_bar <= sqrt(m_bar)")
            if D.gamma_bar != gamma_bar:
                raise ValueError("structure was built for a different gamma_bar")
            self.constants = normalization_constants(n, motif, gamma_bar, m_bar, nominal_constant=nominal_constant)
            if branch == "mixed":
                mode, c1 = HAM_MIXED, 0.0
            elif branch == "combined":
                mode, c1 = HAM, self.constants.B_low / self.constants.B
            else:
                raise ValueError(f"unknown branch {branch!r}")
        self.motif = motif
        self.profile = prof
        self.gamma_bar = gamma_bar
        self.m_bar = m_bar
        self.low_accept = 1.0 / (prof.h_F * 2 * k)
        ref = {_norm(i, (i + 1) % k) for i in range(k)}
        self._chords = [tuple(c) for c in prof.chord_pairs]
        self._template_chords = [[c for c in t if c not in ref] for t in prof.templates]
        qmax = 3 * k + k * (k - 1) // 2 + 2
        super().__init__(oracle, rng, k, mode, gamma_bar, m_bar, D, c1=c1, qmax=qmax,
                         walker_backend=walker_backend)
        self.branch = branch
        self.n = n

    @property
    def B(self):
        """Inverse per-copy success probability of this sampler's branch."""
        if self.branch == "low":
            return self.n * self.gamma_bar ** (self.k - 1) * self.profile.kappa_F
        c = self.constants
        return c.B_mixed if self.branch == "mixed" else c.B

    def _finish(self):
        seq = self.seq.tolist()
        degs = self.deg.tolist()
        branch = int(self.counters[BRANCH])
        oracle = self.oracle
        present = {c for c in self._chords if oracle.pair(seq[c[0]], seq[c[1]])}
        avail = [i for i, tc in enumerate(self._template_chords) if all(c in present for c in tc)]
        j = self.rng.integer(self.profile.kappa_F)
        name = BRANCH_NAMES[branch]
        if j >= len(avail):
            return None, REASONS[NO_COPY], name
        ti = avail[j]
        if branch == LOW:
            p = self.low_accept
        else:
            nu = sum(nu_of_cycle([degs[x] for x in cyc], self.gamma_bar, self.m_bar)
                     for cyc in self.profile.template_cycles[ti])
            if nu < 1:
                raise AssertionError("walked cover is not counted by nu")
            p = 1.0 / nu
        if not self.rng.bernoulli(p):
            return None, REASONS[REJECTION], name
        edges = frozenset(_norm(seq[a], seq[b]) for a, b in self.profile.templates[ti])
        return CopyRecord(tuple(seq), edges, tuple(seq)), None, name


class VertexSampler(AttemptEngine):
    """Degree-proportional medium/high vertex draws from a degrees-typical structure."""

    def __init__(self, oracle: QueryOracle, D: DegreesTypicalStructure, rng, *, walker_backend: str | None = None):
        super().__init__(oracle, rng, 1, VERTEX, D.gamma_bar, D.m_bar, D, qmax=2,
                         walker_backend=walker_backend)

    def _finish(self):
        return int(self.seq[0]), None, "mixed"

    def attempt(self) -> AttemptOutcome:
        before = self.oracle.ledger.snapshot()
        reasons_before = self.reasons.copy()
        status, _ = self._walk(1)
        if status:
            return AttemptOutcome(None, None, self.oracle.ledger.snapshot() - before, "mixed", int(self.seq[0]))
        reason = next(iter((self.reasons - reasons_before).keys()))
        return AttemptOutcome(None, reason, self.oracle.ledger.snapshot() - before)

    def frequencies(self, calls: int) -> tuple[Counter, int]:
        """Counts of returned vertices over ``calls`` draws."""
        counts = Counter()
        done = 0
        while done < calls:
            status, used = self._walk(calls - done)
            done += used
            if status:
                counts[int(self.seq[0])] += 1
        return counts, done


# single-attempt entry points

def sample_low_copy(oracle: QueryOracle, motif: Motif, gamma_bar: int, rng) -> AttemptOutcome:
    return HamiltonianSampler(oracle, motif, gamma_bar, None, None, rng, branch="low").attempt()


def sample_mixed_copy(oracle: QueryOracle, motif: Motif, gamma_bar: int, m_bar: int,
                      D: DegreesTypicalStructure, rng) -> AttemptOutcome:
    return HamiltonianSampler(oracle, motif, gamma_bar, m_bar, D, rng, branch="mixed").attempt()


def sample_with_estimate(oracle: QueryOracle, n: int, motif: Motif, gamma_bar: int, m_bar: int,
                         D: DegreesTypicalStructure, rng) -> AttemptOutcome:
    return HamiltonianSampler(oracle, motif, gamma_bar, m_bar, D, rng, n=n).attempt()
