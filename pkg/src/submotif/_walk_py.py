"""Pure-Python walker: the random-walk phase of every attempted sampler.

Mirrors ``_walk.pyx`` draw for draw. ``run`` performs attempts until one
produces a candidate (returns 1) or ``max_attempts`` are spent (returns 0).
For clique, star and vertex modes a candidate is a finished sample; for the
Hamiltonian modes it is a verified cycle that still needs copy selection and
the acceptance coin, done by the caller.
"""
from __future__ import annotations

import math

from ._walkdefs import (ATTEMPTS, BRANCH, CLIQUE, CLIQUE_HIGH, CLIQUE_LOW, CLIQUE_MEDIUM,
                        COMPOSITION, DEGREE_CLASS, DEGREE_Q, DUPLICATE, HAM, HAM_LOW, HAM_MIXED,
                        HIGH, LOW, MID, NEIGHBOR_MISS, NEIGHBOR_Q, NO_COPY, NOT_A_CYCLE, PAIR_Q,
                        REASON_BASE, REJECTION, STAR, STAR_LOW, STAR_NONLOW, UNIFORM_D,
                        UNIFORM_MISS, VERTEX)

_TWO64 = 1 << 64
_INV53 = 1.0 / 9007199254740992.0

BACKEND = "python"


class Walker:
    def __init__(self, graph, mode: int, k: int, gamma: int, m_bar: int, dmax: int,
                 c1: float, c2: float, support, sdeg, sprob, salias, p_hit: float, bitgen):
        self.ptr, self.ind, self.deg = graph.lists()
        self.sets = graph.neighbor_sets
        self.n = graph.n
        self.mode = int(mode)
        self.k = int(k)
        self.gamma = int(gamma)
        self.m_bar = int(m_bar)
        self.R = math.isqrt(self.m_bar)
        self.sqrt_m = math.sqrt(self.m_bar)
        self.dmax = int(dmax)
        self.c1 = float(c1)
        self.c2 = float(c2)
        self.sup = [int(x) for x in support]
        self.sdeg = [int(x) for x in sdeg]
        self.sprob = [float(x) for x in sprob]
        self.salias = [int(x) for x in salias]
        self.q = len(self.sup)
        self.p_hit = float(p_hit)
        self._raw = bitgen.random_raw
        self.seq = [0] * self.k
        self.dseq = [0] * self.k
        self.nd = self.nn = self.np = self.nu = 0
        self.reasons = [0] * 7
        self.branch = 0
        self.comp = 0
        self._last_deg = 0
        self._attempt = {
            HAM: self._ham, HAM_LOW: self._ham_low, HAM_MIXED: self._ham_mixed,
            CLIQUE: self._clique, CLIQUE_LOW: self._clique_low,
            CLIQUE_MEDIUM: self._clique_medium, CLIQUE_HIGH: self._clique_high,
            STAR: self._star, STAR_LOW: self._star_low, STAR_NONLOW: self._star_nonlow,
            VERTEX: self._vertex,
        }[self.mode]

    # random primitives (identical arithmetic to the compiled kernel)
    def _integer(self, n: int) -> int:
        limit = _TWO64 - _TWO64 % n
        raw = self._raw
        while True:
            x = raw()
            if x < limit:
                return x % n

    def _bernoulli(self, p: float) -> bool:
        return (self._raw() >> 11) * _INV53 < p

    def _choose3(self, c1: float, c2: float) -> int:
        u = (self._raw() >> 11) * _INV53
        return 0 if u < c1 else (1 if u < c2 else 2)

    # driver
    def run(self, max_attempts: int, out_seq, out_deg, counters) -> int:
        att = 0
        status = 0
        attempt = self._attempt
        reasons = self.reasons
        while att < max_attempts:
            att += 1
            r = attempt()
            if r < 0:
                status = 1
                break
            reasons[r] += 1
        counters[ATTEMPTS] += att
        counters[DEGREE_Q] += self.nd
        counters[NEIGHBOR_Q] += self.nn
        counters[PAIR_Q] += self.np
        counters[UNIFORM_D] += self.nu
        for i in range(7):
            counters[REASON_BASE + i] += reasons[i]
            reasons[i] = 0
        self.nd = self.nn = self.np = self.nu = 0
        if status:
            for i in range(self.k):
                out_seq[i] = self.seq[i]
                out_deg[i] = self.dseq[i]
            counters[BRANCH] = self.branch
            counters[COMPOSITION] = self.comp
        return status

    # shared pieces
    def _draw_mh(self) -> int:
        """Degree-proportional draw from the structure, then a uniform neighbor step."""
        if not self._bernoulli(self.p_hit):
            return -1 - UNIFORM_MISS
        slot = self._integer(self.q)
        if not self._bernoulli(self.sprob[slot]):
            slot = self.salias[slot]
        u = self.sup[slot]
        j = self._integer(self.sdeg[slot])
        v = self.ind[self.ptr[u] + j]
        self.nn += 1
        dv = self.deg[v]
        self.nd += 1
        if dv <= self.gamma:
            return -1 - DEGREE_CLASS
        self._last_deg = dv
        return v

    def _distinct(self, lo: int = 0) -> bool:
        s = self.seq
        return len(set(s[lo:])) == self.k - lo

    def _clique_pairs(self, lo: int) -> bool:
        s = self.seq
        sets = self.sets
        for a in range(lo, self.k):
            sa = sets[s[a]]
            for b in range(a + 1, self.k):
                self.np += 1
                if s[b] not in sa:
                    return False
        return True

    def _ordered(self, lo: int) -> bool:
        s, d = self.seq, self.dseq
        for y in range(lo + 1, self.k):
            if (d[y - 1], s[y - 1]) >= (d[y], s[y]):
                return False
        return True

    def _query_degrees(self, lo: int) -> None:
        deg = self.deg
        for y in range(lo, self.k):
            self.dseq[y] = deg[self.seq[y]]
        self.nd += self.k - lo

    def _low_star_walk(self) -> int:
        """Uniform v1 with d <= gamma, then k-1 index draws from [gamma] off v1."""
        v = self._integer(self.n)
        self.nu += 1
        d1 = self.deg[v]
        self.nd += 1
        if d1 > self.gamma:
            return DEGREE_CLASS
        self.seq[0] = v
        self.dseq[0] = d1
        base = self.ptr[v]
        for y in range(1, self.k):
            j = self._integer(self.gamma)
            if j >= d1:
                return NEIGHBOR_MISS
            self.seq[y] = self.ind[base + j]
            self.nn += 1
        return -1

    # Hamiltonian motifs
    def _ham(self) -> int:
        if self._bernoulli(self.c1):
            return self._ham_low()
        return self._ham_mixed()

    def _ham_low(self) -> int:
        k, g = self.k, self.gamma
        ptr, ind, deg = self.ptr, self.ind, self.deg
        seq, dseq = self.seq, self.dseq
        v = self._integer(self.n)
        self.nu += 1
        dv = deg[v]
        self.nd += 1
        if dv > g:
            return DEGREE_CLASS
        seq[0] = v
        dseq[0] = dv
        for i in range(1, k):
            j = self._integer(g)
            if j >= dv:
                return NEIGHBOR_MISS
            w = ind[ptr[v] + j]
            self.nn += 1
            dw = deg[w]
            self.nd += 1
            if dw > g:
                return DEGREE_CLASS
            seq[i] = w
            dseq[i] = dw
            v, dv = w, dw
        if not self._distinct():
            return DUPLICATE
        self.np += 1
        if seq[0] not in self.sets[seq[k - 1]]:
            return NOT_A_CYCLE
        self.branch = LOW
        self.comp = 0
        return -1

    def _ham_mixed(self) -> int:
        k = self.k
        ptr, ind, deg = self.ptr, self.ind, self.deg
        seq, dseq = self.seq, self.dseq
        m_bar, R = self.m_bar, self.R
        mask = self._integer(1 << (k - 1))
        pos = 0
        while pos < k:
            end = pos
            while end < k - 1 and not (mask >> end) & 1:
                end += 1
            v = self._draw_mh()
            if v < 0:
                return -1 - v
            dv = self._last_deg
            seq[pos] = v
            dseq[pos] = dv
            if end == pos:
                if dv * dv <= m_bar:
                    return DEGREE_CLASS
                if not self._bernoulli(self.sqrt_m / dv):
                    return REJECTION
            else:
                j = self._integer(dv)
                w = ind[ptr[v] + j]
                self.nn += 1
                dw = deg[w]
                self.nd += 1
                if dw * dw > m_bar:
                    return DEGREE_CLASS
                if not self._bernoulli(0.5):
                    return REJECTION
                seq[pos + 1] = w
                dseq[pos + 1] = dw
                for y in range(pos + 2, end + 1):
                    j = self._integer(R)
                    if j >= dw:
                        return NEIGHBOR_MISS
                    w = ind[ptr[w] + j]
                    self.nn += 1
                    dw = deg[w]
                    self.nd += 1
                    if dw * dw > m_bar:
                        return DEGREE_CLASS
                    if not self._bernoulli(0.5):
                        return REJECTION
                    seq[y] = w
                    dseq[y] = dw
            pos = end + 1
        if not self._distinct():
            return DUPLICATE
        sets = self.sets
        for b in range(k - 1):
            if (mask >> b) & 1:
                self.np += 1
                if seq[b + 1] not in sets[seq[b]]:
                    return NOT_A_CYCLE
        self.np += 1
        if seq[0] not in sets[seq[k - 1]]:
            return NOT_A_CYCLE
        self.branch = MID
        self.comp = mask
        return -1

    # cliques
    def _clique(self) -> int:
        b = self._choose3(self.c1, self.c2)
        if b == 0:
            return self._clique_low()
        if b == 1:
            return self._clique_medium()
        return self._clique_high()

    def _clique_low(self) -> int:
        r = self._low_star_walk()
        if r >= 0:
            return r
        if not self._distinct():
            return DUPLICATE
        if not self._clique_pairs(1):
            return NO_COPY
        self._query_degrees(1)
        if not self._ordered(0):
            return DEGREE_CLASS
        self.branch = LOW
        return -1

    def _clique_medium(self) -> int:
        v = self._draw_mh()
        if v < 0:
            return -1 - v
        d1 = self._last_deg
        if d1 * d1 > self.m_bar:
            return DEGREE_CLASS
        seq = self.seq
        seq[0] = v
        self.dseq[0] = d1
        base = self.ptr[v]
        seq[1] = self.ind[base + self._integer(d1)]
        self.nn += 1
        for y in range(2, self.k):
            j = self._integer(self.R)
            if j >= d1:
                return NEIGHBOR_MISS
            seq[y] = self.ind[base + j]
            self.nn += 1
        if not self._distinct():
            return DUPLICATE
        if not self._clique_pairs(1):
            return NO_COPY
        self._query_degrees(1)
        if not self._ordered(0):
            return DEGREE_CLASS
        self.branch = MID
        return -1

    def _clique_high(self) -> int:
        for i in range(self.k):
            v = self._draw_mh()
            if v < 0:
                return -1 - v
            dv = self._last_deg
            if dv * dv <= self.m_bar:
                return DEGREE_CLASS
            if not self._bernoulli(self.sqrt_m / dv):
                return REJECTION
            self.seq[i] = v
            self.dseq[i] = dv
        if not self._distinct():
            return DUPLICATE
        if not self._clique_pairs(0):
            return NO_COPY
        if not self._ordered(0):
            return DEGREE_CLASS
        self.branch = HIGH
        return -1

    # stars
    def _star(self) -> int:
        if self._bernoulli(self.c1):
            return self._star_low()
        return self._star_nonlow()

    def _star_low(self) -> int:
        r = self._low_star_walk()
        if r >= 0:
            return r
        if not self._distinct():
            return DUPLICATE
        self._query_degrees(1)
        if not self._ordered(1):
            return DEGREE_CLASS
        self.branch = LOW
        return -1

    def _star_nonlow(self) -> int:
        v = self._draw_mh()
        if v < 0:
            return -1 - v
        d1 = self._last_deg
        if d1 > self.dmax:
            return DEGREE_CLASS
        seq = self.seq
        seq[0] = v
        self.dseq[0] = d1
        base = self.ptr[v]
        seq[1] = self.ind[base + self._integer(d1)]
        self.nn += 1
        for y in range(2, self.k):
            j = self._integer(self.dmax)
            if j >= d1:
                return NEIGHBOR_MISS
            seq[y] = self.ind[base + j]
            self.nn += 1
        if not self._distinct():
            return DUPLICATE
        self._query_degrees(1)
        if not self._ordered(1):
            return DEGREE_CLASS
        self.branch = MID
        return -1

    # single medium/high vertex
    def _vertex(self) -> int:
        v = self._draw_mh()
        if v < 0:
            return -1 - v
        self.seq[0] = v
        self.dseq[0] = self._last_deg
        self.branch = MID
        return -1
