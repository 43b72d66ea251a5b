# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled walker: the random-walk phase of every attempted sampler.

Draw-for-draw twin of ``_walk_py.Walker``; see that module for the contract.
"""
from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.math cimport sqrt
from libc.stdint cimport int64_t, uint64_t
from numpy.random cimport bitgen_t

import math

from ._walkdefs import (ATTEMPTS, BRANCH, COMPOSITION, DEGREE_Q, NEIGHBOR_Q, PAIR_Q,
                        REASON_BASE, UNIFORM_D)

BACKEND = "cython"

cdef enum:
    MAXK = 16

# walk modes (values match _walkdefs)
cdef enum:
    HAM = 0
    HAM_LOW = 1
    HAM_MIXED = 2
    CLIQUE = 3
    CLIQUE_LOW = 4
    CLIQUE_MEDIUM = 5
    CLIQUE_HIGH = 6
    STAR = 7
    STAR_LOW = 8
    STAR_NONLOW = 9
    VERTEX = 10

# failure reasons
cdef enum:
    UNIFORM_MISS = 0
    DEGREE_CLASS = 1
    NEIGHBOR_MISS = 2
    DUPLICATE = 3
    NOT_A_CYCLE = 4
    NO_COPY = 5
    REJECTION = 6

cdef enum:
    LOW = 0
    MID = 1
    HIGH = 2

cdef double INV53 = 1.0 / 9007199254740992.0


cdef inline uint64_t rand_int(bitgen_t* bg, uint64_t n) noexcept nogil:
    cdef uint64_t rem = (<uint64_t>0 - n) % n
    cdef uint64_t x
    while True:
        x = bg.next_uint64(bg.state)
        if rem == 0 or x < (<uint64_t>0 - rem):
            return x % n


cdef inline double rand_unif(bitgen_t* bg) noexcept nogil:
    return (bg.next_uint64(bg.state) >> 11) * INV53


cdef class Walker:
    cdef const int64_t[::1] ptr
    cdef const int64_t[::1] ind
    cdef const int64_t[::1] deg
    cdef const int64_t[::1] sup
    cdef const int64_t[::1] sdeg
    cdef const int64_t[::1] salias
    cdef const double[::1] sprob
    cdef object bitgen
    cdef bitgen_t* rng
    cdef int64_t n, k, gamma, m_bar, R, dmax, q, mode
    cdef double sqrt_m, c1, c2, p_hit
    cdef int64_t seq[MAXK]
    cdef int64_t dseq[MAXK]
    cdef int64_t nd, nn, npair, nu, branch, comp, last_deg
    cdef int64_t reasons[7]

    def __init__(self, graph, int mode, int k, int64_t gamma, int64_t m_bar, int64_t dmax,
                 double c1, double c2, support, sdeg, sprob, salias, double p_hit, bitgen):
        import numpy as np
        cdef int i
        if k > MAXK or k < 1:
            raise ValueError("unsupported motif size")
        self.ptr = np.ascontiguousarray(graph.indptr, dtype=np.int64)
        self.ind = np.ascontiguousarray(graph.indices, dtype=np.int64)
        self.deg = np.ascontiguousarray(graph.degrees, dtype=np.int64)
        self.sup = np.ascontiguousarray(support, dtype=np.int64)
        self.sdeg = np.ascontiguousarray(sdeg, dtype=np.int64)
        self.sprob = np.ascontiguousarray(sprob, dtype=np.float64)
        self.salias = np.ascontiguousarray(salias, dtype=np.int64)
        self.q = self.sup.shape[0]
        self.n = graph.n
        self.mode = mode
        self.k = k
        self.gamma = gamma
        self.m_bar = m_bar
        self.R = math.isqrt(m_bar)
        self.sqrt_m = sqrt(<double>m_bar)
        self.dmax = dmax
        self.c1 = c1
        self.c2 = c2
        self.p_hit = p_hit
        self.bitgen = bitgen
        self.rng = <bitgen_t*> PyCapsule_GetPointer(bitgen.capsule, "BitGenerator")
        self.nd = self.nn = self.npair = self.nu = 0
        for i in range(7):
            self.reasons[i] = 0
        self.branch = 0
        self.comp = 0

    def run(self, int64_t max_attempts, int64_t[::1] out_seq, int64_t[::1] out_deg,
            int64_t[::1] counters):
        cdef int64_t att = 0
        cdef int status = 0
        cdef int r, i
        while att < max_attempts:
            att += 1
            r = self.attempt()
            if r < 0:
                status = 1
                break
            self.reasons[r] += 1
        counters[ATTEMPTS] += att
        counters[DEGREE_Q] += self.nd
        counters[NEIGHBOR_Q] += self.nn
        counters[PAIR_Q] += self.npair
        counters[UNIFORM_D] += self.nu
        for i in range(7):
            counters[REASON_BASE + i] += self.reasons[i]
            self.reasons[i] = 0
        self.nd = self.nn = self.npair = self.nu = 0
        if status:
            for i in range(self.k):
                out_seq[i] = self.seq[i]
                out_deg[i] = self.dseq[i]
            counters[BRANCH] = self.branch
            counters[COMPOSITION] = self.comp
        return status

    cdef int attempt(self) noexcept nogil:
        cdef double u
        if self.mode == HAM:
            if rand_unif(self.rng) < self.c1:
                return self.ham_low()
            return self.ham_mixed()
        elif self.mode == HAM_LOW:
            return self.ham_low()
        elif self.mode == HAM_MIXED:
            return self.ham_mixed()
        elif self.mode == CLIQUE:
            u = rand_unif(self.rng)
            if u < self.c1:
                return self.clique_low()
            if u < self.c2:
                return self.clique_medium()
            return self.clique_high()
        elif self.mode == CLIQUE_LOW:
            return self.clique_low()
        elif self.mode == CLIQUE_MEDIUM:
            return self.clique_medium()
        elif self.mode == CLIQUE_HIGH:
            return self.clique_high()
        elif self.mode == STAR:
            if rand_unif(self.rng) < self.c1:
                return self.star_low()
            return self.star_nonlow()
        elif self.mode == STAR_LOW:
            return self.star_low()
        elif self.mode == STAR_NONLOW:
            return self.star_nonlow()
        return self.vertex()

    # shared pieces
    cdef inline bint adjacent(self, int64_t u, int64_t v) noexcept nogil:
        cdef int64_t lo = self.ptr[u]
        cdef int64_t hi = self.ptr[u + 1]
        cdef int64_t mid, x
        while lo < hi:
            mid = (lo + hi) >> 1
            x = self.ind[mid]
            if x == v:
                return True
            if x < v:
                lo = mid + 1
            else:
                hi = mid
        return False

    cdef inline int64_t draw_mh(self) noexcept nogil:
        cdef int64_t slot, u, v, dv, j
        if not (rand_unif(self.rng) < self.p_hit):
            return -1 - UNIFORM_MISS
        slot = <int64_t>rand_int(self.rng, <uint64_t>self.q)
        if not (rand_unif(self.rng) < self.sprob[slot]):
            slot = self.salias[slot]
        u = self.sup[slot]
        j = <int64_t>rand_int(self.rng, <uint64_t>self.sdeg[slot])
        v = self.ind[self.ptr[u] + j]
        self.nn += 1
        dv = self.deg[v]
        self.nd += 1
        if dv <= self.gamma:
            return -1 - DEGREE_CLASS
        self.last_deg = dv
        return v

    cdef inline bint distinct(self, int lo) noexcept nogil:
        cdef int a, b
        for a in range(lo, self.k):
            for b in range(a + 1, self.k):
                if self.seq[a] == self.seq[b]:
                    return False
        return True

    cdef inline bint clique_pairs(self, int lo) noexcept nogil:
        cdef int a, b
        for a in range(lo, self.k):
            for b in range(a + 1, self.k):
                self.npair += 1
                if not self.adjacent(self.seq[a], self.seq[b]):
                    return False
        return True

    cdef inline bint ordered(self, int lo) noexcept nogil:
        cdef int y
        for y in range(lo + 1, self.k):
            if self.dseq[y - 1] > self.dseq[y]:
                return False
            if self.dseq[y - 1] == self.dseq[y] and self.seq[y - 1] >= self.seq[y]:
                return False
        return True

    cdef inline void query_degrees(self, int lo) noexcept nogil:
        cdef int y
        for y in range(lo, self.k):
            self.dseq[y] = self.deg[self.seq[y]]
        self.nd += self.k - lo

    cdef inline int low_star_walk(self) noexcept nogil:
        cdef int64_t v, d1, base, j
        cdef int y
        v = <int64_t>rand_int(self.rng, <uint64_t>self.n)
        self.nu += 1
        d1 = self.deg[v]
        self.nd += 1
        if d1 > self.gamma:
            return DEGREE_CLASS
        self.seq[0] = v
        self.dseq[0] = d1
        base = self.ptr[v]
        for y in range(1, self.k):
            j = <int64_t>rand_int(self.rng, <uint64_t>self.gamma)
            if j >= d1:
                return NEIGHBOR_MISS
            self.seq[y] = self.ind[base + j]
            self.nn += 1
        return -1

    # Hamiltonian motifs
    cdef int ham_low(self) noexcept nogil:
        cdef int64_t v, dv, w, dw, j
        cdef int i
        v = <int64_t>rand_int(self.rng, <uint64_t>self.n)
        self.nu += 1
        dv = self.deg[v]
        self.nd += 1
        if dv > self.gamma:
            return DEGREE_CLASS
        self.seq[0] = v
        self.dseq[0] = dv
        for i in range(1, self.k):
            j = <int64_t>rand_int(self.rng, <uint64_t>self.gamma)
            if j >= dv:
                return NEIGHBOR_MISS
            w = self.ind[self.ptr[v] + j]
            self.nn += 1
            dw = self.deg[w]
            self.nd += 1
            if dw > self.gamma:
                return DEGREE_CLASS
            self.seq[i] = w
            self.dseq[i] = dw
            v = w
            dv = dw
        if not self.distinct(0):
            return DUPLICATE
        self.npair += 1
        if not self.adjacent(self.seq[self.k - 1], self.seq[0]):
            return NOT_A_CYCLE
        self.branch = LOW
        self.comp = 0
        return -1

    cdef int ham_mixed(self) noexcept nogil:
        cdef int64_t mask, v, dv, w, dw, j
        cdef int pos, end, y, b
        cdef int k = <int>self.k
        mask = <int64_t>rand_int(self.rng, (<uint64_t>1) << (k - 1))
        pos = 0
        while pos < k:
            end = pos
            while end < k - 1 and not ((mask >> end) & 1):
                end += 1
            v = self.draw_mh()
            if v < 0:
                return <int>(-1 - v)
            dv = self.last_deg
            self.seq[pos] = v
            self.dseq[pos] = dv
            if end == pos:
                if dv * dv <= self.m_bar:
                    return DEGREE_CLASS
                if not (rand_unif(self.rng) < self.sqrt_m / <double>dv):
                    return REJECTION
            else:
                j = <int64_t>rand_int(self.rng, <uint64_t>dv)
                w = self.ind[self.ptr[v] + j]
                self.nn += 1
                dw = self.deg[w]
                self.nd += 1
                if dw * dw > self.m_bar:
                    return DEGREE_CLASS
                if not (rand_unif(self.rng) < 0.5):
                    return REJECTION
                self.seq[pos + 1] = w
                self.dseq[pos + 1] = dw
                for y in range(pos + 2, end + 1):
                    j = <int64_t>rand_int(self.rng, <uint64_t>self.R)
                    if j >= dw:
                        return NEIGHBOR_MISS
                    w = self.ind[self.ptr[w] + j]
                    self.nn += 1
                    dw = self.deg[w]
                    self.nd += 1
                    if dw * dw > self.m_bar:
                        return DEGREE_CLASS
                    if not (rand_unif(self.rng) < 0.5):
                        return REJECTION
                    self.seq[y] = w
                    self.dseq[y] = dw
            pos = end + 1
        if not self.distinct(0):
            return DUPLICATE
        for b in range(k - 1):
            if (mask >> b) & 1:
                self.npair += 1
                if not self.adjacent(self.seq[b], self.seq[b + 1]):
                    return NOT_A_CYCLE
        self.npair += 1
        if not self.adjacent(self.seq[k - 1], self.seq[0]):
            return NOT_A_CYCLE
        self.branch = MID
        self.comp = mask
        return -1

    # cliques
    cdef int clique_low(self) noexcept nogil:
        cdef int r = self.low_star_walk()
        if r >= 0:
            return r
        if not self.distinct(0):
            return DUPLICATE
        if not self.clique_pairs(1):
            return NO_COPY
        self.query_degrees(1)
        if not self.ordered(0):
            return DEGREE_CLASS
        self.branch = LOW
        return -1

    cdef int clique_medium(self) noexcept nogil:
        cdef int64_t v, d1, base, j
        cdef int y
        v = self.draw_mh()
        if v < 0:
            return <int>(-1 - v)
        d1 = self.last_deg
        if d1 * d1 > self.m_bar:
            return DEGREE_CLASS
        self.seq[0] = v
        self.dseq[0] = d1
        base = self.ptr[v]
        self.seq[1] = self.ind[base + <int64_t>rand_int(self.rng, <uint64_t>d1)]
        self.nn += 1
        for y in range(2, self.k):
            j = <int64_t>rand_int(self.rng, <uint64_t>self.R)
            if j >= d1:
                return NEIGHBOR_MISS
            self.seq[y] = self.ind[base + j]
            self.nn += 1
        if not self.distinct(0):
            return DUPLICATE
        if not self.clique_pairs(1):
            return NO_COPY
        self.query_degrees(1)
        if not self.ordered(0):
            return DEGREE_CLASS
        self.branch = MID
        return -1

    cdef int clique_high(self) noexcept nogil:
        cdef int64_t v, dv
        cdef int i
        for i in range(self.k):
            v = self.draw_mh()
            if v < 0:
                return <int>(-1 - v)
            dv = self.last_deg
            if dv * dv <= self.m_bar:
                return DEGREE_CLASS
            if not (rand_unif(self.rng) < self.sqrt_m / <double>dv):
                return REJECTION
            self.seq[i] = v
            self.dseq[i] = dv
        if not self.distinct(0):
            return DUPLICATE
        if not self.clique_pairs(0):
            return NO_COPY
        if not self.ordered(0):
            return DEGREE_CLASS
        self.branch = HIGH
        return -1

    # stars
    cdef int star_low(self) noexcept nogil:
        cdef int r = self.low_star_walk()
        if r >= 0:
            return r
        if not self.distinct(0):
            return DUPLICATE
        self.query_degrees(1)
        if not self.ordered(1):
            return DEGREE_CLASS
        self.branch = LOW
        return -1

    cdef int star_nonlow(self) noexcept nogil:
        cdef int64_t v, d1, base, j
        cdef int y
        v = self.draw_mh()
        if v < 0:
            return <int>(-1 - v)
        d1 = self.last_deg
        if d1 > self.dmax:
            return DEGREE_CLASS
        self.seq[0] = v
        self.dseq[0] = d1
        base = self.ptr[v]
        self.seq[1] = self.ind[base + <int64_t>rand_int(self.rng, <uint64_t>d1)]
        self.nn += 1
        for y in range(2, self.k):
            j = <int64_t>rand_int(self.rng, <uint64_t>self.dmax)
            if j >= d1:
                return NEIGHBOR_MISS
            self.seq[y] = self.ind[base + j]
            self.nn += 1
        if not self.distinct(0):
            return DUPLICATE
        self.query_degrees(1)
        if not self.ordered(1):
            return DEGREE_CLASS
        self.branch = MID
        return -1

    cdef int vertex(self) noexcept nogil:
        cdef int64_t v = self.draw_mh()
        if v < 0:
            return <int>(-1 - v)
        self.seq[0] = v
        self.dseq[0] = self.last_deg
        self.branch = MID
        return -1
