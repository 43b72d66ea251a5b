"""Alias tables (Vose's method) for constant-time discrete sampling."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .rng import RandomStream


@dataclass(frozen=True)
class AliasTable:
    prob: np.ndarray     # per-slot keep threshold in [0, 1]
    alias: np.ndarray    # per-slot fallback index
    weights: np.ndarray  # original weights, kept for audit

    @property
    def size(self) -> int:
        return int(self.prob.size)

    def probabilities(self) -> np.ndarray:
        """Per-index probability implied by the table."""
        q = self.size
        out = self.prob / q
        np.add.at(out, self.alias, (1.0 - self.prob) / q)
        return out


def _is_integral(w: np.ndarray) -> bool:
    return np.issubdtype(w.dtype, np.integer) or bool(np.all(np.floor(w) == w) and np.all(w < 2.0 ** 53))


def build_alias(weights) -> AliasTable:
    """Build a table in one pass over small/large worklists.

    Integer weights are handled with exact rational arithmetic; real weights
    are normalized with a compensated sum and any rounding residue is given
    to the largest-weight slot.
    """
    w = np.asarray(weights)
    if w.ndim != 1 or w.size == 0:
        raise ValueError("weights must be a non-empty 1-d sequence")
    wf = w.astype(np.float64)
    if not np.all(np.isfinite(wf)) or np.any(wf < 0):
        raise ValueError("weights must be finite and non-negative")
    if not np.any(wf > 0):
        raise ValueError("at least one weight must be positive")
    q = w.size
    if _is_integral(wf):
        vals = [int(x) for x in w.tolist()]
        total = sum(vals)
        scaled = [Fraction(x * q, total) for x in vals]
    else:
        vals = wf.tolist()
        total = math.fsum(vals)
        scaled = [x * q / total for x in vals]
        residue = q - math.fsum(scaled)
        scaled[int(np.argmax(wf))] += residue
    prob = [0.0] * q
    alias = list(range(q))
    small = [i for i in range(q) if scaled[i] < 1]
    large = [i for i in range(q) if scaled[i] >= 1]
    while small and large:
        s = small.pop()
        g = large[-1]
        prob[s] = float(scaled[s])
        alias[s] = g
        scaled[g] = (scaled[g] + scaled[s]) - 1
        if scaled[g] < 1:
            large.pop()
            small.append(g)
    top = int(np.argmax(wf))
    for i in large + small:
        # leftovers are within rounding of 1; zero-weight slots must stay unreachable
        prob[i] = 1.0 if wf[i] > 0 else 0.0
        alias[i] = i if wf[i] > 0 else top
    return AliasTable(np.array(prob, dtype=np.float64), np.array(alias, dtype=np.int64), w.copy())


def draw(table: AliasTable, rng: RandomStream) -> int:
    """One uniform slot draw plus one uniform real."""
    slot = rng.integer(table.size)
    if rng.uniform() < table.prob[slot]:
        return slot
    return int(table.alias[slot])
