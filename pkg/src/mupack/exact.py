"""Ground truth for small instances, plus a plain greedy baseline."""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .errors import GroundSetTooLarge
from .instance import FEASIBILITY_TOL, PackingInstance, is_feasible
from .mu_solver import Solution
from .objective import SubmodularObjective

MAX_BRUTE_FORCE_N = 24
_CHUNK_BITS = 15
# batch values are recomputed exactly for every subset this close to the batch maximum
_TIE_WINDOW = 1e-9


@dataclass(frozen=True)
class ExactResult:
    optimum_value: float
    optimum_set: frozenset
    subsets_examined: int


def _mask_bits(masks: np.ndarray, n: int) -> np.ndarray:
    return ((masks[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(bool)


def brute_force(inst: PackingInstance, obj: SubmodularObjective) -> ExactResult:
    """Maximize ``obj`` over all feasible subsets by enumeration.

    Subsets are screened in vectorized chunks; all near-maximal ones are then
    re-evaluated with the exact oracle, and ties go to the lexicographically
    smallest sorted index tuple.
    """
    n = inst.n
    if n > MAX_BRUTE_FORCE_N:
        raise GroundSetTooLarge(f"brute force is limited to n <= {MAX_BRUTE_FORCE_N}, got {n}")
    total = 1 << n
    chunk = 1 << min(n, _CHUNK_BITS)
    cap = inst.b + FEASIBILITY_TOL
    best = -np.inf
    candidates: list[np.ndarray] = []
    for start in range(0, total, chunk):
        masks = np.arange(start, min(start + chunk, total), dtype=np.int64)
        bits = _mask_bits(masks, n)
        ok = np.all(bits @ inst.a.T <= cap, axis=1)
        if not ok.any():
            continue
        masks, bits = masks[ok], bits[ok]
        vals = obj.value_masks(bits)
        best = max(best, float(vals.max()))
        window = best - _TIE_WINDOW * max(1.0, abs(best))
        candidates = [c for c in candidates if c[1] >= window]
        sel = vals >= window
        candidates.extend(zip(masks[sel].tolist(), vals[sel].tolist()))

    best_value, best_key = -np.inf, None
    for mask, _ in candidates:
        members = tuple(j for j in range(n) if mask >> j & 1)
        if not is_feasible(inst, members):
            continue
        v = obj.value(members)
        if v > best_value or (v == best_value and members < best_key):
            best_value, best_key = v, members
    return ExactResult(float(best_value), frozenset(best_key), total)


def plain_greedy(inst: PackingInstance, obj: SubmodularObjective) -> Solution:
    """Add the largest-marginal element that still fits until none helps.

    Baseline only: no weights, just a feasibility test before each addition.
    """
    calls0 = obj.calls
    cols = inst.columns
    cap = inst.b + FEASIBILITY_TOL
    load = np.zeros(inst.m)
    heap = []
    for j in range(inst.n):
        fv = obj.value((j,))
        heap.append((-max(fv, 0.0), j, 0, fv))
    heapq.heapify(heap)
    chosen: list[int] = []
    f_cur = 0.0
    while heap:
        neg, j, ver, fv = heapq.heappop(heap)
        rows, vals = cols[j]
        if np.any(load[rows] + vals > cap[rows]):
            continue  # loads only grow, so j never fits again
        if ver != len(chosen):
            fv = obj.value(chosen + [j])
            neg = -max(fv - f_cur, 0.0)
            if heap and (neg, j) > heap[0][:2]:
                heapq.heappush(heap, (neg, j, len(chosen), fv))
                continue
        if neg >= 0:
            break
        chosen.append(j)
        f_cur = fv
        load[rows] += vals
    return Solution(frozenset(chosen), f_cur, is_feasible(inst, chosen), obj.calls - calls0)
