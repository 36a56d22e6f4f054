"""Multiplicative updates for binary k-column-sparse packing constraints.

Elements are considered once each, in greedy order (largest marginal value
first).  An element joins the solution only if ``sum_i a_ij w_i < lam - 1``,
where ``w_i = lam ** (load_i / b_i) - 1``; the default update factor is
``k + 1``.  A row at full capacity has ``w_i = lam - 1`` exactly, so no
accepted element can overflow it.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import asdict, dataclass
from typing import Iterable

import numpy as np

from .errors import InvalidLambda
from .instance import BinaryPackingInstance, PackingInstance, is_feasible, width_or_inf
from .mu_solver import Solution
from .objective import SubmodularObjective

ACCEPTED = "accepted"
REJECTED = "rejected"
ZERO_MARGINAL = "zero-marginal"


@dataclass(frozen=True)
class SparseStep:
    element: int
    marginal: float
    threshold_sum: float
    decision: str
    chosen_count: int
    weight_sum: float


@dataclass(frozen=True)
class SparseTrace:
    """Consideration order with per-step decisions.

    ``chosen_count`` and ``weight_sum`` (``sum_i b_i w_i``) are taken after
    the step.
    """

    lam: float
    k: int
    width: float
    steps: tuple[SparseStep, ...]
    final_weights: tuple[float, ...]

    @property
    def sequence(self) -> list[int]:
        return [s.element for s in self.steps]

    @property
    def accepted(self) -> list[int]:
        return [s.element for s in self.steps if s.decision == ACCEPTED]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["steps"] = [asdict(s) for s in self.steps]
        d["final_weights"] = list(self.final_weights)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)


def solve_sparse(
    inst: PackingInstance,
    obj: SubmodularObjective,
    lam: float | None = None,
    *,
    skip_zero_marginals: bool = False,
) -> tuple[Solution, SparseTrace]:
    """Column-sparse multiplicative updates.

    Greedy order is evaluated lazily (stale marginals are upper bounds);
    ties go to the lowest index.  With ``skip_zero_marginals`` an element
    whose marginal is 0 when considered is dropped even if it passes the
    weight test.
    """
    inst = BinaryPackingInstance.from_instance(inst)
    if obj.n != inst.n:
        raise ValueError(f"objective has {obj.n} elements but instance has {inst.n}")
    k = inst.k
    if lam is None:
        # k is 0 only for an all-zero matrix, where no threshold can bind
        lam = max(k, 1) + 1.0
    if not (lam > 1 and math.isfinite(lam)):
        raise InvalidLambda(f"update factor must be a finite number > 1, got {lam}")
    n = inst.n
    b = inst.b
    cols = inst.columns
    calls0 = obj.calls
    limit = lam - 1.0

    heap = []
    for j in range(n):
        fv = obj.value((j,))
        heap.append((-max(fv, 0.0), j, 0, fv))
    heapq.heapify(heap)

    w = np.zeros(inst.m)
    load = np.zeros(inst.m)
    chosen: list[int] = []
    f_cur = 0.0
    steps = []
    while heap:
        neg, j, ver, fv = heapq.heappop(heap)
        if ver != len(chosen):
            fv = obj.value(chosen + [j])
            neg = -max(fv - f_cur, 0.0)
            if heap and (neg, j) > heap[0][:2]:
                heapq.heappush(heap, (neg, j, len(chosen), fv))
                continue
        gain = -neg
        rows, vals = cols[j]
        thr = float(vals @ w[rows]) if rows.size else 0.0
        if skip_zero_marginals and gain <= 0:
            decision = ZERO_MARGINAL
        elif thr < limit:
            decision = ACCEPTED
            chosen.append(j)
            f_cur = fv
            if rows.size:
                load[rows] += vals
                w[rows] = lam ** (load[rows] / b[rows]) - 1.0
        else:
            decision = REJECTED
        steps.append(SparseStep(j, gain, thr, decision, len(chosen), float(b @ w)))

    trace = SparseTrace(lam, k, width_or_inf(inst), tuple(steps), tuple(float(x) for x in w))
    sol = Solution(frozenset(chosen), f_cur, is_feasible(inst, chosen), obj.calls - calls0)
    return sol, trace


def theoretical_ratio_sparse(inst: BinaryPackingInstance) -> float:
    """``1 / (2 + 2 W (k+1)^(1/W))`` for the default update factor."""
    inst = BinaryPackingInstance.from_instance(inst)
    w = width_or_inf(inst)
    if math.isinf(w):
        return 0.5
    return 1.0 / (2.0 + 2.0 * w * (inst.k + 1) ** (1.0 / w))


def check_greedy_dominance(trace: SparseTrace, s_star: Iterable[int], alpha: float) -> bool:
    """True iff ``|S & E_t| >= alpha |S* & E_t|`` for every prefix ``E_t`` of the order."""
    s_star = set(s_star)
    accepted = set(trace.accepted)
    in_s = in_star = 0
    for step in trace.steps:
        in_s += step.element in accepted
        in_star += step.element in s_star
        if in_s < alpha * in_star - 1e-12:
            return False
    return True


def greedy_order_violations(trace: SparseTrace, obj: SubmodularObjective, tol: float = 1e-9) -> list[int]:
    """Steps whose element did not have a maximal marginal among the remaining ones.

    Recomputes every remaining marginal from scratch, so it costs
    ``O(n^2)`` oracle calls; meant for audits on small instances.
    """
    accepted = set(trace.accepted)
    remaining = set(range(obj.n))
    prefix: list[int] = []
    base = 0.0
    bad = []
    for t, step in enumerate(trace.steps):
        gains = {j: max(obj.value(prefix + [j]) - base, 0.0) for j in remaining}
        if gains[step.element] < max(gains.values()) - tol:
            bad.append(t)
        remaining.discard(step.element)
        if step.element in accepted:
            prefix.append(step.element)
            base = obj.value(prefix)
    return bad
