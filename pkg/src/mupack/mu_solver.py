"""Multiplicative-updates maximization under ``[0,1]`` packing constraints.

Each constraint ``i`` carries a weight ``w_i``, initially ``1/b_i``.  The
loop repeatedly adds the element minimizing ``sum_i a_ij w_i / f_S(j)`` and
multiplies every ``w_i`` by ``lam ** (a_ij / b_i)``; it stops once
``sum_i b_i w_i`` exceeds ``lam`` or nothing is left.  If the final set is
infeasible, only the last addition broke it, and the better of "everything
but the last element" and "the last element alone" is returned.

Weights are kept as exponents ``u_i = ln(b_i w_i)`` because ``lam`` can be
astronomically large (``e^W m`` for wide instances).  Scores are compared in
log form; the loop guard uses log-sum-exp.

Selection is lazy: weights never decrease and, by submodularity, marginals
never increase, so every element's score is nondecreasing over the run.  A
stale score is therefore a lower bound and the heap minimum only has to be
refreshed, not the whole candidate list.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import InvalidLambda, WidthConditionViolated
from .instance import PackingInstance, is_feasible, width_or_inf
from .objective import SubmodularObjective

THRESHOLD_EXCEEDED = "threshold-exceeded"
GROUND_SET_EXHAUSTED = "ground-set-exhausted"
ZERO_MARGINALS = "zero-marginals"

# full recomputation of row loads, to bound drift of the incremental sums
_RESYNC_EVERY = 64


@dataclass(frozen=True)
class LambdaPolicy:
    """How the update factor is chosen.

    ``general``: ``e^W * m``.  ``large-width``: ``e^(eps * W / 4)``, only on
    instances with ``W >= max(ln m / eps^2, 1 / eps)``.  ``explicit``: a fixed
    value greater than 1.
    """

    kind: str = "general"
    epsilon: float | None = None
    value: float | None = None

    def __post_init__(self):
        if self.kind == "general":
            return
        if self.kind == "large-width":
            if self.epsilon is None or not 0 < self.epsilon <= 0.25:
                raise InvalidLambda(f"large-width epsilon must lie in (0, 1/4], got {self.epsilon}")
        elif self.kind == "explicit":
            if self.value is None or not (self.value > 1 and math.isfinite(self.value)):
                raise InvalidLambda(f"update factor must be a finite number > 1, got {self.value}")
        else:
            raise ValueError(f"unknown lambda policy {self.kind!r}")

    @classmethod
    def general(cls) -> "LambdaPolicy":
        return cls("general")

    @classmethod
    def large_width(cls, epsilon: float) -> "LambdaPolicy":
        return cls("large-width", epsilon=epsilon)

    @classmethod
    def explicit(cls, value: float) -> "LambdaPolicy":
        return cls("explicit", value=value)

    @classmethod
    def parse(cls, text: str, epsilon: float | None = None) -> "LambdaPolicy":
        """Parse ``general``, ``large-width`` or ``explicit:X``."""
        if text == "general":
            return cls.general()
        if text == "large-width":
            return cls.large_width(0.25 if epsilon is None else epsilon)
        if text.startswith("explicit:"):
            try:
                lam = float(text.split(":", 1)[1])
            except ValueError:
                raise InvalidLambda(f"cannot parse update factor from {text!r}") from None
            return cls.explicit(lam)
        raise ValueError(f"unknown lambda policy {text!r}")


def large_width_threshold(m: int, epsilon: float) -> float:
    return max(math.log(m) / epsilon**2, 1 / epsilon)


def resolve_log_lambda(policy: LambdaPolicy, inst: PackingInstance) -> float:
    """``ln(lam)`` for the policy; ``inf`` for presets on an all-zero matrix."""
    if policy.kind == "explicit":
        return math.log(policy.value)
    w = width_or_inf(inst)
    if policy.kind == "general":
        return w + math.log(inst.m)
    need = large_width_threshold(inst.m, policy.epsilon)
    if w < need:
        raise WidthConditionViolated(
            f"width {w:.6g} is below max(ln m / eps^2, 1 / eps) = {need:.6g} for eps={policy.epsilon}"
        )
    return policy.epsilon * w / 4


def resolve_lambda(policy: LambdaPolicy, inst: PackingInstance) -> float:
    """Numeric update factor; may overflow to ``inf`` for very wide instances."""
    if policy.kind != "explicit":
        inst.width  # raises AllZeroMatrix
    try:
        return math.exp(resolve_log_lambda(policy, inst))
    except OverflowError:
        return math.inf


def theoretical_ratio_general(inst: PackingInstance) -> float:
    """Certified ratio ``1 / (2 (e m^(1/W) + 1))`` of the ``e^W m`` preset."""
    return 1.0 / (2.0 * (math.e * inst.m ** (1.0 / width_or_inf(inst)) + 1.0))


def theoretical_ratio_large_width(epsilon: float) -> float:
    return (1 - 4 * epsilon) * (1 - 1 / math.e)


@dataclass(frozen=True)
class Solution:
    chosen: frozenset
    objective_value: float
    feasible: bool
    oracle_calls: int

    def sorted_elements(self) -> list[int]:
        return sorted(self.chosen)


@dataclass(frozen=True)
class Step:
    """One loop iteration: ``element`` joined, the set's value became ``value``.

    ``log_alpha`` is the log of the score that selected the element (weights
    before the update over ``delta``); ``log_weight_sum`` is
    ``ln sum_i b_i w_i`` after the update.
    """

    element: int
    value: float
    delta: float
    log_alpha: float
    log_weight_sum: float

    @property
    def alpha(self) -> float:
        return math.exp(self.log_alpha)

    @property
    def weight_sum(self) -> float:
        try:
            return math.exp(self.log_weight_sum)
        except OverflowError:
            return math.inf


@dataclass(frozen=True)
class SolverTrace:
    variant: str
    log_lambda: float
    log_weight_sum0: float
    steps: tuple[Step, ...]
    termination: str
    final_log_weights: tuple[float, ...]
    postprocess: str

    @property
    def values(self) -> list[float]:
        """``f(S_0), ..., f(S_T)`` of the loop's nested sets."""
        return [0.0] + [s.value for s in self.steps]

    @property
    def log_weight_sums(self) -> list[float]:
        return [self.log_weight_sum0] + [s.log_weight_sum for s in self.steps]

    @property
    def elements(self) -> list[int]:
        return [s.element for s in self.steps]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["steps"] = [asdict(s) for s in self.steps]
        d["final_log_weights"] = list(self.final_log_weights)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)


@dataclass
class _State:
    """Mutable weight bookkeeping for one run."""

    inst: PackingInstance
    log_lam: float
    denom: np.ndarray
    load: np.ndarray = field(init=False)
    u: np.ndarray = field(init=False)
    shift: float = field(init=False, default=0.0)
    scaled_w: np.ndarray = field(init=False)
    log_weight_sum: float = field(init=False)
    violated: bool = field(init=False, default=False)
    log_b: np.ndarray = field(init=False)

    def __post_init__(self):
        m = self.inst.m
        self.load = np.zeros(m)
        self.u = np.zeros(m)
        self.log_b = np.log(self.inst.b)
        self.scaled_w = 1.0 / self.inst.b
        self.log_weight_sum = math.log(m)

    def log_numerator(self, j: int) -> float:
        """``ln sum_i a_ij w_i``."""
        rows, vals = self.inst.columns[j]
        if rows.size == 0:
            return -math.inf
        s = float(vals @ self.scaled_w[rows])
        if s > 0:
            return math.log(s) + self.shift
        # every term underflowed under the current shift
        z = self.u[rows] - self.log_b[rows] + np.log(vals)
        top = float(z.max())
        return top + math.log(float(np.exp(z - top).sum()))

    def add(self, j: int, chosen: list[int]) -> None:
        rows, vals = self.inst.columns[j]
        if rows.size == 0:
            return
        if len(chosen) % _RESYNC_EVERY == 0:
            self.load = self.inst.loads(chosen)
            touched = np.flatnonzero(self.load > 0)
        else:
            self.load[rows] += vals
            touched = rows
        self.u[touched] = self.log_lam * self.load[touched] / self.denom[touched]
        if np.any(self.load[touched] > self.inst.b[touched]):
            self.violated = True
        self.shift = max(0.0, float(self.u.max()))
        e = np.exp(self.u - self.shift)
        self.scaled_w = e / self.inst.b
        self.log_weight_sum = self.shift + math.log(float(e.sum()))


def _multiplicative_updates(
    inst: PackingInstance,
    obj: SubmodularObjective,
    log_lam: float,
    *,
    binary: bool,
) -> tuple[Solution, SolverTrace]:
    if obj.n != inst.n:
        raise ValueError(f"objective has {obj.n} elements but instance has {inst.n}")
    if not log_lam > 0:
        raise InvalidLambda("update factor must be > 1")
    n = inst.n
    calls0 = obj.calls
    st = _State(inst, log_lam, inst.b + 1.0 if binary else inst.b)

    def within(lw: float) -> bool:
        return lw < log_lam if binary else lw <= log_lam

    singles = [0.0] * n
    heap: list[tuple] = []
    for j in range(n):
        fv = obj.value((j,))
        singles[j] = fv
        if fv > 0:
            heap.append((st.log_numerator(j) - math.log(fv), j, 0, fv))
    heapq.heapify(heap)

    chosen: list[int] = []
    f_cur = 0.0
    steps: list[Step] = []
    while True:
        # st.violated implies the guard fails in exact arithmetic; checking it
        # directly keeps rounding from letting a second violation through
        if st.violated or not within(st.log_weight_sum):
            termination = THRESHOLD_EXCEEDED
            break
        if len(chosen) == n:
            termination = GROUND_SET_EXHAUSTED
            break
        t = len(chosen)
        pick = None
        while heap:
            key, j, ver, fv = heapq.heappop(heap)
            if ver != t:
                fv = obj.value(chosen + [j])
                gain = fv - f_cur
                if gain <= 0:
                    continue
                key = st.log_numerator(j) - math.log(gain)
                if heap and (key, j) > heap[0][:2]:
                    heapq.heappush(heap, (key, j, t, fv))
                    continue
            pick = (key, j, fv)
            break
        if pick is None:
            termination = ZERO_MARGINALS
            break
        key, j, fv = pick
        delta = fv - f_cur
        chosen.append(j)
        f_cur = fv
        st.add(j, chosen)
        steps.append(Step(j, fv, delta, key, st.log_weight_sum))

    if is_feasible(inst, chosen):
        final, value, post = chosen, f_cur, "whole"
    else:
        last = chosen[-1]
        rest_value = steps[-2].value if len(steps) >= 2 else 0.0
        if rest_value >= singles[last]:
            final, value, post = chosen[:-1], rest_value, "drop-last"
        else:
            final, value, post = [last], singles[last], "last-only"

    trace = SolverTrace(
        variant="binary" if binary else "general",
        log_lambda=log_lam,
        log_weight_sum0=math.log(inst.m),
        steps=tuple(steps),
        termination=termination,
        final_log_weights=tuple(float(x) for x in st.u - st.log_b),
        postprocess=post,
    )
    sol = Solution(frozenset(final), value, is_feasible(inst, final), obj.calls - calls0)
    return sol, trace


def solve_general(
    inst: PackingInstance,
    obj: SubmodularObjective,
    policy: LambdaPolicy | None = None,
) -> tuple[Solution, SolverTrace]:
    """Run the multiplicative-updates loop with the update factor from ``policy``.

    Ties in the selection score go to the lowest element index; elements with
    zero marginal are never selected, and when only those remain the loop ends
    as if the ground set were exhausted.
    """
    policy = policy or LambdaPolicy.general()
    return _multiplicative_updates(inst, obj, resolve_log_lambda(policy, inst), binary=False)

