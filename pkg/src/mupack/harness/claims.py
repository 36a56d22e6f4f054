"""Trace-level audits of the inequalities behind the approximation guarantees.

Each check needs the true optimum (value or set) from brute force.  Checks
return ``None`` when their hypothesis does not apply to the trace.
"""

from __future__ import annotations

import math
from typing import Iterable

from ..mu_solver import SolverTrace
from ..sparse_solver import SparseTrace

TOL = 1e-6


def _log_ratio_term(log_num: float, log_den: float) -> float:
    diff = log_num - log_den
    return math.inf if diff > 700 else math.exp(diff)


def telescoping_bound(trace: SolverTrace, f_star: float, tol: float = TOL) -> bool | None:
    """``sum_l delta_l / (f* - f(S_{l-1})) <= ln(f* / (f* - f(S_T)))``.

    Skipped (``None``) unless ``f* > f(S_T)``.
    """
    values = trace.values
    f_end = values[-1]
    if not f_star > f_end:
        return None
    lhs = math.fsum(
        (values[l] - values[l - 1]) / (f_star - values[l - 1]) for l in range(1, len(values))
    )
    rhs = math.log(f_star / (f_star - f_end))
    return lhs <= rhs + tol


def optimum_bound(trace: SolverTrace, f_star: float, tol: float = TOL) -> bool | None:
    """``f* <= f(S_l) + Lambda_l / alpha_{l+1}`` for every iteration with a successor.

    Skipped (``None``) unless ``f* > f(S_T)``.
    """
    values = trace.values
    if not f_star > values[-1]:
        return None
    sums = trace.log_weight_sums
    for l, nxt in enumerate(trace.steps):
        if f_star > values[l] + _log_ratio_term(sums[l], nxt.log_alpha) + tol:
            return False
    return True


def _sparse_prefixes(trace: SparseTrace, s_star: Iterable[int] = ()):
    star = set(s_star)
    yield 0, 0, 0.0
    in_star = 0
    for step in trace.steps:
        in_star += step.element in star
        yield step.chosen_count, in_star, step.weight_sum


def chosen_count_bound(trace: SparseTrace, tol: float = TOL) -> bool:
    """``|S_t| >= sum_i b_i w_it / (W lam^(1/W) (k + lam - 1))`` at every step."""
    if math.isinf(trace.width):
        return True
    lam, w, k = trace.lam, trace.width, trace.k
    scale = w * lam ** (1.0 / w) * (k + lam - 1)
    return all(count >= ws / scale - tol for count, _, ws in _sparse_prefixes(trace))


def optimum_count_bound(trace: SparseTrace, s_star: Iterable[int], tol: float = TOL) -> bool:
    """``|S*_t| <= |S_t| + sum_i b_i w_it / (lam - 1)`` at every step."""
    lam = trace.lam
    return all(
        star <= count + ws / (lam - 1) + tol for count, star, ws in _sparse_prefixes(trace, s_star)
    )
