"""Multiplicative updates specialized to 0/1 constraint matrices.

Identical to the general loop except that the guard is strict
(``sum_i b_i w_i < lam``) and each update multiplies ``w_i`` by
``lam ** (a_ij / (b_i + 1))``.  With integer capacities, a violated row then
has ``b_i w_i == lam`` exactly, which stops the loop right after the
violating element.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InvalidLambda
from .instance import BinaryPackingInstance, PackingInstance, width_or_inf
from .mu_solver import Solution, SolverTrace, _multiplicative_updates
from .objective import SubmodularObjective


def default_log_lambda(inst: BinaryPackingInstance) -> float:
    """``ln(e^(W+1) m)``."""
    return width_or_inf(inst) + 1 + math.log(inst.m)


def _binary_width(inst: BinaryPackingInstance) -> float:
    w = width_or_inf(inst)
    nonzero_rows = np.any(inst.a > 0, axis=1)
    if nonzero_rows.any():
        assert w == float(inst.b[nonzero_rows].min())
    return w


def solve_binary(
    inst: PackingInstance,
    obj: SubmodularObjective,
    lam: float | None = None,
) -> tuple[Solution, SolverTrace]:
    """Binary variant; ``lam`` defaults to ``e^(W+1) m``.

    Raises :class:`~mupack.errors.NotBinary` for matrices with entries other
    than 0 and 1; real capacities are floored first.
    """
    inst = BinaryPackingInstance.from_instance(inst)
    _binary_width(inst)
    if lam is None:
        log_lam = default_log_lambda(inst)
    else:
        if not (lam > 1 and math.isfinite(lam)):
            raise InvalidLambda(f"update factor must be a finite number > 1, got {lam}")
        log_lam = math.log(lam)
    return _multiplicative_updates(inst, obj, log_lam, binary=True)


def theoretical_ratio_binary(inst: BinaryPackingInstance) -> float:
    """``1 / (2 (e m^(1/(W+1)) + 1))``."""
    return 1.0 / (2.0 * (math.e * inst.m ** (1.0 / (width_or_inf(inst) + 1)) + 1.0))
