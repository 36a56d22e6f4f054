"""Packing-constraint systems ``A x <= b`` and their canonical form.

A :class:`PackingInstance` holds a dense ``m x n`` matrix with entries in
``[0, 1]`` and capacities ``b >= 1``.  Arbitrary nonnegative systems are
brought into this form by :func:`canonicalize`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import numpy as np

from .errors import AllZeroMatrix, EmptyGroundSet, InvalidInstance, NotBinary

FEASIBILITY_TOL = 1e-9


def _frozen_array(x, name: str, ndim: int) -> np.ndarray:
    arr = np.array(x, dtype=float)
    if arr.ndim != ndim:
        raise InvalidInstance(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInstance(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class RawInstance:
    """Nonnegative packing system with no domain restriction on scale."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = _frozen_array(self.a, "a", 2)
        b = _frozen_array(self.b, "b", 1)
        if a.shape[0] != b.shape[0]:
            raise InvalidInstance(f"matrix has {a.shape[0]} rows but b has {b.shape[0]} entries")
        if a.size and a.min() < 0:
            raise InvalidInstance("raw matrix entries must be nonnegative")
        if np.any(b <= 0):
            raise InvalidInstance("raw capacities must be positive")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return self.a.shape[1]

    @property
    def m(self) -> int:
        return self.a.shape[0]


@dataclass(frozen=True, eq=False)
class PackingInstance:
    """Constraint matrix ``a`` in ``[0,1]^{m x n}`` with capacities ``b >= 1``.

    Instances are immutable; derived data (width, column adjacency) is cached
    on first use.
    """

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = _frozen_array(self.a, "a", 2)
        b = _frozen_array(self.b, "b", 1)
        m, n = a.shape
        if n < 1 or m < 1:
            raise InvalidInstance(f"need n >= 1 and m >= 1, got n={n}, m={m}")
        if b.shape[0] != m:
            raise InvalidInstance(f"matrix has {m} rows but b has {b.shape[0]} entries")
        if a.min() < 0 or a.max() > 1:
            raise InvalidInstance("matrix entries must lie in [0, 1]")
        if b.min() < 1:
            raise InvalidInstance("capacities must be >= 1")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return self.a.shape[1]

    @property
    def m(self) -> int:
        return self.a.shape[0]

    @cached_property
    def columns(self) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
        """Per element: the rows where it has a positive coefficient, and those coefficients."""
        out = []
        for j in range(self.n):
            rows = np.flatnonzero(self.a[:, j] > 0)
            vals = self.a[rows, j].copy()
            rows.setflags(write=False)
            vals.setflags(write=False)
            out.append((rows, vals))
        return tuple(out)

    @cached_property
    def width(self) -> float:
        """``min b_i / a_ij`` over positive entries; raises :class:`AllZeroMatrix`."""
        mask = self.a > 0
        if not mask.any():
            raise AllZeroMatrix("width is undefined for an all-zero matrix")
        ratios = np.broadcast_to(self.b[:, None], self.a.shape)[mask] / self.a[mask]
        return float(ratios.min())

    @property
    def is_binary_matrix(self) -> bool:
        return bool(np.all((self.a == 0) | (self.a == 1)))

    def loads(self, s: Iterable[int]) -> np.ndarray:
        idx = np.fromiter(s, dtype=np.intp)
        if idx.size == 0:
            return np.zeros(self.m)
        return self.a[:, idx].sum(axis=1)

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return np.array_equal(self.a, other.a) and np.array_equal(self.b, other.b)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class BinaryPackingInstance(PackingInstance):
    """Packing instance whose matrix is 0/1 and whose capacities are integers.

    Real capacities are floored on construction (loads are integers, so this
    changes no feasibility decision); ``b_floored`` records whether that
    happened.
    """

    b_floored: bool = field(default=False, init=False)

    def __post_init__(self):
        super().__post_init__()
        if not self.is_binary_matrix:
            raise NotBinary("matrix entries must be 0 or 1")
        floored = np.floor(self.b)
        if not np.array_equal(floored, self.b):
            floored.setflags(write=False)
            object.__setattr__(self, "b", floored)
            object.__setattr__(self, "b_floored", True)

    @classmethod
    def from_instance(cls, inst: PackingInstance) -> "BinaryPackingInstance":
        if isinstance(inst, BinaryPackingInstance):
            return inst
        return cls(inst.a, inst.b)

    @cached_property
    def k(self) -> int:
        return column_sparsity(self)


def width(inst: PackingInstance) -> float:
    return inst.width


def column_sparsity(inst: PackingInstance) -> int:
    """Largest number of nonzero entries in any column."""
    return int(np.count_nonzero(inst.a, axis=0).max())


def is_feasible(inst: PackingInstance, s: Iterable[int], tol: float = FEASIBILITY_TOL) -> bool:
    """True iff every row load of ``s`` is at most ``b_i + tol``."""
    return bool(np.all(inst.loads(s) <= inst.b + tol))


def canonicalize(raw: RawInstance) -> tuple[PackingInstance, list[int]]:
    """Reduce a nonnegative system to entries in ``[0,1]`` and capacities ``>= 1``.

    Columns that cannot fit on their own (``a'_ij > b'_i`` for some row) are
    dropped; every row with a positive maximum ``M_i`` over the kept columns
    is divided by ``M_i``.  Zero rows keep their capacity, raised to 1 if it
    was smaller (a zero row constrains nothing either way).

    Returns the canonical instance and the original indices of the kept
    columns, in increasing order.
    """
    a, b = raw.a, raw.b
    keep = ~np.any(a > b[:, None], axis=0)
    kept = [int(j) for j in np.flatnonzero(keep)]
    if not kept:
        raise EmptyGroundSet("every column exceeds some capacity on its own")
    sub = a[:, keep]
    row_max = sub.max(axis=1)
    new_a = sub.copy()
    new_b = b.copy()
    pos = row_max > 0
    new_a[pos] = sub[pos] / row_max[pos, None]
    new_b[pos] = b[pos] / row_max[pos]
    new_b[~pos] = np.maximum(b[~pos], 1.0)
    return PackingInstance(new_a, new_b), kept


def width_or_inf(inst: PackingInstance) -> float:
    """Width, or ``inf`` when the matrix is all zeros (every set is feasible)."""
    try:
        return inst.width
    except AllZeroMatrix:
        return math.inf
