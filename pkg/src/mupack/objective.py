"""Value oracles for normalized monotone submodular set functions.

Every family evaluates subsets with :func:`math.fsum`, so a set's value does
not depend on iteration order and equal sets always get bit-identical values.
Oracle queries are counted; the counter is the query-complexity measure the
solvers report.
"""

from __future__ import annotations

import math
import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

TOL = 1e-9


class SubmodularObjective(ABC):
    """Counted value oracle over subsets of ``range(n)``."""

    family: str = "abstract"

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("ground set must be nonempty")
        self.n = n
        self._calls = 0
        self._lock = threading.Lock()

    @property
    def calls(self) -> int:
        return self._calls

    def reset_calls(self) -> None:
        with self._lock:
            self._calls = 0

    def _count(self, k: int = 1) -> None:
        with self._lock:
            self._calls += k

    def value(self, s: Iterable[int]) -> float:
        """f(s); one oracle call."""
        self._count()
        return self._evaluate(s)

    def marginal(self, s: Iterable[int], j: int, base: float | None = None) -> float:
        """``f(s + j) - f(s)`` clamped at 0.

        Passing ``base = f(s)`` saves one oracle call.
        """
        s = list(s)
        if base is None:
            base = self.value(s)
        s.append(j)
        return max(self.value(s) - base, 0.0)

    def value_masks(self, bits: np.ndarray) -> np.ndarray:
        """Values of many subsets at once, one oracle call per row.

        ``bits`` is a boolean ``(N, n)`` array with one subset per row.  The
        vectorized family overrides may differ from :meth:`value` in the last
        few bits of precision.
        """
        bits = np.asarray(bits, dtype=bool)
        self._count(bits.shape[0])
        return np.array([self._evaluate(np.flatnonzero(row)) for row in bits], dtype=float)

    @abstractmethod
    def _evaluate(self, s: Iterable[int]) -> float: ...

    def to_spec(self) -> dict:
        raise NotImplementedError(f"{type(self).__name__} has no file representation")


class ModularObjective(SubmodularObjective):
    """``f(S) = sum of c_j over S``."""

    family = "modular"

    def __init__(self, c: Sequence[float]):
        c = [float(x) for x in c]
        if any(not math.isfinite(x) or x < 0 for x in c):
            raise ValueError("modular weights must be finite and nonnegative")
        super().__init__(len(c))
        self.c = c
        self._c_arr = np.array(c)

    def _evaluate(self, s):
        return math.fsum(map(self.c.__getitem__, s))

    def value_masks(self, bits):
        bits = np.asarray(bits, dtype=bool)
        self._count(bits.shape[0])
        return bits @ self._c_arr

    def to_spec(self):
        return {"family": self.family, "c": list(self.c)}


class CoverageObjective(SubmodularObjective):
    """Weighted coverage: total weight of the union of the chosen cover sets.

    ``covers[j]`` lists the universe items (0-based) covered by element ``j``.
    """

    family = "coverage"

    def __init__(self, item_weights: Sequence[float], covers: Sequence[Iterable[int]]):
        w = [float(x) for x in item_weights]
        if any(not math.isfinite(x) or x < 0 for x in w):
            raise ValueError("item weights must be finite and nonnegative")
        sets = [frozenset(int(i) for i in c) for c in covers]
        for c in sets:
            if any(i < 0 or i >= len(w) for i in c):
                raise ValueError("cover set refers to an item outside the universe")
        super().__init__(len(sets))
        self.item_weights = w
        self.covers = sets
        self._matrix = np.zeros((len(sets), len(w)), dtype=np.int32)
        for j, c in enumerate(sets):
            self._matrix[j, list(c)] = 1
        self._w_arr = np.array(w)

    def _evaluate(self, s):
        covered = set()
        for j in s:
            covered |= self.covers[j]
        return math.fsum(map(self.item_weights.__getitem__, covered))

    def value_masks(self, bits):
        bits = np.asarray(bits, dtype=bool)
        self._count(bits.shape[0])
        hit = (bits.astype(np.int32) @ self._matrix) > 0
        return hit @ self._w_arr

    def to_spec(self):
        return {
            "family": self.family,
            "item_weights": list(self.item_weights),
            "covers": [sorted(c) for c in self.covers],
        }


class ConcaveModularObjective(SubmodularObjective):
    """``g(sum of c_j over S)`` for ``g`` = square root or ``min(x, cap)``."""

    family = "concave_modular"
    CURVES = ("sqrt", "cap")

    def __init__(self, c: Sequence[float], curve: str = "sqrt", cap_value: float | None = None):
        c = [float(x) for x in c]
        if any(not math.isfinite(x) or x < 0 for x in c):
            raise ValueError("weights must be finite and nonnegative")
        if curve not in self.CURVES:
            raise ValueError(f"unknown curve {curve!r}; expected one of {self.CURVES}")
        if curve == "cap":
            if cap_value is None or not cap_value >= 0:
                raise ValueError("cap curve needs a nonnegative cap_value")
            cap_value = float(cap_value)
        else:
            cap_value = None
        super().__init__(len(c))
        self.c = c
        self.curve = curve
        self.cap_value = cap_value
        self._c_arr = np.array(c)

    def _g(self, x):
        if self.curve == "sqrt":
            return np.sqrt(x) if isinstance(x, np.ndarray) else math.sqrt(x)
        return np.minimum(x, self.cap_value) if isinstance(x, np.ndarray) else min(x, self.cap_value)

    def _evaluate(self, s):
        return self._g(math.fsum(map(self.c.__getitem__, s)))

    def value_masks(self, bits):
        bits = np.asarray(bits, dtype=bool)
        self._count(bits.shape[0])
        return self._g(bits @ self._c_arr)

    def to_spec(self):
        spec = {"family": self.family, "c": list(self.c), "curve": self.curve}
        if self.curve == "cap":
            spec["cap_value"] = self.cap_value
        return spec


def value(obj: SubmodularObjective, s: Iterable[int]) -> float:
    return obj.value(s)


def marginal(obj: SubmodularObjective, s: Iterable[int], j: int, base: float | None = None) -> float:
    return obj.marginal(s, j, base)


@dataclass(frozen=True)
class Violation:
    """Counterexample found by :func:`find_violation`.

    For ``kind == "submodularity"`` the marginal of ``j`` grows from ``s`` to
    its superset ``t``; for ``"monotonicity"`` adding ``j`` to ``s`` lowers
    the value; for ``"normalization"`` only ``gap`` (= f(empty)) is meaningful.
    """

    kind: str
    s: frozenset
    t: frozenset
    j: int
    gap: float


def _mask_set(mask: int) -> frozenset:
    return frozenset(i for i in range(mask.bit_length()) if mask >> i & 1)


def find_violation(obj: SubmodularObjective, n: int | None = None, tol: float = TOL) -> Violation | None:
    """Exhaustively search for a failure of normalization, monotonicity or submodularity.

    Tabulates ``f`` on all ``2^n`` subsets, then checks ``f(S+j) >= f(S)`` and
    the local exchange inequality ``f(S+i) + f(S+j) >= f(S+i+j) + f(S)``,
    which together with monotonicity is equivalent to decreasing marginals
    over every pair ``S subset T``.
    """
    n = obj.n if n is None else n
    if n > 12:
        raise ValueError("exhaustive check is limited to n <= 12")
    size = 1 << n
    table = np.array([obj.value(_mask_set(mask)) for mask in range(size)])
    if abs(table[0]) > tol:
        return Violation("normalization", frozenset(), frozenset(), -1, float(table[0]))
    masks = np.arange(size)
    for j in range(n):
        bit = 1 << j
        base = masks[(masks & bit) == 0]
        drop = table[base] - table[base | bit]
        bad = np.flatnonzero(drop > tol)
        if bad.size:
            s = int(base[bad[0]])
            return Violation("monotonicity", _mask_set(s), _mask_set(s), j, float(drop[bad[0]]))
    for i, j in combinations(range(n), 2):
        bi, bj = 1 << i, 1 << j
        base = masks[(masks & (bi | bj)) == 0]
        gap = table[base | bi | bj] + table[base] - table[base | bi] - table[base | bj]
        bad = np.flatnonzero(gap > tol)
        if bad.size:
            s = int(base[bad[0]])
            return Violation("submodularity", _mask_set(s), _mask_set(s | bi), j, float(gap[bad[0]]))
    return None


def verify_submodular(obj: SubmodularObjective, n: int | None = None, tol: float = TOL) -> bool:
    return find_violation(obj, n, tol) is None
