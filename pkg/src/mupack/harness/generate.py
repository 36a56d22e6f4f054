"""Seeded random instance families.

All randomness comes from numpy's PCG64 bit generator seeded with the generator spec's
64-bit seed, so an identical :class:`GeneratorSpec` always yields an
identical instance and objective.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidSpec
from ..instance import BinaryPackingInstance, PackingInstance
from ..objective import (
    ConcaveModularObjective,
    CoverageObjective,
    ModularObjective,
    SubmodularObjective,
)

FAMILIES = ("uniform-dense", "binary-sparse", "wide", "knapsack-like")
OBJECTIVES = ("modular", "coverage", "sqrt", "cap")
MAX_DIM = 10_000


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    n: int
    m: int
    objective: str = "modular"
    seed: int = 0
    k: int | None = None
    width_target: float | None = None
    capacity: int | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidSpec(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.objective not in OBJECTIVES:
            raise InvalidSpec(f"unknown objective {self.objective!r}; expected one of {OBJECTIVES}")
        if not (1 <= self.n <= MAX_DIM and 1 <= self.m <= MAX_DIM):
            raise InvalidSpec(f"dimensions must lie in [1, {MAX_DIM}], got n={self.n}, m={self.m}")
        if not 0 <= self.seed < 2**64:
            raise InvalidSpec("seed must be a 64-bit unsigned integer")
        if self.family == "binary-sparse" and (self.k is None or self.k < 1):
            raise InvalidSpec("binary-sparse needs k >= 1")
        if self.family == "wide" and (self.width_target is None or self.width_target < 1):
            raise InvalidSpec("wide needs width_target >= 1")
        if self.capacity is not None and self.capacity < 1:
            raise InvalidSpec("capacity must be >= 1")

    @property
    def name(self) -> str:
        parts = [self.family, f"n{self.n}", f"m{self.m}", self.objective]
        if self.k is not None:
            parts.append(f"k{self.k}")
        if self.width_target is not None:
            parts.append(f"w{self.width_target:g}")
        if self.capacity is not None:
            parts.append(f"b{self.capacity}")
        parts.append(f"s{self.seed}")
        return "-".join(parts)


def _uniform_dense(rng, n, m):
    density = rng.uniform(0.3, 1.0)
    a = rng.uniform(0.0, 1.0, (m, n)) * (rng.uniform(size=(m, n)) < density)
    b = np.maximum(1.0, rng.uniform(0.15, 0.5, m) * a.sum(axis=1))
    return PackingInstance(a, b)


def _knapsack_like(rng, n, m):
    a = rng.uniform(0.05, 1.0, (m, n))
    b = np.maximum(1.0, rng.uniform(0.1, 0.4, m) * a.sum(axis=1))
    return PackingInstance(a, b)


def _wide(rng, n, m, w_target):
    b = rng.uniform(1.0, 3.0, m)
    # entries capped at b_i / w_target, which makes the width at least w_target
    a = rng.uniform(0.25, 1.0, (m, n)) * np.minimum(1.0, b / w_target)[:, None]
    return PackingInstance(a, b)


def _binary_sparse(rng, n, m, k, capacity):
    kk = min(k, m)
    a = np.zeros((m, n))
    for j in range(n):
        count = kk if j == 0 else int(rng.integers(1, kk + 1))
        a[rng.choice(m, size=count, replace=False), j] = 1.0
    base = int(capacity) if capacity is not None else int(rng.integers(1, 4))
    b = base + rng.integers(0, 3, m).astype(float)
    used = np.flatnonzero(a.any(axis=1))
    b[used[int(rng.integers(used.size))]] = base
    return BinaryPackingInstance(a, b)


def _objective(rng, kind, n) -> SubmodularObjective:
    if kind == "modular":
        return ModularObjective(rng.uniform(0.01, 1.0, n))
    if kind == "coverage":
        u = max(2, 2 * n)
        covers = [rng.choice(u, size=int(rng.integers(1, min(6, u) + 1)), replace=False) for _ in range(n)]
        return CoverageObjective(rng.uniform(0.1, 1.0, u), covers)
    c = rng.uniform(0.01, 1.0, n)
    if kind == "sqrt":
        return ConcaveModularObjective(c, "sqrt")
    return ConcaveModularObjective(c, "cap", float(rng.uniform(0.3, 0.7) * c.sum()))


def generate(spec: GeneratorSpec) -> tuple[PackingInstance, SubmodularObjective]:
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    if spec.family == "uniform-dense":
        inst = _uniform_dense(rng, spec.n, spec.m)
    elif spec.family == "knapsack-like":
        inst = _knapsack_like(rng, spec.n, spec.m)
    elif spec.family == "wide":
        inst = _wide(rng, spec.n, spec.m, float(spec.width_target))
    else:
        inst = _binary_sparse(rng, spec.n, spec.m, spec.k, spec.capacity)
    return inst, _objective(rng, spec.objective, spec.n)
