import itertools
import threading

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import objectives
from mupack.objective import (
    ConcaveModularObjective,
    CoverageObjective,
    ModularObjective,
    SubmodularObjective,
    find_violation,
    marginal,
    value,
    verify_submodular,
)


class SquaredCardinality(SubmodularObjective):
    """Supermodular fixture: f(S) = |S|^2."""

    def _evaluate(self, s):
        return float(len(set(s)) ** 2)


class Shifted(SubmodularObjective):
    def _evaluate(self, s):
        return 1.0 + len(set(s))


class Decreasing(SubmodularObjective):
    def _evaluate(self, s):
        return -float(len(set(s)))


def coverage_ab():
    # items a=0 (weight 1), b=1 (weight 2); C_1 = {a}, C_2 = {a, b}
    return CoverageObjective([1.0, 2.0], [[0], [0, 1]])


def test_value_examples():
    assert value(ModularObjective([3, 2, 1]), [0, 1]) == 5
    assert value(coverage_ab(), [0, 1]) == 3
    for obj in (ModularObjective([3, 2, 1]), coverage_ab(), ConcaveModularObjective([1, 4], "sqrt")):
        assert value(obj, []) == 0


def test_marginal_examples():
    assert marginal(ModularObjective([3, 2, 1]), [0], 1) == 2
    assert marginal(coverage_ab(), [1], 0) == 0
    assert marginal(ConcaveModularObjective([3, 2], "cap", 4), [0], 1) == 1


def test_value_counts_one_call():
    obj = ModularObjective([1, 2, 3])
    obj.value([0, 2])
    obj.value([])
    assert obj.calls == 2
    obj.reset_calls()
    assert obj.calls == 0


def test_marginal_call_costs():
    obj = coverage_ab()
    obj.marginal([0], 1)
    assert obj.calls == 2
    obj.marginal([0], 1, base=1.0)
    assert obj.calls == 3


def test_value_masks_matches_value_and_counts_rows():
    rng = np.random.default_rng(3)
    for obj in (
        ModularObjective(rng.uniform(0, 1, 6)),
        CoverageObjective(rng.uniform(0, 1, 9), [rng.choice(9, 3, replace=False) for _ in range(6)]),
        ConcaveModularObjective(rng.uniform(0, 1, 6), "sqrt"),
        ConcaveModularObjective(rng.uniform(0, 1, 6), "cap", 1.2),
    ):
        bits = rng.uniform(size=(20, 6)) < 0.5
        got = obj.value_masks(bits)
        assert obj.calls == 20
        want = [obj.value(np.flatnonzero(row)) for row in bits]
        np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-12)


def test_counter_is_thread_safe():
    obj = ModularObjective([1.0] * 4)

    def work():
        for _ in range(2000):
            obj.value([0, 1])

    threads = [threading.Thread(target=work) for _ in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert obj.calls == 8000


@pytest.mark.parametrize(
    "bad",
    [
        lambda: ModularObjective([1, -1]),
        lambda: CoverageObjective([1.0], [[0], [1]]),
        lambda: ConcaveModularObjective([1, 2], "cap"),
        lambda: ConcaveModularObjective([1, 2], "log"),
    ],
)
def test_invalid_parameters(bad):
    with pytest.raises(ValueError):
        bad()


def test_verify_examples():
    assert verify_submodular(ModularObjective([0.5, 2, 0, 7]))
    rng = np.random.default_rng(11)
    cover = CoverageObjective(rng.uniform(0, 1, 8), [rng.choice(8, 3, replace=False) for _ in range(5)])
    assert verify_submodular(cover)
    v = find_violation(SquaredCardinality(4))
    assert v is not None and v.kind == "submodularity"


def test_verify_detects_normalization_and_monotonicity():
    assert find_violation(Shifted(3)).kind == "normalization"
    assert find_violation(Decreasing(3)).kind == "monotonicity"


def test_verify_limit():
    with pytest.raises(ValueError):
        verify_submodular(ModularObjective([1.0] * 13))


def naive_violation(obj, n, tol=1e-9):
    subsets = [frozenset(c) for r in range(n + 1) for c in itertools.combinations(range(n), r)]
    f = {s: obj.value(s) for s in subsets}
    if abs(f[frozenset()]) > tol:
        return True
    for s in subsets:
        for t in subsets:
            if not s <= t:
                continue
            if f[s] > f[t] + tol:
                return True
            for j in set(range(n)) - t:
                if f[s | {j}] - f[s] < f[t | {j}] - f[t] - tol:
                    return True
    return False


class Tabulated(SubmodularObjective):
    def __init__(self, n, table):
        super().__init__(n)
        self.table = table

    def _evaluate(self, s):
        mask = sum(1 << j for j in set(s))
        return self.table[mask]


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(st.just(n), st.lists(st.integers(0, 4), min_size=1 << n, max_size=1 << n))))
def test_find_violation_agrees_with_pairwise_definition(data):
    n, table = data
    table = [0.0] + [float(x) for x in table[1:]]
    obj = Tabulated(n, table)
    assert (find_violation(obj) is not None) == naive_violation(obj, n)


@given(st.integers(1, 7).flatmap(objectives))
def test_families_are_submodular(obj):
    assert verify_submodular(obj)


@given(st.integers(8, 40).flatmap(lambda n: st.tuples(objectives(n), st.randoms(use_true_random=False))))
def test_random_chains_monotone_and_diminishing(data):
    obj, rnd = data
    order = list(range(obj.n))
    rnd.shuffle(order)
    prev = 0.0
    for t in range(len(order)):
        cur = obj.value(order[: t + 1])
        assert cur >= prev - 1e-9
        prev = cur
    cut = rnd.randrange(len(order))
    s, tt = order[: cut // 2], order[:cut]
    for j in order[cut:]:
        assert obj.marginal(s, j) >= obj.marginal(tt, j) - 1e-9


