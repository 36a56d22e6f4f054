import math

import numpy as np
import pytest
from hypothesis import given

from conftest import problems
from mupack.binary_solver import default_log_lambda, solve_binary, theoretical_ratio_binary
from mupack.errors import InvalidLambda, NotBinary
from mupack.exact import brute_force
from mupack.harness import claims
from mupack.harness.generate import GeneratorSpec, generate
from mupack.instance import BinaryPackingInstance, PackingInstance, is_feasible
from mupack.mu_solver import THRESHOLD_EXCEEDED, theoretical_ratio_general
from mupack.objective import ModularObjective
from test_mu_solver import reference_run


def binst(a, b):
    return BinaryPackingInstance(np.array(a, dtype=float), np.array(b, dtype=float))


def test_hand_trace_two_elements():
    # lam = e^2: first pick raises w to e, second to e^2, which fails the strict guard
    sol, trace = solve_binary(binst([[1, 1]], [1]), ModularObjective([2, 1]))
    assert trace.log_lambda == pytest.approx(2.0)
    assert trace.elements == [0, 1]
    assert trace.log_weight_sums[1] == pytest.approx(1.0)
    assert trace.log_weight_sums[2] == pytest.approx(2.0)
    assert trace.termination == THRESHOLD_EXCEEDED
    assert sol.chosen == {0} and sol.objective_value == 2


def test_single_element():
    sol, _ = solve_binary(binst([[1]], [1]), ModularObjective([7]))
    assert sol.chosen == {0} and sol.objective_value == 7


def test_identity_like_instance_reaches_opt():
    p = binst([[1, 0, 0], [0, 1, 1]], [1, 1])
    sol, _ = solve_binary(p, ModularObjective([1, 1, 1]))
    assert 0 in sol.chosen and len(sol.chosen & {1, 2}) == 1
    assert sol.objective_value == 2 == brute_force(p, ModularObjective([1, 1, 1])).optimum_value


def test_rejects_fractional_matrix():
    p = PackingInstance(np.array([[0.5, 1.0]]), np.array([1.0]))
    with pytest.raises(NotBinary):
        solve_binary(p, ModularObjective([1, 1]))


@pytest.mark.parametrize("lam", [1.0, 0.3, math.inf, math.nan])
def test_rejects_bad_lambda(lam):
    with pytest.raises(InvalidLambda):
        solve_binary(binst([[1]], [1]), ModularObjective([1]), lam)


@pytest.mark.parametrize(
    "m, w, expected",
    [(1, 1, 1 / (2 * (math.e + 1))), (4, 1, 1 / (2 * (2 * math.e + 1))), (8, 2, 1 / (2 * (2 * math.e + 1)))],
)
def test_theoretical_ratio_examples(m, w, expected):
    p = binst(np.eye(m), np.full(m, w))
    assert theoretical_ratio_binary(p) == pytest.approx(expected, rel=1e-12)


def test_default_lambda_exceeds_e_m():
    for seed in range(20):
        p, _ = generate(GeneratorSpec("binary-sparse", n=8, m=5, k=3, seed=seed))
        assert default_log_lambda(p) > 1 + math.log(p.m)


def test_floored_capacity_used():
    p = PackingInstance(np.array([[1.0, 1.0, 1.0]]), np.array([2.9]))
    sol, _ = solve_binary(p, ModularObjective([1, 1, 1]))
    assert len(sol.chosen) <= 2


def test_matches_reference_loop():
    for seed in range(40):
        spec = GeneratorSpec("binary-sparse", n=9, m=4, k=(1, 2, 3)[seed % 3], objective=("coverage", "sqrt")[seed % 2], seed=seed)
        p, obj = generate(spec)
        sol, trace = solve_binary(p, obj)
        want, sequence = reference_run(p, obj, math.exp(default_log_lambda(p)), binary=True)
        assert trace.elements == sequence, spec.name
        assert sol.chosen == want, spec.name


def test_violation_identity():
    # a violated row ends the loop with b_i w_i equal to lam
    hits = 0
    for seed in range(200):
        p, obj = generate(GeneratorSpec("binary-sparse", n=10, m=3, k=2, capacity=1, seed=seed))
        _, trace = solve_binary(p, obj)
        loads = p.loads(trace.elements)
        violated = np.flatnonzero(loads > p.b)
        for i in violated:
            hits += 1
            log_bw = trace.final_log_weights[i] + math.log(p.b[i])
            assert log_bw == pytest.approx(trace.log_lambda, rel=1e-6)
    assert hits > 0


@given(problems(binary=True))
def test_feasible_and_deterministic(problem):
    p, obj = problem
    sol1, tr1 = solve_binary(p, obj)
    sol2, tr2 = solve_binary(p, obj)
    assert sol1.feasible and is_feasible(p, sol1.chosen)
    assert sol1.chosen == sol2.chosen and tr1.to_json() == tr2.to_json()


@given(problems(max_n=7, max_m=3, binary=True))
def test_ratio_and_claims(problem):
    p, obj = problem
    opt = brute_force(p, obj)
    sol, trace = solve_binary(p, obj)
    bp = BinaryPackingInstance.from_instance(p)
    if opt.optimum_value > 0:
        assert sol.objective_value / opt.optimum_value >= theoretical_ratio_binary(bp)
    assert theoretical_ratio_binary(bp) >= theoretical_ratio_general(bp)
    assert claims.telescoping_bound(trace, opt.optimum_value) is not False
    assert claims.optimum_bound(trace, opt.optimum_value) is not False
