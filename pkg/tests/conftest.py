import numpy as np
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from mupack.instance import PackingInstance
from mupack.objective import ConcaveModularObjective, CoverageObjective, ModularObjective

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def packing_instances(draw, max_n=8, max_m=4, binary=False):
    n = draw(st.integers(1, max_n))
    m = draw(st.integers(1, max_m))
    if binary:
        a = draw(st.lists(st.lists(st.sampled_from([0.0, 1.0]), min_size=n, max_size=n), min_size=m, max_size=m))
        b = draw(st.lists(st.integers(1, 4).map(float), min_size=m, max_size=m))
    else:
        entry = st.one_of(st.just(0.0), st.floats(0.01, 1.0))
        a = draw(st.lists(st.lists(entry, min_size=n, max_size=n), min_size=m, max_size=m))
        b = draw(st.lists(st.floats(1.0, 4.0), min_size=m, max_size=m))
    return PackingInstance(np.array(a), np.array(b))


@st.composite
def objectives(draw, n):
    kind = draw(st.sampled_from(["modular", "coverage", "sqrt", "cap"]))
    weights = st.floats(0.0, 5.0)
    if kind == "coverage":
        u = draw(st.integers(1, 2 * n + 1))
        item_w = draw(st.lists(weights, min_size=u, max_size=u))
        covers = draw(st.lists(st.sets(st.integers(0, u - 1), max_size=4), min_size=n, max_size=n))
        return CoverageObjective(item_w, [sorted(c) for c in covers])
    c = draw(st.lists(weights, min_size=n, max_size=n))
    if kind == "modular":
        return ModularObjective(c)
    if kind == "sqrt":
        return ConcaveModularObjective(c, "sqrt")
    return ConcaveModularObjective(c, "cap", draw(st.floats(0.0, 10.0)))


@st.composite
def problems(draw, max_n=8, max_m=4, binary=False):
    inst = draw(packing_instances(max_n, max_m, binary))
    return inst, draw(objectives(inst.n))


_ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    if "test_acceptance.py" in report.nodeid and name.startswith("test_criterion_"):
        number = int(name.split("_")[2])
        _ACCEPTANCE[number] = ("PASS" if report.passed else "FAIL", name)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        status, name = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {status}  ({name})")
