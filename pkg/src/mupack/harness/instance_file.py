"""Reading and writing instance files.

An instance file is a UTF-8 YAML document with exactly these top-level keys,
in this order in canonical form::

    n: 3
    m: 1
    binary: true            # optional; omitted when false
    matrix:
    - 0.5 0.5 0.5           # one line per row, n space-separated decimals
    b: [1, 1.5]             # m decimals
    objective:
      family: modular       # modular | coverage | concave_modular
      c: [3, 2, 1]

Objective blocks by family:

* ``modular``: ``c`` (n nonnegative weights)
* ``coverage``: ``item_weights`` (u nonnegative weights) and ``covers``
  (n lists of 1-based item numbers)
* ``concave_modular``: ``c``, ``curve`` (``sqrt`` or ``cap``) and, for
  ``cap``, ``cap_value``

Unknown keys are rejected.  Numbers are written in the shortest form that
round-trips (integers without a decimal point), so ``dump(parse(text))``
reproduces canonical text byte for byte.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import yaml

from ..errors import InstanceFormatError, MupackError
from ..instance import BinaryPackingInstance, PackingInstance
from ..objective import (
    ConcaveModularObjective,
    CoverageObjective,
    ModularObjective,
    SubmodularObjective,
)

_TOP_KEYS = {"n", "m", "binary", "matrix", "b", "objective"}
_OBJECTIVE_KEYS = {
    "modular": {"family", "c"},
    "coverage": {"family", "item_weights", "covers"},
    "concave_modular": {"family", "c", "curve", "cap_value"},
}


def fmt_number(x: float) -> str:
    x = float(x)
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _flow(xs) -> str:
    return "[" + ", ".join(fmt_number(x) for x in xs) + "]"


def _number(x, what: str) -> float:
    if isinstance(x, bool) or x is None:
        raise InstanceFormatError(f"{what}: expected a number, got {x!r}")
    try:
        v = float(x)
    except (TypeError, ValueError):
        raise InstanceFormatError(f"{what}: expected a number, got {x!r}") from None
    if not math.isfinite(v):
        raise InstanceFormatError(f"{what}: number must be finite")
    return v


def _int(x, what: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise InstanceFormatError(f"{what}: expected an integer, got {x!r}")
    return x


def _numbers(xs, length: int | None, what: str) -> list[float]:
    if not isinstance(xs, list):
        raise InstanceFormatError(f"{what}: expected a list")
    if length is not None and len(xs) != length:
        raise InstanceFormatError(f"{what}: expected {length} entries, got {len(xs)}")
    return [_number(x, what) for x in xs]


def dumps(inst: PackingInstance, obj: SubmodularObjective) -> str:
    if obj.n != inst.n:
        raise ValueError("objective and instance disagree on n")
    lines = [f"n: {inst.n}", f"m: {inst.m}"]
    if isinstance(inst, BinaryPackingInstance):
        lines.append("binary: true")
    lines.append("matrix:")
    lines.extend("- " + " ".join(fmt_number(x) for x in row) for row in inst.a)
    lines.append(f"b: {_flow(inst.b)}")
    lines.append("objective:")
    spec = obj.to_spec()
    lines.append(f"  family: {spec['family']}")
    if spec["family"] == "coverage":
        lines.append(f"  item_weights: {_flow(spec['item_weights'])}")
        covers = ", ".join("[" + ", ".join(str(i + 1) for i in c) + "]" for c in spec["covers"])
        lines.append(f"  covers: [{covers}]")
    else:
        lines.append(f"  c: {_flow(spec['c'])}")
        if spec["family"] == "concave_modular":
            lines.append(f"  curve: {spec['curve']}")
            if spec["curve"] == "cap":
                lines.append(f"  cap_value: {fmt_number(spec['cap_value'])}")
    return "\n".join(lines) + "\n"


def _parse_objective(block, n: int) -> SubmodularObjective:
    if not isinstance(block, dict):
        raise InstanceFormatError("objective: expected a mapping")
    family = block.get("family")
    if family not in _OBJECTIVE_KEYS:
        raise InstanceFormatError(f"objective.family: unknown family {family!r}")
    extra = set(block) - _OBJECTIVE_KEYS[family]
    if extra:
        raise InstanceFormatError(f"objective: unknown keys {sorted(extra)}")
    if family == "modular":
        return ModularObjective(_numbers(block.get("c"), n, "objective.c"))
    if family == "coverage":
        weights = _numbers(block.get("item_weights"), None, "objective.item_weights")
        covers = block.get("covers")
        if not isinstance(covers, list) or len(covers) != n:
            raise InstanceFormatError(f"objective.covers: expected {n} lists")
        sets = []
        for c in covers:
            if not isinstance(c, list):
                raise InstanceFormatError("objective.covers: each entry must be a list")
            items = [_int(i, "objective.covers") - 1 for i in c]
            if any(i < 0 or i >= len(weights) for i in items):
                raise InstanceFormatError("objective.covers: item number out of range")
            sets.append(items)
        return CoverageObjective(weights, sets)
    curve = block.get("curve")
    if curve not in ConcaveModularObjective.CURVES:
        raise InstanceFormatError(f"objective.curve: expected sqrt or cap, got {curve!r}")
    cap = block.get("cap_value")
    if curve == "cap":
        cap = _number(cap, "objective.cap_value")
    elif cap is not None:
        raise InstanceFormatError("objective.cap_value is only allowed with curve: cap")
    return ConcaveModularObjective(_numbers(block.get("c"), n, "objective.c"), curve, cap)


def loads(text: str) -> tuple[PackingInstance, SubmodularObjective]:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise InstanceFormatError(f"not valid YAML: {exc}") from None
    if not isinstance(doc, dict):
        raise InstanceFormatError("instance file must be a mapping")
    extra = set(doc) - _TOP_KEYS
    if extra:
        raise InstanceFormatError(f"unknown keys {sorted(extra)}")
    missing = {"n", "m", "matrix", "b", "objective"} - set(doc)
    if missing:
        raise InstanceFormatError(f"missing keys {sorted(missing)}")
    n, m = _int(doc["n"], "n"), _int(doc["m"], "m")
    binary = doc.get("binary", False)
    if not isinstance(binary, bool):
        raise InstanceFormatError("binary: expected true or false")
    rows = doc["matrix"]
    if not isinstance(rows, list) or len(rows) != m:
        raise InstanceFormatError(f"matrix: expected {m} rows")
    a = []
    for i, row in enumerate(rows):
        if isinstance(row, bool) or not isinstance(row, (str, int, float)):
            raise InstanceFormatError(f"matrix row {i + 1}: expected space-separated decimals")
        a.append([_number(x, f"matrix row {i + 1}") for x in str(row).split()])
        if len(a[-1]) != n:
            raise InstanceFormatError(f"matrix row {i + 1}: expected {n} entries, got {len(a[-1])}")
    b = _numbers(doc["b"], m, "b")
    try:
        cls = BinaryPackingInstance if binary else PackingInstance
        inst = cls(np.array(a), np.array(b))
        obj = _parse_objective(doc["objective"], n)
    except MupackError as exc:
        raise InstanceFormatError(str(exc)) from None
    except ValueError as exc:
        raise InstanceFormatError(str(exc)) from None
    return inst, obj


def load(path: str | Path) -> tuple[PackingInstance, SubmodularObjective]:
    return loads(Path(path).read_text(encoding="utf-8"))


def dump(path: str | Path, inst: PackingInstance, obj: SubmodularObjective) -> None:
    Path(path).write_text(dumps(inst, obj), encoding="utf-8")
