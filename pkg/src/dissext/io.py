"""JSON instance files and reports.

Complex numbers are ``[re, im]`` pairs and matrices are row-major lists of
rows; basis vectors are columns.  Instances are validated against
``schemas/instance.schema.json`` before anything is built from them.
"""

import datetime
import json
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

import jsonschema
import numpy as np

from . import __version__
from .criterion import ExtensionSpec, PartialOperator
from .first_order import UNIT
from .funcspace import FuncExpr
from .schrodinger import HALF_LINE, PotentialSpec

SCHEMA_VERSION = 1


class InputError(ValueError):
    """Malformed input; ``pointer`` is a JSON pointer to the offending field."""

    def __init__(self, pointer, message):
        self.pointer = pointer
        super().__init__(f"{pointer or '/'}: {message}")


def load_schema(name):
    text = resources.files("dissext").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def _pointer(path):
    return "".join(f"/{p}" for p in path)


def validate(doc, name="instance"):
    v = jsonschema.Draft202012Validator(load_schema(name))
    errors = sorted(v.iter_errors(doc), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        # the deepest error is the most specific one
        e = max(errors, key=lambda e: len(e.absolute_path))
        raise InputError(_pointer(e.absolute_path), e.message)


# ------------------------------------------------------------------ complex

def cmatrix_from_json(rows, pointer=""):
    try:
        a = np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise InputError(pointer, f"bad complex matrix: {exc}") from None
    if a.ndim != 2:
        raise InputError(pointer, "rows of unequal length")
    return a


def cmatrix_to_json(a):
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def to_jsonable(obj):
    """Plain JSON types for numpy scalars/arrays, complex numbers and fractions."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


# --------------------------------------------------------------- instances

@dataclass(frozen=True)
class Instance:
    kind: str
    payload: dict
    tolerances: dict = field(default_factory=dict)
    document: dict = field(default_factory=dict, repr=False)


def _field_of(message, default):
    head = str(message).split(":", 1)[0].strip()
    return head if head.isidentifier() else default


def build_matrix(m):
    base = "/matrix"
    if "operator" in m:
        op = cmatrix_from_json(m["operator"], base + "/operator")
        n = op.shape[0]
        if op.shape != (n, n):
            raise InputError(base + "/operator", f"expected a square matrix, got {op.shape}")
        d = m["domain_dim"]
        k = m.get("complement_dim", n - d)
        if not (1 <= d < n and 1 <= k <= n - d):
            raise InputError(base + "/domain_dim", f"need 1 <= d < n and 1 <= k <= n - d (n={n}, d={d}, k={k})")
        eye = np.eye(n, dtype=complex)
        parts = (eye[:, :d], op[:, :d], eye[:, d:d + k], op[:, d:d + k])
    else:
        names = ("domain_basis", "domain_action", "complement_basis", "complement_action")
        parts = tuple(cmatrix_from_json(m[k], f"{base}/{k}") for k in names)
    try:
        pop = PartialOperator(parts[0], parts[1])
    except ValueError as exc:
        raise InputError(f"{base}/{_field_of(exc, 'domain_basis')}", str(exc)) from None
    try:
        ext = ExtensionSpec(parts[2], parts[3])
        ext.check_against(pop)
    except ValueError as exc:
        raise InputError(f"{base}/{_field_of(exc, 'complement_basis')}", str(exc)) from None
    return pop, ext


def build_first_order(f):
    return {"gamma": float(f["gamma"]),
            "v": FuncExpr.from_json(f["v"], UNIT),
            "ell": FuncExpr.from_json(f["ell"], UNIT)}


def potential_from_json(p, pointer="/schrodinger/potential"):
    try:
        if p["kind"] == "constant":
            return PotentialSpec.constant(p["value"])
        if p["kind"] == "funcexpr":
            return PotentialSpec.from_funcexpr(FuncExpr.from_json(p["terms"], HALF_LINE),
                                               p["lower"], p["upper"])
        return PotentialSpec.from_grid(p["nodes"], p["values"])
    except ValueError as exc:
        raise InputError(pointer, str(exc)) from None


def build_schrodinger(s):
    return {"potential": potential_from_json(s["potential"]),
            "v": FuncExpr.from_json(s["v"], HALF_LINE),
            "ell": FuncExpr.from_json(s["ell"], HALF_LINE)}


def parse_instance(doc):
    validate(doc)
    kind = doc["kind"]
    if kind == "matrix":
        op, ext = build_matrix(doc["matrix"])
        payload = {"op": op, "ext": ext}
    elif kind == "first-order":
        payload = build_first_order(doc["first_order"])
    else:
        payload = build_schrodinger(doc["schrodinger"])
    return Instance(kind, payload, dict(doc.get("tolerances", {})), doc)


def read_json(path, pointer=""):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(pointer, f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(pointer, f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def loads_json(text, pointer):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(pointer, f"invalid JSON ({exc.msg})") from None


# ------------------------------------------------------------------ reports

def make_report(command, input_doc, tolerances, result, started):
    """Report dict; everything except ``meta`` is a pure function of the inputs."""
    return {
        "tool": "dissext",
        "version": __version__,
        "command": command,
        "input": to_jsonable(input_doc),
        "tolerances": to_jsonable(tolerances),
        "result": to_jsonable(result),
        "meta": {
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"),
            "wall_time_s": round(time.perf_counter() - started, 6),
        },
    }


def report_body(report):
    return {k: v for k, v in report.items() if k != "meta"}


def dumps_report(report):
    # repr-exact floats; NaN/inf are not valid JSON so they become strings
    return json.dumps(_finite(report), indent=2, sort_keys=True)


def loads_report(text):
    doc = json.loads(text)
    validate(doc, "report")
    return doc


def _finite(obj):
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_finite(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj
