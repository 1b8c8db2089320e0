"""Problem parsing and artifact serialization (all JSON).

Problem file::

    {"group": {"family": "lattice", "dim": 1},
     "action": {"kind": "translation"},
     "A": [[1]], "X0": [0], "epsilon": 1,
     "mode": "materialized", "caps": {...}, "tol": 1e-9}

For ``"action": {"kind": "table", "A": [...], "X0": [...], "kappa": [[...]]}``
the window comes from the table and top-level A/X0 are ignored.  Sequence runs
replace ``epsilon`` with ``"schedule": [e1, e2, ...]``.
"""
from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from typing import Any

import jsonschema

from . import groups as gk
from .actions import SampledAction, make_builtin_action, table_action
from .exceptions import FamilyMismatch, ProblemError
from .model import Caps, FiniteModel, VerificationReport, normalize_mode
from .norms import FiniteNormedGroup, Seminorm, PullbackSeminorm, StandardNorm, TableSeminorm, WordSeminorm

_CAPS_SCHEMA = {
    "type": "object",
    "properties": {name: {"type": "integer", "minimum": 1}
                   for name in ("max_vertices", "max_quotient_order", "max_ball", "max_materialized")},
    "additionalProperties": False,
}

PROBLEM_SCHEMA = {
    "type": "object",
    "required": ["group", "action"],
    "properties": {
        "group": {"type": "object", "required": ["family"]},
        "action": {
            "type": "object",
            "required": ["kind"],
            "properties": {"kind": {"enum": ["translation", "left-discrete", "left-word",
                                             "left-right", "table"]}},
        },
        "A": {"type": "array"},
        "X0": {"type": "array"},
        "epsilon": {"type": "number"},
        "schedule": {"type": "array", "items": {"type": "number"}, "minItems": 1},
        "mode": {"enum": ["materialize", "materialized", "lazy"]},
        "caps": _CAPS_SCHEMA,
        "tol": {"type": "number", "minimum": 0},
    },
}

NORM_SCHEMA = {
    "type": "object",
    "required": ["group", "seminorm", "A", "epsilon"],
    "properties": {
        "group": {"type": "object", "required": ["family"]},
        "seminorm": {"type": "object", "required": ["kind"],
                     "properties": {"kind": {"enum": ["word", "standard", "table", "pullback"]}}},
        "A": {"type": "array", "minItems": 1},
        "epsilon": {"type": "number"},
        "caps": _CAPS_SCHEMA,
        "tol": {"type": "number", "minimum": 0},
    },
}

DEMO_SCHEMA = {
    "type": "object",
    "required": ["hom", "A_F", "epsilon"],
    "properties": {
        "hom": {"type": "object", "required": ["target_order", "gen_images"],
                "properties": {"target_order": {"type": "integer", "minimum": 1},
                               "gen_images": {"type": "array", "items": {"type": "integer"},
                                              "minItems": 1}}},
        "A_F": {"type": "array", "minItems": 1},
        "epsilon": {"type": "number"},
        "mode": {"enum": ["materialize", "materialized", "lazy"]},
        "caps": _CAPS_SCHEMA,
        "tol": {"type": "number", "minimum": 0},
    },
}


def _load(text: str | bytes) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemError(f"invalid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})") from None


def _check_schema(data, schema) -> None:
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if not errors:
        return
    err = errors[0]
    path = err.json_path
    if err.validator == "required":
        missing = [r for r in err.validator_value if r not in err.instance]
        if missing:
            path = f"{path}.{missing[0]}"
            raise ProblemError("required property is missing", path)
    raise ProblemError(err.message, path)


def _caps(raw: dict | None) -> Caps:
    caps = Caps()
    for name, value in (raw or {}).items():
        setattr(caps, name, int(value))
    return caps


def _group(raw, path="$.group") -> gk.Group:
    try:
        return gk.group_from_descriptor(raw)
    except (KeyError, TypeError, ValueError) as exc:
        raise ProblemError(f"bad group descriptor: {exc}", path) from None


def _elements(group: gk.Group, raw: list, path: str) -> list:
    out = []
    for i, item in enumerate(raw):
        try:
            out.append(group.element(item))
        except (ValueError, TypeError, FamilyMismatch) as exc:
            raise ProblemError(str(exc), f"{path}[{i}]") from None
    return out


def _epsilon(value, path="$.epsilon") -> float:
    if not value > 0:
        raise ProblemError("epsilon must be positive", path)
    return float(value)


@dataclass
class ProblemSpec:
    group: gk.Group
    action: dict
    A: list = field(default_factory=list)
    X0: list = field(default_factory=list)
    epsilon: float | None = None
    mode: str = "materialized"
    caps: Caps = field(default_factory=Caps)
    tol: float = 1e-9
    schedule: list | None = None

    def window(self):
        """``(action, A, X0)`` ready for :func:`~finact.model.build_model`.

        For table problems ``action`` is a :class:`SampledAction` and A, X0 are None.
        """
        kind = self.action["kind"]
        if kind == "table":
            try:
                A = _elements(self.group, self.action["A"], "$.action.A")
                return table_action(self.group, A, self.action["X0"], self.action["kappa"], tol=self.tol), None, None
            except (KeyError, TypeError) as exc:
                raise ProblemError(f"table action needs A, X0 and kappa ({exc})", "$.action") from None
            except ValueError as exc:
                if isinstance(exc, ProblemError):
                    raise
                raise ProblemError(str(exc), "$.action") from None
        try:
            handle = make_builtin_action(self.action, self.group)
        except (ValueError, TypeError, FamilyMismatch) as exc:
            raise ProblemError(str(exc), "$.action") from None
        points = []
        for i, raw in enumerate(self.X0):
            try:
                points.append(handle.point(raw))
            except (ValueError, TypeError, FamilyMismatch) as exc:
                raise ProblemError(str(exc), f"$.X0[{i}]") from None
        return handle, list(self.A), points


def parse_problem(text: str | bytes) -> ProblemSpec:
    data = _load(text)
    _check_schema(data, PROBLEM_SCHEMA)
    group = _group(data["group"])
    action = data["action"]
    A: list = []
    X0: list = []
    if action["kind"] != "table":
        for name in ("A", "X0"):
            if name not in data:
                raise ProblemError("required property is missing", f"$.{name}")
            if not data[name]:
                raise ProblemError("must be nonempty", f"$.{name}")
        A = _elements(group, data["A"], "$.A")
        X0 = list(data["X0"])
    schedule = data.get("schedule")
    if "epsilon" in data:
        epsilon = _epsilon(data["epsilon"])
    elif schedule is None:
        raise ProblemError("required property is missing", "$.epsilon")
    else:
        epsilon = None
    if schedule is not None:
        for i, e in enumerate(schedule):
            _epsilon(e, f"$.schedule[{i}]")
        if any(b >= a for a, b in zip(schedule, schedule[1:])):
            raise ProblemError("schedule must be strictly decreasing", "$.schedule")
        schedule = [float(e) for e in schedule]
    return ProblemSpec(group=group, action=action, A=A, X0=X0, epsilon=epsilon,
                       mode=normalize_mode(data.get("mode", "materialized")),
                       caps=_caps(data.get("caps")), tol=float(data.get("tol", 1e-9)),
                       schedule=schedule)


def emit_problem(spec: ProblemSpec) -> str:
    out: dict = {"group": spec.group.descriptor(), "action": spec.action}
    if spec.action.get("kind") != "table":
        out["A"] = [gk.to_json(a) for a in spec.A]
        out["X0"] = list(spec.X0)
    if spec.epsilon is not None:
        out["epsilon"] = spec.epsilon
    if spec.schedule is not None:
        out["schedule"] = list(spec.schedule)
    out["mode"] = spec.mode
    out["caps"] = spec.caps.to_dict()
    out["tol"] = spec.tol
    return dumps(out)


# ---------------------------------------------------------------------------
# norm-approx and demo inputs


@dataclass
class NormProblem:
    group: gk.Group
    seminorm: Seminorm
    A: list
    epsilon: float
    caps: Caps
    tol: float = 1e-9


def _cyclic_hom(group: gk.Group, order: int, images: list):
    gens = group.generators()
    if len(images) != len(gens):
        raise ValueError(f"need {len(gens)} generator images, got {len(images)}")

    def hom(g):
        if group.family == "free":
            return sum((1 if x > 0 else -1) * images[abs(x) - 1] for x in g.payload) % order
        if group.family == "lattice":
            return sum(v * c for v, c in zip(images, g.payload)) % order
        if group.family == "finite-cyclic":
            return (images[0] * g.payload[0]) % order
        raise ValueError(f"pullback seminorms are not supported on {group.family}")
    return hom


def parse_norm_problem(text: str | bytes) -> NormProblem:
    data = _load(text)
    _check_schema(data, NORM_SCHEMA)
    group = _group(data["group"])
    raw = data["seminorm"]
    try:
        kind = raw["kind"]
        if kind == "word":
            s = WordSeminorm(group, raw.get("weights"))
        elif kind == "standard":
            s = StandardNorm()
        elif kind == "table":
            s = TableSeminorm({group.element(e): float(v) for e, v in raw["values"]})
        else:
            hom = raw["hom"]
            rho = [float(v) for v in raw["rho"]]
            if len(rho) != int(hom["target_order"]):
                raise ValueError("rho needs one value per residue")
            s = PullbackSeminorm(_cyclic_hom(group, int(hom["target_order"]), hom["gen_images"]),
                                 lambda r: rho[r])
    except (KeyError, TypeError, ValueError) as exc:
        raise ProblemError(f"bad seminorm: {exc}", "$.seminorm") from None
    return NormProblem(group=group, seminorm=s, A=_elements(group, data["A"], "$.A"),
                       epsilon=_epsilon(data["epsilon"]), caps=_caps(data.get("caps")),
                       tol=float(data.get("tol", 1e-9)))


@dataclass
class DemoProblem:
    hom: dict
    A_F: list
    epsilon: float
    mode: str
    caps: Caps
    tol: float = 1e-9


def parse_demo(text: str | bytes) -> DemoProblem:
    data = _load(text)
    _check_schema(data, DEMO_SCHEMA)
    F = gk.FreeGroup(len(data["hom"]["gen_images"]))
    return DemoProblem(hom=data["hom"], A_F=_elements(F, data["A_F"], "$.A_F"),
                       epsilon=_epsilon(data["epsilon"]), mode=normalize_mode(data.get("mode", "lazy")),
                       caps=_caps(data.get("caps")), tol=float(data.get("tol", 1e-9)))


# ---------------------------------------------------------------------------
# artifacts


def model_to_json(model: FiniteModel) -> dict:
    params = model.params
    if model.mode == "lazy":
        return {"lazy": True, "params": params}
    q = model.quotient
    nx = model.n_points
    X0 = model.window.X0
    vertices = [{"id": e * nx + xi, "q": q.encode(c), "x": X0[xi]}
                for e, c in enumerate(model.carrier) for xi in range(nx)]
    return {
        "vertices": vertices,
        "metric": model.metric.tolist(),
        "psi": {g: perm.tolist() for g, perm in model.psi.items()},
        "f": dict(model.f),
        "params": params,
    }


def report_to_json(rep: VerificationReport) -> dict:
    return {
        "pass": rep.passed,
        "epsilon": rep.epsilon,
        "tol": rep.tol,
        "max_eq_residual": rep.max_eq_residual,
        "max_deviation": rep.max_deviation,
        "max_bound_residual": rep.max_bound_residual,
        "records": rep.records,
    }


def normed_group_to_json(H: FiniteNormedGroup) -> dict:
    return {"elements": H.encodings, "mul": H.mul.tolist(), "rho": H.rho.tolist(), "phi": dict(H.phi)}


def trace_to_json(trace) -> dict:
    return {"note": trace.note, "complete": trace.complete, "pass": trace.passed,
            "stages": trace.stages, "tail_sup": trace.tail_sup, "tail_inf": trace.tail_inf}


def dumps(obj) -> str:
    # repr-based floats round-trip doubles exactly
    return json.dumps(obj, allow_nan=False) + "\n"


def write_atomic(path: str, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
