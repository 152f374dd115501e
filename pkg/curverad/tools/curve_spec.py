"""JSON curve specs.

    {"kind": "circle", "r": 1.0}
    {"kind": "ellipse", "a": 2.0, "b": 1.0}
    {"kind": "fourier", "cos": [[...], [...]], "sin": [[...], [...]]}
    {"kind": "transformed", "base": <spec>, "ops": [{"invert": {"center": [0, 0]}}, ...]}

circle and ellipse also take an optional "center". Ops run in listed order.
"""
import json
import logging
import os
from typing import Any, Dict, List, Mapping, Tuple, Union

from curverad.errors import CurveSpecError, InvalidArgumentError
from curverad.tools.geometry import (
    Curve,
    TransformKind,
    apply_transform,
    make_circle,
    make_ellipse,
    make_fourier,
)

logger = logging.getLogger(__name__)

SPEC_KEYS = {
    "circle": ({"r"}, {"center"}),
    "ellipse": ({"a", "b"}, {"center"}),
    "fourier": ({"cos", "sin"}, set()),
    "transformed": ({"base", "ops"}, set()),
}


def load_json(source: str) -> Any:
    """Parse inline JSON, or the contents of the file at ``source``."""
    text = source.strip()
    if not text.startswith(("{", "[")):
        if not os.path.isfile(source):
            raise CurveSpecError(f"{source!r} is neither inline JSON nor a readable file")
        logger.debug(f"reading spec from {source}")
        with open(source, encoding="utf-8") as f:
            text = f.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise CurveSpecError(f"malformed JSON: {e}")


def load_curve(source: str) -> Tuple[Curve, Dict[str, Any]]:
    """Curve and its parsed spec from a path or inline JSON."""
    spec = load_json(source)
    return parse_curve(spec), spec


def parse_curve(spec: Any) -> Curve:
    if not isinstance(spec, Mapping):
        raise CurveSpecError(f"a curve spec must be a JSON object, got {type(spec).__name__}")
    kind = spec.get("kind")
    if kind not in SPEC_KEYS:
        raise CurveSpecError(f"unknown curve kind {kind!r}; expected one of {sorted(SPEC_KEYS)}")
    required, optional = SPEC_KEYS[kind]
    keys = set(spec) - {"kind"}
    missing = required - keys
    if missing:
        raise CurveSpecError(f"{kind} spec is missing {sorted(missing)}")
    unknown = keys - required - optional
    if unknown:
        raise CurveSpecError(f"{kind} spec has unknown keys {sorted(unknown)}")

    try:
        if kind == "circle":
            return make_circle(float(spec["r"]), spec.get("center"))
        if kind == "ellipse":
            return make_ellipse(float(spec["a"]), float(spec["b"]), spec.get("center"))
        if kind == "fourier":
            return make_fourier(spec["cos"], spec["sin"])
    except InvalidArgumentError:
        raise
    except (TypeError, ValueError) as e:
        raise CurveSpecError(f"bad {kind} parameters: {e}")

    curve = parse_curve(spec["base"])
    for op, params in parse_ops(spec["ops"]):
        curve = apply_transform(curve, op, params)
    return curve


def parse_ops(ops: Any) -> List[Tuple[TransformKind, Any]]:
    """Normalize one op object or a list of them into (kind, params) pairs."""
    if isinstance(ops, Mapping):
        ops = [ops]
    if not isinstance(ops, list):
        raise CurveSpecError(f"ops must be a list of single-key objects, got {type(ops).__name__}")
    parsed = []
    for op in ops:
        if not isinstance(op, Mapping) or len(op) != 1:
            raise CurveSpecError(f"each op must be an object with exactly one key, got {op!r}")
        (name, params), = op.items()
        try:
            parsed.append((TransformKind(name), params))
        except ValueError:
            raise CurveSpecError(
                f"unknown transform {name!r}; expected one of {[k.value for k in TransformKind]}"
            )
    return parsed


def load_ops(source: Union[str, Any]) -> List[Tuple[TransformKind, Any]]:
    """Transform ops from a path, inline JSON or an already parsed object."""
    return parse_ops(load_json(source) if isinstance(source, str) else source)
