"""JSON input documents: loading, emitting and value encoding."""

from __future__ import annotations

import json
import math

import numpy as np

from . import catalog
from .catalog import ConstraintError, to_complex
from .coordinate import CoordinateMetric
from .expr import ExprError, to_text
from .structure import from_keyed, to_keyed, validate_structure

TYPES = ("lie_hermitian", "coordinate", "catalog")


class InputError(ValueError):
    """Malformed document: exit code 3."""


class ValidationFailure(ValueError):
    """Well-formed input that fails a mathematical precondition: exit code 2."""


def encode(x):
    """Recursively convert to JSON-ready values; complex numbers become [re, im]."""
    if isinstance(x, dict):
        return {str(k): encode(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [encode(v) for v in x]
    if isinstance(x, np.ndarray):
        return encode(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [_clean(x.real), _clean(x.imag)]
    if isinstance(x, (float, np.floating)):
        return _clean(x)
    if isinstance(x, np.integer):
        return int(x)
    return x


def _clean(v):
    v = float(v)
    if math.isnan(v) or math.isinf(v):
        return str(v)
    return v + 0.0  # folds -0.0 into 0.0


def dumps(obj):
    return json.dumps(encode(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _require(doc, key, where="document"):
    if key not in doc:
        raise InputError(f"{where} is missing required key {key!r}")
    return doc[key]


def load_document(doc):
    """Returns (kind, object, tol) where object is a structure or a coordinate metric."""
    if not isinstance(doc, dict):
        raise InputError("input must be a JSON object")
    kind = _require(doc, "type")
    if kind not in TYPES:
        raise InputError(f"type must be one of {', '.join(TYPES)}")
    options = doc.get("options", {})
    if not isinstance(options, dict):
        raise InputError("options must be an object")
    tol = options.get("tol")
    try:
        if kind == "lie_hermitian":
            n = int(_require(doc, "dim"))
            d = _require(doc, "d")
            if not isinstance(d, dict):
                raise InputError("d must map generator numbers to coefficient objects")
            coeffs = {int(i): {k: to_complex(v) for k, v in terms.items()} for i, terms in d.items()}
            bad = [i for i in coeffs if not 1 <= i <= n]
            if bad:
                raise InputError(f"generator number {bad[0]} outside 1..{n}")
            return kind, from_keyed(n, coeffs), tol
        if kind == "coordinate":
            comps = _require(doc, "metric")
            n = int(doc.get("dim", len(comps)))
            if len(comps) != n:
                raise InputError(f"metric has {len(comps)} rows, expected {n}")
            point = [to_complex(p) for p in doc.get("point", [0] * n)]
            return kind, CoordinateMetric.from_components(comps, point), tol
        entry = catalog.get(_require(doc, "name"))
        params = doc.get("params", {})
        if not isinstance(params, dict):
            raise InputError("params must be an object")
        try:
            obj = entry.build(**params)
        except ConstraintError as exc:
            raise ValidationFailure(str(exc)) from None
        return entry.kind, obj, tol
    except (InputError, ValidationFailure):
        raise
    except ExprError as exc:
        raise InputError(f"expression error: {exc}") from None
    except (TypeError, ValueError, KeyError) as exc:
        raise InputError(str(exc)) from None


def structure_document(s, tol=None):
    doc = {"type": "lie_hermitian", "dim": s.n, "d": to_keyed(s, 0.0)}
    if tol is not None:
        doc["options"] = {"tol": tol}
    return encode(doc)


def metric_document(m: CoordinateMetric, tol=None):
    doc = {"type": "coordinate", "dim": m.n, "metric": [[to_text(c) for c in row] for row in m.components],
           "point": list(m.point)}
    if tol is not None:
        doc["options"] = {"tol": tol}
    return encode(doc)


def emit_catalog(name, params=None):
    entry = catalog.get(name)
    obj = entry.build(**(params or {}))
    if entry.kind == "coordinate":
        return metric_document(obj)
    return structure_document(obj)


def validation_summary(kind, obj, tol):
    if kind == "coordinate":
        return obj.validate(tol)
    return validate_structure(obj, tol)
