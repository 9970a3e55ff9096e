"""Parameter and point files.

Parameter files are JSON objects with a ``kind`` field; complex numbers are
written as ``[re, im]`` (plain numbers are accepted on input).  Point files
and value tables are CSV.  Floats go through ``repr``/``'.17g'`` so that a
write/read cycle is exact.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .core import CanonicalParams, FuchsianParams, SymmetricHeunParams
from .transform import StandardHeunParams

KINDS = ("standard", "fuchsian", "symmetric", "canonical")
VALUE_HEADER = ["re", "im", "F_re", "F_im", "dF_re", "dF_im", "tail", "residual"]


class InputError(ValueError):
    """Malformed or inconsistent input file."""


def enc(z) -> list:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def dec(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v):
        return complex(v[0], v[1])
    raise InputError(f"not a complex number: {v!r}")


def _decs(v, n: int, name: str) -> tuple:
    if not isinstance(v, (list, tuple)) or len(v) != n:
        raise InputError(f"{name} must have {n} entries")
    return tuple(dec(x) for x in v)


def params_to_dict(p) -> dict:
    if isinstance(p, CanonicalParams):
        return {"kind": "canonical", "phi": enc(p.phi), "chi": [enc(c) for c in p.chi], "lam": enc(p.lam)}
    if isinstance(p, SymmetricHeunParams):
        return {"kind": "symmetric", "points": [enc(z) for z in p.points.z], "chi": [enc(c) for c in p.chi],
                "lam": enc(p.lam)}
    if isinstance(p, FuchsianParams):
        return {"kind": "fuchsian", "points": [enc(z) for z in p.points.z], "alpha": [enc(a) for a in p.alpha],
                "beta": [enc(b) for b in p.beta], "lam": enc(p.lam)}
    if isinstance(p, StandardHeunParams):
        return {"kind": "standard", **{k: enc(getattr(p, k)) for k in
                                       ("a", "gamma", "delta", "epsilon", "alpha", "beta", "lam")}}
    raise TypeError(type(p).__name__)


def params_from_dict(d: dict):
    if not isinstance(d, dict) or "kind" not in d:
        raise InputError("parameter file needs a 'kind' field")
    kind = d["kind"]
    try:
        if kind == "canonical":
            return CanonicalParams(dec(d["phi"]), _decs(d["chi"], 4, "chi"), dec(d.get("lam", 0.0)))
        if kind == "symmetric":
            return SymmetricHeunParams(_decs(d["points"], 4, "points"), _decs(d["chi"], 4, "chi"),
                                       dec(d.get("lam", 0.0)))
        if kind == "fuchsian":
            return FuchsianParams(_decs(d["points"], 4, "points"), _decs(d["alpha"], 4, "alpha"),
                                  _decs(d["beta"], 4, "beta"), dec(d.get("lam", 0.0)))
        if kind == "standard":
            a, g, dl, al, be = (dec(d[k]) for k in ("a", "gamma", "delta", "alpha", "beta"))
            lam = dec(d.get("lam", 0.0))
            if "epsilon" in d:
                return StandardHeunParams(a, g, dl, dec(d["epsilon"]), al, be, lam)
            return StandardHeunParams.from_exponents(a, g, dl, al, be, lam)
    except KeyError as err:
        raise InputError(f"missing field {err} for kind {kind!r}") from None
    except (TypeError, ValueError) as err:
        raise InputError(str(err)) from None
    raise InputError(f"unknown kind {kind!r}; expected one of {KINDS}")


def read_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as err:
        raise InputError(f"cannot read {path}: {err.strerror}") from None
    except json.JSONDecodeError as err:
        raise InputError(f"{path}: invalid JSON ({err.msg} at line {err.lineno})") from None


def load_params(path):
    return params_from_dict(read_json(path))


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, allow_nan=True) + "\n"


def read_points(path) -> np.ndarray:
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as err:
        raise InputError(f"cannot read {path}: {err.strerror}") from None
    if not rows or [c.strip() for c in rows[0][:2]] != ["re", "im"]:
        raise InputError(f"{path}: header must be 're,im'")
    pts = []
    for k, row in enumerate(rows[1:], start=2):
        if not row or not "".join(row).strip():
            continue
        try:
            pts.append(complex(float(row[0]), float(row[1])))
        except (ValueError, IndexError):
            raise InputError(f"{path}:{k}: expected two numbers") from None
    return np.array(pts, dtype=complex)


def fmt(x: float) -> str:
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return format(float(x), ".17g")


def write_csv(path, header, rows):
    lines = [",".join(header)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if path is None or str(path) == "-":
        return text
    Path(path).write_text(text)
    return text
