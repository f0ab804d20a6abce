"""JSON formats for laws, points, ring elements and matrices.

Law file::

    {"prime": 3, "precision": 6, "param_vars": 1, "degree_cutoff": 6,
     "dim": 1, "level": 1, "name": "...",
     "components": [[{"xexp": [1, 0], "texp": [0], "coeff": 1}, ...], ...]}

Points file::

    {"points": [[[{"texp": [0], "coeff": 3}], ...], ...]}

i.e. a point is a list of coordinates and a coordinate is a list of terms.
Residues are written in the range [0, p^k).
"""
from __future__ import annotations

import json
from pathlib import Path

from .fgl import BUILTIN_LAWS, FormalGroupLaw, StandardPoint
from .series import MultiSeries, RingDescriptor, RingElement


class FormatError(ValueError):
    pass


def dumps(obj) -> str:
    """Deterministic JSON: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _require(data, key, kind=int):
    if key not in data:
        raise FormatError(f"missing field {key!r}")
    val = data[key]
    if kind is int and (not isinstance(val, int) or isinstance(val, bool)):
        raise FormatError(f"field {key!r} must be an integer")
    return val


# ---------------------------------------------------------------------------
# ring elements and points


def ring_to_json(x: RingElement):
    m = x.descriptor.param_vars
    return [{"texp": list(key[:m]), "coeff": c} for key, c in sorted(x.terms.items())]


def ring_from_json(data, descriptor: RingDescriptor) -> RingElement:
    if isinstance(data, int) and not isinstance(data, bool):
        return RingElement.constant(descriptor, data)
    if not isinstance(data, list):
        raise FormatError("a coordinate must be an integer or a list of terms")
    m = descriptor.param_vars
    terms = {}
    for t in data:
        if not isinstance(t, dict) or "coeff" not in t:
            raise FormatError("term must be an object with 'coeff'")
        texp = t.get("texp", [0] * m)
        if len(texp) != m or any(not isinstance(e, int) or e < 0 for e in texp):
            raise FormatError(f"texp must list {m} non-negative integers")
        key = tuple(texp)
        terms[key] = terms.get(key, 0) + int(t["coeff"])
    return RingElement(descriptor, terms)


def point_to_json(P: StandardPoint):
    return [ring_to_json(c) for c in P.coordinates]


def point_from_json(law: FormalGroupLaw, data, check_level=True) -> StandardPoint:
    if not isinstance(data, list):
        raise FormatError("a point must be a list of coordinates")
    coords = [ring_from_json(c, law.descriptor) for c in data]
    if check_level:
        return law.point(coords)
    return StandardPoint(tuple(coords))


def points_to_json(points, law: FormalGroupLaw | None = None):
    out = {"points": [point_to_json(P) for P in points]}
    if law is not None:
        out["prime"] = law.prime
    return out


def points_from_json(law: FormalGroupLaw, data):
    if not isinstance(data, dict) or "points" not in data:
        raise FormatError("points file must be an object with a 'points' list")
    if "prime" in data and data["prime"] != law.prime:
        from .errors import ModulusMismatch
        raise ModulusMismatch(f"points file is over p = {data['prime']}, law over p = {law.prime}")
    return [point_from_json(law, P) for P in data["points"]]


# ---------------------------------------------------------------------------
# laws


def law_to_json(law: FormalGroupLaw):
    d = law.descriptor
    n = 2 * law.dim
    comps = []
    for f in law.components:
        comps.append([{"xexp": list(k[:n]), "texp": list(k[n:]), "coeff": c}
                      for k, c in sorted(f.terms.items())])
    return {"prime": d.prime, "precision": d.precision, "param_vars": d.param_vars,
            "degree_cutoff": d.degree_cutoff, "dim": law.dim, "level": law.level,
            "name": law.name, "components": comps}


def law_from_json(data, precision=None, cutoff=None) -> FormalGroupLaw:
    if not isinstance(data, dict):
        raise FormatError("law file must be a JSON object")
    if "builtin" in data:
        return builtin_law(data["builtin"], data.get("prime", 3),
                           precision or data.get("precision", 6), data.get("level"),
                           cutoff or data.get("degree_cutoff", 6))
    p = _require(data, "prime")
    k = precision or _require(data, "precision")
    m = data.get("param_vars", 0)
    D = cutoff or data.get("degree_cutoff", 6)
    dim = _require(data, "dim")
    N = _require(data, "level")
    comps = data.get("components")
    if not isinstance(comps, list) or len(comps) != dim:
        raise FormatError(f"'components' must list {dim} components")
    try:
        desc = RingDescriptor(p, k, m, D)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
    series = []
    for comp in comps:
        terms = {}
        if not isinstance(comp, list):
            raise FormatError("a component must be a list of terms")
        for t in comp:
            if not isinstance(t, dict) or "coeff" not in t or "xexp" not in t:
                raise FormatError("term must have 'xexp' and 'coeff'")
            xexp, texp = t["xexp"], t.get("texp", [0] * m)
            if len(xexp) != 2 * dim or len(texp) != m:
                raise FormatError(f"term exponents must have lengths {2 * dim} and {m}")
            key = tuple(xexp) + tuple(texp)
            terms[key] = terms.get(key, 0) + int(t["coeff"])
        series.append(MultiSeries(desc, 2 * dim, terms))
    return FormalGroupLaw(desc, dim, N, series, data.get("name", "law"))


def builtin_law(name, p=3, k=6, N=None, D=6) -> FormalGroupLaw:
    if name not in BUILTIN_LAWS:
        raise FormatError(f"unknown built-in law {name!r}; choose from {sorted(BUILTIN_LAWS)}")
    return BUILTIN_LAWS[name](p=p, k=k, N=N, D=D)


def load_json(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from exc


def load_law(spec: str, precision=None, cutoff=None) -> FormalGroupLaw:
    """A law file path, or ``builtin:<name>``."""
    if spec.startswith("builtin:"):
        return builtin_law(spec.split(":", 1)[1], k=precision or 6, D=cutoff or 6)
    return law_from_json(load_json(spec), precision, cutoff)
