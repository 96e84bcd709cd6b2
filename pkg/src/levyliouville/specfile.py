"""Flat key-value operator specification files.

A spec file is UTF-8 text made of sections (``[operator]``, ``[polynomial]``,
``[candidate]``, ``[job]``, ``[options]``), one ``key = value`` per line.
Lines starting with ``#`` and blank lines are ignored.  Lists are bracketed
JSON arrays; catalogue entries are written ``name(key=value, ...)``.  The
complete grammar is documented in the README.

:func:`parse_spec` collects every problem with its line number before
raising :class:`~levyliouville.errors.SpecParseError`;
:func:`serialize_spec` writes the canonical form, and parsing that form
returns an equal :class:`OperatorSpec`.
"""
from dataclasses import dataclass, field
import json
import math
import re

import numpy as np

from .errors import DomainError, SpecParseError
from .measures import (
    ANISOTROPIC, FRACTIONAL_LAPLACIAN, ILW, KINDS, RELATIVISTIC, USER_RADIAL, anisotropic,
    fractional_laplacian, intermediate_long_wave, reflect, relativistic, tempered, user_radial,
)
from .polynomial import MAX_DEGREE, ComplexPolynomial
from .sphere import SphereFunction, catalogue
from .testfunctions import CandidateSolution, Polynomial, Trig

__all__ = [
    "JOBS", "OPTION_TYPES", "OperatorSpec", "parse_spec", "serialize_spec", "build_measure",
    "build_polynomial", "build_candidate", "format_value",
]

JOBS = ("symbol", "apply", "classify", "check", "duality")
SECTIONS = ("operator", "polynomial", "candidate", "job", "options")
OPERATOR_KEYS = ("name", "kind", "N", "s", "sigma", "anisotropy", "profile", "reflected")

# option name -> type; every numeric option must be positive
OPTION_TYPES = {
    "tol": float,
    "grid": int,
    "box": float,
    "threshold": float,
    "width": float,
    "scan_box": float,
    "scan_resolution": int,
    "scan_tol": float,
    "n_xi": int,
    "xi_min": float,
    "xi_max": float,
    "xi": list,
    "points": list,
    "verify": bool,
}

_EXPR = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*(?:\((.*)\))?$")
_INDEX = re.compile(r"^\(?\s*\d+(\s*,\s*\d+)*\s*\)?$")


@dataclass
class OperatorSpec:
    """Validated content of a spec file (see module docstring)."""

    name: str
    kind: str
    N: int
    s: float = None
    sigma: float = None
    anisotropy: object = None  # catalogue expression (str) or coefficient tuple
    profile: str = None
    reflected: bool = False
    polynomial: tuple = ()  # ((multi-index), complex), sorted
    candidate: tuple = ()  # ((multi-index), float) or (("wave", "cos"), ("k", 1.0))
    job: str = None
    options: dict = field(default_factory=dict)


# -- value syntax ----------------------------------------------------------------

def format_value(v):
    """Canonical text of a scalar, list or complex value."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, complex):
        return _format_complex(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(format_value(x) for x in v) + "]"
    return str(v)


def _format_complex(z):
    if z.imag == 0:
        return repr(float(z.real))
    if z.real == 0:
        return f"{float(z.imag)!r}j"
    sign = "-" if math.copysign(1.0, z.imag) < 0 else "+"
    return f"{float(z.real)!r}{sign}{abs(float(z.imag))!r}j"


def _parse_float(text):
    v = float(text)
    if not math.isfinite(v):
        raise ValueError(f"{text!r} is not finite")
    return v


def _parse_int(text):
    if not re.fullmatch(r"[+-]?\d+", text):
        raise ValueError(f"{text!r} is not an integer")
    return int(text)


def _parse_bool(text):
    t = text.lower()
    if t in ("true", "yes", "1"):
        return True
    if t in ("false", "no", "0"):
        return False
    raise ValueError(f"{text!r} is not a boolean")


def _parse_complex(text):
    z = complex(text.replace(" ", ""))
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"{text!r} is not finite")
    return z


def _parse_list(text):
    v = json.loads(text)
    if not isinstance(v, list):
        raise ValueError("expected a bracketed list")

    def conv(x):
        if isinstance(x, list):
            return [conv(y) for y in x]
        if isinstance(x, bool) or not isinstance(x, (int, float)):
            raise ValueError("list entries must be numbers")
        return float(x)

    return conv(v)


def _parse_expression(text):
    """``name(k=v, ...)`` -> (name, {k: float}); canonical text is rebuilt by :func:`_expr_text`."""
    m = _EXPR.match(text.strip())
    if not m:
        raise ValueError(f"cannot read expression {text!r}")
    name, body = m.group(1), m.group(2)
    params = {}
    if body and body.strip():
        for item in body.split(","):
            if "=" not in item:
                raise ValueError(f"parameter {item.strip()!r} must be key=value")
            k, v = (t.strip() for t in item.split("=", 1))
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", k):
                raise ValueError(f"bad parameter name {k!r}")
            params[k] = _parse_float(v)
    return name, params


def _expr_text(name, params):
    if not params:
        return name
    return name + "(" + ", ".join(f"{k}={float(params[k])!r}" for k in sorted(params)) + ")"


def _parse_index(text, N):
    if not _INDEX.match(text):
        raise ValueError(f"{text!r} is not a multi-index")
    idx = tuple(int(t) for t in text.strip("() ").split(","))
    if N is not None and len(idx) != N:
        raise ValueError(f"multi-index {text!r} has length {len(idx)}, expected N = {N}")
    return idx


# -- parsing ----------------------------------------------------------------------------

def _lines(text):
    section = None
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            yield no, section, None, None
            continue
        if "=" not in line:
            yield no, section, line, None
            continue
        key, val = (t.strip() for t in line.split("=", 1))
        yield no, section, key, val


def parse_spec(text):
    """Parse and validate spec text.

    Returns
    -------
    OperatorSpec

    Raises
    ------
    SpecParseError
        With every error found, each as ``(line number, message)``; line 0
        marks a missing section or field.
    """
    errors = []
    raw = {sec: {} for sec in SECTIONS}
    where = {}
    seen = set()
    for no, sec, key, val in _lines(text):
        if key is None:
            if sec not in SECTIONS:
                errors.append((no, f"unknown section [{sec}]"))
            elif sec in seen:
                errors.append((no, f"duplicate section [{sec}]"))
            seen.add(sec)
            continue
        if sec is None:
            errors.append((no, "key outside any section"))
            continue
        if sec not in SECTIONS:
            continue
        if val is None:
            errors.append((no, f"expected 'key = value', got {key!r}"))
            continue
        if key in raw[sec]:
            errors.append((no, f"duplicate key {key!r}"))
            continue
        raw[sec][key] = val
        where[(sec, key)] = no

    op = raw["operator"]
    vals = {}

    def get(key, conv, required=False):
        if key not in op:
            if required:
                errors.append((0, f"[operator] is missing required field {key!r}"))
            return None
        try:
            return conv(op[key])
        except (ValueError, DomainError) as exc:
            errors.append((where["operator", key], f"{key}: {exc}"))
            return None

    for key in op:
        if key not in OPERATOR_KEYS:
            errors.append((where["operator", key], f"unknown key {key!r} in [operator]"))
    vals["name"] = op.get("name", "")
    kind = get("kind", str, required=True)
    if kind is not None and kind not in KINDS:
        errors.append((where["operator", "kind"], f"kind must be one of {', '.join(KINDS)}"))
        kind = None
    N = get("N", _parse_int, required=True)
    if N is not None and N < 1:
        errors.append((where["operator", "N"], "N must be a positive integer"))
        N = None
    s = get("s", _parse_float)
    if s is not None and not 0.0 < s < 1.0:
        errors.append((where["operator", "s"], f"s = {s!r} is out of range (0, 1)"))
    sigma = get("sigma", _parse_float)
    if sigma is not None and not sigma > 0:
        errors.append((where["operator", "sigma"], f"sigma = {sigma!r} must be positive"))
    reflected = get("reflected", _parse_bool) or False

    aniso = None
    if "anisotropy" in op:
        t = op["anisotropy"].strip()
        try:
            if t.startswith("["):
                c = _parse_list(t)
                if any(isinstance(x, list) for x in c):
                    raise ValueError("coefficient list must be flat")
                aniso = tuple(c)
            else:
                aniso = _expr_text(*_parse_expression(t))
        except ValueError as exc:
            errors.append((where["operator", "anisotropy"], f"anisotropy: {exc}"))
    profile = None
    if "profile" in op:
        try:
            name, params = _parse_expression(op["profile"])
            if name != "tempered" or set(params) - {"c", "alpha", "lam"} or not {"c", "alpha"} <= set(params):
                raise ValueError("profile must be tempered(c=..., alpha=..., lam=...)")
            profile = _expr_text(name, params)
        except ValueError as exc:
            errors.append((where["operator", "profile"], f"profile: {exc}"))

    # kind-specific requirements
    if kind is not None:
        need_s = kind in (FRACTIONAL_LAPLACIAN, ANISOTROPIC, RELATIVISTIC)
        if need_s and "s" not in op:
            errors.append((0, f"{kind} requires field 's'"))
        if not need_s and "s" in op:
            errors.append((where["operator", "s"], f"{kind} does not take 's'; declare 'sigma'"))
        if kind in (ILW, USER_RADIAL) and "sigma" not in op:
            errors.append((0, f"{kind} requires a declared decay order 'sigma'"))
        if kind in (FRACTIONAL_LAPLACIAN, ANISOTROPIC) and "sigma" in op:
            errors.append((where["operator", "sigma"], f"{kind} has sigma = s; remove 'sigma'"))
        if kind == ANISOTROPIC:
            if "anisotropy" not in op:
                errors.append((0, "Anisotropic requires field 'anisotropy'"))
            if N is not None and N not in (2, 3):
                errors.append((where["operator", "N"], "Anisotropic requires N = 2 or 3"))
        elif "anisotropy" in op:
            errors.append((where["operator", "anisotropy"], "only Anisotropic takes 'anisotropy'"))
        if kind == ILW and N is not None and N != 1:
            errors.append((where["operator", "N"], "IntermediateLongWave requires N = 1"))
        if kind == USER_RADIAL and "profile" not in op:
            errors.append((0, "UserRadial requires field 'profile'"))
        if kind != USER_RADIAL and "profile" in op:
            errors.append((where["operator", "profile"], "only UserRadial takes 'profile'"))

    poly = []
    for key, val in raw["polynomial"].items():
        no = where["polynomial", key]
        try:
            idx = _parse_index(key, N)
            if sum(idx) > MAX_DEGREE:
                raise ValueError(f"degree {sum(idx)} exceeds {MAX_DEGREE}")
            poly.append((idx, _parse_complex(val)))
        except ValueError as exc:
            errors.append((no, f"polynomial: {exc}"))
    poly.sort(key=lambda t: t[0])
    if len({i for i, _ in poly}) != len(poly):
        errors.append((where.get(("polynomial", next(iter(raw["polynomial"]), "")), 0),
                       "polynomial: repeated multi-index"))

    cand = []
    craw = raw["candidate"]
    if "wave" in craw or "k" in craw:
        for key in craw:
            if key not in ("wave", "k"):
                errors.append((where["candidate", key], "a wave candidate takes only 'wave' and 'k'"))
        if craw.get("wave") not in ("cos", "sin"):
            errors.append((where.get(("candidate", "wave"), 0), "wave must be cos or sin"))
        try:
            k = _parse_float(craw.get("k", "1"))
            cand = [("k", k), ("wave", craw.get("wave"))]
        except ValueError as exc:
            errors.append((where["candidate", "k"], f"k: {exc}"))
        if N is not None and N != 1:
            errors.append((where.get(("candidate", "wave"), 0), "wave candidates require N = 1"))
    else:
        for key, val in craw.items():
            try:
                cand.append((_parse_index(key, N), _parse_float(val)))
            except ValueError as exc:
                errors.append((where["candidate", key], f"candidate: {exc}"))
        cand.sort(key=lambda t: t[0])
        if len({i for i, _ in cand}) != len(cand):
            errors.append((where.get(("candidate", next(iter(craw), "")), 0), "candidate: repeated multi-index"))

    job = None
    for key, val in raw["job"].items():
        if key != "type":
            errors.append((where["job", key], f"unknown key {key!r} in [job]"))
        elif val not in JOBS:
            errors.append((where["job", key], f"job must be one of {', '.join(JOBS)}"))
        else:
            job = val

    options = {}
    for key, val in raw["options"].items():
        no = where["options", key]
        typ = OPTION_TYPES.get(key)
        if typ is None:
            errors.append((no, f"unknown option {key!r}"))
            continue
        try:
            v = {float: _parse_float, int: _parse_int, bool: _parse_bool, list: _parse_list}[typ](val)
        except (ValueError, json.JSONDecodeError) as exc:
            errors.append((no, f"{key}: {exc}"))
            continue
        if typ in (float, int) and not v > 0:
            errors.append((no, f"{key} = {val} must be positive"))
            continue
        options[key] = v

    if errors:
        raise SpecParseError(sorted(errors))
    spec = OperatorSpec(vals["name"], kind, N, s, sigma, aniso, profile, bool(reflected),
                        tuple(poly), tuple(cand), job, options)
    try:
        build_measure(spec)
    except DomainError as exc:
        line = where.get(("operator", "anisotropy"), where.get(("operator", "profile"), 0))
        raise SpecParseError([(line, str(exc))]) from exc
    return spec


def serialize_spec(spec):
    """Canonical text of an :class:`OperatorSpec`."""
    out = ["[operator]"]
    if spec.name:
        out.append(f"name = {spec.name}")
    out.append(f"kind = {spec.kind}")
    out.append(f"N = {spec.N}")
    for key in ("s", "sigma"):
        if getattr(spec, key) is not None:
            out.append(f"{key} = {format_value(float(getattr(spec, key)))}")
    if spec.anisotropy is not None:
        a = spec.anisotropy
        out.append(f"anisotropy = {a if isinstance(a, str) else format_value(list(a))}")
    if spec.profile is not None:
        out.append(f"profile = {spec.profile}")
    if spec.reflected:
        out.append("reflected = true")
    if spec.polynomial:
        out += ["", "[polynomial]"]
        out += [f"{','.join(map(str, idx))} = {_format_complex(complex(c))}" for idx, c in spec.polynomial]
    if spec.candidate:
        out += ["", "[candidate]"]
        for key, val in spec.candidate:
            if isinstance(key, tuple):
                out.append(f"{','.join(map(str, key))} = {format_value(float(val))}")
            else:
                out.append(f"{key} = {format_value(val)}")
    if spec.job:
        out += ["", "[job]", f"type = {spec.job}"]
    if spec.options:
        out += ["", "[options]"]
        out += [f"{k} = {format_value(spec.options[k])}" for k in sorted(spec.options)]
    return "\n".join(out) + "\n"


# -- construction ---------------------------------------------------------------------------

def _sphere_density(spec):
    a = spec.anisotropy
    if isinstance(a, str):
        name, params = _parse_expression(a)
        return catalogue(name, spec.N, **params)
    return SphereFunction(spec.N, a)


def build_measure(spec):
    """The :class:`~levyliouville.measures.LevyMeasure` described by ``spec``."""
    k = spec.kind
    if k == FRACTIONAL_LAPLACIAN:
        m = fractional_laplacian(spec.N, spec.s)
    elif k == ANISOTROPIC:
        m = anisotropic(_sphere_density(spec), spec.s)
    elif k == RELATIVISTIC:
        m = relativistic(spec.N, spec.s, spec.sigma)
    elif k == ILW:
        m = intermediate_long_wave(spec.sigma)
    else:
        _, p = _parse_expression(spec.profile)
        m = user_radial(spec.N, tempered(p["c"], p["alpha"], p.get("lam", 0.0), spec.N), spec.sigma,
                        label=spec.name or "user")
    return reflect(m) if spec.reflected else m


def build_polynomial(spec):
    return ComplexPolynomial(spec.N, dict(spec.polynomial))


def build_candidate(spec):
    """The ``[candidate]`` section as a CandidateSolution, or None if absent."""
    if not spec.candidate:
        return None
    d = dict(spec.candidate)
    if "wave" in d:
        k = float(d["k"])
        A, B = (1.0, 0.0) if d["wave"] == "cos" else (0.0, 1.0)
        return CandidateSolution(Trig(1, [([k], A, B)]), label=f"{d['wave']}({k!r}*x)")
    from .liouville import polynomial_label

    coeffs = {idx: c for idx, c in spec.candidate}
    return CandidateSolution(Polynomial(spec.N, coeffs), label=polynomial_label(coeffs, spec.N))
