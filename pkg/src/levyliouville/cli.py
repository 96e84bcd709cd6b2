"""Command-line front end: ``levyliouville <command> --spec FILE [options]``.

Commands are ``symbol``, ``apply``, ``classify``, ``check`` and ``duality``.
Each run writes one key-value report (format in the README) to standard
output or ``--out``.  Exit codes: 0 success, 1 parse or usage error,
2 hypothesis failure, 3 numeric tolerance failure.
"""
import argparse
from dataclasses import replace
import math
import sys

import numpy as np

from ._accel import BACKEND, set_num_threads
from .errors import HypothesisError, LevyLiouvilleError, SpecParseError, TailBoundExceededError, UnsupportedError
from .liouville import ClassifyOptions, check_hypotheses, classify, operator_id, verify_solution
from .operator_apply import DEFAULT_APPLY, apply_report
from .specfile import JOBS, build_candidate, build_measure, build_polynomial, format_value, parse_spec
from .symbols import duality_check, symbol_closed_form, symbol_quadrature
from .testfunctions import gaussian

__all__ = ["EXIT_OK", "EXIT_PARSE", "EXIT_HYPOTHESIS", "EXIT_TOLERANCE", "Report", "resolve_options",
           "run", "main"]

EXIT_OK, EXIT_PARSE, EXIT_HYPOTHESIS, EXIT_TOLERANCE = 0, 1, 2, 3
STATUS = {EXIT_OK: "ok", EXIT_HYPOTHESIS: "hypothesis-failure", EXIT_TOLERANCE: "tolerance-failure"}


class Report:
    """Ordered sections of ``key = value`` lines; tables use ``columns``/``row`` keys."""

    def __init__(self):
        self.sections = []

    def section(self, name):
        body = []
        self.sections.append((name, body))
        return body

    @staticmethod
    def put(body, key, value):
        body.append((key, format_value(value)))

    @staticmethod
    def table(body, columns, rows):
        body.append(("columns", " | ".join(columns)))
        for r in rows:
            body.append(("row", " | ".join(format_value(v) for v in r)))

    def text(self):
        out = ["# levyliouville report"]
        for name, body in self.sections:
            out += ["", f"[{name}]"] + [f"{k} = {v}" for k, v in body]
        return "\n".join(out) + "\n"


def _default_points(N):
    return [[t] + [0.0] * (N - 1) for t in (0.0, 0.5, 1.0, 2.0, 5.0)]


def resolve_options(spec, job, tol=None, grid=None):
    """Job options after defaults and command-line overrides (all keys explicit)."""
    o = dict(spec.options)
    N = spec.N
    if tol is not None:
        o["tol"] = float(tol)
    if job == "symbol":
        base = {"tol": 1e-4, "n_xi": 30, "xi_min": 0.1, "xi_max": 10.0}
        if grid is not None:
            o["n_xi"] = int(grid)
    elif job == "apply":
        base = {"tol": DEFAULT_APPLY.tol, "width": 1.0, "points": _default_points(N)}
    elif job == "classify":
        base = {"tol": 1e-4, "scan_box": 4.0, "scan_resolution": 64, "scan_tol": 1e-2, "verify": True}
        if grid is not None:
            o["scan_resolution"] = int(grid)
    elif job == "check":
        base = {"tol": 1e-4}
    else:
        base = {"tol": 1e-3 if N == 1 else 1e-2, "grid": 2048 if N == 1 else 96,
                "box": 20.0 if N == 1 else 24.0, "threshold": 1e-4, "width": 1.0}
        if grid is not None:
            o["grid"] = int(grid)
    unknown = sorted(set(o) - set(base) - ({"xi"} if job == "symbol" else set()))
    if unknown:
        raise SpecParseError([(0, f"option {k!r} does not apply to job {job!r}") for k in unknown])
    base.update(o)
    return base


def _points(values, N, what):
    arr = np.asarray(values, dtype=float)
    if N == 1 and arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[1] != N:
        raise SpecParseError([(0, f"{what} must be a list of {N}-vectors")])
    return arr


def _frequencies(opts, N):
    if "xi" in opts:
        return _points(opts["xi"], N, "xi")
    r = np.geomspace(opts["xi_min"], opts["xi_max"], opts["n_xi"])
    if N == 1:
        return r[:, None]
    # directions advance by the golden angle so all orientations are visited
    ang = np.arange(r.size) * math.pi * (3.0 - math.sqrt(5.0))
    d = np.zeros((r.size, N))
    d[:, 0], d[:, 1] = np.cos(ang), np.sin(ang)
    return r[:, None] * d


# -- jobs ---------------------------------------------------------------------------

def _job_symbol(m, spec, opts, rep):
    xi = _frequencies(opts, m.N)
    quad = symbol_quadrature(m, xi)
    try:
        closed = symbol_closed_form(m)(xi)
    except UnsupportedError:
        closed = None
    body = rep.section("symbol")
    if closed is None:
        Report.put(body, "provenance", "quadrature")
        Report.table(body, ["xi", "quadrature"], [(list(x), complex(q)) for x, q in zip(xi, quad)])
        return EXIT_OK
    err = np.abs(quad - closed) / np.maximum(np.abs(closed), 1e-300)
    Report.put(body, "provenance", "closed-form+quadrature")
    Report.put(body, "max_rel_err", float(err.max()))
    Report.table(body, ["xi", "closed_form", "quadrature", "rel_err"],
                 [(list(x), complex(c), complex(q), float(e)) for x, c, q, e in zip(xi, closed, quad, err)])
    return EXIT_OK if err.max() <= opts["tol"] else EXIT_TOLERANCE


def _job_apply(m, spec, opts, rep):
    X = _points(opts["points"], m.N, "points")
    phi = gaussian(m.N, width=opts["width"])
    body = rep.section("apply")
    Report.put(body, "test_function", f"gaussian(width={opts['width']!r})")
    try:
        res = apply_report(m, phi, X, replace(DEFAULT_APPLY, tol=opts["tol"]))
    except TailBoundExceededError as exc:
        Report.put(body, "error", str(exc))
        return EXIT_TOLERANCE
    Report.put(body, "tail_bound", float(res.tail_bound))
    Report.table(body, ["x", "value"], [(list(x), float(v)) for x, v in zip(X, res.value)])
    return EXIT_OK


def _hypothesis_section(rep, hyp):
    body = rep.section("hypotheses")
    for k in sorted(hyp):
        Report.put(body, k, bool(hyp[k]))


def _job_classify(m, spec, opts, rep):
    co = ClassifyOptions(scan_L=opts["scan_box"], scan_resolution=opts["scan_resolution"],
                         scan_tol=opts["scan_tol"], verify=opts["verify"], residual_tol=opts["tol"])
    try:
        r = classify(m, build_polynomial(spec), co)
    except HypothesisError as exc:
        body = rep.section("hypotheses")
        Report.put(body, "failed", ", ".join(exc.failed))
        return EXIT_HYPOTHESIS
    _hypothesis_section(rep, r.hypotheses)
    zs = r.zero_set
    body = rep.section("zero_set")
    Report.put(body, "spacing", zs.spacing)
    Report.put(body, "G_subset_origin", zs.G_subset_origin)
    Report.put(body, "certificate", zs.certificate)
    Report.table(body, ["center", "kind", "n_points", "radius", "min_modulus"],
                 [(list(c.center), c.kind, c.n_points, c.radius, c.min_modulus) for c in zs.clusters])
    body = rep.section("classification")
    Report.put(body, "conclusion", r.conclusion)
    Report.put(body, "degree_bound", r.degree_bound)
    Report.put(body, "null_space", "; ".join(r.null_space) if r.null_space else "none")
    for i, n in enumerate(r.notes):
        Report.put(body, f"note.{i}", n)
    Report.put(body, "caveat", r.caveat)
    body = rep.section("residuals")
    Report.table(body, ["candidate", "residual", "role"], list(r.residuals))
    if opts["verify"]:
        Report.put(body, "verified", r.verified)
        return EXIT_OK if r.verified else EXIT_TOLERANCE
    return EXIT_OK


def _job_check(m, spec, opts, rep):
    hyp = check_hypotheses(m)
    _hypothesis_section(rep, hyp)
    if not all(hyp.values()):
        return EXIT_HYPOTHESIS
    u = build_candidate(spec)
    if u is None:
        return EXIT_OK
    v = verify_solution(u, m, build_polynomial(spec), tol=opts["tol"])
    body = rep.section("verification")
    Report.put(body, "candidate", u.label)
    Report.put(body, "residual", v.residual)
    Report.put(body, "per_test_function", list(v.per_phi))
    Report.put(body, "verified", v.verified)
    return EXIT_OK if v.verified else EXIT_TOLERANCE


def _job_duality(m, spec, opts, rep):
    phi = gaussian(m.N, width=opts["width"])
    r = duality_check(m, phi, L=opts["box"], n=opts["grid"], threshold=opts["threshold"])
    body = rep.section("duality")
    Report.put(body, "max_rel_err", r.max_rel_err)
    Report.put(body, "n_frequencies", r.n_frequencies)
    Report.put(body, "symbol", r.symbol)
    Report.put(body, "exterior", r.exterior)
    return EXIT_OK if r.max_rel_err <= opts["tol"] else EXIT_TOLERANCE


JOB_RUNNERS = {"symbol": _job_symbol, "apply": _job_apply, "classify": _job_classify,
               "check": _job_check, "duality": _job_duality}


def run(spec, job=None, tol=None, grid=None, threads=None):
    """Execute a parsed spec; returns ``(report_text, exit_code)``.

    Raises
    ------
    SpecParseError
        When no job is given or an option does not apply to the job.
    """
    job = job or spec.job
    if job not in JOBS:
        raise SpecParseError([(0, "no job: pass a command or set [job] type")])
    opts = resolve_options(spec, job, tol, grid)
    m = build_measure(spec)
    rep = Report()
    head = rep.section("report")
    Report.put(head, "job", job)
    Report.put(head, "spec", spec.name or "-")
    Report.put(head, "operator", operator_id(m))
    body = rep.section("options")
    for k in sorted(opts):
        Report.put(body, k, opts[k])
    Report.put(body, "backend", BACKEND)
    Report.put(body, "threads", int(threads or 1))
    try:
        code = JOB_RUNNERS[job](m, spec, opts, rep)
    except LevyLiouvilleError as exc:
        if isinstance(exc, SpecParseError):
            raise
        Report.put(rep.section("error"), "message", f"{type(exc).__name__}: {exc}")
        code = EXIT_TOLERANCE
    Report.put(head, "status", STATUS[code])
    Report.put(head, "exit_code", code)
    return rep.text(), code


def build_parser():
    p = argparse.ArgumentParser(prog="levyliouville", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=JOBS)
    p.add_argument("--spec", required=True, help="operator spec file")
    p.add_argument("--out", help="report path (default: standard output)")
    p.add_argument("--tol", type=float, help="override the job tolerance")
    p.add_argument("--grid", type=int, help="duality grid, classify scan resolution or symbol count")
    p.add_argument("--threads", type=int, default=1, help="numba worker threads")
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    for name in ("tol", "grid", "threads"):
        v = getattr(args, name)
        if v is not None and not v > 0:
            print(f"error: --{name} must be positive", file=sys.stderr)
            return EXIT_PARSE
    try:
        with open(args.spec, encoding="utf-8") as fh:
            text = fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        print(f"error: cannot read spec: {exc}", file=sys.stderr)
        return EXIT_PARSE
    set_num_threads(args.threads)
    try:
        spec = parse_spec(text)
        report, code = run(spec, args.command, args.tol, args.grid, args.threads)
    except SpecParseError as exc:
        for no, msg in exc.errors:
            print(f"{args.spec}:{no}: {msg}", file=sys.stderr)
        return EXIT_PARSE
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(report)
    else:
        sys.stdout.write(report)
    return code


if __name__ == "__main__":
    sys.exit(main())
