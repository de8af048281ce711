"""Command-line front end.

Subcommands: ``validate``, ``coeffs``, ``bound``, ``apply``, ``verify <suite>``
and ``report``.  Output is JSON (CSV for coefficient tables).  Numeric knobs
come from flags, then from ``--config FILE`` (a JSON object), then from
defaults: a flag always wins over the file.

Exit codes: 0 success, 1 domain validation failure, 2 tolerance breach,
3 configuration error.  Errors are reported as JSON on stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .boundary import (BoundaryFunction, HardyFunction, l2_norm_circle, l2_norm_curve,
                       random_trig_poly)
from .cauchy import (TO_DISK, cauchy_representation_check, cauchy_transform_e2_norm,
                     transplant_boundary)
from .domain import AnalyticDomain, load_domain, validate_conformal
from .errors import (BoundaryNotAnalytic, CauchyBoundError, ConfigError, InversionDiverged,
                     NotConformal, NotInjective, SizeError)
from .kernel import RadiiPair, tail_sum_bound
from .power_series import series_to_pairs
from .series_operator import (SeriesOperator, apply_series_operator, equivalence_check,
                              operator_norm_lower_mc, operator_norm_upper,
                              partial_sum_bounds, partial_sum_convergence)

LOGGER = logging.getLogger(__name__)

EXIT_OK, EXIT_INVALID, EXIT_BREACH, EXIT_CONFIG = 0, 1, 2, 3
SUITES = ("representation", "equivalence", "isometry", "convergence")


def _pow2(name):
    def check(v):
        v = int(v)
        if v < 8 or v & (v - 1):
            raise ConfigError(f"{name} must be a power of two >= 8")
        return v
    return check


def _int_range(name, lo, hi):
    def check(v):
        v = int(v)
        if not lo <= v <= hi:
            raise ConfigError(f"{name} must lie in [{lo}, {hi}]")
        return v
    return check


def _positive(name):
    def check(v):
        v = float(v)
        if not v > 0:
            raise ConfigError(f"{name} must be positive")
        return v
    return check


def _M(v):
    if v is None or str(v).lower() == "auto":
        return None
    return _int_range("M", 0, 255)(v)


def _optional(conv):
    return lambda v: None if v is None else conv(v)


def _schedule(v):
    items = v.split(",") if isinstance(v, str) else list(v)
    out = [int(x) for x in items]
    if not out or any(x < 0 for x in out):
        raise ConfigError("schedule must be a nonempty list of nonnegative integers")
    return out


# knob -> (converter, default)
KNOBS = {
    "M": (_M, None),
    "grid": (_optional(_pow2("grid")), None),
    "r": (_optional(_positive("r")), None),
    "s": (_optional(_positive("s")), None),
    "R_check": (_optional(_positive("R_check")), None),
    "N": (_pow2("N"), 256),
    "N_quad": (_pow2("N_quad"), 512),
    "probes": (_int_range("probes", 1, 4096), 16),
    "seed": (_int_range("seed", 0, 2**32 - 1), 7),
    "degree": (_int_range("degree", 0, 64), 8),
    "functions": (_int_range("functions", 1, 10000), 20),
    "mc_trials": (_int_range("mc_trials", 1, 100000), 200),
    "schedule": (_schedule, [2, 4, 8, 16]),
    "probe_radius": (_positive("probe_radius"), None),
    "tol": (_optional(_positive("tol")), None),
}

DEFAULT_TOL = {
    "representation": 1e-9,
    "equivalence": 1e-8,
    "isometry": 1e-10,
    "convergence": 1e-10,
    "boundedness": 1e-9,
}
DEFAULT_PROBE_RADIUS = {"representation": 0.7, "equivalence": 0.8}


@dataclass
class RunConfig:
    command: str
    domain: str
    suite: str | None = None
    knobs: dict = field(default_factory=dict)
    out: str | None = None
    f_path: str | None = None
    fmt: str = "json"

    def __getattr__(self, name):
        knobs = self.__dict__.get("knobs", {})
        if name in knobs:
            return knobs[name]
        raise AttributeError(name)


def resolve_knobs(flags: dict, config_path: str | None) -> dict:
    """Merge flag values over config-file values over defaults, validating each."""
    file_values = {}
    if config_path:
        try:
            with open(config_path) as fh:
                file_values = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {config_path}: {exc}") from exc
        if not isinstance(file_values, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(file_values) - set(KNOBS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    knobs = {}
    for name, (conv, default) in KNOBS.items():
        raw = flags.get(name)
        if raw is None:
            raw = file_values.get(name, default)
        try:
            knobs[name] = conv(raw) if raw is not None else None
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {name}: {raw!r}") from exc
    return knobs


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def _radii(cfg: RunConfig, dom: AnalyticDomain) -> RadiiPair | None:
    if cfg.r is None and cfg.s is None:
        return None
    default = RadiiPair.default(dom.R)
    return RadiiPair(cfg.r or default.r, cfg.s or default.s)


def _operator(cfg: RunConfig, dom: AnalyticDomain) -> SeriesOperator:
    return SeriesOperator.build(dom, _radii(cfg, dom), cfg.M, cfg.grid)


def _random_probes(rng, count, radius):
    return radius * np.sqrt(rng.random(count)) * np.exp(2j * np.pi * rng.random(count))


def _tol(cfg: RunConfig, suite: str) -> float:
    return cfg.tol if cfg.tol is not None else DEFAULT_TOL[suite]


def run_validate(cfg: RunConfig, dom: AnalyticDomain) -> tuple[dict, int]:
    report = validate_conformal(dom.psi, cfg.R_check or dom.R)
    return {"domain": dom.name, "R": dom.R, **report.to_dict()}, EXIT_OK


def coefficient_rows(op: SeriesOperator):
    e = op.expansion
    bounds = e.bounds()
    for m in range(e.M + 1):
        for n in range(e.M + 1):
            yield m, n, float(e.a[m, n].real), float(e.a[m, n].imag), float(bounds[m, n])


def invariant_checks(op: SeriesOperator) -> dict:
    """The four structural properties every kernel expansion must satisfy."""
    a = op.expansion.a
    M = op.M
    flipped = np.fliplr(a)
    diag = max((abs(np.trace(flipped, offset=M - k)) for k in range(1, M + 1)), default=0.0)
    checks = {
        "a00_minus_1": float(abs(a[0, 0] - 1)),
        "symmetry": float(np.abs(a - a.T).max()),
        "diagonal_sums": float(diag),
        "bound_excess": float((np.abs(a) - op.expansion.bounds()).max()),
    }
    checks["pass"] = bool(checks["a00_minus_1"] <= 1e-10 and checks["symmetry"] <= 1e-10
                          and checks["diagonal_sums"] <= 1e-9
                          and checks["bound_excess"] <= 1e-9)
    return checks


def run_coeffs(cfg: RunConfig, dom: AnalyticDomain) -> tuple[str, int, dict]:
    op = _operator(cfg, dom)
    checks = invariant_checks(op)
    if cfg.fmt == "json":
        text = _dumps({"rows": [list(r) for r in coefficient_rows(op)], "invariants": checks}) + "\n"
        return text, (EXIT_OK if checks["pass"] else EXIT_BREACH), checks
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["m", "n", "re", "im", "paper_bound"])
    for row in coefficient_rows(op):
        writer.writerow([row[0], row[1], repr(row[2]), repr(row[3]), repr(row[4])])
    return buf.getvalue(), (EXIT_OK if checks["pass"] else EXIT_BREACH), checks


def bound_summary(op: SeriesOperator) -> dict:
    e = op.expansion
    return {
        "sup_H": e.sup_H, "r": e.radii.r, "s": e.radii.s, "M": e.M, "grid_N": e.grid_N,
        "abs_sum": e.abs_sum, "tail_bound": e.tail_bound, "norm_bound": e.norm_bound,
        "norm_upper": operator_norm_upper(op), "warnings": list(e.warnings),
    }


def run_bound(cfg: RunConfig, dom: AnalyticDomain) -> tuple[dict, int]:
    return bound_summary(_operator(cfg, dom)), EXIT_OK


def run_apply(cfg: RunConfig, dom: AnalyticDomain) -> tuple[dict, int]:
    if not cfg.f_path:
        raise ConfigError("apply needs --f FILE (BoundaryFunction JSON)")
    try:
        with open(cfg.f_path) as fh:
            f = BoundaryFunction.from_dict(json.load(fh))
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise ConfigError(f"cannot read {cfg.f_path}: {exc}") from exc
    op = _operator(cfg, dom)
    g = apply_series_operator(op, f)
    return {"M": op.M, "taylor": series_to_pairs(g.taylor), "hardy_norm": g.norm(),
            "input_norm": l2_norm_circle(f), "norm_upper": operator_norm_upper(op)}, EXIT_OK


def suite_representation(cfg: RunConfig, dom: AnalyticDomain) -> dict:
    rng = np.random.default_rng(cfg.seed)
    radius = cfg.probe_radius or DEFAULT_PROBE_RADIUS["representation"]
    worst = 0.0
    for _ in range(cfg.functions):
        g = HardyFunction(rng.standard_normal(cfg.degree + 1)
                          + 1j * rng.standard_normal(cfg.degree + 1))
        probes = _random_probes(rng, cfg.probes, radius)
        worst = max(worst, cauchy_representation_check(dom, g, probes, cfg.N))
    tol = _tol(cfg, "representation")
    return {"max_error": worst, "N": cfg.N, "tol": tol, "pass": worst <= tol}


def suite_equivalence(cfg: RunConfig, dom: AnalyticDomain, op: SeriesOperator) -> dict:
    rng = np.random.default_rng(cfg.seed)
    radius = cfg.probe_radius or DEFAULT_PROBE_RADIUS["equivalence"]
    worst = 0.0
    for _ in range(cfg.functions):
        f = random_trig_poly(rng, cfg.degree, cfg.N)
        probes = _random_probes(rng, cfg.probes, radius)
        worst = max(worst, equivalence_check(op, f, probes, cfg.N_quad))
    tol = _tol(cfg, "equivalence")
    upper = operator_norm_upper(op)
    lower = operator_norm_lower_mc(op, cfg.mc_trials, cfg.seed)
    return {"max_error": worst, "M": op.M, "N_quad": cfg.N_quad, "norm_upper": upper,
            "norm_lower_mc": lower, "tol": tol,
            "pass": worst <= tol and lower <= upper + 1e-9}


def suite_isometry(cfg: RunConfig, dom: AnalyticDomain) -> dict:
    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    for _ in range(cfg.functions):
        f = random_trig_poly(rng, cfg.degree, cfg.N)
        disk = transplant_boundary(dom, f, TO_DISK)
        worst = max(worst, abs(l2_norm_circle(disk) - l2_norm_curve(f, dom)))
    tol = _tol(cfg, "isometry")
    return {"max_error": worst, "tol": tol, "pass": worst <= tol}


def suite_convergence(cfg: RunConfig, dom: AnalyticDomain, op: SeriesOperator) -> dict:
    rng = np.random.default_rng(cfg.seed)
    schedule = [m for m in cfg.schedule if m <= op.M]
    slack = _tol(cfg, "convergence")
    worst_excess = -np.inf
    deviations = None
    for _ in range(cfg.functions):
        f = random_trig_poly(rng, cfg.degree, cfg.N)
        dev = partial_sum_convergence(op, f, schedule)
        bnd = partial_sum_bounds(op, f, schedule)
        worst_excess = max(worst_excess, float(np.max(dev - bnd)) if schedule else -np.inf)
        deviations = dev if deviations is None else np.maximum(deviations, dev)
    return {"schedule": schedule, "max_deviations": [float(x) for x in deviations],
            "tail_bounds": [tail_sum_bound(op.expansion.sup_H, op.expansion.radii, m)
                            for m in schedule],
            "worst_excess_over_bound": worst_excess if schedule else None,
            "pass": bool(not schedule or worst_excess <= slack)}


def suite_boundedness(cfg: RunConfig, dom: AnalyticDomain, op: SeriesOperator) -> dict:
    rng = np.random.default_rng(cfg.seed)
    upper = operator_norm_upper(op)
    worst = -np.inf
    for _ in range(cfg.functions):
        f = random_trig_poly(rng, cfg.degree, cfg.N)
        lhs = cauchy_transform_e2_norm(dom, f)
        worst = max(worst, lhs - upper * l2_norm_curve(f, dom))
    tol = _tol(cfg, "boundedness")
    return {"norm_upper": upper, "worst_excess": worst, "tol": tol, "pass": worst <= tol}


def run_verify(cfg: RunConfig, dom: AnalyticDomain) -> tuple[dict, int]:
    if cfg.suite == "representation":
        out = suite_representation(cfg, dom)
    elif cfg.suite == "isometry":
        out = suite_isometry(cfg, dom)
    elif cfg.suite in ("equivalence", "convergence"):
        op = _operator(cfg, dom)
        fn = suite_equivalence if cfg.suite == "equivalence" else suite_convergence
        out = fn(cfg, dom, op)
    else:
        raise ConfigError(f"unknown suite {cfg.suite!r}; choose from {SUITES}")
    return {"suite": cfg.suite, "domain": dom.name, **out}, EXIT_OK if out["pass"] else EXIT_BREACH


def run_report(cfg: RunConfig, dom: AnalyticDomain) -> tuple[dict, int]:
    validation = validate_conformal(dom.psi, cfg.R_check or dom.R).to_dict()
    op = _operator(cfg, dom)
    suites = {
        "invariants": invariant_checks(op),
        "representation": suite_representation(cfg, dom),
        "isometry": suite_isometry(cfg, dom),
        "equivalence": suite_equivalence(cfg, dom, op),
        "convergence": suite_convergence(cfg, dom, op),
        "boundedness": suite_boundedness(cfg, dom, op),
    }
    ok = all(s["pass"] for s in suites.values())
    doc = {"version": __version__, "domain": dom.to_spec(), "validation": validation,
           "bound": bound_summary(op), "suites": suites, "pass": ok}
    return doc, EXIT_OK if ok else EXIT_BREACH


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cauchy-bound", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--domain", required=True,
                        help="domain spec JSON file or preset (disk, perturbed-disk-EPS, cubic-blob-EPS)")
    common.add_argument("--config", help="JSON file of knob values (flags take precedence)")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--format", dest="fmt", choices=("json", "csv"), default=None)
    common.add_argument("-v", "--verbose", action="store_true")
    for name in KNOBS:
        flag = "--" + name.replace("_", "-")
        extra = ["--grid-N"] if name == "grid" else []
        common.add_argument(flag, *extra, dest=name, default=None)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="conformality report")
    sub.add_parser("coeffs", parents=[common], help="kernel coefficient table (CSV)")
    sub.add_parser("bound", parents=[common], help="operator norm bound (JSON)")
    p = sub.add_parser("apply", parents=[common], help="apply the series operator")
    p.add_argument("--f", dest="f_path", help="BoundaryFunction JSON on the unit circle")
    p = sub.add_parser("verify", parents=[common], help="run one verification suite")
    p.add_argument("suite", choices=SUITES)
    sub.add_parser("report", parents=[common], help="full pipeline as one JSON document")
    return parser


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fail(code: int, exc: BaseException) -> int:
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc),
                                 "exit_code": code}) + "\n")
    return code


def run(config: RunConfig) -> int:
    """Execute one command; returns the process exit code."""
    try:
        dom = load_domain(config.domain)
        if config.command == "coeffs":
            text, code, checks = run_coeffs(config, dom)
            _emit(text, config.out)
            if config.out:
                sys.stdout.write(_dumps({"out": config.out, "invariants": checks}) + "\n")
            return code
        handler = {"validate": run_validate, "bound": run_bound, "apply": run_apply,
                   "verify": run_verify, "report": run_report}[config.command]
        doc, code = handler(config, dom)
        _emit(_dumps(doc) + "\n", config.out)
        return code
    except (NotConformal, NotInjective, BoundaryNotAnalytic, InversionDiverged) as exc:
        return _fail(EXIT_INVALID, exc)
    except (ConfigError, SizeError) as exc:
        return _fail(EXIT_CONFIG, exc)
    except CauchyBoundError as exc:
        return _fail(EXIT_INVALID, exc)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    flags = {name: getattr(args, name) for name in KNOBS}
    try:
        knobs = resolve_knobs(flags, args.config)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, exc)
    fmt = args.fmt or ("csv" if args.command == "coeffs" else "json")
    cfg = RunConfig(args.command, args.domain, getattr(args, "suite", None), knobs,
                    args.out, getattr(args, "f_path", None), fmt)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
