"""Command-line harness: run experiments, verify condition constants, and
fit empirical convergence rates from trace files."""

import argparse
import json
import math
import os
import sys

import numpy as np

from . import methods, problems, trace as trace_mod
from .methods import (
    ConditionalSubgradient,
    FastGradient,
    IncompatibleConfig,
    ProxGradient,
    ProxSubgradient,
    UniversalGradient,
)
from .steprules import BacktrackFailed, BacktrackSmooth, BacktrackUniversal

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_VIOLATION = 2


class ConfigError(ValueError):
    pass


def _default_tol():
    env = os.environ.get("FOM_TOL")
    return float(env) if env else methods.DEFAULT_TOL


def config_from_dict(spec, iterations):
    name = spec.get("name")
    if name == "conditional_subgradient":
        return ConditionalSubgradient(
            iterations=iterations, nu=spec.get("nu", 1.0),
            schedule=spec.get("schedule", "theta"))
    if name == "prox_gradient":
        return ProxGradient(iterations=iterations, rule=BacktrackSmooth(
            r=spec.get("r", 2.0), t_init=spec.get("t_init", 1.0)))
    if name == "prox_subgradient":
        return ProxSubgradient(iterations=iterations, C=spec.get("C", 1.0))
    if name == "fast_gradient":
        return FastGradient(iterations=iterations, gamma=spec.get("gamma", 2.0),
                            rule=BacktrackSmooth(r=spec.get("r", 2.0),
                                                 t_init=spec.get("t_init", 1.0)))
    if name == "universal_gradient":
        return UniversalGradient(
            iterations=iterations, eps=spec.get("eps", 1e-3),
            rule=BacktrackUniversal(eps=spec.get("eps", 1e-3),
                                    r=spec.get("r", 2.0),
                                    t_init=spec.get("t_init", 1.0)))
    raise ConfigError("unknown method %r" % (name,))


def _load_run_config(path):
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError("cannot read config: %s" % exc)
    for key in ("instance", "method", "iterations"):
        if key not in cfg:
            raise ConfigError("config missing %r" % key)
    return cfg


def cmd_run(args):
    try:
        cfg = _load_run_config(args.config)
        inst_spec = cfg["instance"]
        instance = problems.make_instance(
            inst_spec["name"], seed=inst_spec.get("seed", 0),
            **inst_spec.get("params", {}))
        # Declared-constant overrides, mainly for fault-injection checks.
        instance.constants.update(inst_spec.get("constants", {}))
        config = config_from_dict(cfg["method"], cfg["iterations"])
        methods.validate_compatibility(instance, config)
    except (ConfigError, KeyError, IncompatibleConfig, TypeError) as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG

    tol = cfg.get("tolerance", _default_tol())
    reference = None
    if cfg.get("reference", instance.known_optimum is not None):
        reference = problems.reference_optimum(
            instance, budget=cfg.get("reference_budget", 20000))

    out_dir = args.out or cfg.get("out", ".")
    os.makedirs(out_dir, exist_ok=True)
    try:
        result = methods.run(instance, config, reference=reference, tol=tol)
    except BacktrackFailed as exc:
        summary = {"violations": ["backtracking failed: %s" % exc]}
        with open(os.path.join(out_dir, "summary.json"), "w") as fh:
            json.dump(summary, fh, indent=2)
        print("run aborted: %s" % exc, file=sys.stderr)
        return EXIT_VIOLATION

    result.write_csv(os.path.join(out_dir, "trace.csv"))
    result.write_summary(os.path.join(out_dir, "summary.json"))
    if result.violations:
        for v in result.violations[:20]:
            print("violation: %s" % v, file=sys.stderr)
        return EXIT_VIOLATION
    print("ok: %d iterations, final gap %.6e"
          % (len(result.rows), result.final.gap))
    return EXIT_OK


def cmd_verify(args):
    try:
        instance = problems.make_instance(args.instance, seed=args.seed)
    except KeyError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    overrides = {}
    for item in args.scale_constant or []:
        try:
            name, factor = item.split("=")
            overrides[name] = instance.constants[name] * float(factor)
        except (ValueError, KeyError) as exc:
            print("config error: bad --scale-constant %r (%s)" % (item, exc),
                  file=sys.stderr)
            return EXIT_CONFIG
    report = problems.verify_constants(instance, samples=args.samples,
                                       seed=args.seed + 1,
                                       constants=overrides or None)
    print(json.dumps(report, indent=2, default=float))
    return EXIT_OK if report["passed"] else EXIT_VIOLATION


def fit_tail_slope(rows, reference_value, tail_fraction=0.5):
    """Least-squares slope of log(suboptimality) against log(k) over the
    final tail_fraction of the trace."""
    ks, vals = [], []
    start = int(len(rows) * (1.0 - tail_fraction))
    for r in rows[start:]:
        sub = r.primal - reference_value
        if sub > 0 and math.isfinite(sub):
            ks.append(math.log(r.k))
            vals.append(math.log(sub))
    if len(ks) < 10:
        raise ValueError("fewer than 10 usable rows in the trace tail")
    slope = float(np.polyfit(ks, vals, 1)[0])
    return slope


_THEORY_EXPONENT = {
    "prox_gradient": -1.0,
    "prox_subgradient": -0.5,
    "fast_gradient": -2.0,
    "conditional_subgradient": -1.0,
    "universal_gradient": None,  # depends on nu; reported from the summary
}


def cmd_rates(args):
    try:
        rows = trace_mod.read_csv(args.trace)
        summary_path = args.summary or os.path.join(
            os.path.dirname(os.path.abspath(args.trace)), "summary.json")
        with open(summary_path) as fh:
            summary = json.load(fh)
        reference_value = summary["reference_value"]
    except (OSError, ValueError, KeyError) as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    try:
        slope = fit_tail_slope(rows, reference_value, args.tail)
    except ValueError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    report = {
        "method": summary.get("method"),
        "rows": len(rows),
        "tail_fraction": args.tail,
        "fitted_slope": slope,
        "theory_exponent": _THEORY_EXPONENT.get(summary.get("method")),
    }
    print(json.dumps(report, indent=2))
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="fomcert",
                                description="first-order methods with "
                                            "certified duality gaps")
    sub = p.add_subparsers(dest="command", required=True)

    pr = sub.add_parser("run", help="run a configured experiment")
    pr.add_argument("--config", required=True)
    pr.add_argument("--out", default=None)
    pr.set_defaults(func=cmd_run)

    pv = sub.add_parser("verify", help="verify declared condition constants")
    pv.add_argument("--instance", required=True)
    pv.add_argument("--seed", type=int, default=0)
    pv.add_argument("--samples", type=int, default=10000)
    pv.add_argument("--scale-constant", action="append", metavar="NAME=FACTOR")
    pv.set_defaults(func=cmd_verify)

    pt = sub.add_parser("rates", help="fit the empirical convergence rate")
    pt.add_argument("--trace", required=True)
    pt.add_argument("--summary", default=None)
    pt.add_argument("--tail", type=float, default=0.5)
    pt.set_defaults(func=cmd_rates)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


def main_script():
    sys.exit(main())


if __name__ == "__main__":
    main_script()
