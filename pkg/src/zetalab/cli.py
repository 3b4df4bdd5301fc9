"""Batch command-line front end.

Command groups::

    zetalab weights-check
    zetalab powersum search|zoo
    zetalab zeros load|gen-bow|gen-ap|gen-lines|cluster
    zetalab detect sweep|flexible|classify|residual
    zetalab experiment bow|ap|dichotomy|census

Configuration resolves in order: built-in defaults, then a JSON config file
(--config), then repeated --set key=value overrides, then dedicated flags.
Unknown configuration keys are rejected. The resolved snapshot is embedded
in every report; --dry-run prints it and exits without computing.

Exit codes: 0 success; 1 a checked invariant failed (identity violated,
construction impossible, ordering broken); 2 configuration or precondition
error. Errors are emitted as a single JSON object on stderr.

Output directory: --out flag, else the ZETALAB_OUT environment variable,
else ./zetalab-out.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field, fields

import numpy as np

from . import _kernels

_CONFIG_KEYS: dict[str, type] = {
    "t_scale": float,
    "table_limit": int,
    "zeros_path": str,
    "zeros_format": str,
    "out": str,
    "jobs": int,
    "seed": int,
    "weight_tolerance": float,
    "cluster_gap": float,
    "neighborhood_radius": float,
    "walk_radius": float,
    "detection_threshold": float,
    "window": float,
    "stop_scale": float,
    "u_grid_ratio": float,
    "y_lo": float,
    "y_hi": float,
}

_SCALE_KEYS = ("cluster_gap", "neighborhood_radius", "walk_radius",
               "detection_threshold", "window", "stop_scale", "u_grid_ratio")


@dataclass
class RunConfig:
    """Resolved run configuration; every report embeds its snapshot."""

    t_scale: float = 100.0
    table_limit: int = 200_000
    zeros_path: str | None = None
    zeros_format: str = "ordinates"
    out: str | None = None
    jobs: int = 1
    seed: int = 0
    weight_tolerance: float = 1e-10
    cluster_gap: float | None = None
    neighborhood_radius: float | None = None
    walk_radius: float | None = None
    detection_threshold: float | None = None
    window: float | None = None
    stop_scale: float | None = None
    u_grid_ratio: float | None = None
    y_lo: float | None = None
    y_hi: float | None = None

    def apply(self, key: str, raw):
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"unknown configuration key {key!r}")
        caster = _CONFIG_KEYS[key]
        try:
            value = caster(raw)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"bad value for {key!r}: {e}") from None
        setattr(self, key, value)

    def scale_params(self):
        from .zerosets import ScaleParams

        kw = {}
        for key in _SCALE_KEYS:
            v = getattr(self, key)
            if v is not None:
                kw[key] = v
        if self.y_lo is not None or self.y_hi is not None:
            if self.y_lo is None or self.y_hi is None:
                raise ConfigError("y_lo and y_hi must be given together")
            kw["y_range"] = (self.y_lo, self.y_hi)
        try:
            return ScaleParams(t_scale=self.t_scale, **kw)
        except ValueError as e:
            raise ConfigError(str(e)) from None

    def out_dir(self) -> str:
        return self.out or os.environ.get("ZETALAB_OUT") or "./zetalab-out"

    def snapshot(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["out_resolved"] = self.out_dir()
        d["kernel_backend"] = _kernels.BACKEND
        return d


class ConfigError(Exception):
    pass


class InvariantFailure(Exception):
    pass


def _fail(code: int, exc: Exception) -> int:
    payload = {"error": type(exc).__name__, "message": str(exc),
               "exit_code": code}
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)
    return code


def _emit(report, cfg: RunConfig) -> None:
    from .experiments import write_report

    json_path, csv_paths = write_report(report, cfg.out_dir())
    print(json_path)
    for p in csv_paths:
        print(p)


def _report(name: str, cfg: RunConfig, records: dict, summary: dict,
            traces: dict | None = None, command_args: dict | None = None):
    from .experiments import ExperimentReport, _provenance

    return ExperimentReport(
        name=name,
        params={"run_config": cfg.snapshot(),
                "command_args": command_args or {}},
        records=records,
        summary=summary,
        provenance=_provenance(),
        traces=traces or {},
    )


def _load_zeroset(cfg: RunConfig):
    from .zerosets import fixture_zeroset, load_zeros

    if cfg.zeros_path is None:
        return fixture_zeroset()
    return load_zeros(cfg.zeros_path, fmt=cfg.zeros_format)


def _tables(cfg: RunConfig):
    from .arith import sieve_tables

    return sieve_tables(cfg.table_limit)


def _weight(cfg: RunConfig):
    from .weights import make_bump_weight

    return make_bump_weight(tolerance=cfg.weight_tolerance)


# ---------------------------------------------------------------------------
# command implementations
# ---------------------------------------------------------------------------


def _cmd_weights_check(cfg: RunConfig, args) -> int:
    import numpy as np

    from .weights import decay_envelope

    w = _weight(cfg)
    ev = w.mellin_W0(0.0)
    log2_dev = abs(ev.value - math.log(2.0))
    xs = np.geomspace(1.0, 1e6, 2000)
    part_dev = float(np.max(np.abs(w.partition_check(xs))))
    ts = np.linspace(0.0, 400.0, 401)
    ok_env = True
    worst = 0.0
    for sigma in (-1.0, 0.0, 1.0):
        vals, _ = w.mellin_W0_many(sigma + 1j * ts)
        ratio = np.abs(vals) / np.array([decay_envelope(sigma + 1j * t)
                                         for t in ts])
        worst = max(worst, float(ratio.max()))
        ok_env &= bool(ratio.max() <= 1.0)
    checks = {
        "w0_at_zero_is_log2": bool(log2_dev <= 1e-8),
        "partition_of_unity": bool(part_dev <= 1e-10),
        "decay_envelope": ok_env,
    }
    rep = _report("weights-check", cfg,
                  records={"log2_deviation": log2_dev,
                           "partition_deviation": part_dev,
                           "worst_envelope_ratio": worst,
                           "quadrature_error": ev.estimated_error},
                  summary={"checks": checks, "all_ok": all(checks.values())})
    _emit(rep, cfg)
    if not all(checks.values()):
        raise InvariantFailure(f"weight checks failed: {checks}")
    return 0


def _powersum_config(cfg: RunConfig, args):
    from . import powersum as ps

    gen = args.generator
    if gen == "ap":
        return ps.gen_vertical_ap(args.r, args.a)
    if gen == "signed":
        return ps.gen_signed(args.k, args.a)
    if gen == "smooth":
        return ps.gen_smooth_poisson(args.r, args.a)
    if gen == "bourgain":
        return ps.gen_bourgain(args.k, args.a)
    if gen == "random":
        # Seeded config that satisfies all five lemma hypotheses by
        # construction: anchor (0, 1), Im z >= 0, |Re z| < 1/(10A),
        # coefficient arguments within 0.1 everywhere, B just above the mass.
        rng = np.random.default_rng(cfg.seed)
        r = int(rng.integers(2, 33))
        a = float(rng.uniform(4.0, 16.0))
        cap = 1.0 / (10.0 * a)
        terms = [(0.0 + 0.0j, 1.0 + 0.0j)]
        for _ in range(r):
            z = complex(rng.uniform(-cap, cap), rng.uniform(0.0, 4.0))
            phi = rng.uniform(-0.1, 0.1)
            mag = abs(rng.normal(0.0, 0.7)) + 0.05
            terms.append((z, mag * complex(math.cos(phi), math.sin(phi))))
        mass = sum(abs(c) for _, c in terms)
        return ps.PowerSumConfig(terms=terms, a_param=a, b_param=mass * 1.001,
                                 label=f"random-{cfg.seed}")
    raise ConfigError(f"unknown generator {gen!r}")


def _cmd_powersum_search(cfg: RunConfig, args) -> int:
    from . import powersum as ps

    config = _powersum_config(cfg, args)
    violations = ps.validate_config(config)
    if violations and not args.allow_invalid:
        raise ConfigError(
            "config violates hypotheses: "
            + "; ".join(str(v) for v in violations))
    res = ps.power_sum_search(config, tolerance=args.tolerance,
                              allow_invalid=args.allow_invalid)
    rep = _report(
        "powersum-search", cfg,
        command_args={"generator": args.generator, "r": args.r, "k": args.k,
                      "a": args.a, "tolerance": args.tolerance,
                      "allow_invalid": args.allow_invalid},
        records={
            "generator": args.generator,
            "label": config.label,
            "size": config.size,
            "a_param": config.a_param,
            "b_param": config.b_param,
            "violations": [str(v) for v in violations],
            "t_star": res.t_star,
            "value": res.value,
            "magnitude": res.magnitude,
            "grid_points": res.grid_points,
            "lipschitz": res.lipschitz,
            "certified_gap": res.certified_gap,
            "threshold": res.threshold,
            "refinements": res.refinements,
        },
        summary={"meets_threshold": res.meets_threshold,
                 "magnitude": res.magnitude},
    )
    _emit(rep, cfg)
    return 0


def _cmd_powersum_zoo(cfg: RunConfig, args) -> int:
    from . import powersum as ps

    a = 10.0
    zoo = {
        "ap": (ps.gen_vertical_ap(8, a), set()),
        "signed": (ps.gen_signed(3, a), {4}),
        "smooth": (ps.gen_smooth_poisson(12, a), {1}),
        "bourgain": (ps.gen_bourgain(1, a), set()),
    }
    rows = {}
    ok = True
    for name, (config, expected) in zoo.items():
        violations = ps.validate_config(config)
        got = {v.hypothesis for v in violations}
        match = got == expected
        ok &= match
        res = ps.power_sum_search(config, allow_invalid=True)
        rows[name] = {
            "size": config.size,
            "violated_hypotheses": sorted(got),
            "expected_violations": sorted(expected),
            "expectation_met": match,
            "magnitude": res.magnitude,
            "t_star": res.t_star,
            "meets_threshold": res.meets_threshold,
        }
    rep = _report("powersum-zoo", cfg, records={"zoo": rows},
                  summary={"all_expectations_met": ok})
    _emit(rep, cfg)
    if not ok:
        raise InvariantFailure("generator zoo expectations violated")
    return 0


def _cmd_zeros_load(cfg: RunConfig, args) -> int:
    zs = _load_zeroset(cfg)
    rep = _report(
        "zeros-load", cfg,
        records={
            "count": len(zs),
            "gamma_range": [float(zs.gamma.min()), float(zs.gamma.max())]
            if len(zs) else None,
            "lines": None if zs.lines is None else zs.lines.tolist(),
            "lines_inferred": zs.lines_inferred,
            "complete_range": list(zs.complete_range)
            if zs.complete_range else None,
            "source": zs.source,
            "c_f": zs.c_f,
        },
        summary={"count": len(zs)},
    )
    _emit(rep, cfg)
    return 0


def _write_zeros_file(zs, cfg: RunConfig, stem: str) -> str:
    outdir = cfg.out_dir()
    os.makedirs(outdir, exist_ok=True)
    path = os.path.join(outdir, stem + ".zeros")
    with open(path, "w") as f:
        f.write("# beta gamma\n")
        for b, g in zip(zs.beta.tolist(), zs.gamma.tolist()):
            f.write(f"{b!r} {g!r}\n")
    return path


def _cmd_zeros_gen(cfg: RunConfig, args) -> int:
    from .zerosets import gen_bow, gen_line_config, gen_vertical_ap_zeros

    if args.zeros_cmd == "gen-bow":
        zs = gen_bow(args.t0, args.eps, args.c)
        stem = f"bow-t{args.t0:g}-e{args.eps:g}-c{args.c:g}"
    elif args.zeros_cmd == "gen-ap":
        params = cfg.scale_params()
        spacing = 2.0 * math.pi * args.c / params.log_t
        zs = gen_vertical_ap_zeros(args.beta, args.gamma_start or cfg.t_scale,
                                   spacing, args.count)
        stem = f"ap-c{args.c:g}-n{args.count}"
    else:  # gen-lines
        try:
            spec = json.loads(args.spec)
            zs = gen_line_config([(float(b), [float(g) for g in gs])
                                  for b, gs in spec])
        except (json.JSONDecodeError, TypeError, ValueError) as e:
            raise ConfigError(f"bad line spec: {e}") from None
        stem = "lines"
    path = _write_zeros_file(zs, cfg, stem)
    rep = _report(
        f"zeros-{args.zeros_cmd}", cfg,
        command_args={k: getattr(args, k) for k in
                      ("t0", "eps", "c", "beta", "gamma_start", "count",
                       "spec") if hasattr(args, k)},
        records={"path": path, "count": len(zs),
                 "lines": None if zs.lines is None else zs.lines.tolist(),
                 "kind": args.zeros_cmd},
        summary={"count": len(zs)},
    )
    _emit(rep, cfg)
    print(path)
    return 0


def _cmd_zeros_cluster(cfg: RunConfig, args) -> int:
    from .zerosets import cluster_decompose

    zs = _load_zeroset(cfg)
    params = cfg.scale_params()
    dec = cluster_decompose(zs, params)
    sizes = [c.size for c in dec.clusters]
    rep = _report(
        "zeros-cluster", cfg,
        records={
            "gap": dec.gap,
            "cluster_count": len(sizes),
            "sizes": sizes,
            "clusters": [
                {"line_beta": c.line_beta, "size": c.size,
                 "gamma_min": float(zs.gamma[c.indices].min()),
                 "gamma_max": float(zs.gamma[c.indices].max())}
                for c in dec.clusters
            ],
        },
        summary={"cluster_count": len(sizes),
                 "size_sum": sum(sizes), "zeros": len(zs)},
    )
    _emit(rep, cfg)
    return 0


def _cmd_detect(cfg: RunConfig, args) -> int:
    from . import detectors as det
    from .experiments import _outcome_dict

    zs = _load_zeroset(cfg)
    params = cfg.scale_params()
    if args.detect_cmd == "sweep":
        tables = _tables(cfg) if args.evaluand == "prime" else None
        w = _weight(cfg)
        outcome = det.detect_half_isolated_U(
            zs, args.index, args.y, tables, w, params,
            evaluand=args.evaluand,
            check_predicate=not args.no_predicate_check)
        rep = _report("detect-sweep", cfg,
                      command_args={"index": args.index, "y": args.y,
                                    "evaluand": args.evaluand},
                      records={"outcome": _outcome_dict(outcome)},
                      summary={"passed": outcome.passed,
                               "magnitude": outcome.magnitude,
                               "best_u": outcome.parameter},
                      traces={"sweep": outcome.trace})
        _emit(rep, cfg)
        return 0
    if args.detect_cmd == "flexible":
        tables = _tables(cfg)
        w = _weight(cfg)
        fd = det.build_flexible_detector(zs, args.index, args.a_initial,
                                         tables, w, params)
        rho0 = complex(zs.beta[args.index], zs.gamma[args.index])
        rep = _report(
            "detect-flexible", cfg,
            command_args={"index": args.index, "a_initial": args.a_initial},
            records={
                "k": fd.k,
                "factors": fd.factors(),
                "a_final": fd.a_final,
                "support": list(fd.poly.support),
                "declared_support": list(fd.declared_support),
                "nnz": int(fd.poly.ns.size),
                "value_at_rho0": fd.value_at(rho0),
                "levels": [_outcome_dict(lv.outcome, keep_trace=False)
                           for lv in fd.levels],
            },
            summary={"k": fd.k, "magnitude": abs(fd.value_at(rho0))},
        )
        _emit(rep, cfg)
        return 0
    if args.detect_cmd == "classify":
        from .zerosets import cluster_decompose

        tables = _tables(cfg)
        dec = cluster_decompose(zs, params)
        labels = det.classify_clusters(zs, dec, params, tables)
        rep = _report(
            "detect-classify", cfg,
            records={
                "clusters": [
                    {"cluster_id": lab.cluster_id, "size": lab.size,
                     "line_beta": lab.line_beta, "labels": lab.labels,
                     "detected_count": lab.detected_count,
                     "type2_count": lab.type2_count,
                     "right_count": lab.right_count,
                     "typed_subset": lab.typed_subset}
                    for lab in labels
                ],
            },
            summary={"clusters": len(labels)},
        )
        _emit(rep, cfg)
        return 0
    # residual
    tables = _tables(cfg)
    w = _weight(cfg)
    report = det.explicit_formula_residual(zs, args.index, args.u, tables, w,
                                           params)
    rep = _report(
        "detect-residual", cfg,
        command_args={"index": args.index, "u": args.u},
        records={
            "index": report.index, "rho0": report.rho0, "u": report.u,
            "window": report.window,
            "prime_side": report.prime_side, "main_term": report.main_term,
            "window_sum": report.window_sum,
            "trivial_term": report.trivial_term,
            "residual": report.residual, "tail_bound": report.tail_bound,
            "parts": report.parts,
        },
        summary={"residual": report.residual,
                 "tail_bound": report.tail_bound, "ok": report.ok},
    )
    _emit(rep, cfg)
    if not report.ok:
        raise InvariantFailure(
            f"explicit-formula residual {report.residual:.3e} exceeds "
            f"tail bound {report.tail_bound:.3e}")
    return 0


def _cmd_experiment(cfg: RunConfig, args) -> int:
    from . import experiments as exp

    w = _weight(cfg)
    if args.experiment_cmd == "bow":
        rep = exp.bow_experiment(args.t0, args.eps, args.c, weight=w,
                                 y=args.y)
        _emit(rep, cfg)
        s = rep.summary
        if not (s["middle_below_bottom"] and s["middle_below_control"]
                and s["control_within_tail"]):
            raise InvariantFailure(f"bow orderings violated: {s}")
        return 0
    if args.experiment_cmd == "ap":
        rep = exp.ap_obstruction_experiment(c=args.c, count=args.count,
                                            weight=w)
        _emit(rep, cfg)
        s = rep.summary
        if not (s["middle_below_bottom"] and s["bottom_attains_threshold"]
                and s["far_spacing_is_log2"]):
            raise InvariantFailure(f"ap orderings violated: {s}")
        return 0
    if args.experiment_cmd == "dichotomy":
        zs = _load_zeroset(cfg)
        tables = _tables(cfg)
        overrides = {k: getattr(cfg, k) for k in _SCALE_KEYS
                     if getattr(cfg, k) is not None}
        rep = exp.dichotomy_experiment(zs, tables, weight=w, jobs=cfg.jobs,
                                       params_overrides=overrides or None)
        _emit(rep, cfg)
        s = rep.summary
        if not (s["dichotomy_holds_all"] and s["all_certified"]
                and s["identity_all_ok"]):
            raise InvariantFailure(f"dichotomy failed: {s}")
        return 0
    # census
    zs = _load_zeroset(cfg)
    tables = _tables(cfg)
    params = cfg.scale_params()
    rep = exp.census(zs, tables, params=params, weight=w)
    _emit(rep, cfg)
    if not rep.summary["size_sum_equals_zeros"]:
        raise InvariantFailure("census cluster sizes do not cover the set")
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    # Global flags live in a parent parser with SUPPRESS defaults so they
    # are accepted both before and after the subcommand; the last occurrence
    # wins and absent flags leave no attribute behind.
    g = argparse.ArgumentParser(add_help=False)
    g.add_argument("--config", default=argparse.SUPPRESS,
                   help="JSON file of configuration keys")
    g.add_argument("--set", action="append", dest="sets",
                   default=argparse.SUPPRESS, metavar="KEY=VALUE",
                   help="override one configuration key (repeatable)")
    g.add_argument("--out", default=argparse.SUPPRESS,
                   help="output directory (else $ZETALAB_OUT)")
    g.add_argument("--jobs", type=int, default=argparse.SUPPRESS,
                   help="parallel workers for per-zero sweeps")
    g.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                   help="seed for randomized generators")
    g.add_argument("--dry-run", action="store_true",
                   default=argparse.SUPPRESS,
                   help="print the resolved configuration and exit")

    p = argparse.ArgumentParser(
        prog="zetalab",
        description="zero-detection laboratory: weights, power sums, "
                    "zero sets, detectors, experiments",
        parents=[g])
    sub = p.add_subparsers(dest="group", required=True)

    sub.add_parser("weights-check", parents=[g])

    ps = sub.add_parser("powersum")
    pss = ps.add_subparsers(dest="powersum_cmd", required=True)
    p_search = pss.add_parser("search", parents=[g])
    p_search.add_argument("--generator", default="bourgain",
                          choices=["ap", "signed", "smooth", "bourgain",
                                   "random"])
    p_search.add_argument("--r", type=int, default=8)
    p_search.add_argument("--k", type=int, default=1)
    p_search.add_argument("--a", type=float, default=10.0)
    p_search.add_argument("--tolerance", type=float, default=None)
    p_search.add_argument("--allow-invalid", action="store_true")
    pss.add_parser("zoo", parents=[g])

    pz = sub.add_parser("zeros")
    pzs = pz.add_subparsers(dest="zeros_cmd", required=True)
    pzs.add_parser("load", parents=[g])
    g_bow = pzs.add_parser("gen-bow", parents=[g])
    g_bow.add_argument("--t0", type=float, default=math.exp(10.0))
    g_bow.add_argument("--eps", type=float, default=0.55)
    g_bow.add_argument("--c", type=float, default=1.0)
    g_ap = pzs.add_parser("gen-ap", parents=[g])
    g_ap.add_argument("--beta", type=float, default=0.5)
    g_ap.add_argument("--gamma-start", type=float, default=None)
    g_ap.add_argument("--c", type=float, default=1.0)
    g_ap.add_argument("--count", type=int, default=80)
    g_lines = pzs.add_parser("gen-lines", parents=[g])
    g_lines.add_argument("--spec", required=True,
                         help='JSON like [[0.5,[100,101]],[0.75,[200]]]')
    pzs.add_parser("cluster", parents=[g])

    pd = sub.add_parser("detect")
    pds = pd.add_subparsers(dest="detect_cmd", required=True)
    d_sweep = pds.add_parser("sweep", parents=[g])
    d_sweep.add_argument("--index", type=int, default=0)
    d_sweep.add_argument("--y", type=float, default=12.0)
    d_sweep.add_argument("--evaluand", default="prime",
                         choices=["prime", "zero_model"])
    d_sweep.add_argument("--no-predicate-check", action="store_true")
    d_flex = pds.add_parser("flexible", parents=[g])
    d_flex.add_argument("--index", type=int, default=0)
    d_flex.add_argument("--a-initial", type=float, default=1.0e4)
    pds.add_parser("classify", parents=[g])
    d_res = pds.add_parser("residual", parents=[g])
    d_res.add_argument("--index", type=int, default=0)
    d_res.add_argument("--u", type=float, default=50.0)

    pe = sub.add_parser("experiment")
    pes = pe.add_subparsers(dest="experiment_cmd", required=True)
    e_bow = pes.add_parser("bow", parents=[g])
    e_bow.add_argument("--t0", type=float, default=math.exp(10.0))
    e_bow.add_argument("--eps", type=float, default=0.55)
    e_bow.add_argument("--c", type=float, default=1.0)
    e_bow.add_argument("--y", type=float, default=12.0)
    e_ap = pes.add_parser("ap", parents=[g])
    e_ap.add_argument("--c", type=float, default=1.0)
    e_ap.add_argument("--count", type=int, default=80)
    pes.add_parser("dichotomy", parents=[g])
    pes.add_parser("census", parents=[g])
    return p


def _resolve_config(args) -> RunConfig:
    cfg = RunConfig()
    config_path = getattr(args, "config", None)
    if config_path:
        try:
            with open(config_path) as f:
                data = json.load(f)
        except OSError as e:
            raise ConfigError(f"cannot read config file: {e}") from None
        except json.JSONDecodeError as e:
            raise ConfigError(f"config file is not valid JSON: {e}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        for k, v in data.items():
            cfg.apply(k, v)
    for item in getattr(args, "sets", []):
        if "=" not in item:
            raise ConfigError(f"--set needs KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        cfg.apply(k.strip(), v.strip())
    for flag in ("out", "jobs", "seed"):
        value = getattr(args, flag, None)
        if value is not None:
            setattr(cfg, flag, value)
    return cfg


_DISPATCH = {
    "weights-check": _cmd_weights_check,
    "powersum": None,  # resolved below
    "zeros": None,
    "detect": _cmd_detect,
    "experiment": _cmd_experiment,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve_config(args)
    except ConfigError as e:
        return _fail(2, e)
    if getattr(args, "dry_run", False):
        print(json.dumps(cfg.snapshot(), sort_keys=True, indent=2))
        return 0
    try:
        if args.group == "weights-check":
            return _cmd_weights_check(cfg, args)
        if args.group == "powersum":
            if args.powersum_cmd == "search":
                return _cmd_powersum_search(cfg, args)
            return _cmd_powersum_zoo(cfg, args)
        if args.group == "zeros":
            if args.zeros_cmd == "load":
                return _cmd_zeros_load(cfg, args)
            if args.zeros_cmd == "cluster":
                return _cmd_zeros_cluster(cfg, args)
            return _cmd_zeros_gen(cfg, args)
        if args.group == "detect":
            return _cmd_detect(cfg, args)
        if args.group == "experiment":
            return _cmd_experiment(cfg, args)
        raise ConfigError(f"unknown command group {args.group!r}")
    except ConfigError as e:
        return _fail(2, e)
    except InvariantFailure as e:
        return _fail(1, e)
    except Exception as e:  # precondition and validation surfaces
        from .powersum import ResourceBudgetError
        from .zerosets import CompletenessError

        if isinstance(e, (CompletenessError, FileNotFoundError)):
            return _fail(2, e)
        if isinstance(e, ResourceBudgetError):
            return _fail(2, e)
        if isinstance(e, ValueError):
            return _fail(2, e)
        from .detectors import DetectorConstructionError

        if isinstance(e, DetectorConstructionError):
            return _fail(1, e)
        raise


if __name__ == "__main__":
    sys.exit(main())
