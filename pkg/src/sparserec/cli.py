"""Command-line entry point.

One executable, eleven subcommands: instance generation (gen-matrix,
gen-problem), recovery runs (recover), diagnostics (rip, certify,
validate-moments), the four Monte Carlo experiments, and SVG plot emission
from summary tables.

Flag handling: every flag can also be supplied through a JSON config file
(--config), with explicit flags overriding file values. The environment
variable SPARSEREC_SEED, when set, overrides the base seed everywhere.
Exit codes: 0 on success, 1 on usage errors, 2 on runtime failures.
"""

import argparse
import dataclasses
import json
import math
import os
import sys
import time
from pathlib import Path

from . import analysis, harness, linalg, recovery, sensing

_PROG = "sparserec"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


# ---------------------------------------------------------------------------
# option plumbing: declared per subcommand, merged defaults < config < flags

def _as_int(v) -> int:
    return int(v)


def _as_float(v) -> float:
    return float(v)


def _as_str(v) -> str:
    return str(v)


def _as_int_list(v) -> tuple[int, ...]:
    if isinstance(v, (list, tuple)):
        return tuple(int(x) for x in v)
    return tuple(int(tok) for tok in str(v).split(",") if tok.strip())


def _as_float_list(v) -> tuple[float, ...]:
    if isinstance(v, (list, tuple)):
        return tuple(float(x) for x in v)
    return tuple(float(tok) for tok in str(v).split(",") if tok.strip())


@dataclasses.dataclass(frozen=True)
class _Opt:
    coerce: object
    default: object = None
    required: bool = False
    choices: tuple = ()
    help: str = ""


def _experiment_opts(iters_iht_default: int, iters_ilat_default: int) -> dict:
    return {
        "m": _Opt(_as_int, 128, help="measurement count"),
        "d": _Opt(_as_int, 256, help="signal dimension"),
        "s-grid": _Opt(_as_int_list, (10, 20, 30, 40, 50, 60), help="comma list of sparsity levels"),
        "eta-grid": _Opt(_as_float_list, (0.25, 0.5, 1.0, 2.0), help="comma list of look-ahead weights"),
        "trials": _Opt(_as_int, 100, help="trials per grid point"),
        "iters-iht": _Opt(_as_int, iters_iht_default, help="iteration budget for the plain algorithm"),
        "iters-ilat": _Opt(_as_int, iters_ilat_default, help="iteration budget for the look-ahead algorithm"),
        "seed": _Opt(_as_int, 0, help="base seed"),
        "rel-tol": _Opt(_as_float, 1e-4, help="relative-error success threshold"),
        "workers": _Opt(_as_int, 0, help="worker processes (0 = all available cores)"),
        "out": _Opt(_as_str, required=True, help="output directory for results.csv/summary.csv/spec.json"),
    }


_SUBCOMMANDS: dict[str, dict[str, _Opt]] = {
    "gen-matrix": {
        "m": _Opt(_as_int, 128, help="rows"),
        "d": _Opt(_as_int, 256, help="columns"),
        "seed": _Opt(_as_int, 0, help="seed"),
        "variance": _Opt(_as_str, "1/m", choices=("1/m", "unit"), help="entry variance of the raw draw"),
        "normalization": _Opt(_as_str, "opnorm1", choices=("opnorm1", "colvar1"),
                              help="opnorm1 rescales to unit operator norm; colvar1 keeps the raw draw"),
        "out": _Opt(_as_str, required=True, help="output CSV path"),
    },
    "gen-problem": {
        "m": _Opt(_as_int, 128),
        "d": _Opt(_as_int, 256),
        "s": _Opt(_as_int, required=True, help="sparsity of the planted signal"),
        "seed": _Opt(_as_int, 0),
        "snr-db": _Opt(_as_float, None, help="add measurement noise at this SNR (omit for noiseless)"),
        "normalization": _Opt(_as_str, "opnorm1", choices=("opnorm1", "colvar1")),
        "out": _Opt(_as_str, required=True, help="output bundle directory"),
    },
    "recover": {
        "problem": _Opt(_as_str, required=True, help="problem bundle directory"),
        "algorithm": _Opt(_as_str, required=True, choices=("iht", "ilat")),
        "eta": _Opt(_as_float, 0.0, help="look-ahead weight (ilat only)"),
        "sparsity": _Opt(_as_int, None, help="override the bundle's sparsity"),
        "iters": _Opt(_as_int, 1000, help="iteration budget"),
        "stop-tol": _Opt(_as_float, 0.0, help="early-stop threshold on the iterate change"),
        "rel-tol": _Opt(_as_float, 1e-4, help="relative-error success threshold"),
        "out": _Opt(_as_str, None, help="output directory (default: the problem directory)"),
    },
    "rip": {
        "matrix": _Opt(_as_str, required=True, help="matrix CSV path"),
        "s": _Opt(_as_int, required=True, help="support size"),
        "samples": _Opt(_as_int, None, help="sample this many supports instead of enumerating"),
        "seed": _Opt(_as_int, 0),
        "out": _Opt(_as_str, None, help="optional JSON report path"),
    },
    "certify": {
        "matrix": _Opt(_as_str, required=True, help="matrix CSV path"),
        "s": _Opt(_as_int, required=True, help="signal sparsity"),
        "eta": _Opt(_as_float, required=True, help="look-ahead weight"),
        "etilde-norm": _Opt(_as_float, None, help="norm of the effective measurement error"),
        "samples": _Opt(_as_int, None, help="sample supports instead of enumerating"),
        "seed": _Opt(_as_int, 0),
        "out": _Opt(_as_str, None, help="optional JSON report path"),
    },
    "validate-moments": {
        "m": _Opt(_as_int, 32),
        "d": _Opt(_as_int, 64),
        "eta-grid": _Opt(_as_float_list, (0.05, 0.1, 0.2)),
        "draws": _Opt(_as_int, 20000),
        "seed": _Opt(_as_int, 0),
        "out": _Opt(_as_str, "moments.csv", help="output CSV path"),
    },
    "phase-transition": _experiment_opts(1000, 1000),
    "noisy-error": {**_experiment_opts(1000, 1000),
                    "snr-db": _Opt(_as_float, required=True, help="measurement SNR in dB")},
    "constant-compute": _experiment_opts(100, 50),
    "threshold-compare": {k: v for k, v in _experiment_opts(1, 1).items()
                          if k not in ("iters-iht", "iters-ilat")},
    "plot": {
        "summary": _Opt(_as_str, required=True, help="summary.csv path"),
        "kind": _Opt(_as_str, required=True, choices=("success", "error", "ratio")),
        "out": _Opt(_as_str, required=True, help="output SVG path"),
    },
}


def _build_parser() -> _Parser:
    parser = _Parser(prog=_PROG, description="sparse recovery with look-ahead thresholding")
    subs = parser.add_subparsers(dest="subcommand")
    for name, opts in _SUBCOMMANDS.items():
        sub = subs.add_parser(name, prog=f"{_PROG} {name}")
        sub.add_argument("--config", default=None, help="JSON file of flag defaults")
        for key, opt in opts.items():
            extra = {}
            if opt.choices:
                extra["choices"] = opt.choices
            sub.add_argument(f"--{key}", default=None, help=opt.help or key, **extra)
    return parser


def _merge_options(name: str, args: argparse.Namespace) -> dict:
    opts = _SUBCOMMANDS[name]
    merged = {key: opt.default for key, opt in opts.items()}
    if args.config is not None:
        try:
            raw = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise _UsageError(f"{_PROG} {name}: cannot read config file: {exc}")
        except json.JSONDecodeError as exc:
            raise _UsageError(f"{_PROG} {name}: config file is not valid JSON: {exc}")
        if not isinstance(raw, dict):
            raise _UsageError(f"{_PROG} {name}: config file must hold a JSON object")
        for key, value in raw.items():
            norm = key.replace("_", "-")
            if norm not in opts:
                raise _UsageError(f"{_PROG} {name}: unknown config key {key!r}")
            merged[norm] = value if value is None else opts[norm].coerce(value)
    for key, opt in opts.items():
        flag_value = getattr(args, key.replace("-", "_"))
        if flag_value is not None:
            try:
                merged[key] = opt.coerce(flag_value)
            except (TypeError, ValueError):
                raise _UsageError(f"{_PROG} {name}: invalid value for --{key}: {flag_value!r}")
    env_seed = os.environ.get("SPARSEREC_SEED")
    if env_seed is not None and "seed" in opts:
        try:
            merged["seed"] = int(env_seed)
        except ValueError:
            raise _UsageError(f"{_PROG} {name}: SPARSEREC_SEED must be an integer, got {env_seed!r}")
    missing = [key for key, opt in opts.items() if opt.required and merged[key] is None]
    if missing:
        flags = ", ".join(f"--{k}" for k in missing)
        raise _UsageError(f"usage: {_PROG} {name} ...\n{_PROG} {name}: error: missing required flag(s): {flags}")
    return merged


# ---------------------------------------------------------------------------
# subcommand implementations

def _cmd_gen_matrix(o: dict) -> int:
    mode = sensing.VarianceMode.ONE_OVER_M if o["variance"] == "1/m" else sensing.VarianceMode.UNIT
    A = sensing.gaussian_matrix(o["m"], o["d"], mode, o["seed"])
    if o["normalization"] == "opnorm1":
        A = sensing.normalize_operator_norm(A)
    out = Path(o["out"])
    out.parent.mkdir(parents=True, exist_ok=True)
    linalg.save_matrix(out, A)
    print(f"wrote {o['m']}x{o['d']} matrix to {out}")
    return 0


def _cmd_gen_problem(o: dict) -> int:
    normalization = sensing.Normalization(o["normalization"])
    problem = sensing.build_problem(o["m"], o["d"], o["s"], o["seed"],
                                    snr_db=o["snr-db"], normalization=normalization)
    out = sensing.save_problem(o["out"], problem)
    print(f"wrote problem bundle to {out}")
    return 0


def _cmd_recover(o: dict) -> int:
    problem = sensing.load_problem(o["problem"])
    config = recovery.RecoveryConfig(
        algorithm=recovery.Algorithm(o["algorithm"]),
        sparsity=o["sparsity"],
        eta=o["eta"],
        max_iters=o["iters"],
        stop_tolerance=o["stop-tol"],
    )
    start = time.perf_counter()
    result = recovery.recover(problem, config)
    elapsed_ms = (time.perf_counter() - start) * 1e3
    out_dir = Path(o["out"]) if o["out"] is not None else Path(o["problem"])
    out_dir.mkdir(parents=True, exist_ok=True)
    estimate_path = out_dir / "estimate.csv"
    linalg.save_vector(estimate_path, result.estimate)
    if problem.ground_truth is not None:
        rel = math.inf if result.diverged else recovery.relative_error(
            result.estimate, problem.ground_truth)
        success = rel <= o["rel-tol"]
    else:
        rel = None
        success = None
    report = {
        "algorithm": config.algorithm.value,
        "eta": config.eta,
        "sparsity": problem.sparsity if config.sparsity is None else config.sparsity,
        "iterations": result.iterations_run,
        "gradient_evaluations": result.gradient_evaluations,
        "diverged": result.diverged,
        "final_residual_norm": result.final_residual_norm,
        "residual_history": [float(v) for v in result.residual_history],
        "success": success,
        "rel_error": rel,
        "runtime_ms": elapsed_ms,
        "estimate_csv_path": estimate_path.name,
    }
    (out_dir / "result.json").write_text(json.dumps(report, indent=2) + "\n")
    print(f"{config.algorithm.value}: {result.iterations_run} iterations, "
          f"final residual {result.final_residual_norm:.6g}, wrote {out_dir / 'result.json'}")
    return 0


def _cmd_rip(o: dict) -> int:
    A = linalg.load_matrix(o["matrix"])
    if o["samples"] is None:
        delta = analysis.rip_constant_exact(A, o["s"])
        method = "exact"
    else:
        delta = analysis.rip_constant_sampled(A, o["s"], o["samples"], o["seed"])
        method = "sampled"
    print(f"delta(s={o['s']}) = {delta:.6f}  [{method}]")
    if o["out"] is not None:
        # stdout is rounded for reading; the file keeps full precision
        payload = {"s": o["s"], "delta": delta, "exact": method == "exact",
                   "n_supports": o["samples"], "seed": o["seed"]}
        Path(o["out"]).write_text(json.dumps(payload, indent=2) + "\n")
    return 0


def _cmd_certify(o: dict) -> int:
    A = linalg.load_matrix(o["matrix"])
    report = analysis.theory_report(A, o["s"], o["eta"],
                                    e_tilde_norm=o["etilde-norm"],
                                    n_supports=o["samples"], seed=o["seed"])
    for order in sorted(report.delta):
        print(f"delta(s={order}) = {report.delta[order]:.17g}")
    met = "met" if report.noiseless_condition_met else "NOT met"
    print(f"noiseless contraction: rho = {report.noiseless_rho:.17g} (condition {met})")
    met = "met" if report.noisy_condition_met else "NOT met"
    print(f"noisy contraction: rho = {report.noisy_rho:.17g} (condition {met})")
    if report.noise_floor_bound is not None:
        print(f"noise floor bound = {report.noise_floor_bound:.17g}")
    if o["out"] is not None:
        payload = dataclasses.asdict(report)
        payload["delta"] = {str(k): v for k, v in report.delta.items()}
        Path(o["out"]).write_text(json.dumps(payload, indent=2) + "\n")
    return 0


def _cmd_validate_moments(o: dict) -> int:
    stats = analysis.monte_carlo_moments(o["m"], o["d"], o["draws"], o["seed"])
    rows = []
    for eta in o["eta-grid"]:
        pred_res = analysis.expected_frob_residual(o["m"], o["d"], eta)
        pred_gram = analysis.expected_frob_gram(o["m"], o["d"], eta)
        mc_res = stats.mc_frob_residual(eta)
        mc_gram = stats.mc_frob_gram(eta)
        # one conservative figure per eta: the worse of the two deviations
        rel_err = max(abs(mc_res - pred_res) / pred_res,
                      abs(mc_gram - pred_gram) / pred_gram)
        rows.append({
            "eta": eta,
            "predicted_residual": pred_res,
            "mc_residual": mc_res,
            "predicted_gram": pred_gram,
            "mc_gram": mc_gram,
            "rel_err": rel_err,
        })
    out = Path(o["out"])
    out.parent.mkdir(parents=True, exist_ok=True)
    header = ("eta", "predicted_residual", "mc_residual",
              "predicted_gram", "mc_gram", "rel_err")
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format(row[col], ".17g") for col in header))
    out.write_text("\n".join(lines) + "\n")
    print(f"{'eta':>8} {'resid pred':>14} {'resid mc':>14}"
          f" {'gram pred':>14} {'gram mc':>14} {'rel err':>10}")
    for row in rows:
        print(f"{row['eta']:>8g} {row['predicted_residual']:>14.6g} {row['mc_residual']:>14.6g}"
              f" {row['predicted_gram']:>14.6g} {row['mc_gram']:>14.6g}"
              f" {row['rel_err']:>10.2e}")
    print(f"wrote {out}")
    return 0


_KIND_BY_COMMAND = {
    "phase-transition": harness.ExperimentKind.PHASE_TRANSITION,
    "noisy-error": harness.ExperimentKind.NOISY_ERROR,
    "constant-compute": harness.ExperimentKind.CONSTANT_COMPUTE,
    "threshold-compare": harness.ExperimentKind.THRESHOLD_COMPARE,
}


def _available_workers() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


def _cmd_experiment(name: str, o: dict) -> int:
    kind = _KIND_BY_COMMAND[name]
    fields = {
        "kind": kind,
        "m": o["m"],
        "d": o["d"],
        "sparsity_grid": o["s-grid"],
        "eta_grid": o["eta-grid"],
        "trials_per_point": o["trials"],
        "base_seed": o["seed"],
        "success_rel_tol": o["rel-tol"],
    }
    if kind is harness.ExperimentKind.NOISY_ERROR:
        fields["snr_db"] = o["snr-db"]
    if "iters-iht" in o:
        fields["iters_iht"] = o["iters-iht"]
        fields["iters_ilat"] = o["iters-ilat"]
    try:
        spec = harness.ExperimentSpec(**fields)
    except ValueError as exc:
        # bad flag combination, not a runtime failure
        raise _UsageError(f"usage: {_PROG} {name} ...\n{_PROG} {name}: error: {exc}")
    workers = o["workers"] if o["workers"] and o["workers"] > 0 else _available_workers()
    records = harness.run_experiment(spec, workers=workers)
    paths = harness.persist_experiment(o["out"], spec, records)
    print(f"{name}: {len(records)} records over {len(spec.sparsity_grid)} sparsity levels; "
          f"wrote {paths['results']}, {paths['summary']}, {paths['spec']}")
    return 0


# ---------------------------------------------------------------------------
# SVG plot emission

_VALUE_COLUMN = {"success": "success_mean", "error": "rel_error_mean",
                 "ratio": "threshold_ratio_mean"}
_Y_LABEL = {"success": "success fraction", "error": "mean relative error",
            "ratio": "mean distance ratio"}
_TITLE = {"success": "Success fraction vs sparsity", "error": "Recovery error vs sparsity",
          "ratio": "One-step distance ratio vs sparsity"}
_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
            "#17becf", "#e377c2")
_BASELINE_ALGOS = {"iht", "hard"}


def _xml_escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _read_summary_series(summary_csv, kind: str):
    value_col = _VALUE_COLUMN[kind]
    path = Path(summary_csv)
    with open(path, newline="") as fh:
        lines = [line.rstrip("\n") for line in fh]
    if not lines:
        raise ValueError(f"{path}: empty file")
    header = lines[0].split(",")
    try:
        col = {name: header.index(name) for name in ("s", "algorithm", "eta", value_col)}
    except ValueError:
        raise ValueError(f"{path}: row 1: header lacks required columns "
                         f"s, algorithm, eta, {value_col}")
    if len(lines) < 2:
        raise ValueError(f"{path}: no data rows")
    series: dict[tuple, dict] = {}
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) < len(header):
            raise ValueError(f"{path}: row {line_no}: {len(parts)} fields, expected {len(header)}")
        try:
            s = int(parts[col["s"]])
            algorithm = parts[col["algorithm"]]
            eta_tok = parts[col["eta"]]
            eta = None if eta_tok == "none" else float(eta_tok)
            val_tok = parts[col[value_col]]
            value = None if val_tok == "none" else float(val_tok)
        except ValueError:
            raise ValueError(f"{path}: row {line_no}: unparseable numeric field")
        if value is None or not math.isfinite(value):
            continue
        if algorithm in _BASELINE_ALGOS:
            key, label, dashed = (0, -1.0), algorithm, True
        else:
            key, label, dashed = (1, eta if eta is not None else -1.0), f"eta={eta:g}", False
        entry = series.setdefault(key, {"label": label, "dashed": dashed, "points": {}})
        entry["points"][s] = value
    ordered = [series[k] for k in sorted(series)]
    ordered = [e for e in ordered if e["points"]]
    if not ordered:
        raise ValueError(f"{path}: no plottable values for kind {kind!r}")
    return ordered


def emit_plot(summary_csv, kind: str, out) -> Path:
    """Render a summary table as a self-contained SVG line chart."""
    if kind not in _VALUE_COLUMN:
        raise ValueError(f"unknown plot kind {kind!r}")
    series = _read_summary_series(summary_csv, kind)
    width, height = 640, 420
    ml, mr, mt, mb = 64, 170, 42, 52
    xs = sorted({s for entry in series for s in entry["points"]})
    xmin, xmax = xs[0], xs[-1]
    if xmin == xmax:
        xmin, xmax = xmin - 1, xmax + 1
    if kind == "success":
        ymin, ymax = 0.0, 1.0
    else:
        top = max(v for entry in series for v in entry["points"].values())
        ymin, ymax = 0.0, (top * 1.05 if top > 0 else 1.0)

    def px(x):
        return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr)

    def py(y):
        return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{ml}" y="24" font-size="15" fill="#222">{_xml_escape(_TITLE[kind])}</text>',
    ]
    n_yticks = 6
    for i in range(n_yticks):
        y = ymin + (ymax - ymin) * i / (n_yticks - 1)
        yy = py(y)
        parts.append(f'<line x1="{ml}" y1="{yy:.2f}" x2="{width - mr}" y2="{yy:.2f}" '
                     f'stroke="#ddd" stroke-width="1"/>')
        parts.append(f'<text x="{ml - 8}" y="{yy + 4:.2f}" font-size="11" fill="#444" '
                     f'text-anchor="end">{y:g}</text>')
    xticks = xs if len(xs) <= 12 else [xs[i * (len(xs) - 1) // 5] for i in range(6)]
    for x in dict.fromkeys(xticks):
        xx = px(x)
        parts.append(f'<line x1="{xx:.2f}" y1="{height - mb}" x2="{xx:.2f}" '
                     f'y2="{height - mb + 5}" stroke="#444" stroke-width="1"/>')
        parts.append(f'<text x="{xx:.2f}" y="{height - mb + 18}" font-size="11" fill="#444" '
                     f'text-anchor="middle">{x:g}</text>')
    parts.append(f'<line x1="{ml}" y1="{height - mb}" x2="{width - mr}" y2="{height - mb}" '
                 f'stroke="#222" stroke-width="1"/>')
    parts.append(f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{height - mb}" '
                 f'stroke="#222" stroke-width="1"/>')
    parts.append(f'<text x="{(ml + width - mr) / 2:.2f}" y="{height - 12}" font-size="12" '
                 f'fill="#222" text-anchor="middle">sparsity s</text>')
    parts.append(f'<text x="18" y="{(mt + height - mb) / 2:.2f}" font-size="12" fill="#222" '
                 f'text-anchor="middle" transform="rotate(-90 18 {(mt + height - mb) / 2:.2f})">'
                 f'{_xml_escape(_Y_LABEL[kind])}</text>')
    legend_x = width - mr + 16
    legend_y = mt + 8
    color_i = 0
    for idx, entry in enumerate(series):
        if entry["dashed"]:
            color = "#000000"
        else:
            color = _PALETTE[color_i % len(_PALETTE)]
            color_i += 1
        dash = ' stroke-dasharray="7,5"' if entry["dashed"] else ""
        pts = sorted(entry["points"].items())
        coords = " ".join(f"{px(x):.2f},{py(v):.2f}" for x, v in pts)
        if len(pts) > 1:
            parts.append(f'<polyline points="{coords}" fill="none" stroke="{color}" '
                         f'stroke-width="1.8"{dash}/>')
        for x, v in pts:
            parts.append(f'<circle cx="{px(x):.2f}" cy="{py(v):.2f}" r="2.6" fill="{color}"/>')
        ly = legend_y + 20 * idx
        parts.append(f'<line x1="{legend_x}" y1="{ly}" x2="{legend_x + 26}" y2="{ly}" '
                     f'stroke="{color}" stroke-width="1.8"{dash}/>')
        parts.append(f'<text x="{legend_x + 32}" y="{ly + 4}" font-size="11" fill="#222">'
                     f'{_xml_escape(entry["label"])}</text>')
    parts.append("</svg>")
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(parts) + "\n")
    return out


def _cmd_plot(o: dict) -> int:
    out = emit_plot(o["summary"], o["kind"], o["out"])
    print(f"wrote {out}")
    return 0


# ---------------------------------------------------------------------------
# dispatch

def _dispatch(argv) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    name = args.subcommand
    if name is None:
        raise _UsageError(parser.format_usage() + f"{_PROG}: error: a subcommand is required")
    o = _merge_options(name, args)
    if name == "gen-matrix":
        return _cmd_gen_matrix(o)
    if name == "gen-problem":
        return _cmd_gen_problem(o)
    if name == "recover":
        return _cmd_recover(o)
    if name == "rip":
        return _cmd_rip(o)
    if name == "certify":
        return _cmd_certify(o)
    if name == "validate-moments":
        return _cmd_validate_moments(o)
    if name in _KIND_BY_COMMAND:
        return _cmd_experiment(name, o)
    if name == "plot":
        return _cmd_plot(o)
    raise _UsageError(f"{_PROG}: error: unknown subcommand {name!r}")


def main(argv=None) -> int:
    try:
        return _dispatch(argv if argv is not None else sys.argv[1:])
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else 0
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
