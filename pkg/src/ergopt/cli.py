"""Command line front end.

One subcommand per pipeline; inputs are JSON files, outputs JSON or CSV
written into --out (default: current directory).  Exit codes: 0 success,
1 validation error (bad files, bad parameters; no outputs are written),
2 computation error.  All randomness flows through --seed (default 0), so
reruns with the same configuration are byte-identical.

The environment variable ERGOPT_THREADS caps internal parallelism; the
current implementation is single-threaded, so it is accepted and ignored.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import circle, optimize, perturb, potential as pot_mod, sft, thermo
from . import shadowing as shadow
from .errors import ComputationError, ErgoptError, ValidationError

SUBCOMMANDS = (
    "maximize",
    "subaction",
    "mane",
    "aubry",
    "shadow",
    "pressure",
    "equilibrium",
    "zerotemp",
    "circle-encode",
    "circle-decode",
    "lyapmax",
    "lock-orbit",
    "separate",
    "genericity",
)


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _load_json(path: str):
    p = Path(path)
    if not p.is_file():
        raise ValidationError(f"file not found: {path}")
    try:
        return json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"cannot parse {path}: {exc}") from exc


def _write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _write_csv(path: Path, header: list[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(c if isinstance(c, str) else _fmt(c) for c in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _load_potential(args) -> pot_mod.Potential:
    if not args.potential:
        raise ValidationError("--potential is required")
    spec = None
    if getattr(args, "subshift", None):
        spec = sft.load_subshift(_load_json(args.subshift))
    return pot_mod.load_potential(_load_json(args.potential), spec)


def _load_map(args) -> circle.CircleMap:
    if not args.map:
        raise ValidationError("--map is required")
    f = circle.load_map(_load_json(args.map))
    circle.validate_circle_map(f)
    return f


def _point_to_json(p: sft.SymbolicPoint) -> dict:
    return {
        "preperiod": sft.format_word(p.preperiod),
        "cycle": sft.format_word(p.cycle),
    }


def _parse_t_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ValidationError(f"cannot parse --t list {text!r}") from exc


# ---------------------------------------------------------------------------
# subcommand implementations


def _run_maximize(args, out: Path) -> None:
    a = _load_potential(args)
    r = optimize.max_mean(a, args.tol)
    obj = {
        "m0": float(r.m0),
        "cycles": [sft.format_word(w) for w in r.cycle_words],
        "vertex_cycles": [
            [sft.format_word(w) for w in cyc] for cyc in r.critical_cycles
        ],
        "tolerance": r.tolerance,
        "depth": r.depth,
    }
    _write_json(out / "maximize.json", obj)


def _run_subaction(args, out: Path) -> None:
    a = _load_potential(args)
    r = optimize.max_mean(a, args.tol)
    v = optimize.subaction(a, r, args.tol)
    obj = {
        "m0": float(r.m0),
        "depth": v.depth,
        "values": {sft.format_word(w): float(x) for w, x in sorted(v.values.items())},
    }
    _write_json(out / "subaction.json", obj)


def _run_mane(args, out: Path) -> None:
    a = _load_potential(args)
    r = optimize.max_mean(a, args.tol)
    t = optimize.mane_table(a, r, args.tol)
    header = [""] + [sft.format_word(w) for w in t.words]
    rows = []
    for i, w in enumerate(t.words):
        rows.append(
            [sft.format_word(w)]
            + ["-inf" if x is None else _fmt(x) for x in t.table[i]]
        )
    _write_csv(out / "mane.csv", header, rows)


def _run_aubry(args, out: Path) -> None:
    a = _load_potential(args)
    r = optimize.max_mean(a, args.tol)
    t = optimize.mane_table(a, r, args.tol)
    s = optimize.aubry_set(t)
    obj = {
        "vertices": sorted(sft.format_word(w) for w in s.words),
        "tolerance": s.tolerance,
        "m0": float(r.m0),
    }
    _write_json(out / "aubry.json", obj)


def _run_shadow(args, out: Path) -> None:
    if not args.subshift:
        raise ValidationError("--subshift is required")
    if not args.pseudo_orbit:
        raise ValidationError("--pseudo-orbit is required")
    spec = sft.load_subshift(_load_json(args.subshift))
    a = None
    if args.potential:
        a = pot_mod.load_potential(_load_json(args.potential), spec)
    metric = a.metric if a is not None else sft.MetricParams()
    pts = [
        sft.point(item.get("preperiod", ""), item["cycle"])
        for item in _load_json(args.pseudo_orbit)
    ]
    po = shadow.PseudoOrbit.from_points(pts, spec, metric)
    p = shadow.shadow(po, spec)
    obj = {
        "shadow_point": _point_to_json(p),
        "delta": po.delta,
        "jumps": list(po.jumps),
        "closed": po.closed,
    }
    if a is not None:
        cert = shadow.certify(po, p, a)
        obj["certificate"] = {
            "shadow_radius": cert.shadow_radius,
            "birkhoff_bound": cert.birkhoff_bound,
            "k1": cert.k1,
            "measured_max_distance": cert.measured_max_distance,
            "measured_sum_deviation": cert.measured_sum_deviation,
            "constants": cert.constants,
        }
    _write_json(out / "shadow.json", obj)


def _run_pressure(args, out: Path) -> None:
    a = _load_potential(args)
    ts = _parse_t_list(args.t) if args.t else [1.0]
    obj = {
        "t": ts,
        "pressure": [thermo.pressure(a, t) for t in ts],
    }
    _write_json(out / "pressure.json", obj)


def _run_equilibrium(args, out: Path) -> None:
    a = _load_potential(args)
    ts = _parse_t_list(args.t) if args.t else [1.0]
    states = []
    for t in ts:
        s = thermo.equilibrium(a, t)
        mu = s.equilibrium
        states.append(
            {
                "t": t,
                "pressure": s.pressure,
                "entropy": s.entropy,
                "energy": s.energy,
                "words": [sft.format_word(w) for w in mu.words],
                "stationary": [float(x) for x in mu.stationary],
                "transition": [[float(x) for x in row] for row in mu.matrix],
            }
        )
    _write_json(out / "equilibrium.json", {"states": states})


def _run_zerotemp(args, out: Path) -> None:
    a = _load_potential(args)
    if not args.t:
        raise ValidationError("--t grid is required")
    scan = thermo.zero_temp_scan(a, _parse_t_list(args.t))
    rows = []
    for i, s in enumerate(scan.states):
        dist = scan.distances[i] if scan.distances is not None else float("nan")
        rows.append([s.t, s.pressure, s.entropy, s.energy, dist])
    _write_csv(
        out / "zerotemp.csv",
        ["t", "pressure", "entropy", "energy", "distance_to_candidate"],
        rows,
    )


def _run_circle_encode(args, out: Path) -> None:
    f = _load_map(args)
    a, report = circle.potential_from_map(f, args.depth)
    fwd, inv = circle.theta_holder_estimate(circle.coding_table(f, args.depth + 1))
    obj = {
        "potential": pot_mod.dump_potential(a),
        "report": {
            "depth": report.depth,
            "tail_bound": report.tail_bound,
            "pressure_residual": report.pressure_residual,
            "theta_holder_estimate": {"forward": fwd, "inverse": inv,
                                      "label": "empirical estimate"},
        },
    }
    _write_json(out / "circle_encode.json", obj)


def _run_circle_decode(args, out: Path) -> None:
    a = _load_potential(args)
    f, _table = circle.map_from_potential(a, args.resolution, args.tol)
    _write_json(out / "circle_decode.json", circle.dump_map(f, n_knots=args.resolution + 1))


def _run_lyapmax(args, out: Path) -> None:
    f = _load_map(args)
    res = circle.lyapunov_maximize(f, args.depth, args.max_period)
    rows = [[x, "orbit"] for x in res.orbit]
    rows.append([res.exponent, "exponent"])
    _write_csv(out / "lyapmax.csv", ["value", "kind"], rows)
    _write_json(
        out / "lyapmax.json",
        {
            "cycle": sft.format_word(res.cycle),
            "orbit": [float(x) for x in res.orbit],
            "exponent": res.exponent,
            "discretized_mean": res.discretized_mean,
            "ambiguous": res.ambiguous,
            "competing_cycles": [sft.format_word(w) for w in res.competing_cycles],
        },
    )


def _run_lock_orbit(args, out: Path) -> None:
    a = _load_potential(args)
    if not args.cycle:
        raise ValidationError("--cycle is required")
    res = perturb.lock_orbit(
        a,
        args.cycle,
        delta=args.delta,
        beta=args.beta,
        gamma=args.gamma,
        max_period=args.max_period,
        tolerance=args.tol,
    )
    cert = res.certificate
    obj = {
        "cycle": sft.format_word(cert.cycle),
        "depth": cert.depth,
        "phi_sup": cert.phi_sup,
        "psi_sup": cert.psi_sup,
        "hold_beta_psi": cert.hold_beta_psi,
        "sup_bound": cert.sup_bound,
        "hold_bound": cert.hold_bound,
        "pressure_shift": cert.pressure_shift,
        "base_pressure": cert.base_pressure,
        "bounds_applicable": cert.bounds_applicable,
        "gap": cert.gap,
        "max_period": cert.max_period,
        "params": {
            "delta": cert.params.delta,
            "beta": cert.params.beta,
            "gamma": cert.params.gamma,
            "eta": cert.params.eta,
            "Q": cert.params.big_q,
            "K_sep": cert.params.k_sep,
            "D": cert.params.d_sep,
            "K1": cert.params.k1,
        },
        "psi": pot_mod.dump_potential(res.psi),
    }
    _write_json(out / "lock_orbit.json", obj)


def _run_separate(args, out: Path) -> None:
    if not args.input:
        raise ValidationError("--input is required")
    obj = _load_json(args.input)
    spec = sft.load_subshift(obj["subshift"]) if "subshift" in obj else None
    measures = []
    for m in obj["measures"]:
        if m.get("kind", "periodic") != "periodic":
            raise ValidationError("only periodic measures are accepted in files")
        if spec is None:
            raise ValidationError("measure files must carry a subshift")
        measures.append(optimize.orbit_measure(spec, m["cycle"]))
    tests = [pot_mod.load_potential(t, spec) for t in obj["tests"]]
    fn = perturb.separating_functional(measures, tests, args.target)
    _write_json(
        out / "separate.json",
        {
            "coefficients": list(fn.coefficients),
            "target_index": fn.target_index,
            "margin": fn.margin,
            "scores": [fn.evaluate(m) for m in measures],
            "note": "separation over the supplied finite test family only",
        },
    )


def _run_genericity(args, out: Path) -> None:
    if not args.subshift:
        raise ValidationError("--subshift is required")
    spec = sft.load_subshift(_load_json(args.subshift))
    stats = perturb.genericity_experiment(
        spec, args.depth, args.samples, args.max_period, args.seed
    )
    rows = [
        [str(rec.sample_id), rec.m0, str(int(rec.unique)), str(rec.period), rec.gap]
        for rec in stats.records
    ]
    _write_csv(
        out / "genericity.csv",
        ["sample_id", "m0", "unique_flag", "period", "gap"],
        rows,
    )
    _write_json(
        out / "genericity.json",
        {
            "frequency": stats.frequency,
            "samples": len(stats.records),
            "seed": stats.seed,
            "depth": stats.depth,
            "max_period": stats.max_period,
        },
    )


_RUNNERS = {
    "maximize": _run_maximize,
    "subaction": _run_subaction,
    "mane": _run_mane,
    "aubry": _run_aubry,
    "shadow": _run_shadow,
    "pressure": _run_pressure,
    "equilibrium": _run_equilibrium,
    "zerotemp": _run_zerotemp,
    "circle-encode": _run_circle_encode,
    "circle-decode": _run_circle_decode,
    "lyapmax": _run_lyapmax,
    "lock-orbit": _run_lock_orbit,
    "separate": _run_separate,
    "genericity": _run_genericity,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ergopt",
        description="Ergodic optimization on subshifts of finite type.",
        epilog="ERGOPT_THREADS caps internal parallelism (currently ignored).",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--potential", help="potential JSON file")
        p.add_argument("--subshift", help="subshift JSON file")
        p.add_argument("--map", help="circle map JSON file")
        p.add_argument("--pseudo-orbit", dest="pseudo_orbit",
                       help="pseudo-orbit JSON file")
        p.add_argument("--input", help="task-specific input JSON file")
        p.add_argument("--cycle", help="cycle word, e.g. 01")
        p.add_argument("--depth", type=int, default=3)
        p.add_argument("--resolution", type=int, default=2**14)
        p.add_argument("--max-period", dest="max_period", type=int, default=12)
        p.add_argument("--samples", type=int, default=100)
        p.add_argument("--target", type=int, default=0)
        p.add_argument("--t", help="comma-separated inverse temperatures")
        p.add_argument("--tol", type=float, default=1e-9)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--delta", type=float, default=0.05)
        p.add_argument("--beta", type=float, default=None)
        p.add_argument("--gamma", type=float, default=1.0)
        p.add_argument("--out", default=".", help="output directory")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    os.environ.get("ERGOPT_THREADS")  # accepted; single-threaded implementation
    out = Path(args.out)
    try:
        # output files (and the directory) appear only after validation
        runner = _RUNNERS[args.command]
        runner(args, out)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ComputationError as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return 2
    except ErgoptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
