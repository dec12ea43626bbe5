"""Command-line front end: ``nosmc {list,gains,simulate,sweep}``.

Exit codes: 0 on success, 2 when ``--assert-no-overshoot`` finds a crossing,
1 on any error (unknown scenario, infeasible bounds, I/O).
"""
from __future__ import annotations

import argparse
import csv
import itertools
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import scenarios
from .errors import GridTooLarge, NosmcError
from .gains import (
    GainConfig,
    SwitchErrors,
    determine_gains,
    e2_max,
    select_reach_params,
    validate_conditions,
)
from .plant import POSITION
from .sim.metrics import compute_metrics, detect_overshoot
from .sim.trace import write_events

log = logging.getLogger("nosmc")

EXIT_OK, EXIT_ERROR, EXIT_ASSERT = 0, 1, 2
DEFAULT_MAX_CELLS = 1000
SWEEP_KEYS = ("rho", "rho0", "dt", "Ld", "kc", "e1", "e2", "seed", "t_end", "controller")


# --------------------------------------------------------------------------
# scenario resolution


def resolve(args):
    """Scenario from ``--config`` and/or ``--scenario``, with CLI overrides applied."""
    seed = getattr(args, "seed", None)
    if getattr(args, "config", None):
        spec = scenarios.load(args.config)
    elif args.scenario:
        spec = scenarios.get(args.scenario, seed=seed or 0)
    else:
        raise NosmcError("pass --scenario NAME or --config FILE")
    kw = {k: getattr(args, k, None) for k in ("dt", "controller", "seed", "t_end", "rho")}
    if spec.kind == "uav":
        kw.pop("seed")
        kw.pop("rho")
    return spec.override(**kw)


# --------------------------------------------------------------------------
# gains


def _config_from(args, base: GainConfig | None):
    fields = {"Ld": args.Ld, "k2M": args.k2M, "rho_c0": args.rho_c0, "rho0": args.rho0,
              "beta13": args.beta13}
    given = {k: v for k, v in fields.items() if v is not None}
    if base is None:
        if "Ld" not in given or "k2M" not in given:
            raise NosmcError("without --scenario, --Ld and --k2M are required")
        return GainConfig(**given)
    return replace(base, **given)


def cmd_gains(args, out=None):
    out = out or sys.stdout
    spec = resolve(args) if (args.scenario or args.config) else None
    if spec is not None and spec.kind == "uav":
        loop = spec.position
        base, kc, e1c, e2c, smooth = loop.config, loop.kc, loop.e1c, loop.e2c, loop.smooth
    elif spec is not None:
        c = spec.controller
        base, kc, e1c, e2c, smooth = c.config, c.kc, c.e1c, c.e2c, c.kind != "ideal"
    else:
        base, kc, e1c, e2c, smooth = None, None, None, None, True
    if args.ideal:
        smooth = False
    config = _config_from(args, base)
    kc = args.kc if args.kc is not None else kc
    e1c = args.e1c if args.e1c is not None else e1c
    e2c = args.e2c if args.e2c is not None else e2c
    if kc is None:
        raise NosmcError("--kc is required without --scenario")
    reach = select_reach_params(config, kc, e1c, e2c)

    print(f"config: Ld={config.Ld:g} k2M={config.k2M:g} rho_c0={config.rho_c0:g} rho0={config.rho0:g} "
          f"beta=({config.beta11:g}, {config.beta12:g}, {config.beta13:g}, {config.beta2:g})", file=out)
    print(f"reaching: e1c={reach.e1c:.6g} e2c={reach.e2c:.6g} kc={reach.kc:.6g} rho_c={reach.rho_c:.6g}",
          file=out)

    if args.e1 is not None or args.e2 is not None:
        e = SwitchErrors(float(args.e1 or 0.0), float(args.e2 or 0.0))
        source = "given"
    elif spec is not None and spec.kind == "scalar" and spec.controller.kind in ("ideal", "smooth"):
        e, tc = _switch_errors_by_simulation(spec)
        source = f"simulated, tc={tc:.6g}"
    else:
        raise NosmcError("pass --e1/--e2 or a scalar sliding-mode --scenario")
    print(f"switch errors ({source}): e1={e.e1:.6g} e2={e.e2:.6g}", file=out)
    if e.is_origin:
        print("degenerate switch errors (0, 0): floors applied to k2 and rho", file=out)
    g = determine_gains(e, reach, config, smooth=smooth)
    print(f"k1={g.k1:.6g}", file=out)
    print(f"k2={g.k2:.6g}", file=out)
    print(f"e2max={e2_max(e, g.k1):.6g}", file=out)
    if g.rho is not None:
        print(f"rho={g.rho:.6g}", file=out)
    print(f"rho_c={g.rho_c:.6g}", file=out)
    report = validate_conditions(g, e, config)
    for line in report.lines():
        print(line, file=out)
    if not report.ok:
        print("conditions FAILED: " + ", ".join(c.name for c in report.failed()), file=out)
        return EXIT_ERROR
    return EXIT_OK


def _switch_errors_by_simulation(spec):
    tr = spec.run()
    if not tr.gains:
        raise NosmcError(f"{spec.name}: no switch instant within t_end={spec.sim.t_end}")
    tc = tr.gains[0][0]
    i = int(round(tc / spec.sim.dt))
    return SwitchErrors(float(tr.e1[i]), float(tr.e2[i])), tc


# --------------------------------------------------------------------------
# simulate


def cmd_simulate(args, out=None):
    out = out or sys.stdout
    spec = resolve(args)
    spec.validate()
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tr = spec.run()
    name = spec.name
    if spec.kind == "uav":
        return _report_uav(tr, name, out_dir, args, out)
    trace_path = tr.write_csv(out_dir / f"{name}.csv")
    events_path = tr.write_events(out_dir / f"{name}_events.csv")
    m = compute_metrics(tr)
    lines = [f"scenario: {name}", f"controller: {spec.controller.kind}", f"samples: {len(tr)}"]
    for tg, g in tr.gains:
        rho = "" if g.rho is None else f" rho={g.rho:.6g}"
        lines.append(f"gains at t={tg:.6g}: k1={g.k1:.6g} k2={g.k2:.6g}{rho}")
    lines += m.lines()
    (out_dir / f"{name}_metrics.txt").write_text("\n".join(lines) + "\n")
    for line in lines:
        print(line, file=out)
    print(f"wrote {trace_path} and {events_path}", file=out)
    if args.assert_no_overshoot and m.overshoot:
        print(f"ASSERTION FAILED: overshoot {m.overshoot}", file=out)
        return EXIT_ASSERT
    return EXIT_OK


def _report_uav(tr, name, out_dir, args, out):
    paths = [tr.write_csv(out_dir / f"{name}.csv")]
    for ch, ctr in tr.channels.items():
        paths.append(ctr.write_csv(out_dir / f"{name}_{ch}.csv", extra={"x1": ctr.x1, "xd": ctr.xd}))
        ctr.write_events(out_dir / f"{name}_{ch}_events.csv")
    write_events(tr.events, out_dir / f"{name}_events.csv")
    lines = [f"scenario: {name}", f"samples: {len(tr.t)}",
             f"infeasible rotor-force steps: {tr.meta['infeasible_steps']}"]
    failed = []
    for ch in POSITION:
        ctr = tr.channels[ch]
        ov = detect_overshoot(ctr)
        a = int(0.8 * len(ctr.t))
        sse = float(np.max(np.abs(ctr.e1[a:])))
        lines.append(f"{ch}: overshoot {ov}; steady |e1| {sse:.4g} m")
        for tg, g in ctr.gains:
            rho = "" if g.rho is None else f" rho={g.rho:.6g}"
            lines.append(f"  gains at t={tg:.6g}: k1={g.k1:.6g} k2={g.k2:.6g}{rho}")
        if ov:
            failed.append(ch)
    (out_dir / f"{name}_metrics.txt").write_text("\n".join(lines) + "\n")
    for line in lines:
        print(line, file=out)
    print(f"wrote {len(paths)} trace files to {out_dir}", file=out)
    if args.assert_no_overshoot and failed:
        print(f"ASSERTION FAILED: overshoot on {', '.join(failed)}", file=out)
        return EXIT_ASSERT
    return EXIT_OK


# --------------------------------------------------------------------------
# sweep


def parse_axis(text):
    """``name=v1,v2,...`` or ``name=a:b`` (integers a..b-1)."""
    if "=" not in text:
        raise NosmcError(f"grid axis {text!r} must look like name=v1,v2")
    name, values = text.split("=", 1)
    name = name.strip()
    if name not in SWEEP_KEYS:
        raise NosmcError(f"cannot sweep {name!r}; choose from {', '.join(SWEEP_KEYS)}")
    if ":" in values:
        lo, hi = values.split(":", 1)
        vals = list(range(int(lo), int(hi)))
    elif name == "controller":
        vals = [v.strip() for v in values.split(",") if v.strip()]
    else:
        vals = [float(v) for v in values.split(",") if v.strip()]
    if name == "seed":
        vals = [int(v) for v in vals]
    return name, vals


def build_grid(axes, max_cells=DEFAULT_MAX_CELLS):
    names = [a for a, _ in axes]
    size = 1
    for _, vals in axes:
        size *= len(vals)
    if size > max_cells:
        raise GridTooLarge(f"grid has {size} cells, cap is {max_cells} (raise --max-cells)")
    return [dict(zip(names, combo)) for combo in itertools.product(*(v for _, v in axes))]


def run_cell(name, config_path, cell):
    """One sweep cell; returns a flat metrics row (never raises)."""
    row = dict(cell)
    try:
        seed = int(cell.get("seed", 0))
        spec = scenarios.load(config_path) if config_path else scenarios.get(name, seed=seed)
        kw = dict(cell)
        if spec.kind == "uav":
            kw.pop("seed", None)
        spec = spec.override(**kw)
        tr = spec.run()
        if spec.kind == "uav":
            ovs = [detect_overshoot(tr, ch) for ch in POSITION]
            a = int(0.8 * len(tr.t))
            row.update(overshoot="yes" if any(ovs) else "none",
                       sse1=max(float(np.max(np.abs(tr.channels[c].e1[a:]))) for c in POSITION),
                       status="ok")
        else:
            row.update(compute_metrics(tr).as_row())
            row["status"] = "ok"
    except (NosmcError, ValueError, ArithmeticError) as ex:
        row.update(status=f"error: {type(ex).__name__}: {ex}")
    return row


def cmd_sweep(args, out=None):
    out = out or sys.stdout
    if not (args.scenario or args.config):
        raise NosmcError("pass --scenario NAME or --config FILE")
    if not args.config:
        scenarios.get(args.scenario)  # fail fast on unknown names
    axes = [parse_axis(a) for a in args.grid]
    cells = build_grid(axes, args.max_cells)
    if args.dt is not None and not any(a == "dt" for a, _ in axes):
        cells = [{**c, "dt": args.dt} for c in cells]
    if args.controller and not any(a == "controller" for a, _ in axes):
        cells = [{**c, "controller": args.controller} for c in cells]
    name = args.scenario or Path(args.config).stem
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(run_cell, [args.scenario] * len(cells), [args.config] * len(cells), cells))
    else:
        rows = [run_cell(args.scenario, args.config, c) for c in cells]
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{name}_sweep.csv"
    cols = list(dict.fromkeys(k for r in rows for k in r))
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=cols)
        w.writeheader()
        w.writerows(rows)
    ok = [r for r in rows if r["status"] == "ok"]
    passed = sum(1 for r in ok if r.get("overshoot") == "none")
    print(f"{len(rows)} cells, {len(ok)} completed, {passed} without overshoot; wrote {path}", file=out)
    if args.assert_no_overshoot and passed < len(rows):
        return EXIT_ASSERT
    return EXIT_OK


# --------------------------------------------------------------------------
# list


def cmd_list(args, out=None):
    out = out or sys.stdout
    for n in scenarios.names():
        print(f"{n:20s} {scenarios.get(n).description}", file=out)
    if args.write_configs:
        for p in scenarios.write_configs(args.write_configs):
            print(f"wrote {p}", file=out)
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser():
    ap = argparse.ArgumentParser(prog="nosmc", description="Non-overshooting sliding-mode control simulator")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, sim=True):
        p.add_argument("--scenario", help="registered scenario name (see `nosmc list`)")
        p.add_argument("--config", help="scenario file (JSON); CLI flags override its values")
        p.add_argument("--seed", type=int)
        if sim:
            p.add_argument("--out-dir", default=".", help="directory for CSV output")
            p.add_argument("--dt", type=float)
            p.add_argument("--controller", choices=("ideal", "smooth", "pid", "pi"))
            p.add_argument("--assert-no-overshoot", action="store_true")

    p = sub.add_parser("list", help="show registered scenarios")
    p.add_argument("--write-configs", metavar="DIR", help="also write every scenario as JSON into DIR")
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("gains", help="run the gain-determination pipeline and print every step")
    common(p, sim=False)
    p.add_argument("--dt", type=float)
    p.add_argument("--controller", choices=("ideal", "smooth"))
    p.add_argument("--e1", type=float, help="switch error e1(tc)")
    p.add_argument("--e2", type=float, help="switch error e2(tc)")
    p.add_argument("--Ld", type=float)
    p.add_argument("--k2M", type=float)
    p.add_argument("--kc", type=float)
    p.add_argument("--e1c", type=float)
    p.add_argument("--e2c", type=float)
    p.add_argument("--rho-c0", dest="rho_c0", type=float)
    p.add_argument("--rho0", type=float)
    p.add_argument("--beta13", type=float)
    p.add_argument("--ideal", action="store_true", help="skip the smoothed-law steepness rho")
    p.set_defaults(func=cmd_gains, t_end=None, rho=None)

    p = sub.add_parser("simulate", help="run one scenario and write trace/events/metrics")
    common(p)
    p.add_argument("--t-end", dest="t_end", type=float)
    p.add_argument("--rho", type=float, help="fixed terminal steepness for the smoothed law")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="Cartesian parameter sweep, one metrics row per cell")
    common(p)
    p.add_argument("--grid", action="append", default=[], metavar="NAME=V1,V2",
                   help=f"sweep axis; repeatable; names: {', '.join(SWEEP_KEYS)}")
    p.add_argument("--max-cells", type=int, default=DEFAULT_MAX_CELLS)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (NosmcError, ValueError, OSError) as ex:
        where = "" if getattr(ex, "t", None) is None else f" (t={ex.t:.6g})"
        print(f"error: {ex}{where}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
