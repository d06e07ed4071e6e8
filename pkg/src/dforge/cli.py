"""Command-line front end: derive, simulate, sweep.

Exit codes: 0 ok, 1 golden mismatch, 2 usage/config error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .algebra import Coefficient, pretty, project_out_level
from .dynamics import (
    TimeGrid,
    dispersive_convergence_scan,
    observables,
    propagate_effective,
    propagate_full,
)
from .effective import decompose, effective_hamiltonian
from .errors import DforgeError
from .scenario import Scenario, parse_scenario
from .spaces import hermiticity_defect, realize

EXIT_OK = 0
EXIT_GOLDEN_MISMATCH = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

#: full-propagation step-halving sanity threshold on sampled amplitudes
CONVERGENCE_TOL = 1e-3


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _load_scenario(path: str) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scenario(fh.read())


def _scenario_hash(config_text: str, settings: dict) -> str:
    payload = config_text + "\n" + json.dumps(settings, sort_keys=True)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def _write_manifest(out_path: str, config_text: str, settings: dict, wall_time: float):
    manifest = {
        "scenario_hash": _scenario_hash(config_text, settings),
        "settings": settings,
        "version": __version__,
        "wall_time_s": wall_time,
    }
    with open(out_path + ".manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _default_pair(scenario: Scenario, projected: str | None) -> tuple[str, str]:
    levels = [lv for lv in scenario.levels if lv != projected]
    if "g" in levels and "e" in levels:
        return "g", "e"
    return levels[0], levels[-1]


def cmd_derive(args) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        config_text = fh.read()
    scenario = parse_scenario(config_text)
    h_eff = effective_hamiltonian(scenario.spec)
    if args.project_level is not None:
        h_eff = project_out_level(h_eff, args.project_level)
    ground, excited = args.ground, args.excited
    if ground is None or excited is None:
        g_def, e_def = _default_pair(scenario, args.project_level)
        ground = ground or g_def
        excited = excited or e_def

    canonical = pretty(h_eff)
    print(f"H_eff = {canonical}")
    parts = decompose(h_eff, ground, excited)
    for name in ("stark", "one_photon", "two_photon", "displacement", "other"):
        print(f"{name}: {pretty(parts[name])}")
    # numeric values of the distinct coefficient signatures, in 1/s
    seen = {}
    for m in h_eff.terms:
        sig = "*".join(m.coeff.num) + (
            "/" + "/".join(m.coeff.den) if m.coeff.den else ""
        )
        if sig and sig not in seen:
            symbol_part = Coefficient.make(1, 0, m.coeff.num, m.coeff.den)
            seen[sig] = abs(symbol_part.evaluate(scenario.params))
    if seen:
        print("coefficient scales (1/s):")
        for sig in sorted(seen):
            print(f"  {sig} = {_fmt(seen[sig])}")

    space = scenario.space()
    mat = realize(h_eff, space, scenario.params)
    print(f"hermiticity defect (n_max={space.n_max}): {hermiticity_defect(mat):.3e}")

    if args.golden is not None:
        with open(args.golden, "r", encoding="utf-8") as fh:
            expected = fh.read().strip()
        if expected != canonical:
            print("golden mismatch:", file=sys.stderr)
            print(f"  expected: {expected}", file=sys.stderr)
            print(f"  actual:   {canonical}", file=sys.stderr)
            return EXIT_GOLDEN_MISMATCH
        print("golden: match")
    return EXIT_OK


def _converged_full(scenario: Scenario, steps_per_period: int):
    """Propagate at N and 2N steps per period; fail if samples disagree."""
    space = scenario.space()
    psi0 = scenario.initial_state(space)
    grid = scenario.grid()
    coarse = propagate_full(
        scenario.spec, scenario.params, space, psi0, grid,
        steps_per_period=steps_per_period,
    )
    fine = propagate_full(
        scenario.spec, scenario.params, space, psi0, grid,
        steps_per_period=2 * steps_per_period,
    )
    diff = float(np.max(np.abs(coarse.states - fine.states)))
    return fine, diff


def cmd_simulate(args) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        config_text = fh.read()
    scenario = parse_scenario(config_text)
    space = scenario.space()
    psi0 = scenario.initial_state(space)
    grid = scenario.grid()
    start = time.monotonic()

    full_traj = None
    eff_traj = None
    if args.mode in ("full", "both"):
        full_traj, diff = _converged_full(scenario, args.steps_per_period)
        if diff > CONVERGENCE_TOL:
            print(
                f"integrator not converged: sample change {diff:.3e} > "
                f"{CONVERGENCE_TOL:.0e} after halving the step",
                file=sys.stderr,
            )
            return EXIT_NUMERICAL
    if args.mode in ("effective", "both"):
        h_mat = realize(
            effective_hamiltonian(scenario.spec), space, scenario.params
        )
        eff_traj = propagate_effective(h_mat, psi0, grid)

    primary = full_traj if full_traj is not None else eff_traj
    reference = eff_traj if args.mode == "both" else None
    obs = observables(primary, space, reference=reference)

    lines = []
    lines.append(f"# dforge simulate mode={args.mode} config={os.path.basename(args.config)}")
    header = (
        "t,"
        + ",".join(f"P_{lv}" for lv in scenario.levels)
        + ",n_mean,fidelity"
    )
    lines.append(header)
    for idx, t in enumerate(obs.times):
        row = [_fmt(t)]
        row.extend(_fmt(obs.populations[lv][idx]) for lv in scenario.levels)
        row.append(_fmt(obs.n_mean[idx]))
        row.append(_fmt(obs.fidelity[idx]) if obs.fidelity is not None else "")
        lines.append(",".join(row))
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")

    settings = {
        "command": "simulate",
        "mode": args.mode,
        "steps_per_period": args.steps_per_period,
    }
    _write_manifest(args.out, config_text, settings, time.monotonic() - start)
    return EXIT_OK


def cmd_sweep(args) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        config_text = fh.read()
    scenario = parse_scenario(config_text)
    key, _, values_text = args.vary.partition("=")
    key = key.strip()
    if not values_text:
        print("--vary expects key=v1,v2,...", file=sys.stderr)
        return EXIT_CONFIG
    if key not in scenario.params:
        print(f"unknown sweep parameter {key!r}", file=sys.stderr)
        return EXIT_CONFIG
    values = [float(v) for v in values_text.split(",") if v.strip()]
    if not values:
        print("--vary expects at least one value", file=sys.stderr)
        return EXIT_CONFIG

    workers = int(os.environ.get("DFORGE_THREADS", os.cpu_count() or 1))
    space = scenario.space()
    psi0 = scenario.initial_state(space)
    start = time.monotonic()

    lines = [f"# dforge sweep vary={key} config={os.path.basename(args.config)}"]
    slope = None
    if key == scenario.spec.delta:
        result = dispersive_convergence_scan(
            scenario.spec,
            scenario.params,
            space,
            psi0,
            scenario.grid(),
            values,
            steps_per_period=args.steps_per_period,
            max_workers=workers,
        )
        lines.append(f"{key},max_infidelity")
        for row in result.rows:
            lines.append(f"{_fmt(row.delta)},{_fmt(row.max_infidelity)}")
        if len([r for r in result.rows if r.included]) >= 2:
            slope = result.slope()
    else:
        h_sym = effective_hamiltonian(scenario.spec)
        lines.append(f"{key},max_infidelity")

        def run(value: float) -> float:
            local = dict(scenario.params)
            local[key] = value
            full = propagate_full(
                scenario.spec, local, space, psi0, scenario.grid(),
                steps_per_period=args.steps_per_period,
            )
            eff = propagate_effective(
                realize(h_sym, space, local), psi0, scenario.grid()
            )
            obs = observables(full, space, reference=eff)
            return float(np.max(1.0 - obs.fidelity))

        for value in values:
            lines.append(f"{_fmt(value)},{_fmt(run(value))}")

    if slope is not None:
        lines.append(f"# slope={_fmt(slope)}")
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")

    settings = {
        "command": "sweep",
        "vary": args.vary,
        "steps_per_period": args.steps_per_period,
    }
    _write_manifest(args.out, config_text, settings, time.monotonic() - start)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dforge",
        description="Derive dispersive effective Hamiltonians and validate "
        "them against full time-dependent propagation.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_derive = sub.add_parser("derive", help="print the effective Hamiltonian")
    p_derive.add_argument("config")
    p_derive.add_argument("--project-level", default=None, metavar="L")
    p_derive.add_argument("--ground", default=None)
    p_derive.add_argument("--excited", default=None)
    p_derive.add_argument("--golden", default=None, metavar="PATH")
    p_derive.set_defaults(func=cmd_derive)

    p_sim = sub.add_parser("simulate", help="propagate and write a CSV")
    p_sim.add_argument("config")
    p_sim.add_argument("--mode", choices=("full", "effective", "both"), default="both")
    p_sim.add_argument("--out", required=True, metavar="PATH")
    p_sim.add_argument("--steps-per-period", type=int, default=40)
    p_sim.set_defaults(func=cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="sweep a parameter and record infidelity")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--vary", required=True, metavar="KEY=V1,V2,...")
    p_sweep.add_argument("--out", required=True, metavar="PATH")
    p_sweep.add_argument("--steps-per-period", type=int, default=40)
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DforgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
