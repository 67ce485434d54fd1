"""Command-line front end: validation, info, folding runs, and exporters.

Exit codes: 0 success, 1 domain violation, 2 I/O or parse failure,
3 solver non-convergence.
"""

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from .elastic import RelaxSettings, SpringConfig, relax
from .embedding import embed, measure_dimensions
from .kinematics import assemble_global, dof
from .pattern import PatternError, parse_pattern, validate_pattern
from .sequential import ConvergenceError, FoldSchedule, flat_state_seed, run_schedule

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_IO = 2
EXIT_SOLVER = 3


def export_obj(e, facets):
    """Wavefront OBJ text: 17-significant-digit vertices, fan-triangulated."""
    lines = []
    for x, y, z in e.coords:
        lines.append(f"v {x:.17g} {y:.17g} {z:.17g}")
    for cycle in facets:
        for k in range(1, len(cycle) - 1):
            lines.append(f"f {cycle[0] + 1} {cycle[k] + 1} {cycle[k + 1] + 1}")
    return "\n".join(lines) + "\n"


def parse_obj(text):
    """Vertices and triangles back from OBJ text (for round-trip checks)."""
    vertices, faces = [], []
    for line in text.splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "v":
            vertices.append([float(t) for t in parts[1:4]])
        elif parts[0] == "f":
            faces.append([int(t.split("/")[0]) - 1 for t in parts[1:]])
    return np.array(vertices), faces


def _load_pattern(path):
    return parse_pattern(Path(path).read_text())


def _load_state(path, n):
    data = json.loads(Path(path).read_text())
    rho = np.asarray(data["rho"] if isinstance(data, dict) else data, dtype=float)
    if rho.shape != (n,):
        raise PatternError(f"state has {rho.shape[0]} angles, pattern has {n} creases")
    return rho


def _angles_out(values, degrees):
    return [math.degrees(v) for v in values] if degrees else list(values)


def _write_angle_csv(path, states, degrees):
    with open(path, "w") as fh:
        n = len(states[0])
        fh.write("step," + ",".join(f"rho_{i}" for i in range(n)) + "\n")
        for k, s in enumerate(states):
            row = _angles_out(s, degrees)
            fh.write(str(k) + "," + ",".join(f"{v:.17g}" for v in row) + "\n")


def cmd_validate(args):
    p = _load_pattern(args.pattern)
    report = validate_pattern(p)
    print(json.dumps(report.to_dict(), indent=1))
    return EXIT_OK if report.ok else EXIT_DOMAIN


def cmd_info(args):
    p = _load_pattern(args.pattern)
    report = validate_pattern(p)
    if not report.ok:
        print(json.dumps(report.to_dict(), indent=1))
        return EXIT_DOMAIN
    warn = None
    if args.state:
        rho = _load_state(args.state, p.n_creases)
    elif any(c.assignment != "U" for c in p.creases):
        rho = flat_state_seed(p, math.radians(1.0))
    else:
        rho = np.zeros(p.n_creases)
        warn = "flat state: constraint rows degenerate, DOF may be overcounted"
    gc = assemble_global(p, rho)
    info = {
        "vertices": len(p.vertices),
        "interior_vertices": p.n_interior_vertices,
        "creases": p.n_creases,
        "facets": len(p.facets),
        "dof": dof(gc),
        "residual": gc.normalized_residual,
    }
    if warn:
        info["warning"] = warn
    print(json.dumps(info, indent=1))
    return EXIT_OK


def cmd_fold(args):
    p = _load_pattern(args.pattern)
    schedule = FoldSchedule.from_json(Path(args.schedule).read_text())
    if args.degrees:
        stages = []
        from .sequential import Stage

        for s in schedule.stages:
            stages.append(
                Stage(
                    targets={c: math.radians(t) for c, t in s.targets.items()},
                    steps=s.steps,
                    hold=s.hold,
                )
            )
        schedule = FoldSchedule(tuple(stages))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.time()
    if args.seed_magnitude > 0:
        rho0 = flat_state_seed(p, math.radians(args.seed_magnitude), eps=args.eps)
    else:
        rho0 = np.zeros(p.n_creases)
    traj = run_schedule(p, rho0, schedule, eps=args.eps)
    wall = time.time() - t0

    _write_angle_csv(out / "angles.csv", traj.states, args.degrees)
    with open(out / "residuals.csv", "w") as fh:
        fh.write("step,residual,newton_iters\n")
        for k, (r, it) in enumerate(zip(traj.residuals, traj.newton_iters)):
            fh.write(f"{k},{r:.17g},{it}\n")
    for k, s in enumerate(traj.states):
        if k % args.every == 0 or k == len(traj.states) - 1:
            e = embed(p, s, root=args.root_facet)
            (out / f"step_{k:04d}.obj").write_text(export_obj(e, p.facets))
    manifest = {
        "command": "fold",
        "pattern": str(args.pattern),
        "schedule": str(args.schedule),
        "degrees": args.degrees,
        "eps": args.eps,
        "seed_magnitude": args.seed_magnitude,
        "every": args.every,
        "root_facet": args.root_facet,
        "steps": len(traj) - 1,
        "max_residual": max(traj.residuals),
        "max_newton_iters": max(traj.newton_iters),
        "stage_ends": traj.stage_ends,
        "wall_time_s": wall,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1))
    print(json.dumps(manifest, indent=1))
    return EXIT_OK


def cmd_relax(args):
    p = _load_pattern(args.pattern)
    cfg = SpringConfig.from_json(p, Path(args.springs).read_text())
    settings = RelaxSettings()
    if args.settings:
        raw = json.loads(Path(args.settings).read_text())
        settings = RelaxSettings(**raw)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.state:
        rho0 = _load_state(args.state, p.n_creases)
    elif args.seed_magnitude > 0:
        rho0 = flat_state_seed(p, math.radians(args.seed_magnitude))
    else:
        rho0 = np.zeros(p.n_creases)
    t0 = time.time()
    result = relax(p, cfg, settings, rho0)
    wall = time.time() - t0

    with open(out / "energy.csv", "w") as fh:
        fh.write("step,energy,characteristic_angle\n")
        for k, (u, s) in enumerate(zip(result.energies, result.states)):
            fh.write(f"{k},{u:.17g},{s[result.characteristic]:.17g}\n")
    for k, s in enumerate(result.states):
        if k % args.every == 0 or k == len(result.states) - 1:
            e = embed(p, s, root=args.root_facet)
            (out / f"step_{k:04d}.obj").write_text(export_obj(e, p.facets))
    (out / "final_state.json").write_text(
        json.dumps({"rho": list(result.final)}, indent=1)
    )
    manifest = {
        "command": "relax",
        "pattern": str(args.pattern),
        "springs": str(args.springs),
        "steps": len(result.states) - 1,
        "converged": result.converged,
        "final_energy": result.energies[-1],
        "projected_gradient": result.projected_gradient,
        "characteristic": result.characteristic,
        "wall_time_s": wall,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1))
    print(json.dumps(manifest, indent=1))
    return EXIT_OK if result.converged else EXIT_SOLVER


def cmd_measure(args):
    p = _load_pattern(args.pattern)
    rho = _load_state(args.state, p.n_creases)
    e = embed(p, rho, root=args.root_facet)
    l, w, h = measure_dimensions(e)
    print(json.dumps({"L": l, "W": w, "H": h}, indent=1))
    return EXIT_OK


def cmd_export_obj(args):
    p = _load_pattern(args.pattern)
    if args.state:
        rho = _load_state(args.state, p.n_creases)
    else:
        rho = np.zeros(p.n_creases)
    e = embed(p, rho, root=args.root_facet)
    text = export_obj(e, p.facets)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(
        prog="rigidfold",
        description="Rigid-origami folding: validation, sequential folds, spring relaxation",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, state=False):
        sp.add_argument("--pattern", required=True)
        sp.add_argument("--root-facet", type=int, default=0)
        if state:
            sp.add_argument("--state")

    sp = sub.add_parser("validate", help="check pattern invariants")
    sp.add_argument("--pattern", required=True)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("info", help="counts and degrees of freedom")
    sp.add_argument("--pattern", required=True)
    sp.add_argument("--state")
    sp.set_defaults(func=cmd_info)

    sp = sub.add_parser("fold", help="run a folding schedule")
    common(sp)
    sp.add_argument("--schedule", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--every", type=int, default=1)
    sp.add_argument("--degrees", action="store_true",
                    help="schedule targets and CSV output in degrees")
    sp.add_argument("--seed-magnitude", type=float, default=1.0,
                    help="assignment seed in degrees; 0 starts exactly flat")
    sp.add_argument("--eps", type=float, default=1e-9,
                    help="normalized residual tolerance per step")
    sp.set_defaults(func=cmd_fold)

    sp = sub.add_parser("relax", help="relax crease springs to equilibrium")
    common(sp, state=True)
    sp.add_argument("--springs", required=True)
    sp.add_argument("--settings")
    sp.add_argument("--out", required=True)
    sp.add_argument("--every", type=int, default=10)
    sp.add_argument("--seed-magnitude", type=float, default=1.0)
    sp.set_defaults(func=cmd_relax)

    sp = sub.add_parser("measure", help="bounding box of an embedded state")
    common(sp)
    sp.add_argument("--state", required=True)
    sp.set_defaults(func=cmd_measure)

    sp = sub.add_parser("export-obj", help="write one embedded state as OBJ")
    common(sp, state=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_export_obj)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PatternError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
