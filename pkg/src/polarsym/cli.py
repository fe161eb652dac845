"""Command-line front end: ``polarsym <subcommand> [options]``.

Exit status: 0 for a positive verdict, 2 for a negative verdict (the report
carries the witness), 1 for errors.
"""
import argparse
import datetime
import json
import logging
import sys

import numpy as np

from . import __version__
from .reports import SCHEMA_VERSION, _plain
from .errors import AxisMismatch, CapFitError, NotSeparable, PolarsymError

EXIT_PASS, EXIT_ERROR, EXIT_FAIL = 0, 1, 2

log = logging.getLogger("polarsym")


def _emit(args, command, verdict, body):
    doc = {"schema_version": SCHEMA_VERSION, "command": command, "verdict": verdict}
    if not args.no_timestamp:
        doc["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    doc["report"] = body
    text = json.dumps(_plain(doc), indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_PASS if verdict == "pass" else EXIT_FAIL


def _axis_outcome(args, command, run):
    """Run an axis analysis; map separability/axis failures to exit 2."""
    try:
        rep = run()
    except NotSeparable as exc:
        body = {"error": str(exc)}
        if exc.report is not None:
            body["separability"] = exc.report.to_dict()
        return _emit(args, command, "fail", body)
    except (AxisMismatch, CapFitError) as exc:
        return _emit(args, command, "fail", {"error": str(exc)})
    return _emit(args, command, "pass" if rep.ok else "fail", rep.to_dict())


def cmd_analyze_circle(args):
    from .circle import circle_axis_and_profile, read_csv

    v = read_csv(args.input)
    return _axis_outcome(args, "analyze-circle", lambda: circle_axis_and_profile(v, args.eps))


def cmd_analyze_sphere(args):
    from .sphere import read_csv, sphere_caps_and_axis

    u = read_csv(args.input)
    return _axis_outcome(args, "analyze-sphere",
                         lambda: sphere_caps_and_axis(u, args.eps, n_halfspaces=args.halfspaces, seed=args.seed))


def cmd_analyze_ball(args):
    from .ball import ball_axis, read_csv

    u = read_csv(args.input)
    return _axis_outcome(args, "analyze-ball",
                         lambda: ball_axis(u, args.eps, n_halfspaces=args.halfspaces, seed=args.seed))


def cmd_analyze_field(args):
    from .fixtures import FIELDS, field_fixture
    from .gridio import read_grid
    from .wholespace import FieldFn, classify_field, is_separable_field

    if args.fixture:
        if args.fixture not in FIELDS:
            raise PolarsymError(f"unknown field fixture {args.fixture!r}; choose from {sorted(FIELDS)}")
        u = field_fixture(args.fixture, R_max=args.rmax)
        if args.decay is not None:
            u.decay_hint = args.decay
    elif args.input:
        values, spacing, origin = read_grid(args.input)
        u = FieldFn.from_grid(values, spacing, origin, decay_hint=bool(args.decay))
        u.R_max = min(u.R_max, args.rmax)
    else:
        raise PolarsymError("analyze-field needs --in or --fixture")
    sep = is_separable_field(u, args.halfspaces, args.samples, args.eps, args.seed)
    if not sep.separable:
        return _emit(args, "analyze-field", "fail", {"separability": sep.to_dict()})
    rep = classify_field(u, eps=args.radial_eps, seed=args.seed)
    rep.separability = sep
    verdict = "pass" if rep.kind != "inconsistent" and rep.ok else "fail"
    return _emit(args, "analyze-field", verdict, rep.to_dict())


def cmd_polarize(args):
    from .geometry import HalfSpace, random_unit_vectors
    from .green import green_matrix
    from .polarization import PairedGrid, decompose_D_difference

    rng = np.random.default_rng(args.seed)
    h = HalfSpace(random_unit_vectors(rng, 1, 3)[0])
    grid = PairedGrid.random_in_ball(h, args.pairs, rng)
    K = green_matrix(grid.points, grid.weights)
    u = 0.1 + rng.random(grid.n_nodes)
    d = decompose_D_difference(u, grid, K, args.p)
    scale = abs(d.D_u)
    ok = (d.difference >= -1e-12 * scale and abs(d.I1) <= 1e-12 * scale and abs(d.I4) <= 1e-12 * scale
          and min(d.I2, d.I3) >= -1e-12 * scale)
    body = {"normal": h.normal, "pairs": args.pairs, "p": args.p, **d.to_dict()}
    return _emit(args, "polarize", "pass" if ok else "fail", body)


def cmd_check_green(args):
    from .green import audit, audit_passes

    rep = audit(args.draws, args.seed, args.R)
    return _emit(args, "check-green", "pass" if audit_passes(rep) else "fail", rep)


def cmd_solve_choquard(args):
    from .choquard import ChoquardProblem, solve_ground_state

    prob = ChoquardProblem(R=args.R, p=args.p, n=args.n)
    init = None if args.seed is None else prob.random_init(args.seed)
    gs = solve_ground_state(prob, init=init, max_iters=args.max_iters, tol=args.tol)
    doc = gs.to_dict()
    if not args.no_timestamp:
        doc["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    ok = gs.converged and gs.energy > 0
    text = json.dumps(_plain(doc), indent=1, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    log.info("c = %.10g after %d iterations", gs.energy, gs.iterations)
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_certify(args):
    from .choquard import GroundState, certify_theorem41

    gs = GroundState.load(args.input)
    rep = certify_theorem41(gs, eps_cert=args.eps, R_c=args.rc, seed=args.seed)
    ok = rep.kind in ("radial", "axial") and rep.ok
    return _emit(args, "certify", "pass" if ok else "fail", rep.to_dict())


def cmd_fixtures(args):
    from .fixtures import FIXTURES, write_fixture

    if args.list:
        sys.stdout.write("\n".join(sorted(FIXTURES)) + "\n")
        return EXIT_PASS
    if not args.name or not args.out:
        raise PolarsymError("fixtures needs --name and --out (or --list)")
    try:
        kind = write_fixture(args.name, args.out)
    except KeyError as exc:
        raise PolarsymError(str(exc.args[0])) from exc
    log.info("wrote %s fixture %s to %s", kind, args.name, args.out)
    return EXIT_PASS


def build_parser():
    p = argparse.ArgumentParser(prog="polarsym", description="Separability and symmetry analysis toolkit.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, eps=1e-9, needs_in=False):
        if needs_in:
            sp.add_argument("--in", dest="input", required=True)
        sp.add_argument("--out", help="report path (default: stdout)")
        sp.add_argument("--eps", type=float, default=eps)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--no-timestamp", action="store_true")

    sp = sub.add_parser("analyze-circle", help="separability, arcs and axis of a circle CSV")
    common(sp, needs_in=True)
    sp.set_defaults(func=cmd_analyze_circle)

    for name, func in (("analyze-sphere", cmd_analyze_sphere), ("analyze-ball", cmd_analyze_ball)):
        sp = sub.add_parser(name)
        common(sp, needs_in=True)
        sp.add_argument("--halfspaces", type=int, default=256)
        sp.set_defaults(func=func)

    sp = sub.add_parser("analyze-field", help="whole-space field from a grid file or named fixture")
    common(sp)
    sp.add_argument("--in", dest="input")
    sp.add_argument("--fixture")
    sp.add_argument("--decay", dest="decay", action="store_true", default=None)
    sp.add_argument("--no-decay", dest="decay", action="store_false")
    sp.add_argument("--rmax", type=float, default=8.0)
    sp.add_argument("--halfspaces", type=int, default=256)
    sp.add_argument("--samples", type=int, default=2000)
    sp.add_argument("--radial-eps", type=float, default=1e-6)
    sp.set_defaults(func=cmd_analyze_field)

    sp = sub.add_parser("polarize", help="D(u^H) - D(u) split on a random paired grid")
    common(sp)
    sp.add_argument("--pairs", type=int, default=200)
    sp.add_argument("--p", type=float, default=2.0)
    sp.set_defaults(func=cmd_polarize)

    sp = sub.add_parser("check-green", help="randomised audit of the ball Green function")
    common(sp)
    sp.add_argument("--draws", type=int, default=100_000)
    sp.add_argument("--R", type=float, default=1.0)
    sp.set_defaults(func=cmd_check_green)

    sp = sub.add_parser("solve-choquard", help="discrete ground state in B_R")
    sp.add_argument("--R", type=float, default=1.0)
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--n", type=int, default=24)
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.add_argument("--max-iters", type=int, default=5000)
    sp.add_argument("--seed", type=int, default=None, help="random positive init (default: bump)")
    sp.add_argument("--out")
    sp.add_argument("--no-timestamp", action="store_true")
    sp.set_defaults(func=cmd_solve_choquard)

    sp = sub.add_parser("certify", help="symmetry certificate for a solved ground state")
    common(sp, eps=1e-3, needs_in=True)
    sp.add_argument("--rc", type=float, default=None, help="certification radius (default 0.4 R)")
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("fixtures", help="write a named fixture file")
    sp.add_argument("--name")
    sp.add_argument("--out")
    sp.add_argument("--list", action="store_true")
    sp.set_defaults(func=cmd_fixtures)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if hasattr(args, "eps") and not args.eps > 0:
        sys.stderr.write("polarsym: --eps must be positive\n")
        return EXIT_ERROR
    try:
        return args.func(args)
    except (PolarsymError, OSError, ValueError) as exc:
        sys.stderr.write(f"polarsym {args.command}: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
