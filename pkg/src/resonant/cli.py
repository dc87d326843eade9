"""Command-line adapters. No numerics here; every command calls the library.

Exit codes: 0 success, 1 verification failure (witness printed), 2 bad input.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import io
from .cascade import (
    OverlapError,
    PlacementError,
    evolve_components,
    find_placement,
    growth_report,
    verify_decoupling,
    verify_family,
)
from .dynamics import DEFAULT_DT, DEFAULT_SAMPLE_EVERY, integrate
from .lattice import enumerate_gamma0
from .rectangle import beating_orbit


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _emit(text: str, out) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        io.write_atomic(out, text)


def _config(args) -> dict:
    return {k: v for k, v in vars(args).items() if k != "func"}


def _parse_watch(text):
    if not text:
        return []
    try:
        return [tuple(int(c) for c in item.split(",")) for item in text.split(";") if item.strip()]
    except ValueError as exc:
        raise InputError(f"bad --watch list {text!r}") from exc


def _placements(paths):
    out = []
    for path in paths:
        obj = io._load(_read(path))
        items = obj if isinstance(obj, list) else [obj]
        out += [io.placement_from_obj(x) for x in items]
    return out


def cmd_resonances(args) -> int:
    support = io.support_from_obj(_read(args.support))
    quads = enumerate_gamma0(support, include_degenerate=not args.nondegenerate)
    _emit(io.dumps(io.quadruples_to_obj(quads)), args.out)
    return 0


def cmd_simulate(args) -> int:
    state = io.state_from_obj(_read(args.state))
    watch = _parse_watch(args.watch)
    for p in watch:
        if p not in state.support:
            raise InputError(f"watched mode {p} is not in the support")
    traj = integrate(state, args.system, args.t_end, args.dt, args.sample_every)
    drift = " ".join(f"{k}={io.fmt(v)}" for k, v in traj.drift.items() if k != "max")
    meta = io.header_line(_config(args)) + f" drift: {drift}"
    _emit(io.trajectory_csv(traj, watch, meta=meta), args.out)
    return 0


def cmd_beating(args) -> int:
    if not 0.01 < args.delta < 0.49:
        raise InputError("--delta must lie in (0.01, 0.49)")
    orbit = beating_orbit(args.delta, args.dt)
    meta = io.header_line(_config(args))
    from .rectangle import h_energy

    _emit(io.planar_csv(orbit.times, orbit.phi, orbit.r, h_energy(orbit.phi, orbit.r), meta), args.out)
    report = dict(orbit.report(), meta=meta)
    text = io.dumps(report)
    if args.report:
        io.write_atomic(args.report, text)
    elif args.out not in (None, "-"):
        sys.stdout.write(text)
    return 0


def cmd_place(args) -> int:
    existing = io.support_from_obj(_read(args.existing))
    incoming = io.support_from_obj(_read(args.incoming))
    v = find_placement(existing, incoming, args.search_bound)
    from .cascade import mixed_triangle_scan

    witness = mixed_triangle_scan(existing, incoming.translate(v))
    out = {"v": list(v), "verified": witness is None, "meta": io.header_line(_config(args))}
    _emit(io.dumps(out), args.out)
    return 0 if witness is None else 1


def cmd_verify(args) -> int:
    placements = _placements(args.placements)
    res = verify_decoupling(placements)
    out = {"passed": res.passed, "meta": io.header_line(_config(args))}
    if not res.passed:
        out["witness"] = [list(x) for x in res.witness]
    _emit(io.dumps(out), args.out)
    return 0 if res.passed else 1


def cmd_family(args) -> int:
    family = io.family_from_obj(_read(args.family))
    rep = verify_family(family, args.radius_bound, args.growth_base)
    out = {
        name: {"passed": c.passed, "witness": c.witness, "detail": c.detail}
        for name, c in rep.checks().items()
    }
    out["meta"] = io.header_line(_config(args))
    _emit(io.dumps(out), args.out)
    return 0 if rep.passed else 1


def _require_decoupled(placements):
    res = verify_decoupling(placements)
    if not res.passed:
        sys.stderr.write(f"components coupled by quadruple {res.witness}\n")
        return False
    return True


def cmd_evolve(args) -> int:
    placements = _placements(args.placements)
    if not _require_decoupled(placements):
        return 1
    state = evolve_components(placements, args.t, args.dt)
    _emit(io.dumps(dict(io.state_to_obj(state), meta=io.header_line(_config(args)))), args.out)
    return 0


def cmd_growth(args) -> int:
    placements = _placements(args.placements)
    if not _require_decoupled(placements):
        return 1
    try:
        times = [float(x) for x in args.times.split(",") if x.strip()]
    except ValueError as exc:
        raise InputError(f"bad --times {args.times!r}") from exc
    table = growth_report(placements, times, args.s, args.dt)
    _emit(io.growth_csv(table, io.header_line(_config(args))), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="resonant", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("resonances", help="enumerate resonant quadruples of a support")
    p.add_argument("support")
    p.add_argument("--nondegenerate", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_resonances)

    p = sub.add_parser("simulate", help="integrate RS or RSAdj from a state file")
    p.add_argument("state")
    p.add_argument("--system", choices=["rs", "rsadj"], default="rs")
    p.add_argument("--t-end", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=DEFAULT_DT)
    p.add_argument("--sample-every", type=int, default=DEFAULT_SAMPLE_EVERY)
    p.add_argument("--watch", help="modes as 'x,y;x,y'")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("beating", help="periodic beating orbit of the planar system")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--dt", type=float, default=DEFAULT_DT)
    p.add_argument("--out")
    p.add_argument("--report")
    p.set_defaults(func=cmd_beating)

    p = sub.add_parser("cascade", help="placement, decoupling and growth tools")
    csub = p.add_subparsers(dest="action", required=True)

    c = csub.add_parser("place")
    c.add_argument("existing")
    c.add_argument("incoming")
    c.add_argument("--search-bound", type=int, default=10_000)
    c.add_argument("--out")
    c.set_defaults(func=cmd_place)

    c = csub.add_parser("verify")
    c.add_argument("placements", nargs="+")
    c.add_argument("--out")
    c.set_defaults(func=cmd_verify)

    c = csub.add_parser("family")
    c.add_argument("family")
    c.add_argument("--radius-bound", type=float, required=True)
    c.add_argument("--growth-base", type=float, default=2.0)
    c.add_argument("--out")
    c.set_defaults(func=cmd_family)

    c = csub.add_parser("evolve")
    c.add_argument("placements", nargs="+")
    c.add_argument("--t", type=float, required=True)
    c.add_argument("--dt", type=float, default=DEFAULT_DT)
    c.add_argument("--out")
    c.set_defaults(func=cmd_evolve)

    c = csub.add_parser("growth")
    c.add_argument("placements", nargs="+")
    c.add_argument("--times", required=True, help="comma-separated sample times")
    c.add_argument("--s", type=float, default=2.0)
    c.add_argument("--dt", type=float, default=DEFAULT_DT)
    c.add_argument("--out")
    c.set_defaults(func=cmd_growth)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (InputError, io.FormatError, OverlapError, PlacementError, ValueError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
