"""``ifs`` command-line front end.

Exit codes: 0 success, 1 a check failed, 2 bad configuration or input,
3 a required verdict could not be reached within the budget.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import formats
from .attractors import check_global_equivalences
from .chaos import chaos_orbit, verify_chaos_game
from .config import RunConfig, load_config
from .corpus import CATALOG, check_claims, load_example, verify_example_conditions
from .errors import ConfigError, HypothesisUnmetError, IFSError, NoCertificateError
from .hutchinson import bh_iterate, max_fixed_point
from .sets import hausdorff, make_grid, one_sided
from .symbolic import Disjunctive, find_seed, random_stream, semifractal_approx, target_points_csv, target_sample

NO_SEMIFRACTAL = "S_wh empty at budget: no semifractal"


class Failure(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _add_source(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--example", choices=sorted(CATALOG))
    src.add_argument("--config", type=Path)


def _add_common(p):
    p.add_argument("--grid", type=int, help="cells per axis")
    p.add_argument("--tol", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=Path("."))


def build_parser():
    parser = argparse.ArgumentParser(prog="ifs", description="Hutchinson-operator experiments on grid sets.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("iterate", help="iterate B from a start set, write the distance trace")
    _add_source(p)
    _add_common(p)
    p.add_argument("--start", type=Path, help="start set file (default: the full domain)")
    p.add_argument("--point", type=float, nargs="+", help="start from the cell of this point")

    p = sub.add_parser("maxfix", help="maximum fixed point from the full domain")
    _add_source(p)
    _add_common(p)

    p = sub.add_parser("target", help="certified target points as CSV")
    _add_source(p)
    _add_common(p)
    p.add_argument("--max-len", type=int, default=12)
    p.add_argument("--eps", type=float)

    p = sub.add_parser("semifractal", help="B-iteration from a certified target point")
    _add_source(p)
    _add_common(p)

    p = sub.add_parser("verify", help="check example hypotheses and claims")
    _add_source(p)
    _add_common(p)

    p = sub.add_parser("chaos", help="chaos game tail sets against the semifractal")
    _add_source(p)
    _add_common(p)
    p.add_argument("--random", action="store_true", help="i.i.d. symbols from --seed instead of the disjunctive stream")
    p.add_argument("--point", type=float, nargs="+", help="start point (default: upper domain corner)")
    p.add_argument("--orbit-csv", action="store_true", help="also write the orbit (n <= 10^6)")
    p.add_argument("--override-hypothesis", action="store_true")

    p = sub.add_parser("render", help="render a set file to PGM, or two sets to a PPM overlay")
    p.add_argument("input", type=Path)
    p.add_argument("--overlay", type=Path)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("hausdorff", help="distance between two set files")
    p.add_argument("a", type=Path)
    p.add_argument("b", type=Path)

    p = sub.add_parser("run", help="verify the system of a config file")
    p.add_argument("config", type=Path)
    _add_common(p)
    return parser


# -- setup ------------------------------------------------------------------------
def _load(args):
    base = RunConfig(tol=args.tol, steps=args.steps, seed=args.seed, out=str(args.out),
                     override_hypothesis=getattr(args, "override_hypothesis", False))
    example = getattr(args, "example", None)
    if example:
        spec = load_example(example)
        S = spec.system
        cfg = replace(base, source=example, resolution=spec.resolution)
    else:
        path = args.config
        if not path.exists():
            raise ConfigError(f"config file {path} not found")
        cfg, S = load_config(path, base)
        spec = _matching_example(S)
    if args.grid is not None:
        cfg = replace(cfg, resolution=(args.grid,) * S.dimension)
    cfg.validate(S.domain)
    res = cfg.grid_resolution(S.dimension)
    grid = make_grid(S.domain.lower, S.domain.upper, res)
    return cfg, S, grid, spec


def _matching_example(S):
    for name in CATALOG:
        spec = load_example(name)
        if spec.system == S:
            return spec
    return None


def _out(cfg, name):
    d = Path(cfg.out)
    d.mkdir(parents=True, exist_ok=True)
    return d / name


def _semifractal(S, grid, cfg):
    try:
        seed = find_seed(S, grid)
    except NoCertificateError:
        raise Failure(NO_SEMIFRACTAL, 3) from None
    tol = grid.unit if cfg.tol is None else cfg.tol
    return seed, semifractal_approx(S, seed, grid, n=cfg.steps or 400, tol=tol)


# -- commands -------------------------------------------------------------------------
def cmd_iterate(args):
    cfg, S, grid, _ = _load(args)
    if args.start is not None:
        A = formats.load_set(args.start)
        grid.check_compatible(A.grid)
    elif args.point is not None:
        A = grid.singleton(args.point)
    else:
        A = grid.full()
    rep = bh_iterate(S, A, cfg.steps or 200, tol=cfg.tol)
    _out(cfg, "iterate.csv").write_text(rep.to_csv())
    formats.write_pgm(rep.final_set, _out(cfg, "iterate.pgm"))
    print(f"iterate: {rep.status} steps={rep.steps[-1]} cells={rep.final_set.count} dH={rep.last[1]:.6g}")
    return 0


def cmd_maxfix(args):
    cfg, S, grid, _ = _load(args)
    rec = max_fixed_point(S, grid, budget=cfg.steps or 200, tol=cfg.tol)
    _out(cfg, "maxfix.csv").write_text(rec.report.to_csv())
    formats.write_pgm(rec.set, _out(cfg, "maxfix.pgm"))
    print(f"maxfix: {rec.status} cells={rec.set.count} residual={rec.residual:.6g} "
          f"forward_invariant={rec.is_forward_invariant}")
    return 0


def cmd_target(args):
    cfg, S, grid, _ = _load(args)
    eps = args.eps if args.eps is not None else (cfg.tol or 0.01)
    pts = target_sample(S, args.max_len, eps, grid=grid)
    _out(cfg, "target.csv").write_text(target_points_csv(pts))
    if not pts:
        print(f"target: empty at max_len={args.max_len} eps={eps:g} (S_wh possibly empty)")
    else:
        print(f"target: {len(pts)} certified points at max_len={args.max_len} eps={eps:g}")
    return 0


def cmd_semifractal(args):
    cfg, S, grid, _ = _load(args)
    seed, rep = _semifractal(S, grid, cfg)
    A = rep.final_set
    _out(cfg, "semifractal.csv").write_text(rep.to_csv())
    formats.write_pgm(A, _out(cfg, "semifractal.pgm"))
    full = grid.full()
    print(f"semifractal: {rep.status} seed_word={seed.word} steps={rep.steps[-1]} cells={A.count} "
          f"dH_to_domain={hausdorff(A, full):.6g}")
    return 0 if rep.converged else 3


def _report(lines, results):
    for line in lines:
        print(line)
    return 0 if all(r.ok for r in results) else 1


def _verify_spec(spec, grid):
    cond = verify_example_conditions(spec.name)
    claims = check_claims(spec, grid)
    lines = [f"example: {spec.name}"] + [f"condition {l}" for l in cond.lines()] + [c.line() for c in claims]
    return lines, cond.results + claims


def _verify_generic(S, grid, cfg):
    lines, results = ["example: (custom)"], []
    rec = max_fixed_point(S, grid, budget=cfg.steps or 200)
    lines.append(f"maxfix: {rec.status} cells={rec.set.count} residual={rec.residual:.6g}")
    res = check_global_equivalences(S, grid, budget=cfg.steps or 200, tol=cfg.tol)
    results.append(res)
    lines.append(res.line())
    return lines, results


def cmd_verify(args):
    cfg, S, grid, spec = _load(args)
    try:
        if spec is not None:
            lines, results = _verify_spec(spec, grid)
        else:
            lines, results = _verify_generic(S, grid, cfg)
    except NoCertificateError:
        raise Failure(NO_SEMIFRACTAL, 3) from None
    return _report(lines, results)


def cmd_run(args):
    args.example = None
    return cmd_verify(args)


def cmd_chaos(args):
    cfg, S, grid, _ = _load(args)
    n = cfg.steps or 200000
    x = args.point if args.point is not None else list(S.domain.upper)
    stream = random_stream(S, cfg.seed) if args.random else Disjunctive(S.k)
    try:
        seed = find_seed(S, grid)
    except NoCertificateError:
        raise Failure(NO_SEMIFRACTAL, 3) from None
    sf = semifractal_approx(S, seed, grid, n=400).final_set
    try:
        rep = verify_chaos_game(S, x, n, grid, tol=cfg.tol, semifractal=sf, stream=stream,
                                override_hypothesis=cfg.override_hypothesis)
    except HypothesisUnmetError as e:
        raise Failure(f"{e}", 3) from None
    _out(cfg, "chaos.csv").write_text(rep.to_csv())
    formats.write_pgm(rep.final_tail, _out(cfg, "tail.pgm"))
    formats.write_overlay(rep.semifractal, rep.final_tail, _out(cfg, "overlay.ppm"))
    if args.orbit_csv:
        _out(cfg, "orbit.csv").write_text(chaos_orbit(S, x, stream, n).to_csv())
    return _report(rep.lines(), [rep])


def cmd_render(args):
    A = formats.load_set(args.input)
    if args.overlay is not None:
        formats.write_overlay(A, formats.load_set(args.overlay), args.out)
    else:
        formats.write_pgm(A, args.out)
    print(f"render: {args.out}")
    return 0


def cmd_hausdorff(args):
    A, B = formats.load_set(args.a), formats.load_set(args.b)
    fw, bw = one_sided(A, B), one_sided(B, A)
    print(f"hausdorff={max(fw, bw):.17g} h_ab={fw:.17g} h_ba={bw:.17g}")
    return 0


COMMANDS = {
    "iterate": cmd_iterate, "maxfix": cmd_maxfix, "target": cmd_target, "semifractal": cmd_semifractal,
    "verify": cmd_verify, "chaos": cmd_chaos, "render": cmd_render, "hausdorff": cmd_hausdorff,
    "run": cmd_run,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except Failure as e:
        print(str(e), file=sys.stderr)
        return e.code
    except (ConfigError, FileNotFoundError, KeyError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except (IFSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
