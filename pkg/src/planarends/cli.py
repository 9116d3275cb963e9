"""Command-line driver.

Exit codes: 0 success, 1 a check or computation failed, 2 usage or input error.
JSON goes to --output when given (else to stdout); human summaries go to
stdout (or stderr when stdout carries the JSON).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__, balance, concat, verify
from .configspace import configuration_from_json, configuration_to_json, forces, forces_to_json

log = logging.getLogger("planarends")

DEFAULT_WINDOW = (-2, 2)


class UsageError(ValueError):
    pass


class CheckFailed(RuntimeError):
    pass


def _load(path):
    if path is None:
        raise UsageError("--input is required")
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}") from None
    except json.JSONDecodeError as e:
        raise UsageError(f"{path}: invalid JSON ({e})") from None


def _dump(obj):
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _pair(z):
    return [float(np.real(z)), float(np.imag(z))]


class Out:
    def __init__(self, path):
        self.path = path
        self.stream = sys.stdout if path else sys.stderr

    def say(self, msg):
        print(msg, file=self.stream)

    def emit(self, obj):
        text = _dump(obj)
        if self.path:
            Path(self.path).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)


def _positive(name):
    def conv(s):
        try:
            v = float(s)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a number") from None
        if not v > 0:
            raise argparse.ArgumentTypeError(f"{name} must be positive")
        return v
    return conv


def _t_value(s):
    v = _positive("--t")(s)
    if v >= 1:
        raise argparse.ArgumentTypeError("--t must lie in (0, 1)")
    return v


def build_parser():
    p = argparse.ArgumentParser(prog="planarends",
                                description="Balanced neck configurations and surface models.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, inp=True):
        if inp:
            sp.add_argument("-i", "--input", help="input JSON file")
        sp.add_argument("-o", "--output", help="output path")
        sp.add_argument("--tol", type=_positive("--tol"), default=None,
                        help="tolerance override")
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("solve", help="balance a finite block by Newton's method")
    common(sp)
    sp.add_argument("--max-iter", type=int, default=50)

    sp = sub.add_parser("forces", help="forces of a configuration")
    common(sp)

    sp = sub.add_parser("concat", help="realize a block word over a level window")
    common(sp)
    sp.add_argument("--window", type=int, nargs=2, metavar=("K_LO", "K_HI"),
                    default=DEFAULT_WINDOW)

    sp = sub.add_parser("classify", help="periodicity of a block word")
    common(sp)
    sp.add_argument("--max-window", type=int, default=32)
    sp.add_argument("--max-shift", type=int, default=10946)

    sp = sub.add_parser("verify-paper", help="closed-form reference checks")
    common(sp, inp=False)

    sp = sub.add_parser("mesh", help="sheets-plus-necks mesh and embeddedness report")
    common(sp)
    sp.add_argument("--word", help="block word JSON (instead of --input)")
    sp.add_argument("--window", type=int, nargs=2, metavar=("K_LO", "K_HI"),
                    default=DEFAULT_WINDOW)
    sp.add_argument("--t", type=_t_value, default=1e-3)
    sp.add_argument("--epsilon", type=_positive("--epsilon"), default=0.1)
    sp.add_argument("--grid", type=int, default=128)
    sp.add_argument("--ring", type=int, default=32)
    sp.add_argument("--rows", type=int, default=24)
    sp.add_argument("--sample", type=int, default=4000, help="triangles in the spot check")
    sp.add_argument("--unscaled", action="store_true", help="undo the horizontal 2t scaling")
    sp.add_argument("--finite-part", action="store_true",
                    help="add the finite part of the vertical period to the offsets")

    sp = sub.add_parser("periods", help="t = 0 period data of a configuration")
    common(sp)
    sp.add_argument("--word", help="block word JSON (instead of --input)")
    sp.add_argument("--window", type=int, nargs=2, metavar=("K_LO", "K_HI"),
                    default=DEFAULT_WINDOW)
    sp.add_argument("--t", type=_t_value, default=None,
                    help="also evaluate the vertical periods at this t")
    sp.add_argument("--epsilon", type=_positive("--epsilon"), default=None)
    return p


# ---------------------------------------------------------------------------
# commands


def _solve_input(obj):
    if not isinstance(obj, dict):
        raise UsageError("block input must be a JSON object")
    if "builtin" in obj:
        return None, balance.builtin(obj["builtin"], **obj.get("params", {}))
    if "endpoints" in obj:
        ends = [complex(*e) for e in obj["endpoints"]]
        return tuple(obj["type"]), balance.initial_guess(tuple(obj["type"]), ends)
    return None, balance.block_from_json({k: v for k, v in obj.items() if k != "residual"})


def cmd_solve(args, out):
    sizes, init = _solve_input(_load(args.input))
    tol = args.tol if args.tol is not None else 1e-12
    res = balance.newton_balance(sizes, init=init, tol=tol, max_iter=args.max_iter)
    cert = balance.certify(res.block)
    rep = balance.residual(res.block)
    out.emit({"block": balance.block_to_json(res.block), "iterations": res.iterations,
              "history": res.history, "residual": rep.to_json(), "certificate": cert.to_json()})
    out.say(f"balanced in {res.iterations} iterations; residual force "
            f"{res.residual:.12g}; sigma_min {cert.sigma_min:.3g}")
    if not cert.passed:
        raise CheckFailed(f"nondegeneracy: sigma_min {cert.sigma_min:.3g} below threshold")


def cmd_forces(args, out):
    cfg = configuration_from_json(_load(args.input))
    fs = forces(cfg)
    out.emit(forces_to_json(fs))
    out.say(f"max interior |F| = {fs.interior_max():.3g}")


def _word(path):
    return concat.word_from_json(_load(path))


def cmd_concat(args, out):
    word = _word(args.input)
    cfg = concat.concatenate(word, args.window)
    cert = concat.certify_word(word)
    g = concat.genus(word, args.window)
    out.emit({"configuration": configuration_to_json(cfg), "window": list(args.window),
              "residual": _pair(word.residual), "genus_window": g,
              "genus_word": concat.genus(word), "uniform_sigma_min": cert.sigma_min})
    out.say(f"window {args.window[0]}..{args.window[1]}: type {list(cfg.sizes)}, genus {g}")


def cmd_classify(args, out):
    word = _word(args.input)
    v = concat.classify(word, max_window=args.max_window, max_shift=args.max_shift)
    out.emit({"verdict": v.to_json(), "genus": concat.genus(word)})
    out.say(concat.verdict_summary(v))


def cmd_verify(args, out):
    lines = verify.run_all(seed=args.seed, tol=args.tol)
    out.emit({"checks": [ln.to_json() for ln in lines],
              "pass": all(ln.passed for ln in lines)})
    for ln in lines:
        out.say(ln.summary())
    bad = [ln for ln in lines if not ln.passed]
    if bad:
        raise CheckFailed("; ".join(f"{ln.name} deviation {ln.deviation:.3g}" for ln in bad))


def _window_config(args):
    if (args.input is None) == (args.word is None):
        raise UsageError("give exactly one of --input and --word")
    if args.word is not None:
        return concat.concatenate(_word(args.word), args.window)
    return configuration_from_json(_load(args.input))


def cmd_mesh(args, out):
    from . import surfacegen as sg

    if args.output is None:
        raise UsageError("mesh needs --output")
    cfg = _window_config(args)
    sheets = sg.build_sheets(cfg, args.t, eps=args.epsilon, check=False,
                             finite_part=args.finite_part, grid=args.grid)
    necks = sg.build_necks(sheets, args.t, ring=args.ring, rows=args.rows, strict=False)
    mesh = sg.assemble(sheets, necks, grid=args.grid, ring=args.ring)
    report = sg.embeddedness_report(sheets, necks, args.t, mesh, sample=args.sample,
                                    seed=args.seed, grid=args.grid)
    if args.unscaled:
        mesh = mesh.unscaled(args.t)
    base = Path(args.output)
    obj = base if base.suffix == ".obj" else base.with_suffix(".obj")
    sg.export_mesh(mesh, obj)
    data = report.to_json()
    data.update({
        "mesh": obj.name, "frame": mesh.frame, "vertices": mesh.n_vertices,
        "faces": mesh.n_faces, "euler_characteristic": mesh.euler_characteristic(),
        "boundary_loops": mesh.boundary_loops(), "genus": mesh.genus(),
        "offsets": [s.offset for s in sheets],
        "necks": [n.to_json() for n in necks],
    })
    Path(obj.with_suffix(".report.json")).write_text(_dump(data), encoding="utf-8")
    print(f"wrote {obj} ({mesh.n_vertices} vertices, {mesh.n_faces} faces, genus {mesh.genus()})")
    print(f"embeddedness {'PASS' if report.passed else 'FAIL'}: min slab separation "
          f"{data['min_slab_separation']:.4g}, intersections {report.intersections}")
    if not report.passed:
        raise CheckFailed("embeddedness diagnostics failed")


def cmd_periods(args, out):
    from . import periods as P

    cfg = _window_config(args)
    fam = P.central_charts(cfg)
    lb = P.limit_balance(fam)
    zeros, necks = [], []
    for k in fam.interior_spheres():
        z = P.zero_alignment(fam[k])
        zeros.append({"k": k, "count": z.count.real, "expected": z.expected, "max_Z": z.max_Z,
                      "pass": z.passed})
    for k, i in fam.interior_necks():
        up, down = P.a_periods(fam, k, i, eps=args.epsilon)
        blk = P.laurent(fam, k, i)
        entry = {"k": k, "i": i, "gamma": _pair(blk.gamma),
                 "a_period_upper": _pair(up), "a_period_lower": _pair(down),
                 "c_minus_1": _pair(blk.c_m1), "constants": blk.consts.to_json(),
                 "vertical_finite_part_limit": _pair(P.vertical_finite_part_limit(blk))}
        if args.t is not None:
            full, fin = P.vertical_period(blk, args.t)
            entry["vertical_period"] = {"t": args.t, "full": _pair(full), "finite": _pair(fin)}
        necks.append(entry)
    hl = P.horizontal_limit(fam)
    out.emit({
        "limit_balance": {"deviation": lb.deviation, "g_deviation": lb.g_deviation},
        "zeros": zeros, "necks": necks,
        "horizontal": {"%d,%d" % key: _pair(v) for key, v in sorted(hl.values.items())},
    })
    out.say(f"residue balance deviation {lb.deviation:.3g}; {len(necks)} interior necks")
    if any(not z["pass"] for z in zeros):
        raise CheckFailed("zero accounting failed")


COMMANDS = {"solve": cmd_solve, "forces": cmd_forces, "concat": cmd_concat,
            "classify": cmd_classify, "verify-paper": cmd_verify, "mesh": cmd_mesh,
            "periods": cmd_periods}


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    out = Out(getattr(args, "output", None) if args.command != "mesh" else None)
    try:
        COMMANDS[args.command](args, out)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except CheckFailed as e:
        print(f"check failed: {e}", file=sys.stderr)
        return 1
    except (balance.BalanceError, concat.WindowNotCoverableError) as e:
        print(f"failed: {e}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, TypeError) as e:
        print(f"error: invalid input: {e}", file=sys.stderr)
        return 2
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
