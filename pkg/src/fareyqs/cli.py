"""Command-line front end: JSON in, JSON or SVG out."""

from __future__ import annotations

import argparse
import json
import math
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .decoration import is_pinched, lambda_lengths, canonical_decoration
from .example import (
    default_scan_grid,
    example_h,
    first_unpinchable_k,
    golden_value,
    not_pinched_falsifier,
    qs_ratio_scan,
)
from .farey import ExtRat, GeodesicEdge, Window, farey_edges_in_window
from .serialize import (
    SchemaError,
    decoration_from_json,
    dumps,
    flip_sequence_from_json,
    lambdas_from_json,
    shear_from_json,
    triangulation_from_json,
    triangulation_to_json,
)
from .shear import (
    DegenerateDevelopmentError,
    FanScanParams,
    check_ps_certificate,
    check_qs_certificate,
    develop,
)
from .triangulation import (
    CrossingEdgesError,
    InvalidFlipError,
    WindowTriangulation,
    apply_flip_sequence,
    check_transitivity_bound,
    max_crossing,
)

EXIT_OK, EXIT_SCHEMA, EXIT_DEGENERATE, EXIT_FLIP, EXIT_CERT = 0, 2, 3, 4, 5


class CertificateFailure(Exception):
    pass


def parse_int(text: str) -> int:
    """Integers written plainly or as ``a^b`` / ``a**b`` (optionally signed)."""
    t = text.strip().replace("**", "^")
    sign = -1 if t.startswith("-") else 1
    t = t.lstrip("+-")
    try:
        if "^" in t:
            a, b = t.split("^")
            return sign * int(a) ** int(b)
        return sign * int(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None


def parse_scalar(text: str):
    try:
        f = Fraction(text)
    except (ValueError, ZeroDivisionError):
        try:
            return float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    return f.numerator if f.denominator == 1 else f


def load_json(arg: str):
    """Inline JSON, ``-`` for stdin, or a file path."""
    if arg == "-":
        text = sys.stdin.read()
    elif arg.lstrip()[:1] in "[{\"" and arg.strip():
        text = arg
    else:
        try:
            text = Path(arg).read_text()
        except OSError as exc:
            raise SchemaError(f"cannot read {arg!r}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON in {arg!r}: {exc.msg}") from None


def load_shear(arg: str):
    if arg in ("zero", "paper-example"):
        return shear_from_json({"rule": arg})
    return shear_from_json(load_json(arg))


def load_triangulation(arg: str):
    base = None if arg.lstrip()[:1] in "[{" else Path(arg).parent
    return triangulation_from_json(load_json(arg), base)


def _window(args) -> Window:
    N, D = args.window
    return Window(N, D, not getattr(args, "no_infinity", False))


def _emit(args, payload):
    text = payload if isinstance(payload, str) else dumps(payload)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _exact_flag(args):
    return getattr(args, "exact", None)


# --- subcommands -------------------------------------------------------------


def cmd_farey(args):
    w = _window(args)
    edges = farey_edges_in_window(w)
    return {"window": w.to_json(), "count": len(edges), "edges": [str(e) for e in edges]}


def cmd_develop(args):
    s = load_shear(args.shear)
    w = _window(args)
    norm = tuple(ExtRat.parse(v) for v in args.normalization)
    h = develop(s, w, norm, exact=_exact_flag(args))
    return {
        "window": w.to_json(),
        "normalization": [str(v) for v in h.normalization],
        "exact": h.exact,
        "map": [[str(v), str(img) if h.exact else repr(img)] for v, img in h.items()],
    }


def _tips(args):
    return tuple(ExtRat.parse(t) for t in args.tips)


def cmd_check_qs(args):
    s = load_shear(args.shear)
    params = FanScanParams(_tips(args), tuple(args.k_range), args.n_max)
    rep = check_qs_certificate(s, params, args.bound, exact=_exact_flag(args))
    out = rep.to_json()
    if args.assert_ and not rep.passed:
        raise CertificateFailure(out)
    return out


def cmd_check_ps(args):
    s = load_shear(args.shear)
    if args.range is not None:
        k_range = (-args.range, args.range)
    else:
        k_range = tuple(args.k_range)
    tips = (ExtRat.parse(args.fan),) if args.fan else _tips(args)
    rep = check_ps_certificate(s, FanScanParams(tips, k_range, 1), exact=_exact_flag(args))
    out = rep.to_json()
    out["range"] = list(k_range)
    out["sup_over_log2"] = rep.sup_abs_partial_sum / math.log(2)
    if args.bound is not None:
        out["bound"] = str(args.bound)
        out["pass"] = rep.passes(args.bound)
        if args.assert_ and not out["pass"]:
            raise CertificateFailure(out)
    return out


def cmd_flip(args):
    T = load_triangulation(args.triangulation)
    seq = flip_sequence_from_json(load_json(args.flips))
    lams = lambdas_from_json(load_json(args.lambdas)) if args.lambdas else None
    if lams is not None:
        missing = sorted(T.edges - set(lams))
        if missing:
            raise SchemaError(f"no lambda length for edge {missing[0]}")
    T2, lams2 = apply_flip_sequence(T, seq, lams)
    out = {"triangulation": triangulation_to_json(T2)}
    if lams2 is not None:
        out["lambdas"] = [{"edge": str(e), "lambda": str(v)} for e, v in sorted(lams2.items())]
        if args.bound is not None:
            rep = is_pinched(lams2, args.bound)
            out["pinched"] = rep.to_json()
    return out


def cmd_intersect(args):
    T1 = load_triangulation(args.t1)
    T2 = load_triangulation(args.t2) if args.t2 else WindowTriangulation.farey(T1.window)
    out = max_crossing(T1, T2).to_json()
    if args.t3:
        rep = check_transitivity_bound(T1, T2, load_triangulation(args.t3))
        out["transitivity"] = rep.to_json()
        if args.assert_ and not rep.passed:
            raise CertificateFailure(out)
    return out


def cmd_example(args):
    table = {str(16**k): str(golden_value(k)) for k in range(1, args.k_max + 1)}
    checks = {str(16**k): example_h(ExtRat(16**k)) == ExtRat.coerce(golden_value(k))
              for k in range(1, args.k_max + 1)}
    scan = qs_ratio_scan(default_scan_grid(16**args.scan_power, args.x_steps, args.t_steps))
    falsifier = {str(M): {"first_k": first_unpinchable_k(M),
                          "report": not_pinched_falsifier(first_unpinchable_k(M), M).to_json()}
                 for M in args.falsifier_M}
    out = {"golden": table, "closed_form_matches": checks, "scan": scan.to_json(),
           "not_pinched": falsifier}
    if args.assert_ and not (scan.passed and all(checks.values())):
        raise CertificateFailure(out)
    return out


def cmd_render(args):
    from .render import render_svg

    w = _window(args)
    if args.triangulation:
        T = load_triangulation(args.triangulation)
        edges = T.sorted_edges()
    elif args.shear:
        h = develop(load_shear(args.shear), w, exact=True)
        edges = WindowTriangulation.image_of(h, w).sorted_edges()
    else:
        edges = farey_edges_in_window(w)
    horos = ()
    if args.decoration == "canonical":
        horos = tuple(canonical_decoration(w))
    elif args.decoration:
        horos = tuple(decoration_from_json(load_json(args.decoration)))
    return render_svg(edges, horocycles=horos, title=args.title)


def cmd_lambdas(args):
    T = load_triangulation(args.triangulation)
    dec = canonical_decoration(T.window) if args.decoration == "canonical" else \
        decoration_from_json(load_json(args.decoration))
    lams = lambda_lengths(T, dec)
    out = {"lambdas": lams.to_json()}
    if args.bound is not None:
        out["pinched"] = is_pinched(lams, args.bound).to_json()
    return out


# --- argument parsing --------------------------------------------------------


def _add_window(p, default=(8, 8)):
    p.add_argument("--window", nargs=2, type=parse_int, metavar=("MAX_NUM", "MAX_DEN"), default=list(default))
    p.add_argument("--no-infinity", action="store_true", help="leave infinity out of the window")


def _add_mode(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--exact", dest="exact", action="store_true", default=None)
    g.add_argument("--float", dest="exact", action="store_false")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fareyqs", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized steps")
    common.add_argument("--assert", dest="assert_", action="store_true",
                        help="exit 5 when a certificate fails")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("farey", parents=[common], help="enumerate Farey edges in a window")
    _add_window(p)
    p.set_defaults(func=cmd_farey)

    p = sub.add_parser("develop", parents=[common], help="developing map of a shear function")
    p.add_argument("--shear", required=True, help="builtin name, JSON file or inline JSON")
    p.add_argument("--normalization", nargs=3, default=["0/1", "1/1", "1/0"])
    _add_window(p)
    _add_mode(p)
    p.set_defaults(func=cmd_develop)

    p = sub.add_parser("check-qs", parents=[common], help="fan ratio scan")
    p.add_argument("--shear", required=True)
    p.add_argument("--tips", nargs="+", default=["1/0"])
    p.add_argument("--k-range", nargs=2, type=parse_int, default=[-100, 100])
    p.add_argument("--n-max", type=parse_int, default=100)
    p.add_argument("--bound", type=parse_scalar, required=True)
    _add_mode(p)
    p.set_defaults(func=cmd_check_qs)

    p = sub.add_parser("check-ps", parents=[common], help="fan partial-sum scan")
    p.add_argument("--shear", required=True)
    p.add_argument("--fan", help="single tip (shorthand for --tips)")
    p.add_argument("--tips", nargs="+", default=["1/0"])
    p.add_argument("--range", type=parse_int, help="scan indices -R..R")
    p.add_argument("--k-range", nargs=2, type=parse_int, default=[-100, 100])
    p.add_argument("--bound", type=parse_scalar)
    _add_mode(p)
    p.set_defaults(func=cmd_check_ps)

    p = sub.add_parser("flip", parents=[common], help="apply a flip sequence")
    p.add_argument("--triangulation", required=True)
    p.add_argument("--flips", required=True, help="list of edge lists")
    p.add_argument("--lambdas")
    p.add_argument("--bound", type=parse_scalar, help="report pinching of the result")
    p.set_defaults(func=cmd_flip)

    p = sub.add_parser("intersect", parents=[common], help="crossing counts between triangulations")
    p.add_argument("--t1", required=True)
    p.add_argument("--t2", help="defaults to Farey on the same window")
    p.add_argument("--t3", help="also check the transitivity bound")
    p.set_defaults(func=cmd_intersect)

    p = sub.add_parser("example", parents=[common], help="golden values and scans for the +-log 2 example")
    p.add_argument("--k-max", type=int, default=8)
    p.add_argument("--scan-power", type=int, default=5)
    p.add_argument("--x-steps", type=int, default=120)
    p.add_argument("--t-steps", type=int, default=40)
    p.add_argument("--falsifier-M", nargs="+", type=parse_scalar, default=[2, 10, 100])
    p.set_defaults(func=cmd_example)

    p = sub.add_parser("lambdas", parents=[common], help="lambda lengths of a decorated triangulation")
    p.add_argument("--triangulation", required=True)
    p.add_argument("--decoration", default="canonical")
    p.add_argument("--bound", type=parse_scalar)
    p.set_defaults(func=cmd_lambdas)

    p = sub.add_parser("render", parents=[common], help="SVG of the Poincaré disk")
    _add_window(p)
    p.add_argument("--triangulation")
    p.add_argument("--shear", help="draw the image of Farey under the developing map")
    p.add_argument("--decoration", help="'canonical' or a decoration JSON")
    p.add_argument("--title")
    p.set_defaults(func=cmd_render)
    return ap


def _error(kind: str, message: str, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message, "exit_code": code}, sort_keys=True) + "\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    random.seed(args.seed)
    try:
        _emit(args, args.func(args))
    except SchemaError as exc:
        return _error("schema", str(exc), EXIT_SCHEMA)
    except DegenerateDevelopmentError as exc:
        return _error("degenerate_development", str(exc), EXIT_DEGENERATE)
    except (InvalidFlipError, CrossingEdgesError) as exc:
        return _error("invalid_flip", str(exc), EXIT_FLIP)
    except CertificateFailure as exc:
        _emit(args, exc.args[0])
        return _error("certificate_failure", "certificate check failed", EXIT_CERT)
    except ValueError as exc:
        return _error("schema", str(exc), EXIT_SCHEMA)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
