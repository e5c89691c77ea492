"""Command-line front end.

Three subcommands:

* ``fgl DESCRIPTOR ACTION`` -- build a law, check its axioms, compute
  its height, truncation, formal inverse, or a coefficient-of-Y probe.
* ``deriv DESCRIPTOR ACTION`` -- canonical derivation tables and the
  Leibniz / iterativity / projective-line checks.
* ``repro NAME`` -- run a pinned scenario against embedded expected
  values (exit 0 on match).

Descriptors: "additive[:p]", "multiplicative[:p]" (p defaults to 2) or
"honda:p:h".  Exit codes: 0 pass, 1 a mathematically meaningful FAIL,
2 usage or parse error, 3 precision/window/integrality error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .derivations import canonical_derivation, default_window
from .errors import (
    AlgebraError,
    InsufficientPrecision,
    IntegralityViolation,
    ParseError,
    WindowOverflow,
)
from .grouplaws import FormalGroupLaw, build_law, parse_law_descriptor
from .scalars import GF
from .series import parse_laurent

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_PRECISION = 3

_WINDOW_HELP = (
    "Laurent exponent window LO:HI; default -(B+1):B*p^h for honda laws "
    "and -(B+1):B otherwise"
)


def _parse_window(text: str):
    parts = text.split(":")
    if len(parts) != 2:
        raise ParseError(f"window must be LO:HI, got {text!r}")
    try:
        lo, hi = int(parts[0]), int(parts[1])
    except ValueError:
        raise ParseError(f"window bounds must be integers, got {text!r}")
    if lo > hi:
        raise ParseError(f"window {text!r} is empty")
    return lo, hi


def _emit(args, report: dict, lines) -> None:
    if args.json:
        print(json.dumps(report))
    else:
        for line in lines:
            print(line)


def _height_obj(hr) -> dict:
    return {
        "kind": hr.kind,
        "height": hr.height,
        "bound": hr.bound,
        "unit": hr.unit if hr.unit is None else int(hr.unit),
    }


def _cmd_fgl(args) -> int:
    law = build_law(args.descriptor, args.deg)
    report = {
        "command": "fgl",
        "params": {"descriptor": args.descriptor, "deg": args.deg, "action": args.action},
        "result": None,
        "pass": None,
    }
    if args.action == "build":
        report["result"] = law.to_json_obj()
        _emit(args, report, [law.body.to_text()])
        return EXIT_PASS
    if args.action == "check":
        rep = law.check_axioms()
        report["pass"] = rep.passed
        report["result"] = {
            "left_unit": rep.left_unit,
            "right_unit": rep.right_unit,
            "associative": rep.associative,
            "degree_checked": rep.degree_checked,
            "first_failure": rep.first_failure,
        }
        _emit(args, report, [str(rep)])
        return EXIT_PASS if rep.passed else EXIT_FAIL
    if args.action == "height":
        hr = law.height()
        report["result"] = _height_obj(hr)
        _emit(args, report, [str(hr)])
        return EXIT_PASS
    if args.action == "truncate":
        m = _require_int_arg(args, "truncate")
        if m < 1:
            raise ParseError("truncation level m must be >= 1")
        trunc = law.truncate(m)
        report["params"]["m"] = m
        report["result"] = trunc.to_json_obj()
        _emit(args, report, [trunc.to_text()])
        return EXIT_PASS
    if args.action == "inverse":
        iota = law.formal_inverse()
        report["result"] = {"precision": iota.prec, "poly": iota.to_text()}
        _emit(args, report, [iota.to_text()])
        return EXIT_PASS
    if args.action == "coeff":
        n = _require_int_arg(args, "coeff")
        if not 0 <= n < args.deg:
            raise ParseError(f"need 0 <= n < deg, got n={n}")
        probe = args.probe_deg if args.probe_deg is not None else 2 * args.deg
        if probe < args.deg:
            raise ParseError("--probe-deg must be >= --deg")
        poly, stable = law.coeff_of_y(n, probe)
        report["params"].update({"n": n, "probe_deg": probe})
        report["pass"] = stable
        report["result"] = {"poly": poly.to_text("X"), "stabilized": stable}
        _emit(args, report, [f"coeff of Y^{n} = {poly.to_text('X')} (stabilized: {stable})"])
        return EXIT_PASS if stable else EXIT_FAIL
    raise ParseError(f"unknown fgl action {args.action!r}")


def _require_int_arg(args, action: str) -> int:
    if not args.args:
        raise ParseError(f"action {action!r} needs an integer argument")
    try:
        return int(args.args[0])
    except ValueError:
        raise ParseError(f"action {action!r} needs an integer argument, got {args.args[0]!r}")


def _default_deriv_deg(descriptor: str, orders: int) -> int:
    kind, p, h = parse_law_descriptor(descriptor)
    if kind == "honda":
        # canonical entries of F_h can have t-degree around p^h*(n-1)
        return orders * (p**h + 1)
    return orders + 1


def _cmd_deriv(args) -> int:
    orders = args.orders
    if orders < 1:
        raise ParseError("--orders must be >= 1")
    deg = args.deg if args.deg is not None else _default_deriv_deg(args.descriptor, orders)
    law = build_law(args.descriptor, deg)
    window = _parse_window(args.window) if args.window else default_window(law, orders)
    deriv = canonical_derivation(law, orders, window=window)
    report = {
        "command": "deriv",
        "params": {
            "descriptor": args.descriptor,
            "deg": deg,
            "orders": orders,
            "window": list(window),
            "action": args.action,
        },
        "result": None,
        "pass": None,
    }
    if args.action == "canonical":
        report["result"] = deriv.to_json_obj()
        _emit(args, report, [deriv.table_text()])
        return EXIT_PASS
    if args.action == "apply":
        if len(args.args) < 2:
            raise ParseError("apply needs a polynomial and an order: apply Q N")
        q = parse_laurent(args.args[0], law.field)
        try:
            n = int(args.args[1])
        except ValueError:
            raise ParseError(f"apply order must be an integer, got {args.args[1]!r}")
        value = deriv.apply(q, n)
        report["params"].update({"q": q.to_text(), "n": n})
        report["result"] = {"poly": value.to_text()}
        _emit(args, report, [f"d_{n}({q.to_text()}) = {value.to_text()}"])
        return EXIT_PASS
    if args.action == "inverse-image":
        invs = deriv.inverse_image(orders)
        report["result"] = {
            "entries": [{"n": n, "poly": v.to_text()} for n, v in enumerate(invs)]
        }
        _emit(args, report, [f"d_{n}(1/t) = {v.to_text()}" for n, v in enumerate(invs)])
        return EXIT_PASS
    if args.action == "check-iterative":
        if args.args:
            try:
                m = int(args.args[0])
            except ValueError:
                raise ParseError(f"truncation level must be an integer, got {args.args[0]!r}")
            p = law.field.char
            if p**m != orders:
                raise ParseError(
                    f"truncated check needs --orders = p^m = {p**m}, have {orders}"
                )
            target = law.truncate(m)
        else:
            target = law
        rep = deriv.check_iterativity(target)
        report["pass"] = rep.passed
        report["result"] = {
            "mode": rep.mode,
            "orders_checked": rep.orders_checked,
            "first_failure": list(rep.first_failure) if rep.first_failure else None,
        }
        _emit(args, report, [str(rep)])
        return EXIT_PASS if rep.passed else EXIT_FAIL
    if args.action == "check-p1":
        rep = deriv.check_p1_extendable(orders)
        report["pass"] = rep.passed
        report["result"] = {
            "orders_checked": rep.orders_checked,
            "first_failure_order": rep.first_failure_order,
            "offending": list(rep.offending),
        }
        _emit(args, report, [str(rep)])
        return EXIT_PASS if rep.passed else EXIT_FAIL
    raise ParseError(f"unknown deriv action {args.action!r}")


# -- repro scenarios ------------------------------------------------------

_EX45_TABLE = {
    0: "t",
    1: "1",
    2: "t^2",
    3: "0",
    4: "t^12 + t^6",
    5: "0",
    6: "t^4",
    7: "0",
}

_EX36_D4 = "t^10 + t^4 + t + t^-2 + t^-5"
_EX36_OFFENDING = ["t^10", "t^4", "t"]

_HEIGHT_CASES = [
    ("multiplicative:2", 8, "height 1"),
    ("multiplicative:3", 8, "height 1"),
    ("multiplicative:5", 8, "height 1"),
    ("additive:2", 8, "height infinite at precision 8"),
    ("honda:2:2", 5, "height 2"),
    ("honda:2:3", 9, "height 3"),
    ("honda:3:2", 10, "height 2"),
    ("honda:5:2", 26, "height 2"),
]


def _repro_example_45(lines):
    law = FormalGroupLaw.honda(2, 2, 17)
    deriv = canonical_derivation(law, 8)
    ok = True
    for n in range(8):
        got = deriv.entries[n].to_text()
        want = _EX45_TABLE[n]
        mark = "ok" if got == want else f"MISMATCH (expected {want})"
        if got != want:
            ok = False
        lines.append(f"d_{n}(t) = {got}  [{mark}]")
    rep = deriv.check_iterativity(law.truncate(3))
    lines.append(f"F_2[3]-iterativity: {rep}")
    return ok and rep.passed


def _repro_example_36(lines):
    law = FormalGroupLaw.honda(2, 2, 17)
    deriv = canonical_derivation(law, 8)
    invs = deriv.inverse_image(8)
    got = invs[4].to_text()
    ok = got == _EX36_D4
    lines.append(f"d_4(1/t) = {got}  [{'ok' if ok else f'MISMATCH (expected {_EX36_D4})'}]")
    rep = deriv.check_p1_extendable(8)
    lines.append(str(rep))
    shape_ok = (
        not rep.passed
        and rep.first_failure_order == 4
        and list(rep.offending) == _EX36_OFFENDING
    )
    if not shape_ok:
        lines.append("MISMATCH: expected first failure at n=4 with t^10, t^4, t")
    orders_ok = all(
        not any(e > 0 for e in invs[n].coeffs) for n in range(1, 4)
    )
    lines.append(f"orders 1..3 preserve k[1/t]: {orders_ok}")
    return ok and shape_ok and orders_ok


def _repro_theorem_31(lines):
    ok = True
    field = GF(2)
    for name, law in (
        ("additive", FormalGroupLaw.additive(field, 17)),
        ("multiplicative", FormalGroupLaw.multiplicative(field, 17)),
    ):
        deriv = canonical_derivation(law, 16)
        rep = deriv.check_p1_extendable(16)
        lines.append(f"{name}: {rep}")
        ok = ok and rep.passed
    return ok


def _repro_heights(lines):
    ok = True
    for descriptor, deg, expected in _HEIGHT_CASES:
        got = str(build_law(descriptor, deg).height())
        match = got == expected
        ok = ok and match
        mark = "ok" if match else f"MISMATCH (expected {expected})"
        lines.append(f"{descriptor} @ deg {deg}: {got}  [{mark}]")
    return ok


_REPROS = {
    "example-3.6": _repro_example_36,
    "example-4.5": _repro_example_45,
    "theorem-3.1": _repro_theorem_31,
    "heights": _repro_heights,
}


def _cmd_repro(args) -> int:
    runner = _REPROS[args.name]
    lines: list = []
    ok = runner(lines)
    lines.append(f"repro {args.name}: {'PASS' if ok else 'FAIL'}")
    report = {
        "command": "repro",
        "params": {"name": args.name},
        "result": {"lines": lines},
        "pass": ok,
    }
    _emit(args, report, lines)
    return EXIT_PASS if ok else EXIT_FAIL


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fgderiv",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fgl = sub.add_parser("fgl", help="formal group law constructions and checks")
    fgl.add_argument("descriptor", help="additive[:p] | multiplicative[:p] | honda:p:h")
    fgl.add_argument(
        "action", choices=["build", "check", "height", "truncate", "inverse", "coeff"]
    )
    fgl.add_argument("args", nargs="*", help="m for truncate, n for coeff")
    fgl.add_argument("--deg", type=int, default=8, help="series precision N (default 8)")
    fgl.add_argument(
        "--probe-deg",
        type=int,
        default=None,
        help="second precision for the coeff stabilization probe (default 2*deg)",
    )
    fgl.add_argument("--json", action="store_true", help="emit a JSON report")

    deriv = sub.add_parser("deriv", help="canonical Hasse-Schmidt derivations")
    deriv.add_argument("descriptor", help="additive[:p] | multiplicative[:p] | honda:p:h")
    deriv.add_argument(
        "action",
        choices=["canonical", "apply", "inverse-image", "check-iterative", "check-p1"],
    )
    deriv.add_argument("args", nargs="*", help="apply: Q N; check-iterative: optional m")
    deriv.add_argument("--orders", type=int, default=8, help="order bound B (default 8)")
    deriv.add_argument(
        "--deg",
        type=int,
        default=None,
        help="law precision; default B*(p^h+1) for honda laws, B+1 otherwise",
    )
    deriv.add_argument("--window", default=None, help=_WINDOW_HELP)
    deriv.add_argument("--json", action="store_true", help="emit a JSON report")

    repro = sub.add_parser("repro", help="re-run pinned scenarios with embedded expectations")
    repro.add_argument("name", choices=sorted(_REPROS))
    repro.add_argument("--json", action="store_true", help="emit a JSON report")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {"fgl": _cmd_fgl, "deriv": _cmd_deriv, "repro": _cmd_repro}
    try:
        return handlers[args.command](args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InsufficientPrecision, WindowOverflow, IntegralityViolation) as exc:
        print(f"precision error: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except AlgebraError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECISION


if __name__ == "__main__":
    sys.exit(main())
