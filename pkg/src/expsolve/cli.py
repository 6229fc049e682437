"""Command line front end: ``expsolve {verify,classify,zeros,regress}``.

Reports are JSON on stdout.  Exit status: 0 when the requested checks pass,
1 when they ran but failed, 2 for malformed input, 3 for numerical failure.
"""
import argparse
import json
import os
import sys

from . import expsum as es
from .classify import classify
from .errors import InvalidInput, NumericalFailure
from .ode import DEFAULT_EPS_REL, OdeSpec, verify
from .oracle import Rect, count_zeros, sample_report
from .regress import run_all


def _load(text):
    """JSON from an inline string or a file path."""
    if text is None:
        raise InvalidInput("--input is required")
    stripped = text.lstrip()
    if stripped.startswith("{") or stripped.startswith("["):
        source = text
    elif os.path.exists(text):
        with open(text) as fh:
            source = fh.read()
    else:
        raise InvalidInput(f"input is neither JSON nor an existing file: {text!r}")
    try:
        return json.loads(source)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"invalid JSON: {exc}") from exc


def _field(obj, name):
    if not isinstance(obj, dict) or name not in obj:
        raise InvalidInput(f"input needs a {name!r} field")
    return obj[name]


def cmd_verify(args):
    obj = _load(args.input)
    spec = OdeSpec.from_json(_field(obj, "spec"))
    f = es.from_json(_field(obj, "f"))
    phi = obj.get("phi")
    rep = verify(spec, f, phi, args.eps_rel)
    out = rep.to_json()
    sampled = sample_report(spec, f, rep.phi, args.points, args.seed)
    out["sample_residual"] = sampled.residual
    out["sample_local_scale"] = sampled.local_scale
    out["sample_skipped"] = sampled.skipped
    return out, rep.passed


def cmd_classify(args):
    obj = _load(args.input)
    spec = OdeSpec.from_json(obj.get("spec", obj) if isinstance(obj, dict) else obj)
    return [c.to_json() for c in classify(spec, args.eps_rel)], True


def cmd_zeros(args):
    obj = _load(args.input)
    if isinstance(obj, dict) and "f" in obj:
        f = es.from_json(obj["f"])
        bounds = args.rect or obj.get("rect")
    else:
        f = es.from_json(obj)
        bounds = args.rect
    if bounds is None or len(bounds) != 4:
        raise InvalidInput("a rectangle x0 y0 x1 y1 is required")
    try:
        rect = Rect.from_bounds(*(float(x) for x in bounds))
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"bad rectangle {bounds!r}") from exc
    return count_zeros(f, rect).to_json(), True


def cmd_regress(args):
    rows = run_all()
    return rows, all(r["pass"] for r in rows)


COMMANDS = {"verify": cmd_verify, "classify": cmd_classify, "zeros": cmd_zeros,
            "regress": cmd_regress}


class _Parser(argparse.ArgumentParser):
    # usage errors become the same JSON error object as bad input files
    def error(self, message):
        raise InvalidInput(message)


def build_parser():
    parser = _Parser(prog="expsolve", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--input", help="JSON text or path to a JSON file")
    parser.add_argument("--output", help="also write the report to this file")
    parser.add_argument("--eps-rel", type=float, default=DEFAULT_EPS_REL)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--points", type=int, default=32)
    parser.add_argument("--rect", type=float, nargs=4, metavar=("X0", "Y0", "X1", "Y1"))
    return parser


def main(argv=None):
    args = None
    try:
        args = build_parser().parse_args(argv)
        if not args.eps_rel > 0:
            raise InvalidInput("--eps-rel must be positive")
        if args.points < 1:
            raise InvalidInput("--points must be positive")
        report, ok = COMMANDS[args.command](args)
        code = 0 if ok else 1
    except InvalidInput as exc:
        report, code = {"error": {"type": "invalid_input", "message": str(exc)}}, 2
    except NumericalFailure as exc:
        report = {"error": {"type": "numerical_failure", "message": str(exc),
                            "diagnostics": exc.diagnostics}}
        code = 3
    text = json.dumps(report, indent=2, default=str)
    print(text)
    if args is not None and args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
