"""Command-line entry point (``fixdiag``)."""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

import numpy as np

from .errors import FixdiagError, InvalidInput, ParseError
from .frames import connect_frames, frame_from_projection, gram_projection, verify_funtf
from .idempotent_paths import connect_idempotents
from .idempotents import construct_idempotent_with_diagonal, diagonal_feasible, gamma_bound
from .linalg import DEFAULT_TOL
from .pathio import (
    decode_matrix,
    decode_vector,
    deserialize,
    encode_matrix,
    frame_from_dict,
    frame_to_dict,
    residual_csv,
    serialize,
    validate_path,
)
from .projection_paths import (
    DEFAULT_SAMPLES,
    EightNull,
    FourNull,
    Full,
    connect_half_projections,
    m4_family,
    m4_real_extreme_path,
)

EXIT_VALIDATION_FAILED = 3


def _read_source(arg):
    """File contents if `arg` names a file, else `arg` itself."""
    if arg == "-":
        return sys.stdin.read()
    if os.path.isfile(arg):
        with open(arg, encoding="utf-8") as fh:
            return fh.read()
    return arg


def _parse_csv_rows(text, loc):
    rows = []
    for lineno, line in enumerate(text.strip().splitlines(), 1):
        if not line.strip():
            continue
        try:
            rows.append([complex(tok.strip().replace(" ", "")) for tok in line.split(",")])
        except ValueError:
            raise ParseError("bad complex literal (use re+imj)", f"{loc} line {lineno}") from None
    if not rows:
        raise ParseError("empty input", loc)
    return rows


def _load_json_or_csv(arg, loc):
    text = _read_source(arg).strip()
    if text.startswith(("[", "{")):
        try:
            return json.loads(text), True
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, f"{loc} line {exc.lineno} column {exc.colno}") from None
    return _parse_csv_rows(text, loc), False


def _real_if_possible(a):
    return a.real.copy() if np.all(a.imag == 0) else a


def load_vector(arg, loc="--diag"):
    data, is_json = _load_json_or_csv(arg, loc)
    if is_json:
        return _real_if_possible(decode_vector(data, loc))
    flat = [z for row in data for z in row]
    return _real_if_possible(np.array(flat, dtype=complex))


def load_matrix(arg, loc, field=None):
    data, is_json = _load_json_or_csv(arg, loc)
    if is_json:
        if isinstance(data, dict):
            data = data.get("matrix", data)
        m = decode_matrix(data, loc)
    else:
        if len({len(r) for r in data}) != 1:
            raise ParseError("ragged matrix rows", loc)
        m = np.array(data, dtype=complex)
    if field == "C":
        return m
    if field == "R" and np.any(m.imag != 0):
        raise ParseError("non-zero imaginary part in a real-field matrix", loc)
    return _real_if_possible(m)


def load_frame(arg, loc):
    data, is_json = _load_json_or_csv(arg, loc)
    if not is_json or not isinstance(data, dict):
        raise ParseError("frame files are JSON objects", loc)
    return frame_from_dict(data)


def _emit(args, payload):
    text = payload if isinstance(payload, str) else json.dumps(payload)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _emit_path(args, path, cfg):
    _emit(args, serialize(path, cfg))
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(residual_csv(path))


def _config(args):
    kw = {}
    if args.tol is not None:
        kw["residual_tol"] = args.tol
    if args.zero_tol is not None:
        kw["zero_tol"] = args.zero_tol
    return dataclasses.replace(DEFAULT_TOL, **kw)


# --- subcommands -----------------------------------------------------------

def cmd_construct(args, cfg):
    d = load_vector(args.diag)
    report = diagonal_feasible(d, cfg)
    q = construct_idempotent_with_diagonal(d, cfg)
    _emit(args, {"feasible": True, "reason": report.reason.value, "matrix": encode_matrix(q)})
    return 0


def cmd_connect_projections(args, cfg):
    p = load_matrix(args.a, "--a", args.field)
    q = load_matrix(args.b, "--b", args.field)
    path = connect_half_projections(p, q, args.field, cfg, args.samples)
    path.seed = args.seed
    _emit_path(args, path, cfg)
    return 0


def cmd_connect_idempotents(args, cfg):
    q = load_matrix(args.a, "--a", "C")
    r = load_matrix(args.b, "--b", "C")
    path = connect_idempotents(q, r, args.seed, args.samples, cfg)
    _emit_path(args, path, cfg)
    return 0


def cmd_frame(args, cfg):
    if args.action == "verify":
        f = load_frame(args.frame, "--frame")
        ok, res = verify_funtf(f, cfg.residual_tol)
        _emit(args, {"funtf": bool(ok), "residual": res})
        return 0 if ok else 4
    if args.action == "gram":
        f = load_frame(args.frame, "--frame")
        _emit(args, {"matrix": encode_matrix(gram_projection(f, cfg.residual_tol))})
        return 0
    if args.action == "from-projection":
        p = load_matrix(args.p, "--p", args.field)
        _emit(args, frame_to_dict(frame_from_projection(p, args.field, cfg)))
        return 0
    f = load_frame(args.a, "--a")
    g = load_frame(args.b, "--b")
    frames = connect_frames(f, g, cfg, args.samples)
    _emit(args, {"frames": [frame_to_dict(x) for x in frames]})
    return 0


def cmd_m4(args, cfg):
    try:
        params = json.loads(args.params) if args.params else {}
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, "--params") from None
    if not isinstance(params, dict):
        raise ParseError("params must be a JSON object", "--params")

    def xi(default):
        raw = params.get("xi", default)
        return tuple(decode_vector(list(raw), "--params.xi"))

    if args.family == "extreme":
        path = m4_real_extreme_path(params.get("eps", (1, 1, 1, -1)), args.samples)
        _emit_path(args, path, cfg)
        return 0
    if args.family == "full":
        fam = Full(tuple(params.get("t", ())), xi((1, 1, 1)), params.get("sign", 1))
    elif args.family == "fournull":
        fam = FourNull(params.get("variant", 2), tuple(params.get("t", ())), xi((1, 1, 1)))
    else:
        fam = EightNull(params.get("variant", 0), xi((1, 1)))
    _emit(args, {"matrix": encode_matrix(m4_family(fam, args.field))})
    return 0


def cmd_validate(args, cfg):
    path, file_cfg = deserialize(_read_source(args.path))
    if args.tol is not None or args.zero_tol is not None:
        file_cfg = cfg
    report = validate_path(path, file_cfg, args.step_bound)
    _emit(args, dict(report.__dict__))
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(residual_csv(path))
    return 0 if report.passed else EXIT_VALIDATION_FAILED


def cmd_gamma(args, cfg):
    gb = gamma_bound(load_vector(args.diag), cfg)
    _emit(args, {"gamma": gb.gamma, "s_has_nonintegers": gb.s_has_nonintegers, "bound": gb.bound})
    return 0


# --- parser ----------------------------------------------------------------

def _global_flags(parser, suppress):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--tol", type=float, default=default, help="residual tolerance")
    parser.add_argument("--zero-tol", type=float, default=default, help="entries below this count as zero")
    parser.add_argument("--seed", type=int, default=default)
    parser.add_argument("--out", default=default, help="write output here instead of stdout")
    parser.add_argument("--csv", default=default, help="also write a per-sample residual table")


def build_parser():
    parser = argparse.ArgumentParser(prog="fixdiag", description=__doc__)
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct-idempotent", parents=[common], help="idempotent with a given diagonal")
    p.add_argument("--diag", required=True, help="CSV or JSON vector (literal or file)")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("connect-projections", parents=[common], help="path between diagonal-1/2 projections")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--field", choices=("R", "C"), default="C")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.set_defaults(func=cmd_connect_projections)

    p = sub.add_parser("connect-idempotents", parents=[common], help="path between idempotents, same diagonal")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.set_defaults(func=cmd_connect_idempotents)

    p = sub.add_parser("frame", parents=[common], help="unit-norm tight frame tools")
    p.add_argument("action", choices=("verify", "gram", "from-projection", "connect"))
    p.add_argument("--frame")
    p.add_argument("--p")
    p.add_argument("--a")
    p.add_argument("--b")
    p.add_argument("--field", choices=("R", "C"), default=None)
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.set_defaults(func=cmd_frame)

    p = sub.add_parser("m4", parents=[common], help="explicit 4x4 diagonal-1/2 projections")
    p.add_argument("--family", required=True, choices=("full", "fournull", "eightnull", "extreme"))
    p.add_argument("--params", default="", help='JSON object, e.g. {"t": [0.3, 0.4]}')
    p.add_argument("--field", choices=("R", "C"), default="C")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.set_defaults(func=cmd_m4)

    p = sub.add_parser("validate", parents=[common], help="check a PathFile")
    p.add_argument("--path", required=True)
    p.add_argument("--step-bound", type=float, default=float("inf"))
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("gamma", parents=[common], help="gamma gap of a diagonal")
    p.add_argument("--diag", required=True)
    p.set_defaults(func=cmd_gamma)
    return parser


_REQUIRED = {"verify": ("frame",), "gram": ("frame",), "from-projection": ("p",), "connect": ("a", "b")}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse usage errors count as input errors
        return 0 if exc.code == 0 else 4
    try:
        if args.command == "frame":
            missing = [k for k in _REQUIRED[args.action] if getattr(args, k) is None]
            if missing:
                raise InvalidInput(f"frame {args.action} needs --{', --'.join(missing)}")
        return args.func(args, _config(args))
    except FixdiagError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
