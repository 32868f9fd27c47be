"""Path validation plus reading and writing path files."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .errors import ParseError
from .linalg import DEFAULT_TOL, ToleranceConfig, dag, fnorm
from .paths import IDEMPOTENT, KINDS, PROJECTION, AffineSegment, OperatorPath, Sampled

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ValidationReport:
    kind: str
    samples_checked: int
    max_algebraic_residual: float
    max_diagonal_residual: float
    max_step: float
    max_junction_gap: float
    passed: bool


def algebraic_residual(m, kind):
    """``||m^2 - m||``, plus ``||m - m*||`` for projections (Frobenius norms)."""
    sq = fnorm(m @ m - m)
    if kind == PROJECTION:
        return sq + fnorm(m - dag(m))
    return sq


def residual_rows(path):
    """Per-point rows ``(piece, t, algebraic, diagonal, step)``.

    `step` is the distance to the previous point of the same sampled piece, or
    the junction gap to the previous piece for a piece's first point. Points
    inside affine segments carry step 0: segments are continuous by
    construction and are checked only at their ends and midpoint.
    """
    rows = []
    prev_end = None
    for k, piece in enumerate(path.pieces):
        prev = None
        for t, m in piece.points():
            alg = algebraic_residual(m, path.kind)
            diag = float(np.max(np.abs(np.diag(m) - path.fixed_diagonal), initial=0.0))
            if prev is None:
                step = fnorm(m - prev_end) if prev_end is not None else 0.0
            elif isinstance(piece, Sampled):
                step = fnorm(m - prev)
            else:
                step = 0.0
            rows.append((k, float(t), alg, diag, step))
            prev = m
        prev_end = piece.end
    return rows


def validate_path(path, cfg: ToleranceConfig = DEFAULT_TOL, step_bound=np.inf):
    """Check every sample's algebraic law, diagonal and step size."""
    rows = residual_rows(path)
    gaps = path.junction_gaps()
    max_gap = max(gaps, default=0.0)
    max_alg = max((r[2] for r in rows), default=0.0)
    max_diag = max((r[3] for r in rows), default=0.0)
    max_step = max((r[4] for r in rows), default=0.0)
    passed = (max_alg <= cfg.residual_tol and max_diag <= cfg.residual_tol
              and max_step <= step_bound and max_gap <= cfg.residual_tol)
    return ValidationReport(path.kind, len(rows), max_alg, max_diag, max_step, max_gap, passed)


def residual_csv(path):
    """CSV with columns t, algebraic_residual, diagonal_residual, step.

    ``t`` is the piece index plus the local parameter, so it increases along
    the whole path.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "algebraic_residual", "diagonal_residual", "step"])
    for k, t, alg, diag, step in residual_rows(path):
        writer.writerow([repr(k + t), repr(alg), repr(diag), repr(step)])
    return buf.getvalue()


# --- JSON encoding ---------------------------------------------------------

def encode_matrix(m):
    m = np.asarray(m)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m.astype(complex)]


def encode_vector(v):
    return [[float(z.real), float(z.imag)] for z in np.asarray(v).astype(complex)]


def _decode_scalar(x, loc):
    if isinstance(x, bool):
        raise ParseError("expected a number or [re, im]", loc)
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in x):
        return complex(x[0], x[1])
    raise ParseError("expected a number or [re, im]", loc)


def decode_vector(data, loc="vector"):
    if not isinstance(data, list):
        raise ParseError("expected a list", loc)
    return np.array([_decode_scalar(x, f"{loc}[{i}]") for i, x in enumerate(data)], dtype=complex)


def decode_matrix(data, loc="matrix", field="C"):
    if not isinstance(data, list) or not data:
        raise ParseError("expected a non-empty list of rows", loc)
    rows = [decode_vector(r, f"{loc}[{i}]") for i, r in enumerate(data)]
    if len({r.size for r in rows}) != 1:
        raise ParseError("ragged matrix rows", loc)
    m = np.array(rows)
    if field == "R":
        if np.any(m.imag != 0):
            raise ParseError("non-zero imaginary part in a real-field matrix", loc)
        return m.real.copy()
    return m


def _encode_piece(piece):
    if isinstance(piece, AffineSegment):
        return {"type": "affine", "start": encode_matrix(piece.start), "end": encode_matrix(piece.end)}
    return {"type": "sampled", "t": [float(t) for t in piece.ts],
            "samples": [encode_matrix(m) for m in piece.mats]}


def path_to_dict(path, cfg=DEFAULT_TOL):
    return {
        "v": SCHEMA_VERSION,
        "header": {
            "kind": path.kind,
            "n": int(path.n),
            "field": path.field,
            "fixed_diagonal": encode_vector(path.fixed_diagonal),
            "tolerances": {"zero_tol": cfg.zero_tol, "residual_tol": cfg.residual_tol,
                           "integrality_tol": cfg.integrality_tol},
            "seed": path.seed,
        },
        "pieces": [_encode_piece(p) for p in path.pieces],
    }


def serialize(path, cfg=DEFAULT_TOL):
    """PathFile JSON text. Floats are written in shortest round-trip form."""
    return json.dumps(path_to_dict(path, cfg))


def _require(obj, key, loc):
    if not isinstance(obj, dict) or key not in obj:
        raise ParseError(f"missing field {key!r}", loc)
    return obj[key]


def _decode_piece(data, loc, field):
    kind = _require(data, "type", loc)
    if kind == "affine":
        return AffineSegment(decode_matrix(_require(data, "start", loc), f"{loc}.start", field),
                             decode_matrix(_require(data, "end", loc), f"{loc}.end", field))
    if kind == "sampled":
        ts = _require(data, "t", loc)
        samples = _require(data, "samples", loc)
        if not isinstance(ts, list) or not isinstance(samples, list) or len(ts) != len(samples) or not ts:
            raise ParseError("t and samples must be equal-length non-empty lists", loc)
        mats = [decode_matrix(m, f"{loc}.samples[{i}]", field) for i, m in enumerate(samples)]
        if len({m.shape for m in mats}) != 1:
            raise ParseError("samples have differing shapes", loc)
        try:
            t_arr = np.array(ts, dtype=float)
        except (TypeError, ValueError):
            raise ParseError("t must be numbers", f"{loc}.t") from None
        return Sampled(t_arr, np.array(mats))
    raise ParseError(f"unknown piece type {kind!r}", f"{loc}.type")


def dict_to_path(data):
    if _require(data, "v", "$") != SCHEMA_VERSION:
        raise ParseError(f"unsupported schema version {data['v']!r}", "$.v")
    header = _require(data, "header", "$")
    kind = _require(header, "kind", "$.header")
    if kind not in KINDS:
        raise ParseError(f"unknown kind {kind!r}", "$.header.kind")
    field = _require(header, "field", "$.header")
    if field not in ("R", "C"):
        raise ParseError(f"unknown field {field!r}", "$.header.field")
    n = _require(header, "n", "$.header")
    if not isinstance(n, int) or n < 1:
        raise ParseError("n must be a positive integer", "$.header.n")
    diag = decode_vector(_require(header, "fixed_diagonal", "$.header"), "$.header.fixed_diagonal")
    if field == "R":
        diag = diag.real.copy()
    tol = header.get("tolerances") or {}
    try:
        cfg = ToleranceConfig(**tol)
    except (TypeError, ValueError) as exc:
        raise ParseError(str(exc), "$.header.tolerances") from None
    pieces_data = _require(data, "pieces", "$")
    if not isinstance(pieces_data, list):
        raise ParseError("pieces must be a list", "$.pieces")
    pieces = [_decode_piece(p, f"$.pieces[{i}]", field) for i, p in enumerate(pieces_data)]
    for i, p in enumerate(pieces):
        if p.start.shape != (n, n):
            raise ParseError(f"matrix shape {p.start.shape} does not match n={n}", f"$.pieces[{i}]")
    path = OperatorPath(kind, diag, pieces, n, field, header.get("seed"))
    return path, cfg


def deserialize(text):
    """Parse PathFile JSON; returns ``(path, tolerance_config)``."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    return dict_to_path(data)


# --- frames and bare matrices ---------------------------------------------

def frame_to_dict(frame):
    return {"n": frame.n, "k": frame.k, "field": frame.field,
            "vectors": [encode_vector(v) for v in frame.vectors]}


def frame_from_dict(data):
    from .frames import Frame

    for key in ("n", "k", "field", "vectors"):
        _require(data, key, "$")
    field = data["field"]
    if field not in ("R", "C"):
        raise ParseError(f"unknown field {field!r}", "$.field")
    vecs = [decode_vector(v, f"$.vectors[{i}]") for i, v in enumerate(data["vectors"])]
    if len(vecs) != data["k"] or any(v.size != data["n"] for v in vecs):
        raise ParseError("vectors do not match n and k", "$.vectors")
    arr = np.array(vecs)
    if field == "R":
        if np.any(arr.imag != 0):
            raise ParseError("complex entries in a real frame", "$.vectors")
        arr = arr.real.copy()
    return Frame(arr, field)
