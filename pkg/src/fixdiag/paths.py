"""Piecewise operator paths: affine segments and sampled curves."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .errors import InvalidInput
from .linalg import fnorm

PROJECTION = "Projection"
IDEMPOTENT = "Idempotent"
KINDS = (PROJECTION, IDEMPOTENT)


@dataclass(frozen=True)
class AffineSegment:
    start: np.ndarray
    end: np.ndarray

    def at(self, s):
        return (1 - s) * self.start + s * self.end

    def points(self):
        """Validation points: both ends and the midpoint."""
        return [(0.0, self.start), (0.5, self.at(0.5)), (1.0, self.end)]

    def reversed(self):
        return AffineSegment(self.end, self.start)


@dataclass(frozen=True)
class Sampled:
    ts: np.ndarray
    mats: np.ndarray

    def __post_init__(self):
        ts = np.asarray(self.ts, dtype=float)
        mats = np.asarray(self.mats)
        if mats.ndim != 3 or mats.shape[0] != ts.size or ts.size == 0:
            raise InvalidInput("sampled piece needs matching non-empty t and matrix stacks")
        object.__setattr__(self, "ts", ts)
        object.__setattr__(self, "mats", mats)

    @property
    def start(self):
        return self.mats[0]

    @property
    def end(self):
        return self.mats[-1]

    def points(self):
        return list(zip(self.ts.tolist(), self.mats))

    def reversed(self):
        return Sampled(1.0 - self.ts[::-1], self.mats[::-1].copy())


Piece = Union[AffineSegment, Sampled]


@dataclass
class OperatorPath:
    kind: str
    fixed_diagonal: np.ndarray
    pieces: list = field(default_factory=list)
    n: int = 0
    field: str = "C"
    seed: object = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInput(f"unknown path kind {self.kind!r}")
        self.fixed_diagonal = np.asarray(self.fixed_diagonal)
        if not self.n:
            self.n = int(self.fixed_diagonal.size)

    @property
    def start(self):
        return self.pieces[0].start

    @property
    def end(self):
        return self.pieces[-1].end

    def __len__(self):
        return len(self.pieces)

    def append(self, piece):
        self.pieces.append(piece)
        return self

    def extend(self, other):
        self.pieces.extend(other.pieces)
        return self

    def reversed(self):
        return OperatorPath(self.kind, self.fixed_diagonal,
                            [p.reversed() for p in reversed(self.pieces)],
                            self.n, self.field, self.seed)

    def samples(self):
        """All validation points as ``(piece_index, t, matrix)``."""
        for k, piece in enumerate(self.pieces):
            for t, m in piece.points():
                yield k, t, m

    def junction_gaps(self):
        return [fnorm(a.end - b.start) for a, b in zip(self.pieces, self.pieces[1:])]

    def map(self, fn):
        """Apply `fn` to every stored matrix (e.g. a change of basis)."""
        out = []
        for piece in self.pieces:
            if isinstance(piece, AffineSegment):
                out.append(AffineSegment(fn(piece.start), fn(piece.end)))
            else:
                out.append(Sampled(piece.ts, np.array([fn(m) for m in piece.mats])))
        return OperatorPath(self.kind, self.fixed_diagonal, out, self.n, self.field, self.seed)


def constant_path(kind, m, fixed_diagonal, field="C"):
    return OperatorPath(kind, fixed_diagonal, [Sampled(np.array([0.0]), np.array([m]))],
                        m.shape[0], field)


def concatenate(paths: Sequence[OperatorPath]):
    first = paths[0]
    out = OperatorPath(first.kind, first.fixed_diagonal, [], first.n, first.field, first.seed)
    for p in paths:
        out.extend(p)
    return out


def sample_curve(fn: Callable[[float], np.ndarray], ts, max_step=None, max_samples=20000):
    """Evaluate `fn` on `ts`, bisecting intervals whose step exceeds `max_step`."""
    ts = list(np.asarray(ts, dtype=float))
    mats = [fn(t) for t in ts]
    if max_step is None:
        return Sampled(np.array(ts), np.array(mats))
    i = 0
    while i < len(ts) - 1:
        if fnorm(mats[i + 1] - mats[i]) > max_step and len(ts) < max_samples \
                and ts[i + 1] - ts[i] > 1e-12:
            tm = (ts[i] + ts[i + 1]) / 2
            ts.insert(i + 1, tm)
            mats.insert(i + 1, fn(tm))
        else:
            i += 1
    return Sampled(np.array(ts), np.array(mats))
