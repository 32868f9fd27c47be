"""Finite unit-norm tight frames and their Grammian projections.

A frame is stored as a ``(k, n)`` array whose rows are the frame vectors.
With ``V`` the ``n x k`` synthesis matrix (vectors as columns) the frame is
tight iff ``V V* = (k/n) id``, and then ``(n/k) V* V`` is a rank-n projection
with constant diagonal ``n/k``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    InvalidInput,
    NotConstantDiagonal,
    NotTight,
    RankMismatch,
    RealFiberObstruction,
    WrongRedundancy,
)
from .linalg import DEFAULT_TOL, as_field, check_field, closest_isometry, dag, fnorm, range_basis
from .linalg import unitary_path
from .projection_paths import DEFAULT_SAMPLES, connect_half_projections


@dataclass(frozen=True)
class Frame:
    vectors: np.ndarray
    field: str = "C"

    def __post_init__(self):
        check_field(self.field)
        v = as_field(np.atleast_2d(np.asarray(self.vectors)), self.field)
        if v.ndim != 2:
            raise InvalidInput("frame vectors must form a (k, n) array")
        object.__setattr__(self, "vectors", v)

    @property
    def k(self):
        return self.vectors.shape[0]

    @property
    def n(self):
        return self.vectors.shape[1]

    @property
    def synthesis(self):
        return self.vectors.T

    @classmethod
    def from_synthesis(cls, v, field):
        return cls(np.asarray(v).T, field)


def harmonic_frame(n, k, rows=None):
    """k unit vectors in C^n taken from n rows of the k-point DFT matrix."""
    rows = list(range(n)) if rows is None else list(rows)
    if len(rows) != n:
        raise InvalidInput("need exactly n rows")
    j = np.arange(k)
    v = np.exp(2j * np.pi * np.outer(rows, j) / k) / np.sqrt(n)
    return Frame.from_synthesis(v, "C")


def tightness_residual(f):
    v = f.synthesis
    return fnorm((f.n / f.k) * (v @ dag(v)) - np.eye(f.n))


def norm_residual(f):
    return float(np.max(np.abs(np.linalg.norm(f.vectors, axis=1) - 1)))


def verify_funtf(f, tol=DEFAULT_TOL.residual_tol):
    """``(ok, residual)``; residual is the larger of the tightness and norm defects."""
    res = max(tightness_residual(f), norm_residual(f))
    return res <= tol and f.k >= f.n, res


def gram_projection(f, tol=DEFAULT_TOL.residual_tol):
    """``(n/k) G`` with ``G[i, j] = <x_j, x_i>``."""
    ok, res = verify_funtf(f, tol)
    if not ok:
        raise NotTight(f"not a unit-norm tight frame (residual {res:.3g})")
    v = f.synthesis
    p = (f.n / f.k) * (dag(v) @ v)
    return (p + dag(p)) / 2


def _isometry_factor(f):
    """k x n isometry A with ``A A* = gram_projection(f)``."""
    return np.sqrt(f.n / f.k) * dag(f.synthesis)


def _frame_from_isometry(a, field):
    k, n = a.shape
    v = np.sqrt(k / n) * dag(a)
    return Frame.from_synthesis(v.real if field == "R" else v, field)


def frame_from_projection(p, field=None, cfg=DEFAULT_TOL):
    """A frame whose Grammian projection is `p` (unique up to a unitary on C^n)."""
    p = np.asarray(p)
    field = field or ("C" if np.iscomplexobj(p) else "R")
    p = as_field(p, field)
    k = p.shape[0]
    a = range_basis(p)
    n = a.shape[1]
    if n == 0:
        raise RankMismatch("projection has rank zero")
    if fnorm(a @ dag(a) - p) > cfg.residual_tol * max(1.0, fnorm(p)):
        raise RankMismatch("matrix is not a projection of well-defined rank")
    if np.max(np.abs(np.diag(p) - n / k)) > cfg.residual_tol:
        raise NotConstantDiagonal(f"diagonal entries must all equal n/k = {n / k:.6g}")
    return _frame_from_isometry(a, field)


def connect_frames(f, g, cfg=DEFAULT_TOL, samples=DEFAULT_SAMPLES, max_refinements=4):
    """Frame homotopy from `f` to `g` (k = 2n) as a list of frames.

    The Grammian projections are joined by a diagonal-1/2 projection path and
    the isometry factor is carried along it by polar re-orthonormalization.
    The leftover unitary ``w`` on C^n (``A_end = A_g w``) is then unwound;
    over the reals this needs det(w) = +1.
    """
    if f.field != g.field or f.n != g.n or f.k != g.k:
        raise InvalidInput("frames must share field, n and k")
    if f.k != 2 * f.n:
        raise WrongRedundancy("only k = 2n is supported")
    field = f.field
    p, q = gram_projection(f, cfg.residual_tol), gram_projection(g, cfg.residual_tol)

    for _ in range(max_refinements + 1):
        path = connect_half_projections(p, q, field, cfg, samples)
        mats = [m for piece in path.pieces for _, m in piece.points()]
        steps = [fnorm(b - a) for a, b in zip(mats, mats[1:])]
        if max(steps, default=0.0) < 0.5:
            break
        samples *= 2
    else:
        raise InvalidInput("projection path too coarse for transport")

    a = _isometry_factor(f)
    frames = [f]
    for m in mats[1:]:
        a = closest_isometry(m @ a)
        frames.append(_frame_from_isometry(a, field))

    a_g = _isometry_factor(g)
    w = dag(a_g) @ a
    w = closest_isometry(w)
    if field == "R" and np.linalg.det(w) < 0:
        raise RealFiberObstruction("residual fiber rotation has determinant -1")
    if fnorm(w - np.eye(f.n)) > cfg.zero_tol:
        unwind = unitary_path(dag(w), field)
        for s in np.linspace(0.0, 1.0, max(samples, 2))[1:]:
            frames.append(_frame_from_isometry(a_g @ w @ unwind(s), field))
    frames[-1] = g
    return frames
