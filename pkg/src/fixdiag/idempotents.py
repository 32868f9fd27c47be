"""Idempotents with prescribed diagonal, and with prescribed range and diagonal."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .diagonal import (
    block_trace_profile,
    expectation,
    is_integral,
    matches_integer,
    minimal_block_decomposition,
)
from .errors import (
    ComplexUnsupported,
    Infeasible,
    InfeasibleDiagonal,
    InvalidInput,
    NotIdempotent,
    NotProjection,
    RigidityViolation,
    SingularPencil,
    SolverBreakdown,
    TooLarge,
)
from .linalg import (
    DEFAULT_TOL,
    dag,
    fnorm,
    hermitian_part,
    is_idempotent,
    is_projection,
    square,
)


class Reason(enum.Enum):
    ZERO = "Zero"
    IDENTITY = "Identity"
    INTEGER_TRACE_IN_RANGE = "IntegerTraceInRange"
    TRACE_NOT_INTEGER = "TraceNotInteger"
    TRACE_OUT_OF_RANGE = "TraceOutOfRange"
    BLOCKS_MATCH = "BlocksMatch"
    BLOCK_MISMATCH = "BlockMismatch"


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    reason: Reason
    blocks: tuple = ()

    def __bool__(self):
        return self.feasible


@dataclass(frozen=True)
class GammaBound:
    gamma: float
    s_has_nonintegers: bool
    bound: float


def _diag_vector(d):
    d = np.asarray(d)
    if d.ndim != 1 or d.size == 0:
        raise InvalidInput("diagonal must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(d)):
        raise InvalidInput("diagonal has non-finite entries")
    return d


def diagonal_feasible(d, cfg=DEFAULT_TOL):
    """Whether `d` is the diagonal of some n x n idempotent."""
    d = _diag_vector(d)
    n = d.size
    if np.all(np.abs(d) <= cfg.zero_tol):
        return FeasibilityReport(True, Reason.ZERO)
    if np.all(np.abs(d - 1) <= cfg.zero_tol):
        return FeasibilityReport(True, Reason.IDENTITY)
    tr = complex(np.sum(d))
    if not is_integral(tr, cfg.integrality_tol):
        return FeasibilityReport(False, Reason.TRACE_NOT_INTEGER)
    if 1 <= round(tr.real) <= n - 1:
        return FeasibilityReport(True, Reason.INTEGER_TRACE_IN_RANGE)
    return FeasibilityReport(False, Reason.TRACE_OUT_OF_RANGE)


def _rank_one_with_diagonal(d):
    # q[i, j] = d[i]; idempotent because the entries of d sum to one
    return np.outer(d, np.ones(d.size))


def _build(d, tol):
    n = d.size
    k = round(float(np.sum(d).real))
    if k == n:
        return np.eye(n, dtype=d.dtype)
    if k == 1:
        return _rank_one_with_diagonal(d)

    ones = np.flatnonzero(np.abs(d - 1) <= tol)
    if ones.size:
        j = int(ones[0])
        rest = np.delete(np.arange(n), j)
        q = np.zeros((n, n), dtype=d.dtype)
        q[j, j] = 1
        q[np.ix_(rest, rest)] = _build(d[rest], tol)
        return q

    # pivot pair maximizing |d_i + d_j - 2| keeps sigma well conditioned
    sums = np.abs(d[:, None] + d[None, :] - 2)
    np.fill_diagonal(sums, -1)
    i, j = np.unravel_index(int(np.argmax(sums)), sums.shape)
    di, dj = d[i], d[j]
    lam = (dj - 1) / (di + dj - 2)
    rest = [m for m in range(n) if m not in (i, j)]
    order = [i, j] + rest

    reduced = np.concatenate(([di + dj - 1], d[rest]))
    r = _build(reduced, tol)
    q_tilde = np.zeros((n, n), dtype=r.dtype)
    q_tilde[0, 0] = 1
    q_tilde[1:, 1:] = r

    # sigma = [[lam, lam - 1], [1, 1]] (+) id has determinant 1
    sigma = np.eye(n, dtype=r.dtype)
    sigma[:2, :2] = [[lam, lam - 1], [1, 1]]
    sigma_inv = np.eye(n, dtype=r.dtype)
    sigma_inv[:2, :2] = [[1, 1 - lam], [-1, lam]]
    q_perm = sigma @ q_tilde @ sigma_inv

    q = np.empty_like(q_perm)
    q[np.ix_(order, order)] = q_perm
    return q


def construct_idempotent_with_diagonal(d, cfg=DEFAULT_TOL):
    """An idempotent ``q`` with ``diag(q) = d``.

    Trace one: the rows-constant matrix ``q[i, j] = d[i]``. Otherwise entries
    equal to one are split off, or two entries are merged into
    ``d_i + d_j - 1`` and the smaller solution is conjugated by a 2x2 shear.
    """
    d = _diag_vector(d)
    report = diagonal_feasible(d, cfg)
    if not report.feasible:
        raise InfeasibleDiagonal(report)
    dtype = complex if np.iscomplexobj(d) else float
    d = d.astype(dtype)
    if report.reason is Reason.ZERO:
        return np.zeros((d.size, d.size), dtype=dtype)
    if report.reason is Reason.IDENTITY:
        return np.eye(d.size, dtype=dtype)
    return _build(d, cfg.integrality_tol)


def expectation_compression_matrix(p, cfg=DEFAULT_TOL):
    """Matrix of ``c -> diag(p diag(c) (1 - p))`` on diagonal vectors.

    Entries ``M[i, j] = delta_ij p[i, i] - |p[i, j]|^2``: a weighted graph
    Laplacian whose kernel is spanned by the indicators of the minimal blocks
    of `p`.
    """
    p = square(p)
    if not is_projection(p, cfg.residual_tol):
        raise NotProjection("compression matrix needs a projection")
    m = -np.abs(p) ** 2
    m[np.diag_indices_from(m)] += np.diag(p).real
    return (m + m.T) / 2


def _check_projection(p, cfg):
    p = square(p)
    if not is_projection(p, cfg.residual_tol):
        raise NotProjection("expected an orthogonal projection")
    return p


def range_diagonal_feasible(p, d, cfg=DEFAULT_TOL):
    """Whether some idempotent with the range of `p` has diagonal `d`.

    Holds iff on every minimal block ``f_j`` of `p` the trace of `d` equals
    the rank of ``p f_j``.
    """
    p = _check_projection(p, cfg)
    d = _diag_vector(d)
    profile = block_trace_profile(d, p, None, cfg)
    bad = tuple(j for j, (tr, rk) in enumerate(profile)
                if not matches_integer(tr, rk, cfg.integrality_tol))
    if bad:
        return FeasibilityReport(False, Reason.BLOCK_MISMATCH, bad)
    return FeasibilityReport(True, Reason.BLOCKS_MATCH)


def min_norm_diagonal_solve(lap, rhs, rel_floor=1e-10):
    """Minimum-norm ``c`` with ``lap @ c = rhs`` for a PSD Laplacian.

    Components along eigenvalues below ``rel_floor * ||lap||_2`` are treated
    as kernel. Returns ``(c, residual, smallest_kept_eigenvalue)``.
    """
    w, v = np.linalg.eigh(lap)
    scale = max(abs(w[-1]), 1e-300) if w.size else 1.0
    keep = w > rel_floor * scale
    coeff = dag(v[:, keep]) @ rhs
    c = v[:, keep] @ (coeff / w[keep])
    residual = float(np.linalg.norm(lap @ c - rhs))
    smallest = float(w[keep][0]) if np.any(keep) else 0.0
    return c, residual, smallest


def idempotent_with_range_and_diagonal(p, d, cfg=DEFAULT_TOL):
    """Idempotent ``q = p + p x (1 - p)`` with ``diag(q) = d``.

    ``x = p diag(c) (1 - p)`` is the minimum-norm solution, with ``c`` solving
    the compression system ``M c = d - diag(p)``.
    """
    p = _check_projection(p, cfg)
    d = _diag_vector(d)
    report = range_diagonal_feasible(p, d, cfg)
    if not report.feasible:
        raise Infeasible(report)
    p = p.astype(complex) if (np.iscomplexobj(d) or np.iscomplexobj(p)) else p.astype(float)
    rhs = d - expectation(p)
    lap = expectation_compression_matrix(p, cfg)
    c, residual, _ = min_norm_diagonal_solve(lap, rhs)
    if residual > cfg.residual_tol * max(1.0, fnorm(rhs)):
        raise SolverBreakdown(f"compression system residual {residual:.3g}")
    perp = np.eye(p.shape[0]) - p
    return p + (p * c) @ perp


def range_projection(q, cfg=DEFAULT_TOL):
    """Orthogonal projection onto the range of an idempotent: ``q (q + q* - 1)^-1``."""
    q = square(q)
    if not is_idempotent(q, cfg.residual_tol):
        raise NotIdempotent("range_projection needs an idempotent")
    pencil = q + dag(q) - np.eye(q.shape[0])
    if np.linalg.cond(pencil) > 1 / cfg.residual_tol:
        raise SingularPencil("q + q* - id is numerically singular")
    # x pencil = q  <=>  pencil* x* = q*
    x = dag(np.linalg.solve(dag(pencil), dag(q)))
    return hermitian_part(x)


def gamma_bound(d, cfg=DEFAULT_TOL, max_n=24):
    """Gap between the non-integral subset sums of `d` and the integers.

    ``bound = gamma / floor(n/2)`` (``floor(n/2)`` taken as at least one).
    """
    d = _diag_vector(d)
    if np.iscomplexobj(d):
        if np.max(np.abs(d.imag)) > cfg.integrality_tol:
            raise ComplexUnsupported("gamma is defined for real diagonals only")
        d = d.real
    n = d.size
    if n > max_n:
        raise TooLarge(f"subset-sum enumeration limited to n <= {max_n}")
    sums = np.zeros(1)
    for x in d.astype(float):
        sums = np.concatenate((sums, sums + x))
    dist = np.abs(sums - np.round(sums))
    nonint = dist > cfg.integrality_tol
    if not np.any(nonint):
        gamma, has = 1.0, False
    else:
        gamma, has = float(np.min(dist[nonint])), True
    return GammaBound(gamma, has, gamma / max(1, n // 2))


def rigidity_check(q, d, cfg=DEFAULT_TOL):
    """Feasibility of diagonal `d` for the range of idempotent `q`.

    When ``||diag(q) - d||_inf`` is below the gamma bound and ``trace(d)``
    equals ``rank(q)``, feasibility is guaranteed; a failure there raises
    RigidityViolation instead of returning False.
    """
    q = square(q)
    d = _diag_vector(d)
    p = range_projection(q, cfg)
    report = range_diagonal_feasible(p, d, cfg)
    gb = gamma_bound(d, cfg)
    dist = float(np.max(np.abs(expectation(q) - d)))
    rank_q = round(float(np.trace(p).real))
    if dist < gb.bound and matches_integer(np.sum(d), rank_q, cfg.integrality_tol):
        if not report.feasible:
            raise RigidityViolation(
                f"distance {dist:.3g} below bound {gb.bound:.3g} but blocks {report.blocks} mismatch"
            )
    return report.feasible
