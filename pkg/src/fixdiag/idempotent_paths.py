"""Connecting idempotents with a common diagonal (complex field).

Pipeline: affine moves reduce each endpoint to an idempotent whose range
projection has trivial relative commutant (a single minimal block); the two
ranges are then joined inside that generic set ``Omega`` of the Grassmannian,
and the idempotents ride along as ``p_t + p_t x_t (1 - p_t)`` with ``x_t`` the
minimum-norm correction restoring the diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .diagonal import DiagonalProjection, expectation, minimal_block_decomposition
from .errors import (
    DiagonalMismatch,
    GenericityExhausted,
    NotIdempotent,
    NotIrreducible,
    RankMismatch,
    SolverBreakdown,
    TrivialIdempotent,
)
from .idempotents import expectation_compression_matrix, range_projection
from .linalg import (
    DEFAULT_TOL,
    clean_projection,
    dag,
    fnorm,
    is_idempotent,
    is_projection,
    range_basis,
    square,
    unitary_path,
)
from .paths import (
    IDEMPOTENT,
    AffineSegment,
    OperatorPath,
    Sampled,
    concatenate,
    constant_path,
    sample_curve,
)

T_GRID = (1.0, -1.0, 0.5, 2.0)
LAPLACIAN_FLOOR = 1e-10
# middle legs whose Fiedler value drops below this are retried: the correction
# c grows like 1/lambda_2 and drags the idempotents far out. Absolute, since
# the compression Laplacian of a projection has entries bounded by 1.
CONDITIONING_MARGIN = 1e-4
_MIDDLE_MAX_STEP = 0.1


@dataclass(frozen=True)
class ReductionStep:
    chosen_e: DiagonalProjection
    swapped: bool
    t_used: complex
    commutant_dim_before: int
    commutant_dim_after: int


@dataclass
class ReductionTrace:
    steps: list = field(default_factory=list)
    final: np.ndarray = None
    seed: object = None

    @property
    def block_counts(self):
        if not self.steps:
            return []
        return [self.steps[0].commutant_dim_before] + [s.commutant_dim_after for s in self.steps]


def _crandn(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def _as_idempotent(q, cfg):
    q = square(np.asarray(q, dtype=complex))
    if not is_idempotent(q, cfg.residual_tol):
        raise NotIdempotent("expected an idempotent")
    return q


def _range(q, cfg):
    return clean_projection(range_projection(q, cfg))


def reduce_to_irreducible(q, rng_seed=None, cfg=DEFAULT_TOL, t_retries=8, x_resamples=4):
    """Affine path from `q` to an idempotent whose range has a single block.

    Each round takes the first minimal block ``e`` of the range projection,
    cuts the off-diagonal corners ``e q e^perp + e^perp q e`` (same range and
    diagonal), then adds ``t y`` with ``y = (1-q~) e^perp X q~ e`` for a random
    ``X``, which keeps kernel and diagonal while coupling ``e`` to the rest.
    Returns ``(ReductionTrace, OperatorPath)``.
    """
    q = _as_idempotent(q, cfg)
    n = q.shape[0]
    eye = np.eye(n)
    tol = cfg.zero_tol * (1 + fnorm(q))
    if fnorm(q) <= tol or fnorm(q - eye) <= tol:
        raise TrivialIdempotent("0 and id cannot be reduced")
    d = expectation(q)
    rng = np.random.default_rng(rng_seed)
    trace = ReductionTrace(seed=rng_seed)
    path = OperatorPath(IDEMPOTENT, d, [], n, "C", rng_seed)

    part = minimal_block_decomposition(_range(q, cfg), cfg.zero_tol)
    while len(part) > 1:
        e = part.indicator(0)
        em = e.matrix()
        ep = eye - em
        cut = em @ q @ ep + ep @ q @ em
        qt = q - cut
        if fnorm(cut) > cfg.zero_tol:
            path.append(AffineSegment(q, qt))
        swapped = False
        tol = cfg.zero_tol * (1 + fnorm(qt))
        if fnorm(qt @ em) <= tol or fnorm((eye - qt) @ ep) <= tol:
            e, em, ep, swapped = e.complement(), ep, em, True

        found = None
        for attempt in range(x_resamples):
            y = (eye - qt) @ ep @ _crandn(rng, (n, n)) @ qt @ em
            if fnorm(y) <= tol:
                continue
            y = y / fnorm(y)
            candidates = list(T_GRID) if attempt == 0 else []
            candidates += list(rng.uniform(0.5, 2.0, t_retries))
            for t in candidates:
                r = qt + t * y
                new_part = minimal_block_decomposition(_range(r, cfg), cfg.zero_tol)
                if len(new_part) < len(part) and new_part.is_coarsening_of(part):
                    found = (t, r, new_part)
                    break
            if found:
                break
        if found is None:
            raise GenericityExhausted("no admissible t found; resample X with another seed")
        t, r, new_part = found
        path.append(AffineSegment(qt, r))
        trace.steps.append(ReductionStep(e, swapped, t, len(part), len(new_part)))
        q, part = r, new_part

    trace.final = q
    return trace, path


def _direct_rotation(p0, p1):
    """Unitary V with ``V p0 V* = p1`` pairing principal vectors."""
    n = p0.shape[0]
    eye = np.eye(n)
    v = np.zeros((n, n), dtype=complex)
    for a0, a1 in ((range_basis(p0), range_basis(p1)),
                   (range_basis(eye - p0), range_basis(eye - p1))):
        if a0.shape[1] == 0:
            continue
        u, _, wh = np.linalg.svd(dag(a0) @ a1)
        v += (a1 @ dag(wh)) @ dag(a0 @ u)
    return v


def fiedler_value(p, cfg=DEFAULT_TOL):
    """Second-smallest eigenvalue of the compression Laplacian and its scale."""
    w = np.linalg.eigvalsh(expectation_compression_matrix(p, cfg))
    if w.size < 2:
        return 1.0, 1.0
    return float(w[1]), float(max(w[-1], 1e-300))


def _leaves_omega(ts, mats, cfg):
    """True if a sample is reducible or the Fiedler values dip to zero between samples."""
    vals = []
    for m in mats:
        if len(minimal_block_decomposition(m, cfg.zero_tol)) != 1:
            return True
        lam, scale = fiedler_value(m, cfg)
        if lam < LAPLACIAN_FLOOR * scale:
            return True
        vals.append(lam)
    # a crossing of the reducible set shows up as a quadratic dip to zero
    for i in range(1, len(vals) - 1):
        f0, fm, fp = vals[i], vals[i - 1], vals[i + 1]
        if f0 > fm or f0 > fp:
            continue
        hm, hp = ts[i] - ts[i - 1], ts[i + 1] - ts[i]
        x = np.array([-hm, 0.0, hp])
        a, b, c = np.polyfit(x, [fm, f0, fp], 2)
        vertex = c - b * b / (4 * a) if a > 0 else f0
        if vertex < 0.05 * f0:
            return True
    return False


def _next_eps(eps):
    return 0.1 if not eps else min(2 * eps, 3.0)


def _omega_curve(p0, p1, rng, samples, cfg, eps=0.0, max_retries=12):
    """Curve ``t -> U_t p0 U_t*`` inside Omega from p0 to p1, plus its samples.

    ``U_1 = V exp(eps S)`` with V the direct rotation and S a random
    skew-Hermitian matrix commuting with p0; `eps` grows on each retry.
    Returns ``(fn, ts, mats, eps_used)``.
    """
    v = _direct_rotation(p0, p1)
    n = p0.shape[0]
    eye = np.eye(n)
    ts = np.linspace(0.0, 1.0, max(samples, 2))
    for _ in range(max_retries):
        if eps:
            h = _crandn(rng, (n, n))
            h = (h - dag(h)) / 2
            s = p0 @ h @ p0 + (eye - p0) @ h @ (eye - p0)
            w = v @ scipy.linalg.expm(eps * s)
        else:
            w = v
        step = unitary_path(w, "C")

        def fn(t, step=step):
            if t == 0.0:
                return p0
            if t == 1.0:
                return p1
            u = step(t)
            return (u @ p0 @ dag(u) + dag(u @ p0 @ dag(u))) / 2

        mats = [fn(t) for t in ts]
        if not _leaves_omega(ts, mats, cfg):
            return fn, ts, mats, eps
        eps = _next_eps(eps)
    raise GenericityExhausted("could not find a sampled path inside Omega")


def _check_irreducible_pair(p0, p1, cfg):
    if round(np.trace(p0).real) != round(np.trace(p1).real):
        raise RankMismatch("projections have different ranks")
    for p in (p0, p1):
        if len(minimal_block_decomposition(p, cfg.zero_tol)) != 1:
            raise NotIrreducible("range projection has a nontrivial relative commutant")


def grassmann_path_in_omega(p0, p1, rng_seed=None, samples=200, cfg=DEFAULT_TOL):
    """Sampled path of projections from p0 to p1 with one minimal block throughout."""
    p0 = square(np.asarray(p0, dtype=complex))
    p1 = square(np.asarray(p1, dtype=complex))
    for p in (p0, p1):
        if not is_projection(p, cfg.residual_tol):
            raise NotIdempotent("expected projections")
    _check_irreducible_pair(p0, p1, cfg)
    if fnorm(p0 - p1) <= cfg.residual_tol:
        return Sampled(np.array([0.0]), np.array([p0]))
    _, ts, mats, _ = _omega_curve(p0, p1, np.random.default_rng(rng_seed), samples, cfg)
    return Sampled(ts, np.array(mats))


def _lift(p, d, cfg, margin=0.0):
    """``p + p diag(c) (1 - p)`` with ``c`` the minimum-norm traceless-space solve."""
    lap = expectation_compression_matrix(p, cfg)
    w, v = np.linalg.eigh(lap)
    if w[1] < LAPLACIAN_FLOOR * max(w[-1], 1e-300) or w[1] < margin:
        raise SolverBreakdown("compression Laplacian is (nearly) singular on the traceless subspace")
    rhs = d - expectation(p)
    c = v[:, 1:] @ ((dag(v[:, 1:]) @ rhs) / w[1:])
    if np.linalg.norm(lap @ c - rhs) > cfg.residual_tol * max(1.0, np.linalg.norm(rhs)):
        raise SolverBreakdown("compression system has no solution (trace mismatch?)")
    return p + (p * c) @ (np.eye(p.shape[0]) - p)


def connect_irreducible(q, r, rng_seed=None, samples=200, cfg=DEFAULT_TOL, max_attempts=8):
    """Idempotent path from `q` to `r` (same diagonal, single-block ranges)."""
    q, r = _as_idempotent(q, cfg), _as_idempotent(r, cfg)
    d = expectation(q)
    if q.shape != r.shape or np.max(np.abs(expectation(r) - d)) > cfg.residual_tol:
        raise DiagonalMismatch("idempotents have different diagonals")
    if fnorm(q - r) <= cfg.residual_tol:
        return constant_path(IDEMPOTENT, q, d)
    p0, p1 = _range(q, cfg), _range(r, cfg)
    _check_irreducible_pair(p0, p1, cfg)

    # never demand more conditioning than the endpoints themselves have
    ends = min(fiedler_value(p0, cfg)[0], fiedler_value(p1, cfg)[0])
    margin = min(CONDITIONING_MARGIN, 0.1 * ends)

    rng = np.random.default_rng(rng_seed)
    eps = 0.0
    for _ in range(max_attempts):
        fn_p, ts, _, eps = _omega_curve(p0, p1, rng, samples, cfg, eps)
        eps = _next_eps(eps)
        try:
            middle = sample_curve(lambda t: _lift(fn_p(t), d, cfg, margin), ts, _MIDDLE_MAX_STEP)
        except SolverBreakdown:
            # settle for less conditioning on the next curve
            margin /= 10
            continue
        path = OperatorPath(IDEMPOTENT, d, [], q.shape[0], "C", rng_seed)
        if fnorm(q - middle.start) > 0:
            path.append(AffineSegment(q, middle.start))
        path.append(middle)
        if fnorm(middle.end - r) > 0:
            path.append(AffineSegment(middle.end, r))
        return path
    raise GenericityExhausted("middle leg kept hitting a singular compression system")


def connect_idempotents(q, r, rng_seed=None, samples=200, cfg=DEFAULT_TOL, return_traces=False):
    """Path between two idempotents with the same diagonal."""
    q, r = _as_idempotent(q, cfg), _as_idempotent(r, cfg)
    d = expectation(q)
    if q.shape != r.shape or np.max(np.abs(expectation(r) - d)) > cfg.residual_tol:
        raise DiagonalMismatch("idempotents have different diagonals")
    if fnorm(q - r) <= cfg.residual_tol:
        path, traces = constant_path(IDEMPOTENT, q, d), (ReductionTrace(final=q), ReductionTrace(final=r))
    else:
        sq, sr, sm = np.random.SeedSequence(rng_seed).spawn(3)
        tq, path_q = reduce_to_irreducible(q, sq, cfg)
        tr, path_r = reduce_to_irreducible(r, sr, cfg)
        mid = connect_irreducible(tq.final, tr.final, sm, samples, cfg)
        path = concatenate([path_q, mid, path_r.reversed()])
        path.seed = rng_seed
        traces = (tq, tr)
    return (path, traces) if return_traces else path
