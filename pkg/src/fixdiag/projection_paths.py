"""Paths of projections with a fixed diagonal.

A projection ``p`` in ``M_2n`` is written in 2x2 block form ``[[a, b], [b*, d]]``.
When ``diag(p)`` is ``c2`` on the first n coordinates and ``1 - c2`` on the
rest, ``p = [[a, s(a) u], [u* s(a), u* (1 - a) u]]`` with ``s(a) = sqrt(a(1-a))``
and ``u`` unitary. Moving ``a`` linearly to ``c2 * id`` and then ``u`` to the
identity keeps the diagonal fixed and ends at the canonical projection
``[[c2, cs], [cs, 1 - c2]]`` (blockwise scalar multiples of the identity).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diagonal import DiagonalProjection, expectation
from .errors import (
    BadParameters,
    BlockLawViolated,
    DimensionMismatch,
    InvalidInput,
    KernelDimMismatch,
    NotAmplifiedDiagonal,
    NotHalfDiagonal,
    NotProjection,
    RealFullFamilyEmpty,
    RealM2Disconnected,
    SignConstraintViolated,
    WrongComponent,
)
from .linalg import (
    DEFAULT_TOL,
    as_field,
    check_field,
    dag,
    extend_to_unitary,
    field_of,
    fnorm,
    hermitian_part,
    is_projection,
    polar_partial_isometry,
    square,
    unitary_path,
)
from .paths import PROJECTION, OperatorPath, Sampled, concatenate, constant_path, sample_curve

DEFAULT_SAMPLES = 200
_LEG_MAX_STEP = 0.1


@dataclass(frozen=True)
class BlockForm:
    a: np.ndarray
    b: np.ndarray
    d: np.ndarray
    split: int


def block_form(p, split, cfg=DEFAULT_TOL):
    """Split a projection into ``a, b, d`` blocks and check the block laws.

    Laws: (i) ``0 <= a, d <= id``; (ii) ``b b* = a(1-a)`` and
    ``b* b = d(1-d)``; (iii) ``a b = b (1 - d)``.
    """
    p = square(p)
    n = p.shape[0]
    if not 0 < split < n:
        raise DimensionMismatch(f"split must lie strictly between 0 and {n}")
    if not is_projection(p, cfg.residual_tol):
        raise NotProjection("block_form needs a projection")
    a, b, d = p[:split, :split], p[:split, split:], p[split:, split:]
    tol = cfg.residual_tol * max(1.0, fnorm(p))
    for block in (a, d):
        w = np.linalg.eigvalsh(hermitian_part(block))
        excess = max(-w[0], w[-1] - 1, 0.0)
        if excess > tol:
            raise BlockLawViolated("i", excess)
    ida, idd = np.eye(split), np.eye(n - split)
    checks = (
        ("ii", fnorm(b @ dag(b) - a @ (ida - a))),
        ("ii", fnorm(dag(b) @ b - d @ (idd - d))),
        ("iii", fnorm(a @ b - b @ (idd - d))),
    )
    for law, res in checks:
        if res > tol:
            raise BlockLawViolated(law, res)
    return BlockForm(a, b, d, split)


def _split_kernel(basis, block):
    """Split span(basis) into the parts where `block` is ~0 and ~1."""
    if basis.shape[1] == 0:
        return basis, basis
    w, z = np.linalg.eigh(hermitian_part(dag(basis) @ block @ basis))
    return basis @ z[:, w < 0.5], basis @ z[:, w >= 0.5]


def canonical_unitary(bf, field, cfg=DEFAULT_TOL, det_target=None):
    """Unitary ``u`` with ``b = s(a) u`` and ``d = u* (1 - a) u``.

    Extends the polar factor of ``b`` by sending ker d to ker(1-a) and
    ker(1-d) to ker a; those dimensions agree for any projection whose
    diagonal blocks have matching traces.
    """
    a, b, d = bf.a, bf.b, bf.d
    w, s, vh = np.linalg.svd(b)
    r = int(np.sum(s > cfg.zero_tol))
    u_r, _, kdim, cdim = polar_partial_isometry(b, cfg)
    if kdim != cdim:
        raise KernelDimMismatch(f"dim ker b = {kdim} but dim ker b* = {cdim}")
    ker_b, ker_bs = dag(vh)[:, r:], w[:, r:]
    ker_d, ker_1md = _split_kernel(ker_b, d)
    ker_a, ker_1ma = _split_kernel(ker_bs, a)
    if ker_d.shape[1] != ker_1ma.shape[1] or ker_1md.shape[1] != ker_a.shape[1]:
        raise KernelDimMismatch("kernel dimensions of the diagonal blocks disagree")
    u = extend_to_unitary(
        u_r, field, det_target,
        kernel_basis=np.hstack([ker_d, ker_1md]),
        cokernel_basis=np.hstack([ker_1ma, ker_a]),
    )
    k = a.shape[0]
    if fnorm(d - dag(u) @ (np.eye(k) - a) @ u) > 1e-6 * max(1.0, fnorm(d)):
        raise KernelDimMismatch("unitary factor does not reproduce the d block")
    return u, kdim


def _leg_a(p, a, u, c2, samples, field):
    """Sampled leg ``a_t = (1 - t) a + t c2 id`` with fixed unitary ``u``."""
    n = a.shape[0]
    lam, wvec = np.linalg.eigh(hermitian_part(a))
    lam = np.clip(lam, 0.0, 1.0)
    eye = np.eye(n)
    cs = np.sqrt(c2 * (1 - c2))

    def at(t):
        if t == 0.0:
            return p
        if t == 1.0:
            return _canonical_blocks(c2, cs, u)
        lt = (1 - t) * lam + t * c2
        at_ = (wvec * lt) @ dag(wvec)
        st = (wvec * np.sqrt(lt * (1 - lt))) @ dag(wvec)
        top = np.hstack([at_, st @ u])
        bottom = np.hstack([dag(u) @ st, dag(u) @ (eye - at_) @ u])
        return _to_field(np.vstack([top, bottom]), field)

    # quadratic spacing tames the square-root speed near t = 0
    ts = np.linspace(0.0, 1.0, max(samples, 2)) ** 2
    return sample_curve(at, ts, _LEG_MAX_STEP)


def _canonical_blocks(c2, cs, v):
    n = v.shape[0]
    eye = np.eye(n)
    return np.block([[c2 * eye, cs * v], [cs * dag(v), (1 - c2) * eye]])


def _to_field(m, field):
    return m.real.copy() if field == "R" else m


def _leg_unitary(u0, u1, c2, samples, field):
    """Sampled leg ``[[c2, cs v], [cs v*, 1 - c2]]`` with ``v`` from u0 to u1."""
    cs = np.sqrt(c2 * (1 - c2))
    step = unitary_path(dag(u0) @ u1, field)

    def at(s):
        if s == 0.0:
            v = u0
        elif s == 1.0:
            v = u1
        else:
            v = u0 @ step(s)
        return _to_field(_canonical_blocks(c2, cs, v), field)

    return sample_curve(at, np.linspace(0.0, 1.0, max(samples, 2)), _LEG_MAX_STEP)


def bridge_projection(n, field="R"):
    """Diagonal-1/2 projection in ``M_2n`` whose off-diagonal block is singular.

    Coordinates 0, 1 are coupled, n, n+1 are coupled, and each j >= 2 is
    paired with n + j; for n = 2 this is the 4x4 two-block matrix.
    """
    if n < 2:
        raise InvalidInput("bridge needs n >= 2")
    m = np.zeros((2 * n, 2 * n))
    for i, j in [(0, 1), (n, n + 1)] + [(k, n + k) for k in range(2, n)]:
        m[np.ix_([i, j], [i, j])] = 0.5
    return m.astype(complex) if field == "C" else m


def _path_to_canonical(p, c2, field, cfg, samples, allow_bridge):
    n = p.shape[0] // 2
    eye = np.eye(n)
    canonical = _to_field(_canonical_blocks(c2, np.sqrt(c2 * (1 - c2)), eye), field)
    fixed = np.concatenate([np.full(n, c2), np.full(n, 1 - c2)])
    if fnorm(p - canonical) <= cfg.residual_tol:
        return constant_path(PROJECTION, p, fixed, field)

    bf = block_form(p, n, cfg)
    det_target = None
    if field == "R":
        u, kdim = canonical_unitary(bf, field, cfg)
        if np.linalg.det(u) < 0 and kdim > 0:
            u, kdim = canonical_unitary(bf, field, cfg, det_target=1)
    else:
        u, kdim = canonical_unitary(bf, field, cfg)

    pieces = []
    if fnorm(bf.a - c2 * eye) > cfg.zero_tol:
        pieces.append(_leg_a(p, bf.a, u, c2, samples, field))
    if field == "R" and np.linalg.det(u) < 0:
        if not allow_bridge:
            raise WrongComponent("unitary factor has determinant -1 and b is invertible")
        bridge = bridge_projection(n, "R")
        bbf = block_form(bridge, n, cfg)
        u_minus, _ = canonical_unitary(bbf, field, cfg, det_target=-1)
        u_plus, _ = canonical_unitary(bbf, field, cfg, det_target=1)
        pieces.append(_leg_unitary(u, u_minus, c2, samples, field))
        pieces.append(_leg_a(bridge, bbf.a, u_minus, c2, samples, field).reversed())
        pieces.append(_leg_a(bridge, bbf.a, u_plus, c2, samples, field))
        u = u_plus
    if fnorm(u - eye) > cfg.zero_tol:
        pieces.append(_leg_unitary(u, eye, c2, samples, field))
    if not pieces:
        return constant_path(PROJECTION, p, fixed, field)
    return OperatorPath(PROJECTION, fixed, pieces, 2 * n, field)


def _prepare(p, field, cfg):
    field = check_field(field or field_of(np.asarray(p)))
    p = as_field(square(p), field)
    if p.shape[0] % 2:
        raise DimensionMismatch("expected a matrix of even size 2n")
    if not is_projection(p, cfg.residual_tol):
        raise NotProjection("expected a projection")
    return p, field


def half_diagonal_path_to_canonical(p, field=None, cfg=DEFAULT_TOL, samples=DEFAULT_SAMPLES):
    """Path of diagonal-1/2 projections from `p` to ``[[id, id], [id, id]] / 2``.

    Over the reals with det(u) = -1 and invertible ``b`` the path detours
    through :func:`bridge_projection`, where either determinant is available.
    """
    p, field = _prepare(p, field, cfg)
    n = p.shape[0] // 2
    if np.max(np.abs(expectation(p) - 0.5)) > cfg.residual_tol:
        raise NotHalfDiagonal("diagonal entries must all equal 1/2")
    if field == "R" and n == 1:
        canonical = np.full((2, 2), 0.5)
        if fnorm(p - canonical) <= cfg.residual_tol:
            return constant_path(PROJECTION, p, np.full(2, 0.5), field)
        raise RealM2Disconnected("real 2x2 diagonal-1/2 projections form a two-point set")
    return _path_to_canonical(p, 0.5, field, cfg, samples, allow_bridge=True)


def connect_half_projections(p, q, field=None, cfg=DEFAULT_TOL, samples=DEFAULT_SAMPLES):
    """Path between two diagonal-1/2 projections through the canonical one."""
    p, field = _prepare(p, field, cfg)
    q, _ = _prepare(q, field, cfg)
    if p.shape != q.shape:
        raise DimensionMismatch("projections must have the same size")
    if fnorm(p - q) <= cfg.residual_tol and np.max(np.abs(expectation(p) - 0.5)) <= cfg.residual_tol:
        return constant_path(PROJECTION, p, np.full(p.shape[0], 0.5), field)
    if field == "R" and p.shape[0] == 2:
        raise RealM2Disconnected("real 2x2 diagonal-1/2 projections form a two-point set")
    there = half_diagonal_path_to_canonical(p, field, cfg, samples)
    back = half_diagonal_path_to_canonical(q, field, cfg, samples)
    return concatenate([there, back.reversed()])


def amplified_path_to_canonical(p, e, theta, field=None, cfg=DEFAULT_TOL, samples=DEFAULT_SAMPLES):
    """Path with fixed diagonal ``cos^2(theta) e + sin^2(theta) (1 - e)``.

    `e` is a rank-n :class:`DiagonalProjection`. The computation runs in the
    basis where supp(e) comes first; the returned path is in the original
    coordinates.
    """
    p, field = _prepare(p, field, cfg)
    n2 = p.shape[0]
    n = n2 // 2
    if not isinstance(e, DiagonalProjection):
        e = DiagonalProjection(tuple(e), n2)
    if e.n != n2 or e.rank != n:
        raise InvalidInput("e must be a rank-n diagonal projection in M_2n")
    if not 0.0 <= theta <= np.pi / 2:
        raise InvalidInput("theta must lie in [0, pi/2]")
    c2 = float(np.cos(theta) ** 2)
    if abs(c2 - 0.5) < 1e-15:
        c2 = 0.5
    target = np.full(n2, 1 - c2)
    target[list(e.support)] = c2
    if np.max(np.abs(expectation(p) - target)) > cfg.residual_tol:
        raise NotAmplifiedDiagonal("diagonal does not match cos^2 e + sin^2 e^perp")

    perm = np.array(list(e.support) + list(e.complement().support))
    inv = np.argsort(perm)
    pp = p[np.ix_(perm, perm)]
    path = _path_to_canonical(pp, c2, field, cfg, samples, allow_bridge=(c2 == 0.5 and n > 1))
    out = path.map(lambda m: m[np.ix_(inv, inv)])
    out.fixed_diagonal = target
    return out


# --- explicit 4x4 families -------------------------------------------------

@dataclass(frozen=True)
class Full:
    """All sixteen entries nonzero; ``t1^2 + t2^2 + t3^2 = 1/4``."""

    t: tuple
    xi: tuple = (1, 1, 1)
    sign: int = 1


@dataclass(frozen=True)
class FourNull:
    """Four zero entries; ``t1^2 + t2^2 = 1/4``.

    `variant` is the index of the pair partition ({01|23}, {02|13}, {03|12})
    holding the zero entries; the unpermuted display is variant 2.
    """

    variant: int
    t: tuple
    xi: tuple = (1, 1, 1)


@dataclass(frozen=True)
class EightNull:
    """Two 2x2 blocks; `variant` indexes the pair partition holding them."""

    variant: int = 0
    xi: tuple = (1, 1)


_FOURNULL_PERM = {0: (0, 3, 2, 1), 1: (0, 1, 3, 2), 2: (0, 1, 2, 3)}
_EIGHTNULL_PERM = {0: (0, 1, 2, 3), 1: (0, 2, 1, 3), 2: (0, 3, 2, 1)}
_PARAM_TOL = 1e-12


def _check_t(t, count):
    t = np.asarray(t, dtype=float)
    if t.shape != (count,) or np.any(t <= 0):
        raise BadParameters(f"need {count} strictly positive t parameters")
    if abs(np.linalg.norm(t) - 0.5) > _PARAM_TOL:
        raise BadParameters(f"t parameters must have Euclidean norm 1/2, got {np.linalg.norm(t)!r}")
    return t


def _check_xi(xi, count, field):
    xi = np.asarray(xi, dtype=complex)
    if xi.shape != (count,) or np.any(np.abs(np.abs(xi) - 1) > _PARAM_TOL):
        raise BadParameters(f"need {count} unimodular xi parameters")
    if field == "R" and np.any(np.abs(xi.imag) > _PARAM_TOL):
        raise BadParameters("real field requires xi in {+1, -1}")
    return xi


def _permute(m, perm):
    perm = list(perm)
    return m[np.ix_(perm, perm)]


def m4_family(family, field="C"):
    """The 4x4 diagonal-1/2 projection of the given explicit family."""
    check_field(field)
    c = np.conj
    if isinstance(family, Full):
        if field == "R":
            raise RealFullFamilyEmpty("no real 4x4 diagonal-1/2 projection has all entries nonzero")
        t1, t2, t3 = _check_t(family.t, 3)
        x1, x2, x3 = _check_xi(family.xi, 3, field)
        if family.sign not in (1, -1):
            raise BadParameters("sign must be +1 or -1")
        s = family.sign
        m = np.array([
            [0.5, t1 * c(x1), t2 * c(x2), t3 * c(x3)],
            [t1 * x1, 0.5, -s * 1j * t3 * x1 * c(x2), s * 1j * t2 * x1 * c(x3)],
            [t2 * x2, s * 1j * t3 * c(x1) * x2, 0.5, -s * 1j * t1 * x2 * c(x3)],
            [t3 * x3, -s * 1j * t2 * c(x1) * x3, s * 1j * t1 * c(x2) * x3, 0.5],
        ])
    elif isinstance(family, FourNull):
        if family.variant not in _FOURNULL_PERM:
            raise BadParameters("variant must be 0, 1 or 2")
        t1, t2 = _check_t(family.t, 2)
        x1, x2, x3 = _check_xi(family.xi, 3, field)
        m = np.array([
            [0.5, t1 * c(x1), t2 * c(x2), 0],
            [t1 * x1, 0.5, 0, t2 * c(x3)],
            [t2 * x2, 0, 0.5, -t1 * c(x1) * x2 * c(x3)],
            [0, t2 * x3, -t1 * x1 * c(x2) * x3, 0.5],
        ])
        m = _permute(m, _FOURNULL_PERM[family.variant])
    elif isinstance(family, EightNull):
        if family.variant not in _EIGHTNULL_PERM:
            raise BadParameters("variant must be 0, 1 or 2")
        x1, x2 = _check_xi(family.xi, 2, field)
        m = np.array([
            [0.5, c(x1) / 2, 0, 0],
            [x1 / 2, 0.5, 0, 0],
            [0, 0, 0.5, c(x2) / 2],
            [0, 0, x2 / 2, 0.5],
        ])
        m = _permute(m, _EIGHTNULL_PERM[family.variant])
    else:
        raise BadParameters(f"unknown family {family!r}")
    return m.real.copy() if field == "R" else m.astype(complex)


def m4_real_extreme(eps, theta):
    e1, e2, e5, e6 = eps
    co, si = np.cos(theta), np.sin(theta)
    return np.array([
        [0.5, co * e1 / 2, si * e2 / 2, 0],
        [co * e1 / 2, 0.5, 0, si * e5 / 2],
        [si * e2 / 2, 0, 0.5, co * e6 / 2],
        [0, si * e5 / 2, co * e6 / 2, 0.5],
    ])


def m4_real_extreme_path(eps, samples=DEFAULT_SAMPLES):
    """Real path between two extreme diagonal-1/2 projections of ``M_4``."""
    eps = tuple(int(e) for e in eps)
    if len(eps) != 4 or any(e not in (1, -1) for e in eps):
        raise BadParameters("eps must be four signs")
    if np.prod(eps) != -1:
        raise SignConstraintViolated("need eps1 * eps2 * eps5 * eps6 = -1")
    ts = np.linspace(0.0, 1.0, max(samples, 2))
    mats = np.array([m4_real_extreme(eps, t * np.pi / 2) for t in ts])
    return OperatorPath(PROJECTION, np.full(4, 0.5), [Sampled(ts, mats)], 4, "R")
