"""Dense real/complex matrix kernel.

Matrices are plain numpy arrays. The field is carried by the dtype: float
arrays are real, complex arrays are complex. Functions that need the field
explicitly take ``field`` as ``"R"`` or ``"C"``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    DetUnreachable,
    DimensionMismatch,
    InvalidInput,
    NotHermitian,
    NotPSD,
    NotUnitary,
    WrongComponent,
)

FIELDS = ("R", "C")


@dataclass(frozen=True)
class ToleranceConfig:
    zero_tol: float = 1e-10
    residual_tol: float = 1e-8
    integrality_tol: float = 1e-8

    def __post_init__(self):
        for name in ("zero_tol", "residual_tol", "integrality_tol"):
            if not getattr(self, name) > 0:
                raise InvalidInput(f"{name} must be strictly positive")
        if not self.zero_tol < 1:
            raise InvalidInput("zero_tol must be < 1")


DEFAULT_TOL = ToleranceConfig()


def dag(a):
    return np.conj(a).T


def fnorm(a):
    return float(np.linalg.norm(a))


def check_field(field):
    if field not in FIELDS:
        raise InvalidInput(f"field must be 'R' or 'C', got {field!r}")
    return field


def field_of(a):
    return "C" if np.iscomplexobj(a) else "R"


def as_field(a, field, tol=DEFAULT_TOL.residual_tol):
    """Return `a` as a float or complex array according to `field`."""
    check_field(field)
    a = np.asarray(a)
    if field == "C":
        return a.astype(complex)
    if np.iscomplexobj(a):
        if np.max(np.abs(a.imag), initial=0.0) > tol:
            raise InvalidInput("complex entries in a real-field matrix")
        a = a.real
    return a.astype(float)


def square(a, what="matrix"):
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{what} must be square, got shape {a.shape}")
    return a


def hermitian_part(a):
    return (a + dag(a)) / 2


def projection_residual(p):
    """||p^2 - p||_F + ||p - p*||_F."""
    return fnorm(p @ p - p) + fnorm(p - dag(p))


def idempotent_residual(q):
    return fnorm(q @ q - q)


def is_projection(p, tol=DEFAULT_TOL.residual_tol):
    return projection_residual(p) <= tol * max(1.0, fnorm(p))


def is_idempotent(q, tol=DEFAULT_TOL.residual_tol):
    return idempotent_residual(q) <= tol * (1.0 + fnorm(q) ** 2)


def hermitian_eig(a, cfg=DEFAULT_TOL):
    """Eigen-decomposition of a Hermitian matrix.

    Returns ``(eigvals, v)`` with eigenvalues ascending and ``v`` unitary such
    that ``a = v @ diag(eigvals) @ v*``. Raises NotHermitian when
    ``||a - a*||_F`` exceeds ``residual_tol * max(1, ||a||_F)``.
    """
    a = square(a)
    if fnorm(a - dag(a)) > cfg.residual_tol * max(1.0, fnorm(a)):
        raise NotHermitian("matrix is not Hermitian within residual_tol")
    w, v = np.linalg.eigh(hermitian_part(a))
    return w, v


def jacobi_eigh(a, tol=1e-13, max_sweeps=100):
    """Cyclic Jacobi eigensolver for Hermitian matrices.

    Slow but self-contained; the test-suite uses it as an independent check on
    :func:`hermitian_eig`. Sweeps run in fixed row-major order until the
    off-diagonal Frobenius norm drops below ``tol * ||a||_F``.
    """
    a = np.array(hermitian_part(square(a)), dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(fnorm(a), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        off = np.sqrt(max(fnorm(a) ** 2 - np.sum(np.abs(np.diag(a)) ** 2), 0.0))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                h = a[p, q]
                mag = abs(h)
                if mag <= 1e-300:
                    continue
                # phase rotation making a[p, q] real positive, then a real rotation
                phase = h / mag
                theta = 0.5 * np.arctan2(2 * mag, (a[q, q] - a[p, p]).real)
                c, s = np.cos(theta), np.sin(theta)
                g = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = dag(g) @ a[idx, :]
                v[:, idx] = v[:, idx] @ g
    w = np.diag(a).real
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def psd_sqrt(a, cfg=DEFAULT_TOL):
    """Principal square root of a positive semidefinite Hermitian matrix.

    Eigenvalues in ``[-residual_tol, 0)`` are clamped to zero.
    """
    w, v = hermitian_eig(a, cfg)
    if w.size and w[0] < -cfg.residual_tol:
        raise NotPSD(f"smallest eigenvalue {w[0]:.3g} is negative")
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ dag(v)
    if not np.iscomplexobj(a):
        root = root.real
    return hermitian_part(root)


def singular_values(a):
    a = np.asarray(a)
    if a.size == 0:
        return np.zeros(0)
    return np.linalg.svd(a, compute_uv=False)


def rank(a, tol=DEFAULT_TOL.residual_tol):
    """Number of singular values exceeding ``tol * sigma_max``."""
    s = singular_values(a)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def polar_partial_isometry(b, cfg=DEFAULT_TOL):
    """Polar decomposition ``b = u |b|`` with ``u`` a partial isometry.

    Returns ``(u, abs_b, ker_dim, coker_dim)``. Singular values at or below
    ``zero_tol`` count as zero, so ``u`` maps ``(ker b)^perp`` isometrically
    onto ``(ker b*)^perp`` and vanishes on ``ker b``.
    """
    b = np.asarray(b)
    rows, cols = b.shape
    w, s, vh = np.linalg.svd(b)
    r = int(np.sum(s > cfg.zero_tol))
    u = w[:, :r] @ vh[:r, :]
    v = dag(vh)
    abs_b = hermitian_part((v[:, : s.size] * s) @ vh[: s.size, :])
    return u, abs_b, cols - r, rows - r


def _kernel_bases(u_restricted):
    """Orthonormal bases of ker u and ker u* for a partial isometry u."""
    w, s, vh = np.linalg.svd(u_restricted)
    r = int(np.sum(s > 0.5))
    return dag(vh)[:, r:], w[:, r:]


def extend_to_unitary(u_restricted, field, det_target=None, kernel_basis=None,
                      cokernel_basis=None):
    """Extend a partial isometry to a unitary agreeing with it on its initial space.

    The i-th column of `kernel_basis` is sent to the i-th column of
    `cokernel_basis`. When the bases are omitted they are computed from the
    singular vectors of `u_restricted`. With ``det_target`` (real field only)
    one kernel/cokernel pair is negated if needed.
    """
    check_field(field)
    u_restricted = as_field(u_restricted, field)
    rows, cols = u_restricted.shape
    if rows != cols:
        raise DimensionMismatch("partial isometry must be square to extend")
    if kernel_basis is None or cokernel_basis is None:
        kernel_basis, cokernel_basis = _kernel_bases(u_restricted)
    kernel_basis = as_field(kernel_basis, field)
    cokernel_basis = as_field(cokernel_basis, field)
    if kernel_basis.shape[1] != cokernel_basis.shape[1]:
        raise DimensionMismatch(
            f"kernel dim {kernel_basis.shape[1]} != cokernel dim {cokernel_basis.shape[1]}"
        )
    u = u_restricted + cokernel_basis @ dag(kernel_basis)
    if det_target is not None:
        if det_target not in (1, -1):
            raise InvalidInput("det_target must be +1 or -1")
        if field != "R":
            raise InvalidInput("det_target is only meaningful over the reals")
        if np.sign(np.linalg.det(u)) != det_target:
            if kernel_basis.shape[1] == 0:
                raise DetUnreachable("no kernel to flip: determinant is fixed")
            u = u - 2 * np.outer(cokernel_basis[:, 0], np.conj(kernel_basis[:, 0]))
    return u


def check_unitary(u, cfg=DEFAULT_TOL):
    u = square(u)
    if fnorm(dag(u) @ u - np.eye(u.shape[0])) > cfg.residual_tol * max(1.0, np.sqrt(u.shape[0])):
        raise NotUnitary("matrix is not unitary within residual_tol")
    return u


def _real_rotation_generator(u):
    """Real Schur data ``(q, blocks)`` for an orthogonal ``u`` with det +1.

    ``blocks`` lists ``(i, j, angle)``: a rotation by `angle` in the plane of
    Schur vectors i, j (from i towards j).
    """
    t, q = scipy.linalg.schur(u, output="real")
    n = u.shape[0]
    blocks = []
    minus_ones = []
    i = 0
    while i < n:
        if i + 1 < n and abs(t[i + 1, i]) > 1e-12:
            # standardized 2x2 block [[c, b], [c', c]] with b * c' < 0
            angle = np.arctan2(np.sqrt(max(-t[i, i + 1] * t[i + 1, i], 0.0)), t[i, i])
            if t[i + 1, i] > 0:
                blocks.append((i, i + 1, angle))
            else:
                blocks.append((i + 1, i, angle))
            i += 2
        else:
            if t[i, i] < 0:
                minus_ones.append(i)
            i += 1
    if len(minus_ones) % 2:
        raise WrongComponent("orthogonal matrix has determinant -1")
    for a, b in zip(minus_ones[::2], minus_ones[1::2]):
        blocks.append((a, b, np.pi))
    return q, blocks


def unitary_path(u, field=None, cfg=DEFAULT_TOL):
    """Return ``t -> u_t``, the principal one-parameter path from id to `u`.

    Complex field: ``u_t = v exp(i t Theta) v*`` with angles in (-pi, pi].
    Real field: the same path built from 2x2 rotation blocks of the real Schur
    form, so every ``u_t`` is real orthogonal; requires det(u) = +1.
    """
    u = check_unitary(u, cfg)
    field = field or field_of(u)
    check_field(field)
    n = u.shape[0]
    if field == "R":
        u = as_field(u, "R")
        if np.linalg.det(u) < 0:
            raise WrongComponent("real path needs det(u) = +1 (SO(n) component)")
        q, blocks = _real_rotation_generator(u)

        def path(t):
            g = np.eye(n)
            for i, j, angle in blocks:
                c, s = np.cos(t * angle), np.sin(t * angle)
                g[i, i] = g[j, j] = c
                g[j, i] = s
                g[i, j] = -s
            return q @ g @ q.T

        return path

    u = as_field(u, "C")
    t_mat, z = scipy.linalg.schur(u, output="complex")
    angles = np.angle(np.diag(t_mat))
    angles[angles <= -np.pi + 1e-15] = np.pi

    def path(t):
        return (z * np.exp(1j * t * angles)) @ dag(z)

    return path


def principal_unitary_log_path(u, t, field=None, cfg=DEFAULT_TOL):
    return unitary_path(u, field, cfg)(t)


def range_basis(p, threshold=0.5):
    """Orthonormal basis of the range of a (near) projection.

    Eigenvectors with eigenvalue above `threshold`, highest first.
    """
    w, v = np.linalg.eigh(hermitian_part(p))
    keep = w > threshold
    return v[:, keep][:, ::-1]


def clean_projection(p):
    """Nearest exact projection to a numerically perturbed one."""
    a = range_basis(p)
    out = a @ dag(a)
    if not np.iscomplexobj(p):
        out = out.real
    return out


def closest_isometry(m):
    """Unitary polar factor of a full-column-rank matrix."""
    w, _, vh = np.linalg.svd(m, full_matrices=False)
    return w @ vh
