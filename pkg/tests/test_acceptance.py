"""Acceptance criteria 1-9.

Each criterion prints one ``[PASS]`` / ``[FAIL]`` line (run pytest with ``-s``
to see them, or execute this file directly).
"""

import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import crandn, random_unitary  # noqa: E402
from generators import random_half_projection, random_projection, random_t, random_xi  # noqa: E402
from fixdiag import (  # noqa: E402
    EightNull,
    FourNull,
    Full,
    ToleranceConfig,
    connect_frames,
    connect_half_projections,
    connect_idempotents,
    construct_idempotent_with_diagonal,
    diagonal_feasible,
    expectation_compression_matrix,
    frame_from_projection,
    gram_projection,
    harmonic_frame,
    idempotent_with_range_and_diagonal,
    m4_family,
    m4_real_extreme_path,
    range_diagonal_feasible,
    range_projection,
    validate_path,
    verify_funtf,
)
from fixdiag.errors import BadParameters, RealM2Disconnected, SignConstraintViolated  # noqa: E402
from fixdiag.idempotents import Reason  # noqa: E402
from fixdiag.frames import tightness_residual  # noqa: E402
from fixdiag.paths import AffineSegment  # noqa: E402
from fixdiag.projection_paths import block_form, bridge_projection, canonical_unitary  # noqa: E402

SEED = 1234


def report(number, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
    return ok


def canonical(n):
    eye = np.eye(n)
    return np.block([[eye, eye], [eye, eye]]) / 2


def random_integer_trace_diagonal(rng, n, k):
    d = crandn(rng, n) * rng.uniform(0.2, 1.5)
    return d - (np.sum(d) - k) / n


def criterion_1():
    rng = np.random.default_rng(SEED + 1)
    t0 = time.perf_counter()
    worst_alg = worst_diag = 0.0
    ok = True
    for _ in range(500):
        n = int(rng.integers(2, 11))
        k = int(rng.integers(1, n))
        d = random_integer_trace_diagonal(rng, n, k)
        q = construct_idempotent_with_diagonal(d)
        alg = np.linalg.norm(q @ q - q) / (1 + np.linalg.norm(q) ** 2)
        worst_alg = max(worst_alg, alg)
        worst_diag = max(worst_diag, np.max(np.abs(np.diag(q) - d)))
        # infeasible twins
        frac = d + rng.uniform(0.05, 0.95) / n
        r1 = diagonal_feasible(frac)
        big = d + (n - k + int(rng.integers(0, 3))) / n
        r2 = diagonal_feasible(big)
        ok &= (not r1 and r1.reason is Reason.TRACE_NOT_INTEGER
               and not r2 and r2.reason is Reason.TRACE_OUT_OF_RANGE)
    elapsed = time.perf_counter() - t0
    ok &= worst_alg <= 1e-8 and worst_diag <= 1e-9 and elapsed < 5
    return report(1, ok, f"relative residual {worst_alg:.1e}, diagonal error {worst_diag:.1e}, "
                         f"{elapsed:.2f}s")


def criterion_2():
    rng = np.random.default_rng(SEED + 2)
    cfg = ToleranceConfig(residual_tol=1e-8)
    t0 = time.perf_counter()
    passed = 0
    worst_step = worst_alg = 0.0
    for i in range(50):
        n = 1 + i % 3
        p = random_half_projection(rng, n)
        path = connect_half_projections(p, canonical(n), "C", cfg, samples=200)
        rep = validate_path(path, cfg, step_bound=0.15)
        ends = np.allclose(path.start, p) and np.allclose(path.end, canonical(n))
        passed += rep.passed and ends
        worst_step = max(worst_step, rep.max_step)
        worst_alg = max(worst_alg, rep.max_algebraic_residual)
    elapsed = time.perf_counter() - t0
    ok = passed == 50 and elapsed < 30
    return report(2, ok, f"{passed}/50 paths valid, max step {worst_step:.3f}, "
                         f"max residual {worst_alg:.1e}, {elapsed:.1f}s")


def criterion_3():
    cfg = ToleranceConfig()
    p_plus = canonical(2)
    p_minus = canonical(2)
    p_minus[np.ix_([1, 3], [1, 3])] = [[0.5, -0.5], [-0.5, 0.5]]
    dets = [np.linalg.det(canonical_unitary(block_form(p, 2), "R")[0]) for p in (p_plus, p_minus)]
    path = connect_half_projections(p_minus, p_plus, "R", cfg)
    rep = validate_path(path, cfg, step_bound=0.15)
    bridge = bridge_projection(2)
    via_bridge = any(np.allclose(m, bridge) for _, _, m in path.samples())
    real = all(np.isrealobj(m) for _, _, m in path.samples())
    try:
        connect_half_projections(np.full((2, 2), 0.5), np.array([[0.5, -0.5], [-0.5, 0.5]]), "R")
        m2 = False
    except RealM2Disconnected:
        m2 = True
    ok = dets[0] > 0 > dets[1] and rep.passed and via_bridge and real and m2
    return report(3, ok, f"det +1/-1 pair joined via bridge block: {rep.passed and via_bridge}, "
                         f"M2(R) rejected: {m2}")


def criterion_4():
    rng = np.random.default_rng(SEED + 4)
    worst = 0.0
    for _ in range(100):
        for fam in (Full(random_t(rng, 3), random_xi(rng, 3), int(rng.choice([1, -1]))),
                    FourNull(int(rng.integers(3)), random_t(rng, 2), random_xi(rng, 3)),
                    EightNull(int(rng.integers(3)), random_xi(rng, 2))):
            p = m4_family(fam)
            res = np.linalg.norm(p @ p - p) + np.linalg.norm(p - p.conj().T)
            worst = max(worst, res, np.max(np.abs(np.diag(p) - 0.5)))
    tight = ToleranceConfig(residual_tol=1e-12)
    signs = [(a, b, c, -a * b * c) for a in (1, -1) for b in (1, -1) for c in (1, -1)]
    paths_ok = all(validate_path(m4_real_extreme_path(e), tight).passed for e in signs)
    rejected = 0
    for bad in (lambda: m4_family(Full((0.3, 0.3, 0.3))),
                lambda: m4_family(FourNull(2, (0.3, 0.3))),
                lambda: m4_real_extreme_path((1, 1, 1, 1)),
                lambda: m4_real_extreme_path((1, -1, 1, -1))):
        try:
            bad()
        except (BadParameters, SignConstraintViolated):
            rejected += 1
    ok = worst <= 1e-12 and paths_ok and rejected == 4
    return report(4, ok, f"max family residual {worst:.1e}, 8 real theta-paths valid: {paths_ok}, "
                         f"bad draws rejected {rejected}/4")


def planted_projection(rng, n):
    """Random projection with a known number of minimal blocks."""
    sizes = []
    left = n
    while left:
        s = int(rng.integers(1, left + 1))
        sizes.append(s)
        left -= s
    mats = []
    for s in sizes:
        if s == 1:
            mats.append(np.array([[float(rng.integers(2))]], dtype=complex))
        else:
            mats.append(random_projection(rng, s, int(rng.integers(1, s))))
    p = np.zeros((n, n), dtype=complex)
    pos = 0
    for m in mats:
        s = m.shape[0]
        p[pos:pos + s, pos:pos + s] = m
        pos += s
    perm = rng.permutation(n)
    return p[np.ix_(perm, perm)], len(sizes), sizes, perm


def least_squares_solvable(p, d):
    n = p.shape[0]
    perp = np.eye(n) - p
    cols = []
    for i in range(n):
        for j in range(n):
            cols.append(np.outer(p[:, i], perp[j, :]).diagonal())
    a = np.array(cols).T
    rhs = d - np.diag(p)
    x, *_ = np.linalg.lstsq(a, rhs, rcond=None)
    return np.linalg.norm(a @ x - rhs) <= 1e-9


def criterion_5():
    rng = np.random.default_rng(SEED + 5)
    kernel_ok = verdict_ok = 0
    for _ in range(500):
        n = int(rng.integers(1, 11))
        p, count, sizes, perm = planted_projection(rng, n)
        w = np.linalg.eigvalsh(expectation_compression_matrix(p))
        kdim = int(np.sum(w <= 1e-9 * max(1.0, w[-1])))
        kernel_ok += kdim == count
        # diagonal: block traces match ranks, then maybe break one block
        d = crandn(rng, n) * 0.3
        pos = 0
        labels = np.empty(n, dtype=int)
        for b, s in enumerate(sizes):
            labels[perm[pos:pos + s]] = b
            pos += s
        for b in range(count):
            idx = labels == b
            rk = round(np.trace(p[np.ix_(idx, idx)]).real)
            d[idx] += (rk - d[idx].sum()) / idx.sum()
        if rng.random() < 0.5:
            d[int(rng.integers(n))] += rng.choice([0.3, 1.0, 0.2j])
        verdict = bool(range_diagonal_feasible(p, d))
        verdict_ok += verdict == least_squares_solvable(p, d)
    ok = kernel_ok == 500 and verdict_ok == 500
    return report(5, ok, f"kernel dimension = block count {kernel_ok}/500, "
                         f"feasibility agrees with least squares {verdict_ok}/500")


def criterion_6():
    rng = np.random.default_rng(SEED + 6)
    feasible = succeeded = 0
    worst = 0.0
    half_id_ok = True
    for i in range(100):
        n = 1 + i % 4
        p = random_half_projection(rng, n)
        x = crandn(rng, 2 * n, 2 * n)
        y = p @ x @ (np.eye(2 * n) - p)
        dev = np.max(np.abs(np.diag(y)))
        if dev > 0:
            y *= rng.uniform(0.1, 0.99) / (n * dev)
        q = p + y
        half_id_ok &= np.max(np.abs(np.diag(q) - 0.5)) < 1 / n
        rng_q = range_projection(q)
        d = np.full(2 * n, 0.5)
        if range_diagonal_feasible(rng_q, d):
            feasible += 1
            r = idempotent_with_range_and_diagonal(rng_q, d)
            res = max(np.linalg.norm(r @ r - r), np.max(np.abs(np.diag(r) - 0.5)))
            worst = max(worst, res)
            succeeded += res <= 1e-8
    ok = half_id_ok and feasible == 100 and succeeded == 100
    return report(6, ok, f"feasible {feasible}/100, constructed {succeeded}/100, max residual {worst:.1e}")


def criterion_7():
    rng = np.random.default_rng(SEED + 7)
    cfg = ToleranceConfig(residual_tol=1e-7)
    t0 = time.perf_counter()
    passed = monotone = 0
    worst_step = 0.0
    for i in range(25):
        n = 2 + i % 3
        k = int(rng.integers(1, n))
        d = random_integer_trace_diagonal(rng, n, k) * 0.5 + 0.5 * k / n
        q = construct_idempotent_with_diagonal(d)
        r = idempotent_with_range_and_diagonal(random_projection(rng, n, k), d)
        path, traces = connect_idempotents(q, r, SEED + i, cfg=cfg, return_traces=True)
        rep = validate_path(path, cfg, step_bound=0.2)
        ends = np.allclose(path.start, q) and np.allclose(path.end, r)
        passed += rep.passed and ends
        worst_step = max(worst_step, rep.max_step)
        counts = [t.block_counts for t in traces]
        monotone += all(all(a > b for a, b in zip(c, c[1:])) and (not c or c[-1] == 1) for c in counts)
    elapsed = time.perf_counter() - t0
    ok = passed == 25 and monotone == 25 and elapsed < 120
    return report(7, ok, f"{passed}/25 paths valid, traces decreasing {monotone}/25, "
                         f"max step {worst_step:.3f}, {elapsed:.1f}s")


def criterion_8():
    rng = np.random.default_rng(SEED + 8)
    harm_ok = True
    for n, k in [(2, 3), (2, 4), (3, 5), (3, 6), (4, 9)]:
        f = harmonic_frame(n, k)
        ok, res = verify_funtf(f, 1e-10)
        diag_err = np.max(np.abs(np.diag(gram_projection(f)) - n / k))
        harm_ok &= ok and res <= 1e-10 and diag_err <= 1e-12
    round_trip = 0.0
    for _ in range(20):
        f = frame_from_projection(random_half_projection(rng, 2))
        p = gram_projection(f)
        round_trip = max(round_trip, np.linalg.norm(gram_projection(frame_from_projection(p)) - p))
    f = frame_from_projection(random_half_projection(rng, 2))
    g = frame_from_projection(random_half_projection(rng, 2))
    frames = connect_frames(f, g, samples=200)
    tight = max(tightness_residual(x) for x in frames)
    ends = np.allclose(frames[0].vectors, f.vectors) and np.allclose(frames[-1].vectors, g.vectors)
    ok = harm_ok and round_trip <= 1e-9 and tight <= 1e-7 and ends
    return report(8, ok, f"harmonic frames ok: {harm_ok}, round-trip error {round_trip:.1e}, "
                         f"path tightness residual {tight:.1e} over {len(frames)} frames")


def criterion_9():
    rng = np.random.default_rng(SEED + 9)
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(2, 8))
        p = random_projection(rng, n, int(rng.integers(1, n)))
        perp = np.eye(n) - p
        q = p + p @ crandn(rng, n, n) @ perp
        r = p + p @ crandn(rng, n, n) @ perp
        m = AffineSegment(q, r).at(0.5)
        worst = max(worst, np.linalg.norm(m @ m - m))
    return report(9, worst <= 1e-9, f"max midpoint idempotency residual {worst:.1e} over 200 pairs")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 10)])
def test_acceptance(criterion):
    assert criterion()


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria passed")
    sys.exit(0 if all(results) else 1)
