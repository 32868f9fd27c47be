import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fixdiag import (
    EightNull,
    FourNull,
    half_diagonal_path_to_canonical,
    m4_family,
    validate_path,
)
from fixdiag.errors import ParseError
from fixdiag.linalg import ToleranceConfig
from fixdiag.pathio import deserialize, residual_csv, serialize
from fixdiag.paths import (
    IDEMPOTENT,
    PROJECTION,
    AffineSegment,
    OperatorPath,
    Sampled,
    constant_path,
)


def test_constant_path_passes():
    p = m4_family(EightNull())
    rep = validate_path(constant_path(PROJECTION, p, np.full(4, 0.5)))
    assert rep.passed and rep.max_algebraic_residual == 0 and rep.max_diagonal_residual == 0


def test_corrupted_sample_fails():
    path = half_diagonal_path_to_canonical(m4_family(FourNull(2, (0.3, 0.4))))
    piece = path.pieces[0]
    mats = piece.mats.copy()
    mats[5, 1, 1] += 0.1
    path.pieces[0] = Sampled(piece.ts, mats)
    rep = validate_path(path)
    assert not rep.passed and rep.max_diagonal_residual >= 0.1 - 1e-12


def test_end_to_end_residual():
    path = half_diagonal_path_to_canonical(m4_family(FourNull(1, (0.3, 0.4))), samples=200)
    rep = validate_path(path)
    assert rep.passed and rep.max_algebraic_residual <= 1e-8


def test_junction_gap_fails():
    a = np.diag([1.0, 0.0])
    b = np.array([[1.0, 0], [0.5, 0]])
    c = np.array([[1.0, 0], [0.9, 0]])
    path = OperatorPath(IDEMPOTENT, np.array([1.0, 0.0]), [AffineSegment(a, b), AffineSegment(c, a)])
    rep = validate_path(path)
    assert not rep.passed and rep.max_junction_gap > 0.3


def test_step_bound():
    path = half_diagonal_path_to_canonical(m4_family(FourNull(2, (0.3, 0.4))), samples=5)
    assert validate_path(path, step_bound=0.15).passed
    assert not validate_path(path, step_bound=1e-3).passed


def test_sample_order_does_not_matter_without_steps(rng):
    path = half_diagonal_path_to_canonical(m4_family(FourNull(0, (0.3, 0.4))))
    piece = path.pieces[0]
    perm = rng.permutation(len(piece.ts))
    shuffled = OperatorPath(PROJECTION, path.fixed_diagonal, [Sampled(piece.ts[perm], piece.mats[perm])])
    a, b = validate_path(OperatorPath(PROJECTION, path.fixed_diagonal, [piece])), validate_path(shuffled)
    assert a.max_algebraic_residual == b.max_algebraic_residual
    assert a.max_diagonal_residual == b.max_diagonal_residual


def _same_path(a, b):
    assert (a.kind, a.n, a.field, a.seed) == (b.kind, b.n, b.field, b.seed)
    assert np.array_equal(a.fixed_diagonal, b.fixed_diagonal)
    assert len(a) == len(b)
    for x, y in zip(a.pieces, b.pieces):
        assert type(x) is type(y)
        if isinstance(x, Sampled):
            assert np.array_equal(x.ts, y.ts) and np.array_equal(x.mats, y.mats)
        else:
            assert np.array_equal(x.start, y.start) and np.array_equal(x.end, y.end)


def test_empty_path_round_trip():
    path = OperatorPath(PROJECTION, np.full(2, 0.5), [], 2, "C", 3)
    back, cfg = deserialize(serialize(path))
    _same_path(path, back)
    assert cfg == ToleranceConfig()


def test_m4_round_trip_exact():
    m = m4_family(FourNull(2, (0.3, 0.4), (np.exp(0.3j), 1j, -1)))
    path = constant_path(PROJECTION, m, np.full(4, 0.5))
    back, _ = deserialize(serialize(path))
    assert np.array_equal(back.start, m)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["R", "C"]))
def test_random_round_trip(seed, field):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))

    def mat():
        m = rng.standard_normal((n, n)) * 10.0 ** rng.integers(-20, 20)
        return m if field == "R" else m + 1j * rng.standard_normal((n, n))

    pieces = [AffineSegment(mat(), mat()), Sampled(rng.random(3), np.array([mat() for _ in range(3)]))]
    path = OperatorPath(IDEMPOTENT, rng.standard_normal(n), pieces, n, field, seed)
    back, _ = deserialize(serialize(path, ToleranceConfig(1e-11, 1e-7, 1e-9)))
    _same_path(path, back)


def test_parse_errors():
    with pytest.raises(ParseError):
        deserialize('{"v": 1, "header": ')
    good = json.loads(serialize(constant_path(PROJECTION, np.eye(2), np.ones(2))))
    bad = json.loads(json.dumps(good))
    bad["pieces"][0]["samples"][0][1] = [[0, 0]]
    with pytest.raises(ParseError) as exc:
        deserialize(json.dumps(bad))
    assert "$.pieces[0]" in str(exc.value)
    bad = json.loads(json.dumps(good))
    bad["v"] = 2
    with pytest.raises(ParseError):
        deserialize(json.dumps(bad))
    bad = json.loads(json.dumps(good))
    bad["header"]["field"] = "R"
    bad["pieces"][0]["samples"][0][0][0] = [1.0, 0.5]
    with pytest.raises(ParseError):
        deserialize(json.dumps(bad))


def test_residual_csv_columns():
    path = half_diagonal_path_to_canonical(m4_family(FourNull(2, (0.3, 0.4))), samples=10)
    lines = residual_csv(path).strip().splitlines()
    assert lines[0] == "t,algebraic_residual,diagonal_residual,step"
    ts = [float(line.split(",")[0]) for line in lines[1:]]
    assert ts == sorted(ts)
