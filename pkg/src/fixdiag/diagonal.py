"""The diagonal algebra: conditional expectation and minimal block decomposition."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import InvalidInput, NotProjection
from .linalg import DEFAULT_TOL, is_projection, rank, square


def expectation(x):
    """Diagonal of `x` (the conditional expectation onto diagonal matrices)."""
    return np.diag(square(x)).copy()


def embed(d):
    return np.diag(np.asarray(d))


@dataclass(frozen=True)
class BlockPartition:
    blocks: tuple

    def __post_init__(self):
        seen = sorted(i for b in self.blocks for i in b)
        if seen != list(range(len(seen))) or any(len(b) == 0 for b in self.blocks):
            raise InvalidInput("blocks must be non-empty and partition 0..n-1")

    @property
    def n(self):
        return sum(len(b) for b in self.blocks)

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def labels(self):
        """Block index of every coordinate."""
        out = np.empty(self.n, dtype=int)
        for j, b in enumerate(self.blocks):
            out[list(b)] = j
        return out

    def indicator(self, j):
        return DiagonalProjection(self.blocks[j], self.n)

    def is_coarsening_of(self, finer):
        """True if every block of `finer` lies inside a single block here."""
        lab = self.labels()
        return all(len({lab[i] for i in b}) == 1 for b in finer.blocks)


@dataclass(frozen=True)
class DiagonalProjection:
    support: tuple
    n: int

    def __post_init__(self):
        support = tuple(sorted(set(int(i) for i in self.support)))
        if any(i < 0 or i >= self.n for i in support):
            raise InvalidInput("support index out of range")
        object.__setattr__(self, "support", support)

    def matrix(self, dtype=float):
        m = np.zeros((self.n, self.n), dtype=dtype)
        m[self.support, self.support] = 1
        return m

    def complement(self):
        return DiagonalProjection(tuple(sorted(set(range(self.n)) - set(self.support))), self.n)

    @property
    def rank(self):
        return len(self.support)

    def is_trivial(self):
        return self.rank in (0, self.n)


def minimal_block_decomposition(x, tol=DEFAULT_TOL.zero_tol):
    """Connected components of the pattern ``|x[i, j]| > tol`` (either direction).

    Blocks come out sorted by their smallest index, each block sorted. `tol`
    is absolute, so entries meant to be nonzero must stay well above it.
    """
    x = square(x)
    _, labels = connected_components(np.abs(x) > tol, directed=True, connection="weak")
    groups = {}
    for i, lab in enumerate(labels):
        groups.setdefault(lab, []).append(i)
    return BlockPartition(tuple(tuple(g) for g in sorted(groups.values())))


def relative_commutant_dimension(p, tol=DEFAULT_TOL.zero_tol):
    """Dimension of the diagonal matrices commuting with `p` (= block count)."""
    return len(minimal_block_decomposition(p, tol))


def block_trace_profile(d, p, part=None, cfg=DEFAULT_TOL):
    """Per block ``f_j``: ``(sum of d over f_j, rank of f_j p f_j)``."""
    p = square(p)
    if not is_projection(p, cfg.residual_tol):
        raise NotProjection("block_trace_profile needs a projection")
    d = np.asarray(d)
    if d.shape != (p.shape[0],):
        raise InvalidInput("diagonal length does not match the matrix")
    if part is None:
        part = minimal_block_decomposition(p, cfg.zero_tol)
    out = []
    for b in part:
        idx = list(b)
        tr = complex(np.sum(d[idx]))
        out.append((tr, rank(p[np.ix_(idx, idx)], cfg.residual_tol)))
    return out


def is_integral(z, tol=DEFAULT_TOL.integrality_tol):
    z = complex(z)
    return abs(z.real - round(z.real)) <= tol and abs(z.imag) <= tol


def matches_integer(z, k, tol=DEFAULT_TOL.integrality_tol):
    z = complex(z)
    return abs(z.real - k) <= tol and abs(z.imag) <= tol
