"""Families of matrices A(i,l) encoding a candidate twisting map of K^m with K^n.

The scalar lambda_{ij}^{kl} is stored as ``A[i][l][k][j]`` (0-based).  The
dual view B(j,k) has entries ``B(j,k)[l][i] = A(i,l)[k][j]``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, NamedTuple, Optional, Sequence

from .core import (
    ONE,
    ZERO,
    Fraction,
    GuardExceeded,
    Mat,
    MalformedInputError,
    TwistlabError,
    all_perms,
    check_perm,
    identity,
    index0,
    is_zero,
    mat,
    mat_from_json,
    mat_rank,
    mat_to_json,
    zeros,
)


@dataclass(frozen=True)
class TwistingFamily:
    m: int
    n: int
    A: tuple[tuple[Mat, ...], ...]
    _flat: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise MalformedInputError("m and n must be positive")
        grid = tuple(tuple(mat(a) for a in row) for row in self.A)
        if len(grid) != self.m or any(len(row) != self.m for row in grid):
            raise MalformedInputError(f"expected an {self.m}x{self.m} grid of matrices")
        for row in grid:
            for a in row:
                if len(a) != self.n or any(len(r) != self.n for r in a):
                    raise MalformedInputError(f"every A(i,l) must be {self.n}x{self.n}")
        object.__setattr__(self, "A", grid)
        flat = tuple(x for row in grid for a in row for r in a for x in r)
        object.__setattr__(self, "_flat", flat)

    @classmethod
    def from_function(cls, m: int, n: int, fn: Callable[[int, int, int, int], object]):
        """Build from ``fn(i, l, k, j)`` (0-based) giving A(i,l)_{kj}."""
        return cls(m, n, tuple(
            tuple(tuple(tuple(fn(i, l, k, j) for j in range(n)) for k in range(n)) for l in range(m))
            for i in range(m)))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[Mat]]):
        """Build from ``columns[l][i] = A(i,l)`` (0-based lists)."""
        m = len(columns)
        n = len(columns[0][0])
        return cls(m, n, tuple(tuple(columns[l][i] for l in range(m)) for i in range(m)))

    def a(self, i: int, l: int) -> Mat:
        """A(i,l) with 1-based indices."""
        return self.A[index0(i, self.m, "i")][index0(l, self.m, "l")]

    def column(self, l0: int) -> list[Mat]:
        """The matrices A(i,l0) for all i (0-based l0)."""
        return [self.A[i][l0] for i in range(self.m)]

    def with_matrix(self, i0: int, l0: int, a: Mat) -> "TwistingFamily":
        grid = [list(row) for row in self.A]
        grid[i0][l0] = a
        return TwistingFamily(self.m, self.n, tuple(tuple(r) for r in grid))

    def flat(self) -> tuple:
        return self._flat

    def __str__(self):
        from .core import fmt_mat
        parts = []
        for i in range(self.m):
            for l in range(self.m):
                parts.append(f"A({i + 1},{l + 1}) =\n{fmt_mat(self.A[i][l])}")
        return "\n".join(parts)


class RankMatrices(NamedTuple):
    gamma: tuple[tuple[int, ...], ...]
    gamma_tilde: tuple[tuple[int, ...], ...]


class Violation(NamedTuple):
    cond: str
    i: Optional[int]
    i2: Optional[int]
    l: Optional[int]
    j: Optional[int]
    j2: Optional[int]
    k: Optional[int]


@dataclass(frozen=True)
class VerifyReport:
    is_twisting: bool
    violations: tuple[Violation, ...]

    def to_json(self) -> dict:
        return {
            "is_twisting": self.is_twisting,
            "violations": [
                {"cond": v.cond, "witness": [v.i, v.i2, v.l, v.j, v.j2, v.k]} for v in self.violations
            ],
        }


# ----------------------------------------------------------- basic views

def lam(f: TwistingFamily, i: int, j: int, k: int, l: int) -> Fraction:
    """lambda_{ij}^{kl} = A(i,l)_{kj}, 1-based."""
    i0, l0 = index0(i, f.m, "i"), index0(l, f.m, "l")
    j0, k0 = index0(j, f.n, "j"), index0(k, f.n, "k")
    return f.A[i0][l0][k0][j0]


def b_matrix(f: TwistingFamily, j: int, k: int) -> Mat:
    """B(j,k) as an m x m matrix with entry (l,i) = A(i,l)_{kj}, 1-based j, k."""
    j0, k0 = index0(j, f.n, "j"), index0(k, f.n, "k")
    return _b0(f, j0, k0)


def _b0(f: TwistingFamily, j0: int, k0: int) -> Mat:
    return tuple(tuple(f.A[i][l][k0][j0] for i in range(f.m)) for l in range(f.m))


def dual(f: TwistingFamily) -> TwistingFamily:
    """The family of the B(j,k): m' = n, n' = m and A'(j,k) = B(j,k)."""
    return TwistingFamily.from_function(f.n, f.m, lambda j, k, l, i: f.A[i][l][k][j])


def flip(m: int, n: int) -> TwistingFamily:
    one, zero = identity(n), zeros(n)
    return TwistingFamily(m, n, tuple(tuple(one if i == l else zero for l in range(m)) for i in range(m)))


# ---------------------------------------------------------- verification

def _check(f: TwistingFamily, first_only: bool) -> list[Violation]:
    m, n, A = f.m, f.n, f.A
    out: list[Violation] = []

    def add(v):
        out.append(v)
        return first_only

    # C2: A(i,l) 1 = delta_il 1
    for i in range(m):
        for l in range(m):
            target = ONE if i == l else ZERO
            for k in range(n):
                if sum(A[i][l][k]) != target:
                    if add(Violation("C2", i + 1, None, l + 1, None, None, k + 1)):
                        return out
    # C3: sum_i A(i,l) = Id
    for l in range(m):
        for k in range(n):
            for j in range(n):
                s = sum(A[i][l][k][j] for i in range(m))
                if s != (ONE if k == j else ZERO):
                    if add(Violation("C3", None, None, l + 1, j + 1, None, k + 1)):
                        return out
    # C1: A(i,l) A(i',l) = delta_ii' A(i,l)
    for l in range(m):
        for i in range(m):
            a = A[i][l]
            for i2 in range(m):
                b = A[i2][l]
                for k in range(n):
                    row = a[k]
                    for j in range(n):
                        p = sum(row[h] * b[h][j] for h in range(n))
                        if p != (a[k][j] if i == i2 else ZERO):
                            if add(Violation("C1", i + 1, i2 + 1, l + 1, j + 1, None, k + 1)):
                                return out
    # C4: sum_h A(i,h)_{kj} A(h,l)_{kj'} = delta_jj' A(i,l)_{kj}
    for i in range(m):
        for l in range(m):
            for k in range(n):
                for j in range(n):
                    for j2 in range(n):
                        s = sum(A[i][h][k][j] * A[h][l][k][j2] for h in range(m))
                        if s != (A[i][l][k][j] if j == j2 else ZERO):
                            if add(Violation("C4", i + 1, None, l + 1, j + 1, j2 + 1, k + 1)):
                                return out
    return out


def verify(f: TwistingFamily) -> VerifyReport:
    """Full check of the four matrix conditions characterising twisting maps."""
    v = _check(f, first_only=False)
    return VerifyReport(not v, tuple(v))


def is_twisting(f: TwistingFamily) -> bool:
    """Short-circuiting version of :func:`verify`."""
    return not _check(f, first_only=True)


def is_pretwisting(f: TwistingFamily) -> bool:
    """Conditions C1, C2 and C3 only."""
    return not any(v.cond != "C4" for v in verify(f).violations)


def rank_matrices(f: TwistingFamily) -> RankMatrices:
    gamma = tuple(tuple(mat_rank(f.A[i][l]) for l in range(f.m)) for i in range(f.m))
    gtilde = tuple(tuple(mat_rank(_b0(f, j, k)) for k in range(f.n)) for j in range(f.n))
    return RankMatrices(gamma, gtilde)


def sum_trace(f: TwistingFamily) -> Fraction:
    return sum((f.A[i][i][k][k] for i in range(f.m) for k in range(f.n)), ZERO)


# ----------------------------------------------------------- permutations

def _apply0(f: TwistingFamily, s: tuple, t: tuple) -> TwistingFamily:
    A = f.A
    return TwistingFamily.from_function(f.m, f.n, lambda i, l, k, j: A[s[i]][s[l]][t[k]][t[j]])


def apply_perms(f: TwistingFamily, sigma: Sequence[int], varsigma: Sequence[int]) -> TwistingFamily:
    """A'(i,l)_{kj} = A(sigma(i), sigma(l))_{varsigma(k) varsigma(j)}; 1-based images."""
    return _apply0(f, check_perm(sigma, f.m), check_perm(varsigma, f.n))


@lru_cache(maxsize=None)
def _orbit_index_maps(m: int, n: int) -> tuple:
    """For every (sigma, varsigma) the flat-index gather list of the permuted tensor."""
    maps = []
    for s in all_perms(m):
        for t in all_perms(n):
            idx = []
            for i in range(m):
                for l in range(m):
                    base = (s[i] * m + s[l]) * n * n
                    for k in range(n):
                        for j in range(n):
                            idx.append(base + t[k] * n + t[j])
            maps.append((s, t, tuple(idx)))
    return tuple(maps)


CANONICAL_GUARD = 6


def canonical_key(f: TwistingFamily) -> tuple:
    """Lexicographically least permuted lambda tensor (flattened in (i,l,k,j) order)."""
    return _canonical(f)[0]


def _canonical(f: TwistingFamily):
    if f.m > CANONICAL_GUARD or f.n > CANONICAL_GUARD:
        raise GuardExceeded(f"canonical form needs m, n <= {CANONICAL_GUARD}")
    flat = f.flat()
    best = None
    for s, t, idx in _orbit_index_maps(f.m, f.n):
        cand = tuple(flat[p] for p in idx)
        if best is None or cand < best[0]:
            best = (cand, s, t)
    return best


def canonical_form(f: TwistingFamily):
    """Return (canonical family, sigma, varsigma) with 1-based permutation images."""
    key, s, t = _canonical(f)
    g = _apply0(f, s, t)
    return g, tuple(x + 1 for x in s), tuple(x + 1 for x in t)


def orbit_members(f: TwistingFamily):
    """Yield (member, sigma, varsigma) over the whole group, 1-based images; members may repeat."""
    for s, t, _ in _orbit_index_maps(f.m, f.n):
        yield _apply0(f, s, t), tuple(x + 1 for x in s), tuple(x + 1 for x in t)


def member_with_ranks(f: TwistingFamily, gamma, gamma_tilde) -> Optional[TwistingFamily]:
    """First orbit member whose rank matrices equal the given ones exactly, or None."""
    want = (tuple(map(tuple, gamma)), tuple(map(tuple, gamma_tilde)))
    for g, _, _ in orbit_members(f):
        rm = rank_matrices(g)
        if (rm.gamma, rm.gamma_tilde) == want:
            return g
    return None


def is_isomorphic(f: TwistingFamily, g: TwistingFamily) -> bool:
    return (f.m, f.n) == (g.m, g.n) and canonical_key(f) == canonical_key(g)


# ------------------------------------------------ restriction and sums

def restrict(f: TwistingFamily, S: Iterable[int]) -> Optional[TwistingFamily]:
    """Sub-family over S (1-based), or None if A(i,l) != 0 for some i outside S, l in S."""
    idx = sorted({index0(s, f.m, "S element") for s in S})
    if not idx:
        raise TwistlabError("restriction to an empty set")
    inside = set(idx)
    for l in idx:
        for i in range(f.m):
            if i not in inside and not is_zero(f.A[i][l]):
                return None
    return TwistingFamily(len(idx), f.n, tuple(tuple(f.A[i][l] for l in idx) for i in idx))


def direct_sum(f1: TwistingFamily, f2: TwistingFamily) -> TwistingFamily:
    """Block sum over the K^m factor; the cross blocks vanish."""
    if f1.n != f2.n:
        raise TwistlabError("direct sum needs equal n")
    m, n = f1.m + f2.m, f1.n
    z = zeros(n)

    def pick(i, l):
        if i < f1.m and l < f1.m:
            return f1.A[i][l]
        if i >= f1.m and l >= f1.m:
            return f2.A[i - f1.m][l - f1.m]
        return z

    return TwistingFamily(m, n, tuple(tuple(pick(i, l) for l in range(m)) for i in range(m)))


def coarse_quiver(f: TwistingFamily) -> tuple[tuple[int, ...], ...]:
    return tuple(
        tuple(int(i != l and not is_zero(f.A[i][l])) for l in range(f.m)) for i in range(f.m))


def reduced_rank(f: TwistingFamily, l: int) -> int:
    l0 = index0(l, f.m, "l")
    return sum(1 for i in range(f.m) if i != l0 and not is_zero(f.A[i][l0]))


# ------------------------------------------------------------------ JSON

def to_json(f: TwistingFamily) -> dict:
    return {"m": f.m, "n": f.n, "A": [[mat_to_json(f.A[i][l]) for l in range(f.m)] for i in range(f.m)]}


def from_json(obj) -> TwistingFamily:
    if isinstance(obj, (str, bytes)):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise MalformedInputError(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict) or set(obj) != {"m", "n", "A"}:
        raise MalformedInputError('expected an object with keys "m", "n", "A"')
    m, n, grid = obj["m"], obj["n"], obj["A"]
    if not all(isinstance(x, int) and not isinstance(x, bool) and x >= 1 for x in (m, n)):
        raise MalformedInputError("m and n must be positive integers")
    if not isinstance(grid, list) or len(grid) != m or any(
            not isinstance(r, list) or len(r) != m for r in grid):
        raise MalformedInputError(f"A must be an {m}x{m} array of matrices")
    return TwistingFamily(m, n, tuple(tuple(mat_from_json(a, n) for a in row) for row in grid))


def dumps(f: TwistingFamily) -> str:
    return json.dumps(to_json(f), separators=(",", ":"))
