"""Exact rational scalars, dense matrices, permutations and the cross product.

Matrices are immutable tuples of row tuples of :class:`fractions.Fraction`.
All indices handled here are 0-based; the 1-based convention used at the
public boundary is converted by :func:`index0`.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Iterable, Sequence

Rat = Fraction
Vec = tuple[Fraction, ...]
Mat = tuple[tuple[Fraction, ...], ...]

ZERO = Fraction(0)
ONE = Fraction(1)


class TwistlabError(Exception):
    """Domain error: the input is well formed but violates a precondition."""


class MalformedInputError(TwistlabError):
    """The input could not be parsed into the expected shape."""


class GuardExceeded(TwistlabError):
    """A size guard on an exhaustive search was exceeded."""


# ---------------------------------------------------------------- scalars

def rat(x) -> Fraction:
    """Coerce ints, Fractions and strings such as ``"-3/4"`` to a Fraction.

    Floats are rejected so that no rounding can sneak in.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise MalformedInputError(f"not a rational: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        try:
            num, _, den = s.partition("/")
            if den:
                return Fraction(int(num), int(den))
            return Fraction(int(num))
        except (ValueError, ZeroDivisionError) as exc:
            raise MalformedInputError(f"not a rational: {x!r}") from exc
    raise MalformedInputError(f"not a rational: {x!r}")


def fmt_rat(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def index0(i: int, size: int, name: str = "index") -> int:
    """Convert a 1-based public index to a 0-based internal one."""
    if isinstance(i, bool) or not isinstance(i, int) or not 1 <= i <= size:
        raise TwistlabError(f"{name} {i!r} out of range 1..{size}")
    return i - 1


# --------------------------------------------------------------- matrices

def mat(rows: Iterable[Iterable]) -> Mat:
    out = tuple(tuple(rat(x) for x in row) for row in rows)
    if out and len({len(r) for r in out}) != 1:
        raise MalformedInputError("ragged matrix")
    return out


def shape(a: Mat) -> tuple[int, int]:
    return len(a), (len(a[0]) if a else 0)


def zeros(r: int, c: int | None = None) -> Mat:
    c = r if c is None else c
    return tuple((ZERO,) * c for _ in range(r))


def identity(n: int) -> Mat:
    return tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n))


def all_ones(r: int, c: int | None = None) -> Mat:
    c = r if c is None else c
    return tuple((ONE,) * c for _ in range(r))


def unit_matrix(n: int, i: int, j: int) -> Mat:
    """The matrix E^{ij} with a single 1 at (i, j)."""
    return tuple(tuple(ONE if (r, s) == (i, j) else ZERO for s in range(n)) for r in range(n))


def matmul(a: Mat, b: Mat) -> Mat:
    if shape(a)[1] != len(b):
        raise TwistlabError("dimension mismatch in matrix product")
    cols = list(zip(*b))
    return tuple(tuple(sum((x * y for x, y in zip(row, col)), ZERO) for col in cols) for row in a)


def madd(a: Mat, b: Mat) -> Mat:
    return tuple(tuple(x + y for x, y in zip(r, s)) for r, s in zip(a, b))


def msub(a: Mat, b: Mat) -> Mat:
    return tuple(tuple(x - y for x, y in zip(r, s)) for r, s in zip(a, b))


def mscale(c, a: Mat) -> Mat:
    c = rat(c)
    return tuple(tuple(c * x for x in r) for r in a)


def msum(mats: Iterable[Mat], n: int) -> Mat:
    acc = zeros(n)
    for a in mats:
        acc = madd(acc, a)
    return acc


def transpose(a: Mat) -> Mat:
    return tuple(zip(*a))


def is_zero(a: Mat) -> bool:
    return all(x == 0 for row in a for x in row)


def submatrix(a: Mat, rows: Sequence[int], cols: Sequence[int]) -> Mat:
    return tuple(tuple(a[r][c] for c in cols) for r in rows)


def replace_entry(a: Mat, r: int, c: int, value) -> Mat:
    rows = [list(row) for row in a]
    rows[r][c] = rat(value)
    return tuple(tuple(row) for row in rows)


def outer(u: Sequence[Fraction], v: Sequence[Fraction]) -> Mat:
    return tuple(tuple(x * y for y in v) for x in u)


def matvec(a: Mat, v: Sequence[Fraction]) -> Vec:
    return tuple(sum((x * y for x, y in zip(row, v)), ZERO) for row in a)


def support(a: Mat) -> set[tuple[int, int]]:
    return {(r, c) for r, row in enumerate(a) for c, x in enumerate(row) if x != 0}


def _integer_rows(a: Mat) -> list[list[int]]:
    rows = []
    for row in a:
        den = math.lcm(*(x.denominator for x in row)) if row else 1
        rows.append([int(x * den) for x in row])
    return rows


def mat_rank(a: Mat) -> int:
    """Exact rank by fraction-free (Bareiss) elimination with full pivoting."""
    m = _integer_rows(a)
    nrows, ncols = shape(a)
    rank = 0
    prev = 1
    for _ in range(min(nrows, ncols)):
        pivot = None
        for r in range(rank, nrows):
            for c in range(rank, ncols):
                if m[r][c] != 0:
                    pivot = (r, c)
                    break
            if pivot:
                break
        if pivot is None:
            break
        r, c = pivot
        m[rank], m[r] = m[r], m[rank]
        for row in m:
            row[rank], row[c] = row[c], row[rank]
        p = m[rank][rank]
        for r2 in range(rank + 1, nrows):
            for c2 in range(rank + 1, ncols):
                m[r2][c2] = (p * m[r2][c2] - m[r2][rank] * m[rank][c2]) // prev
            m[r2][rank] = 0
        prev = p
        rank += 1
    return rank


def det(a: Mat) -> Fraction:
    n, c = shape(a)
    if n != c:
        raise TwistlabError("determinant of a non-square matrix")
    m = [list(r) for r in a]
    result = ONE
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return ZERO
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            result = -result
        p = m[col][col]
        result *= p
        for r in range(col + 1, n):
            f = m[r][col] / p
            if f:
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return result


def inverse(a: Mat) -> Mat:
    n, c = shape(a)
    if n != c:
        raise TwistlabError("inverse of a non-square matrix")
    aug = [list(row) + [ONE if i == j else ZERO for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise TwistlabError("matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)


def is_square(a: Mat) -> bool:
    r, c = shape(a)
    return r == c


def is_idempotent(a: Mat) -> bool:
    if not is_square(a):
        raise TwistlabError("idempotency test needs a square matrix")
    return matmul(a, a) == a


def is_01(a: Mat) -> bool:
    return all(x in (0, 1) for row in a for x in row)


def mat_to_json(a: Mat) -> list[list[str]]:
    return [[fmt_rat(x) for x in row] for row in a]


def mat_from_json(rows, n: int | None = None) -> Mat:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise MalformedInputError("matrix must be a list of rows")
    for row in rows:
        for x in row:
            if not isinstance(x, (str, int)) or isinstance(x, bool):
                raise MalformedInputError(f"matrix entry {x!r} is not a rational string")
    out = mat(rows)
    if n is not None and shape(out) != (n, n):
        raise MalformedInputError(f"expected a {n}x{n} matrix")
    return out


def fmt_mat(a: Mat) -> str:
    cells = [[fmt_rat(x) for x in row] for row in a]
    w = max((len(c) for row in cells for c in row), default=1)
    return "\n".join("[" + " ".join(c.rjust(w) for c in row) + "]" for row in cells)


# ----------------------------------------------------------- permutations

Perm = tuple[int, ...]


def perm_compose(p: Perm, q: Perm) -> Perm:
    """(p o q)(x) = p(q(x)), 0-based images."""
    return tuple(p[x] for x in q)


def perm_inverse(p: Perm) -> Perm:
    inv = [0] * len(p)
    for i, x in enumerate(p):
        inv[x] = i
    return tuple(inv)


def all_perms(n: int) -> list[Perm]:
    return list(itertools.permutations(range(n)))


def check_perm(p: Sequence[int], n: int, one_based: bool = True) -> Perm:
    off = 1 if one_based else 0
    q = tuple(x - off for x in p)
    if len(q) != n or sorted(q) != list(range(n)):
        raise TwistlabError(f"{tuple(p)} is not a permutation of size {n}")
    return q


# ------------------------------------------------------ Hadamard and cross

def hadamard(a: Sequence, b: Sequence) -> Vec:
    if len(a) != len(b):
        raise TwistlabError("dimension mismatch")
    return tuple(rat(x) * rat(y) for x, y in zip(a, b))


def hadamard_inverse(a: Sequence) -> Vec:
    if any(rat(x) == 0 for x in a):
        raise TwistlabError("componentwise inverse of a vector with a zero entry")
    return tuple(1 / rat(x) for x in a)


def total_product(a: Sequence) -> Fraction:
    out = ONE
    for x in a:
        out *= rat(x)
    return out


def pointwise_ops(a: Sequence, b: Sequence | None = None) -> dict:
    """Bundle of the componentwise product, inverse and total product."""
    out = {"total_product": total_product(a)}
    if b is not None:
        out["product"] = hadamard(a, b)
    if all(rat(x) != 0 for x in a):
        out["inverse"] = hadamard_inverse(a)
    return out


def cross_product(vs: Sequence[Sequence]) -> Vec:
    """The (n-1)-ary cross product of n-1 vectors in Q^n.

    The result w satisfies w . x = det(x; v_1; ...; v_{n-1}) for every x,
    obtained by cofactor expansion along the first row.
    """
    rows = [tuple(rat(x) for x in v) for v in vs]
    n = len(rows) + 1
    if any(len(r) != n for r in rows):
        raise TwistlabError("cross product needs n-1 vectors of length n")
    out = []
    for j in range(n):
        minor = tuple(tuple(r[c] for c in range(n) if c != j) for r in rows)
        cof = det(minor) if minor else ONE
        out.append(cof if j % 2 == 0 else -cof)
    return tuple(out)


def solve_affine(rows: Sequence[Sequence], rhs: Sequence, nvars: int):
    """Exact Gauss-Jordan solve of rows @ x = rhs.

    Returns (particular, null_basis) or None when inconsistent; free variables
    are set to zero in the particular solution.
    """
    aug = [[rat(x) for x in r] + [rat(b)] for r, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(nvars):
        piv = next((i for i in range(r, len(aug)) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        p = aug[r][c]
        aug[r] = [x / p for x in aug[r]]
        for i in range(len(aug)):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    if any(all(x == 0 for x in row[:-1]) and row[-1] != 0 for row in aug[r:]):
        return None
    x = [ZERO] * nvars
    for i, c in enumerate(pivots):
        x[c] = aug[i][-1]
    free = [c for c in range(nvars) if c not in set(pivots)]
    basis = []
    for fc in free:
        v = [ZERO] * nvars
        v[fc] = ONE
        for i, c in enumerate(pivots):
            v[c] = -aug[i][fc]
        basis.append(tuple(v))
    return tuple(x), basis
