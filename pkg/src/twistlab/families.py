"""Explicit parameterized twisting maps, used as fixtures and as a catalogue of non-quasi-standard examples."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .core import (
    ONE,
    ZERO,
    Fraction,
    Mat,
    TwistlabError,
    cross_product,
    det,
    hadamard,
    hadamard_inverse,
    identity,
    mat,
    mat_rank,
    msub,
    outer,
    rat,
    solve_affine,
    transpose,
    zeros,
)
from .twistmap import TwistingFamily, flip

SAMPLE_PARAMETERS = (Fraction(2), Fraction(3), Fraction(1, 2), Fraction(-1), Fraction(5, 3))
FAMILY_NAMES = ("flip", "two_by_two_a", "sumtr6_222", "sumtr3_allones", "sumtr3_mixed",
                "prop82_column", "crossproduct_xi")


@dataclass(frozen=True)
class FamilyParams:
    name: str
    a: Optional[Fraction] = None
    x: Optional[Fraction] = None
    y: Optional[Fraction] = None
    alpha: Optional[Fraction] = None
    z: Optional[Fraction] = None
    variant: int = 1
    vectors: tuple = field(default_factory=tuple)
    m: int = 2
    n: int = 2


def _not_01(value, name: str) -> Fraction:
    value = rat(value)
    if value in (0, 1):
        raise TwistlabError(f"{name} must avoid 0 and 1")
    return value


def _nonzero(value, name: str) -> Fraction:
    value = rat(value)
    if value == 0:
        raise TwistlabError(f"{name} must be nonzero")
    return value


def family_flip(m: int, n: int) -> TwistingFamily:
    return flip(m, n)


def family_2x2(a) -> TwistingFamily:
    """The one-parameter family of K^2 with K^2 having all four ranks equal to one."""
    a = rat(a)
    b = 1 - a
    return TwistingFamily.from_columns([
        [mat([[a, b], [a, b]]), mat([[b, -b], [-a, a]])],
        [mat([[a, -a], [-b, b]]), mat([[b, a], [b, a]])],
    ])


def _k2_k3_block(a: Fraction) -> list[list[Mat]]:
    """The non-standard family of K^2 with K^3 as columns [l][i]."""
    b = 1 - a
    a11 = mat([[1, 0, 0], [0, a, b], [0, a, b]])
    a21 = mat([[0, 0, 0], [0, b, -b], [0, -a, a]])
    a12 = mat([[0, 0, 0], [0, a, -a], [0, -b, b]])
    a22 = mat([[1, 0, 0], [0, b, a], [0, b, a]])
    return [[a11, a21], [a12, a22]]


def family_sumtr6_222(a, variant: int = 1) -> TwistingFamily:
    """Standard first column glued to the K^2 with K^3 family on indices {2,3}."""
    a = rat(a)
    if variant not in (1, 2):
        raise TwistlabError("variant must be 1 or 2")
    block = _k2_k3_block(a)
    a21 = mat([[1, -1, 0], [0, 0, 0], [0, 0, 0]] if variant == 1 else [[1, 0, -1], [0, 0, 0], [0, 0, 0]])
    z = zeros(3)
    return TwistingFamily.from_columns([
        [msub(identity(3), a21), a21, z],
        [z, block[0][0], block[0][1]],
        [z, block[1][0], block[1][1]],
    ])


def family_sumtr3_allones(a) -> TwistingFamily:
    a = _not_01(a, "a")
    b = 1 - a
    A = {
        (1, 1): [[a, b, 0], [a, b, 0], [a, b, 0]],
        (1, 2): [[a, -a, 0], [-b, b, 0], [-b, b, 0]],
        (1, 3): [[a, -a, 0], [-b, b, 0], [a, -a, 0]],
        (2, 1): [[b, 0, -b], [-a, 0, a], [-a, 0, a]],
        (2, 2): [[b, 0, a], [b, 0, a], [b, 0, a]],
        (2, 3): [[b, 0, -b], [b, 0, -b], [-a, 0, a]],
        (3, 1): [[0, -b, b], [0, a, -a], [0, -b, b]],
        (3, 2): [[0, a, -a], [0, a, -a], [0, -b, b]],
        (3, 3): [[0, a, b], [0, a, b], [0, a, b]],
    }
    return TwistingFamily.from_columns([[mat(A[(i, l)]) for i in (1, 2, 3)] for l in (1, 2, 3)])


def family_sumtr3_mixed(a, x, y) -> TwistingFamily:
    a = _not_01(a, "a")
    x, y = _nonzero(x, "x"), _nonzero(y, "y")
    b = 1 - a
    p, q, r, s = -a - x, x - b, -a - y, y - b
    t, u = -b * (a + x) / x, -b * (a + y) / y
    v, w = a * b / x - a, a * b / y - a
    A = {
        (1, 1): [[1, 0, 0], [1, 0, 0], [1, 0, 0]],
        (1, 2): [[1, p, q], [0, 0, 0], [0, 0, 0]],
        (1, 3): [[1, t, v], [0, 0, 0], [0, 0, 0]],
        (2, 1): [[0, 0, 0], [r, a, y], [u, a * b / y, b]],
        (2, 2): [[0, a, b], [0, a, b], [0, a, b]],
        (2, 3): [[0, a * b / x, -a * b / x], [0, a, -a], [0, -b, b]],
        (3, 1): [[0, 0, 0], [s, b, -y], [w, -a * b / y, a]],
        (3, 2): [[0, x, -x], [0, b, -b], [0, -a, a]],
        (3, 3): [[0, b, a], [0, b, a], [0, b, a]],
    }
    return TwistingFamily.from_columns([[mat(A[(i, l)]) for i in (1, 2, 3)] for l in (1, 2, 3)])


def prop82_column(alpha, z) -> list[Mat]:
    """A column [A(1,l), A(2,l), A(3,l)] whose diagonal member is the 0,1 matrix with ones in column 1."""
    alpha = _not_01(alpha, "alpha")
    z = _nonzero(z, "z")
    g = alpha * (1 - alpha) / z
    a1 = mat([[1, 0, 0], [1, 0, 0], [1, 0, 0]])
    a2 = mat([[0, 0, 0], [-alpha - z, alpha, z], [alpha - 1 - g, g, 1 - alpha]])
    a3 = mat([[0, 0, 0], [alpha + z - 1, 1 - alpha, -z], [g - alpha, -g, alpha]])
    return [a1, a2, a3]


# --------------------------------------------------------- completion

def complete_from_column(column: Sequence[Mat], l: int = 1,
                         zero_blocks: Sequence[tuple[int, int]] = ()) -> list[TwistingFamily]:
    """All twisting maps with the given column l and the listed A(i,h) forced to zero (1-based).

    Row sums, column sums and the twisting equations that pair column l with
    the unknowns are linear and are solved exactly first; the quadratic
    remainder is then solved over the few free parameters left.  Returns an
    empty list if there is no completion and raises if it is not unique up to
    finitely many points.
    """
    import sympy

    column = [mat(a) for a in column]
    m, n = len(column), len(column[0])
    l0 = l - 1
    others = [h for h in range(m) if h != l0]
    var = {}
    for h in others:
        for i in range(m):
            for k in range(n):
                for j in range(n):
                    var[(i, h, k, j)] = len(var)
    nv = len(var)
    rows, rhs = [], []

    def equation(coefs, b):
        r = [ZERO] * nv
        for key, c in coefs:
            r[var[key]] += c
        rows.append(r)
        rhs.append(b)

    zero = {(i - 1, h - 1) for i, h in zero_blocks}
    for h in others:
        for i in range(m):
            for k in range(n):
                equation([((i, h, k, j), ONE) for j in range(n)], ONE if i == h else ZERO)
                if (i, h) in zero:
                    for j in range(n):
                        equation([((i, h, k, j), ONE)], ZERO)
        for k in range(n):
            for j in range(n):
                equation([((i, h, k, j), ONE) for i in range(m)], ONE if k == j else ZERO)
    for i in range(m):
        for k in range(n):
            for j in range(n):
                for j2 in range(n):
                    target = (column[i][k][j] if j == j2 else ZERO) - column[i][k][j] * column[l0][k][j2]
                    equation([((i, h, k, j), column[h][k][j2]) for h in others], target)
    solved = solve_affine(rows, rhs, nv)
    if solved is None:
        return []
    base, null = solved
    ts = sympy.symbols(f"t0:{max(len(null), 1)}")[:len(null)]
    q = lambda x: sympy.Rational(x.numerator, x.denominator)
    entry = [q(base[c]) + sum(t * q(v[c]) for t, v in zip(ts, null)) for c in range(nv)]

    def block(i, h):
        if h == l0:
            return sympy.Matrix(n, n, lambda k, j: q(column[i][k][j]))
        return sympy.Matrix(n, n, lambda k, j: entry[var[(i, h, k, j)]])

    grid = [[block(i, h) for h in range(m)] for i in range(m)]
    eqs = set()
    for h in range(m):
        for i in range(m):
            for i2 in range(m):
                eqs.update(grid[i][h] * grid[i2][h] - (grid[i][h] if i == i2 else sympy.zeros(n)))
    for i in range(m):
        for h in range(m):
            for k in range(n):
                for j in range(n):
                    for j2 in range(n):
                        eqs.add(sum(grid[i][g][k, j] * grid[g][h][k, j2] for g in range(m))
                                - (grid[i][h][k, j] if j == j2 else 0))
    eqs = {sympy.expand(e) for e in eqs} - {0}
    if not ts:
        sols = [{}] if not eqs else []
    else:
        sols = sympy.solve(list(eqs), ts, dict=True)
    out = []
    for sol in sols:
        if len(sol) != len(ts) or any(not v.is_Rational for v in sol.values()):
            raise TwistlabError("completion is not a finite set of rational points")
        def value(i, h, k, j):
            x = grid[i][h][k, j].subs(sol)
            return Fraction(int(x.p), int(x.q))
        out.append(TwistingFamily.from_function(m, n, value))
    return sorted(out, key=lambda f: f.flat())


def complete_prop82(alpha, z) -> TwistingFamily:
    """The unique twisting map of K^3 with K^3 whose first column is prop82_column(alpha, z)
    and whose first row vanishes off the diagonal."""
    found = complete_from_column(prop82_column(alpha, z), 1, zero_blocks=((1, 2), (1, 3)))
    if len(found) != 1:
        raise TwistlabError(f"expected a unique completion, found {len(found)}")
    return found[0]


def glued_prop82(alpha, z, a) -> TwistingFamily:
    """prop82_column(alpha, z) as column 1 next to the K^2 with K^3 family at a on {2,3}."""
    block = _k2_k3_block(rat(a))
    z3 = zeros(3)
    return TwistingFamily.from_columns(
        [prop82_column(alpha, z), [z3, block[0][0], block[0][1]], [z3, block[1][0], block[1][1]]])


# ------------------------------------------------------ cross products

@dataclass(frozen=True)
class CrossProductResult:
    family: TwistingFamily
    vectors: tuple  # v_1..v_n actually used
    scaling: Fraction  # factor applied to the last vector


def _cross_vectors(vs: Sequence[Sequence]) -> tuple[tuple, Fraction]:
    vs = [tuple(rat(x) for x in v) for v in vs]
    if not vs:
        raise TwistlabError("need at least one vector v_2")
    n = len(vs[0])
    if len(vs) != n - 1 or any(len(v) != n for v in vs):
        raise TwistlabError(f"need {n - 1} vectors of length {n}")
    full = [tuple(ONE for _ in range(n))] + vs
    for idx, v in enumerate(full, start=1):
        if any(x == 0 for x in v):
            raise TwistlabError(f"v_{idx} has a zero component")
    d = det(transpose(mat(full)))
    if d == 0:
        raise TwistlabError("the vectors are linearly dependent")
    scale = 1 / d
    full[-1] = tuple(scale * x for x in full[-1])
    return tuple(full), scale


def crossproduct_xi(vs: Sequence[Sequence]) -> CrossProductResult:
    """The twisting map of K^n with K^n built from v_2..v_n (v_1 is the all-ones vector).

    v_n is rescaled so that the determinant of (v_1^T ... v_n^T) is 1.
    """
    full, scale = _cross_vectors(vs)
    n = len(full)
    blocks = [[None] * n for _ in range(n)]
    for l in range(n):
        inv_l = hadamard_inverse(full[l])
        for i in range(n):
            rest = [full[t] for t in range(n) if t != i]
            row = hadamard(full[l], cross_product(rest)) if rest else (ONE,)
            sign = 1 if i % 2 == 0 else -1
            blocks[i][l] = mat(outer(hadamard(inv_l, full[i]), [sign * x for x in row]))
    fam = TwistingFamily(n, n, tuple(tuple(blocks[i][l] for l in range(n)) for i in range(n)))
    return CrossProductResult(fam, full, scale)


def reconstruct_from_column(column: Sequence[Mat], l: int) -> TwistingFamily:
    """Rebuild a map with all ranks one from one of its columns.

    The column is a complete family of rank-one orthogonal idempotents, so it is
    fixed by the image lines u_i of its members.  The cross-product map with
    v_i = u_i / u_1 has exactly these image lines in column l.
    """
    column = [mat(a) for a in column]
    n = len(column)
    if not 1 <= l <= n:
        raise TwistlabError("column index out of range")
    if any(mat_rank(a) != 1 for a in column):
        raise TwistlabError("every matrix of the column must have rank one")
    # Any nonzero column spans the image line; the map does not see the scale of v_i.
    images = [next(c for c in zip(*a) if any(c)) for a in column]
    if any(x == 0 for u in images for x in u):
        raise TwistlabError("every image line must avoid the coordinate hyperplanes")
    vs = [[u[k] / images[0][k] for k in range(n)] for u in images[1:]]
    rebuilt = crossproduct_xi(vs).family
    if any(rebuilt.A[i][l - 1] != column[i] for i in range(n)):
        raise TwistlabError("column does not belong to a map with all ranks one")
    return rebuilt


def build_family(params: FamilyParams) -> TwistingFamily:
    """Dispatch on the family name; prop82_column yields its unique completion."""
    name = params.name

    def need(value, label):
        if value is None:
            raise TwistlabError(f"family {name} needs --{label}")
        return value

    if name == "flip":
        return family_flip(params.m, params.n)
    if name == "two_by_two_a":
        return family_2x2(need(params.a, "a"))
    if name == "sumtr6_222":
        return family_sumtr6_222(need(params.a, "a"), params.variant)
    if name == "sumtr3_allones":
        return family_sumtr3_allones(need(params.a, "a"))
    if name == "sumtr3_mixed":
        return family_sumtr3_mixed(need(params.a, "a"), need(params.x, "x"), need(params.y, "y"))
    if name == "prop82_column":
        return complete_prop82(need(params.alpha, "alpha"), need(params.z, "z"))
    if name == "crossproduct_xi":
        return crossproduct_xi(need(params.vectors or None, "vectors")).family
    raise TwistlabError(f"unknown family {name!r}; choose from {', '.join(FAMILY_NAMES)}")
