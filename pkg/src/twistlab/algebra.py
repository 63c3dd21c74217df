"""The twisted tensor product K^n (x) K^m on the monomial basis x_{jl}.

Monomials multiply by x_{ki} x_{jl} = A(i,l)_{kj} x_{kl}.  Elements are dense
coefficient tuples indexed by ``(j-1)*m + (l-1)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Sequence

from .core import (
    ONE,
    ZERO,
    Fraction,
    GuardExceeded,
    Mat,
    TwistlabError,
    index0,
    matmul,
    transpose,
    unit_matrix,
    zeros,
)
from .twistmap import TwistingFamily, _b0, is_twisting

RADICAL_GUARD = 12


# ------------------------------------------------------------ algebra

@dataclass(frozen=True)
class TwistedAlgebra:
    m: int
    n: int
    family: TwistingFamily

    @property
    def dim(self) -> int:
        return self.n * self.m

    def index(self, j0: int, l0: int) -> int:
        return j0 * self.m + l0

    def label(self, idx: int) -> tuple[int, int]:
        """1-based (j, l) of a basis index."""
        return idx // self.m + 1, idx % self.m + 1

    def coefficient(self, k: int, i: int, j: int, l: int) -> Fraction:
        """c with x_{ki} x_{jl} = c x_{kl}; 1-based."""
        return self.family.A[index0(i, self.m)][index0(l, self.m)][index0(k, self.n)][index0(j, self.n)]

    def basis_product(self, a: int, b: int) -> tuple[Fraction, int]:
        """(c, idx) with x_a x_b = c x_idx."""
        k, i = divmod(a, self.m)
        j, l = divmod(b, self.m)
        return self.family.A[i][l][k][j], k * self.m + l

    def basis(self, idx: int) -> tuple:
        return tuple(ONE if p == idx else ZERO for p in range(self.dim))

    def unit(self) -> tuple:
        return (ONE,) * self.dim

    def mul(self, u: Sequence, v: Sequence) -> tuple:
        out = [ZERO] * self.dim
        for a, x in enumerate(u):
            if x == 0:
                continue
            for b, y in enumerate(v):
                if y == 0:
                    continue
                c, idx = self.basis_product(a, b)
                if c:
                    out[idx] += c * x * y
        return tuple(out)


def build_algebra(f: TwistingFamily) -> TwistedAlgebra:
    return TwistedAlgebra(f.m, f.n, f)


def check_unital_associative(alg: TwistedAlgebra) -> bool:
    d = alg.dim
    prod = [[alg.basis_product(a, b) for b in range(d)] for a in range(d)]
    for a in range(d):
        for b in range(d):
            c1, ab = prod[a][b]
            for e in range(d):
                c2, left = prod[ab][e]
                c3, be = prod[b][e]
                c4, right = prod[a][be]
                lhs, rhs = c1 * c2, c3 * c4
                if lhs != rhs or (lhs != 0 and left != right):
                    return False
    one = alg.unit()
    return all(alg.mul(one, alg.basis(a)) == alg.basis(a) == alg.mul(alg.basis(a), one) for a in range(d))


# --------------------------------------------------------------- spans

class Span:
    """Row-reduced basis of a subspace of Q^d."""

    def __init__(self, d: int):
        self.d = d
        self.rows: dict[int, list] = {}

    def reduce(self, v) -> list:
        v = list(v)
        for p, row in self.rows.items():
            if v[p] != 0:
                c = v[p]
                v = [x - c * y for x, y in zip(v, row)]
        return v

    def add(self, v) -> bool:
        v = self.reduce(v)
        p = next((i for i, x in enumerate(v) if x != 0), None)
        if p is None:
            return False
        v = [x / v[p] for x in v]
        for q, row in self.rows.items():
            if row[p] != 0:
                c = row[p]
                self.rows[q] = [x - c * y for x, y in zip(row, v)]
        self.rows[p] = v
        return True

    def contains(self, v) -> bool:
        return all(x == 0 for x in self.reduce(v))

    def vectors(self) -> list[tuple]:
        return [tuple(self.rows[p]) for p in sorted(self.rows)]

    def __len__(self):
        return len(self.rows)


def generated_ideal(alg: TwistedAlgebra, x: Sequence) -> Span:
    """Two-sided ideal generated by x."""
    span = Span(alg.dim)
    todo = [tuple(x)]
    while todo:
        v = todo.pop()
        if not span.add(v):
            continue
        for b in range(alg.dim):
            e = alg.basis(b)
            todo.append(alg.mul(e, v))
            todo.append(alg.mul(v, e))
    return span


def monomial_support(span: Span) -> set[int]:
    return {i for v in span.vectors() for i, x in enumerate(v) if x != 0}


def sandwich(alg: TwistedAlgebra, x: Sequence, j: int, i: int) -> tuple:
    """(f_j (x) 1) x (1 (x) e_i) for 1-based j, i."""
    left = tuple(ONE if b // alg.m == j - 1 else ZERO for b in range(alg.dim))
    right = tuple(ONE if b % alg.m == i - 1 else ZERO for b in range(alg.dim))
    return alg.mul(alg.mul(left, x), right)


# ------------------------------------------------------ representations

@dataclass(frozen=True)
class Representation:
    side: str       # "A" (into M_n) or "B" (into M_m)
    index: int      # 1-based u or v
    size: int
    images: tuple   # images[idx] = matrix of basis element idx
    algebra: TwistedAlgebra

    def image(self, j: int, l: int) -> Mat:
        return self.images[self.algebra.index(j - 1, l - 1)]

    def is_multiplicative(self) -> bool:
        alg = self.algebra
        for a in range(alg.dim):
            for b in range(alg.dim):
                c, idx = alg.basis_product(a, b)
                lhs = matmul(self.images[a], self.images[b])
                rhs = tuple(tuple(c * x for x in row) for row in self.images[idx])
                if lhs != rhs:
                    return False
        return True

    def is_unital(self) -> bool:
        total = zeros(self.size)
        for img in self.images:
            total = tuple(tuple(x + y for x, y in zip(r, s)) for r, s in zip(total, img))
        return total == tuple(tuple(ONE if i == j else ZERO for j in range(self.size)) for i in range(self.size))


def representation(f: TwistingFamily, index: int, side: str = "A") -> Representation:
    """x_{jl} maps to E^{jj} A(l,u) on the A-side and to B(j,v)^T E^{ll} on the B-side.

    The transpose makes the B-side image multiplicative for the product
    x_{ki} x_{jl} = A(i,l)_{kj} x_{kl}.
    """
    if not is_twisting(f):
        raise TwistlabError("representations need a verified twisting map")
    alg = build_algebra(f)
    side = side.upper()
    images = []
    if side == "A":
        u = index0(index, f.m, "u")
        for j in range(f.n):
            for l in range(f.m):
                images.append(matmul(unit_matrix(f.n, j, j), f.A[l][u]))
        size = f.n
    elif side == "B":
        v = index0(index, f.n, "v")
        for j in range(f.n):
            for l in range(f.m):
                images.append(matmul(transpose(_b0(f, j, v)), unit_matrix(f.m, l, l)))
        size = f.m
    else:
        raise TwistlabError(f"side must be 'A' or 'B', got {side!r}")
    return Representation(side, index, size, tuple(images), alg)


def rep_image_dim(r: Representation) -> int:
    """Dimension of the subalgebra generated by the basis images (span closure under products)."""
    flat = lambda a: tuple(x for row in a for x in row)
    unflat = lambda v: tuple(tuple(v[i * r.size:(i + 1) * r.size]) for i in range(r.size))
    span = Span(r.size * r.size)
    for img in r.images:
        span.add(flat(img))
    while True:
        grew = False
        vecs = [unflat(v) for v in span.vectors()]
        for a in vecs:
            for b in vecs:
                if span.add(flat(matmul(a, b))):
                    grew = True
        if not grew:
            return len(span)


def rep_support_dim(r: Representation) -> int:
    """Incidence-algebra count: matrix units E^{kj} forced into the image by nonzero entries."""
    f = r.algebra.family
    if r.side == "A":
        u = r.index - 1
        pairs = {(k, j) for i in range(f.m) for k in range(f.n) for j in range(f.n) if f.A[i][u][k][j] != 0}
        pairs |= {(k, k) for k in range(f.n)}
    else:
        v = r.index - 1
        pairs = {(i, l) for i in range(f.m) for l in range(f.m) for j in range(f.n) if f.A[i][l][v][j] != 0}
        pairs |= {(i, i) for i in range(f.m)}
    return len(pairs)


# -------------------------------------------------------------- radical

class RadicalReport(NamedTuple):
    radical_basis: tuple        # sorted 1-based (j, l)
    dim: int
    nilpotency_index: int
    square_zero: bool
    quotient_dim: int
    quotient_is_product_of_fields: bool

    def to_json(self) -> dict:
        return {
            "radical_basis": [list(x) for x in self.radical_basis],
            "dim": self.dim,
            "square_zero": self.square_zero,
            "nilpotency_index": self.nilpotency_index,
            "quotient_dim": self.quotient_dim,
        }


def _products(alg: TwistedAlgebra, left: frozenset, right: frozenset) -> frozenset:
    out = set()
    for a in left:
        for b in right:
            c, idx = alg.basis_product(a, b)
            if c:
                out.add(idx)
    return frozenset(out)


def _is_ideal(alg: TwistedAlgebra, s: frozenset, everything: frozenset) -> bool:
    return _products(alg, s, everything) <= s and _products(alg, everything, s) <= s


def nilpotency_index(alg: TwistedAlgebra, s: Iterable[int]) -> Optional[int]:
    """Least k with span(s)^k = 0 (1 for the zero space), or None if not nilpotent."""
    s = frozenset(s)
    power, k = s, 1
    while power:
        if k > alg.dim:
            return None
        power, k = _products(alg, power, s), k + 1
    return k


def radical_by_search(alg: TwistedAlgebra) -> frozenset:
    """Union of all nilpotent monomial two-sided ideals, by exhaustive subset scan."""
    d = alg.dim
    if d > RADICAL_GUARD:
        raise GuardExceeded(f"monomial subset search needs n*m <= {RADICAL_GUARD}")
    everything = frozenset(range(d))
    union: set = set()
    for mask in range(1, 1 << d):
        s = frozenset(i for i in range(d) if mask >> i & 1)
        if s <= union:
            continue
        if _is_ideal(alg, s, everything) and nilpotency_index(alg, s) is not None:
            union |= s
    return frozenset(union)


def radical_closed_form(f: TwistingFamily) -> frozenset:
    """For quasi-standard maps: the monomials x_{jl} with j outside J_l(l)."""
    return frozenset(j * f.m + l for j in range(f.n) for l in range(f.m) if f.A[l][l][j][j] != 1)


def _quotient_is_product_of_fields(alg: TwistedAlgebra, rad: frozenset) -> bool:
    rest = [a for a in range(alg.dim) if a not in rad]
    for a in rest:
        for b in rest:
            c, idx = alg.basis_product(a, b)
            coeff = c if idx not in rad else ZERO
            want = ONE if a == b else ZERO
            if coeff != want or (want and idx != a):
                return False
    return True


def jacobson_radical(alg: TwistedAlgebra, f: Optional[TwistingFamily] = None, method: str = "auto") -> RadicalReport:
    """Radical of the algebra.

    ``method`` is ``"search"`` (exhaustive, guarded), ``"closed"`` (quasi-standard
    input only) or ``"auto"`` (search when small, closed form otherwise).
    """
    f = f if f is not None else alg.family
    if method == "auto":
        method = "search" if alg.dim <= RADICAL_GUARD else "closed"
    if method == "search":
        rad = radical_by_search(alg)
    elif method == "closed":
        from .quasistd import is_quasi_standard
        if not is_quasi_standard(f):
            raise TwistlabError("the closed form needs a quasi-standard map")
        rad = radical_closed_form(f)
    else:
        raise TwistlabError(f"unknown radical method {method!r}")
    nil = nilpotency_index(alg, rad)
    if nil is None:
        raise TwistlabError("radical candidate is not nilpotent")
    square_zero = not _products(alg, rad, rad)
    basis = tuple(sorted(alg.label(i) for i in rad))
    return RadicalReport(basis, len(rad), nil, square_zero, alg.dim - len(rad),
                         _quotient_is_product_of_fields(alg, rad))


# ---------------------------------------------------- quiver presentation

def quiver_algebra_iso_check(f: TwistingFamily) -> bool:
    """Compare the algebra with the radical-square-zero path algebra of its quiver.

    Vertices v map to x_v plus the arrows ending at v, arrows map to their own
    monomial.  Paths compose left to right, so e_{s(a)} a e_{t(a)} = a.
    """
    from .standard import is_standard, quiver_of
    if not is_standard(f):
        raise TwistlabError("quiver presentation needs a standard map")
    q = quiver_of(f)
    alg = build_algebra(f)
    m = f.m
    idx = lambda cell: (cell[0] - 1) * m + (cell[1] - 1)

    # path algebra basis: vertices then arrows
    verts = sorted(q.vertices)
    edges = q.edges()
    labels = [("v", v) for v in verts] + [("a", e) for e in edges]

    def path_product(p, r):
        kp, xp = p
        kr, xr = r
        if kp == "v" and kr == "v":
            return p if xp == xr else None
        if kp == "v":
            return r if xr[1] == xp else None
        if kr == "v":
            return p if xp[2] == xr else None
        return None

    def phi(p):
        kind, x = p
        v = [ZERO] * alg.dim
        if kind == "a":
            v[idx(x[0])] = ONE
            return tuple(v)
        v[idx(x)] = ONE
        for cell, _, tgt in edges:
            if tgt == x:
                v[idx(cell)] += ONE
        return tuple(v)

    images = [phi(p) for p in labels]
    span = Span(alg.dim)
    if len(labels) != alg.dim or not all(span.add(v) for v in images):
        return False
    zero = (ZERO,) * alg.dim
    for a, p in enumerate(labels):
        for b, r in enumerate(labels):
            pr = path_product(p, r)
            want = zero if pr is None else images[labels.index(pr)]
            if alg.mul(images[a], images[b]) != want:
                return False
    return True
