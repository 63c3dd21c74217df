"""Quasi-standard columns, the extension test, and one-parameter deformations at quiver triangles."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Sequence

from .core import (
    ONE,
    ZERO,
    Fraction,
    Mat,
    TwistlabError,
    index0,
    is_01,
    is_idempotent,
    is_zero,
    mat,
    rat,
    submatrix,
    zeros,
)
from .standard import (
    _c_map0,
    _column_pretwisting0,
    _equiv_standard,
    _f0_set0,
    _j_sets0,
    build_standard,
    quiver_of,
)
from .twistmap import TwistingFamily, _b0, canonical_key, is_twisting, reduced_rank, restrict


# ------------------------------------------------------------ D blocks

class DBlockIndex(NamedTuple):
    i: int
    l0: int
    u: int
    v: int


def _partition0(f: TwistingFamily, l0: int) -> Optional[list[list[int]]]:
    """Sorted J_u(l0) for every u, or None if the diagonal entries do not partition the rows."""
    col = f.column(l0)
    for k in range(f.n):
        diag = [col[i][k][k] for i in range(f.m)]
        if any(x not in (0, 1) for x in diag) or sum(diag) != 1:
            return None
    return [sorted(s) for s in _j_sets0(f, l0)]


def _block0(f: TwistingFamily, parts, i: int, l0: int, u: int, v: int) -> Mat:
    return submatrix(f.A[i][l0], parts[u], parts[v])


def d_block(f: TwistingFamily, idx: DBlockIndex) -> Mat:
    """A(i,l0) restricted to rows J_u(l0) and columns J_v(l0)."""
    i, l0, u, v = (index0(x, f.m, name) for x, name in zip(idx, ("i", "l0", "u", "v")))
    parts = _partition0(f, l0)
    if parts is None:
        raise TwistlabError(f"diagonal entries of column {l0 + 1} do not partition the rows")
    return _block0(f, parts, i, l0, u, v)


# ---------------------------------------------------- column predicates

def _quasi_column0(f: TwistingFamily, l0: int) -> bool:
    if not is_01(f.A[l0][l0]) or not _column_pretwisting0(f, l0):
        return False
    parts = _partition0(f, l0)
    if parts is None:
        return False
    c = _c_map0(f.A[l0][l0])
    m = f.m
    for i in range(m):
        if i == l0:
            continue
        for u in range(m):
            for v in range(m):
                if u not in (i, l0) and v not in (i, l0) and not is_zero(_block0(f, parts, i, l0, u, v)):
                    return False
    for u in range(m):
        for v in range(m):
            if l0 in (u, v):
                continue
            a = f.A[v][l0]
            for k in parts[u]:
                hits = [d for d in parts[v] if a[k][d] != 0]
                if len(hits) > 1:
                    return False
                if hits and c.get(hits[0]) != c.get(k):
                    return False
    return True


def is_quasi_standard(f: TwistingFamily, column: Optional[int] = None) -> bool:
    if column is not None:
        return _quasi_column0(f, index0(column, f.m, "column"))
    return all(_quasi_column0(f, l0) for l0 in range(f.m))


def reduced_rank_shortcut(f: TwistingFamily, column: int) -> bool:
    """A verified column with 0,1 diagonal structure and reduced rank at most 2 is quasi-standard."""
    l0 = index0(column, f.m, "column")
    if not is_twisting(f) or not is_01(f.A[l0][l0]) or _partition0(f, l0) is None:
        return False
    return reduced_rank(f, column) <= 2


def x_set(f: TwistingFamily, l: int, k: int) -> tuple[frozenset, frozenset]:
    """For k outside J_l(l): the indices v with row k of D^{uv}_{(u)} nonzero, and their d's (1-based)."""
    l0, k0 = index0(l, f.m, "l"), index0(k, f.n, "k")
    parts = _partition0(f, l0)
    if parts is None:
        raise TwistlabError("diagonal entries do not partition the rows")
    u = next(i for i in range(f.m) if k0 in parts[i])
    if u == l0:
        raise TwistlabError(f"row {k} lies in J_l(l)")
    vs, ds = set(), set()
    for v in range(f.m):
        if v in (u, l0):
            continue
        hits = [d for d in parts[v] if f.A[u][l0][k0][d] != 0]
        if hits:
            vs.add(v + 1)
            ds.update(d + 1 for d in hits)
    return frozenset(vs), frozenset(ds)


def row_support_lemma_holds(f: TwistingFamily, l: int) -> bool:
    """Every row k outside J_l(l) of every A(v,l) is supported on {k, c_k} and the d's of its X set."""
    l0 = index0(l, f.m, "l")
    parts = _partition0(f, l0)
    c = _c_map0(f.A[l0][l0])
    for k in range(f.n):
        if k in parts[l0]:
            continue
        _, ds = x_set(f, l, k + 1)
        allowed = {k, c[k]} | {d - 1 for d in ds}
        for v in range(f.m):
            if any(x != 0 and j not in allowed for j, x in enumerate(f.A[v][l0][k])):
                return False
    return True


# ------------------------------------------------- column condition (4)

def column_condition4_direct(f: TwistingFamily, l: int) -> bool:
    """sum_h A(i,h)_{kj} A(h,l)_{kj'} = delta_{jj'} A(i,l)_{kj} for all i, j, j', k."""
    l0 = index0(l, f.m, "l")
    A, m, n = f.A, f.m, f.n
    for i in range(m):
        for k in range(n):
            for j in range(n):
                for j2 in range(n):
                    s = sum(A[i][h][k][j] * A[h][l0][k][j2] for h in range(m))
                    if s != (A[i][l0][k][j] if j == j2 else ZERO):
                        return False
    return True


def _triangle_conditions0(f: TwistingFamily, l0: int) -> bool:
    """Conditions (a)-(c) wherever D^{uv}_{(u,l0)} has a nonzero entry with u != v != l0."""
    parts = _partition0(f, l0)
    A, m, n = f.A, f.m, f.n
    for u in range(m):
        for v in range(m):
            if u == v or v == l0:
                continue
            for k in parts[u]:
                for d in parts[v]:
                    if A[u][l0][k][d] == 0:
                        continue
                    for j in range(n):
                        if A[u][v][k][j] != (1 if k == j else 0) - (1 if j == d else 0):
                            return False
                        if A[v][v][k][j] != (1 if j == d else 0):
                            return False
                        if any(A[i][v][k][j] != 0 for i in range(m) if i not in (u, v)):
                            return False
    return True


def check_column_condition4(f: TwistingFamily, l0: int) -> bool:
    """Block-level form of condition (4) on a quasi-standard column (1-based l0)."""
    c0 = index0(l0, f.m, "l0")
    if not _quasi_column0(f, c0):
        raise TwistlabError(f"column {l0} is not quasi-standard")
    f0 = [_f0_set0(f, i) for i in range(f.m)]
    if any(not J <= f0[i] for i, J in enumerate(_j_sets0(f, c0))):
        return False
    return _triangle_conditions0(f, c0)


def check_extension(f: TwistingFamily, r: int) -> bool:
    """Twisting test for a pre-twisting extending a twisting map on the first r indices
    by quasi-standard columns r+1..m."""
    m = f.m
    if not 0 <= r <= m:
        raise TwistlabError(f"r must lie in 0..{m}")
    for l0 in range(m):
        if not _column_pretwisting0(f, l0):
            raise TwistlabError(f"column {l0 + 1} violates the pre-twisting conditions")
    if r:
        for i in range(r, m):
            for l0 in range(r):
                if not is_zero(f.A[i][l0]):
                    raise TwistlabError(f"A({i + 1},{l0 + 1}) must vanish for an extension")
        block = restrict(f, range(1, r + 1))
        if block is None or not is_twisting(block):
            raise TwistlabError(f"the leading {r}x{r} block is not a twisting map")
    for l0 in range(r, m):
        if not _quasi_column0(f, l0):
            raise TwistlabError(f"column {l0 + 1} is not quasi-standard")
    f0 = [_f0_set0(f, i) for i in range(m)]
    for l0 in range(r, m):
        if any(not J <= f0[i] for i, J in enumerate(_j_sets0(f, l0))):
            return False
    return all(_triangle_conditions0(f, l0) for l0 in range(r, m))


# ------------------------------------------------- column construction

def _validate_diag(a_l0: Mat) -> dict:
    if not _equiv_standard(a_l0):
        raise TwistlabError("A(l0,l0) must be equivalent to a standard idempotent 0,1-matrix")
    return _c_map0(a_l0)


def choice_candidates(a_l0: Mat, jsets: Sequence[Iterable[int]], l0: int,
                      choices: dict, pair: tuple[int, int], k: int,
                      order: Optional[Sequence[tuple[int, int]]] = None) -> list[int]:
    """Admissible d's for row k of D^{ij}_{(i)} given choices for earlier pairs (all 1-based).

    An empty list means the row is forced to vanish.
    """
    a_l0 = mat(a_l0)
    c = _validate_diag(a_l0)
    parts = [set(s) for s in jsets]
    order = list(order) if order is not None else _pair_order(parts, l0)
    pos = {p: t for t, p in enumerate(order)}
    i, j = pair
    earlier = [p for p in order if pos[p] < pos[pair]]
    for (r, ii) in earlier:
        if ii == i and any(d == k for (_, d, _) in _rows(choices.get((r, ii), {}))):
            return []
    out = []
    for d in sorted(parts[j - 1]):
        if c.get(d - 1) != c.get(k - 1):
            continue
        if any(jj == j and d in choices.get((jj, rr), {}) for (jj, rr) in earlier):
            continue
        out.append(d)
    return out


def _rows(block: dict):
    for k, (d, lam) in block.items():
        yield k, d, lam


def _pair_order(parts, l0: int) -> list[tuple[int, int]]:
    active = [i + 1 for i, s in enumerate(parts) if s and i + 1 != l0]
    return [(i, j) for i in active for j in active if i != j]


def build_quasi_column(a_l0: Mat, jsets: Sequence[Iterable[int]], l0: int, choices: dict) -> list[Mat]:
    """Assemble a quasi-standard column from A(l0,l0), the J-set partition and the D choices.

    ``choices[(i, j)]`` maps a row k in J_i to ``(d, lam)``, meaning
    (D^{ij}_{(i)})_{kd} = lam.  Everything is 1-based; the result lists A(i,l0).
    """
    a_l0 = mat(a_l0)
    n = len(a_l0)
    m = len(jsets)
    l0i = index0(l0, m, "l0")
    c = _validate_diag(a_l0)
    parts = [set(s) for s in jsets]
    if sorted(x for s in parts for x in s) != list(range(1, n + 1)):
        raise TwistlabError("J-sets must partition 1..n")
    if parts[l0i] != {k + 1 for k in range(n) if a_l0[k][k] == 1}:
        raise TwistlabError("J_{l0} must be the diagonal ones of A(l0,l0)")
    active = [i for i in range(1, m + 1) if parts[i - 1] and i != l0]

    D = {}
    for (i, j), rows in choices.items():
        if i == j or i not in active or j not in active:
            raise TwistlabError(f"choice for pair ({i},{j}) outside the active indices")
        for k, (d, lam) in rows.items():
            if k not in parts[i - 1] or d not in parts[j - 1]:
                raise TwistlabError(f"entry ({k},{d}) does not lie in J_{i} x J_{j}")
            if c[k - 1] != c[d - 1]:
                raise TwistlabError(f"c_{d} != c_{k} for the entry at ({k},{d}) of pair ({i},{j})")
            lam = rat(lam)
            if lam != 0:
                D[(i, j, k)] = (d, lam)
    # (a): D^{ri}_{(r)} D^{ij}_{(i)} = 0; each row holds one entry, so the product
    # has a nonzero (t, e) entry iff row t of the first hits a row k that is itself nonzero.
    for (r, i, t), (k, lam1) in D.items():
        for (i2, j, k2), (e, lam2) in D.items():
            if i2 == i and k2 == k and j != i:
                raise TwistlabError(f"D^({r}{i}) D^({i}{j}) != 0 at rows {t}, {k}")

    J0c = [k for k in range(1, n + 1) if k not in parts[l0i]]
    col = [zeros(n) for _ in range(m)]
    col[l0i] = a_l0
    for i in active:
        W = {}
        for k in J0c:
            u = next(x for x in range(1, m + 1) if k in parts[x - 1])
            if u == i:
                W[(k, k)] = ONE
            for v in active:
                if v == u:
                    continue
                if u == i and (i, v, k) in D:
                    d, lam = D[(i, v, k)]
                    W[(k, d)] = W.get((k, d), ZERO) + lam
                if v == i and (u, i, k) in D:
                    d, lam = D[(u, i, k)]
                    W[(k, d)] = W.get((k, d), ZERO) - lam
        rows = [[ZERO] * n for _ in range(n)]
        for (k, j), x in W.items():
            rows[k - 1][j - 1] += x
        for k in J0c:
            for j in parts[l0i]:
                rows[k - 1][j - 1] = -sum((W.get((k, h), ZERO) * a_l0[h - 1][j - 1] for h in J0c), ZERO)
        col[i - 1] = mat(rows)
    return col


def random_quasi_column(rng: random.Random, a_l0: Mat, jsets, l0: int,
                        lambdas: Sequence = (1, 2, -1, Fraction(1, 2), Fraction(5, 3)),
                        order=None) -> tuple[list[Mat], dict]:
    """Walk the pair-by-pair choice algorithm with random d and lambda."""
    parts = [set(s) for s in jsets]
    order = list(order) if order is not None else _pair_order(parts, l0)
    choices: dict = {}
    for pair in order:
        block = {}
        for k in sorted(parts[pair[0] - 1]):
            cands = choice_candidates(a_l0, jsets, l0, choices, pair, k, order)
            if cands and rng.random() < 0.7:
                block[k] = (rng.choice(cands), rng.choice(list(lambdas)))
        choices[pair] = block
    return build_quasi_column(a_l0, jsets, l0, choices), choices


# ------------------------------------------------------- standardization

def standardize(f: TwistingFamily) -> TwistingFamily:
    """The standard map with the same diagonal matrices A(i,i) and B(k,k)."""
    if not is_quasi_standard(f):
        raise TwistlabError("standardize needs a quasi-standard family")
    return build_standard([f.A[i][i] for i in range(f.m)], [_b0(f, k, k) for k in range(f.n)])


# ---------------------------------------------------------- deformations

@dataclass(frozen=True)
class DeformationSpec:
    """Site ((k,u),(d,v),(c,l)) with 1-based indices and the parameter lambda."""

    k: int
    u: int
    d: int
    v: int
    c: int
    l: int
    lam: Fraction = ZERO

    @property
    def site(self) -> tuple:
        return ((self.k, self.u), (self.d, self.v), (self.c, self.l))

    def with_lambda(self, lam) -> "DeformationSpec":
        return DeformationSpec(self.k, self.u, self.d, self.v, self.c, self.l, rat(lam))

    def label(self) -> str:
        return f"({self.k},{self.u}),({self.d},{self.v}),({self.c},{self.l})"


class DeformationError(TwistlabError):
    """A deformation was requested at an invalid site or is obstructed at this lambda."""

    def __init__(self, message: str, failing: Optional[str] = None):
        super().__init__(message)
        self.failing = failing


def deformation_sites(f: TwistingFamily) -> list[DeformationSpec]:
    if not is_quasi_standard(f):
        raise TwistlabError("deformation sites need a quasi-standard family")
    q = quiver_of(f)
    arrows = q.arrow_map()
    m, n = f.m, f.n
    out = []
    for u in range(1, m + 1):
        for v in range(1, m + 1):
            for l in range(1, m + 1):
                if len({u, v, l}) < 3:
                    continue
                for k in range(1, n + 1):
                    if (k, u) not in q.vertices or (k, v) not in arrows or (k, l) not in arrows:
                        continue
                    i_kv, d = arrows[(k, v)]
                    i_kl, ck = arrows[(k, l)]
                    if i_kv != u or i_kl != u:
                        continue
                    if (d, l) not in arrows:
                        continue
                    i_dl, cd = arrows[(d, l)]
                    if i_dl != v or cd != ck:
                        continue
                    if _d_support_nonempty(f, u, v, l):
                        continue
                    out.append(DeformationSpec(k, u, d, v, ck, l))
    return out


def _d_support_nonempty(f: TwistingFamily, u: int, v: int, l: int) -> bool:
    l0 = l - 1
    parts = _partition0(f, l0)
    return not is_zero(_block0(f, parts, u - 1, l0, u - 1, v - 1))


def _apply_site(f: TwistingFamily, spec: DeformationSpec) -> TwistingFamily:
    k, u, d, v, c, l = (x - 1 for x in (spec.k, spec.u, spec.d, spec.v, spec.c, spec.l))
    lam = spec.lam
    grid = [[[list(r) for r in a] for a in row] for row in f.A]
    grid[u][l][k][d] = lam
    grid[v][l][k][d] = -lam
    grid[v][l][k][c] = lam
    grid[u][l][k][c] = f.A[u][l][k][c] - lam
    return TwistingFamily(f.m, f.n, tuple(tuple(tuple(tuple(r) for r in a) for a in row) for row in grid))


def admissibility(f1: TwistingFamily, spec: DeformationSpec) -> Optional[str]:
    """Name of the first non-idempotent matrix among A(u,l), A(v,l), B(d,k), B(c,k), or None."""
    k, u, d, v, c, l = (x - 1 for x in (spec.k, spec.u, spec.d, spec.v, spec.c, spec.l))
    checks = [
        (f"A({spec.u},{spec.l})", f1.A[u][l]),
        (f"A({spec.v},{spec.l})", f1.A[v][l]),
        (f"B({spec.d},{spec.k})", _b0(f1, d, k)),
        (f"B({spec.c},{spec.k})", _b0(f1, c, k)),
    ]
    for name, a in checks:
        if not is_idempotent(a):
            return name
    return None


def deform(f: TwistingFamily, spec: DeformationSpec) -> TwistingFamily:
    """Apply the four-entry update at a valid site; raise if the result is not twisting."""
    valid = {s.site for s in deformation_sites(f)}
    if spec.site not in valid:
        raise DeformationError(f"{spec.label()} is not a deformation site of this family")
    if spec.lam == 0:
        return f
    f1 = _apply_site(f, spec)
    failing = admissibility(f1, spec)
    if failing is not None:
        raise DeformationError(f"deformation obstructed: {failing} is not idempotent", failing)
    if not is_twisting(f1):
        raise DeformationError("deformation obstructed: result is not a twisting map", "verify")
    return f1


def mu1_table(f: TwistingFamily, f1: TwistingFamily, lam) -> dict:
    """Nonzero entries of (mu(f1) - mu(f)) / lambda on basis pairs.

    Keys are ((k,i),(j,l)) for x_{ki} (x) x_{jl}; the value multiplies x_{kl}.
    """
    lam = rat(lam)
    if lam == 0:
        raise TwistlabError("lambda must be nonzero")
    if (f.m, f.n) != (f1.m, f1.n):
        raise TwistlabError("families of different dimensions")
    out = {}
    for i in range(f.m):
        for l in range(f.m):
            for k in range(f.n):
                for j in range(f.n):
                    diff = f1.A[i][l][k][j] - f.A[i][l][k][j]
                    if diff:
                        out[((k + 1, i + 1), (j + 1, l + 1))] = diff / lam
    if len(out) != 4 or any(abs(x) != 1 for x in out.values()):
        raise TwistlabError("the families are not related by a single deformation at this lambda")
    return out


def expected_mu1(spec: DeformationSpec) -> dict:
    k, u, d, v, c, l = spec.k, spec.u, spec.d, spec.v, spec.c, spec.l
    return {
        ((k, u), (d, l)): ONE,
        ((k, v), (c, l)): ONE,
        ((k, v), (d, l)): -ONE,
        ((k, u), (c, l)): -ONE,
    }


# ------------------------------------------------------ chain exploration

@dataclass(frozen=True)
class ChainNode:
    family: TwistingFamily
    path: tuple  # sites applied so far, each a DeformationSpec


def explore_chains(f: TwistingFamily, lambdas: Optional[Sequence] = None, max_depth: int = 10,
                   dedupe: str = "none") -> list[list[ChainNode]]:
    """Depth-first exploration of iterated deformations.

    ``lambdas[t]`` is the parameter used at depth t+1 (default 1 everywhere).
    ``dedupe`` is ``"none"`` (every path), ``"family"`` (equal tensors merged) or
    ``"iso"`` (isomorphic maps merged).  Returns the nodes found at each depth.
    """
    if dedupe not in ("none", "family", "iso"):
        raise TwistlabError(f"unknown dedupe mode {dedupe!r}")
    levels: list[list[ChainNode]] = []
    frontier = [ChainNode(f, ())]
    seen = {_dedupe_key(f, dedupe)}
    for depth in range(max_depth):
        lam = rat(lambdas[depth]) if lambdas is not None and depth < len(lambdas) else ONE
        nxt = []
        for node in frontier:
            for spec in deformation_sites(node.family):
                spec = spec.with_lambda(lam)
                try:
                    g = deform(node.family, spec)
                except DeformationError:
                    continue
                key = _dedupe_key(g, dedupe)
                if dedupe != "none":
                    if key in seen:
                        continue
                    seen.add(key)
                nxt.append(ChainNode(g, node.path + (spec,)))
        if not nxt:
            break
        levels.append(nxt)
        frontier = nxt
    return levels


def _dedupe_key(f: TwistingFamily, mode: str):
    if mode == "iso":
        return canonical_key(f)
    return f.flat()
