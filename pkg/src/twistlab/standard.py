"""Standard twisting maps: 0,1 idempotents, the quiver bijection, enumeration and classification."""

from __future__ import annotations

import itertools
import os
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Sequence

from .core import (
    ONE,
    ZERO,
    Fraction,
    GuardExceeded,
    Mat,
    TwistlabError,
    identity,
    index0,
    is_01,
    is_idempotent,
    is_zero,
    mat,
    zeros,
)
from .twistmap import (
    TwistingFamily,
    _canonical,
    canonical_form,
    is_twisting,
    rank_matrices,
    sum_trace,
)

ENUMERATION_GUARD = 12


# ------------------------------------------------ 0,1 idempotent matrices

class Std01(NamedTuple):
    is_standard_01: bool
    equiv_to_standard_01: bool
    c: dict  # 1-based row k -> 1-based c_k, for rows with a zero diagonal entry


def _one_per_row(a: Mat) -> bool:
    return is_01(a) and all(sum(1 for x in row if x) == 1 for row in a)


def _equiv_standard(a: Mat) -> bool:
    n = len(a)
    if not _one_per_row(a):
        return False
    return all(a[j][j] == 1 or all(a[k][j] == 0 for k in range(n)) for j in range(n))


def _c_map0(a: Mat) -> dict:
    """0-based c_k for each row k with a zero diagonal entry (a is 0,1 with unit row sums)."""
    out = {}
    for k, row in enumerate(a):
        if row[k] == 0:
            hits = [j for j, x in enumerate(row) if x != 0]
            if len(hits) != 1:
                raise TwistlabError(f"row {k + 1} does not have exactly one nonzero entry")
            out[k] = hits[0]
    return out


def std01_predicates(a: Mat) -> Std01:
    a = mat(a)
    n = len(a)
    equiv = _equiv_standard(a)
    r = sum(1 for k in range(n) if a[k][k] == 1) if is_01(a) else 0
    literal = (
        equiv and r >= 1
        and all(a[k][k] == 1 for k in range(r))
        and all(a[k][j] == 0 for k in range(n) for j in range(r, n))
    )
    c = {}
    if is_01(a) and all(sum(row) == 1 for row in a):
        c = {k + 1: v + 1 for k, v in _c_map0(a).items()}
    return Std01(literal, equiv, c)


def c_index(a: Mat, k: int) -> int:
    """c_k(a) for a 1-based row k with a zero diagonal entry."""
    k0 = index0(k, len(a), "k")
    if a[k0][k0] != 0:
        raise TwistlabError(f"c_{k} is undefined: diagonal entry is nonzero")
    return _c_map0(a)[k0] + 1


# --------------------------------------------------------- column sets

class ColumnSets(NamedTuple):
    J: dict        # 1-based i -> frozenset of 1-based rows with A(i,l)_{jj} = 1
    F: dict        # same as J
    F0: frozenset  # rows k with A(i,l)_{kj} = delta_il delta_kj for all i, j


def _j_sets0(f: TwistingFamily, l0: int) -> list[frozenset]:
    return [frozenset(k for k in range(f.n) if f.A[i][l0][k][k] == 1) for i in range(f.m)]


def _f0_set0(f: TwistingFamily, l0: int) -> frozenset:
    n, m = f.n, f.m
    return frozenset(
        k for k in range(n)
        if all(f.A[i][l0][k][j] == (ONE if (i == l0 and k == j) else ZERO) for i in range(m) for j in range(n)))


def column_sets(f: TwistingFamily, l: int) -> ColumnSets:
    l0 = index0(l, f.m, "l")
    J = {i + 1: frozenset(k + 1 for k in s) for i, s in enumerate(_j_sets0(f, l0))}
    return ColumnSets(J, dict(J), frozenset(k + 1 for k in _f0_set0(f, l0)))


# ------------------------------------------------- standard predicates

def _column_pretwisting0(f: TwistingFamily, l0: int) -> bool:
    n, col = f.n, f.column(l0)
    from .core import matmul
    for i, a in enumerate(col):
        target = ONE if i == l0 else ZERO
        if any(sum(row) != target for row in a):
            return False
        for i2, b in enumerate(col):
            if matmul(a, b) != (a if i == i2 else zeros(n)):
                return False
    total = [[sum(col[i][k][j] for i in range(f.m)) for j in range(n)] for k in range(n)]
    return total == [[ONE if k == j else ZERO for j in range(n)] for k in range(n)]


def _standard_column0(f: TwistingFamily, l0: int) -> bool:
    d = f.A[l0][l0]
    if not is_01(d):
        return False
    for i in range(f.m):
        a = f.A[i][l0]
        for k in range(f.n):
            for j in range(f.n):
                if a[k][j] != 0 and k != j and d[k][j] == 0:
                    return False
    return _column_pretwisting0(f, l0)


def is_standard(f: TwistingFamily, column: Optional[int] = None) -> bool:
    """Standard column test (requires the column to satisfy the pre-twisting conditions)."""
    if column is not None:
        return _standard_column0(f, index0(column, f.m, "column"))
    return all(_standard_column0(f, l0) for l0 in range(f.m))


def check_standard_map(f: TwistingFamily) -> bool:
    """Twisting test for a family with standard columns: F(A(i,l)) inside F_0(A,i) for all i, l."""
    if not is_standard(f):
        raise TwistlabError("check_standard_map needs every column to be standard")
    f0 = [_f0_set0(f, i) for i in range(f.m)]
    for l0 in range(f.m):
        for i, J in enumerate(_j_sets0(f, l0)):
            if not J <= f0[i]:
                return False
    return True


# ------------------------------------------------------------ builder

def build_standard(a_list: Sequence[Mat], b_list: Sequence[Mat]) -> TwistingFamily:
    """The standard twisting map with prescribed diagonal matrices A(i,i) and B(k,k)."""
    a_list = [mat(a) for a in a_list]
    b_list = [mat(b) for b in b_list]
    m, n = len(a_list), len(b_list)
    if m < 1 or n < 1:
        raise TwistlabError("need at least one A and one B matrix")
    for i, a in enumerate(a_list):
        if len(a) != n or any(len(r) != n for r in a):
            raise TwistlabError(f"A({i + 1}) must be {n}x{n}")
        if not (is_01(a) and all(sum(r) == 1 for r in a) and is_idempotent(a)):
            raise TwistlabError(f"A({i + 1}) is not an idempotent 0,1-matrix with unit row sums (i={i + 1})")
    for k, b in enumerate(b_list):
        if len(b) != m or any(len(r) != m for r in b):
            raise TwistlabError(f"B({k + 1}) must be {m}x{m}")
        if not (is_01(b) and all(sum(r) == 1 for r in b) and is_idempotent(b)):
            raise TwistlabError(f"B({k + 1}) is not an idempotent 0,1-matrix with unit row sums (k={k + 1})")
    for i in range(m):
        for k in range(n):
            if a_list[i][k][k] != b_list[k][i][i]:
                raise TwistlabError(f"diagonal mismatch A({i + 1})_kk != B({k + 1})_ii at (i,k)=({i + 1},{k + 1})")

    def entry(i, l, k, j):
        if i == l:
            return a_list[l][k][j]
        if k == j:
            return b_list[k][l][i]
        if a_list[l][k][j] == 1 and b_list[k][l][i] == 1:
            return -ONE
        return ZERO

    return TwistingFamily.from_function(m, n, entry)


# ------------------------------------------------------------- quivers

@dataclass(frozen=True)
class StandardQuiver:
    """Vertices are 1-based cells (j, l); each other cell (j, l) carries an arrow
    from its source (j, i) to its target (k, l), stored as ``arrows[(j, l)] = (i, k)``."""

    m: int
    n: int
    vertices: frozenset
    arrows: tuple  # sorted tuple of ((j, l), (i, k))

    def arrow_map(self) -> dict:
        return dict(self.arrows)

    def source(self, j: int, l: int) -> tuple[int, int]:
        i, _ = self.arrow_map()[(j, l)]
        return (j, i)

    def target(self, j: int, l: int) -> tuple[int, int]:
        _, k = self.arrow_map()[(j, l)]
        return (k, l)

    def edges(self) -> list[tuple[tuple[int, int], tuple[int, int], tuple[int, int]]]:
        """(cell, source vertex, target vertex) for every arrow."""
        return [((j, l), (j, i), (k, l)) for (j, l), (i, k) in self.arrows]

    def problems(self) -> list[str]:
        out = []
        cells = {(j, l) for j in range(1, self.n + 1) for l in range(1, self.m + 1)}
        if not self.vertices <= cells:
            out.append("vertex outside the grid")
        amap = self.arrow_map()
        if set(amap) != cells - self.vertices:
            out.append("arrows must sit exactly on the non-vertex cells")
        for l in range(1, self.m + 1):
            if not any((j, l) in self.vertices for j in range(1, self.n + 1)):
                out.append(f"column {l} has no vertex")
        for j in range(1, self.n + 1):
            if not any((j, l) in self.vertices for l in range(1, self.m + 1)):
                out.append(f"row {j} has no vertex")
        for (j, l), (i, k) in amap.items():
            if (j, i) not in self.vertices:
                out.append(f"source ({j},{i}) of arrow a{j}{l} is not a vertex")
            if (k, l) not in self.vertices:
                out.append(f"target ({k},{l}) of arrow a{j}{l} is not a vertex")
        return out

    def to_json(self) -> dict:
        return {
            "m": self.m, "n": self.n,
            "vertices": sorted([list(v) for v in self.vertices]),
            "arrows": [{"cell": list(c), "source": list(s), "target": list(t)} for c, s, t in self.edges()],
        }

    @classmethod
    def from_edges(cls, m: int, n: int, vertices: Iterable, edges: Iterable) -> "StandardQuiver":
        """Build from vertices and (source, target) pairs; the cell is (source row, target column)."""
        arrows = {}
        for (j, i), (k, l) in edges:
            if (j, l) in arrows:
                raise TwistlabError(f"two arrows on cell ({j},{l})")
            arrows[(j, l)] = (i, k)
        return cls(m, n, frozenset(tuple(v) for v in vertices), tuple(sorted(arrows.items())))


def quiver_of(f: TwistingFamily) -> StandardQuiver:
    """The quiver of a standard map; quasi-standard input is standardized first."""
    if not is_standard(f):
        from .quasistd import is_quasi_standard, standardize
        if not is_quasi_standard(f):
            raise TwistlabError("quiver_of needs a standard or quasi-standard family")
        f = standardize(f)
    m, n = f.m, f.n
    vertices = frozenset((j + 1, i + 1) for i in range(m) for j in range(n) if f.A[i][i][j][j] == 1)
    arrows = {}
    for l in range(m):
        c = _c_map0(f.A[l][l])
        for j in range(n):
            if (j + 1, l + 1) in vertices:
                continue
            i = next(i for i in range(m) if f.A[i][l][j][j] == 1)
            arrows[(j + 1, l + 1)] = (i + 1, c[j] + 1)
    return StandardQuiver(m, n, vertices, tuple(sorted(arrows.items())))


def quiver_diagonals(q: StandardQuiver) -> tuple[list[Mat], list[Mat]]:
    """The diagonal data A(l,l) and B(j,j) encoded by a quiver."""
    amap = q.arrow_map()
    a_list = []
    for l in range(1, q.m + 1):
        rows = []
        for k in range(1, q.n + 1):
            hit = k if (k, l) in q.vertices else amap[(k, l)][1]
            rows.append([ONE if j == hit else ZERO for j in range(1, q.n + 1)])
        a_list.append(mat(rows))
    b_list = []
    for j in range(1, q.n + 1):
        rows = []
        for l in range(1, q.m + 1):
            hit = l if (j, l) in q.vertices else amap[(j, l)][0]
            rows.append([ONE if i == hit else ZERO for i in range(1, q.m + 1)])
        b_list.append(mat(rows))
    return a_list, b_list


def quiver_to_standard(q: StandardQuiver) -> TwistingFamily:
    bad = q.problems()
    if bad:
        raise TwistlabError("invalid quiver: " + "; ".join(bad))
    return build_standard(*quiver_diagonals(q))


# ---------------------------------------------------------- enumeration

def _check_guard(m: int, n: int):
    if m < 1 or n < 1:
        raise TwistlabError("m and n must be positive")
    if m * n > ENUMERATION_GUARD:
        raise GuardExceeded(f"enumeration needs m*n <= {ENUMERATION_GUARD}")


def enumerate_quivers(m: int, n: int) -> Iterable[StandardQuiver]:
    """All valid standard quivers in deterministic order (vertex bitmask, then arrow choices)."""
    _check_guard(m, n)
    cells = [(j, l) for j in range(n) for l in range(m)]
    for mask in range(1, 1 << (n * m)):
        vert = {(j, l) for (j, l) in cells if mask >> (j * m + l) & 1}
        if any(not any((j, l) in vert for j in range(n)) for l in range(m)):
            continue
        if any(not any((j, l) in vert for l in range(m)) for j in range(n)):
            continue
        free = [c for c in cells if c not in vert]
        options = []
        for j, l in free:
            options.append([k for k in range(n) if (k, l) in vert])
            options.append([i for i in range(m) if (j, i) in vert])
        vertices = frozenset((j + 1, l + 1) for j, l in vert)
        for choice in itertools.product(*options):
            arrows = tuple(
                ((j + 1, l + 1), (choice[2 * p + 1] + 1, choice[2 * p] + 1)) for p, (j, l) in enumerate(free))
            yield StandardQuiver(m, n, vertices, arrows)


def enumerate_standard(m: int, n: int) -> list[TwistingFamily]:
    return [quiver_to_standard(q) for q in enumerate_quivers(m, n)]


def _idempotent_functions(n: int):
    """Maps c on range(n) with c(c(k)) = c(k)."""
    for c in itertools.product(range(n), repeat=n):
        if all(c[c[k]] == c[k] for k in range(n)):
            yield c


def standard_column_choices(m: int, n: int, l0: int) -> list[list[Mat]]:
    """Every standard column of a pre-twisting at position l0 (0-based), built directly."""
    out = []
    for c in _idempotent_functions(n):
        diag = tuple(tuple(ONE if j == c[k] else ZERO for j in range(n)) for k in range(n))
        others = [i for i in range(m) if i != l0]
        moving = [k for k in range(n) if c[k] != k]
        if moving and not others:
            continue
        for owners in itertools.product(others, repeat=len(moving)):
            col = [diag if i == l0 else zeros(n) for i in range(m)]
            rows = {i: [list(r) for r in zeros(n)] for i in others}
            for k, i in zip(moving, owners):
                rows[i][k][k] = ONE
                rows[i][k][c[k]] = -ONE
            for i in others:
                col[i] = mat(rows[i])
            out.append(col)
    return out


def enumerate_standard_bruteforce(m: int, n: int) -> list[TwistingFamily]:
    """Independent oracle: all products of standard columns, filtered by the full twisting test."""
    _check_guard(m, n)
    per_col = [standard_column_choices(m, n, l0) for l0 in range(m)]
    out = []
    for cols in itertools.product(*per_col):
        f = TwistingFamily.from_columns(cols)
        if is_twisting(f):
            out.append(f)
    return out


# ------------------------------------------------------- classification

@dataclass(frozen=True)
class ClassInfo:
    representative: TwistingFamily
    orbit_size: int
    gamma: tuple
    gamma_tilde: tuple
    sum_trace: Fraction
    quiver: Optional[StandardQuiver]
    key: tuple


@dataclass(frozen=True)
class ClassificationReport:
    m: int
    n: int
    classes: tuple[ClassInfo, ...]

    @property
    def total(self) -> int:
        return sum(c.orbit_size for c in self.classes)


def _threads() -> int:
    raw = os.environ.get("TWISTLAB_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise TwistlabError(f"TWISTLAB_THREADS must be an integer, got {raw!r}")
    return os.cpu_count() or 1


PARALLEL_THRESHOLD = 2000


def _key(f: TwistingFamily):
    return _canonical(f)[0]


def canonical_keys(fams: Sequence[TwistingFamily]) -> list[tuple]:
    """Canonical keys, computed in worker processes for long lists when allowed."""
    workers = min(_threads(), 32)
    if workers > 1 and len(fams) >= PARALLEL_THRESHOLD:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_key, fams, chunksize=max(1, len(fams) // (4 * workers))))
    return [_key(f) for f in fams]


def classify(fams: Sequence[TwistingFamily]) -> ClassificationReport:
    fams = list(fams)
    if not fams:
        raise TwistlabError("nothing to classify")
    m, n = fams[0].m, fams[0].n
    if any((f.m, f.n) != (m, n) for f in fams):
        raise TwistlabError("classify needs families of equal dimensions")
    groups: dict = defaultdict(list)
    for f, key in zip(fams, canonical_keys(fams)):
        groups[key].append(f)
    classes = []
    for key, members in groups.items():
        rep = canonical_form(members[0])[0]
        rm = rank_matrices(rep)
        quiver = quiver_of(rep) if is_standard(rep) else None
        classes.append(ClassInfo(rep, len(members), rm.gamma, rm.gamma_tilde, sum_trace(rep), quiver, key))
    classes.sort(key=lambda c: (-c.sum_trace, c.key))
    return ClassificationReport(m, n, tuple(classes))


def orbit(f: TwistingFamily) -> set[tuple]:
    """Distinct flattened tensors in the orbit of f."""
    from .twistmap import _orbit_index_maps
    flat = f.flat()
    return {tuple(flat[p] for p in idx) for _, _, idx in _orbit_index_maps(f.m, f.n)}


# ---------------------------------------------------- quiver rendering

def quiver_grid_text(q: StandardQuiver) -> str:
    """Rows j = 1..n top to bottom, columns l = 1..m; '•' vertex, 'o' arrow cell."""
    lines = []
    for j in range(1, q.n + 1):
        lines.append(" ".join("•" if (j, l) in q.vertices else "o" for l in range(1, q.m + 1)))
    for cell, (sj, si), (tk, tl) in q.edges():
        lines.append(f"a {cell[0]},{cell[1]}: ({sj},{si}) -> ({tk},{tl})")
    return "\n".join(lines)


def quiver_dot(q: StandardQuiver) -> str:
    lines = ["digraph quiver {", "  node [shape=circle, style=filled, label=\"\"];"]
    for j, l in sorted(q.vertices):
        lines.append(f'  "{j},{l}" [xlabel="{j},{l}", pos="{l},{q.n - j}!"];')
    for (j, l), s, t in q.edges():
        lines.append(f'  "{s[0]},{s[1]}" -> "{t[0]},{t[1]}" [label="a_{j}{l}"];')
    lines.append("}")
    return "\n".join(lines)


# ------------------------------------------------- twisting with K^2

class CibilsData(NamedTuple):
    phi: tuple          # 1-based phi(l): l itself for a loop, else the unique target
    adjacency: tuple    # (Gamma - Id)^T
    f_map: Mat          # row i holds the coordinates of f(e_i)
    delta_map: Mat      # row i holds the coordinates of delta(e_i)
    coloration: tuple


def cibils_extract(f: TwistingFamily) -> CibilsData:
    if f.n != 2:
        raise TwistlabError("the coloration correspondence needs n = 2")
    if not is_twisting(f):
        raise TwistlabError("input is not a twisting map")
    m = f.m
    gamma = rank_matrices(f).gamma
    adjacency = tuple(tuple(gamma[l][i] - (1 if i == l else 0) for l in range(m)) for i in range(m))
    phi = []
    for l in range(m):
        hits = [i for i in range(m) if i != l and not is_zero(f.A[i][l])]
        phi.append(l + 1 if not hits else hits[0] + 1)
    f_map = mat([[f.A[i][l][0][0] - f.A[i][l][1][0] for l in range(m)] for i in range(m)])
    delta_map = mat([[f.A[i][l][1][0] for l in range(m)] for i in range(m)])
    colors = tuple(f.A[l][l][1][0] for l in range(m))
    return CibilsData(tuple(phi), adjacency, f_map, delta_map, colors)


def coloration_problems(phi: Sequence[int], colors: Sequence) -> list[str]:
    m = len(phi)
    t = [index0(p, m, "phi value") for p in phi]
    c = [Fraction(x) for x in colors]
    if len(c) != m:
        raise TwistlabError("need one color per vertex")
    loop = [t[i] == i for i in range(m)]
    out = []
    trip = set()
    for i in range(m):
        j = t[i]
        if j != i and t[j] == i and not any(t[h] in (i, j) for h in range(m) if h not in (i, j)):
            trip |= {i, j}
            if c[i] + c[j] != 1:
                out.append(f"round trip {i + 1},{j + 1}: colors must sum to 1")
    for i in range(m):
        if i in trip:
            continue
        if loop[i]:
            if c[i] != 0:
                out.append(f"loop vertex {i + 1} must have color 0")
            continue
        if c[i] not in (0, 1):
            out.append(f"vertex {i + 1} must have color 0 or 1")
        j = t[i]
        if not loop[j] and {c[i], c[j]} != {0, 1}:
            out.append(f"arrow {i + 1}->{j + 1}: extremities must be colored 0 and 1")
    return out


def cibils_build(phi: Sequence[int], colors: Sequence) -> TwistingFamily:
    bad = coloration_problems(phi, colors)
    if bad:
        raise TwistlabError("invalid coloration: " + "; ".join(bad))
    m = len(phi)
    grid = [[zeros(2) for _ in range(m)] for _ in range(m)]
    for l in range(m):
        t = phi[l] - 1
        if t == l:
            grid[l][l] = identity(2)
            continue
        a = Fraction(colors[l])
        grid[l][l] = mat([[a, 1 - a], [a, 1 - a]])
        grid[t][l] = mat([[1 - a, a - 1], [-a, a]])
    return TwistingFamily(m, 2, tuple(tuple(r) for r in grid))


def cibils(data) -> object:
    """Extract quiver data from a family, or build the family from (phi, coloration)."""
    if isinstance(data, TwistingFamily):
        return cibils_extract(data)
    phi, colors = data
    return cibils_build(phi, colors)
