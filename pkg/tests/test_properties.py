import itertools

from hypothesis import given, settings
from hypothesis import strategies as st

from twistlab.core import all_perms, cross_product, det, mat
from twistlab.families import (
    crossproduct_xi,
    family_2x2,
    family_sumtr3_allones,
    family_sumtr3_mixed,
    family_sumtr6_222,
)
from twistlab.quasistd import deform, deformation_sites, is_quasi_standard
from twistlab.standard import enumerate_standard, is_standard
from twistlab.twistmap import TwistingFamily, apply_perms, canonical_key, dual, flip, is_twisting, verify

SETTINGS = settings(max_examples=200, deadline=None)

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6)
nonzero = rationals.filter(lambda x: x != 0)
outside_01 = rationals.filter(lambda x: x not in (0, 1))


@st.composite
def candidates(draw):
    """Twisting maps from the catalogue, permuted, sometimes with one entry perturbed."""
    kind = draw(st.sampled_from(["2x2", "sumtr6", "allones", "mixed", "flip", "cross"]))
    if kind == "2x2":
        f = family_2x2(draw(rationals))
    elif kind == "sumtr6":
        f = family_sumtr6_222(draw(rationals), draw(st.sampled_from([1, 2])))
    elif kind == "allones":
        f = family_sumtr3_allones(draw(outside_01))
    elif kind == "mixed":
        f = family_sumtr3_mixed(draw(outside_01), draw(nonzero), draw(nonzero))
    elif kind == "flip":
        f = flip(draw(st.integers(1, 3)), draw(st.integers(1, 3)))
    else:
        v = draw(st.lists(nonzero, min_size=3, max_size=3))
        w = draw(st.lists(nonzero, min_size=3, max_size=3))
        if det(mat([(1, 1, 1), v, w])) == 0:
            v = [1, 2, 3]
            w = [1, 3, 2]
        f = crossproduct_xi([v, w]).family
    sigma = draw(st.permutations(range(1, f.m + 1)))
    tau = draw(st.permutations(range(1, f.n + 1)))
    f = apply_perms(f, sigma, tau)
    if draw(st.booleans()):
        i, l = draw(st.integers(0, f.m - 1)), draw(st.integers(0, f.m - 1))
        k, j = draw(st.integers(0, f.n - 1)), draw(st.integers(0, f.n - 1))
        grid = [[[list(r) for r in a] for a in row] for row in f.A]
        grid[i][l][k][j] += draw(nonzero)
        f = TwistingFamily(f.m, f.n, grid)
    return f


@SETTINGS
@given(candidates())
def test_dual_is_involution(f):
    assert dual(dual(f)) == f


@SETTINGS
@given(candidates())
def test_verification_is_self_dual(f):
    assert verify(f).is_twisting == verify(dual(f)).is_twisting


@st.composite
def vector_lists(draw, n):
    return [tuple(draw(st.lists(rationals, min_size=n, max_size=n))) for _ in range(n - 1)]


def dot(u, v):
    return sum(x * y for x, y in zip(u, v))


@SETTINGS
@given(st.integers(2, 4).flatmap(vector_lists), rationals)
def test_cross_product_laws(vs, c):
    w = cross_product(vs)
    assert all(dot(w, v) == 0 for v in vs)
    n = len(w)
    for x in itertools.islice(itertools.product([0, 1, -1], repeat=n), 5):
        assert dot(w, x) == det(mat([x, *vs]))
    scaled = [tuple(c * t for t in vs[0])] + vs[1:]
    assert cross_product(scaled) == tuple(c * t for t in w)
    if len(vs) >= 2:
        swapped = [vs[1], vs[0]] + vs[2:]
        assert cross_product(swapped) == tuple(-t for t in w)


STANDARD_32 = enumerate_standard(3, 2)
PERMS_3 = [tuple(x + 1 for x in p) for p in all_perms(3)]
PERMS_2 = [tuple(x + 1 for x in p) for p in all_perms(2)]


def compose(p, q):
    return tuple(p[x - 1] for x in q)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(PERMS_3), st.sampled_from(PERMS_3), st.sampled_from(PERMS_2), st.sampled_from(PERMS_2))
def test_apply_perms_is_a_group_action(s1, s2, t1, t2):
    for f in STANDARD_32:
        twice = apply_perms(apply_perms(f, s1, t1), s2, t2)
        assert twice == apply_perms(f, compose(s1, s2), compose(t1, t2))
    assert all(apply_perms(f, (1, 2, 3), (1, 2)) == f for f in STANDARD_32)


def test_canonical_key_is_orbit_invariant():
    for f in STANDARD_32:
        key = canonical_key(f)
        for s in PERMS_3:
            for t in PERMS_2:
                g = apply_perms(f, s, t)
                assert is_twisting(g)
                assert canonical_key(g) == key


def test_predicates_are_self_dual(classes_33):
    checked = 0
    for c in classes_33.classes:
        f = c.representative
        family = [f] + [deform(f, s.with_lambda(1)) for s in deformation_sites(f)]
        for g in family:
            assert is_standard(g) == is_standard(dual(g))
            assert is_quasi_standard(g) == is_quasi_standard(dual(g))
            checked += 1
    assert checked == 82 + 25
