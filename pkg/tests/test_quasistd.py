import random
from fractions import Fraction

import pytest

from conftest import chain_specs, golden, mutate, printed_row, representative_for_row
from twistlab.algebra import build_algebra, jacobson_radical
from twistlab.core import TwistlabError, identity, mat, zeros
from twistlab.families import family_2x2, family_sumtr6_222
from twistlab.quasistd import (
    DeformationError,
    DeformationSpec,
    admissibility,
    build_quasi_column,
    check_column_condition4,
    check_extension,
    choice_candidates,
    column_condition4_direct,
    d_block,
    DBlockIndex,
    deform,
    deformation_sites,
    expected_mu1,
    explore_chains,
    is_quasi_standard,
    mu1_table,
    random_quasi_column,
    reduced_rank_shortcut,
    row_support_lemma_holds,
    standardize,
    x_set,
)
from twistlab.standard import is_standard
from twistlab.twistmap import (
    TwistingFamily,
    apply_perms,
    dual,
    flip,
    is_pretwisting,
    is_twisting,
    orbit_members,
    rank_matrices,
)

# A(1,1) on K^8 with diagonal ones at rows 1, 2 and J-sets {1,2}, {3,4,5}, {6,7,8}.
TARGETS = {1: 1, 2: 2, 3: 1, 4: 1, 5: 2, 6: 1, 7: 2, 8: 2}
A11 = mat([[1 if j == TARGETS[k] else 0 for j in range(1, 9)] for k in range(1, 9)])
JSETS = [{1, 2}, {3, 4, 5}, {6, 7, 8}]
CHOICES = {(2, 3): {3: (6, 2), 4: (6, 3)}, (3, 2): {7: (5, -5), 8: (5, -7)}}
EXPECTED_A21 = mat([
    [0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0],
    [-3, 0, 1, 0, 0, 2, 0, 0],
    [-4, 0, 0, 1, 0, 3, 0, 0],
    [0, -1, 0, 0, 1, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0],
    [0, -5, 0, 0, 5, 0, 0, 0],
    [0, -7, 0, 0, 7, 0, 0, 0],
])
ROW20_SITE = ((3, 1), (2, 2), (1, 3))


def with_column(col):
    n = len(col[0])
    return TwistingFamily.from_columns([col, [zeros(n), identity(n), zeros(n)], [zeros(n), zeros(n), identity(n)]])


def test_worked_column_matches_hand_derivation():
    col = build_quasi_column(A11, JSETS, 1, CHOICES)
    assert col[1] == EXPECTED_A21
    f = with_column(col)
    assert is_pretwisting(f)
    assert is_quasi_standard(f, column=1)
    assert not is_standard(f, column=1)
    assert row_support_lemma_holds(f, 1)
    assert check_column_condition4(f, 1) == column_condition4_direct(f, 1)
    assert x_set(f, 1, 3) == (frozenset({3}), frozenset({6}))
    assert d_block(f, DBlockIndex(2, 1, 2, 3)) == mat([[2, 0, 0], [3, 0, 0], [0, 0, 0]])


def test_choice_candidates_follow_c_matching():
    assert choice_candidates(A11, JSETS, 1, {}, (2, 3), 3) == [6]
    assert choice_candidates(A11, JSETS, 1, {}, (2, 3), 5) == [7, 8]
    # Row 6 of D^{32} is forced to vanish once D^{23} already uses d = 6.
    assert choice_candidates(A11, JSETS, 1, {(2, 3): {3: (6, 1)}}, (3, 2), 6) == []


def test_build_quasi_column_rejects_bad_choices():
    with pytest.raises(TwistlabError, match="c_"):
        build_quasi_column(A11, JSETS, 1, {(2, 3): {3: (7, 1)}})
    with pytest.raises(TwistlabError, match="D\\^"):
        build_quasi_column(A11, JSETS, 1, {(2, 3): {3: (6, 1)}, (3, 2): {6: (3, 1)}})
    with pytest.raises(TwistlabError, match="partition"):
        build_quasi_column(A11, [{1, 2}, {3, 4}, {6, 7, 8}], 1, {})


def test_random_columns_are_quasi_standard():
    rng = random.Random(2024)
    for _ in range(25):
        col, choices = random_quasi_column(rng, A11, JSETS, 1)
        f = with_column(col)
        assert is_pretwisting(f) and is_quasi_standard(f, column=1)
        assert check_column_condition4(f, 1) == column_condition4_direct(f, 1)


def test_reduced_rank_shortcut():
    f = family_sumtr6_222(2)
    assert reduced_rank_shortcut(f, 1)
    assert not reduced_rank_shortcut(family_2x2(3), 1)


def test_check_extension():
    glued = apply_perms(family_sumtr6_222(2), (2, 3, 1), (1, 2, 3))
    assert check_extension(glued, 2)
    with pytest.raises(TwistlabError, match="must vanish"):
        check_extension(glued, 1)
    with pytest.raises(TwistlabError, match="not quasi-standard"):
        check_extension(glued, 0)
    collapse = mat([[1, 0], [1, 0]])
    correction = mat([[0, 0], [-1, 1]])
    broken = TwistingFamily.from_columns([[collapse, correction], [correction, collapse]])
    assert not check_extension(broken, 0)


def test_standardize_keeps_diagonals(row20):
    g = deform(row20, DeformationSpec(3, 1, 2, 2, 1, 3, Fraction(5, 2)))
    assert not is_standard(g) and is_quasi_standard(g)
    assert standardize(g) == row20
    with pytest.raises(TwistlabError):
        standardize(family_2x2(3))


def test_row20_site(row20):
    assert [s.site for s in deformation_sites(row20)] == [ROW20_SITE]
    assert deformation_sites(flip(3, 3)) == []


@pytest.mark.parametrize("lam", [1, -1, Fraction(1, 2), Fraction(5, 3), 7])
def test_row20_deformation(row20, lam):
    spec = DeformationSpec(3, 1, 2, 2, 1, 3).with_lambda(lam)
    g = deform(row20, spec)
    assert is_twisting(g) and is_quasi_standard(g)
    assert rank_matrices(g) == rank_matrices(row20)
    assert mu1_table(row20, g, lam) == expected_mu1(spec)
    report = jacobson_radical(build_algebra(g), g, method="closed")
    assert report.dim == 3 and not report.square_zero


def test_deformation_is_affine_in_lambda(row20):
    base = DeformationSpec(3, 1, 2, 2, 1, 3)
    assert deform(row20, base) == row20
    g1, g2, g3 = (deform(row20, base.with_lambda(t)).flat() for t in (1, 2, 3))
    assert all(c - b == b - a for a, b, c in zip(g1, g2, g3))


def test_invalid_site_and_admissibility(row20):
    with pytest.raises(DeformationError, match="not a deformation site"):
        deform(row20, DeformationSpec(1, 1, 2, 2, 1, 3, Fraction(1)))
    spec = DeformationSpec(3, 1, 2, 2, 1, 3, Fraction(1))
    g = deform(row20, spec)
    assert admissibility(g, spec) is None
    assert admissibility(mutate(g, 2, 3, 2, 2), spec) == "A(2,3)"
    with pytest.raises(TwistlabError):
        mu1_table(row20, mutate(g, 1, 1, 1, 1), 1)


def test_deformation_commutes_with_duality(row20):
    g = deform(row20, DeformationSpec(3, 1, 2, 2, 1, 3, Fraction(1)))
    assert is_quasi_standard(dual(g)) and is_twisting(dual(g))
    assert len(deformation_sites(dual(row20))) == 1


def test_explore_chains_modes(row82):
    assert [len(level) for level in explore_chains(row82)] == [6, 18, 12]
    assert [len(level) for level in explore_chains(row82, dedupe="family")] == [6, 9, 2]
    assert [len(level) for level in explore_chains(row82, dedupe="iso")] == [1, 2, 1]
    assert explore_chains(flip(3, 3)) == []
    with pytest.raises(TwistlabError):
        explore_chains(row82, dedupe="other")


CHAIN_ROWS = [20, 51, 52, 54, 55, 66, 68, 74, 76, 77, 78, 79, 80, 82]


def chain_applies(f, row, lam):
    done = {0: f}
    try:
        for name, parent, spec in chain_specs(row, lam):
            done[name] = deform(done[parent], spec)
    except DeformationError:
        return False
    return True


def test_chain_rows_are_the_printed_ones():
    assert [r["row"] for r in golden("table_m3_n3") if r["chain"]] == CHAIN_ROWS


@pytest.mark.parametrize("number", CHAIN_ROWS)
def test_printed_chain_applies_at_sampled_lambdas(number):
    row = printed_row("table_m3_n3", number)
    base = representative_for_row("table_m3_n3", number)
    ranks = (tuple(map(tuple, row["gamma"])), tuple(map(tuple, row["gamma_tilde"])))
    members = [g for g, _, _ in orbit_members(base) if tuple(rank_matrices(g)) == ranks]
    for lam in (1, -1, Fraction(1, 2), Fraction(5, 3)):
        assert any(chain_applies(g, row, lam) for g in members), lam
