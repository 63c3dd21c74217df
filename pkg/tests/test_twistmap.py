import json
import random
from fractions import Fraction

import pytest

from conftest import localized, mutate
from twistlab.core import MalformedInputError, TwistlabError, mat
from twistlab.families import family_2x2, family_sumtr6_222
from twistlab.twistmap import (
    TwistingFamily,
    apply_perms,
    b_matrix,
    canonical_form,
    canonical_key,
    coarse_quiver,
    direct_sum,
    dual,
    dumps,
    flip,
    from_json,
    is_isomorphic,
    is_pretwisting,
    is_twisting,
    lam,
    rank_matrices,
    reduced_rank,
    restrict,
    sum_trace,
    verify,
)


def test_flip_is_twisting_with_identity_ranks():
    f = flip(3, 2)
    assert verify(f).is_twisting
    rm = rank_matrices(f)
    assert rm.gamma == ((2, 0, 0), (0, 2, 0), (0, 0, 2))
    assert rm.gamma_tilde == ((3, 0), (0, 3))
    assert sum_trace(f) == 6


def test_lambda_and_b_matrix_agree():
    f = family_2x2("1/3")
    for i in (1, 2):
        for l in (1, 2):
            for k in (1, 2):
                for j in (1, 2):
                    assert lam(f, i, j, k, l) == f.a(i, l)[k - 1][j - 1] == b_matrix(f, j, k)[l - 1][i - 1]


def test_single_entry_mutation_is_localized():
    f = family_sumtr6_222(2)
    rng = random.Random(7)
    for _ in range(30):
        cell = (rng.randint(1, 3), rng.randint(1, 3), rng.randint(1, 3), rng.randint(1, 3))
        report = verify(mutate(f, *cell, delta=rng.choice([1, -2, Fraction(1, 2)])))
        assert localized(report, *cell), (cell, report.violations[:3])


def test_c4_only_violation_is_pretwisting():
    # Standard columns that do not fit together: pre-twisting but not twisting.
    collapse = mat([[1, 0], [1, 0]])
    correction = mat([[0, 0], [-1, 1]])
    f = TwistingFamily.from_columns([[collapse, correction], [correction, collapse]])
    assert is_pretwisting(f)
    assert not is_twisting(f)
    assert {v.cond for v in verify(f).violations} == {"C4"}


def test_dual_is_involution_and_swaps_rank_matrices():
    f = family_sumtr6_222("1/2", variant=2)
    g = dual(f)
    assert (g.m, g.n) == (f.n, f.m)
    assert dual(g) == f
    assert is_twisting(g)
    rf, rg = rank_matrices(f), rank_matrices(g)
    assert (rg.gamma, rg.gamma_tilde) == (rf.gamma_tilde, rf.gamma)


def test_apply_perms_and_canonical_form():
    f = family_sumtr6_222(3)
    g = apply_perms(f, (3, 1, 2), (2, 3, 1))
    assert is_twisting(g)
    assert is_isomorphic(f, g)
    assert canonical_key(f) == canonical_key(g)
    c, s, t = canonical_form(g)
    assert apply_perms(g, s, t) == c
    assert c.flat() == canonical_key(f)
    with pytest.raises(TwistlabError):
        apply_perms(f, (1, 1, 2), (1, 2, 3))


def test_restrict_and_direct_sum():
    f = family_sumtr6_222(2)
    block = restrict(f, [2, 3])
    assert block is not None and is_twisting(block)
    assert restrict(f, [1]) is None
    s = direct_sum(flip(1, 3), block)
    assert is_twisting(s)
    assert coarse_quiver(s) == ((0, 0, 0), (0, 0, 1), (0, 1, 0))
    assert reduced_rank(f, 1) == 1 and reduced_rank(f, 2) == 1


def test_json_round_trip_and_errors():
    f = family_2x2("-5/3")
    assert from_json(dumps(f)) == f
    obj = json.loads(dumps(f))
    assert obj["A"][0][1][0][1] == "5/3"
    for bad in ["{", '{"m": 2}', '{"m": 2, "n": 2, "A": []}',
                '{"m": 1, "n": 1, "A": [[[["0.5"]]]]}', '{"m": 0, "n": 1, "A": []}']:
        with pytest.raises(MalformedInputError):
            from_json(bad)
