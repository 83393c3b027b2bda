from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from binrank.apolarity import BinaryForm, apolar_action, apolar_profile, combine, complex_rank
from binrank.exact import form_is_square_free
from binrank.realrank import (
    Exactness,
    Label,
    a_rank,
    admissible_rank,
    label_of_form,
    labels_at,
    pencil_cells,
    rank_report,
    real_rank,
)

import oracle

forms = st.integers(1, 6).flatmap(
    lambda d: st.lists(st.integers(-5, 5), min_size=d + 1, max_size=d + 1)).filter(any)
invertible = st.tuples(*[st.integers(-3, 3)] * 4).filter(lambda m: m[0] * m[3] - m[1] * m[2] != 0)


def labels(c, s):
    return labels_at(apolar_profile(BinaryForm(c)), s)


def as_set(ls):
    return {(lab.s, lab.a) for lab in ls.labels}


def levels(f):
    p = apolar_profile(f)
    return p, [s for s in range(1, f.degree + 2) if s > f.degree or p.kernel(s)]


def test_label_validation():
    assert Label(3, 1).real_points == 1
    assert str(Label(4, 2)) == "(4,2)"
    for bad in ((2, 2), (3, -1)):
        with pytest.raises(ValueError):
            Label(*bad)
    assert label_of_form((1, 0, 1)) == Label(2, 1)
    assert label_of_form((0, 1, 0)) == Label(2, 0)
    assert label_of_form((0, 0, 1)) is None


def test_admissible_rank_examples():
    assert admissible_rank(BinaryForm((0, 1, 0, 0)))[0] == 3
    assert admissible_rank(BinaryForm((1, 0, 1)))[0] == 2
    r, w = admissible_rank(BinaryForm((0, 1, 0, 0)))
    assert form_is_square_free(w.coeffs) and not any(apolar_action(w.coeffs, (0, 1, 0, 0)))


def test_labels_at_examples():
    ls = labels((1, 0, -1), 2)
    assert as_set(ls) == {(2, 0), (2, 1)} and ls.exactness is Exactness.COMPLETE
    ls = labels((1, 0, 1), 2)
    assert as_set(ls) == {(2, 0)} and ls.exactness is Exactness.COMPLETE
    ls = labels((1, 0, 0, 1), 2)
    assert as_set(ls) == {(2, 0)} and ls.exactness is Exactness.COMPLETE
    # x^2 y: the only quadric is Y^2, not square-free
    assert as_set(labels((0, 1, 0, 0), 2)) == set()
    assert as_set(labels((0, 1, 0, 0), 3)) == {(3, 0), (3, 1)}
    with pytest.raises(ValueError):
        labels((1, 0, 1), 1)


def test_pencil_witnesses_are_simple():
    ls = labels((1, 0, -1), 2)
    assert ls.witnesses[Label(2, 1)].coeffs == (1, 0, 1)
    assert ls.witnesses[Label(2, 0)].coeffs == (0, 1, 0)


def test_real_rank_examples():
    assert real_rank(BinaryForm((0, 1, 0, 0))).value == 3
    assert real_rank(BinaryForm((1, 0, 1))).value == 2
    assert real_rank(BinaryForm((1, 0, 0, 1))).value == 2
    # ((x + y)^4 + (x - y)^4) / 2
    assert real_rank(BinaryForm((1, 0, 6, 0, 1))).value == 2
    for d in range(2, 7):
        c = tuple([0, 1] + [0] * (d - 1))
        assert real_rank(BinaryForm(c)).value == d


def test_a_rank_examples():
    assert a_rank(BinaryForm((1, 0, -1)), 1).value == 0
    # (2,1) is missing for x^2 + y^2; (3,1) appears at s = 3
    assert a_rank(BinaryForm((1, 0, 1)), 1).value == 1
    assert a_rank(BinaryForm((1, 0, 0, 1)), 0).value == 2


def test_rank_report_examples():
    r = rank_report(BinaryForm((1, 0, 0, 0, 0, 0)))
    assert (r.complex_rank, r.admissible_rank, r.real_rank.value) == (1, 1, 1)
    assert as_set(r.labels) == {(1, 0)}
    r = rank_report(BinaryForm((1, 0, -1)))
    assert (r.complex_rank, r.admissible_rank, r.real_rank.value) == (2, 2, 2)
    assert as_set(r.labels) == {(2, 0), (2, 1)}
    r = rank_report(BinaryForm((0, 1, 0, 0)))
    assert (r.complex_rank, r.admissible_rank, r.real_rank.value) == (3, 3, 3)
    assert (3, 0) in as_set(r.labels)
    r = rank_report(BinaryForm((0, 1, 0)), all_levels=True)
    assert all(ls.non_normative for ls in r.extra_levels)


@given(forms)
def test_rank_chain_and_upper_bound(c):
    f = BinaryForm(tuple(c))
    r = rank_report(f)
    assert r.complex_rank <= r.admissible_rank <= r.real_rank.lo
    assert r.admissible_rank <= f.degree
    if r.real_rank.exact:
        assert r.real_rank.value <= f.degree
    assert a_rank(f, 0) == r.real_rank
    assert r.complex_rank == oracle.oracle_rank(f.coeffs)


@given(forms)
def test_label_witnesses_are_valid(c):
    f = BinaryForm(tuple(c))
    p, ss = levels(f)
    for s in ss:
        ls = labels_at(p, s)
        assert set(ls.witnesses) == set(ls.labels)
        for lab, g in ls.witnesses.items():
            assert lab.s == s and 0 <= 2 * lab.a <= s
            assert len(g.coeffs) == s + 1
            assert form_is_square_free(g.coeffs) and oracle.is_squarefree_form(g.coeffs)
            if s <= f.degree:
                assert not any(apolar_action(g.coeffs, f.coeffs))
            assert oracle.real_roots_distinct(g.coeffs) == lab.real_points


@given(forms, st.data())
@settings(max_examples=40)
def test_pencil_cells_are_sound(c, data):
    f = BinaryForm(tuple(c))
    p, ss = levels(f)
    pencils = [s for s in ss if s <= f.degree and len(p.kernel(s)) == 2]
    if not pencils:
        return
    s = data.draw(st.sampled_from(pencils))
    g1, g2 = p.kernel(s)
    disc, cells = pencil_cells(g1, g2)
    for cell in cells:
        lo = cell.lo if cell.lo is not None else (cell.hi or 0) - 50
        hi = cell.hi if cell.hi is not None else (cell.lo or 0) + 50
        u = data.draw(st.fractions(min_value=0, max_value=1, max_denominator=50))
        t = lo + (hi - lo) * u
        if t in (cell.lo, cell.hi):
            continue
        first = label_of_form(combine((g1, g2), (1, cell.sample)))
        second = label_of_form(combine((g1, g2), (1, t)))
        assert first is not None and first == second


@given(forms, invertible)
@settings(max_examples=40)
def test_gl2_invariance(c, m):
    f = BinaryForm(tuple(c))
    g = f.substitute(*m)
    rf, rg = rank_report(f), rank_report(g)
    assert rf.complex_rank == rg.complex_rank
    assert rf.admissible_rank == rg.admissible_rank
    if rf.real_rank.exact and rg.real_rank.exact:
        assert rf.real_rank.value == rg.real_rank.value
    if Exactness.COMPLETE == rf.labels.exactness == rg.labels.exactness:
        assert as_set(rf.labels) == as_set(rg.labels)
    # partial sets are sound: each side's labels are real
    assert as_set(rf.labels) <= as_set(rg.labels) or rg.labels.exactness is not Exactness.COMPLETE


def test_complex_rank_of_monomials():
    for d in range(2, 7):
        c = tuple([0, 1] + [0] * (d - 1))
        assert complex_rank(BinaryForm(c))[0] == d
        assert admissible_rank(BinaryForm(c))[0] == d
