import pytest
from hypothesis import given, settings, strategies as hs

from nonnormal.syntax import (
    BOT, TOP, MTFormula, SortError, S, N, box_ni, boxr_notni, cap, check_st, conj, dia_nu,
    nabla, cond, st_var, st_and, st_language, substitute, subformulas, tri, var, variables,
    well_sorted, mt, show,
)

from gen import COND_ALL, NABLA_ALL, mt_formulas

p, q, r = var("p"), var("q"), var("r")


def test_well_sorted_examples():
    assert well_sorted(dia_nu(box_ni(p)))
    assert well_sorted(p)
    assert not well_sorted(MTFormula("dia-nu", (p,)))


def test_sort_of_constructors():
    assert box_ni(p).sort == N
    assert dia_nu(box_ni(p)).sort == S
    assert tri(box_ni(p), q).sort == S


def test_mixing_languages_is_rejected():
    mixed = conj(dia_nu(box_ni(p)), tri(box_ni(p), q))
    assert not well_sorted(mixed)


def test_substitute_examples():
    assert substitute(dia_nu(box_ni(p)), "p", conj(q, r)) == dia_nu(box_ni(conj(q, r)))
    assert substitute(q, "p", r) == q
    alpha = cap(box_ni(p), boxr_notni(p))
    assert substitute(alpha, "p", TOP) == cap(box_ni(TOP), boxr_notni(TOP))


def test_substitute_needs_s_sort():
    with pytest.raises(SortError):
        substitute(p, "p", box_ni(q))


def test_variables_examples():
    assert variables(conj(dia_nu(box_ni(p)), dia_nu(box_ni(q)))) == {"p", "q"}
    assert variables(TOP) == frozenset()
    assert variables(tri(cap(box_ni(p), boxr_notni(p)), q)) == {"p", "q"}


def test_st_language_and_mixing():
    assert st_language(nabla(st_var("p"))) == "nabla"
    assert st_language(cond(st_var("p"), st_var("q"))) == "cond"
    with pytest.raises(SortError):
        check_st(st_and(nabla(st_var("p")), cond(st_var("p"), st_var("q"))))


def test_show_uses_symbols():
    assert show(dia_nu(box_ni(p))) == "⟨ν⟩[∋]p"


@settings(max_examples=300, deadline=None)
@given(hs.sampled_from([NABLA_ALL, COND_ALL]).flatmap(lambda ops: mt_formulas(S, 4, ops)))
def test_generated_formulas_are_well_sorted_throughout(f):
    assert well_sorted(f)
    assert all(well_sorted(g) for g in subformulas(f))


@settings(max_examples=300, deadline=None)
@given(mt_formulas(S, 3, NABLA_ALL), mt_formulas(S, 2, NABLA_ALL), mt_formulas(S, 2, NABLA_ALL))
def test_substitution_composes(f, g, h):
    # rename so that p does not occur in h and q does not occur in g
    g = substitute(g, "q", r)
    h = substitute(h, "p", r)
    left = substitute(substitute(f, "p", g), "q", h)
    right = substitute(substitute(f, "q", h), "p", substitute(g, "q", h))
    assert left == right


def test_leaf_constants():
    assert TOP.sort == S and BOT.sort == S
    assert mt("one").sort == N
