import pytest
from hypothesis import given, settings, strategies as hs

from nonnormal.classifier import (
    AXIOM_TABLE, DUAL, ONE, SLR, SRA, ClassificationError, branches,
    classify_axiom_table, critical_branches, is_analytic_inductive, is_good_branch, signed_tree,
    table_inequality,
)
from nonnormal.correspondence import AxiomId, axiom_sequent, enumerate_cframes, enumerate_nframes
from nonnormal.batch import star_batch, assignment_grid
from nonnormal.syntax import (
    Inequality, MTFormula, S, box_ni, boxr_notni, cap, conj, dia_nu, disj, neg, tri, var, variables,
)
from nonnormal.textio import parse_inequality
from nonnormal.translation import translate_sequent

from gen import COND_OPS, NABLA_OPS, mt_formulas

p, q = var("p"), var("q")
ALPHA = cap(box_ni(p), boxr_notni(p))


def test_signed_tree_examples():
    t = signed_tree(dia_nu(box_ni(p)), "+")
    assert t.sign == "+" and SLR in t.classes
    (child,) = t.children
    assert child.op == "box-ni" and child.sign == "+" and SRA in child.classes
    assert child.children[0].sign == "+"

    n = signed_tree(neg(p), "+")
    assert n.children[0].sign == "-"

    t = signed_tree(tri(box_ni(p), q), "+")
    first, second = t.children
    assert (first.op, first.sign) == ("box-ni", "-") and SLR in first.classes
    assert second.sign == "+"


def test_signed_tree_rejects_bad_input():
    with pytest.raises(ValueError):
        signed_tree(p, "*")
    with pytest.raises(ClassificationError):
        signed_tree(MTFormula("dia-nu", (p,)), "+")


def test_critical_branch_examples():
    t = signed_tree(dia_nu(box_ni(p)), "+")
    assert len(critical_branches(t, {"p": ONE})) == 1
    assert critical_branches(t, {"p": DUAL}) == []
    t = signed_tree(conj(p, neg(q)), "+")
    crit = critical_branches(t, {"p": ONE, "q": DUAL})
    assert sorted(b.leaf.label() for b in crit) == ["+p", "-q"]


def test_good_branch_examples():
    (b,) = branches(signed_tree(dia_nu(box_ni(p)), "+"))
    assert is_good_branch(b)
    (b,) = branches(signed_tree(box_ni(dia_nu(box_ni(p))), "+"))
    # +[∋] is PIA only and sits above the Skeleton node +⟨ν⟩
    assert not is_good_branch(b)
    (b,) = branches(signed_tree(p, "+"))
    assert is_good_branch(b)


def test_analytic_examples():
    assert is_analytic_inductive(Inequality(dia_nu(box_ni(p)), p)).analytic
    four = parse_inequality(
        "(leq (dia-nu (box-ni (dia-nu (box-ni (var p))))) (box-nuc (dia-notni (var p))))")
    res = is_analytic_inductive(four)
    assert not res.analytic and res.failure_reason
    assert is_analytic_inductive(Inequality(p, p)).analytic


def test_golden_table():
    rep = classify_axiom_table()
    assert rep.summary() == "12/12 analytic-column matches"
    verdicts = {r.axiom: r.result.analytic for r in rep.rows}
    assert {k for k, v in verdicts.items() if v} == {"N", "P", "C", "T", "D", "CS", "CEM", "ID"}


def test_table_rows_for_c_and_cem():
    c = table_inequality("C")
    assert c.lhs == conj(dia_nu(box_ni(p)), dia_nu(box_ni(q)))
    cem = table_inequality("CEM")
    assert cem.rhs == disj(tri(ALPHA, q), tri(ALPHA, neg(q)))


def _valid_on(batch, ineq):
    env = assignment_grid({v: batch.nx for v in variables(ineq)})
    memo = {}
    lhs = batch.evaluate(ineq.lhs, env, memo)
    rhs = batch.evaluate(ineq.rhs, env, memo)
    return ((lhs & ~rhs) == 0).all(axis=1)


@pytest.mark.parametrize("axiom", list(AxiomId), ids=lambda a: a.value)
def test_table_rows_agree_with_the_translation(axiom):
    """Each golden row is semantically the translation of its axiom."""
    row = table_inequality(axiom.value)
    seq_ = axiom_sequent(axiom)
    tr = translate_sequent(seq_.lhs, seq_.rhs)
    if axiom.kind == "n":
        batches = [star_batch(list(enumerate_nframes(n))) for n in (1, 2, 3)]
    else:
        batches = [star_batch(list(enumerate_cframes(n))) for n in (1, 2)]
    for b in batches:
        assert (_valid_on(b, row) == _valid_on(b, tr)).all()


def test_translated_axioms_classify_like_the_table():
    for axiom in AxiomId:
        seq_ = axiom_sequent(axiom)
        tr = translate_sequent(seq_.lhs, seq_.rhs)
        assert is_analytic_inductive(tr).analytic == AXIOM_TABLE[axiom.value][1], axiom


def test_omega_records_the_srr_dependency():
    # +∨ under +[∋] lies in the PIA part and acts as an SRR node
    lhs = dia_nu(box_ni(disj(p, q)))
    rhs = MTFormula("bot")
    res = is_analytic_inductive(Inequality(lhs, rhs))
    assert res.analytic
    assert res.omega in ((("q", "p"),), (("p", "q"),))
    assert "omega" in res.witness_text()


def test_dependency_cycle_blocks_analyticity():
    left = dia_nu(box_ni(disj(p, q)))
    right = dia_nu(box_ni(disj(neg(p), neg(q))))
    res = is_analytic_inductive(Inequality(conj(left, right), MTFormula("bot")))
    assert not res.analytic


@settings(max_examples=1000, deadline=None)
@given(hs.sampled_from([NABLA_OPS, COND_OPS]).flatmap(lambda ops: mt_formulas(S, 5, ops)),
       hs.sampled_from("+-"))
def test_sign_flip_is_an_involution(f, sign):
    t = signed_tree(f, sign)
    flipped = t.flipped()
    assert flipped.flipped() == t
    assert flipped == signed_tree(f, "-" if sign == "+" else "+")


@settings(max_examples=300, deadline=None)
@given(hs.sampled_from([NABLA_OPS, COND_OPS]).flatmap(
    lambda ops: hs.tuples(mt_formulas(S, 3, ops, ("p", "q")), mt_formulas(S, 3, ops, ("p", "q")))))
def test_analytic_implies_all_branches_good(sides):
    ineq = Inequality(*sides)
    res = is_analytic_inductive(ineq)
    if res.analytic:
        for t in (signed_tree(ineq.lhs, "+"), signed_tree(ineq.rhs, "-")):
            assert all(is_good_branch(b) for b in branches(t))
        assert set(res.epsilon) == set(variables(ineq))
        assert all(a != b for a, b in res.omega)
