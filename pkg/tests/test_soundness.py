from importlib.resources import files

import pytest

from nonnormal.batch import relation_space
from nonnormal.calculus import Calculus, extension_rule, rule_schemas, schema
from nonnormal.correspondence import AxiomId, enumerate_two_sorted
from nonnormal.soundness import (
    PRECEDENT, SUCCEDENT, InterpretationError, extension_rule_sound, interpret_sequent,
    interpret_structure, root_validity, rule_sound, rule_sound_reference,
)
from nonnormal.structures import fml, seq, smeta, st
from nonnormal.syntax import Inequality, MTFormula, box_ni, conj, dia_nu, var
from nonnormal.textio import parse_proof

CORPUS = files("nonnormal") / "corpus"
p, q = var("p"), var("q")


def _m(name, sort="S"):
    return MTFormula("meta", name=name, meta_sort=sort)


def test_interpretation_examples():
    a = fml(box_ni(p))
    assert interpret_structure(st("hnu", a), PRECEDENT) == dia_nu(box_ni(p))
    assert interpret_structure(st("hwedge", fml(p), fml(q)), PRECEDENT) == conj(p, q)
    assert interpret_structure(st("cni", fml(p)), SUCCEDENT) == box_ni(p)
    assert interpret_sequent(seq(smeta("X"), smeta("Y"))) == Inequality(_m("X"), _m("Y"))


def test_structures_out_of_position_are_refused():
    with pytest.raises(InterpretationError):
        interpret_structure(st("cni", fml(p)), PRECEDENT)
    with pytest.raises(InterpretationError):
        interpret_structure(st("hwedge", fml(p), fml(q)), SUCCEDENT)


def test_identity_and_residuation_are_sound():
    for name in ("Id_S", "res_S_L", "res_S_R"):
        rep = rule_sound(schema(name), 2, 3)
        assert rep.ok and rep.frames_checked > 0, rep.summary()


def test_extension_rule_t_is_sound_on_condition_frames():
    rep = extension_rule_sound(extension_rule(AxiomId.T), AxiomId.T)
    assert rep.ok and rep.frames_checked == 11


@pytest.mark.parametrize("calc,kind", [(Calculus.NABLA, "n"), (Calculus.COND, "c")])
def test_batch_counts_equal_reference_counts(calc, kind):
    frames = list(enumerate_two_sorted(1, 2, kind=kind))
    for r in rule_schemas(calc):
        if r.name.startswith("Cut"):
            continue
        got = rule_sound(r, frames=frames).violation_count
        assert got == rule_sound_reference(r, frames), r.name


@pytest.mark.parametrize("axiom", [AxiomId.T, AxiomId.P, AxiomId.D, AxiomId.N, AxiomId.C])
def test_extension_rules_fail_without_the_condition(axiom):
    """Non-vacuity: on arbitrary frames the extension rules are refuted, and
    the fast count agrees with the single-frame count."""
    frames = list(enumerate_two_sorted(1, 2))
    rule = extension_rule(axiom)
    rep = rule_sound(rule, frames=frames)
    assert rep.violation_count > 0
    assert rep.violation_count == rule_sound_reference(rule, frames)
    assert rep.violations and rep.violations[0].frame in frames


def test_conditional_extension_rule_fails_on_arbitrary_frames():
    batch = relation_space("c", 1, 2, ["ni", "notni", "tf"])
    rep = rule_sound(extension_rule(AxiomId.ID), frames=batch)
    assert not rep.ok


@pytest.mark.parametrize("name,axiom", [("T", AxiomId.T), ("P", AxiomId.P)])
def test_corpus_roots_hold_on_condition_frames(name, axiom):
    root = parse_proof((CORPUS / f"{name}.proof").read_text(encoding="utf-8")).sequent
    rep = root_validity(root, axiom, max_x=2, max_y=2)
    assert rep.ok and rep.condition_frames > 0, rep.summary()


def test_root_refuted_under_the_wrong_condition():
    root = parse_proof((CORPUS / "T.proof").read_text(encoding="utf-8")).sequent
    rep = root_validity(root, AxiomId.N, max_x=2, max_y=2)
    assert not rep.ok and rep.example is not None
