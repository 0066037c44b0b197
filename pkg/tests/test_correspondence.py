import pytest

from nonnormal.correspondence import (
    AxiomId, axiom_formula, axiom_sequent, compare_cs_variants, enumerate_cframes,
    enumerate_nframes, enumerate_two_sorted, fo_condition, upsets, verify_correspondence,
)
from nonnormal.semantics import CFrame, NFrame, is_supported, valid
from nonnormal.syntax import st_var, nabla, st_imp, st_or, cond, st_neg, show


def _brute_upsets(n):
    """Filter every family of subsets for upward closure."""
    subsets = range(1 << n)
    out = []
    for fam in range(1 << (1 << n)):
        members = [d for d in subsets if fam >> d & 1]
        if all(fam >> e & 1 for d in members for e in subsets if d & e == d):
            out.append(fam)
    return out


@pytest.mark.parametrize("n,count", [(1, 3), (2, 6), (3, 20)])
def test_upset_counts_match_filter_oracle(n, count):
    assert upsets(n) == _brute_upsets(n)
    assert len(upsets(n)) == count


@pytest.mark.parametrize("n,count", [(1, 3), (2, 36), (3, 8000)])
def test_nframe_enumeration(n, count):
    frames = list(enumerate_nframes(n))
    assert len(frames) == count == len(set(frames))


@pytest.mark.parametrize("n,count", [(0, 1), (1, 4)])
def test_cframe_enumeration_small(n, count):
    frames = list(enumerate_cframes(n))
    assert len(frames) == count == len(set(frames))


def test_cframe_enumeration_two_worlds():
    seen = {F.f for F in enumerate_cframes(2)}
    assert len(seen) == 4 ** 8


def test_two_sorted_enumeration():
    everything = list(enumerate_two_sorted(1, 1))
    assert len(everything) == 16
    supported = set(enumerate_two_sorted(1, 1, supported_only=True))
    assert supported == {K for K in everything if is_supported(K)}
    empty = list(enumerate_two_sorted(0, 1, supported_only=True))
    assert len(empty) == 1 and is_supported(empty[0])


@pytest.mark.parametrize("nx,ny", [(1, 2), (2, 1), (2, 2)])
def test_supported_enumeration_matches_filter(nx, ny):
    fast = set(enumerate_two_sorted(nx, ny, supported_only=True))
    slow = {K for K in enumerate_two_sorted(nx, ny) if is_supported(K)}
    assert fast == slow


def test_axiom_formulas():
    p, q = st_var("p"), st_var("q")
    assert axiom_formula(AxiomId.T) == st_imp(nabla(p), p)
    assert axiom_formula(AxiomId.CEM) == st_or(cond(p, q), cond(p, st_neg(q)))
    assert axiom_formula(AxiomId.ID) == cond(p, p)


def test_axiom_sequent_of_t():
    q = axiom_sequent(AxiomId.T)
    assert (show(q.lhs), show(q.rhs)) == ("∇p", "p")


def test_condition_examples():
    F1 = NFrame(1, (0b10,))
    assert fo_condition(AxiomId.T, F1)
    assert not fo_condition(AxiomId.P, NFrame(1, (0b11,)))
    assert fo_condition(AxiomId.ID, CFrame(1, ((0, 1),)))


def test_condition_kind_mismatch():
    with pytest.raises(Exception):
        fo_condition(AxiomId.ID, NFrame(1, (0b10,)))


@pytest.mark.parametrize("axiom,size,count", [(AxiomId.T, 2, 36), (AxiomId.ID, 1, 4),
                                              (AxiomId.C, 3, 8000)])
def test_verify_examples(axiom, size, count):
    rep = verify_correspondence(axiom, size)
    assert rep.frames_checked == count and rep.ok


@pytest.mark.parametrize("axiom", [a for a in AxiomId if a.kind == "n"])
def test_neighbourhood_rows_up_to_two_worlds(axiom):
    rep = verify_correspondence(axiom, 2, min_size=1)
    assert rep.frames_checked == 39 and rep.ok, rep.mismatches[:1]


def test_wrong_condition_is_detected():
    """Pairing an axiom with another row's condition must produce mismatches."""
    bad = 0
    for F in enumerate_nframes(2):
        bad += valid(F, axiom_formula(AxiomId.T)) != fo_condition(AxiomId.D, F)
    assert bad > 0


def test_cs_variants_on_one_world():
    cmp = compare_cs_variants(1)
    assert cmp.frames_checked == 4
    assert "guarded" in cmp.matching_variants
