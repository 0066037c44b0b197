"""Acceptance criteria 1 to 11, one PASS/FAIL line each.

Run under pytest (the lines bypass output capture) or directly with
``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import itertools
import random
import sys
import time
from importlib.resources import files
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as hs

sys.path.insert(0, str(Path(__file__).parent))

from nonnormal.batch import assignment_grid, star_batch, supported_batch  # noqa: E402
from nonnormal.calculus import (  # noqa: E402
    COND_EXTENSIONS, NABLA_EXTENSIONS, Calculus, check_proof, extension_rule, rule_schemas,
    search_proof,
)
from nonnormal.classifier import classify_axiom_table, signed_tree  # noqa: E402
from nonnormal.correspondence import (  # noqa: E402
    AxiomId, axiom_sequent, compare_cs_variants, enumerate_cframes, enumerate_nframes, upsets,
    verify_correspondence,
)
from nonnormal.semantics import (  # noqa: E402
    converse, is_supported, rel_box, rel_boxr, rel_dia, rel_diar, star, tern_btri, tern_btrir,
    tern_tri, unstar, valid,
)
from nonnormal.soundness import extension_rule_sound, root_validity, rule_sound  # noqa: E402
from nonnormal.structures import fml, seq  # noqa: E402
from nonnormal.syntax import N, S, box_ni, box_nuc, dia_notni, dia_nu, var, variables  # noqa: E402
from nonnormal.textio import (  # noqa: E402
    parse_formula, parse_proof, parse_structure, print_formula, print_structure,
)
from nonnormal.translation import translate_sequent  # noqa: E402

from gen import COND_ALL, NABLA_ALL, NABLA_OPS, COND_OPS, mt_formulas, structures  # noqa: E402

CORPUS = files("nonnormal") / "corpus"
N_AXIOMS = [a for a in AxiomId if a.kind == "n"]
C_AXIOMS = [a for a in AxiomId if a.kind == "c"]
CORPUS_LABELS = {"N": "dmt-nabla", "P": "dmt-nabla", "T": "dmt-nabla", "C": "dmt-nabla",
                 "D": "dmt-nabla", "ID": "dmt-cond", "CS": "dmt-cond", "CEM": "dmt-cond"}


def _frames(kind):
    if kind == "n":
        return {n: list(enumerate_nframes(n)) for n in (1, 2, 3)}
    return {n: list(enumerate_cframes(n)) for n in (1, 2)}


# ---------------------------------------------------------------- criteria


def criterion_1():
    t0 = time.time()
    bad, counts = {}, set()
    for a in N_AXIOMS:
        rep = verify_correspondence(a, 3, min_size=1)
        counts.add(tuple(sorted(rep.per_size.items())))
        if not rep.ok:
            bad[a.value] = len(rep.mismatches)
    secs = time.time() - t0
    ok = not bad and counts == {((1, 3), (2, 36), (3, 8000))} and secs < 300
    return ok, (f"9 axioms x 8039 n-frames (3+36+8000), mismatches {bad or 0}, "
                f"{secs:.1f}s")


def criterion_2():
    bad = {}
    for a in (AxiomId.CEM, AxiomId.ID):
        rep = verify_correspondence(a, 2, min_size=1)
        if not rep.ok or rep.frames_checked != 65540:
            bad[a.value] = len(rep.mismatches)
    cs = compare_cs_variants(2, 1)
    ok = not bad and cs.frames_checked == 65540 and bool(cs.matching_variants)
    return ok, (f"CEM and ID on 4+65536 c-frames, mismatches {bad or 0}; CS: theorem-row "
                f"condition {cs.theorem_mismatches} mismatches, guarded condition "
                f"{cs.guarded_mismatches}; matching variant(s): {', '.join(cs.matching_variants) or 'none'}")


def _brute_upsets(n):
    out = 0
    for fam in range(1 << (1 << n)):
        ds = [d for d in range(1 << n) if fam >> d & 1]
        out += all(fam >> e & 1 for d in ds for e in range(1 << n) if d & e == d)
    return out


def criterion_3():
    per_world = [len(upsets(n)) for n in (1, 2, 3)]
    oracle = [_brute_upsets(n) for n in (1, 2, 3)]
    nframes = [sum(1 for _ in enumerate_nframes(n)) for n in (1, 2, 3)]
    c1 = len(set(enumerate_cframes(1)))
    c2 = len({F.f for F in enumerate_cframes(2)})
    ok = (per_world == oracle == [3, 6, 20] and nframes == [3, 36, 8000]
          and (c1, c2) == (4, 65536))
    return ok, (f"up-sets per world {per_world} (filter oracle {oracle}), n-frames {nframes}, "
                f"c-frames {c1}/{c2}")


def _valid_batch(batch, ineq):
    env = assignment_grid({v: batch.nx for v in variables(ineq)})
    memo = {}
    lhs = batch.evaluate(ineq.lhs, env, memo)
    rhs = batch.evaluate(ineq.rhs, env, memo)
    return ((lhs & ~rhs) == 0).all(axis=1)


def criterion_4():
    checked = exceptions = 0
    for kind, axioms in (("n", N_AXIOMS), ("c", C_AXIOMS)):
        by_size = _frames(kind)
        for a in axioms:
            q = axiom_sequent(a)
            tr = translate_sequent(q.lhs, q.rhs)
            for frames in by_size.values():
                single = np.array([valid(F, q) for F in frames])
                two = _valid_batch(star_batch(frames), tr)
                exceptions += int((single != two).sum())
                checked += len(frames)
    return exceptions == 0, f"{checked} (axiom, frame) pairs, {exceptions} exceptions"


def criterion_5():
    n_frames = [F for fs in _frames("n").values() for F in fs]
    c_frames = [F for fs in _frames("c").values() for F in fs]
    bad_rt = sum(unstar(star(F)) != F for F in n_frames + c_frames)
    bad_sup = sum(not is_supported(star(F)) for F in n_frames)
    ok = bad_rt == 0 and bad_sup == 0
    return ok, (f"round trip on {len(n_frames)} n-frames and {len(c_frames)} c-frames, "
                f"{bad_rt} failures; star images not supported: {bad_sup}")


def criterion_6():
    p = var("p")
    left, right = dia_nu(box_ni(p)), box_nuc(dia_notni(p))
    frames = differ = 0
    for nx in range(1, 3):
        for ny in range(1, 4):
            b = supported_batch(nx, ny)
            env = assignment_grid({"p": nx})
            differ += int((b.evaluate(left, env) != b.evaluate(right, env)).sum())
            frames += len(b)
    return differ == 0, f"{frames} supported frames (|X|<=2, |Y|<=3), all valuations, {differ} differences"


def _subsets(xs):
    xs = list(xs)
    return [frozenset(c) for k in range(len(xs) + 1) for c in itertools.combinations(xs, k)]


def _binary_ok(ns, nt):
    S_, T_ = range(ns), range(nt)
    subS, subT = _subsets(S_), _subsets(T_)
    pairs = list(itertools.product(S_, T_))
    for bits in range(1 << len(pairs)):
        R = {pr for i, pr in enumerate(pairs) if bits >> i & 1}
        Rc = converse(R)
        for Tp in subT:
            dia, box = rel_dia(R, Tp, S_, T_), rel_box(R, Tp, S_, T_)
            boxr, diar = rel_boxr(R, Tp, S_, T_), rel_diar(R, Tp, S_, T_)
            for Sp in subS:
                if (dia <= Sp) != (Tp <= rel_box(Rc, Sp, T_, S_)):
                    return False
                if (Sp <= box) != (rel_dia(Rc, Sp, T_, S_) <= Tp):
                    return False
                if (Sp <= boxr) != (Tp <= rel_boxr(Rc, Sp, T_, S_)):
                    return False
                if (diar <= Sp) != (rel_diar(Rc, Sp, T_, S_) <= Tp):
                    return False
    return True


def _ternary_ok(R, S_, T_, U_):
    subs = [_subsets(S_), _subsets(T_), _subsets(U_)]
    for Sp, Tp, Up in itertools.product(*subs):
        a = Sp <= tern_tri(R, Tp, Up, S_, T_, U_)
        b = tern_btri(R, Tp, Sp, S_, T_, U_) <= Up
        c = Tp <= tern_btrir(R, Sp, Up, S_, T_, U_)
        if not a == b == c:
            return False
    return True


def criterion_7():
    binary = all(_binary_ok(a, b) for a in range(1, 4) for b in range(1, 4))
    ternary_exhaustive = 0
    ok = binary
    for shape in itertools.product(range(1, 4), repeat=3):
        if shape[0] * shape[1] * shape[2] > 9:
            continue
        S_, T_, U_ = (range(k) for k in shape)
        triples = list(itertools.product(S_, T_, U_))
        for bits in range(1 << len(triples)):
            ok = ok and _ternary_ok({t for i, t in enumerate(triples) if bits >> i & 1}, S_, T_, U_)
            ternary_exhaustive += 1
    rng = random.Random(2024)
    cube = list(itertools.product(range(3), repeat=3))
    sampled = 200
    for _ in range(sampled):
        R = {t for t in cube if rng.random() < rng.choice((0.1, 0.3, 0.6))}
        ok = ok and _ternary_ok(R, range(3), range(3), range(3))
    return ok, (f"binary laws exhaustive for all relations on carriers 1..3; ternary laws "
                f"exhaustive over {ternary_exhaustive} relations with |S||T||U|<=9 and "
                f"{sampled} sampled relations on 3x3x3 (every subset triple each time)")


def criterion_8():
    rep = classify_axiom_table()
    wrong = [r.axiom for r in rep.rows if not r.matches]
    return rep.ok and len(rep.rows) == 12, f"{rep.summary()}{'; wrong ' + str(wrong) if wrong else ''}"


def criterion_9():
    problems, parts = [], []
    for name, calc in CORPUS_LABELS.items():
        pt = parse_proof((CORPUS / f"{name}.proof").read_text(encoding="utf-8"))
        res = check_proof(pt, calc, [name])
        if not res.ok:
            problems.append(f"{name} check: {res}")
        rep = root_validity(pt.sequent, AxiomId(name), max_x=2, max_y=3)
        if not rep.ok or rep.condition_frames == 0:
            problems.append(rep.summary())
        parts.append(f"{name} {len(pt)} nodes/{rep.condition_frames} frames")
    return not problems, ("8 proofs check; roots valid on condition frames: " + ", ".join(parts)
                          if not problems else "; ".join(problems))


def criterion_10():
    bad, n_rules = [], 0
    for calc, kind in ((Calculus.NABLA, "n"), (Calculus.COND, "c")):
        for r in rule_schemas(calc):
            rep = rule_sound(r, 2, 3, kind=kind)
            n_rules += 1
            if not rep.ok:
                bad.append(f"{calc.value}/{r.name}")
    ext = []
    for a in NABLA_EXTENSIONS + COND_EXTENSIONS:
        rep = extension_rule_sound(extension_rule(a), a, max_world=2)
        ext.append(f"{a.value}:{rep.frames_checked}")
        if not rep.ok or rep.frames_checked == 0:
            bad.append(rep.summary())
    return not bad, (f"{n_rules} base rule entries over |X|<=2, |Y|<=3 and 8 extension rules over "
                     f"star images ({' '.join(ext)}), violations in {bad or 'none'}")


def criterion_11():
    counts = {"formulas": 0, "structures": 0, "searches": 0, "proofs": 0, "flips": 0}

    @settings(max_examples=1000, deadline=None, database=None)
    @given(hs.sampled_from([S, N]).flatmap(
        lambda s: hs.sampled_from([NABLA_ALL, COND_ALL]).flatmap(lambda ops: mt_formulas(s, 5, ops))))
    def formulas(f):
        assert parse_formula(print_formula(f), kind="mt") == f
        counts["formulas"] += 1

    @settings(max_examples=1000, deadline=None, database=None)
    @given(hs.sampled_from([S, N]).flatmap(lambda s: structures(s, 4)))
    def structs(s):
        assert parse_structure(print_structure(s)) == s
        counts["structures"] += 1

    @settings(max_examples=200, deadline=None, database=None,
              suppress_health_check=[HealthCheck.too_slow])
    @given(mt_formulas(S, 2, NABLA_OPS, ("p", "q")), mt_formulas(S, 2, NABLA_OPS, ("p", "q")),
           hs.sets(hs.sampled_from(NABLA_EXTENSIONS), max_size=2), hs.booleans())
    def searches(a, b, exts, same):
        goal = seq(fml(a), fml(a if same else b))
        found = search_proof(goal, 5, Calculus.NABLA, exts, max_nodes=20_000)
        counts["searches"] += 1
        if found is not None:
            counts["proofs"] += 1
            assert found.sequent == goal and check_proof(found, Calculus.NABLA, exts).ok

    @settings(max_examples=1000, deadline=None, database=None)
    @given(hs.sampled_from([NABLA_OPS, COND_OPS]).flatmap(lambda ops: mt_formulas(S, 5, ops)),
           hs.sampled_from("+-"))
    def flips(f, sign):
        t = signed_tree(f, sign)
        assert t.flipped().flipped() == t
        counts["flips"] += 1

    try:
        for prop in (formulas, structs, searches, flips):
            prop()
    except AssertionError as err:
        return False, f"property failed: {err!r}; counts so far {counts}"
    ok = counts["formulas"] >= 1000 and counts["structures"] >= 1000 and counts["flips"] >= 1000
    return ok, (f"round trip {counts['formulas']} formulas and {counts['structures']} structures; "
                f"{counts['proofs']} of {counts['searches']} searches found proofs, all re-check; "
                f"{counts['flips']} sign-flip involutions")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11]


def _line(k: int, ok: bool, detail: str) -> str:
    return f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail}"


@pytest.mark.slow
@pytest.mark.parametrize("k", range(1, len(CRITERIA) + 1))
def test_acceptance_criterion(k, capsys):
    ok, detail = CRITERIA[k - 1]()
    with capsys.disabled():
        print("\n" + _line(k, ok, detail), flush=True)
    assert ok, detail


if __name__ == "__main__":
    failures = 0
    for k, crit in enumerate(CRITERIA, 1):
        ok, detail = crit()
        failures += not ok
        print(_line(k, ok, detail), flush=True)
    sys.exit(1 if failures else 0)
