"""Regenerate src/nonnormal/corpus/*.proof by building each derivation forward.

Each step names a rule and its children; the conclusion is computed by
matching the premises against the children.  The result is checked before
it is written.  Run from the repository root:

    python3 tools/build_corpus.py
"""

from __future__ import annotations

import sys
from pathlib import Path

from nonnormal.calculus import Calculus, check_proof, instantiate, match_sequent, schema
from nonnormal.structures import ProofTree
from nonnormal.correspondence import AxiomId, axiom_sequent
from nonnormal.textio import parse_formula, parse_structure, print_proof, print_st_sequent

OUT = Path(__file__).resolve().parents[1] / "src" / "nonnormal" / "corpus"


def step(rule: str, *kids: ProofTree, rev: bool = False, **extra) -> ProofTree:
    """Apply ``rule`` (read right-to-left when ``rev``) to ``kids``.

    ``extra`` binds metavariables the premises leave open; values are
    s-expressions for structures, or for formulas when the name is a
    formula metavariable.
    """
    r = schema(rule)
    prems, concl = list(r.orientations())[1 if rev else 0]
    sigma: dict = {}
    for k, v in extra.items():
        sigma[k] = parse_formula(v, kind="mt") if k in ("A", "B", "C", "alpha", "beta", "p") \
            else parse_structure(v)
    for pat, kid in zip(prems, kids):
        sigma = match_sequent(pat, kid.sequent, sigma)
        if sigma is None:
            raise ValueError(f"{rule}: premise {pat} does not match {kid.sequent}")
    return ProofTree(rule, instantiate(concl, sigma), tuple(kids))


def ident(atom: str) -> ProofTree:
    return step("Id_S", p=f"(var {atom})")


def in_box(atom: str) -> ProofTree:
    """<∈̂>[∋]p ⊢ p"""
    return step("hin_cni", step("boxni_L", ident(atom)), rev=True)


def notni_in_box(atom: str) -> ProofTree:
    """[∌⟩p ⊢ [∌̌⟩<∈̂>[∋]p"""
    return step("boxrnotni_L", in_box(atom))


def corpus() -> dict[str, tuple[ProofTree, str, list[str]]]:
    out = {}

    t = step("dianu_L", step("T", step("boxni_L", ident("p"))))
    out["T"] = (t, "dmt-nabla", ["T"])

    n = step("boxnuc_R", step("N", step("dianotni_R", step("top"))))
    out["N"] = (n, "dmt-nabla", ["N"])

    p = step("bot")
    p = step("P", step("boxni_L", p))
    p = step("gal_S_R", p)
    p = step("dianu_L", p)
    p = step("gal_S_R", p)
    p = step("neg_R", p)
    out["P"] = (p, "dmt-nabla", ["P"])

    c = step("and_R", in_box("p"), in_box("q"))
    c = step("boxnuc_R", step("C", step("dianotni_R", c)))
    for _ in range(2):
        # bring the right conjunct to formula form, then swap
        c = step("res_S_L", c)
        c = step("dianu_L", c)
        c = step("res_S_L", c, rev=True)
        c = step("E_S_L", c)
    c = step("and_L", c)
    out["C"] = (c, "dmt-nabla", ["C"])

    d = step("cont_S", in_box("p"))
    d = step("boxni_L", step("neg_L", d))
    d = step("D", d)
    d = step("dianu_L", d)
    d = step("gal_S_R", d)
    d = step("dianu_L", d)
    d = step("gal_S_R", d)
    d = step("neg_R", d)
    out["D"] = (d, "dmt-nabla", ["D"])

    def close_tri(pr: ProofTree) -> ProofTree:
        # turn the structural meet inside ▷̌ into a formula and read ▷̌ as ▷
        pr = step("cbtrir_ctri", pr, rev=True)
        pr = step("cap_L", pr)
        return step("cbtrir_ctri", pr)

    i = step("ID", notni_in_box("p"), in_box("p"))
    i = step("tri_R", close_tri(i))
    out["ID"] = (i, "dmt-cond", ["ID"])

    side = step("cnotinr_cnotnir", step("boxrnotni_L", ident("p")), rev=True)
    cs = step("CS", step("boxni_L", side), side, ident("q"))
    cs = step("and_L", step("tri_R", close_tri(cs)))
    out["CS"] = (cs, "dmt-cond", ["CS"])

    nb = notni_in_box("p")
    cem = step("CEM", nb, nb, nb, nb, ident("q"))
    # right disjunct: display it, read ¬̃q as ¬q, close ▷
    cem = step("res_S_R", cem)
    cem = step("hbtri_ctri", close_tri(cem))
    cem = step("neg_R", cem)
    cem = step("tri_R", step("hbtri_ctri", cem, rev=True))
    cem = step("res_S_R", cem, rev=True)
    # left disjunct
    cem = step("E_S_R", cem)
    cem = step("res_S_R", cem)
    cem = step("tri_R", close_tri(cem))
    cem = step("res_S_R", cem, rev=True)
    cem = step("E_S_R", cem)
    out["CEM"] = (cem, "dmt-cond", ["CEM"])
    return out


def main() -> int:
    OUT.mkdir(parents=True, exist_ok=True)
    for name, (proof, calc, ext) in corpus().items():
        res = check_proof(proof, Calculus(calc), ext)
        if not res.ok:
            print(f"{name}: {res}", file=sys.stderr)
            return 1
        header = f"# calc {calc}\n# ext {','.join(ext)}\n"
        (OUT / f"{name}.proof").write_text(header + print_proof(proof) + "\n", encoding="utf-8")
        print(f"{name}: {len(proof)} nodes, root {proof.sequent}")
    for ax in AxiomId:
        slug = {"4'": "4p"}.get(ax.value, ax.value)
        (OUT / f"axiom{slug}.st").write_text(print_st_sequent(axiom_sequent(ax)) + "\n", encoding="utf-8")
    return 0


if __name__ == "__main__":
    sys.exit(main())
