"""Rule schemas of the two display calculi, schema matching, proof checking
and bounded backward proof search.

Schemas are written in the s-expression syntax of :mod:`nonnormal.textio`
with ``?NAME`` metavariables.  Structure metavariables are X, Y, Z, W
(sort S) and Gamma, Delta, Sigma, Pi, Theta (sort N).  Formula
metavariables are A, B (sort S) and alpha, beta (sort N).  ``?p`` matches
propositional variables only.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

from .correspondence import AxiomId
from .structures import ProofTree, Sequent, Structure, sequent_well_sorted
from .syntax import MTFormula


class Calculus(enum.Enum):
    NABLA = "dmt-nabla"
    COND = "dmt-cond"

    @classmethod
    def parse(cls, text: str) -> "Calculus":
        for c in cls:
            if text.lower() in (c.value, c.name.lower()):
                return c
        raise ValueError(f"unknown calculus {text!r}; expected dmt-nabla or dmt-cond")


class UnsupportedExtension(ValueError):
    """The requested axiom has no analytic structural rule in this calculus."""


@dataclass(frozen=True)
class RuleSchema:
    name: str
    premises: tuple[Sequent, ...]
    conclusion: Sequent
    bidirectional: bool = False
    group: str = "base"

    def orientations(self) -> Iterator[tuple[tuple[Sequent, ...], Sequent]]:
        """(premises, conclusion) pairs; double-line rules read both ways."""
        yield self.premises, self.conclusion
        if self.bidirectional:
            yield (self.conclusion,), self.premises[0]

    def __str__(self) -> str:
        line = "════" if self.bidirectional else "────"
        prem = "    ".join(str(p) for p in self.premises) or "(axiom)"
        return f"{self.name}: {prem}  {line}  {self.conclusion}"


# ---------------------------------------------------------------- rule table
# name, premises, conclusion, bidirectional

_S_BASE = [
    ("Id_S", [], "(seq (fml ?p) (fml ?p))", False),
    ("Cut_S", ["(seq ?X (fml ?A))", "(seq (fml ?A) ?Y)"], "(seq ?X ?Y)", False),
    ("bot", [], "(seq (fml bot) cbot)", False),
    ("top", [], "(seq htop (fml top))", False),
    ("res_S_L", ["(seq (hwedge ?X ?Y) ?Z)"], "(seq ?Y (cvee (tneg ?X) ?Z))", True),
    ("res_S_R", ["(seq ?X (cvee ?Y ?Z))"], "(seq (hwedge (tneg ?Y) ?X) ?Z)", True),
    ("gal_S_L", ["(seq (tneg ?X) ?Y)"], "(seq (tneg ?Y) ?X)", True),
    ("gal_S_R", ["(seq ?X (tneg ?Y))"], "(seq ?Y (tneg ?X))", True),
    ("cont_S", ["(seq ?X ?Y)"], "(seq (tneg ?Y) (tneg ?X))", True),
    ("htop", ["(seq ?X ?Y)"], "(seq (hwedge ?X htop) ?Y)", True),
    ("cbot", ["(seq ?X ?Y)"], "(seq ?X (cvee ?Y cbot))", True),
    ("W_S_L", ["(seq ?X ?Y)"], "(seq (hwedge ?X ?Z) ?Y)", False),
    ("W_S_R", ["(seq ?X ?Y)"], "(seq ?X (cvee ?Y ?Z))", False),
    ("C_S_L", ["(seq (hwedge ?X ?X) ?Y)"], "(seq ?X ?Y)", False),
    ("C_S_R", ["(seq ?X (cvee ?Y ?Y))"], "(seq ?X ?Y)", False),
    ("E_S_L", ["(seq (hwedge ?Y ?X) ?Z)"], "(seq (hwedge ?X ?Y) ?Z)", False),
    ("E_S_R", ["(seq ?Z (cvee ?Y ?X))"], "(seq ?Z (cvee ?X ?Y))", False),
    ("A_S_L", ["(seq (hwedge ?X (hwedge ?Y ?Z)) ?W)"], "(seq (hwedge (hwedge ?X ?Y) ?Z) ?W)", True),
    ("A_S_R", ["(seq ?W (cvee ?X (cvee ?Y ?Z)))"], "(seq ?W (cvee (cvee ?X ?Y) ?Z))", True),
    ("and_L", ["(seq (hwedge (fml ?A) (fml ?B)) ?X)"], "(seq (fml (and ?A ?B)) ?X)", False),
    ("and_R", ["(seq ?X (fml ?A))", "(seq ?Y (fml ?B))"], "(seq (hwedge ?X ?Y) (fml (and ?A ?B)))", False),
    ("neg_L", ["(seq (tneg (fml ?A)) ?X)"], "(seq (fml (neg ?A)) ?X)", False),
    ("neg_R", ["(seq ?X (tneg (fml ?A)))"], "(seq ?X (fml (neg ?A)))", False),
]

_N_BASE = [
    ("Cut_N", ["(seq ?Gamma (fml ?alpha))", "(seq (fml ?alpha) ?Delta)"], "(seq ?Gamma ?Delta)", False),
    ("res_N_L", ["(seq (hcap ?Gamma ?Delta) ?Sigma)"], "(seq ?Delta (ccup (tsim ?Gamma) ?Sigma))", True),
    ("res_N_R", ["(seq ?Gamma (ccup ?Delta ?Sigma))"], "(seq (hcap (tsim ?Delta) ?Gamma) ?Sigma)", True),
    ("gal_N_L", ["(seq (tsim ?Gamma) ?Delta)"], "(seq (tsim ?Delta) ?Gamma)", True),
    ("gal_N_R", ["(seq ?Gamma (tsim ?Delta))"], "(seq ?Delta (tsim ?Gamma))", True),
    ("cont_N", ["(seq ?Gamma ?Delta)"], "(seq (tsim ?Delta) (tsim ?Gamma))", True),
    ("hone", ["(seq ?Gamma ?Delta)"], "(seq (hcap ?Gamma hone) ?Delta)", True),
    ("czero", ["(seq ?Gamma ?Delta)"], "(seq ?Gamma (ccup ?Delta czero))", True),
    ("W_N_L", ["(seq ?Gamma ?Delta)"], "(seq (hcap ?Gamma ?Sigma) ?Delta)", False),
    ("W_N_R", ["(seq ?Gamma ?Delta)"], "(seq ?Gamma (ccup ?Delta ?Sigma))", False),
    ("C_N_L", ["(seq (hcap ?Gamma ?Gamma) ?Delta)"], "(seq ?Gamma ?Delta)", False),
    ("C_N_R", ["(seq ?Gamma (ccup ?Delta ?Delta))"], "(seq ?Gamma ?Delta)", False),
    ("E_N_L", ["(seq (hcap ?Delta ?Gamma) ?Sigma)"], "(seq (hcap ?Gamma ?Delta) ?Sigma)", False),
    ("E_N_R", ["(seq ?Sigma (ccup ?Delta ?Gamma))"], "(seq ?Sigma (ccup ?Gamma ?Delta))", False),
    ("A_N_L", ["(seq (hcap ?Gamma (hcap ?Delta ?Sigma)) ?Pi)"], "(seq (hcap (hcap ?Gamma ?Delta) ?Sigma) ?Pi)", True),
    ("A_N_R", ["(seq ?Pi (ccup ?Gamma (ccup ?Delta ?Sigma)))"], "(seq ?Pi (ccup (ccup ?Gamma ?Delta) ?Sigma))", True),
]

_BOX_NI = [
    ("hin_cni", ["(seq (hin ?Gamma) ?X)"], "(seq ?Gamma (cni ?X))", True),
    ("boxni_L", ["(seq (fml ?A) ?X)"], "(seq (fml (box-ni ?A)) (cni ?X))", False),
    ("boxni_R", ["(seq ?Gamma (cni (fml ?A)))"], "(seq ?Gamma (fml (box-ni ?A)))", False),
]

_NABLA = [
    ("hnu_cnuadj", ["(seq (hnu ?Gamma) ?X)"], "(seq ?Gamma (cnu-adj ?X))", True),
    ("hnucadj_cnuc", ["(seq (hnuc-adj ?X) ?Gamma)"], "(seq ?X (cnuc ?Gamma))", True),
    ("hnotni_cnotin", ["(seq (hnotni ?X) ?Gamma)"], "(seq ?X (cnotin ?Gamma))", True),
    ("dianu_L", ["(seq (hnu (fml ?alpha)) ?X)"], "(seq (fml (dia-nu ?alpha)) ?X)", False),
    ("dianu_R", ["(seq ?Gamma (fml ?alpha))"], "(seq (hnu ?Gamma) (fml (dia-nu ?alpha)))", False),
    ("boxnuc_L", ["(seq (fml ?alpha) ?Gamma)"], "(seq (fml (box-nuc ?alpha)) (cnuc ?Gamma))", False),
    ("boxnuc_R", ["(seq ?X (cnuc (fml ?alpha)))"], "(seq ?X (fml (box-nuc ?alpha)))", False),
    ("dianotni_L", ["(seq (hnotni (fml ?A)) ?Gamma)"], "(seq (fml (dia-notni ?A)) ?Gamma)", False),
    ("dianotni_R", ["(seq ?X (fml ?A))"], "(seq (hnotni ?X) (fml (dia-notni ?A)))", False),
]

_COND = [
    ("hbtri_ctri", ["(seq ?X (ctri ?Gamma ?Y))"], "(seq (hblacktri ?Gamma ?X) ?Y)", True),
    ("cbtrir_ctri", ["(seq ?Gamma (cblacktrir ?X ?Y))"], "(seq ?X (ctri ?Gamma ?Y))", True),
    ("cnotinr_cnotnir", ["(seq ?X (cnotinr ?Gamma))"], "(seq ?Gamma (cnotnir ?X))", True),
    ("tri_L", ["(seq ?Gamma (fml ?alpha))", "(seq (fml ?A) ?X)"], "(seq (fml (tri ?alpha ?A)) (ctri ?Gamma ?X))", False),
    ("tri_R", ["(seq ?X (ctri (fml ?alpha) (fml ?A)))"], "(seq ?X (fml (tri ?alpha ?A)))", False),
    ("boxrnotni_L", ["(seq ?X (fml ?A))"], "(seq (fml (boxr-notni ?A)) (cnotnir ?X))", False),
    ("boxrnotni_R", ["(seq ?Gamma (cnotnir (fml ?A)))"], "(seq ?Gamma (fml (boxr-notni ?A)))", False),
    ("cap_L", ["(seq (hcap (fml ?alpha) (fml ?beta)) ?Gamma)"], "(seq (fml (cap ?alpha ?beta)) ?Gamma)", False),
    ("cap_R", ["(seq ?Gamma (fml ?alpha))", "(seq ?Delta (fml ?beta))"], "(seq (hcap ?Gamma ?Delta) (fml (cap ?alpha ?beta)))", False),
]

_EXTENSIONS = {
    AxiomId.N: (["(seq (hnotni htop) ?Gamma)"], "(seq htop (cnuc ?Gamma))"),
    AxiomId.P: (["(seq ?Gamma (cni cbot))"], "(seq htop (tneg (hnu ?Gamma)))"),
    AxiomId.C: (["(seq (hnotni (hwedge (hin ?Gamma) (hin ?Delta))) ?Theta)"],
                "(seq (hwedge (hnu ?Gamma) (hnu ?Delta)) (cnuc ?Theta))"),
    AxiomId.T: (["(seq ?Gamma (cni ?X))"], "(seq (hnu ?Gamma) ?X)"),
    AxiomId.D: (["(seq ?Gamma (cni (tneg (hin ?Delta))))"], "(seq (hnu ?Delta) (tneg (hnu ?Gamma)))"),
    AxiomId.ID: (["(seq ?Delta (cnotnir (hin ?Gamma)))", "(seq (hin ?Gamma) ?X)"],
                 "(seq htop (ctri (hcap ?Gamma ?Delta) ?X))"),
    AxiomId.CS: (["(seq ?Gamma (cni (cnotinr ?Delta)))", "(seq ?X (cnotinr ?Delta))", "(seq ?Y ?Z)"],
                 "(seq (hwedge ?X ?Y) (ctri (hcap ?Gamma ?Delta) ?Z))"),
    AxiomId.CEM: (["(seq ?Pi (cnotnir (hin ?Gamma)))", "(seq ?Pi (cnotnir (hin ?Theta)))",
                   "(seq ?Delta (cnotnir (hin ?Gamma)))", "(seq ?Delta (cnotnir (hin ?Theta)))",
                   "(seq ?Y ?X)"],
                  "(seq htop (cvee (ctri (hcap ?Gamma ?Delta) ?X) (ctri (hcap ?Theta ?Pi) (tneg ?Y))))"),
}

NABLA_EXTENSIONS = (AxiomId.N, AxiomId.P, AxiomId.C, AxiomId.T, AxiomId.D)
COND_EXTENSIONS = (AxiomId.ID, AxiomId.CS, AxiomId.CEM)


def _build(rows, group) -> list[RuleSchema]:
    from .textio import parse_sequent
    out = []
    for name, prems, concl, bidi in rows:
        out.append(RuleSchema(name, tuple(parse_sequent(p, allow_meta=True) for p in prems),
                              parse_sequent(concl, allow_meta=True), bidi, group))
    return out


@lru_cache(maxsize=None)
def _groups() -> dict[str, tuple[RuleSchema, ...]]:
    from .textio import parse_sequent
    groups = {
        "s-base": _build(_S_BASE, "base"),
        "n-base": _build(_N_BASE, "base"),
        "box-ni": _build(_BOX_NI, "multi"),
        "nabla": _build(_NABLA, "multi"),
        "cond": _build(_COND, "multi"),
    }
    for ax, (prems, concl) in _EXTENSIONS.items():
        groups[f"ext-{ax.value}"] = [RuleSchema(
            ax.value, tuple(parse_sequent(p, allow_meta=True) for p in prems),
            parse_sequent(concl, allow_meta=True), False, "extension")]
    return {k: tuple(v) for k, v in groups.items()}


def _as_axioms(extensions: Iterable) -> list[AxiomId]:
    out = []
    for e in extensions:
        out.append(e if isinstance(e, AxiomId) else AxiomId.parse(str(e)))
    return out


def rule_schemas(calc: Calculus | str, extensions: Iterable = ()) -> list[RuleSchema]:
    """Every rule of the calculus plus one structural rule per extension."""
    calc = calc if isinstance(calc, Calculus) else Calculus.parse(calc)
    g = _groups()
    rules = list(g["s-base"] + g["n-base"] + g["box-ni"])
    allowed = NABLA_EXTENSIONS if calc is Calculus.NABLA else COND_EXTENSIONS
    rules += g["nabla"] if calc is Calculus.NABLA else g["cond"]
    for ax in _as_axioms(extensions):
        if ax not in allowed:
            raise UnsupportedExtension(
                f"axiom {ax.value} has no analytic rule in {calc.value}; "
                f"available: {', '.join(a.value for a in allowed)}")
        rules += g[f"ext-{ax.value}"]
    return rules


def schema(name: str) -> RuleSchema:
    for rules in _groups().values():
        for r in rules:
            if r.name == name:
                return r
    raise KeyError(name)


@lru_cache(maxsize=None)
def all_rule_arities() -> dict[str, int]:
    return {r.name: len(r.premises) for rules in _groups().values() for r in rules}


def base_rules(calc: Calculus | str) -> list[RuleSchema]:
    return rule_schemas(calc, ())


def extension_rule(ax: AxiomId) -> RuleSchema:
    return _groups()[f"ext-{ax.value}"][0]


# ---------------------------------------------------------------- matching

Subst = dict


def match_formula(pat: MTFormula, f: MTFormula, sigma: Subst) -> Subst | None:
    if pat.op == "meta":
        if pat.atomic and f.op != "var":
            return None
        if f.sort != pat.sort:
            return None
        bound = sigma.get(pat.name)
        if bound is None:
            out = dict(sigma)
            out[pat.name] = f
            return out
        return sigma if bound == f else None
    if pat.op != f.op or pat.name != f.name or len(pat.args) != len(f.args):
        return None
    for a, b in zip(pat.args, f.args):
        sigma = match_formula(a, b, sigma)
        if sigma is None:
            return None
    return sigma


def match_structure(pat: Structure, s: Structure, sigma: Subst) -> Subst | None:
    if pat.op == "meta":
        if s.sort != pat.sort:
            return None
        bound = sigma.get(pat.name)
        if bound is None:
            out = dict(sigma)
            out[pat.name] = s
            return out
        return sigma if bound == s else None
    if pat.op != s.op:
        return None
    if pat.op == "fml":
        return match_formula(pat.formula, s.formula, sigma)
    for a, b in zip(pat.args, s.args):
        sigma = match_structure(a, b, sigma)
        if sigma is None:
            return None
    return sigma


def match_sequent(pat: Sequent, q: Sequent, sigma: Subst | None = None) -> Subst | None:
    sigma = match_structure(pat.lhs, q.lhs, {} if sigma is None else sigma)
    if sigma is None:
        return None
    return match_structure(pat.rhs, q.rhs, sigma)


def match_rule(rule: RuleSchema, concl: Sequent) -> list[Subst]:
    """Substitutions σ with σ(conclusion pattern) = concl.

    Matching is first-order and rigid, so there is at most one.
    """
    sigma = match_sequent(rule.conclusion, concl)
    return [] if sigma is None else [sigma]


class UnboundMeta(KeyError):
    pass


def instantiate_formula(pat: MTFormula, sigma: Subst) -> MTFormula:
    if pat.op == "meta":
        if pat.name not in sigma:
            raise UnboundMeta(pat.name)
        return sigma[pat.name]
    if not pat.args:
        return pat
    return MTFormula(pat.op, tuple(instantiate_formula(a, sigma) for a in pat.args), pat.name)


def instantiate(pat, sigma: Subst):
    if isinstance(pat, Sequent):
        return Sequent(instantiate(pat.lhs, sigma), instantiate(pat.rhs, sigma))
    if pat.op == "meta":
        if pat.name not in sigma:
            raise UnboundMeta(pat.name)
        return sigma[pat.name]
    if pat.op == "fml":
        return Structure("fml", formula=instantiate_formula(pat.formula, sigma))
    if not pat.args:
        return pat
    return Structure(pat.op, tuple(instantiate(a, sigma) for a in pat.args))


# ---------------------------------------------------------------- checking


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    node: int | None = None
    rule: str | None = None
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return f"node {self.node} ({self.rule}): {self.reason}"


def _step_ok(rule: RuleSchema, q: Sequent, premises: list[Sequent]) -> bool:
    for prems, concl in rule.orientations():
        if len(prems) != len(premises):
            continue
        sigma = match_sequent(concl, q)
        for pat, child in zip(prems, premises):
            if sigma is None:
                break
            sigma = match_sequent(pat, child, sigma)
        if sigma is not None:
            return True
    return False


def check_proof(p: ProofTree, calc: Calculus | str, extensions: Iterable = ()) -> CheckResult:
    """Check every node of ``p`` against its named rule.

    Nodes are numbered in pre-order from 0 (the root).
    """
    rules = {r.name: r for r in rule_schemas(calc, extensions)}
    for i, node in enumerate(p.nodes()):
        rule = rules.get(node.rule)
        if rule is None:
            return CheckResult(False, i, node.rule, "unknown rule for this calculus and extension set")
        if not sequent_well_sorted(node.sequent):
            return CheckResult(False, i, node.rule, "sequent is not well sorted")
        if len(node.children) != len(rule.premises):
            return CheckResult(False, i, node.rule,
                               f"expected {len(rule.premises)} premises, found {len(node.children)}")
        if not _step_ok(rule, node.sequent, [c.sequent for c in node.children]):
            if not match_rule(rule, node.sequent) and not rule.bidirectional:
                why = "conclusion does not match the rule"
            else:
                why = "premises do not match the rule instance"
            return CheckResult(False, i, node.rule, why)
    return CheckResult(True)


# ---------------------------------------------------------------- search


def _shape(s: Structure) -> str | None:
    return None if s.op == "meta" else (s.op if s.op != "fml" else "fml:" + (
        s.formula.op if s.formula.op != "meta" else "*"))


# Backward steps that only enlarge the goal: contraction duplicates a
# substructure, the unit and contraposition rules read right-to-left add
# material without touching a connective.
_GROWING_ALWAYS = frozenset({"C_S_L", "C_S_R", "C_N_L", "C_N_R"})
_GROWING_REVERSED = frozenset({"htop", "cbot", "hone", "czero", "cont_S", "cont_N"})


class _Index:
    """Rule orientations indexed by the top connectives of their conclusion."""

    def __init__(self, rules: list[RuleSchema], growth: bool):
        self.entries = []
        for r in rules:
            for k, (prems, concl) in enumerate(r.orientations()):
                if not growth and (r.name in _GROWING_ALWAYS or (k == 1 and r.name in _GROWING_REVERSED)):
                    continue
                self.entries.append((r, prems, concl, _shape(concl.lhs), _shape(concl.rhs)))

    def candidates(self, q: Sequent):
        ls = q.lhs.op if q.lhs.op != "fml" else "fml:" + q.lhs.formula.op
        rs = q.rhs.op if q.rhs.op != "fml" else "fml:" + q.rhs.formula.op
        for r, prems, concl, l, rr in self.entries:
            if (l is None or l == ls or l == "fml:*" and ls.startswith("fml:")) and \
               (rr is None or rr == rs or rr == "fml:*" and rs.startswith("fml:")):
                yield r, prems, concl


def search_proof(goal: Sequent, depth: int, calc: Calculus | str, extensions: Iterable = (),
                 allow_cut: bool = False, max_nodes: int = 2_000_000,
                 growth: bool = False) -> ProofTree | None:
    """Backward proof search by iterative deepening on proof height.

    Cut is left out unless ``allow_cut`` is set; cut formulas are then
    drawn from the subformulas of the goal.  Backward contraction and the
    right-to-left readings of the unit and contraposition rules are only
    tried when ``growth`` is set.  Returns a proof of minimal height among
    those the search explores, or None when none exists within ``depth``
    or the node budget runs out.
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    rules = [r for r in rule_schemas(calc, extensions) if allow_cut or not r.name.startswith("Cut")]
    index = _Index(rules, growth)
    failed: dict[Sequent, int] = {}
    budget = [max_nodes]
    cut_pool = _subformulas_of(goal) if allow_cut else set()
    path: set[Sequent] = set()

    # Returns (proof, clean).  A subgoal equal to a goal on the current path
    # is skipped; failures that depended on such a skip are not memoised.
    def prove(q: Sequent, d: int) -> tuple[ProofTree | None, bool]:
        if d <= 0 or failed.get(q, 0) >= d:
            return None, True
        budget[0] -= 1
        if budget[0] < 0:
            raise _OutOfBudget
        clean = True
        path.add(q)
        try:
            for rule, prems, concl in index.candidates(q):
                sigma = match_sequent(concl, q)
                if sigma is None:
                    continue
                for full_sigma in _complete(prems, sigma, cut_pool):
                    subgoals = [instantiate(p, full_sigma) for p in prems]
                    if any(not sequent_well_sorted(g) for g in subgoals):
                        continue
                    if any(g in path for g in subgoals):
                        clean = False
                        continue
                    kids = []
                    for g in subgoals:
                        sub, ok = prove(g, d - 1)
                        clean = clean and ok
                        if sub is None:
                            break
                        kids.append(sub)
                    else:
                        return ProofTree(rule.name, q, tuple(kids)), True
        finally:
            path.discard(q)
        if clean:
            failed[q] = max(failed.get(q, 0), d)
        return None, clean

    try:
        for d in range(1, depth + 1):
            found, _ = prove(goal, d)
            if found is not None:
                return found
    except _OutOfBudget:
        return None
    return None


class _OutOfBudget(Exception):
    pass


def _formula_metas(pat) -> set[MTFormula]:
    if isinstance(pat, Sequent):
        return _formula_metas(pat.lhs) | _formula_metas(pat.rhs)
    if isinstance(pat, MTFormula):
        out = {pat} if pat.op == "meta" else set()
        for a in pat.args:
            out |= _formula_metas(a)
        return out
    if pat.op == "fml":
        return _formula_metas(pat.formula)
    out = set()
    for a in pat.args:
        out |= _formula_metas(a)
    return out


def _subformulas_of(q: Sequent) -> set[MTFormula]:
    from .syntax import subformulas
    out = set()
    stack = [q.lhs, q.rhs]
    while stack:
        s = stack.pop()
        if s.op == "fml":
            out.update(subformulas(s.formula))
        else:
            stack.extend(s.args)
    return out


def _complete(prems, sigma: Subst, pool: set[MTFormula]):
    """Extend sigma to the premise-only formula metavariables using pool."""
    free = sorted({m for p in prems for m in _formula_metas(p) if m.name not in sigma},
                  key=lambda m: m.name)
    if not free:
        yield sigma
        return
    import itertools
    choices = [sorted((f for f in pool if f.sort == m.sort), key=str) for m in free]
    for combo in itertools.product(*choices):
        out = dict(sigma)
        out.update({m.name: f for m, f in zip(free, combo)})
        yield out
