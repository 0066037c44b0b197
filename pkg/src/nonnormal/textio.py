"""S-expression syntax for formulas, structures, sequents, proofs and frames.

Every syntactic category has a parser and a printer, and
``parse(print(v)) == v`` holds for every well-sorted value.  Errors carry
a :class:`SourceSpan` of byte offsets into the UTF-8 input.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from . import syntax as sx
from .semantics import CFrame, FrameError, NFrame, TwoSortedFrame, mask_of, members
from .structures import (
    ATOM_META, FORMULA_META_SORTS, STRUCT_META_SORTS, STRUCT_SIGNATURE,
    ProofTree, Sequent, Structure, fmeta,
)
from .syntax import Inequality, MTFormula, STFormula


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int


class ParseError(ValueError):
    """Syntax or sort error at a location in the input."""

    def __init__(self, message: str, span: SourceSpan, kind: str = "syntax"):
        super().__init__(f"{message} at bytes {span.start}-{span.end}")
        self.message = message
        self.span = span
        self.kind = kind


# ---------------------------------------------------------------- reader


@dataclass(frozen=True)
class Atom:
    text: str
    span: SourceSpan


@dataclass(frozen=True)
class SList:
    items: tuple
    span: SourceSpan


SExpr = Union[Atom, SList]

_TOKEN = re.compile(rb"\s+|#[^\n]*|\(|\)|[^\s()#]+")


def read_sexpr(text: str | bytes) -> SExpr:
    """Read exactly one s-expression (comments and whitespace allowed)."""
    data = text.encode("utf-8") if isinstance(text, str) else text
    tokens = []
    pos = 0
    while pos < len(data):
        m = _TOKEN.match(data, pos)
        tok = m.group()
        if not tok.isspace() and not tok.startswith(b"#"):
            tokens.append((tok, SourceSpan(pos, m.end())))
        pos = m.end()
    if not tokens:
        raise ParseError("empty input", SourceSpan(0, len(data)))
    expr, i = _read(tokens, 0, len(data))
    if i != len(tokens):
        raise ParseError("trailing input after the first expression", tokens[i][1])
    return expr


def _read(tokens, i, n):
    tok, span = tokens[i]
    if tok == b")":
        raise ParseError("unexpected ')'", span)
    if tok != b"(":
        try:
            return Atom(tok.decode("utf-8"), span), i + 1
        except UnicodeDecodeError:
            raise ParseError("atom is not valid UTF-8", span) from None
    items = []
    i += 1
    while True:
        if i >= len(tokens):
            raise ParseError("unclosed '('", SourceSpan(span.start, n))
        if tokens[i][0] == b")":
            return SList(tuple(items), SourceSpan(span.start, tokens[i][1].end)), i + 1
        item, i = _read(tokens, i, n)
        items.append(item)


def _head(e: SExpr, what: str) -> str:
    if not isinstance(e, SList) or not e.items or not isinstance(e.items[0], Atom):
        raise ParseError(f"expected a {what} form", e.span)
    return e.items[0].text


def _atom(e: SExpr, what: str) -> str:
    if not isinstance(e, Atom):
        raise ParseError(f"expected {what}", e.span)
    return e.text


def _int(e: SExpr, what: str = "an integer") -> int:
    t = _atom(e, what)
    if not t.isdigit():
        raise ParseError(f"expected {what}", e.span)
    return int(t)


_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_']*$")


def _varname(e: SExpr) -> str:
    t = _atom(e, "a variable name")
    if not _NAME.match(t):
        raise ParseError(f"bad variable name {t!r}", e.span)
    return t


# ---------------------------------------------------------------- formulas

_MT_LEAVES = {"top": sx.TOP, "bot": sx.BOT, "one": sx.ONE, "zero": sx.ZERO}
_ST_ONLY = {"nabla", "cond", "imp", "iff"}


def parse_formula(text: str | bytes, kind: str = "auto") -> MTFormula | STFormula:
    """Parse a formula.

    ``kind`` is ``"mt"``, ``"st"`` or ``"auto"``.  In auto mode a formula is
    single-type when it uses ``nabla``, ``cond``, ``imp`` or ``iff`` and
    multi-type otherwise.
    """
    return formula_from_sexpr(read_sexpr(text), kind)


def formula_from_sexpr(e: SExpr, kind: str = "auto") -> MTFormula | STFormula:
    if kind == "auto":
        kind = "st" if _mentions(e, _ST_ONLY) else "mt"
    if kind == "st":
        return _st(e)
    if kind == "mt":
        f = _mt(e, allow_meta=False)
        if not sx.well_sorted(f):
            raise ParseError("formula mixes connectives of both multi-type languages", e.span, "sort")
        return f
    raise ValueError(f"unknown formula kind {kind!r}")


def _mentions(e: SExpr, names) -> bool:
    if isinstance(e, Atom):
        return e.text in names
    return any(_mentions(i, names) for i in e.items)


def _st(e: SExpr) -> STFormula:
    if isinstance(e, Atom):
        if e.text == "top":
            return sx.ST_TOP
        if e.text == "bot":
            return sx.ST_BOT
        raise ParseError(f"unknown single-type constant {e.text!r}", e.span)
    head = _head(e, "formula")
    args = e.items[1:]
    if head == "var":
        if len(args) != 1:
            raise ParseError("var takes one name", e.span)
        return sx.st_var(_varname(args[0]))
    arity = {"neg": 1, "nabla": 1, "and": 2, "cond": 2, "or": 2, "imp": 2, "iff": 2}
    if head not in arity:
        raise ParseError(f"unknown single-type connective {head!r}", e.items[0].span)
    if len(args) != arity[head]:
        raise ParseError(f"{head} takes {arity[head]} arguments", e.span)
    kids = [_st(a) for a in args]
    build = {"neg": sx.st_neg, "nabla": sx.nabla, "and": sx.st_and, "cond": sx.cond,
             "or": sx.st_or, "imp": sx.st_imp, "iff": sx.st_iff}[head]
    f = build(*kids)
    try:
        sx.st_language(f)
    except sx.SortError as err:
        raise ParseError(str(err), e.span, "sort") from None
    return f


def _mt(e: SExpr, allow_meta: bool, want: str | None = None) -> MTFormula:
    if isinstance(e, Atom):
        if allow_meta and e.text.startswith("?"):
            name = e.text[1:]
            if name != ATOM_META and name not in FORMULA_META_SORTS:
                raise ParseError(f"unknown formula metavariable {name!r}", e.span)
            f = fmeta(name)
        elif e.text in _MT_LEAVES:
            f = _MT_LEAVES[e.text]
        else:
            raise ParseError(f"unknown formula constant {e.text!r}", e.span)
    else:
        head = _head(e, "formula")
        args = e.items[1:]
        if head == "var":
            if len(args) != 1:
                raise ParseError("var takes one name", e.span)
            f = sx.var(_varname(args[0]))
        elif head in sx.MT_SIGNATURE:
            _, sorts = sx.MT_SIGNATURE[head]
            if len(args) != len(sorts):
                raise ParseError(f"{head} takes {len(sorts)} arguments", e.span)
            f = sx.MTFormula(head, tuple(_mt(a, allow_meta, s) for a, s in zip(args, sorts)))
        else:
            raise ParseError(f"unknown connective {head!r}", e.items[0].span)
    if want is not None and f.sort != want:
        raise ParseError(f"expected an {want}-sorted formula, found sort {f.sort}", e.span, "sort")
    return f


def print_formula(f: MTFormula | STFormula) -> str:
    if f.op == "var":
        return f"(var {f.name})"
    if f.op == "meta":
        return f"?{f.name}"
    if not f.args:
        return f.op
    return "(" + " ".join([f.op, *(print_formula(a) for a in f.args)]) + ")"


def parse_inequality(text: str | bytes) -> Inequality:
    """``(leq LHS RHS)`` over multi-type formulas."""
    e = read_sexpr(text)
    if _head(e, "inequality") != "leq" or len(e.items) != 3:
        raise ParseError("expected (leq LHS RHS)", e.span)
    lhs, rhs = (_mt(a, allow_meta=False) for a in e.items[1:])
    if lhs.sort != rhs.sort:
        raise ParseError("inequality sides have different sorts", e.span, "sort")
    return Inequality(lhs, rhs)


def print_inequality(q: Inequality) -> str:
    return f"(leq {print_formula(q.lhs)} {print_formula(q.rhs)})"


def parse_st_sequent(text: str | bytes) -> Inequality:
    """A single-type sequent ``(seq PHI PSI)``; sides may be wrapped in ``fml``."""
    e = read_sexpr(text)
    return st_sequent_from_sexpr(e)


def st_sequent_from_sexpr(e: SExpr) -> Inequality:
    if _head(e, "sequent") != "seq" or len(e.items) != 3:
        raise ParseError("expected (seq LHS RHS)", e.span)
    sides = []
    for side in e.items[1:]:
        if isinstance(side, SList) and side.items and isinstance(side.items[0], Atom) \
                and side.items[0].text == "fml":
            if len(side.items) != 2:
                raise ParseError("fml takes one formula", side.span)
            side = side.items[1]
        sides.append(_st(side))
    langs = {sx.st_language(s) for s in sides} - {"bool"}
    if len(langs) > 1:
        raise ParseError("sequent mixes nabla and cond", e.span, "sort")
    return Inequality(*sides)


def print_st_sequent(q: Inequality) -> str:
    return f"(seq {print_formula(q.lhs)} {print_formula(q.rhs)})"


# ---------------------------------------------------------------- structures

_STRUCT_LEAVES = {k for k, (_, a) in STRUCT_SIGNATURE.items() if not a}


def parse_structure(text: str | bytes, allow_meta: bool = False) -> Structure:
    return structure_from_sexpr(read_sexpr(text), allow_meta)


def structure_from_sexpr(e: SExpr, allow_meta: bool = False, want: str | None = None) -> Structure:
    if isinstance(e, Atom):
        if allow_meta and e.text.startswith("?"):
            name = e.text[1:]
            if name not in STRUCT_META_SORTS:
                raise ParseError(f"unknown structure metavariable {name!r}", e.span)
            s = Structure("meta", name=name)
        elif e.text in _STRUCT_LEAVES:
            s = Structure(e.text)
        else:
            raise ParseError(f"unknown structural constant {e.text!r}", e.span)
    else:
        head = _head(e, "structure")
        args = e.items[1:]
        if head == "fml":
            if len(args) != 1:
                raise ParseError("fml takes one formula", e.span)
            f = _mt(args[0], allow_meta)
            if not sx.well_sorted(f):
                raise ParseError("formula mixes connectives of both languages", args[0].span, "sort")
            s = Structure("fml", formula=f)
        elif head in STRUCT_SIGNATURE:
            _, sorts = STRUCT_SIGNATURE[head]
            if len(args) != len(sorts):
                raise ParseError(f"{head} takes {len(sorts)} arguments", e.span)
            s = Structure(head, tuple(structure_from_sexpr(a, allow_meta, w) for a, w in zip(args, sorts)))
        else:
            raise ParseError(f"unknown structural connective {head!r}", e.items[0].span)
    if want is not None and s.sort != want:
        raise ParseError(f"expected an {want}-sorted structure, found sort {s.sort}", e.span, "sort")
    return s


def print_structure(s: Structure) -> str:
    if s.op == "fml":
        return f"(fml {print_formula(s.formula)})"
    if s.op == "meta":
        return f"?{s.name}"
    if not s.args:
        return s.op
    return "(" + " ".join([s.op, *(print_structure(a) for a in s.args)]) + ")"


def parse_sequent(text: str | bytes, allow_meta: bool = False) -> Sequent:
    return sequent_from_sexpr(read_sexpr(text), allow_meta)


def sequent_from_sexpr(e: SExpr, allow_meta: bool = False) -> Sequent:
    if _head(e, "sequent") != "seq" or len(e.items) != 3:
        raise ParseError("expected (seq LHS RHS)", e.span)
    lhs = structure_from_sexpr(e.items[1], allow_meta)
    rhs = structure_from_sexpr(e.items[2], allow_meta)
    if lhs.sort != rhs.sort:
        raise ParseError(f"sequent sides have sorts {lhs.sort} and {rhs.sort}", e.span, "sort")
    return Sequent(lhs, rhs)


def print_sequent(q: Sequent) -> str:
    return f"(seq {print_structure(q.lhs)} {print_structure(q.rhs)})"


# ---------------------------------------------------------------- proofs


def parse_proof(text: str | bytes, known_rules=None, check_rules: bool = True) -> ProofTree:
    """Parse ``(rule NAME SEQUENT SUBPROOF...)``.

    Rule names are checked against ``known_rules`` (defaults to every rule
    of both calculi with all extensions) and the number of subproofs
    against the rule's premise count.  With ``check_rules=False`` any
    name and any number of subproofs is accepted, leaving both to the
    proof checker.
    """
    if not check_rules:
        known_rules = None
    elif known_rules is None:
        from .calculus import all_rule_arities
        known_rules = all_rule_arities()
    return _proof(read_sexpr(text), known_rules)


class ProofSyntaxError(ParseError):
    """Unknown rule name or wrong number of subproofs."""


def _proof(e: SExpr, known) -> ProofTree:
    if _head(e, "proof") != "rule" or len(e.items) < 3:
        raise ParseError("expected (rule NAME SEQUENT SUBPROOF...)", e.span)
    name = _atom(e.items[1], "a rule name")
    if known is not None and name not in known:
        raise ProofSyntaxError(f"unknown rule {name!r}", e.items[1].span, "rule")
    kids = tuple(_proof(c, known) for c in e.items[3:])
    if known is not None and len(kids) != known[name]:
        raise ProofSyntaxError(f"rule {name} takes {known[name]} premises, got {len(kids)}", e.span, "rule")
    return ProofTree(name, sequent_from_sexpr(e.items[2]), kids)


def print_proof(p: ProofTree, indent: int = 0) -> str:
    pad = "  " * indent
    head = f"{pad}(rule {p.rule} {print_sequent(p.sequent)}"
    if not p.children:
        return head + ")"
    return head + "\n" + "\n".join(print_proof(c, indent + 1) for c in p.children) + ")"


# ---------------------------------------------------------------- frames


def _intlist(e: SExpr, what: str) -> list[int]:
    if not isinstance(e, SList):
        raise ParseError(f"expected a list of {what}", e.span)
    out = [_int(i, what) for i in e.items]
    if out != sorted(set(out)):
        raise ParseError(f"{what} must be listed in increasing order without repeats", e.span)
    return out


def _worlds(e: SExpr, head: str) -> int:
    if _head(e, f"({head} ...)") != head:
        raise ParseError(f"expected ({head} ...)", e.span)
    ws = [_int(i, "a world") for i in e.items[1:]]
    if ws != list(range(len(ws))):
        raise ParseError(f"{head} must be 0 1 ... n-1", e.span)
    return len(ws)


def parse_frame(text: str | bytes, strict: bool = True):
    """Parse an ``nframe``, ``cframe`` or ``twosorted`` form."""
    return frame_from_sexpr(read_sexpr(text), strict)


def frame_from_sexpr(e: SExpr, strict: bool = True):
    head = _head(e, "frame")
    if head == "nframe":
        return _nframe(e, strict)
    if head == "cframe":
        return _cframe(e)
    if head == "twosorted":
        return _twosorted(e)
    raise ParseError(f"unknown frame kind {head!r}", e.items[0].span)


def _nframe(e: SList, strict: bool) -> NFrame:
    if len(e.items) < 2:
        raise ParseError("nframe needs a worlds clause", e.span)
    n = _worlds(e.items[1], "worlds")
    fams = [0] * n
    seen = set()
    for clause in e.items[2:]:
        if _head(clause, "nu clause") != "nu" or len(clause.items) != 3:
            raise ParseError("expected (nu WORLD (SET...))", clause.span)
        w = _int(clause.items[1], "a world")
        if w >= n or w in seen:
            raise ParseError("nu clause for an unknown or repeated world", clause.items[1].span)
        seen.add(w)
        sets = clause.items[2]
        if not isinstance(sets, SList):
            raise ParseError("expected a list of sets", sets.span)
        for s in sets.items:
            d = _intlist(s, "worlds")
            if d and d[-1] >= n:
                raise ParseError("set mentions an unknown world", s.span)
            fams[w] |= 1 << mask_of(d)
    try:
        return NFrame(n, tuple(fams), strict)
    except FrameError as err:
        raise ParseError(str(err), e.span, "frame") from None


def _cframe(e: SList) -> CFrame:
    if len(e.items) < 2:
        raise ParseError("cframe needs a worlds clause", e.span)
    n = _worlds(e.items[1], "worlds")
    table = {}
    for clause in e.items[2:]:
        if _head(clause, "f clause") != "f" or len(clause.items) != 4:
            raise ParseError("expected (f WORLD (IN...) (OUT...))", clause.span)
        w = _int(clause.items[1], "a world")
        d, out = _intlist(clause.items[2], "worlds"), _intlist(clause.items[3], "worlds")
        if w >= n or any(v >= n for v in d + out):
            raise ParseError("f clause mentions an unknown world", clause.span)
        key = (w, mask_of(d))
        if key in table:
            raise ParseError("repeated f clause", clause.span)
        table[key] = mask_of(out)
    if len(table) != n << n:
        raise ParseError("selection function must be given on every world and subset", e.span, "frame")
    rows = tuple(tuple(table[w, d] for d in range(1 << n)) for w in range(n))
    return CFrame(n, rows)


_REL_ARITY = {"r-ni": 2, "r-notni": 2, "r-nu": 2, "r-nuc": 2, "t-f": 3}


def _twosorted(e: SList) -> TwoSortedFrame:
    items = e.items[1:]
    if len(items) < 3 or _head(items[0], "kind") != "kind" or len(items[0].items) != 2:
        raise ParseError("expected (twosorted (kind n|c) (xs ...) (ys ...) ...)", e.span)
    kind = _atom(items[0].items[1], "n or c")
    if kind not in ("n", "c"):
        raise ParseError("kind must be n or c", items[0].items[1].span)
    nx = _worlds(items[1], "xs")
    ny = _worlds(items[2], "ys")
    rels: dict[str, set] = {}
    for clause in items[3:]:
        head = _head(clause, "relation")
        if head not in _REL_ARITY or head in rels:
            raise ParseError(f"unknown or repeated relation {head!r}", clause.span)
        tuples = set()
        for t in clause.items[1:]:
            if not isinstance(t, SList) or len(t.items) != _REL_ARITY[head]:
                raise ParseError(f"{head} expects {_REL_ARITY[head]}-tuples", t.span)
            tuples.add(tuple(_int(i, "an element") for i in t.items))
        rels[head] = tuples
    try:
        return TwoSortedFrame(kind, nx, ny, rels.get("r-ni", ()), rels.get("r-notni", ()),
                              rels.get("r-nu", ()), rels.get("r-nuc", ()), rels.get("t-f", ()))
    except FrameError as err:
        raise ParseError(str(err), e.span, "frame") from None


def _set(m: int) -> str:
    return "(" + " ".join(map(str, members(m))) + ")"


def print_frame(F) -> str:
    if isinstance(F, NFrame):
        ws = " ".join(map(str, range(F.n)))
        parts = [f"(nframe (worlds{' ' if ws else ''}{ws})"]
        for w, fam in enumerate(F.nu):
            sets = " ".join(_set(d) for d in range(1 << F.n) if fam >> d & 1)
            parts.append(f"(nu {w} ({sets}))")
        return "\n  ".join(parts) + ")"
    if isinstance(F, CFrame):
        ws = " ".join(map(str, range(F.n)))
        parts = [f"(cframe (worlds{' ' if ws else ''}{ws})"]
        for w, row in enumerate(F.f):
            for d, out in enumerate(row):
                parts.append(f"(f {w} {_set(d)} {_set(out)})")
        return "\n  ".join(parts) + ")"
    if isinstance(F, TwoSortedFrame):
        xs = "".join(f" {i}" for i in range(F.nx))
        ys = "".join(f" {i}" for i in range(F.ny))
        parts = [f"(twosorted (kind {F.kind}) (xs{xs}) (ys{ys})"]
        rels = [("r-ni", F.r_ni), ("r-notni", F.r_notni)]
        rels += [("r-nu", F.r_nu), ("r-nuc", F.r_nuc)] if F.kind == "n" else [("t-f", F.t_f)]
        for name, R in rels:
            body = "".join(" (" + " ".join(map(str, t)) + ")" for t in sorted(R))
            parts.append(f"({name}{body})")
        return "\n  ".join(parts) + ")"
    raise TypeError(f"not a frame: {F!r}")


def print_subset(m: int) -> str:
    return _set(m)
