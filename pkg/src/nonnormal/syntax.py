"""Sorted abstract syntax for the single-type and multi-type languages.

Two formula types live here:

* :class:`STFormula` covers the single-type languages with a monotone box
  ``nabla`` and a binary conditional ``cond``.
* :class:`MTFormula` covers the two-sorted languages.  Sort ``S`` denotes
  sets of states and sort ``N`` denotes sets of neighbourhoods.

Every node is an immutable dataclass.  Equality is structural, so formulas can
be used as dictionary keys and set members.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

S = "S"
N = "N"

# op -> (result sort, argument sorts)
MT_SIGNATURE: dict[str, tuple[str, tuple[str, ...]]] = {
    "var": (S, ()),
    "top": (S, ()),
    "bot": (S, ()),
    "neg": (S, (S,)),
    "and": (S, (S, S)),
    "dia-nu": (S, (N,)),
    "box-nuc": (S, (N,)),
    "tri": (S, (N, S)),
    "one": (N, ()),
    "zero": (N, ()),
    "sim": (N, (N,)),
    "cap": (N, (N, N)),
    "box-ni": (N, (S,)),
    "dia-notni": (N, (S,)),
    "boxr-notni": (N, (S,)),
    # Joins are classifier-level connectives (one translated axiom uses one).
    "or": (S, (S, S)),
    "cup": (N, (N, N)),
    # Residual operators with no logical counterpart.  They exist only so
    # that structures built from adjoint-only connectives can be read back
    # as formulas for semantic checks.
    "dia-in": (S, (N,)),
    "box-notin": (S, (N,)),
    "boxr-notin": (S, (N,)),
    "blacktri": (S, (N, S)),
    "box-nu-adj": (N, (S,)),
    "dia-nuc-adj": (N, (S,)),
    "blacktrir": (N, (S, S)),
}

OBJECT_OPS = frozenset(
    "var top bot neg and dia-nu box-nuc tri one zero sim cap box-ni dia-notni boxr-notni".split()
)
JOIN_OPS = frozenset({"or", "cup"})
RESIDUAL_OPS = frozenset(
    "dia-in box-notin boxr-notin blacktri box-nu-adj dia-nuc-adj blacktrir".split()
)

NABLA_ONLY = frozenset({"dia-nu", "box-nuc", "dia-notni", "box-notin", "box-nu-adj", "dia-nuc-adj"})
COND_ONLY = frozenset({"tri", "boxr-notni", "boxr-notin", "blacktri", "blacktrir"})

ST_ARITY: dict[str, int] = {"var": 0, "top": 0, "bot": 0, "neg": 1, "and": 2, "nabla": 1, "cond": 2}

UNICODE = {
    "top": "⊤", "bot": "⊥", "one": "1", "zero": "0",
    "neg": "¬", "sim": "∼",
    "dia-nu": "⟨ν⟩", "box-nuc": "[νᶜ]", "box-ni": "[∋]", "dia-notni": "⟨∌⟩",
    "boxr-notni": "[∌⟩", "dia-in": "⟨∈⟩", "box-notin": "[∉]", "boxr-notin": "[∉⟩",
    "box-nu-adj": "[ν]⁻", "dia-nuc-adj": "⟨νᶜ⟩⁻", "nabla": "∇",
    "and": "∧", "or": "∨", "cap": "∩", "cup": "∪", "tri": "▷", "blacktri": "▲",
    "blacktrir": "▶", "cond": ">",
}


class SortError(ValueError):
    """Raised when a formula violates the sort discipline."""


@dataclass(frozen=True)
class MTFormula:
    """A node of the two-sorted language.

    ``name`` is set for ``var`` and ``meta`` nodes.  ``meta`` nodes are
    schematic placeholders used by rule schemas; ``meta_sort`` records their
    sort and ``atomic`` restricts them to propositional variables.
    """

    op: str
    args: tuple["MTFormula", ...] = ()
    name: str | None = None
    meta_sort: str | None = None
    atomic: bool = False

    @property
    def sort(self) -> str:
        if self.op == "meta":
            return self.meta_sort or S
        try:
            return MT_SIGNATURE[self.op][0]
        except KeyError:
            raise SortError(f"unknown connective {self.op!r}") from None

    def __str__(self) -> str:
        return show(self)


@dataclass(frozen=True)
class STFormula:
    """A node of the single-type languages (``nabla`` or ``cond``)."""

    op: str
    args: tuple["STFormula", ...] = ()
    name: str | None = None

    def __str__(self) -> str:
        return show(self)


Formula = Union[MTFormula, STFormula]


@dataclass(frozen=True)
class Inequality:
    """An inequality ``lhs <= rhs``; for single-type formulas, a sequent."""

    lhs: Formula
    rhs: Formula

    def __post_init__(self) -> None:
        if type(self.lhs) is not type(self.rhs):
            raise SortError("inequality sides belong to different languages")
        if isinstance(self.lhs, MTFormula) and self.lhs.sort != self.rhs.sort:
            raise SortError(f"inequality sides have sorts {self.lhs.sort} and {self.rhs.sort}")

    def __str__(self) -> str:
        return f"{show(self.lhs)} ≤ {show(self.rhs)}"


# ---------------------------------------------------------------- builders

def var(name: str) -> MTFormula:
    return MTFormula("var", name=name)


def mt(op: str, *args: MTFormula) -> MTFormula:
    return MTFormula(op, tuple(args))


TOP = MTFormula("top")
BOT = MTFormula("bot")
ONE = MTFormula("one")
ZERO = MTFormula("zero")


def neg(a): return mt("neg", a)
def conj(a, b): return mt("and", a, b)
def disj(a, b): return mt("or", a, b)
def dia_nu(a): return mt("dia-nu", a)
def box_nuc(a): return mt("box-nuc", a)
def tri(a, b): return mt("tri", a, b)
def sim(a): return mt("sim", a)
def cap(a, b): return mt("cap", a, b)
def cup(a, b): return mt("cup", a, b)
def box_ni(a): return mt("box-ni", a)
def dia_notni(a): return mt("dia-notni", a)
def boxr_notni(a): return mt("boxr-notni", a)


def st_var(name: str) -> STFormula:
    return STFormula("var", name=name)


ST_TOP = STFormula("top")
ST_BOT = STFormula("bot")


def st_neg(a: STFormula) -> STFormula:
    return STFormula("neg", (a,))


def st_and(a: STFormula, b: STFormula) -> STFormula:
    return STFormula("and", (a, b))


def st_or(a: STFormula, b: STFormula) -> STFormula:
    return st_neg(st_and(st_neg(a), st_neg(b)))


def st_imp(a: STFormula, b: STFormula) -> STFormula:
    return st_neg(st_and(a, st_neg(b)))


def st_iff(a: STFormula, b: STFormula) -> STFormula:
    return st_and(st_imp(a, b), st_imp(b, a))


def nabla(a: STFormula) -> STFormula:
    return STFormula("nabla", (a,))


def cond(a: STFormula, b: STFormula) -> STFormula:
    return STFormula("cond", (a, b))


# ---------------------------------------------------------------- checks

def well_sorted(f: MTFormula) -> bool:
    """True iff every node obeys the signature table and the formula does not
    mix neighbourhood-only and conditional-only connectives."""
    try:
        _check_sorts(f)
    except SortError:
        return False
    ops = {g.op for g in subformulas(f)}
    return not (ops & NABLA_ONLY and ops & COND_ONLY)


def _check_sorts(f: MTFormula) -> None:
    if f.op == "meta":
        if f.args or f.meta_sort not in (S, N):
            raise SortError("malformed metavariable")
        return
    if f.op not in MT_SIGNATURE:
        raise SortError(f"unknown connective {f.op!r}")
    _, arg_sorts = MT_SIGNATURE[f.op]
    if len(arg_sorts) != len(f.args):
        raise SortError(f"{f.op} expects {len(arg_sorts)} arguments, got {len(f.args)}")
    if f.op == "var" and not f.name:
        raise SortError("variable without a name")
    for want, child in zip(arg_sorts, f.args):
        _check_sorts(child)
        if child.sort != want:
            raise SortError(f"{f.op} expects an {want}-sorted argument, got {child.sort}")


def check_st(f: STFormula) -> None:
    """Raise SortError unless f is a well-formed single-type formula."""
    ops = set()
    for g in subformulas(f):
        if g.op not in ST_ARITY:
            raise SortError(f"unknown single-type connective {g.op!r}")
        if len(g.args) != ST_ARITY[g.op]:
            raise SortError(f"{g.op} expects {ST_ARITY[g.op]} arguments")
        ops.add(g.op)
    if {"nabla", "cond"} <= ops:
        raise SortError("formula mixes nabla and cond")


def st_language(f: STFormula) -> str:
    """'nabla', 'cond' or 'bool' (neither modality occurs)."""
    ops = {g.op for g in subformulas(f)}
    if "nabla" in ops and "cond" in ops:
        raise SortError("formula mixes nabla and cond")
    if "nabla" in ops:
        return "nabla"
    if "cond" in ops:
        return "cond"
    return "bool"


def mt_language(f: MTFormula) -> str:
    """'nabla', 'cond' or 'bool' according to the modal connectives used."""
    ops = {g.op for g in subformulas(f)}
    if ops & NABLA_ONLY and ops & COND_ONLY:
        raise SortError("formula mixes connectives of both multi-type languages")
    if ops & NABLA_ONLY:
        return "nabla"
    if ops & COND_ONLY:
        return "cond"
    return "bool"


# ---------------------------------------------------------------- traversal

def subformulas(f: Formula) -> Iterator[Formula]:
    """Pre-order traversal."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(reversed(g.args))


def variables(f: Formula | Inequality) -> frozenset[str]:
    if isinstance(f, Inequality):
        return variables(f.lhs) | variables(f.rhs)
    return frozenset(g.name for g in subformulas(f) if g.op == "var")


def substitute(f: MTFormula, v: str, g: MTFormula) -> MTFormula:
    """Replace every occurrence of variable ``v`` in ``f`` by ``g``."""
    if g.sort != S:
        raise SortError("only S-sorted formulas may replace a propositional variable")
    return _subst(f, v, g)


def _subst(f, v, g):
    if f.op == "var":
        return g if f.name == v else f
    if not f.args:
        return f
    return type(f)(f.op, tuple(_subst(a, v, g) for a in f.args), f.name)


def st_substitute(f: STFormula, v: str, g: STFormula) -> STFormula:
    return _subst(f, v, g)


def expand_derived(f: MTFormula) -> MTFormula:
    """Rewrite joins through meets and complements.

    ``a or b`` becomes ``neg(neg a and neg b)`` and ``a cup b`` becomes
    ``sim(sim a cap sim b)``.
    """
    args = tuple(expand_derived(a) for a in f.args)
    if f.op == "or":
        return neg(conj(neg(args[0]), neg(args[1])))
    if f.op == "cup":
        return sim(cap(sim(args[0]), sim(args[1])))
    if not args:
        return f
    return MTFormula(f.op, args, f.name, f.meta_sort, f.atomic)


def size(f: Formula) -> int:
    return sum(1 for _ in subformulas(f))


# ---------------------------------------------------------------- display

_PREFIX = {"neg", "sim", "nabla", "dia-nu", "box-nuc", "box-ni", "dia-notni", "boxr-notni",
           "dia-in", "box-notin", "boxr-notin", "box-nu-adj", "dia-nuc-adj"}


def show(f: Formula) -> str:
    """Human-readable infix rendering with Unicode connectives."""
    if isinstance(f, Inequality):
        return str(f)
    if f.op in ("var", "meta"):
        return f.name or "?"
    if not f.args:
        return UNICODE[f.op]
    if f.op in _PREFIX:
        inner = show(f.args[0])
        if f.args[0].args and f.args[0].op not in _PREFIX:
            inner = f"({inner})"
        return UNICODE[f.op] + inner
    left, right = (show(a) if not a.args or a.op in _PREFIX else f"({show(a)})" for a in f.args)
    return f"{left} {UNICODE[f.op]} {right}"
