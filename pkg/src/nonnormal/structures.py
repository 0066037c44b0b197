"""Structural terms, sequents and proof trees of the display calculi."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .syntax import MTFormula, N, S, SortError, show, well_sorted

# op -> (result sort, argument sorts)
STRUCT_SIGNATURE: dict[str, tuple[str, tuple[str, ...]]] = {
    "htop": (S, ()),
    "cbot": (S, ()),
    "tneg": (S, (S,)),
    "hwedge": (S, (S, S)),
    "cvee": (S, (S, S)),
    "hnu": (S, (N,)),
    "cnuc": (S, (N,)),
    "hin": (S, (N,)),
    "cnotin": (S, (N,)),
    "ctri": (S, (N, S)),
    "hblacktri": (S, (N, S)),
    "cnotinr": (S, (N,)),
    "hone": (N, ()),
    "czero": (N, ()),
    "tsim": (N, (N,)),
    "hcap": (N, (N, N)),
    "ccup": (N, (N, N)),
    "cni": (N, (S,)),
    "hnotni": (N, (S,)),
    "cnu-adj": (N, (S,)),
    "hnuc-adj": (N, (S,)),
    "cnotnir": (N, (S,)),
    "cblacktrir": (N, (S, S)),
}

UNICODE = {
    "htop": "⊤̂", "cbot": "⊥̌", "tneg": "¬̃", "hwedge": "∧̂", "cvee": "∨̌",
    "hnu": "⟨ν̂⟩", "cnuc": "[ν̌ᶜ]", "hin": "⟨∈̂⟩", "cnotin": "[∉̌]", "ctri": "▷̌",
    "hblacktri": "▲̂", "cnotinr": "[∉̌⟩", "hone": "1̂", "czero": "0̌", "tsim": "∼̃",
    "hcap": "∩̂", "ccup": "∪̌", "cni": "[∋̌]", "hnotni": "⟨∌̂⟩", "cnu-adj": "[ν̌]⁻",
    "hnuc-adj": "⟨ν̂ᶜ⟩⁻", "cnotnir": "[∌̌⟩", "cblacktrir": "▶̌",
}

# Metavariable names and their sorts.
STRUCT_META_SORTS = {
    "X": S, "Y": S, "Z": S, "W": S,
    "Gamma": N, "Delta": N, "Sigma": N, "Pi": N, "Theta": N,
}
FORMULA_META_SORTS = {"A": S, "B": S, "C": S, "alpha": N, "beta": N}
ATOM_META = "p"


@dataclass(frozen=True)
class Structure:
    """A structural term.

    ``op`` is a structural connective, ``"fml"`` for an embedded formula
    (stored in ``formula``), or ``"meta"`` for a schematic structure
    variable (named by ``name``).
    """

    op: str
    args: tuple["Structure", ...] = ()
    formula: MTFormula | None = None
    name: str | None = None

    @property
    def sort(self) -> str:
        if self.op == "fml":
            return self.formula.sort
        if self.op == "meta":
            return STRUCT_META_SORTS[self.name]
        return STRUCT_SIGNATURE[self.op][0]

    def __str__(self) -> str:
        return show_structure(self)


@dataclass(frozen=True)
class Sequent:
    lhs: Structure
    rhs: Structure

    def __str__(self) -> str:
        return f"{show_structure(self.lhs)} ⊢ {show_structure(self.rhs)}"


@dataclass(frozen=True)
class ProofTree:
    """A derivation: ``rule`` concludes ``sequent`` from ``children``."""

    rule: str
    sequent: Sequent
    children: tuple["ProofTree", ...] = field(default=())

    def nodes(self) -> Iterator["ProofTree"]:
        """Pre-order traversal; node indices elsewhere refer to this order."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    @property
    def height(self) -> int:
        return 1 + max((c.height for c in self.children), default=0)

    def __len__(self) -> int:
        return sum(1 for _ in self.nodes())


# ---------------------------------------------------------------- builders

def fml(f: MTFormula) -> Structure:
    return Structure("fml", formula=f)


def st(op: str, *args: Structure) -> Structure:
    return Structure(op, tuple(args))


def smeta(name: str) -> Structure:
    if name not in STRUCT_META_SORTS:
        raise SortError(f"unknown structure metavariable {name!r}")
    return Structure("meta", name=name)


def fmeta(name: str) -> MTFormula:
    if name == ATOM_META:
        return MTFormula("meta", name=name, meta_sort=S, atomic=True)
    if name not in FORMULA_META_SORTS:
        raise SortError(f"unknown formula metavariable {name!r}")
    return MTFormula("meta", name=name, meta_sort=FORMULA_META_SORTS[name])


def seq(lhs: Structure, rhs: Structure) -> Sequent:
    return Sequent(lhs, rhs)


# ---------------------------------------------------------------- checks

def structure_well_sorted(s: Structure) -> bool:
    try:
        _check(s)
    except (SortError, KeyError):
        return False
    return True


def _check(s: Structure) -> None:
    if s.op == "fml":
        if s.formula is None or s.args or not well_sorted(s.formula):
            raise SortError("ill-sorted formula leaf")
        return
    if s.op == "meta":
        if s.name not in STRUCT_META_SORTS:
            raise SortError("unknown metavariable")
        return
    want_sorts = STRUCT_SIGNATURE[s.op][1]
    if len(want_sorts) != len(s.args):
        raise SortError(f"{s.op} arity mismatch")
    for want, child in zip(want_sorts, s.args):
        _check(child)
        if child.sort != want:
            raise SortError(f"{s.op} expects {want}, got {child.sort}")


def sequent_well_sorted(q: Sequent) -> bool:
    return (structure_well_sorted(q.lhs) and structure_well_sorted(q.rhs)
            and q.lhs.sort == q.rhs.sort)


def is_schematic(s: Structure | Sequent | MTFormula) -> bool:
    if isinstance(s, Sequent):
        return is_schematic(s.lhs) or is_schematic(s.rhs)
    if isinstance(s, MTFormula):
        return s.op == "meta" or any(is_schematic(a) for a in s.args)
    if s.op == "meta":
        return True
    if s.op == "fml":
        return is_schematic(s.formula)
    return any(is_schematic(a) for a in s.args)


# ---------------------------------------------------------------- display

def show_structure(s: Structure) -> str:
    if s.op == "fml":
        text = show(s.formula)
        return f"({text})" if s.formula.args and " " in text else text
    if s.op == "meta":
        return s.name
    sym = UNICODE[s.op]
    if not s.args:
        return sym
    if len(s.args) == 1:
        inner = show_structure(s.args[0])
        if len(s.args[0].args) == 2:
            inner = f"({inner})"
        return sym + inner
    parts = []
    for a in s.args:
        text = show_structure(a)
        parts.append(f"({text})" if len(a.args) == 2 else text)
    return f"{parts[0]} {sym} {parts[1]}"
