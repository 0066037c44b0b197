"""Embeddings of the single-type languages into the two-sorted ones."""

from __future__ import annotations

from . import syntax as sx
from .syntax import Inequality, MTFormula, STFormula


class LanguageError(ValueError):
    """The input belongs to the wrong single-type language."""


def _require(phi: STFormula, forbidden: str) -> None:
    if any(g.op == forbidden for g in sx.subformulas(phi)):
        raise LanguageError(f"formula contains {forbidden!r}, which this translation does not accept")


def tau1(phi: STFormula) -> MTFormula:
    """Translation reading the box through <ν>[∋]."""
    _require(phi, "cond")
    return _tau(phi, True)


def tau2(phi: STFormula) -> MTFormula:
    """Translation reading the box through [νᶜ]<∌>."""
    _require(phi, "cond")
    return _tau(phi, False)


def _tau(phi: STFormula, first: bool) -> MTFormula:
    op = phi.op
    if op == "var":
        return sx.var(phi.name)
    if op == "top":
        return sx.TOP
    if op == "bot":
        return sx.BOT
    if op == "neg":
        # negation swaps the two readings
        return sx.neg(_tau(phi.args[0], not first))
    if op == "and":
        return sx.conj(_tau(phi.args[0], first), _tau(phi.args[1], first))
    if op == "nabla":
        inner = _tau(phi.args[0], first)
        return sx.dia_nu(sx.box_ni(inner)) if first else sx.box_nuc(sx.dia_notni(inner))
    raise LanguageError(f"unexpected connective {op!r}")


def tau_cond(phi: STFormula) -> MTFormula:
    """Translation of the conditional language."""
    _require(phi, "nabla")
    return _tc(phi)


def _tc(phi: STFormula) -> MTFormula:
    op = phi.op
    if op == "var":
        return sx.var(phi.name)
    if op == "top":
        return sx.TOP
    if op == "bot":
        return sx.BOT
    if op == "neg":
        return sx.neg(_tc(phi.args[0]))
    if op == "and":
        return sx.conj(_tc(phi.args[0]), _tc(phi.args[1]))
    if op == "cond":
        a, b = _tc(phi.args[0]), _tc(phi.args[1])
        return sx.tri(sx.cap(sx.box_ni(a), sx.boxr_notni(a)), b)
    raise LanguageError(f"unexpected connective {op!r}")


def translate_sequent(phi: STFormula, psi: STFormula) -> Inequality:
    """Translate ``phi ⊢ psi`` into an inequality between S-formulas."""
    langs = {sx.st_language(phi), sx.st_language(psi)} - {"bool"}
    if len(langs) > 1:
        raise LanguageError("sequent mixes nabla and cond")
    if langs == {"cond"}:
        return Inequality(tau_cond(phi), tau_cond(psi))
    return Inequality(tau1(phi), tau2(psi))


def translate(phi: STFormula) -> MTFormula:
    """tau1 for neighbourhood formulas, tau_cond for conditional ones."""
    return tau_cond(phi) if sx.st_language(phi) == "cond" else tau1(phi)
