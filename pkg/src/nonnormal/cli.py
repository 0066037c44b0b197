"""Command-line front end.

Exit status: 0 when the check succeeds, 1 when it is refuted or fails,
2 on usage, parse or input errors.
"""

from __future__ import annotations

import argparse
import sys
from typing import Callable

from . import textio
from .calculus import (Calculus, UnsupportedExtension, check_proof, extension_rule, rule_schemas,
                       schema, search_proof)
from .classifier import is_analytic_inductive
from .correspondence import AxiomId, verify_correspondence
from .semantics import (CFrame, FrameError, NFrame, TwoSortedFrame, eval_mt, eval_st,
                        find_countermodel, is_supported, star, unstar)
from .soundness import InterpretationError, extension_rule_sound, rule_sound
from .syntax import MTFormula, SortError
from .translation import LanguageError, translate, translate_sequent

OK, REFUTED, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class Output:
    """Collects records and prints them in the chosen format."""

    def __init__(self, mode: str):
        self.mode = mode

    def text(self, line: str) -> None:
        if self.mode == "text":
            print(line)

    def record(self, *fields) -> None:
        if self.mode == "lines":
            print("\t".join(str(f) for f in fields))

    def both(self, line: str, *fields) -> None:
        self.text(line)
        self.record(*fields)

    def sexpr(self, s: str) -> None:
        print(s if self.mode == "text" else " ".join(s.split()))


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as err:
        raise UsageError(f"cannot read {path}: {err.strerror}") from None


def _head(text: str) -> str | None:
    e = textio.read_sexpr(text)
    if isinstance(e, textio.SList) and e.items and isinstance(e.items[0], textio.Atom):
        return e.items[0].text
    return None


def _extensions(spec: str | None) -> list[AxiomId]:
    if not spec:
        return []
    try:
        return [AxiomId.parse(x.strip()) for x in spec.split(",") if x.strip()]
    except ValueError as err:
        raise UsageError(str(err)) from None


def _calc(name: str) -> Calculus:
    try:
        return Calculus.parse(name)
    except ValueError as err:
        raise UsageError(str(err)) from None


def _axiom(name: str) -> AxiomId:
    try:
        return AxiomId.parse(name)
    except ValueError as err:
        raise UsageError(str(err)) from None


def _valuation(items: list[str] | None) -> dict[str, int]:
    out = {}
    for item in items or []:
        name, sep, body = item.partition("=")
        if not sep or not name:
            raise UsageError(f"valuation entries look like p=0,1 (got {item!r})")
        try:
            worlds = [int(w) for w in body.split(",") if w.strip()]
        except ValueError:
            raise UsageError(f"bad world list in {item!r}") from None
        out[name] = sum(1 << w for w in set(worlds))
    return out


def _formula_or_sequent(text: str):
    head = _head(text)
    if head == "leq":
        return textio.parse_inequality(text)
    if head == "seq":
        return textio.parse_st_sequent(text)
    return textio.parse_formula(text)


# ---------------------------------------------------------------- commands


def cmd_parse(a, out: Output) -> int:
    text = _read(a.file)
    head = _head(text)
    if head == "rule":
        out.sexpr(textio.print_proof(textio.parse_proof(text)))
    elif head in ("nframe", "cframe", "twosorted"):
        out.sexpr(textio.print_frame(textio.parse_frame(text, strict=not a.lenient)))
    elif head == "leq":
        out.sexpr(textio.print_inequality(textio.parse_inequality(text)))
    elif head == "seq":
        try:
            out.sexpr(textio.print_sequent(textio.parse_sequent(text)))
        except textio.ParseError:
            out.sexpr(textio.print_st_sequent(textio.parse_st_sequent(text)))
    else:
        out.sexpr(textio.print_formula(textio.parse_formula(text, kind=a.kind)))
    return OK


def cmd_translate(a, out: Output) -> int:
    text = _read(a.file)
    if _head(text) == "seq":
        q = textio.parse_st_sequent(text)
        m = translate_sequent(q.lhs, q.rhs)
        out.sexpr(f"(seq (fml {textio.print_formula(m.lhs)}) (fml {textio.print_formula(m.rhs)}))")
    else:
        out.sexpr(textio.print_formula(translate(textio.parse_formula(text, kind="st"))))
    return OK


def cmd_eval(a, out: Output) -> int:
    frame = textio.parse_frame(_read(a.frame), strict=not a.lenient)
    f = textio.parse_formula(_read(a.formula), kind="mt" if isinstance(frame, TwoSortedFrame) else "st")
    V = _valuation(a.val)
    try:
        m = eval_mt(frame, V, f) if isinstance(f, MTFormula) else eval_st(frame, V, f)
    except KeyError as err:
        raise UsageError(f"no value given for variable {err.args[0]}") from None
    out.both(textio.print_subset(m), *[w for w in range(64) if m >> w & 1])
    return OK


def cmd_valid(a, out: Output) -> int:
    frame = textio.parse_frame(_read(a.frame), strict=not a.lenient)
    x = _formula_or_sequent(_read(a.formula))
    cm = find_countermodel(frame, x)
    if cm is None:
        out.both("valid", "valid", "true")
        return OK
    shown = " ".join(f"{k}={textio.print_subset(v)}" for k, v in sorted(cm.items()))
    out.text(f"not valid; countermodel {shown}")
    out.record("valid", "false")
    for k, v in sorted(cm.items()):
        out.record("countermodel", k, ",".join(str(w) for w in range(64) if v >> w & 1))
    return REFUTED


def cmd_star(a, out: Output) -> int:
    frame = textio.parse_frame(_read(a.frame), strict=not a.lenient)
    if not isinstance(frame, (NFrame, CFrame)):
        raise UsageError("star takes an nframe or a cframe")
    out.sexpr(textio.print_frame(star(frame)))
    return OK


def cmd_unstar(a, out: Output) -> int:
    frame = textio.parse_frame(_read(a.frame))
    if not isinstance(frame, TwoSortedFrame):
        raise UsageError("unstar takes a twosorted frame")
    try:
        single = unstar(frame)
    except FrameError as err:
        print(f"refused: {err}", file=sys.stderr)
        return REFUTED
    out.sexpr(textio.print_frame(single))
    return OK


def cmd_supported(a, out: Output) -> int:
    frame = textio.parse_frame(_read(a.frame))
    if not isinstance(frame, TwoSortedFrame) or frame.kind != "n":
        raise UsageError("supported takes a twosorted frame of kind n")
    ok = is_supported(frame)
    out.both("supported" if ok else "not supported", "supported", str(ok).lower())
    return OK if ok else REFUTED


def cmd_verify(a, out: Output) -> int:
    if a.axiom:
        axioms = [_axiom(a.axiom)]
        if a.kind and axioms[0].kind != a.kind:
            raise UsageError(f"axiom {axioms[0].value} is not of kind {a.kind}")
    else:
        axioms = [x for x in AxiomId if a.kind is None or x.kind == a.kind]
    if a.max_size < 1 or (a.min_size is not None and a.min_size > a.max_size):
        raise UsageError("need 1 <= min-size <= max-size")
    status = OK
    for ax in axioms:
        def record(fid, av, cv, ax=ax):
            out.record(f"{ax.value}/{fid}", str(av).lower(), str(cv).lower())
        rep = verify_correspondence(ax, a.max_size, a.min_size, a.cs_variant,
                                    on_frame=record if out.mode == "lines" else None)
        prefix = f"{ax.value}: " if len(axioms) > 1 else ""
        out.text(prefix + rep.summary())
        for m in rep.mismatches[:5]:
            out.text(f"  mismatch at frame {m.frame_id}: axiom valid {m.axiom_valid}, "
                     f"condition {m.condition_holds}")
        if not rep.ok:
            status = REFUTED
    return status


def cmd_classify(a, out: Output) -> int:
    text = _read(a.file)
    if _head(text) == "seq":
        q = textio.parse_st_sequent(text)
        ineq = translate_sequent(q.lhs, q.rhs)
    else:
        ineq = textio.parse_inequality(text)
    res = is_analytic_inductive(ineq)
    if res.analytic:
        eps = " ".join(f"{k}={'+' if v == '1' else '∂'}" for k, v in sorted(res.epsilon.items()))
        om = " ".join(f"{x}<{y}" for x, y in res.omega)
        out.text("analytic inductive")
        out.text(f"epsilon: {eps or '(no variables)'}")
        out.text(f"omega: {om or '(empty)'}")
        out.record("analytic", "true")
        for k, v in sorted(res.epsilon.items()):
            out.record("epsilon", k, "+" if v == "1" else "∂")
        for x, y in res.omega:
            out.record("omega", x, y)
        return OK
    out.text("not analytic inductive")
    out.text(f"reason: {res.failure_reason}")
    out.record("analytic", "false")
    out.record("reason", res.failure_reason)
    return REFUTED


def cmd_check(a, out: Output) -> int:
    calc = _calc(a.calc)
    exts = _extensions(a.ext)
    proof = textio.parse_proof(_read(a.file), check_rules=False)
    res = check_proof(proof, calc, exts)
    if res.ok:
        out.both(f"ok ({len(proof)} nodes)", "ok", len(proof))
        return OK
    out.text(f"error at node {res.node} ({res.rule}): {res.reason}")
    out.record("error", res.node, res.rule, res.reason)
    return REFUTED


def cmd_search(a, out: Output) -> int:
    if a.depth < 0:
        raise UsageError("depth must be non-negative")
    goal = textio.parse_sequent(_read(a.file))
    proof = search_proof(goal, a.depth, _calc(a.calc), _extensions(a.ext),
                         allow_cut=a.allow_cut, growth=a.growth)
    if proof is None:
        out.both(f"no proof within depth {a.depth}", "none", a.depth)
        return REFUTED
    out.sexpr(textio.print_proof(proof))
    return OK


def cmd_soundness(a, out: Output) -> int:
    calc = _calc(a.calc)
    try:
        rule = schema(a.rule)
    except KeyError:
        raise UsageError(f"unknown rule {a.rule!r}") from None
    if rule.group == "extension":
        ax = _axiom(rule.name)
        rep = extension_rule_sound(extension_rule(ax), ax, a.max_world)
    else:
        if rule.name not in {r.name for r in rule_schemas(calc)}:
            raise UsageError(f"rule {rule.name} is not part of {calc.value}")
        kind = "n" if calc is Calculus.NABLA else "c"
        rep = rule_sound(rule, a.nx, a.ny, kind=kind)
    out.text(rep.summary())
    for v in rep.violations[:3]:
        shown = " ".join(f"{k}={textio.print_subset(m)}" for k, m in sorted(v.assignment.items()))
        out.text(f"  violation: {shown} on {' '.join(textio.print_frame(v.frame).split())}")
    out.record(rep.rule, rep.frames_checked, rep.distinct_frames, rep.violation_count)
    return OK if rep.ok else REFUTED


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nonnormal", description=__doc__.splitlines()[0])
    p.add_argument("--output", choices=("text", "lines"), default="text",
                   help="human-readable text or tab-separated records")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, fn: Callable, help_: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(fn=fn)
        sp.add_argument("--output", choices=("text", "lines"), default=argparse.SUPPRESS)
        return sp

    sp = add("parse", cmd_parse, "parse a file and print it in canonical form")
    sp.add_argument("file")
    sp.add_argument("--kind", choices=("auto", "st", "mt"), default="auto")
    sp.add_argument("--lenient", action="store_true", help="warn instead of rejecting non-monotone frames")

    sp = add("translate", cmd_translate, "translate a single-type formula or sequent")
    sp.add_argument("file")

    for name, fn, help_ in (("eval", cmd_eval, "extension of a formula on a frame"),
                            ("valid", cmd_valid, "validity of a formula, sequent or inequality")):
        sp = add(name, fn, help_)
        sp.add_argument("frame")
        sp.add_argument("formula")
        sp.add_argument("--lenient", action="store_true")
        if name == "eval":
            sp.add_argument("--val", nargs="*", metavar="p=0,1", help="subset assigned to each variable")

    sp = add("star", cmd_star, "two-sorted frame of a single-type frame")
    sp.add_argument("frame")
    sp.add_argument("--lenient", action="store_true")
    for name, fn, help_ in (("unstar", cmd_unstar, "single-type frame of a two-sorted frame"),
                            ("supported", cmd_supported, "test whether a two-sorted frame is supported")):
        sp = add(name, fn, help_)
        sp.add_argument("frame")

    sp = add("verify-correspondence", cmd_verify, "compare axiom validity with its frame condition")
    sp.add_argument("--axiom")
    sp.add_argument("--max-size", type=int, required=True)
    sp.add_argument("--min-size", type=int)
    sp.add_argument("--kind", choices=("n", "c"))
    sp.add_argument("--cs-variant", choices=("theorem", "guarded"), default="theorem")

    sp = add("classify", cmd_classify, "analytic inductive test for an inequality")
    sp.add_argument("file")

    sp = add("check-proof", cmd_check, "check a derivation")
    sp.add_argument("file")
    sp.add_argument("--calc", default="dmt-nabla")
    sp.add_argument("--ext", default="")

    sp = add("search-proof", cmd_search, "bounded backward proof search")
    sp.add_argument("file")
    sp.add_argument("--depth", type=int, default=8)
    sp.add_argument("--calc", default="dmt-nabla")
    sp.add_argument("--ext", default="")
    sp.add_argument("--allow-cut", action="store_true")
    sp.add_argument("--growth", action="store_true",
                    help="also try backward contraction and unit or contraposition insertion")

    sp = add("rule-soundness", cmd_soundness, "test a rule on finite frames")
    sp.add_argument("--rule", required=True)
    sp.add_argument("--nx", type=int, default=2)
    sp.add_argument("--ny", type=int, default=3)
    sp.add_argument("--calc", default="dmt-nabla")
    sp.add_argument("--max-world", type=int, default=2,
                    help="world bound for the frames extension rules are tested on")
    return p


_INPUT_ERRORS = (textio.ParseError, FrameError, LanguageError, SortError, UnsupportedExtension,
                 InterpretationError)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code not in (0, None) else OK
    out = Output(args.output)
    try:
        return args.fn(args, out)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return USAGE
    except _INPUT_ERRORS as err:
        print(f"error: {err}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
