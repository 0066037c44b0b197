"""Reading sequents as inequalities and testing rules on finite frames."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable

import numpy as np

from . import syntax as sx
from .batch import (FrameBatch, assignment_grid, iter_relation_space, nabla_table, reads,
                    relation_space, row_keys, selection_table, supported_batch)
from .calculus import RuleSchema
from .correspondence import AxiomId, enumerate_cframes, enumerate_nframes, fo_condition
from .semantics import CFrame, NFrame, TwoSortedFrame, eval_mt, star, valuations
from .structures import Sequent, Structure
from .syntax import Inequality, MTFormula

PRECEDENT = "precedent"
SUCCEDENT = "succedent"
_P, _S = PRECEDENT, SUCCEDENT


class InterpretationError(ValueError):
    """A structural connective occurs in a position it has no reading in."""


# structural op -> (operator, polarity of each argument)
_READINGS = {
    PRECEDENT: {
        "htop": ("top", ()), "hone": ("one", ()),
        "tneg": ("neg", (_S,)), "tsim": ("sim", (_S,)),
        "hwedge": ("and", (_P, _P)), "hcap": ("cap", (_P, _P)),
        "hnu": ("dia-nu", (_P,)), "hin": ("dia-in", (_P,)),
        "hnotni": ("dia-notni", (_P,)), "hnuc-adj": ("dia-nuc-adj", (_P,)),
        "hblacktri": ("blacktri", (_P, _P)),
    },
    SUCCEDENT: {
        "cbot": ("bot", ()), "czero": ("zero", ()),
        "tneg": ("neg", (_P,)), "tsim": ("sim", (_P,)),
        "cvee": ("or", (_S, _S)), "ccup": ("cup", (_S, _S)),
        "cnuc": ("box-nuc", (_S,)), "cnotin": ("box-notin", (_S,)),
        "cni": ("box-ni", (_S,)), "cnu-adj": ("box-nu-adj", (_S,)),
        "ctri": ("tri", (_P, _S)), "cnotinr": ("boxr-notin", (_P,)),
        "cnotnir": ("boxr-notni", (_P,)), "cblacktrir": ("blacktrir", (_P, _S)),
    },
}


def interpret_structure(s: Structure, polarity: str) -> MTFormula:
    """The formula a structure stands for in the given position.

    Structure metavariables become formula metavariables of the same name
    and sort.
    """
    if polarity not in _READINGS:
        raise ValueError(f"polarity must be {PRECEDENT!r} or {SUCCEDENT!r}")
    if s.op == "fml":
        return s.formula
    if s.op == "meta":
        return MTFormula("meta", name=s.name, meta_sort=s.sort)
    try:
        op, pols = _READINGS[polarity][s.op]
    except KeyError:
        raise InterpretationError(f"{s.op} has no reading in {polarity} position") from None
    return MTFormula(op, tuple(interpret_structure(a, p) for a, p in zip(s.args, pols)))


def interpret_sequent(q: Sequent) -> Inequality:
    return Inequality(interpret_structure(q.lhs, PRECEDENT), interpret_structure(q.rhs, SUCCEDENT))


def _metas(f: MTFormula, out: dict[str, str]) -> dict[str, str]:
    if f.op in ("meta", "var"):
        out[f.name] = f.sort
    for a in f.args:
        _metas(a, out)
    return out


@dataclass(frozen=True)
class Violation:
    frame: TwoSortedFrame
    assignment: dict[str, int]


@dataclass
class SoundnessReport:
    rule: str
    frames_checked: int = 0
    distinct_frames: int = 0
    # violating (frame, assignment) pairs, counted over all frames checked
    violation_count: int = 0
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.violation_count == 0

    def summary(self) -> str:
        return (f"{self.rule}: {self.frames_checked} frames ({self.distinct_frames} distinct), "
                f"{self.violation_count} violations")


_CHUNK = 1 << 22


def _holds(batch: FrameBatch, ineq: Inequality, env) -> np.ndarray:
    memo: dict = {}
    lhs = batch.evaluate(ineq.lhs, env, memo)
    rhs = batch.evaluate(ineq.rhs, env, memo)
    return (lhs & ~rhs) == 0


def _env_slices(env: dict[str, np.ndarray], size: int):
    total = len(next(iter(env.values()))) if env else 1
    for start in range(0, total, size):
        yield {k: v[start:start + size] for k, v in env.items()}


def rule_sound(rule: RuleSchema, nx: int = 2, ny: int = 3, kind: str = "n",
               frames: FrameBatch | Iterable[TwoSortedFrame] | None = None,
               max_violations: int = 10) -> SoundnessReport:
    """Check that every instance of ``rule`` preserves truth on finite frames.

    The premises and conclusion are read as inequalities; metavariables
    range over all subsets of the carrier of their sort.  For every frame
    and assignment satisfying each premise, the conclusion must hold.
    Both orientations of a double-line rule are checked.

    Frames default to every supported two-sorted frame over ``nx`` and
    ``ny`` for ``kind="n"`` and every two-sorted frame for ``kind="c"``.
    """
    orient = [(tuple(interpret_sequent(p) for p in prems), interpret_sequent(concl))
              for prems, concl in rule.orientations()]
    rels = frozenset().union(*(reads(f) for prems, concl in orient
                               for ineq in (*prems, concl) for f in (ineq.lhs, ineq.rhs)))
    batch = _frame_source(frames, kind, nx, ny, rels)
    report = SoundnessReport(rule.name, frames_checked=len(batch))
    if len(batch) == 0:
        return report
    uniq, inverse = batch.unique(rels)
    weight = np.bincount(inverse, minlength=len(uniq))
    report.distinct_frames = len(uniq)
    for prems, concl in orient:
        _check_orientation(uniq, weight, prems, concl, report, max_violations)
    return report


def _frame_source(frames, kind, nx, ny, rels) -> FrameBatch:
    if isinstance(frames, FrameBatch):
        return frames
    if frames is not None:
        frames = list(frames)
        if not frames:
            return FrameBatch("n", 1, 1, np.zeros((0, 1), np.uint8), np.zeros((0, 1), np.uint8),
                              np.zeros((0, 1), np.uint8), np.zeros((0, 1), np.uint8))
        return FrameBatch.from_frames(frames)
    if kind == "n":
        return supported_batch(nx, ny)
    if kind == "c":
        return relation_space("c", nx, ny, rels & {"ni", "notni", "tf"})
    raise ValueError(f"unknown frame kind {kind!r}")


def _check_orientation(uniq: FrameBatch, weight: np.ndarray, prems, concl, report, max_violations) -> None:
    sorts: dict[str, str] = {}
    for ineq in (*prems, concl):
        _metas(ineq.lhs, sorts)
        _metas(ineq.rhs, sorts)
    env = assignment_grid({k: uniq.nx if s == sx.S else uniq.ny for k, s in sorts.items()})
    prem_rels = frozenset().union(*(reads(f) for ineq in prems for f in (ineq.lhs, ineq.rhs)))
    groups, owner = uniq.unique(prem_rels)
    for g in range(len(groups)):
        rep = groups.take([g])
        member_idx = np.nonzero(owner == g)[0]
        for part in _env_slices(env, _CHUNK):
            ok = np.ones(len(next(iter(part.values()))) if part else 1, dtype=bool)
            for ineq in prems:
                ok &= _holds(rep, ineq, part)[0]
            idx = np.nonzero(ok)[0]
            if len(idx) == 0:
                continue
            sub = {k: v[idx] for k, v in part.items()}
            step = max(1, _CHUNK // len(idx))
            for start in range(0, len(member_idx), step):
                chunk = member_idx[start:start + step]
                fb = uniq.take(chunk)
                good = np.broadcast_to(_holds(fb, concl, sub), (len(fb), len(idx)))
                bad_f, bad_a = np.nonzero(~good)
                # a distinct frame stands for all frames that agree with it
                report.violation_count += int(weight[chunk[bad_f]].sum())
                for f_i, a_i in zip(bad_f, bad_a):
                    if len(report.violations) >= max_violations:
                        break
                    report.violations.append(Violation(
                        fb.frame(int(f_i)), {k: int(v[a_i]) for k, v in sub.items()}))


def rule_sound_reference(rule: RuleSchema, frames: Iterable[TwoSortedFrame]) -> int:
    """Count violating (frame, assignment) pairs with the single-frame evaluator."""
    count = 0
    for prems, concl in rule.orientations():
        ps = [interpret_sequent(p) for p in prems]
        c = interpret_sequent(concl)
        sorts: dict[str, str] = {}
        for ineq in (*ps, c):
            _metas(ineq.lhs, sorts)
            _metas(ineq.rhs, sorts)
        s_names = sorted(k for k, s in sorts.items() if s == sx.S)
        n_names = sorted(k for k, s in sorts.items() if s == sx.N)
        for K in frames:
            for vs in valuations(s_names, K.nx):
                for vn in valuations(n_names, K.ny):
                    V = {**vs, **vn}
                    if all(_ineq_holds(K, V, p) for p in ps) and not _ineq_holds(K, V, c):
                        count += 1
    return count


def _ineq_holds(K, V, ineq: Inequality) -> bool:
    return not eval_mt(K, V, ineq.lhs) & ~eval_mt(K, V, ineq.rhs)


# ---------------------------------------------------------------- extension frames


@lru_cache(maxsize=None)
def condition_frames(axiom: AxiomId, max_world: int = 2, cs_variant: str = "guarded") -> tuple:
    """Single-type frames with at most ``max_world`` worlds meeting the
    first-order condition of ``axiom``."""
    gen = enumerate_cframes if axiom.kind == "c" else enumerate_nframes
    return tuple(F for n in range(1, max_world + 1) for F in gen(n)
                 if fo_condition(axiom, F, cs_variant))


def extension_frames(axiom: AxiomId, max_world: int = 2, cs_variant: str = "guarded") -> list[FrameBatch]:
    """Star images of the condition frames, one batch per carrier size."""
    by_size: dict[int, list] = {}
    for F in condition_frames(axiom, max_world, cs_variant):
        by_size.setdefault(F.n, []).append(star(F))
    return [FrameBatch.from_frames(v) for _, v in sorted(by_size.items())]


def extension_rule_sound(rule: RuleSchema, axiom: AxiomId, max_world: int = 2,
                         cs_variant: str = "guarded") -> SoundnessReport:
    total = SoundnessReport(rule.name)
    for batch in extension_frames(axiom, max_world, cs_variant):
        r = rule_sound(rule, frames=batch)
        total.frames_checked += r.frames_checked
        total.distinct_frames += r.distinct_frames
        total.violation_count += r.violation_count
        total.violations.extend(r.violations)
    return total


# ---------------------------------------------------------------- corpus roots


@dataclass
class RootReport:
    axiom: AxiomId
    frames_checked: int = 0
    condition_frames: int = 0
    failing_frames: int = 0
    example: TwoSortedFrame | None = None

    @property
    def ok(self) -> bool:
        return self.failing_frames == 0

    def summary(self) -> str:
        return (f"{self.axiom.value}: {self.frames_checked} frames, {self.condition_frames} meet the "
                f"condition, {self.failing_frames} refute the root")


def _nframe_of(row: np.ndarray, n: int) -> NFrame:
    fams = [0] * n
    for d, ext in enumerate(row):
        for x in range(n):
            if int(ext) >> x & 1:
                fams[x] |= 1 << d
    return NFrame(n, tuple(fams))


def _cframe_of(table: np.ndarray, n: int) -> CFrame:
    return CFrame(n, tuple(tuple(int(v) for v in row) for row in table))


def _condition_mask(batch: FrameBatch, axiom: AxiomId, cache: dict, cs_variant: str) -> np.ndarray:
    """Whether the single-type frame each two-sorted frame induces meets the
    condition of ``axiom``; frames inducing the same one share the work."""
    n = batch.nx
    if axiom.kind == "n":
        tab = nabla_table(batch)
        build = _nframe_of
    else:
        tab = selection_table(batch).reshape(len(batch), -1)
        build = lambda row, n: _cframe_of(row.reshape(n, 1 << n), n)
    keys, first, inverse = np.unique(row_keys(tab, n), return_index=True, return_inverse=True)
    verdict = np.empty(len(keys), dtype=bool)
    for i, (key, j) in enumerate(zip(keys.tolist(), first.tolist())):
        if (n, key) not in cache:
            cache[n, key] = fo_condition(axiom, build(tab[j], n), cs_variant)
        verdict[i] = cache[n, key]
    return verdict[np.asarray(inverse).reshape(-1)]


def root_validity(root: Sequent, axiom: AxiomId, max_x: int = 2, max_y: int = 3,
                  cs_variant: str = "guarded", chunk: int = 1 << 17) -> RootReport:
    """Check ``root`` on every frame with |X| <= max_x and |Y| <= max_y
    whose induced single-type frame meets the condition of ``axiom``.

    Neighbourhood axioms range over supported frames, conditional ones over
    all c-kind frames.
    """
    ineq = interpret_sequent(root)
    names: dict[str, str] = {}
    _metas(ineq.lhs, names)
    _metas(ineq.rhs, names)
    report = RootReport(axiom)
    cache: dict = {}
    for nx in range(1, max_x + 1):
        env = assignment_grid({k: nx for k in names})
        for ny in range(1, max_y + 1):
            if axiom.kind == "n":
                batches = supported_batch(nx, ny).chunks(chunk)
            else:
                batches = iter_relation_space("c", nx, ny, ["ni", "notni", "tf"], chunk)
            for b in batches:
                report.frames_checked += len(b)
                keep = np.nonzero(_condition_mask(b, axiom, cache, cs_variant))[0]
                report.condition_frames += len(keep)
                if len(keep) == 0:
                    continue
                sub = b.take(keep)
                ok = _holds(sub, ineq, env).all(axis=1)
                ok = np.broadcast_to(ok, (len(sub),))
                bad = np.nonzero(~ok)[0]
                report.failing_frames += len(bad)
                if len(bad) and report.example is None:
                    report.example = sub.frame(int(bad[0]))
    return report
