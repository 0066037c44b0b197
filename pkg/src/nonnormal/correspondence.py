"""Axioms, their first-order frame conditions, frame enumerators, and the
harness comparing axiom validity with the conditions."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterator

from . import syntax as sx
from .semantics import CFrame, FrameError, NFrame, TwoSortedFrame, full, members, valid
from .syntax import Inequality, STFormula


class AxiomId(enum.Enum):
    N = "N"
    P = "P"
    C = "C"
    T = "T"
    Four = "4"
    FourPrime = "4'"
    Five = "5"
    B = "B"
    D = "D"
    CS = "CS"
    CEM = "CEM"
    ID = "ID"

    @property
    def kind(self) -> str:
        return "c" if self in COND_AXIOMS else "n"

    @classmethod
    def parse(cls, text: str) -> "AxiomId":
        aliases = {"4p": "4'", "4prime": "4'", "four": "4", "fourprime": "4'", "five": "5"}
        key = aliases.get(text.lower(), text)
        for a in cls:
            if key in (a.value, a.name) or key.upper() == a.value:
                return a
        raise ValueError(f"unknown axiom {text!r}")


COND_AXIOMS = frozenset({AxiomId.CS, AxiomId.CEM, AxiomId.ID})
NABLA_AXIOMS = tuple(a for a in AxiomId if a not in COND_AXIOMS)

_p, _q = sx.st_var("p"), sx.st_var("q")
_n = sx.nabla


def axiom_sequent(a: AxiomId) -> Inequality:
    """The axiom as a sequent ``lhs ⊢ rhs`` (⊤ on the left for theorems)."""
    T = sx.ST_TOP
    rows = {
        AxiomId.N: (T, _n(T)),
        AxiomId.P: (T, sx.st_neg(_n(sx.ST_BOT))),
        AxiomId.C: (sx.st_and(_n(_p), _n(_q)), _n(sx.st_and(_p, _q))),
        AxiomId.T: (_n(_p), _p),
        AxiomId.Four: (_n(_n(_p)), _n(_p)),
        AxiomId.FourPrime: (_n(_p), _n(_n(_p))),
        AxiomId.Five: (sx.st_neg(_n(sx.st_neg(_p))), _n(sx.st_neg(_n(sx.st_neg(_p))))),
        AxiomId.B: (_p, _n(sx.st_neg(_n(sx.st_neg(_p))))),
        AxiomId.D: (_n(_p), sx.st_neg(_n(sx.st_neg(_p)))),
        AxiomId.CS: (sx.st_and(_p, _q), sx.cond(_p, _q)),
        AxiomId.CEM: (T, sx.st_or(sx.cond(_p, _q), sx.cond(_p, sx.st_neg(_q)))),
        AxiomId.ID: (T, sx.cond(_p, _p)),
    }
    return Inequality(*rows[a])


def axiom_formula(a: AxiomId) -> STFormula:
    """The axiom as a single formula; implications are expanded."""
    q = axiom_sequent(a)
    if q.lhs == sx.ST_TOP:
        return q.rhs
    return sx.st_imp(q.lhs, q.rhs)


# ---------------------------------------------------------------- conditions


def _has(fam: int, d: int) -> bool:
    return bool(fam >> d & 1)


def fo_condition(a: AxiomId, frame, cs_variant: str = "theorem") -> bool:
    """Evaluate the first-order condition of ``a`` by direct enumeration.

    ``cs_variant`` selects between the unguarded CS condition
    (``"theorem"``: f(x,Z) ⊆ {x}) and the guarded one (``"guarded"``:
    x ∈ Z implies f(x,Z) ⊆ {x}).
    """
    if a.kind == "n":
        if not isinstance(frame, NFrame):
            raise FrameError(f"axiom {a.value} is evaluated on neighbourhood frames")
        return _nabla_condition(a, frame)
    if not isinstance(frame, CFrame):
        raise FrameError(f"axiom {a.value} is evaluated on conditional frames")
    return _cond_condition(a, frame, cs_variant)


def _nabla_condition(a: AxiomId, F: NFrame) -> bool:
    n, nu = F.n, F.nu
    W = range(n)
    subsets = range(1 << n)
    top = full(n)

    def ext(x):  # {y | x ∈ ν(y)}
        return sum(1 << y for y in W if _has(nu[y], x))

    if a is AxiomId.N:
        return all(_has(nu[w], top) for w in W)
    if a is AxiomId.P:
        return all(not _has(nu[w], 0) for w in W)
    if a is AxiomId.C:
        return all(_has(nu[w], x & y) for w in W for x in subsets for y in subsets
                   if _has(nu[w], x) and _has(nu[w], y))
    if a is AxiomId.T:
        return all(x >> w & 1 for w in W for x in subsets if _has(nu[w], x))
    if a is AxiomId.Four:
        return all(_has(nu[w], y)
                   for w in W for y in subsets for x in subsets
                   if _has(nu[w], x) and all(_has(nu[v], y) for v in members(x)))
    if a is AxiomId.FourPrime:
        return all(_has(nu[w], ext(x)) for w in W for x in subsets if _has(nu[w], x))
    if a is AxiomId.Five:
        return all(_has(nu[w], top & ~ext(x)) for w in W for x in subsets if not _has(nu[w], x))
    if a is AxiomId.B:
        return all(_has(nu[w], top & ~ext(top & ~x)) for w in W for x in subsets if x >> w & 1)
    if a is AxiomId.D:
        return all(not _has(nu[w], top & ~x) for w in W for x in subsets if _has(nu[w], x))
    raise ValueError(a)


def _cond_condition(a: AxiomId, F: CFrame, cs_variant: str) -> bool:
    W, subsets = range(F.n), range(1 << F.n)
    if a is AxiomId.CS:
        if cs_variant == "theorem":
            return all(not F.f[x][z] & ~(1 << x) for x in W for z in subsets)
        if cs_variant == "guarded":
            return all(not F.f[x][z] & ~(1 << x) for x in W for z in subsets if z >> x & 1)
        raise ValueError(f"unknown CS variant {cs_variant!r}")
    if a is AxiomId.CEM:
        return all(len(members(F.f[y][x])) <= 1 for x in subsets for y in W)
    if a is AxiomId.ID:
        return all(not F.f[x][z] & ~z for x in W for z in subsets)
    raise ValueError(a)


# ---------------------------------------------------------------- enumerators


def upsets(n: int) -> list[int]:
    """Upward-closed families of P({0..n-1}) as bitmasks over subset codes,
    in increasing order.  Built from antichains of minimal elements."""
    codes = sorted(range(1 << n), key=lambda d: (bin(d).count("1"), d))
    found = set()

    def close(antichain):
        fam = 0
        for d in range(1 << n):
            if any(m & d == m for m in antichain):
                fam |= 1 << d
        return fam

    def grow(i, chosen):
        if i == len(codes):
            found.add(close(chosen))
            return
        grow(i + 1, chosen)
        d = codes[i]
        if all(not (c & d == c or c & d == d) for c in chosen):
            grow(i + 1, chosen + [d])

    grow(0, [])
    return sorted(found)


def enumerate_nframes(n: int) -> Iterator[NFrame]:
    """Every monotone neighbourhood frame on {0..n-1}, once each."""
    choices = upsets(n)
    for fams in itertools.product(choices, repeat=n):
        yield NFrame(n, fams)


def enumerate_cframes(n: int) -> Iterator[CFrame]:
    """Every selection function on {0..n-1}, once each."""
    k = 1 << n
    for outs in itertools.product(range(k), repeat=n * k):
        yield CFrame(n, tuple(outs[w * k:(w + 1) * k] for w in range(n)))


def _relations(na: int, nb: int) -> Iterator[frozenset]:
    pairs = [(a, b) for a in range(na) for b in range(nb)]
    for code in range(1 << len(pairs)):
        yield frozenset(pr for i, pr in enumerate(pairs) if code >> i & 1)


def enumerate_two_sorted(nx: int, ny: int, supported_only: bool = False,
                         kind: str = "n") -> Iterator[TwoSortedFrame]:
    """Every two-sorted frame over the given carriers.

    For kind ``"n"`` with ``supported_only`` the frames are produced by
    pairing (R∋, Rν) halves with (R∌, Rνᶜ) halves that induce the same map
    D ↦ <ν>[∋]D = [νᶜ]<∌>D, which yields exactly the supported frames.
    """
    yx = list(_relations(ny, nx))
    xy = list(_relations(nx, ny))
    if kind == "c":
        triples = [(a, y, b) for a in range(nx) for y in range(ny) for b in range(nx)]
        for r_ni, r_notni in itertools.product(yx, yx):
            for code in range(1 << len(triples)):
                t_f = frozenset(t for i, t in enumerate(triples) if code >> i & 1)
                yield TwoSortedFrame("c", nx, ny, r_ni, r_notni, t_f=t_f)
        return
    if not supported_only:
        for r_ni, r_notni, r_nu, r_nuc in itertools.product(yx, yx, xy, xy):
            yield TwoSortedFrame("n", nx, ny, r_ni, r_notni, r_nu, r_nuc)
        return
    from .batch import left_signature, right_signature
    right: dict[tuple, list] = {}
    for r_notni, r_nuc in itertools.product(yx, xy):
        right.setdefault(right_signature(nx, ny, r_notni, r_nuc), []).append((r_notni, r_nuc))
    for r_ni, r_nu in itertools.product(yx, xy):
        for r_notni, r_nuc in right.get(left_signature(nx, ny, r_ni, r_nu), ()):
            yield TwoSortedFrame("n", nx, ny, r_ni, r_notni, r_nu, r_nuc)


def frames_for(a: AxiomId, size: int):
    return enumerate_cframes(size) if a.kind == "c" else enumerate_nframes(size)


# ---------------------------------------------------------------- harness


@dataclass(frozen=True)
class Mismatch:
    frame_id: str
    frame: object
    axiom_valid: bool
    condition_holds: bool


@dataclass
class CorrespondenceReport:
    axiom: AxiomId
    frames_checked: int = 0
    mismatches: list[Mismatch] = field(default_factory=list)
    per_size: dict[int, int] = field(default_factory=dict)
    cs_variant: str = "theorem"

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def summary(self) -> str:
        return f"{self.frames_checked} frames, {len(self.mismatches)} mismatches"


def verify_correspondence(a: AxiomId, max_size: int, min_size: int | None = None,
                          cs_variant: str = "theorem", on_frame=None) -> CorrespondenceReport:
    """Compare axiom validity with the frame condition on every frame whose
    size lies in ``min_size..max_size`` (``min_size`` defaults to
    ``max_size``, so a single size is swept unless asked otherwise).

    ``on_frame(frame_id, axiom_valid, condition_holds)`` is called for
    every frame when given.
    """
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    lo = max_size if min_size is None else max(min_size, 0)
    formula = axiom_formula(a)
    report = CorrespondenceReport(a, cs_variant=cs_variant)
    for size in range(lo, max_size + 1):
        count = 0
        for i, F in enumerate(frames_for(a, size)):
            av = valid(F, formula)
            cv = fo_condition(a, F, cs_variant)
            if on_frame is not None:
                on_frame(f"{size}:{i}", av, cv)
            if av != cv:
                report.mismatches.append(Mismatch(f"{size}:{i}", F, av, cv))
            count += 1
        report.per_size[size] = count
        report.frames_checked += count
    return report


@dataclass(frozen=True)
class CSComparison:
    frames_checked: int
    theorem_mismatches: int
    guarded_mismatches: int
    example: Mismatch | None

    @property
    def matching_variants(self) -> tuple[str, ...]:
        out = []
        if self.theorem_mismatches == 0:
            out.append("theorem")
        if self.guarded_mismatches == 0:
            out.append("guarded")
        return tuple(out)


def compare_cs_variants(max_size: int, min_size: int = 1) -> CSComparison:
    """Run both CS conditions against axiom validity and report which agrees."""
    formula = axiom_formula(AxiomId.CS)
    checked = bad_thm = bad_grd = 0
    example = None
    for size in range(min_size, max_size + 1):
        for i, F in enumerate(enumerate_cframes(size)):
            av = valid(F, formula)
            thm = fo_condition(AxiomId.CS, F, "theorem")
            grd = fo_condition(AxiomId.CS, F, "guarded")
            checked += 1
            if av != thm:
                bad_thm += 1
                if example is None:
                    example = Mismatch(f"{size}:{i}", F, av, thm)
            bad_grd += av != grd
    return CSComparison(checked, bad_thm, bad_grd, example)
