"""Finite frames, evaluation, and the star / unstar constructions.

Subsets of a carrier ``{0, ..., n-1}`` are stored as Python ``int``
bitmasks: element ``i`` belongs to ``m`` iff bit ``i`` of ``m`` is set.  A
family of subsets (a neighbourhood) is itself a bitmask over the
``2**n`` subset codes.  The neighbourhood carrier of a star frame indexes
``P(W)`` by the same codes, so ``y = 5`` stands for ``{0, 2}``.

The set-level relational operators at the top of the module work on
arbitrary hashable elements and serve as the readable reference.  The frame
evaluators further down reimplement them on bitmasks for speed.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Union

from .syntax import Inequality, MTFormula, S, STFormula, variables

# ---------------------------------------------------------------- bitmasks


def mask_of(elements: Iterable[int]) -> int:
    m = 0
    for e in elements:
        m |= 1 << e
    return m


def members(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def full(n: int) -> int:
    return (1 << n) - 1


# ---------------------------------------------------------------- set-level operators


def _check_sub(sub, carrier, what):
    extra = set(sub) - set(carrier)
    if extra:
        raise ValueError(f"{what} contains elements outside its carrier: {sorted(extra, key=repr)}")


def preimage(R, target) -> frozenset:
    """R^{-1}[target] for a binary relation R."""
    target = set(target)
    return frozenset(s for s, t in R if t in target)


def image(R, source) -> frozenset:
    """R[source] for a binary relation R."""
    source = set(source)
    return frozenset(t for s, t in R if s in source)


def rel_dia(R, Tp, S_, T_) -> frozenset:
    """<R>T' = R^{-1}[T']."""
    _check_sub(Tp, T_, "T'")
    return preimage(R, Tp)


def rel_box(R, Tp, S_, T_) -> frozenset:
    """[R]T' = (R^{-1}[T'^c])^c."""
    _check_sub(Tp, T_, "T'")
    return frozenset(S_) - preimage(R, set(T_) - set(Tp))


def rel_boxr(R, Tp, S_, T_) -> frozenset:
    """[R>T' = (R^{-1}[T'])^c."""
    _check_sub(Tp, T_, "T'")
    return frozenset(S_) - preimage(R, Tp)


def rel_diar(R, Tp, S_, T_) -> frozenset:
    """<R]T' = R^{-1}[T'^c]."""
    _check_sub(Tp, T_, "T'")
    return preimage(R, set(T_) - set(Tp))


def converse(R) -> frozenset:
    return frozenset((t, s) for s, t in R)


def tern_tri(R, Tp, Up, S_, T_, U_) -> frozenset:
    """T' |> U' = (R^(0)[T', U'^c])^c, a subset of S."""
    _check_sub(Tp, T_, "T'")
    _check_sub(Up, U_, "U'")
    Tp, Up = set(Tp), set(Up)
    bad = {s for s, t, u in R if t in Tp and u not in Up}
    return frozenset(S_) - bad


def tern_btri(R, Tp, Sp, S_, T_, U_) -> frozenset:
    """T' black-tri S' = {u | exists s in S', t in T' with R(s, t, u)}."""
    _check_sub(Tp, T_, "T'")
    _check_sub(Sp, S_, "S'")
    Tp, Sp = set(Tp), set(Sp)
    return frozenset(u for s, t, u in R if s in Sp and t in Tp)


def tern_btrir(R, Sp, Up, S_, T_, U_) -> frozenset:
    """S' black-tri-right U' = (R^(1)[S', U'^c])^c, a subset of T."""
    _check_sub(Sp, S_, "S'")
    _check_sub(Up, U_, "U'")
    Sp, Up = set(Sp), set(Up)
    bad = {t for s, t, u in R if s in Sp and u not in Up}
    return frozenset(T_) - bad


# ---------------------------------------------------------------- frames


class FrameError(ValueError):
    """Raised for malformed frames or frame/formula kind mismatches."""


def is_upset(family: int, n: int) -> bool:
    """True iff the family (bitmask over subset codes) is upward closed."""
    for d in range(1 << n):
        if family >> d & 1:
            for i in range(n):
                if not family >> (d | 1 << i) & 1:
                    return False
    return True


@dataclass(frozen=True)
class NFrame:
    """A neighbourhood frame on worlds ``0..n-1``.

    ``nu[w]`` is a bitmask over subset codes: ``D`` is a neighbourhood of
    ``w`` iff bit ``D`` of ``nu[w]`` is set.  With ``strict`` (the default)
    a non-monotone frame is rejected; otherwise a warning is issued.
    """

    n: int
    nu: tuple[int, ...]
    strict: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self) -> None:
        if len(self.nu) != self.n:
            raise FrameError("nu must list one family per world")
        limit = 1 << (1 << self.n)
        if any(not 0 <= fam < limit for fam in self.nu):
            raise FrameError("neighbourhood family refers to subsets outside P(W)")
        bad = [w for w, fam in enumerate(self.nu) if not is_upset(fam, self.n)]
        if bad:
            msg = f"neighbourhoods of worlds {bad} are not upward closed"
            if self.strict:
                raise FrameError(msg)
            warnings.warn(msg, stacklevel=3)

    @property
    def monotone(self) -> bool:
        return all(is_upset(fam, self.n) for fam in self.nu)

    @classmethod
    def from_sets(cls, n: int, nu: Mapping[int, Iterable[Iterable[int]]], strict: bool = True) -> "NFrame":
        fams = [0] * n
        for w, sets in nu.items():
            for d in sets:
                fams[w] |= 1 << mask_of(d)
        return cls(n, tuple(fams), strict)

    def neighbourhoods(self, w: int) -> list[frozenset[int]]:
        return [frozenset(members(d)) for d in range(1 << self.n) if self.nu[w] >> d & 1]

    def nabla(self, x: int) -> int:
        """Complex-algebra box: the worlds having x as a neighbourhood."""
        return mask_of(w for w in range(self.n) if self.nu[w] >> x & 1)


@dataclass(frozen=True)
class CFrame:
    """A conditional frame on worlds ``0..n-1``; ``f[w][D]`` is a bitmask."""

    n: int
    f: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(self.f) != self.n or any(len(row) != 1 << self.n for row in self.f):
            raise FrameError("selection function must be total on W x P(W)")
        if any(not 0 <= out <= full(self.n) for row in self.f for out in row):
            raise FrameError("selection function returns elements outside W")

    @classmethod
    def from_sets(cls, n: int, f: Mapping[tuple[int, Iterable[int]], Iterable[int]]) -> "CFrame":
        table = [[None] * (1 << n) for _ in range(n)]
        for (w, d), out in f.items():
            table[w][mask_of(d)] = mask_of(out)
        if any(v is None for row in table for v in row):
            raise FrameError("selection function must be total on W x P(W)")
        return cls(n, tuple(tuple(row) for row in table))

    def cond(self, x: int, y: int) -> int:
        """Complex-algebra conditional {w | f(w, x) ⊆ y}."""
        return mask_of(w for w in range(self.n) if not self.f[w][x] & ~y)


Rel2 = frozenset  # of (a, b) pairs
Rel3 = frozenset  # of (x, y, x') triples


@dataclass(frozen=True)
class TwoSortedFrame:
    """A two-sorted frame with state carrier ``0..nx-1`` and neighbourhood
    carrier ``0..ny-1``.

    ``r_ni`` and ``r_notni`` hold pairs ``(y, x)``; ``r_nu`` and ``r_nuc``
    hold pairs ``(x, y)``; ``t_f`` holds triples ``(x, y, x')``.  Kind
    ``"n"`` frames leave ``t_f`` empty and kind ``"c"`` frames leave
    ``r_nu``/``r_nuc`` empty.
    """

    kind: str
    nx: int
    ny: int
    r_ni: Rel2 = frozenset()
    r_notni: Rel2 = frozenset()
    r_nu: Rel2 = frozenset()
    r_nuc: Rel2 = frozenset()
    t_f: Rel3 = frozenset()

    def __post_init__(self) -> None:
        if self.kind not in ("n", "c"):
            raise FrameError("kind must be 'n' or 'c'")
        for name in ("r_ni", "r_notni", "r_nu", "r_nuc", "t_f"):
            object.__setattr__(self, name, frozenset(tuple(t) for t in getattr(self, name)))
        X, Y = range(self.nx), range(self.ny)
        ok = (all(y in Y and x in X for y, x in self.r_ni | self.r_notni)
              and all(x in X and y in Y for x, y in self.r_nu | self.r_nuc)
              and all(a in X and y in Y and b in X for a, y, b in self.t_f))
        if not ok:
            raise FrameError("relation mentions an element outside its carrier")
        if self.kind == "n" and self.t_f:
            raise FrameError("n-kind frames carry no ternary relation")
        if self.kind == "c" and (self.r_nu or self.r_nuc):
            raise FrameError("c-kind frames carry no neighbourhood relations")

    # successor masks, computed once per frame
    @cached_property
    def ni_succ(self) -> tuple[int, ...]:
        return _succ(self.r_ni, self.ny)

    @cached_property
    def notni_succ(self) -> tuple[int, ...]:
        return _succ(self.r_notni, self.ny)

    @cached_property
    def nu_succ(self) -> tuple[int, ...]:
        return _succ(self.r_nu, self.nx)

    @cached_property
    def nuc_succ(self) -> tuple[int, ...]:
        return _succ(self.r_nuc, self.nx)

    @cached_property
    def tf(self) -> tuple[tuple[int, ...], ...]:
        table = [[0] * self.ny for _ in range(self.nx)]
        for x, y, x2 in self.t_f:
            table[x][y] |= 1 << x2
        return tuple(tuple(r) for r in table)

    def carrier_size(self, sort: str) -> int:
        return self.nx if sort == S else self.ny


def _succ(R, n):
    out = [0] * n
    for a, b in R:
        out[a] |= 1 << b
    return tuple(out)


Frame = Union[NFrame, CFrame, TwoSortedFrame]
Valuation = Mapping[str, Union[int, Iterable[int]]]


def _norm_val(V: Valuation) -> dict[str, int]:
    return {k: (v if isinstance(v, int) else mask_of(v)) for k, v in V.items()}


# ---------------------------------------------------------------- single-type evaluation


def eval_st(frame: NFrame | CFrame, V: Valuation, phi: STFormula) -> int:
    """Truth set of ``phi`` as a bitmask over W."""
    return _eval_st(frame, _norm_val(V), phi, full(frame.n))


def _eval_st(F, V, phi, top):
    op = phi.op
    if op == "var":
        try:
            return V[phi.name] & top
        except KeyError:
            raise KeyError(f"valuation misses variable {phi.name!r}") from None
    if op == "top":
        return top
    if op == "bot":
        return 0
    if op == "neg":
        return top & ~_eval_st(F, V, phi.args[0], top)
    if op == "and":
        return _eval_st(F, V, phi.args[0], top) & _eval_st(F, V, phi.args[1], top)
    if op == "nabla":
        if not isinstance(F, NFrame):
            raise FrameError("nabla needs a neighbourhood frame")
        d = _eval_st(F, V, phi.args[0], top)
        out = 0
        for w, fam in enumerate(F.nu):
            if fam >> d & 1:
                out |= 1 << w
        return out
    if op == "cond":
        if not isinstance(F, CFrame):
            raise FrameError("cond needs a conditional frame")
        a = _eval_st(F, V, phi.args[0], top)
        b = _eval_st(F, V, phi.args[1], top)
        out = 0
        for w, row in enumerate(F.f):
            if not row[a] & ~b:
                out |= 1 << w
        return out
    raise FrameError(f"unknown single-type connective {op!r}")


# ---------------------------------------------------------------- multi-type evaluation


_NABLA_OPS = {"dia-nu", "box-nuc", "box-nu-adj", "dia-nuc-adj"}
_COND_OPS = {"tri", "blacktri", "blacktrir"}


def eval_mt(frame: TwoSortedFrame, V: Valuation, f: MTFormula) -> int:
    """Extension of ``f`` as a bitmask over X (sort S) or Y (sort N).

    Metavariables are looked up in ``V`` by name, like propositional
    variables; this lets schematic rules be evaluated directly.
    """
    return _eval_mt(frame, _norm_val(V), f)


def _eval_mt(K: TwoSortedFrame, V, f):
    op = f.op
    fx, fy = full(K.nx), full(K.ny)
    if op in ("var", "meta"):
        try:
            return V[f.name] & (fx if f.sort == S else fy)
        except KeyError:
            raise KeyError(f"valuation misses {f.name!r}") from None
    if op in _NABLA_OPS and K.kind != "n":
        raise FrameError(f"{op} needs an n-kind frame")
    if op in _COND_OPS and K.kind != "c":
        raise FrameError(f"{op} needs a c-kind frame")
    a = [_eval_mt(K, V, g) for g in f.args]
    if op == "top":
        return fx
    if op == "bot" or op == "zero":
        return 0
    if op == "one":
        return fy
    if op == "neg":
        return fx & ~a[0]
    if op == "sim":
        return fy & ~a[0]
    if op in ("and", "cap"):
        return a[0] & a[1]
    if op in ("or", "cup"):
        return a[0] | a[1]
    if op == "box-ni":
        return mask_of(y for y in range(K.ny) if not K.ni_succ[y] & ~a[0])
    if op == "dia-notni":
        return mask_of(y for y in range(K.ny) if K.notni_succ[y] & a[0])
    if op == "boxr-notni":
        return mask_of(y for y in range(K.ny) if not K.notni_succ[y] & a[0])
    if op == "dia-nu":
        return mask_of(x for x in range(K.nx) if K.nu_succ[x] & a[0])
    if op == "box-nuc":
        return mask_of(x for x in range(K.nx) if not K.nuc_succ[x] & ~a[0])
    if op == "tri":
        return mask_of(x for x in range(K.nx)
                       if all(not K.tf[x][y] & ~a[1] for y in members(a[0])))
    if op == "dia-in":
        return _union(K.ni_succ[y] for y in members(a[0]))
    if op == "box-notin":
        return fx & ~_union(K.notni_succ[y] for y in members(fy & ~a[0]))
    if op == "boxr-notin":
        return fx & ~_union(K.notni_succ[y] for y in members(a[0]))
    if op == "box-nu-adj":
        return fy & ~_union(K.nu_succ[x] for x in members(fx & ~a[0]))
    if op == "dia-nuc-adj":
        return _union(K.nuc_succ[x] for x in members(a[0]))
    if op == "blacktri":
        return _union(K.tf[x][y] for x in members(a[1]) for y in members(a[0]))
    if op == "blacktrir":
        return mask_of(y for y in range(K.ny)
                       if all(not K.tf[x][y] & ~a[1] for x in members(a[0])))
    raise FrameError(f"unknown connective {op!r}")


def _union(masks):
    out = 0
    for m in masks:
        out |= m
    return out


# ---------------------------------------------------------------- validity


def valuations(names: Iterable[str], n: int):
    """All maps from ``names`` to subsets of an n-element carrier."""
    names = sorted(names)
    for combo in itertools.product(range(1 << n), repeat=len(names)):
        yield dict(zip(names, combo))


def valid(frame: Frame, x: STFormula | MTFormula | Inequality) -> bool:
    """Frame validity of a formula (true everywhere) or an inequality."""
    return find_countermodel(frame, x) is None


def find_countermodel(frame: Frame, x) -> dict[str, int] | None:
    """A refuting valuation, or None when ``x`` is valid on ``frame``."""
    if isinstance(frame, TwoSortedFrame):
        ev, n = _eval_mt, frame.nx
    else:
        top = full(frame.n)
        ev, n = (lambda F, V, g: _eval_st(F, V, g, top)), frame.n
    for V in valuations(variables(x), n):
        if isinstance(x, Inequality):
            if ev(frame, V, x.lhs) & ~ev(frame, V, x.rhs):
                return V
        elif ev(frame, V, x) != full(n):
            return V
    return None


# ---------------------------------------------------------------- star / unstar


def star(frame: NFrame | CFrame) -> TwoSortedFrame:
    """The two-sorted frame whose neighbourhood carrier is P(W)."""
    n = frame.n
    ny = 1 << n
    r_ni = {(z, x) for z in range(ny) for x in range(n) if z >> x & 1}
    r_notni = {(z, x) for z in range(ny) for x in range(n) if not z >> x & 1}
    if isinstance(frame, NFrame):
        r_nu = {(x, z) for x in range(n) for z in range(ny) if frame.nu[x] >> z & 1}
        r_nuc = {(x, z) for x in range(n) for z in range(ny) if not frame.nu[x] >> z & 1}
        return TwoSortedFrame("n", n, ny, r_ni, r_notni, r_nu, r_nuc)
    t_f = {(x, z, x2) for x in range(n) for z in range(ny) for x2 in members(frame.f[x][z])}
    return TwoSortedFrame("c", n, ny, r_ni, r_notni, t_f=t_f)


def _support_sides(K: TwoSortedFrame, d: int) -> tuple[int, int]:
    fx, fy = full(K.nx), full(K.ny)
    boxni = mask_of(y for y in range(K.ny) if not K.ni_succ[y] & ~d)
    left = mask_of(x for x in range(K.nx) if K.nu_succ[x] & boxni)
    dianotni = mask_of(y for y in range(K.ny) if K.notni_succ[y] & d)
    right = mask_of(x for x in range(K.nx) if not K.nuc_succ[x] & ~dianotni & fy)
    return left & fx, right & fx


def is_supported(K: TwoSortedFrame) -> bool:
    """Check, for every D ⊆ X, that <ν>[∋]D equals [νᶜ]<∌>D."""
    if K.kind != "n":
        raise FrameError("supportedness is defined for n-kind frames only")
    return all(l == r for l, r in (_support_sides(K, d) for d in range(1 << K.nx)))


def unstar(K: TwoSortedFrame) -> NFrame | CFrame:
    """Recover a single-type frame on X from a two-sorted one."""
    n = K.nx
    if K.kind == "n":
        if not is_supported(K):
            raise FrameError("unstar needs a supported n-kind frame")
        fams = [0] * n
        for d in range(1 << n):
            left, _ = _support_sides(K, d)
            for x in members(left):
                fams[x] |= 1 << d
        return NFrame(n, tuple(fams))
    fx, fy = full(n), full(K.ny)
    rows = [[fx] * (1 << n) for _ in range(n)]
    for d in range(1 << n):
        boxni = mask_of(y for y in range(K.ny) if not K.ni_succ[y] & ~d)
        boxr = mask_of(y for y in range(K.ny) if not K.notni_succ[y] & d)
        alpha = boxni & boxr & fy
        for c in range(1 << n):
            holds = mask_of(x for x in range(n) if all(not K.tf[x][y] & ~c for y in members(alpha)))
            for x in members(holds):
                rows[x][d] &= c
    return CFrame(n, tuple(tuple(r) for r in rows))
