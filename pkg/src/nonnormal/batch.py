"""Vectorised evaluation of multi-type formulas over many frames at once.

A :class:`FrameBatch` stores ``F`` two-sorted frames over the same carriers
as numpy arrays of successor bitmasks.  Each connective is turned into a
lookup table indexed by frame and argument subset.  A formula is then
evaluated for every frame and every assignment with fancy indexing.  The
result has shape ``(F, s)``, or ``(1, s)`` when it does not depend on the
frame, where ``s`` is the number of assignments.

The single-frame evaluator in :mod:`nonnormal.semantics` is the reference.
Tests cross-check the two.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .semantics import TwoSortedFrame, full, members
from .syntax import MTFormula

REL_NAMES = ("ni", "notni", "nu", "nuc", "tf")

# relations each connective reads
OP_READS = {
    "box-ni": {"ni"}, "dia-in": {"ni"},
    "dia-notni": {"notni"}, "boxr-notni": {"notni"}, "box-notin": {"notni"}, "boxr-notin": {"notni"},
    "dia-nu": {"nu"}, "box-nu-adj": {"nu"},
    "box-nuc": {"nuc"}, "dia-nuc-adj": {"nuc"},
    "tri": {"tf"}, "blacktri": {"tf"}, "blacktrir": {"tf"},
}


def reads(f: MTFormula) -> frozenset[str]:
    """Relations whose content can influence the value of ``f``."""
    out = set(OP_READS.get(f.op, ()))
    for a in f.args:
        out |= reads(a)
    return frozenset(out)


def _dtype(n: int):
    return np.uint8 if n <= 8 else np.uint16 if n <= 16 else np.uint32


@dataclass
class FrameBatch:
    """``F`` frames with successor masks.

    ``ni``/``notni`` have shape (F, ny) with masks over X, ``nu``/``nuc``
    have shape (F, nx) with masks over Y, and ``tf`` has shape
    (F, nx, ny) with masks over X.
    """

    kind: str
    nx: int
    ny: int
    ni: np.ndarray
    notni: np.ndarray
    nu: np.ndarray | None = None
    nuc: np.ndarray | None = None
    tf: np.ndarray | None = None
    _tables: dict = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return self.ni.shape[0]

    # ------------------------------------------------------------ building

    @classmethod
    def from_frames(cls, frames: list[TwoSortedFrame]) -> "FrameBatch":
        K0 = frames[0]
        kind, nx, ny = K0.kind, K0.nx, K0.ny
        dx, dy = _dtype(nx), _dtype(ny)
        ni = np.array([K.ni_succ for K in frames], dtype=dx).reshape(len(frames), ny)
        notni = np.array([K.notni_succ for K in frames], dtype=dx).reshape(len(frames), ny)
        if kind == "n":
            nu = np.array([K.nu_succ for K in frames], dtype=dy).reshape(len(frames), nx)
            nuc = np.array([K.nuc_succ for K in frames], dtype=dy).reshape(len(frames), nx)
            return cls(kind, nx, ny, ni, notni, nu, nuc)
        tf = np.array([K.tf for K in frames], dtype=dx).reshape(len(frames), nx, ny)
        return cls(kind, nx, ny, ni, notni, tf=tf)

    def frame(self, i: int) -> TwoSortedFrame:
        """Materialise frame ``i`` as a :class:`TwoSortedFrame`."""
        r_ni = {(y, x) for y in range(self.ny) for x in members(int(self.ni[i, y]))}
        r_notni = {(y, x) for y in range(self.ny) for x in members(int(self.notni[i, y]))}
        if self.kind == "n":
            r_nu = {(x, y) for x in range(self.nx) for y in members(int(self.nu[i, x]))}
            r_nuc = {(x, y) for x in range(self.nx) for y in members(int(self.nuc[i, x]))}
            return TwoSortedFrame("n", self.nx, self.ny, r_ni, r_notni, r_nu, r_nuc)
        t_f = {(x, y, b) for x in range(self.nx) for y in range(self.ny)
               for b in members(int(self.tf[i, x, y]))}
        return TwoSortedFrame("c", self.nx, self.ny, r_ni, r_notni, t_f=t_f)

    def take(self, idx) -> "FrameBatch":
        idx = np.asarray(idx)
        pick = lambda a: None if a is None else a[idx]
        return FrameBatch(self.kind, self.nx, self.ny, self.ni[idx], self.notni[idx],
                          pick(self.nu), pick(self.nuc), pick(self.tf))

    def chunks(self, size: int):
        for start in range(0, len(self), size):
            yield self.take(np.arange(start, min(start + size, len(self))))

    def columns(self, rels) -> np.ndarray:
        """One row per frame holding the listed relations, flattened."""
        cols = [getattr(self, r).reshape(len(self), -1).astype(np.int64) for r in sorted(rels)]
        if not cols:
            return np.zeros((len(self), 0), dtype=np.int64)
        return np.concatenate(cols, axis=1)

    def unique(self, rels) -> tuple["FrameBatch", np.ndarray]:
        """Frames distinct on ``rels``; the other relations are emptied.

        Returns the projected batch and, for every original frame, the
        index of its representative.
        """
        cols = self.columns(rels)
        if cols.shape[1] == 0:
            first, inverse = np.array([0]), np.zeros(len(self), dtype=np.int64)
        else:
            _, first, inverse = np.unique(cols, axis=0, return_index=True, return_inverse=True)
        sub = self.take(np.sort(first))
        order = np.argsort(first)
        rank = np.empty_like(order)
        rank[order] = np.arange(len(order))
        for r in REL_NAMES:
            if r not in rels and getattr(sub, r) is not None:
                setattr(sub, r, np.zeros_like(getattr(sub, r)))
        return sub, rank[np.asarray(inverse).reshape(-1)]

    # ------------------------------------------------------------ tables

    def table(self, op: str) -> np.ndarray:
        if op not in self._tables:
            self._tables[op] = self._build_distinct(op)
        return self._tables[op]

    def _build_distinct(self, op: str) -> np.ndarray:
        # every table depends on a single relation; build it once per
        # distinct row of that relation
        (rel,) = OP_READS[op]
        data = getattr(self, rel)
        width = self.nx if rel in ("ni", "notni", "tf") else self.ny
        flat = data.reshape(len(self), -1)
        if len(self) < 64 or flat.shape[1] * width > 62:
            return self._build(op)
        keys, first, inverse = np.unique(row_keys(flat, width), return_index=True, return_inverse=True)
        if len(keys) == len(self):
            return self._build(op)
        sub = self.take(first)
        return sub._build(op)[np.asarray(inverse).reshape(-1)]

    def _build(self, op: str) -> np.ndarray:
        nx, ny = self.nx, self.ny
        dx, dy = _dtype(nx), _dtype(ny)
        if op == "box-ni":
            return _box(self.ni, nx, dy)
        if op == "dia-notni":
            return _dia(self.notni, nx, dy)
        if op == "boxr-notni":
            return _compl(_dia(self.notni, nx, dy), ny)
        if op == "dia-nu":
            return _dia(self.nu, ny, dx)
        if op == "box-nuc":
            return _box(self.nuc, ny, dx)
        if op == "dia-in":
            return _dia(_converse(self.ni, nx, dy), ny, dx)
        if op == "box-notin":
            return _box(_converse(self.notni, nx, dy), ny, dx)
        if op == "boxr-notin":
            return _compl(_dia(_converse(self.notni, nx, dy), ny, dx), nx)
        if op == "box-nu-adj":
            return _box(_converse(self.nu, ny, dx), nx, dy)
        if op == "dia-nuc-adj":
            return _dia(_converse(self.nuc, ny, dx), nx, dy)
        if op == "tri":
            # bad[f, x, A]: the y with tf[x][y] not inside A
            bad = _bad_over_y(self.tf, nx, dy)
            alpha = np.arange(1 << ny)[:, None]
            ok = (bad[:, None, :, :] & alpha[None, :, :, None]) == 0  # F, α, x, A
            return _pack(np.moveaxis(ok, 2, -1), dx)
        if op == "blacktrir":
            bad = _bad_over_y(self.tf, nx, dy)  # F, x, B
            sel = _bits(1 << nx, nx)  # A, x
            badA = np.bitwise_or.reduce(
                np.where(sel[None, :, :, None], bad[:, None, :, :], 0), axis=2)  # F, A, B
            return (full(ny) & ~badA.astype(np.int64)).astype(dy)
        if op == "blacktri":
            sel_a = _bits(1 << ny, ny)  # α, y
            sel_x = _bits(1 << nx, nx)  # A, x
            tf = self.tf
            # out[f, α, A] = OR over x in A, y in α of tf[f, x, y]
            t = np.where(sel_a[None, :, None, :], tf[:, None, :, :], 0)  # F, α, x, y
            t = np.bitwise_or.reduce(t, axis=3)  # F, α, x
            t = np.where(sel_x[None, None, :, :], t[:, :, None, :], 0)  # F, α, A, x
            return np.bitwise_or.reduce(t, axis=3).astype(dx)
        raise KeyError(op)

    # ------------------------------------------------------------ evaluation

    def evaluate(self, f: MTFormula, env: dict[str, np.ndarray], memo: dict | None = None) -> np.ndarray:
        """Values of ``f`` for every frame and assignment.

        ``env`` maps variable and metavariable names to integer arrays of
        shape ``(s,)``; the result has shape ``(F, s)`` or ``(1, s)``.
        """
        if memo is None:
            memo = {}
        return self._ev(f, env, memo)

    def _ev(self, f, env, memo):
        if f in memo:
            return memo[f]
        op = f.op
        fx, fy = full(self.nx), full(self.ny)
        if op in ("var", "meta"):
            v = np.asarray(env[f.name], dtype=np.int64)[None, :]
        elif op == "top":
            v = np.full((1, 1), fx, dtype=np.int64)
        elif op == "one":
            v = np.full((1, 1), fy, dtype=np.int64)
        elif op in ("bot", "zero"):
            v = np.zeros((1, 1), dtype=np.int64)
        else:
            args = [self._ev(a, env, memo) for a in f.args]
            if op == "neg":
                v = fx & ~args[0]
            elif op == "sim":
                v = fy & ~args[0]
            elif op in ("and", "cap"):
                v = args[0] & args[1]
            elif op in ("or", "cup"):
                v = args[0] | args[1]
            else:
                tab = self.table(op)
                rows = np.arange(len(self))[:, None]
                if len(args) == 1:
                    v = tab[rows, args[0]]
                else:
                    v = tab[rows, args[0], args[1]]
                v = v.astype(np.int64)
        memo[f] = v
        return v


def _bits(count: int, width: int) -> np.ndarray:
    """Boolean matrix ``[code, i]``: bit i of code."""
    codes = np.arange(count)[:, None]
    return (codes >> np.arange(width)[None, :]) & 1 == 1


def _pack(ok: np.ndarray, dtype) -> np.ndarray:
    """Pack a boolean last axis into bitmasks."""
    weights = (1 << np.arange(ok.shape[-1])).astype(np.int64)
    return (ok.astype(np.int64) * weights).sum(axis=-1).astype(dtype)


def _dia(succ: np.ndarray, k: int, dtype) -> np.ndarray:
    """table[f, T] = {a | succ[f, a] meets T}; T ranges over 2**k codes."""
    T = np.arange(1 << k, dtype=np.int64)[None, :, None]
    hit = (succ.astype(np.int64)[:, None, :] & T) != 0
    return _pack(hit, dtype)


def _box(succ: np.ndarray, k: int, dtype) -> np.ndarray:
    """table[f, T] = {a | succ[f, a] ⊆ T}."""
    T = np.arange(1 << k, dtype=np.int64)[None, :, None]
    ok = (succ.astype(np.int64)[:, None, :] & ~T & full(k)) == 0
    return _pack(ok, dtype)


def _compl(table: np.ndarray, n: int) -> np.ndarray:
    return (full(n) & ~table.astype(np.int64)).astype(table.dtype)


def _converse(succ: np.ndarray, n_tgt: int, dtype) -> np.ndarray:
    """From masks a -> {b} (shape F, n_src) to masks b -> {a} (shape F, n_tgt)."""
    bits = (succ.astype(np.int64)[:, None, :] >> np.arange(n_tgt)[None, :, None]) & 1
    return _pack(bits == 1, dtype)


def _bad_over_y(tf: np.ndarray, nx: int, dy) -> np.ndarray:
    """bad[f, x, A] = {y | tf[f, x, y] has an element outside A}."""
    A = np.arange(1 << nx, dtype=np.int64)
    outside = (tf.astype(np.int64)[:, :, None, :] & ~A[None, None, :, None] & full(nx)) != 0
    return _pack(outside, dy)  # F, x, A


# ---------------------------------------------------------------- generation


def _all_masks(count: int, width: int) -> np.ndarray:
    """Every tuple of ``count`` masks of ``width`` bits, shape (2**(count*width), count)."""
    codes = np.arange(1 << (count * width), dtype=np.int64)
    shifts = np.arange(count) * width
    return ((codes[:, None] >> shifts[None, :]) & full(width)).astype(_dtype(max(width, 1)))


def relation_space(kind: str, nx: int, ny: int, rels) -> FrameBatch:
    """All frames whose listed relations vary freely and others are empty."""
    rels = sorted(rels)
    shapes = {"ni": (ny, nx), "notni": (ny, nx), "nu": (nx, ny), "nuc": (nx, ny), "tf": (nx * ny, nx)}
    spaces = [_all_masks(*shapes[r]) for r in rels]
    total = 1
    for sp in spaces:
        total *= len(sp)
    if total > 1 << 22:
        raise ValueError(f"relation space of {total} frames is too large to enumerate")
    grids = np.meshgrid(*[np.arange(len(sp)) for sp in spaces], indexing="ij") if spaces else []
    idx = [g.reshape(-1) for g in grids]
    F = len(idx[0]) if idx else 1
    dx, dy = _dtype(nx), _dtype(ny)
    arrays = {"ni": np.zeros((F, ny), dx), "notni": np.zeros((F, ny), dx)}
    if kind == "n":
        arrays.update(nu=np.zeros((F, nx), dy), nuc=np.zeros((F, nx), dy))
    else:
        arrays.update(tf=np.zeros((F, nx, ny), dx))
    for r, sp, ix in zip(rels, spaces, idx):
        arrays[r] = sp[ix].reshape(arrays[r].shape).astype(arrays[r].dtype)
    return FrameBatch(kind, nx, ny, **arrays)


def _signatures(batch_dia_box: np.ndarray, nx: int) -> np.ndarray:
    """Encode a table (F, 2**nx) of X-masks as one integer per frame."""
    shifts = (np.arange(1 << nx) * nx).astype(np.int64)
    return (batch_dia_box.astype(np.int64) << shifts[None, :]).sum(axis=1)


@lru_cache(maxsize=None)
def supported_batch(nx: int, ny: int) -> FrameBatch:
    """Every supported n-kind frame over the carriers, as one batch.

    Left halves (R∋, Rν) and right halves (R∌, Rνᶜ) are grouped by the
    maps D ↦ <ν>[∋]D and D ↦ [νᶜ]<∌>D; a frame is supported exactly when
    its two halves induce the same map.
    """
    ni_nu = relation_space("n", nx, ny, ["ni", "nu"])
    notni_nuc = relation_space("n", nx, ny, ["notni", "nuc"])
    ls = _signatures(_compose(ni_nu, "dia-nu", "box-ni"), nx)
    rs = _signatures(_compose(notni_nuc, "box-nuc", "dia-notni"), nx)
    order_l = np.argsort(ls, kind="stable")
    order_r = np.argsort(rs, kind="stable")
    left_idx, right_idx = [], []
    keys_r, starts_r = np.unique(rs[order_r], return_index=True)
    ends_r = np.append(starts_r[1:], len(order_r))
    keys_l, starts_l = np.unique(ls[order_l], return_index=True)
    ends_l = np.append(starts_l[1:], len(order_l))
    rpos = {int(k): (s, e) for k, s, e in zip(keys_r, starts_r, ends_r)}
    for k, s, e in zip(keys_l, starts_l, ends_l):
        if int(k) not in rpos:
            continue
        rs_, re_ = rpos[int(k)]
        L = order_l[s:e]
        R = order_r[rs_:re_]
        left_idx.append(np.repeat(L, len(R)))
        right_idx.append(np.tile(R, len(L)))
    li = np.concatenate(left_idx) if left_idx else np.zeros(0, dtype=np.int64)
    ri = np.concatenate(right_idx) if right_idx else np.zeros(0, dtype=np.int64)
    return FrameBatch("n", nx, ny, ni_nu.ni[li], notni_nuc.notni[ri], ni_nu.nu[li], notni_nuc.nuc[ri])


def _compose(batch: FrameBatch, outer: str, inner: str) -> np.ndarray:
    """table (F, 2**nx): outer(inner(D)) for every D."""
    inner_t = batch.table(inner).astype(np.int64)
    outer_t = batch.table(outer)
    rows = np.arange(len(batch))[:, None]
    return outer_t[rows, inner_t]


def left_signature(nx, ny, r_ni, r_nu) -> tuple[int, ...]:
    """D ↦ <ν>[∋]D for one frame half, as a tuple over subset codes."""
    K = TwoSortedFrame("n", nx, ny, r_ni, frozenset(), r_nu, frozenset())
    out = []
    for d in range(1 << nx):
        boxni = sum(1 << y for y in range(ny) if not K.ni_succ[y] & ~d)
        out.append(sum(1 << x for x in range(nx) if K.nu_succ[x] & boxni))
    return tuple(out)


def right_signature(nx, ny, r_notni, r_nuc) -> tuple[int, ...]:
    """D ↦ [νᶜ]<∌>D for one frame half."""
    K = TwoSortedFrame("n", nx, ny, frozenset(), r_notni, frozenset(), r_nuc)
    out = []
    for d in range(1 << nx):
        dia = sum(1 << y for y in range(ny) if K.notni_succ[y] & d)
        out.append(sum(1 << x for x in range(nx) if not K.nuc_succ[x] & ~dia & full(ny)))
    return tuple(out)


def star_batch(frames) -> FrameBatch:
    """Star images of same-size single-type frames, built column-wise."""
    from .semantics import NFrame
    frames = list(frames)
    if not frames:
        raise ValueError("star_batch needs at least one frame")
    n = frames[0].n
    if any(F.n != n for F in frames):
        raise ValueError("star_batch needs frames of one size")
    ny, F_ = 1 << n, len(frames)
    dx, dy = _dtype(n), _dtype(ny)
    ys = np.arange(ny, dtype=np.int64)
    ni = np.broadcast_to(ys.astype(dx), (F_, ny)).copy()
    notni = np.broadcast_to((full(n) & ~ys).astype(dx), (F_, ny)).copy()
    if isinstance(frames[0], NFrame):
        if ny > 32:
            raise ValueError("star_batch supports at most five worlds")
        # the family nu(x) is already a mask over Y = P(W)
        nu = np.array([F.nu for F in frames], dtype=np.int64).reshape(F_, n)
        nuc = (full(ny) & ~nu).astype(dy)
        nu = nu.astype(dy)
        return FrameBatch("n", n, ny, ni, notni, nu, nuc)
    tf = np.array([F.f for F in frames], dtype=dx).reshape(F_, n, ny)
    return FrameBatch("c", n, ny, ni, notni, tf=tf)


def assignment_grid(sizes: dict[str, int]) -> dict[str, np.ndarray]:
    """All assignments of subsets to the named variables, flattened.

    ``sizes`` maps each name to the carrier size it ranges over.
    """
    names = sorted(sizes)
    ranges = [np.arange(1 << sizes[n], dtype=np.int64) for n in names]
    if not names:
        return {}
    grids = np.meshgrid(*ranges, indexing="ij")
    return {n: g.reshape(-1) for n, g in zip(names, grids)}


def grid_size(env: dict[str, np.ndarray]) -> int:
    return len(next(iter(env.values()))) if env else 1


def product_size(sizes: dict[str, int]) -> int:
    total = 1
    for k in sizes.values():
        total *= 1 << k
    return total


def iter_relation_space(kind: str, nx: int, ny: int, rels, chunk: int = 1 << 18):
    """Like :func:`relation_space` but yields the frames in batches of at
    most ``chunk``, so spaces beyond the in-memory limit can be swept."""
    rels = sorted(rels)
    shapes = {"ni": (ny, nx), "notni": (ny, nx), "nu": (nx, ny), "nuc": (nx, ny), "tf": (nx * ny, nx)}
    spaces = [_all_masks(*shapes[r]) for r in rels]
    sizes = [len(sp) for sp in spaces]
    total = int(np.prod(sizes)) if sizes else 1
    dx, dy = _dtype(nx), _dtype(ny)
    for start in range(0, total, chunk):
        flat = np.arange(start, min(start + chunk, total), dtype=np.int64)
        F = len(flat)
        arrays = {"ni": np.zeros((F, ny), dx), "notni": np.zeros((F, ny), dx)}
        if kind == "n":
            arrays.update(nu=np.zeros((F, nx), dy), nuc=np.zeros((F, nx), dy))
        else:
            arrays.update(tf=np.zeros((F, nx, ny), dx))
        rest = flat
        for r, sp, size in zip(reversed(rels), reversed(spaces), reversed(sizes)):
            rest, ix = np.divmod(rest, size)
            arrays[r] = sp[ix].reshape(arrays[r].shape).astype(arrays[r].dtype)
        yield FrameBatch(kind, nx, ny, **arrays)


def nabla_table(batch: FrameBatch) -> np.ndarray:
    """(F, 2**nx): D ↦ <ν>[∋]D, the neighbourhood map an n-kind frame induces."""
    return _compose(batch, "dia-nu", "box-ni").astype(np.int64)


def selection_table(batch: FrameBatch) -> np.ndarray:
    """(F, nx, 2**nx): the selection function a c-kind frame induces.

    With α(D) = [∋]D ∩ [∌⟩D, the value at (x, D) is the union of
    T_f(x, y) over y in α(D).
    """
    alpha = batch.table("box-ni").astype(np.int64) & batch.table("boxr-notni").astype(np.int64)
    tf = batch.tf.astype(np.int64)
    out = np.zeros((len(batch), batch.nx, alpha.shape[1]), dtype=np.int64)
    for y in range(batch.ny):
        hit = ((alpha >> y) & 1).astype(bool)[:, None, :]
        out |= np.where(hit, tf[:, :, y][:, :, None], 0)
    return out


def row_keys(table: np.ndarray, width: int) -> np.ndarray:
    """Pack each row of ``width``-bit entries into one integer per row."""
    table = table.reshape(len(table), -1).astype(np.int64)
    if table.shape[1] * width > 62:
        raise ValueError("rows too wide to pack")
    shifts = (np.arange(table.shape[1]) * width).astype(np.int64)
    return (table << shifts[None, :]).sum(axis=1)
