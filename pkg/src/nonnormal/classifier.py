"""Signed generation trees and the analytic inductive test.

Every node gets the set of classes its (sign, connective) pair belongs to.
Some pairs sit in two classes, one Skeleton and one PIA (for instance
positive meet is both SLR and SRA).  A branch is read from the root: the
longest run of Skeleton-capable nodes forms the Skeleton part, and every
node below it must be PIA-capable.  Inside the PIA part a node acts with
its PIA class, which decides whether the SRR side condition applies.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .syntax import Inequality, MTFormula, show, well_sorted

ONE, DUAL = "1", "∂"
DELTA, SLR, SRA, SRR, LEAF = "DeltaAdjoint", "SLR", "SRA", "SRR", "leaf"
SKELETON = frozenset({DELTA, SLR})
PIA = frozenset({SRA, SRR})

# coordinates whose order type is ∂
_ANTITONE = {"neg": (0,), "sim": (0,), "boxr-notni": (0,), "tri": (0,)}

_TABLE: dict[tuple[str, str], frozenset[str]] = {}


def _put(sign: str, ops: str, cls: str) -> None:
    for op in ops.split():
        _TABLE[sign, op] = _TABLE.get((sign, op), frozenset()) | {cls}


_put("+", "or cup", DELTA)
_put("-", "and cap", DELTA)
_put("+", "and cap box-ni box-nuc tri boxr-notni neg sim", SRA)
_put("-", "or cup dia-nu dia-notni neg sim", SRA)
_put("+", "and cap dia-nu dia-notni neg sim", SLR)
_put("-", "or cup box-ni box-nuc tri boxr-notni neg sim", SLR)
_put("+", "or cup", SRR)
_put("-", "and cap", SRR)

_LEAVES = {"var", "meta", "top", "bot", "one", "zero"}


class ClassificationError(ValueError):
    """A connective outside the classified languages."""


@dataclass(frozen=True)
class SignedNode:
    op: str
    sign: str
    classes: frozenset[str]
    children: tuple["SignedNode", ...] = ()
    name: str | None = None

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def is_variable(self) -> bool:
        return self.op in ("var", "meta")

    @property
    def skeleton(self) -> bool:
        return bool(self.classes & SKELETON)

    @property
    def pia(self) -> bool:
        return bool(self.classes & PIA)

    def leaves(self):
        if self.is_leaf:
            yield self
        for c in self.children:
            yield from c.leaves()

    def flipped(self) -> "SignedNode":
        """The same tree with every sign reversed."""
        return signed_tree_from(self, flip=True)

    def label(self) -> str:
        return f"{self.sign}{self.name if self.is_variable else self.op}"


def signed_tree(f: MTFormula, sign: str = "+") -> SignedNode:
    """Sign ``f`` from the root down and classify each node."""
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    if not well_sorted(f):
        raise ClassificationError(f"{show(f)} is not well sorted")
    return _sign(f, sign)


def _sign(f: MTFormula, sign: str) -> SignedNode:
    if f.op in _LEAVES:
        return SignedNode(f.op, sign, frozenset({LEAF}), (), f.name)
    try:
        classes = _TABLE[sign, f.op]
    except KeyError:
        raise ClassificationError(f"no classification for {sign}{f.op}") from None
    anti = _ANTITONE.get(f.op, ())
    other = "-" if sign == "+" else "+"
    kids = tuple(_sign(a, other if i in anti else sign) for i, a in enumerate(f.args))
    return SignedNode(f.op, sign, classes, kids, f.name)


def signed_tree_from(t: SignedNode, flip: bool) -> SignedNode:
    sign = ("-" if t.sign == "+" else "+") if flip else t.sign
    if t.is_leaf:
        return SignedNode(t.op, sign, t.classes, (), t.name)
    return SignedNode(t.op, sign, _TABLE[sign, t.op],
                      tuple(signed_tree_from(c, flip) for c in t.children), t.name)


# ---------------------------------------------------------------- branches


@dataclass(frozen=True)
class Branch:
    """A root-to-leaf path; ``nodes[0]`` is the leaf, ``nodes[-1]`` the root.

    ``via[j]`` is the child index taken at ``nodes[j + 1]``.
    """

    nodes: tuple[SignedNode, ...]
    via: tuple[int, ...]

    @property
    def leaf(self) -> SignedNode:
        return self.nodes[0]

    def __str__(self) -> str:
        return " / ".join(n.label() for n in reversed(self.nodes))


def branches(t: SignedNode) -> list[Branch]:
    out: list[Branch] = []

    def walk(n, above, via):
        if n.is_leaf:
            out.append(Branch((n, *above), tuple(via)))
            return
        for i, c in enumerate(n.children):
            walk(c, (n, *above), (i, *via))

    walk(t, (), ())
    return out


def is_critical(leaf: SignedNode, eps: dict[str, str]) -> bool:
    if not leaf.is_variable:
        return False
    e = eps[leaf.name]
    return (leaf.sign == "+" and e == ONE) or (leaf.sign == "-" and e == DUAL)


def critical_branches(t: SignedNode, eps: dict[str, str]) -> list[Branch]:
    return [b for b in branches(t) if is_critical(b.leaf, eps)]


def _skeleton_depth(b: Branch) -> int:
    """How many inner nodes, counted from the root, form the Skeleton part."""
    inner = b.nodes[1:]
    k = 0
    for n in reversed(inner):
        if not n.skeleton:
            break
        k += 1
    return k


def is_good_branch(b: Branch) -> bool:
    inner = b.nodes[1:]
    k = _skeleton_depth(b)
    return all(n.pia for n in inner[: len(inner) - k])


def _pia_part(b: Branch) -> list[int]:
    """Positions in ``b.nodes`` of the inner nodes below the Skeleton part."""
    k = _skeleton_depth(b)
    return list(range(1, len(b.nodes) - k))


# ---------------------------------------------------------------- the test


@dataclass
class ClassificationResult:
    analytic: bool
    epsilon: dict[str, str] | None = None
    omega: tuple[tuple[str, str], ...] | None = None
    failure_reason: str | None = None

    def witness_text(self) -> str:
        eps = " ".join(f"{k}:{v}" for k, v in sorted(self.epsilon.items()))
        om = " ".join(f"{a}<{b}" for a, b in self.omega) or "(empty)"
        return f"epsilon {eps or '(no variables)'}; omega {om}"


def _variables(t: SignedNode) -> set[str]:
    return {l.name for l in t.leaves() if l.is_variable}


def _transitively_irreflexive(edges: set[tuple[str, str]]) -> bool:
    closure = set(edges)
    while True:
        extra = {(a, d) for a, b in closure for c, d in closure if b == c} - closure
        if not extra:
            break
        closure |= extra
    return all(a != b for a, b in closure)


def _srr_constraints(trees, eps) -> tuple[set[tuple[str, str]] | None, str | None]:
    edges: set[tuple[str, str]] = set()
    for root_label, t in trees:
        for b in critical_branches(t, eps):
            for j in _pia_part(b):
                node = b.nodes[j]
                if SRR not in node.classes:
                    continue
                sibling = node.children[1 - b.via[j - 1]]
                bad = [l for l in sibling.leaves() if is_critical(l, eps)]
                if bad:
                    return None, (f"{root_label}: SRR node {node.label()} on critical branch {b} "
                                  f"has a side argument with critical leaf {bad[0].label()}")
                for l in sibling.leaves():
                    if l.is_variable:
                        edges.add((l.name, b.leaf.name))
    return edges, None


def is_analytic_inductive(ineq: Inequality) -> ClassificationResult:
    """Search all order types for one making both sides analytic inductive."""
    trees = [("+lhs", signed_tree(ineq.lhs, "+")), ("-rhs", signed_tree(ineq.rhs, "-"))]
    for label, t in trees:
        for b in branches(t):
            if not is_good_branch(b):
                return ClassificationResult(False, failure_reason=(
                    f"{label}: branch {b} is not good (a node below the PIA part is Skeleton only)"))
    names = sorted(set().union(*(_variables(t) for _, t in trees)))
    last = None
    for combo in itertools.product((ONE, DUAL), repeat=len(names)):
        eps = dict(zip(names, combo))
        edges, why = _srr_constraints(trees, eps)
        if edges is None:
            last = why
            continue
        if not _transitively_irreflexive(edges):
            last = f"dependency order {sorted(edges)} has a cycle"
            continue
        return ClassificationResult(True, eps, tuple(sorted(edges)))
    return ClassificationResult(False, failure_reason=last)


# ---------------------------------------------------------------- golden table

# Translations of the axioms, one row per axiom, with the expected
# analytic verdict.
AXIOM_TABLE: dict[str, tuple[str, bool]] = {
    "N": ("(leq top (box-nuc (dia-notni top)))", True),
    "P": ("(leq top (neg (dia-nu (box-ni bot))))", True),
    "C": ("(leq (and (dia-nu (box-ni (var p))) (dia-nu (box-ni (var q)))) "
          "(box-nuc (dia-notni (and (var p) (var q)))))", True),
    "T": ("(leq (dia-nu (box-ni (var p))) (var p))", True),
    "4": ("(leq (dia-nu (box-ni (dia-nu (box-ni (var p))))) (box-nuc (dia-notni (var p))))", False),
    "4'": ("(leq (dia-nu (box-ni (var p))) (box-nuc (dia-notni (box-nuc (dia-notni (var p))))))", False),
    "5": ("(leq (neg (box-nuc (dia-notni (neg (var p))))) "
          "(box-nuc (dia-notni (neg (dia-nu (box-ni (neg (var p))))))))", False),
    "B": ("(leq (var p) (box-nuc (dia-notni (neg (dia-nu (box-ni (neg (var p))))))))", False),
    "D": ("(leq (dia-nu (box-ni (var p))) (neg (dia-nu (box-ni (neg (var p))))))", True),
    "CS": ("(leq (and (var p) (var q)) (tri (cap (box-ni (var p)) (boxr-notni (var p))) (var q)))", True),
    "CEM": ("(leq top (or (tri (cap (box-ni (var p)) (boxr-notni (var p))) (var q)) "
            "(tri (cap (box-ni (var p)) (boxr-notni (var p))) (neg (var q)))))", True),
    "ID": ("(leq top (tri (cap (box-ni (var p)) (boxr-notni (var p))) (var p)))", True),
}


@dataclass
class TableRow:
    axiom: str
    inequality: Inequality
    expected: bool
    result: ClassificationResult

    @property
    def matches(self) -> bool:
        return self.result.analytic == self.expected


@dataclass
class TableReport:
    rows: list[TableRow] = field(default_factory=list)

    @property
    def matches(self) -> int:
        return sum(r.matches for r in self.rows)

    @property
    def ok(self) -> bool:
        return self.matches == len(self.rows)

    def summary(self) -> str:
        return f"{self.matches}/{len(self.rows)} analytic-column matches"


def table_inequality(axiom: str) -> Inequality:
    from .textio import parse_inequality
    return parse_inequality(AXIOM_TABLE[axiom][0])


def classify_axiom_table() -> TableReport:
    report = TableReport()
    for ax, (_, expected) in AXIOM_TABLE.items():
        ineq = table_inequality(ax)
        report.rows.append(TableRow(ax, ineq, expected, is_analytic_inductive(ineq)))
    return report
