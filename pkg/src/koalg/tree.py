"""Depth-bounded game trees: the unravelling of a process from a state.

A tree node is one of

* ``root``      the unlabelled root,
* ``A``         a leaf carrying a result,
* ``B``         an inner node carrying an output,
* ``truncated`` a node at the depth bound; it carries the output of the step
  that reached it but its subtree was not expanded.

Every edge carries an input and, for probabilistic trees, a probability.
Structurally equal subtrees under the same input are merged (their
probabilities summed), so a node never has two equal same-input children.
The state reached at a node is kept as an annotation that takes no part in
tree equality.
"""

from __future__ import annotations

import dataclasses
import sys
import weakref
from collections import defaultdict

from .choice import NORM_TOL, PROB_TOL, Choice, Kind, map_choice
from .errors import InputNotEnumerable
from .process import Process, Result, probe
from .values import show, to_json


@dataclasses.dataclass(frozen=True, eq=False)
class Node:
    cls: str
    label: object = None
    edges: tuple = ()
    state: object = None

    @property
    def is_leaf(self) -> bool:
        return not self.edges


@dataclasses.dataclass(frozen=True, eq=False)
class Edge:
    input: object
    probability: float | None
    target: Node


@dataclasses.dataclass(frozen=True, eq=False)
class GameTree:
    root: Node
    kind: Kind
    depth_bound: int
    inputs: tuple


class _Unfolder:
    def __init__(self, p: Process):
        if not p.inputs.finite:
            raise InputNotEnumerable(f"cannot unfold over non-enumerated inputs {p.inputs.name}")
        self.p = p
        self.inputs = p.inputs.elements
        self.memo: dict = {}
        self.interned: dict = {}

    def intern(self, node: Node) -> Node:
        key = (node.cls, node.label,
               tuple((e.input, None if e.probability is None else round(e.probability, 12),
                      id(e.target)) for e in node.edges))
        return self.interned.setdefault(key, node)

    def edges(self, s, depth: int) -> tuple:
        key = (s, depth)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        prob = self.p.kind is Kind.PROB
        out = []
        for c in self.inputs:
            merged: dict[int, list] = {}
            for x, w in probe(self.p, s, c).items():
                if isinstance(x, Result):
                    t = self.intern(Node("A", x.value))
                elif depth == 1:
                    t = self.intern(Node("truncated", x.output, state=x.state))
                else:
                    t = self.intern(Node("B", x.output, self.edges(x.state, depth - 1), x.state))
                if id(t) in merged:
                    if prob:
                        merged[id(t)][1] += w
                else:
                    merged[id(t)] = [t, w]
            out.extend(Edge(c, w if prob else None, t) for t, w in merged.values())
        edges = tuple(out)
        self.memo[key] = edges
        return edges


def unfold(p: Process, s, depth: int) -> GameTree:
    """Unravel ``p`` from state ``s`` up to ``depth`` steps."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    u = _Unfolder(p)
    if depth == 0:
        root = Node("truncated", state=s)
    else:
        needed = 4 * depth + 200
        if sys.getrecursionlimit() < needed:
            sys.setrecursionlimit(needed)
        root = Node("root", None, u.edges(s, depth), s)
    return GameTree(root, p.kind, depth, tuple(p.inputs.elements))


def trees_equal(a: Node, b: Node, tol: float = PROB_TOL, _memo=None) -> bool:
    """Structural equality of two subtrees; probabilities compared within ``tol``."""
    if a is b:
        return True
    memo = {} if _memo is None else _memo
    key = (id(a), id(b))
    if key in memo:
        return memo[key]
    memo[key] = False
    if a.cls != b.cls or a.label != b.label or len(a.edges) != len(b.edges):
        return False
    used = [False] * len(b.edges)
    for ea in a.edges:
        for n, eb in enumerate(b.edges):
            if used[n] or ea.input != eb.input:
                continue
            if (ea.probability is None) != (eb.probability is None):
                continue
            if ea.probability is not None and abs(ea.probability - eb.probability) > tol:
                continue
            if trees_equal(ea.target, eb.target, tol, memo):
                used[n] = True
                break
        else:
            return False
    memo[key] = True
    return True


_HASHES: weakref.WeakKeyDictionary = weakref.WeakKeyDictionary()


def structural_hash(node: Node) -> int:
    """Hash consistent with :func:`trees_equal` (probabilities are left out)."""
    stack = [node]
    while stack:
        n = stack[-1]
        if n in _HASHES:
            stack.pop()
            continue
        pending = [e.target for e in n.edges if e.target not in _HASHES]
        if pending:
            stack.extend(pending)
            continue
        stack.pop()
        children = sorted(hash((e.input, _HASHES[e.target])) for e in n.edges)
        _HASHES[n] = hash((n.cls, n.label, tuple(children)))
    return _HASHES[node]


class _Subtree:
    """Wraps a subtree so that choices over trees use structural equality."""

    __slots__ = ("node",)

    def __init__(self, node: Node):
        self.node = node

    def __eq__(self, other):
        return isinstance(other, _Subtree) and trees_equal(self.node, other.node)

    def __hash__(self):
        return structural_hash(self.node)

    def sort_key(self):
        return (self.node.cls, show(self.node.label), len(self.node.edges))


def subtree_at(node: Node) -> Node:
    """The tree rooted at ``node``, with the node's own label forgotten."""
    if node.cls == "truncated":
        return Node("truncated", state=node.state)
    return Node("root", None, node.edges, node.state)


def destructure(tree: GameTree, c) -> Choice | None:
    """One step of the final coalgebra: the choice the root offers for input ``c``.

    Entries are ``("A", result)`` or ``("B", output, subtree)``. Returns None
    when the root has no edges for ``c`` (for instance a truncated root).
    """
    entries = []
    for e in tree.root.edges:
        if e.input != c:
            continue
        t = e.target
        entry = ("A", t.label) if t.cls == "A" else ("B", t.label, _Subtree(subtree_at(t)))
        entries.append((entry, e.probability))
    if not entries:
        return None
    if tree.kind is Kind.DET:
        if len(entries) != 1:
            return None
        return Choice.det(entries[0][0])
    if tree.kind is Kind.NDET:
        return Choice.ndet(e for e, _ in entries)
    return Choice.prob(entries)


def check_commutes(p: Process, s, depth: int, tree: GameTree | None = None) -> bool:
    """Check that stepping then unfolding equals unfolding then destructuring.

    For every input ``c``, the step ``probe(p, s, c)`` with each successor
    state replaced by its unfolding to ``depth - 1`` must equal the
    ``c``-branch of the unfolding to ``depth`` (``tree`` when given).
    """
    if tree is None:
        tree = unfold(p, s, depth)
    if depth == 0:
        return tree.root.cls == "truncated"
    cache: dict = {}

    def successor(x):
        if isinstance(x, Result):
            return ("A", x.value)
        if x.state not in cache:
            cache[x.state] = unfold(p, x.state, depth - 1).root
        return ("B", x.output, _Subtree(cache[x.state]))

    for c in p.inputs.elements:
        rhs = destructure(tree, c)
        if rhs is None:
            return False
        lhs = map_choice(probe(p, s, c), successor)
        if lhs != rhs:
            return False
    return True


def iter_nodes(root: Node):
    """Distinct node objects reachable from ``root`` (shared subtrees once)."""
    seen = set()
    stack = [root]
    while stack:
        n = stack.pop()
        if id(n) in seen:
            continue
        seen.add(id(n))
        yield n
        stack.extend(e.target for e in n.edges)


def tree_stats(t: GameTree) -> dict:
    """Node and leaf counts of the unravelled tree, branching and result mass per depth."""
    counts: dict[int, tuple] = {}

    def count(n: Node):
        hit = counts.get(id(n))
        if hit is not None:
            return hit
        if n.is_leaf:
            res = (1, {n.cls: 1})
        else:
            total, leaves = 1, defaultdict(int)
            for e in n.edges:
                sub_total, sub_leaves = count(e.target)
                total += sub_total
                for k, v in sub_leaves.items():
                    leaves[k] += v
            res = (total, dict(leaves))
        counts[id(n)] = res
        return res

    total, leaves = count(t.root)
    branching = max((len(n.edges) for n in iter_nodes(t.root)), default=0)
    return {
        "nodes": total,
        "leaves": {k: leaves.get(k, 0) for k in ("A", "B", "truncated")},
        "max_branching": branching,
        "result_mass": _result_mass(t),
    }


def _result_mass(t: GameTree) -> list[float] | None:
    """Probability of terminating at each depth; None unless closed and det/prob."""
    if t.kind is Kind.NDET or len(t.inputs) != 1:
        return None
    mass = [0.0] * (t.depth_bound + 1)
    frontier = {id(t.root): (t.root, 1.0)}
    depth = 0
    while frontier:
        depth += 1
        nxt: dict[int, tuple] = {}
        for node, m in frontier.values():
            for e in node.edges:
                w = m * (1.0 if e.probability is None else e.probability)
                if e.target.cls == "A":
                    mass[depth] += w
                elif e.target.edges:
                    prev = nxt.get(id(e.target))
                    nxt[id(e.target)] = (e.target, w + (prev[1] if prev else 0.0))
        frontier = nxt
    return mass


def validate_tree(t: GameTree) -> list[str]:
    """Structural invariants of a tree of the given kind; returns the violations."""
    problems = []
    if t.root.label is not None:
        problems.append("root is labelled")
    memo: dict = {}
    for n in iter_nodes(t.root):
        if n.cls == "truncated" or n.cls == "A":
            if n.edges:
                problems.append(f"{n.cls} node has successors")
            continue
        by_input = defaultdict(list)
        for e in n.edges:
            by_input[e.input].append(e)
        for c in t.inputs:
            es = by_input.get(c, [])
            if t.kind is Kind.DET and len(es) != 1:
                problems.append(f"deterministic node has {len(es)} successors for input {c!r}")
            if not es and t.kind is not Kind.DET:
                problems.append(f"node has no successor for input {c!r}")
            for i, a in enumerate(es):
                for b in es[i + 1:]:
                    if trees_equal(a.target, b.target, PROB_TOL, memo):
                        problems.append(f"duplicate subtrees under input {c!r}")
            if t.kind is Kind.PROB:
                ps = [e.probability for e in es]
                if any(p is None or not 0.0 < p <= 1.0 + NORM_TOL for p in ps):
                    problems.append(f"edge probability outside (0, 1] under input {c!r}")
                elif es and abs(sum(ps) - 1.0) > NORM_TOL:
                    problems.append(f"probabilities under input {c!r} sum to {sum(ps)!r}")
            elif any(e.probability is not None for e in es):
                problems.append("probability on a non-probabilistic edge")
    return problems


def tree_to_json(t: GameTree) -> dict:
    def node(n: Node):
        out = {"label": {"class": n.cls, "value": to_json(n.label)}, "edges": []}
        for e in n.edges:
            edge = {"input": to_json(e.input), "node": node(e.target)}
            if e.probability is not None:
                edge["p"] = e.probability
            out["edges"].append(edge)
        return out

    return {"kind": t.kind.value, "depth": t.depth_bound, "root": node(t.root)}


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def tree_to_dot(t: GameTree) -> str:
    lines = ["digraph game_tree {", "  node [shape=box];"]
    counter = 0

    def emit(n: Node) -> str:
        nonlocal counter
        name = f"n{counter}"
        counter += 1
        text = n.cls if n.label is None else f"{n.cls} {show(n.label)}"
        lines.append(f'  {name} [label="{_dot_escape(text)}"];')
        for e in n.edges:
            child = emit(e.target)
            label = show(e.input)
            if e.probability is not None:
                label += " : " + format(e.probability, ".6g")
            lines.append(f'  {name} -> {child} [label="{_dot_escape(label)}"];')
        return name

    emit(t.root)
    lines.append("}")
    return "\n".join(lines) + "\n"


def tree_to_text(t: GameTree) -> str:
    lines = [f"{t.kind.value} tree, depth {t.depth_bound}"]

    def walk(n: Node, indent: int, prefix: str):
        text = n.cls if n.label is None else f"{n.cls} {show(n.label)}"
        lines.append("  " * indent + prefix + text)
        for e in n.edges:
            edge = show(e.input)
            if e.probability is not None:
                edge += f" : {e.probability:.6g}"
            walk(e.target, indent + 1, f"[{edge}] ")

    walk(t.root, 0, "")
    return "\n".join(lines) + "\n"
