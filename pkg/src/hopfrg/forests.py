"""Unordered rooted trees and forests in canonical form.

A tree is identified by its canonical bracket rendering: ``[]`` is the
single vertex, ``[[]]`` the two-vertex tree, and children are sorted by their
own renderings.  A forest is a sorted multiset of trees; the empty forest
renders as ``1``.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Iterator


class ForestSyntaxError(ValueError):
    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position} in {text!r}")
        self.text = text
        self.position = position


class Tree:
    __slots__ = ("children", "key", "vertex_count")

    def __init__(self, children: Iterable["Tree"] = ()):
        kids = tuple(sorted(children, key=_key))
        self.children = kids
        self.key = "[" + "".join(c.key for c in kids) + "]"
        self.vertex_count = 1 + sum(c.vertex_count for c in kids)

    @property
    def edge_count(self) -> int:
        return self.vertex_count - 1

    def __eq__(self, other) -> bool:
        return isinstance(other, Tree) and other.key == self.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __lt__(self, other: "Tree") -> bool:
        return self.key < other.key

    def __str__(self) -> str:
        return self.key

    def __repr__(self) -> str:
        return f"Tree({self.key!r})"


class Forest:
    """Commutative monomial in trees; the empty forest is the unit."""

    __slots__ = ("trees", "key", "vertex_count")

    def __init__(self, trees: Iterable[Tree] = ()):
        ts = tuple(sorted(trees, key=_key))
        self.trees = ts
        self.key = " ".join(t.key for t in ts) or "1"
        self.vertex_count = sum(t.vertex_count for t in ts)

    @property
    def edge_count(self) -> int:
        return self.vertex_count - len(self.trees)

    def is_unit(self) -> bool:
        return not self.trees

    def is_tree(self) -> bool:
        return len(self.trees) == 1

    def __mul__(self, other: "Forest") -> "Forest":
        if not other.trees:
            return self
        if not self.trees:
            return other
        return Forest(self.trees + other.trees)

    def __iter__(self) -> Iterator[Tree]:
        return iter(self.trees)

    def __len__(self) -> int:
        return len(self.trees)

    def __eq__(self, other) -> bool:
        return isinstance(other, Forest) and other.key == self.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __lt__(self, other: "Forest") -> bool:
        return self.key < other.key

    def __str__(self) -> str:
        return self.key

    def __repr__(self) -> str:
        return f"Forest({self.key!r})"


def _key(x) -> str:
    return x.key


UNIT = Forest()
DOT = Tree()


def as_forest(x) -> Forest:
    if isinstance(x, Forest):
        return x
    if isinstance(x, Tree):
        return Forest((x,))
    if isinstance(x, str):
        return parse_forest(x)
    raise TypeError(f"cannot convert {type(x).__name__} to Forest")


def forest_product(a: Forest, b: Forest) -> Forest:
    return a * b


def k_normal(f: Forest) -> Forest:
    """Drop edgeless trees: in K a single vertex is identified with the unit."""
    if all(t.vertex_count > 1 for t in f.trees):
        return f
    return Forest(t for t in f.trees if t.vertex_count > 1)


# --- text ----------------------------------------------------------------

def parse_forest(text: str) -> Forest:
    """Parse ``1`` or a whitespace-separated sequence of bracket trees."""
    pos = _skip(text, 0)
    if text[pos:pos + 1] == "1":
        end = _skip(text, pos + 1)
        if end != len(text):
            raise ForestSyntaxError("unexpected character after '1'", text, end)
        return UNIT
    trees, pos = _parse_trees(text, pos)
    if pos != len(text):
        raise ForestSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
    if not trees:
        raise ForestSyntaxError("empty forest (use '1' for the unit)", text, pos)
    return Forest(trees)


def parse_tree(text: str) -> Tree:
    f = parse_forest(text)
    if not f.is_tree():
        raise ForestSyntaxError("expected a single tree", text, 0)
    return f.trees[0]


def _skip(text: str, pos: int) -> int:
    while pos < len(text) and text[pos].isspace():
        pos += 1
    return pos


def _parse_trees(text: str, pos: int) -> tuple[list[Tree], int]:
    trees: list[Tree] = []
    while pos < len(text) and text[pos] == "[":
        open_at = pos
        pos = _skip(text, pos + 1)
        if text[pos:pos + 1] == "1":
            pos = _skip(text, pos + 1)
            kids: list[Tree] = []
        else:
            kids, pos = _parse_trees(text, pos)
        if pos >= len(text):
            raise ForestSyntaxError("unbalanced '['", text, open_at)
        if text[pos] != "]":
            raise ForestSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
        trees.append(Tree(kids))
        pos = _skip(text, pos + 1)
    return trees, pos


def render_forest(f: Forest) -> str:
    return f.key


# --- edge indexing ---------------------------------------------------------

def layout(trees: Iterable[Tree]) -> tuple[list[int], list[list[int]]]:
    """Preorder parent array over the canonical form; roots get parent -1."""
    parent: list[int] = []
    children: list[list[int]] = []

    def visit(t: Tree, p: int) -> None:
        v = len(parent)
        parent.append(p)
        children.append([])
        if p >= 0:
            children[p].append(v)
        for c in t.children:
            visit(c, v)

    for t in trees:
        visit(t, -1)
    return parent, children


def edges(host) -> list[tuple[int, int]]:
    """Edges of a tree/forest as (parent, child) preorder vertex pairs.

    Edge ``i`` of the host is the ``i``-th pair in this list; this is the
    indexing used for edge subsets.
    """
    parent, _ = layout(as_forest(host).trees)
    return [(p, v) for v, p in enumerate(parent) if p >= 0]


def _component(v: int, children, chosen) -> Tree:
    return Tree(_component(c, children, chosen) for c in children[v] if chosen[c])


def _contract(v: int, children, chosen) -> Tree:
    kids: list[Tree] = []
    stack = [v]
    while stack:
        w = stack.pop()
        for c in children[w]:
            if chosen[c]:
                stack.append(c)
            else:
                kids.append(_contract(c, children, chosen))
    return Tree(kids)


def _edge_subsets(trees: tuple[Tree, ...]):
    parent, children = layout(trees)
    heads = [v for v, p in enumerate(parent) if p >= 0]
    for mask in range(1 << len(heads)):
        chosen = [False] * len(parent)
        for i, v in enumerate(heads):
            if mask >> i & 1:
                chosen[v] = True
        yield parent, children, chosen


def subforests(host) -> list[tuple[Forest, Forest]]:
    """Extraction/contraction pairs ``(s, host/s)``, one per edge subset.

    ``s`` is the forest of connected components spanned by the chosen edges
    (each with at least one edge, so already K-normal); ``host/s`` collapses
    each component to a vertex.  Entries follow the edge-subset bitmask order.
    """
    f = as_forest(host)
    out = []
    for parent, children, chosen in _edge_subsets(f.trees):
        tops = [
            v for v in range(len(parent))
            if (parent[v] < 0 or not chosen[v]) and any(chosen[c] for c in children[v])
        ]
        s = Forest(_component(v, children, chosen) for v in tops)
        roots = [v for v, p in enumerate(parent) if p < 0]
        contracted = Forest(_contract(r, children, chosen) for r in roots)
        out.append((s, contracted))
    return out


@lru_cache(maxsize=None)
def tree_subforests(t: Tree) -> tuple[tuple[Forest, Forest], ...]:
    return tuple(subforests(Forest((t,))))


def _is_admissible(parent: list[int], chosen: list[bool]) -> bool:
    for v, flag in enumerate(chosen):
        if not flag:
            continue
        p = parent[v]
        while p >= 0:
            if chosen[p]:
                return False
            p = parent[p]
    return True


def _full(v: int, children) -> Tree:
    return Tree(_full(c, children) for c in children[v])


def _pruned(v: int, children, chosen) -> Tree:
    return Tree(_pruned(c, children, chosen) for c in children[v] if not chosen[c])


@lru_cache(maxsize=None)
def admissible_cuts(t: Tree) -> tuple[tuple[Forest, Tree], ...]:
    """Nontrivial admissible cuts ``(P^c(t), R^c(t))`` of a tree.

    A cut is a nonempty edge subset meeting every root-to-vertex path at most
    once.  The terms ``t (x) 1`` and ``1 (x) t`` are not included.
    """
    out = []
    for parent, children, chosen in _edge_subsets((t,)):
        if not any(chosen) or not _is_admissible(parent, chosen):
            continue
        pruned = Forest(_full(v, children) for v, flag in enumerate(chosen) if flag)
        out.append((pruned, _pruned(0, children, chosen)))
    return tuple(out)


# --- enumeration -------------------------------------------------------------

@lru_cache(maxsize=None)
def _trees_with(n: int) -> tuple[Tree, ...]:
    if n <= 0:
        return ()
    return tuple(sorted({Tree(f.trees) for f in _forests_with(n - 1)}, key=_key))


@lru_cache(maxsize=None)
def _forests_with(n: int) -> tuple[Forest, ...]:
    if n == 0:
        return (UNIT,)
    found = set()
    for k in range(1, n + 1):
        for t in _trees_with(k):
            for rest in _forests_with(n - k):
                found.add(Forest((t,) + rest.trees))
    return tuple(sorted(found, key=_key))


def trees_with_vertices(n: int) -> list[Tree]:
    return list(_trees_with(n))


def forests_with_vertices(n: int) -> list[Forest]:
    return list(_forests_with(n))


def enumerate_forests(max_vertices: int) -> list[Forest]:
    """All canonical forests with at most ``max_vertices`` vertices.

    Ordered by vertex count, then by rendering.
    """
    if max_vertices < 0:
        raise ValueError("max_vertices must be >= 0")
    return [f for n in range(max_vertices + 1) for f in _forests_with(n)]


def enumerate_trees(max_vertices: int) -> list[Tree]:
    return [t for n in range(1, max_vertices + 1) for t in _trees_with(n)]


@lru_cache(maxsize=None)
def _k_forests_with(e: int) -> tuple[Forest, ...]:
    if e == 0:
        return (UNIT,)
    found = set()
    for k in range(1, e + 1):
        for t in _trees_with(k + 1):
            for rest in _k_forests_with(e - k):
                found.add(Forest((t,) + rest.trees))
    return tuple(sorted(found, key=_key))


def enumerate_k_forests(max_edges: int) -> list[Forest]:
    """K-normal forests (every tree has an edge) with at most ``max_edges`` edges."""
    if max_edges < 0:
        raise ValueError("max_edges must be >= 0")
    return [f for e in range(max_edges + 1) for f in _k_forests_with(e)]


def enumerate_k_trees(max_edges: int) -> list[Tree]:
    return [t for e in range(1, max_edges + 1) for t in _trees_with(e + 1)]


def forest_pairs(forests: list[Forest], max_degree: int, degree) -> Iterator[tuple[Forest, Forest]]:
    """Unordered pairs of nonempty forests whose degrees sum to at most ``max_degree``."""
    nonempty = [f for f in forests if f.trees]
    for i, x in enumerate(nonempty):
        for y in nonempty[i:]:
            if degree(x) + degree(y) <= max_degree:
                yield x, y
