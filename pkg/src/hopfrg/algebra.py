"""Linear combinations of forests and the Hopf structure maps of H and K.

``H`` is the Connes-Kreimer algebra graded by vertices.  ``K`` is the free
commutative algebra on trees with at least one edge, graded by edges, with
the extraction-contraction coproduct; edgeless trees are identified with the
unit on any K-leg.  ``coaction`` is the left coaction ``H -> K (x) H``.

Coefficients are exact: :class:`~fractions.Fraction` by default, but any
commutative ring element supporting ``+``, ``*`` and truthiness works (the
renormalization layer uses :class:`~hopfrg.laurent.LaurentPoly`).
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping

from .forests import (
    UNIT,
    Forest,
    Tree,
    admissible_cuts,
    as_forest,
    enumerate_forests,
    enumerate_k_forests,
    forest_pairs,
    k_normal,
    layout,
    subforests,
    tree_subforests,
)
from .laurent import LaurentPoly
from .report import Report

H = "H"
K = "K"
TAGS = (H, K)


def _check_tag(tag: str) -> str:
    if tag not in TAGS:
        raise ValueError(f"unknown algebra tag {tag!r}")
    return tag


def normalize(tag: str, f: Forest) -> Forest:
    return k_normal(f) if tag == K else f


def degree(tag: str, f) -> int:
    f = as_forest(f)
    return f.edge_count if tag == K else f.vertex_count


def _acc(d: dict, key, c) -> None:
    v = d.get(key)
    v = c if v is None else v + c
    if v:
        d[key] = v
    else:
        d.pop(key, None)


def coef_str(c) -> str:
    if isinstance(c, LaurentPoly):
        if c.is_constant():
            return str(c.constant())
        return f"({c})"
    return str(Fraction(c))


def _term_str(c, body: str) -> str:
    if c == 1:
        return body
    return f"{coef_str(c)}*{body}"


class LinComb:
    """Finite linear combination of basis forests of H or K."""

    __slots__ = ("tag", "terms")

    def __init__(self, tag: str = H, terms: Mapping | None = None):
        self.tag = _check_tag(tag)
        out: dict = {}
        for f, c in (terms or {}).items():
            _acc(out, normalize(tag, as_forest(f)), c if not isinstance(c, int) else Fraction(c))
        self.terms = out

    @classmethod
    def basis(cls, tag: str, f) -> "LinComb":
        return cls(tag, {as_forest(f): Fraction(1)})

    @classmethod
    def _raw(cls, tag: str, terms: dict) -> "LinComb":
        obj = cls.__new__(cls)
        obj.tag = tag
        obj.terms = terms
        return obj

    def items(self):
        return self.terms.items()

    def coefficient(self, f):
        return self.terms.get(normalize(self.tag, as_forest(f)), Fraction(0))

    def _same(self, other: "LinComb") -> None:
        if other.tag != self.tag:
            raise ValueError(f"cannot combine {self.tag} with {other.tag}")

    def __add__(self, other: "LinComb") -> "LinComb":
        self._same(other)
        out = dict(self.terms)
        for f, c in other.terms.items():
            _acc(out, f, c)
        return LinComb._raw(self.tag, out)

    def __neg__(self) -> "LinComb":
        return LinComb._raw(self.tag, {f: -c for f, c in self.terms.items()})

    def __sub__(self, other: "LinComb") -> "LinComb":
        return self + (-other)

    def __mul__(self, other) -> "LinComb":
        if isinstance(other, LinComb):
            self._same(other)
            out: dict = {}
            for f, c in self.terms.items():
                for g, d in other.terms.items():
                    _acc(out, normalize(self.tag, f * g), c * d)
            return LinComb._raw(self.tag, out)
        out = {}
        for f, c in self.terms.items():
            _acc(out, f, c * other)
        return LinComb._raw(self.tag, out)

    def __rmul__(self, other) -> "LinComb":
        out: dict = {}
        for f, c in self.terms.items():
            _acc(out, f, other * c)
        return LinComb._raw(self.tag, out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinComb):
            return NotImplemented
        return self.tag == other.tag and self.terms == other.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(_term_str(self.terms[f], f.key) for f in sorted(self.terms))

    def __repr__(self) -> str:
        return f"LinComb({self.tag}, {str(self)!r})"


def as_lincomb(x, tag: str = H) -> LinComb:
    if isinstance(x, LinComb):
        return x
    return LinComb.basis(tag, x)


def _tensor_sort_key(legs: tuple[Forest, ...]):
    return tuple(f.key for f in reversed(legs))


class Tensor:
    """Finite linear combination of tuples of forests (one per tensor leg)."""

    __slots__ = ("tags", "terms")

    def __init__(self, tags: Iterable[str], terms: Mapping | None = None):
        self.tags = tuple(_check_tag(t) for t in tags)
        out: dict = {}
        for legs, c in (terms or {}).items():
            key = tuple(normalize(tag, as_forest(f)) for tag, f in zip(self.tags, legs))
            _acc(out, key, c if not isinstance(c, int) else Fraction(c))
        self.terms = out

    @classmethod
    def _raw(cls, tags: tuple[str, ...], terms: dict) -> "Tensor":
        obj = cls.__new__(cls)
        obj.tags = tags
        obj.terms = terms
        return obj

    def items(self):
        return self.terms.items()

    def __add__(self, other: "Tensor") -> "Tensor":
        if other.tags != self.tags:
            raise ValueError("tensor shapes differ")
        out = dict(self.terms)
        for k, c in other.terms.items():
            _acc(out, k, c)
        return Tensor._raw(self.tags, out)

    def __neg__(self) -> "Tensor":
        return Tensor._raw(self.tags, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "Tensor") -> "Tensor":
        return self + (-other)

    def __mul__(self, other) -> "Tensor":
        if isinstance(other, Tensor):
            if other.tags != self.tags:
                raise ValueError("tensor shapes differ")
            out: dict = {}
            for k1, c1 in self.terms.items():
                for k2, c2 in other.terms.items():
                    key = tuple(
                        normalize(tag, a * b) for tag, a, b in zip(self.tags, k1, k2)
                    )
                    _acc(out, key, c1 * c2)
            return Tensor._raw(self.tags, out)
        out = {}
        for k, c in self.terms.items():
            _acc(out, k, c * other)
        return Tensor._raw(self.tags, out)

    def __rmul__(self, other) -> "Tensor":
        out: dict = {}
        for k, c in self.terms.items():
            _acc(out, k, other * c)
        return Tensor._raw(self.tags, out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tensor):
            return NotImplemented
        return self.tags == other.tags and self.terms == other.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        keys = sorted(self.terms, key=_tensor_sort_key)
        return " + ".join(
            _term_str(self.terms[k], " # ".join(f.key for f in k)) for k in keys
        )

    def __repr__(self) -> str:
        return f"Tensor({self.tags}, {str(self)!r})"


# --- per-tree structure maps (memoized) -------------------------------------

_ONE = Fraction(1)


@lru_cache(maxsize=None)
def _delta_h_tree(t: Tree) -> dict:
    f = Forest((t,))
    out: dict = {}
    _acc(out, (f, UNIT), _ONE)
    _acc(out, (UNIT, f), _ONE)
    for pruned, root in admissible_cuts(t):
        _acc(out, (pruned, Forest((root,))), _ONE)
    return out


@lru_cache(maxsize=None)
def _delta_k_tree(t: Tree) -> dict:
    out: dict = {}
    for s, contracted in tree_subforests(t):
        _acc(out, (s, k_normal(contracted)), _ONE)
    return out


@lru_cache(maxsize=None)
def _coaction_tree(t: Tree) -> dict:
    out: dict = {}
    for s, contracted in tree_subforests(t):
        _acc(out, (s, contracted), _ONE)
    return out


def _tensor_product_dicts(a: dict, b: dict, tags) -> dict:
    out: dict = {}
    for k1, c1 in a.items():
        for k2, c2 in b.items():
            key = tuple(normalize(tag, x * y) for tag, x, y in zip(tags, k1, k2))
            _acc(out, key, c1 * c2)
    return out


_TREE_MAPS: dict[str, tuple[Callable[[Tree], dict], tuple[str, str]]] = {
    "delta_H": (_delta_h_tree, (H, H)),
    "delta_K": (_delta_k_tree, (K, K)),
    "coaction": (_coaction_tree, (K, H)),
}


@lru_cache(maxsize=None)
def _forest_map(kind: str, f: Forest) -> dict:
    tree_map, tags = _TREE_MAPS[kind]
    out = {(UNIT, UNIT): _ONE}
    for t in f.trees:
        if kind == "delta_K" and t.vertex_count == 1:
            continue
        out = _tensor_product_dicts(out, tree_map(t), tags)
    return out


def _apply(kind: str, x, in_tag: str) -> Tensor:
    _, tags = _TREE_MAPS[kind]
    x = as_lincomb(x, in_tag)
    if x.tag != in_tag:
        raise ValueError(f"{kind} expects an element of {in_tag}")
    out: dict = {}
    for f, c in x.items():
        for key, d in _forest_map(kind, f).items():
            _acc(out, key, c * d)
    return Tensor._raw(tags, out)


def delta_H(x) -> Tensor:
    """Connes-Kreimer coproduct via admissible cuts, extended multiplicatively."""
    return _apply("delta_H", x, H)


def delta_K(x) -> Tensor:
    """Extraction-contraction coproduct of K."""
    return _apply("delta_K", x, K)


def coaction(x) -> Tensor:
    """Left coaction ``H -> K (x) H``: ``sum s (x) t/s`` over edge subsets."""
    return _apply("coaction", x, H)


def coproduct(tag: str, x) -> Tensor:
    return delta_K(x) if tag == K else delta_H(x)


def reduced_tree_coproduct(tag: str, t: Tree) -> dict:
    """Terms of the coproduct of a tree other than ``t (x) 1`` and ``1 (x) t``."""
    f = normalize(tag, Forest((t,)))
    full = _delta_k_tree(t) if tag == K else _delta_h_tree(t)
    return {k: c for k, c in full.items() if k != (f, UNIT) and k != (UNIT, f)}


def reduced_coproduct(tag: str, f: Forest) -> dict:
    f = normalize(tag, f)
    if f.is_unit():
        return {}
    full = _forest_map("delta_K" if tag == K else "delta_H", f)
    return {k: c for k, c in full.items() if k != (f, UNIT) and k != (UNIT, f)}


def counit(x, tag: str = H):
    return as_lincomb(x, tag).coefficient(UNIT)


# --- antipode -----------------------------------------------------------------

@lru_cache(maxsize=None)
def _antipode_tree(tag: str, t: Tree, side: str) -> dict:
    out: dict = {}
    _acc(out, normalize(tag, Forest((t,))), -_ONE)
    for (a, b), c in reduced_tree_coproduct(tag, t).items():
        if side == "left":
            for g, d in _antipode_forest(tag, a, side).items():
                _acc(out, normalize(tag, g * b), -c * d)
        else:
            for g, d in _antipode_forest(tag, b, side).items():
                _acc(out, normalize(tag, a * g), -c * d)
    return out


@lru_cache(maxsize=None)
def _antipode_forest(tag: str, f: Forest, side: str) -> dict:
    out = {UNIT: _ONE}
    for t in f.trees:
        if tag == K and t.vertex_count == 1:
            continue
        nxt: dict = {}
        s = _antipode_tree(tag, t, side)
        for g, c in out.items():
            for h, d in s.items():
                _acc(nxt, normalize(tag, g * h), c * d)
        out = nxt
    return out


def antipode(x, tag: str = H, recursion: str = "left") -> LinComb:
    """Antipode by the graded recursion.

    ``recursion="left"`` uses ``S(x) = -x - sum S(x')x''``; ``"right"`` uses
    ``S(x) = -x - sum x'S(x'')``.  Both agree on a commutative connected algebra.
    """
    if recursion not in ("left", "right"):
        raise ValueError("recursion must be 'left' or 'right'")
    x = as_lincomb(x, tag)
    out: dict = {}
    for f, c in x.items():
        for g, d in _antipode_forest(x.tag, f, recursion).items():
            _acc(out, g, c * d)
    return LinComb._raw(x.tag, out)


def antipode_H(x, recursion: str = "left") -> LinComb:
    return antipode(x, H, recursion)


def antipode_K(x, recursion: str = "left") -> LinComb:
    return antipode(x, K, recursion)


# --- tensor plumbing ------------------------------------------------------------

def map_leg(T: Tensor, leg: int, fn: Callable[[Forest], "Tensor | LinComb"]) -> Tensor:
    """Replace leg ``leg`` of every term by the legs of ``fn(forest)``."""
    tags_out = None
    out: dict = {}
    for key, c in T.items():
        image = fn(key[leg])
        if isinstance(image, LinComb):
            img_tags = (image.tag,)
            img_terms = (((f,), d) for f, d in image.items())
        else:
            img_tags = image.tags
            img_terms = image.items()
        tags_out = T.tags[:leg] + img_tags + T.tags[leg + 1:]
        for legs, d in img_terms:
            _acc(out, key[:leg] + tuple(legs) + key[leg + 1:], c * d)
    if tags_out is None:
        return Tensor._raw(T.tags, {})
    return Tensor._raw(tags_out, out)


def multiply(T: Tensor, tag: str = H) -> LinComb:
    """Multiply all legs together (all legs must live in the same algebra)."""
    out: dict = {}
    for legs, c in T.items():
        f = UNIT
        for g in legs:
            f = f * g
        _acc(out, normalize(tag, f), c)
    return LinComb._raw(tag, out)


def apply_counit(T: Tensor, leg: int) -> Tensor | LinComb:
    out: dict = {}
    for key, c in T.items():
        if key[leg].is_unit():
            _acc(out, key[:leg] + key[leg + 1:], c)
    tags = T.tags[:leg] + T.tags[leg + 1:]
    if len(tags) == 1:
        return LinComb._raw(tags[0], {k[0]: c for k, c in out.items()})
    return Tensor._raw(tags, out)


# --- independent routes used by the verifiers -----------------------------------

def delta_H_direct(f) -> Tensor:
    """CK coproduct of a forest from descendant-closed vertex subsets.

    Independent of the admissible-cut path: a term ``P (x) R`` for every
    vertex set ``P`` closed under taking children.
    """
    f = as_forest(f)
    parent, children = layout(f.trees)
    n = len(parent)
    out: dict = {}

    def full(v):
        return Tree(full(c) for c in children[v])

    def rest(v, inside):
        return Tree(rest(c, inside) for c in children[v] if not inside[c])

    for mask in range(1 << n):
        inside = [bool(mask >> v & 1) for v in range(n)]
        if any(inside[v] and not inside[c] for v in range(n) for c in children[v]):
            continue
        pruned = Forest(full(v) for v in range(n) if inside[v] and (parent[v] < 0 or not inside[parent[v]]))
        trunk = Forest(rest(v, inside) for v in range(n) if parent[v] < 0 and not inside[v])
        _acc(out, (pruned, trunk), _ONE)
    return Tensor._raw((H, H), out)


def coaction_direct(f) -> Tensor:
    """Coaction of a forest by enumerating all its edges at once (no per-tree product)."""
    return Tensor((K, H), _count(subforests(f)))


def delta_K_direct(f) -> Tensor:
    f = k_normal(as_forest(f))
    return Tensor((K, K), _count((s, k_normal(c)) for s, c in subforests(f)))


def _count(pairs) -> dict:
    out: dict = {}
    for p in pairs:
        _acc(out, tuple(p), _ONE)
    return out


# --- verifiers ---------------------------------------------------------------------

def _basis(tag: str, max_degree: int) -> list[Forest]:
    return enumerate_k_forests(max_degree) if tag == K else enumerate_forests(max_degree)


def check_hopf_axioms(tag: str, max_degree: int) -> Report:
    """Brute-force check of the Hopf axioms on every basis forest up to ``max_degree``.

    Degree is vertices for H and edges for K.
    """
    _check_tag(tag)
    rep = Report(f"hopf-{tag}")
    basis = _basis(tag, max_degree)
    delta = lambda f: coproduct(tag, f)
    unit = LinComb.basis(tag, UNIT)
    for x in basis:
        n = degree(tag, x)
        D = delta(x)
        rep.check("coassociativity", x, map_leg(D, 0, delta), map_leg(D, 1, delta))
        xc = LinComb.basis(tag, x)
        rep.check("counit-left", x, apply_counit(D, 0), xc)
        rep.check("counit-right", x, apply_counit(D, 1), xc)
        eps = counit(xc, tag)
        s_left = multiply(map_leg(D, 0, lambda f: antipode(f, tag)), tag)
        s_right = multiply(map_leg(D, 1, lambda f: antipode(f, tag)), tag)
        rep.check("antipode-left", x, s_left, eps * unit if eps else LinComb(tag))
        rep.check("antipode-right", x, s_right, eps * unit if eps else LinComb(tag))
        bad = [k for k in D.terms if sum(degree(tag, g) for g in k) != n]
        rep.check("grading", x, len(bad), 0)
        rep.check("antipode-involution", x, antipode(antipode(x, tag), tag), xc)
        if len(x.trees) == 1:
            rep.check("antipode-recursions", x, antipode(x, tag, "left"), antipode(x, tag, "right"))
    direct = delta_K_direct if tag == K else delta_H_direct
    for x, y in forest_pairs(basis, max_degree, lambda f: degree(tag, f)):
        rep.check("delta-multiplicative", f"{x} * {y}", direct(x * y), delta(x) * delta(y))
    return rep


def _m13(phi1: Tensor, phi2: Tensor) -> Tensor:
    out: dict = {}
    for (a, b), c in phi1.items():
        for (cc, d), e in phi2.items():
            _acc(out, (k_normal(a * cc), b, d), c * e)
    return Tensor._raw((K, H, H), out)


def check_compatibility(max_vertices: int) -> Report:
    """Verify ``(Id (x) Delta_H) Phi = m13 (Phi (x) Phi) Delta_H`` and the coaction axioms."""
    rep = Report("compat")
    basis = enumerate_forests(max_vertices)
    for x in basis:
        phi = coaction(x)
        left = map_leg(phi, 1, delta_H)
        right = Tensor((K, H, H))
        for (x1, x2), c in delta_H(x).items():
            right = right + c * _m13(coaction(x1), coaction(x2))
        rep.check("compatibility", x, left, right)
        rep.check(
            "coaction-coassociativity", x, map_leg(phi, 0, delta_K), map_leg(phi, 1, coaction)
        )
        rep.check("coaction-counit", x, apply_counit(phi, 0), LinComb.basis(H, x))
        n = x.vertex_count
        bad = [k for k in phi.terms if k[0].edge_count + k[1].vertex_count != n]
        rep.check("coaction-grading", x, len(bad), 0)
    for x, y in forest_pairs(basis, max_vertices, lambda f: f.vertex_count):
        rep.check("coaction-multiplicative", f"{x} * {y}", coaction_direct(x * y), coaction(x) * coaction(y))
    return rep
