"""Linear maps from H (or K) into Laurent polynomials, and the character group.

Characters and infinitesimal characters are stored by their values on trees
and extended on demand (multiplicatively, resp. by vanishing on products).
Everything is lazy and memoized per basis forest.
"""
from __future__ import annotations

import random
import re
from fractions import Fraction
from math import factorial
from typing import Callable, Mapping

from .algebra import H, K, LinComb, _check_tag, antipode, coproduct, degree, normalize, reduced_coproduct, reduced_tree_coproduct
from .forests import UNIT, Forest, Tree, as_forest, enumerate_forests, enumerate_k_forests, enumerate_k_trees, enumerate_trees, forest_pairs, parse_forest
from .laurent import ONE, ZERO, LaurentPoly, as_laurent, laurent_sum, parse_laurent, pi_minus
from .report import Report


class LinMap:
    """A linear map ``H -> A`` (or ``K -> A``) given by its values on basis forests."""

    def __init__(self, tag: str, rule: Callable[[Forest], LaurentPoly], name: str = ""):
        self.tag = _check_tag(tag)
        self.name = name
        self._rule = rule
        self._memo: dict[Forest, LaurentPoly] = {}

    def on_forest(self, f: Forest) -> LaurentPoly:
        f = normalize(self.tag, f)
        try:
            return self._memo[f]
        except KeyError:
            value = as_laurent(self._rule(f))
            self._memo[f] = value
            return value

    def __call__(self, x) -> LaurentPoly:
        if isinstance(x, LinComb):
            if x.tag != self.tag:
                raise ValueError(f"map on {self.tag} applied to an element of {x.tag}")
            return laurent_sum(c * self.on_forest(f) for f, c in x.items())
        return self.on_forest(as_forest(x))

    def __add__(self, other: "LinMap") -> "LinMap":
        _same(self, other)
        return LinMap(self.tag, lambda f: self.on_forest(f) + other.on_forest(f))

    def __sub__(self, other: "LinMap") -> "LinMap":
        _same(self, other)
        return LinMap(self.tag, lambda f: self.on_forest(f) - other.on_forest(f))

    def __neg__(self) -> "LinMap":
        return LinMap(self.tag, lambda f: -self.on_forest(f))

    def __rmul__(self, c) -> "LinMap":
        c = as_laurent(c)
        return LinMap(self.tag, lambda f: c * self.on_forest(f))

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name or '?'} on {self.tag}>"


def _same(f: LinMap, g: LinMap) -> None:
    if f.tag != g.tag:
        raise ValueError(f"maps live on different algebras ({f.tag}, {g.tag})")


class _TreeValued(LinMap):
    """Shared storage of values on trees (dict or callable, default 0)."""

    def __init__(self, tag: str, values: Mapping | Callable[[Tree], LaurentPoly] | None = None,
                 name: str = "", source: LinMap | None = None):
        super().__init__(tag, self._extend, name)
        if callable(values):
            self._fn = values
            self.generators: dict[Tree, LaurentPoly] | None = None
        else:
            gens = {}
            for t, v in (values or {}).items():
                t = _as_tree(t)
                if tag == K and t.vertex_count == 1:
                    raise ValueError("the single vertex is the unit of K and carries no value")
                gens[t] = as_laurent(v)
            self.generators = gens
            self._fn = lambda t: gens.get(t, ZERO)
        self._tree_memo: dict[Tree, LaurentPoly] = {}
        self.source = source

    def tree_value(self, t) -> LaurentPoly:
        t = _as_tree(t)
        try:
            return self._tree_memo[t]
        except KeyError:
            value = as_laurent(self._fn(t))
            self._tree_memo[t] = value
            return value

    def _extend(self, f: Forest) -> LaurentPoly:
        raise NotImplementedError


def _as_tree(t) -> Tree:
    if isinstance(t, Tree):
        return t
    f = as_forest(t)
    if not f.is_tree():
        raise ValueError(f"{f} is not a single tree")
    return f.trees[0]


class Character(_TreeValued):
    """Algebra morphism into A: the value on a forest is the product over its trees."""

    def _extend(self, f: Forest) -> LaurentPoly:
        value = ONE
        for t in f.trees:
            value = value * self.tree_value(t)
            if not value:
                break
        return value


class InfChar(_TreeValued):
    """Infinitesimal character: zero on the unit and on every product of two or more trees."""

    def _extend(self, f: Forest) -> LaurentPoly:
        if len(f.trees) == 1:
            return self.tree_value(f.trees[0])
        return ZERO

    def scaled(self, c) -> "InfChar":
        c = as_laurent(c)
        return InfChar(self.tag, lambda t: c * self.tree_value(t), name=self.name)


def counit_character(tag: str = H) -> Character:
    """The neutral element ``e = u o epsilon``."""
    return Character(tag, {}, name="e")


def zero_map(tag: str = H) -> InfChar:
    return InfChar(tag, {}, name="0")


def eval_map(f: LinMap, x) -> LaurentPoly:
    return f(x)


# --- convolution --------------------------------------------------------------------

def _convolve_on(f: LinMap, g: LinMap, x: Forest) -> LaurentPoly:
    return laurent_sum(
        c * f.on_forest(a) * g.on_forest(b) for (a, b), c in coproduct(f.tag, x).items()
    )


def convolve(f: LinMap, g: LinMap) -> LinMap:
    """Convolution ``m_A o (f (x) g) o Delta``; stays a Character when both are."""
    _same(f, g)
    if isinstance(f, Character) and isinstance(g, Character):
        return Character(f.tag, lambda t: _convolve_on(f, g, Forest((t,))))
    return LinMap(f.tag, lambda x: _convolve_on(f, g, x))


def conv_inverse(f: Character) -> Character:
    """``f o S``; the convolution inverse of a character."""
    return Character(f.tag, lambda t: f(antipode(Forest((t,)), f.tag)))


class _Powers:
    """Lazily built convolution powers ``a^{*n}``."""

    def __init__(self, a: LinMap):
        self.a = a
        self.powers: list[LinMap] = [counit_character(a.tag)]

    def __getitem__(self, n: int) -> LinMap:
        while len(self.powers) <= n:
            self.powers.append(convolve(self.powers[-1], self.a))
        return self.powers[n]


def conv_exp_map(a: LinMap) -> LinMap:
    """``sum a^{*n}/n!`` evaluated forest-wise; finite because ``a`` kills the unit."""
    powers = _Powers(a)
    return LinMap(a.tag, lambda x: laurent_sum(
        Fraction(1, factorial(n)) * powers[n].on_forest(x) for n in range(degree(a.tag, x) + 1)
    ))


def conv_exp(a: InfChar) -> Character:
    ex = conv_exp_map(a)
    return Character(a.tag, lambda t: ex.on_forest(Forest((t,))), source=ex)


def conv_log_map(f: LinMap) -> LinMap:
    """``sum (-1)^{n+1} (f - e)^{*n} / n``, truncated by degree."""
    if f.on_forest(UNIT) != ONE:
        raise ValueError("log needs f(1) = 1")
    powers = _Powers(f - counit_character(f.tag))
    return LinMap(f.tag, lambda x: laurent_sum(
        Fraction((-1) ** (n + 1), n) * powers[n].on_forest(x)
        for n in range(1, degree(f.tag, x) + 1)
    ))


def conv_log(f: Character) -> InfChar:
    lg = conv_log_map(f)
    return InfChar(f.tag, lambda t: lg.on_forest(Forest((t,))), source=lg)


# --- Birkhoff decomposition ------------------------------------------------------------

def birkhoff(phi: Character) -> tuple[Character, Character]:
    """Counterterm and renormalized characters under minimal subtraction.

    Returns ``(phi_minus, phi_plus)`` with ``phi = phi_minus^{*-1} * phi_plus``.
    """
    prep: dict[Tree, LaurentPoly] = {}

    def bar(t: Tree) -> LaurentPoly:
        if t not in prep:
            prep[t] = phi.tree_value(t) + laurent_sum(
                c * minus.on_forest(a) * phi.on_forest(b)
                for (a, b), c in reduced_tree_coproduct(phi.tag, t).items()
            )
        return prep[t]

    minus = Character(phi.tag, lambda t: -pi_minus(bar(t)), name="phi_minus")
    plus = Character(phi.tag, lambda t: bar(t) - pi_minus(bar(t)), name="phi_plus")
    return minus, plus


def bogoliubov(phi: Character, minus: Character | None = None) -> LinMap:
    """Bogoliubov preparation ``b(phi)(x) = phi(x) + sum phi_-(x') phi(x'')``, zero on 1."""
    if minus is None:
        minus, _ = birkhoff(phi)

    def rule(x: Forest) -> LaurentPoly:
        if x.is_unit():
            return ZERO
        return phi.on_forest(x) + laurent_sum(
            c * minus.on_forest(a) * phi.on_forest(b)
            for (a, b), c in reduced_coproduct(phi.tag, x).items()
        )

    return LinMap(phi.tag, rule, name="b")


def birkhoff_series_oracle(phi: Character, max_degree: int) -> tuple[LinMap, LinMap]:
    """Birkhoff components from the fixed points ``e + P(m * lambda)`` and ``e + P~(p * xi)``.

    Iterates ``max_degree`` times; evaluation is on full forests with no
    multiplicativity assumed, so it is an independent route to :func:`birkhoff`.
    """
    e = counit_character(phi.tag)
    lam = e - phi
    xi = e - conv_inverse(phi)
    m: LinMap = e
    p: LinMap = e
    for _ in range(max(max_degree, 0)):
        m = _plus_e(_project(convolve(m, lam), minus=True))
        p = _plus_e(_project(convolve(p, xi), minus=False))
    return m, p


def _project(f: LinMap, minus: bool) -> LinMap:
    if minus:
        return LinMap(f.tag, lambda x: pi_minus(f.on_forest(x)))
    return LinMap(f.tag, lambda x: f.on_forest(x) - pi_minus(f.on_forest(x)))


def _plus_e(f: LinMap) -> LinMap:
    return LinMap(f.tag, lambda x: f.on_forest(x) + (ONE if x.is_unit() else ZERO))


# --- structural predicates ---------------------------------------------------------------

def _basis(tag: str, max_degree: int) -> list[Forest]:
    return enumerate_k_forests(max_degree) if tag == K else enumerate_forests(max_degree)


def multiplicativity_failures(f: LinMap, max_degree: int) -> Report:
    rep = Report("multiplicative")
    rep.check("unit", "1", f.on_forest(UNIT), ONE)
    for x, y in forest_pairs(_basis(f.tag, max_degree), max_degree, lambda g: degree(f.tag, g)):
        rep.check("multiplicative", f"{x} * {y}", f.on_forest(x * y), f.on_forest(x) * f.on_forest(y))
    return rep


def infinitesimality_failures(f: LinMap, max_degree: int) -> Report:
    rep = Report("infinitesimal")
    rep.check("unit", "1", f.on_forest(UNIT), ZERO)
    for x, y in forest_pairs(_basis(f.tag, max_degree), max_degree, lambda g: degree(f.tag, g)):
        rep.check("infinitesimal", f"{x} * {y}", f.on_forest(x * y), ZERO)
    return rep


def is_multiplicative(f: LinMap, max_degree: int) -> bool:
    return multiplicativity_failures(f, max_degree).ok


def is_infinitesimal(f: LinMap, max_degree: int) -> bool:
    return infinitesimality_failures(f, max_degree).ok


def maps_equal(f: LinMap, g: LinMap, max_degree: int, identity: str = "equal", report: Report | None = None) -> Report:
    """Compare two maps on every basis forest up to ``max_degree``."""
    _same(f, g)
    rep = report if report is not None else Report(identity)
    for x in _basis(f.tag, max_degree):
        rep.check(identity, x, f.on_forest(x), g.on_forest(x))
    return rep


# --- seeded test characters ----------------------------------------------------------------

def random_laurent(rng: random.Random, low: int, high: int, max_terms: int = 3) -> LaurentPoly:
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        k = rng.randint(low, high)
        num = rng.choice([-3, -2, -1, 1, 2, 3])
        den = rng.randint(1, 3)
        terms[(k, ())] = terms.get((k, ()), 0) + Fraction(num, den)
    return LaurentPoly(terms)


def _trees(tag: str, max_degree: int) -> list[Tree]:
    return enumerate_k_trees(max_degree) if tag == K else enumerate_trees(max_degree)


def random_character(rng: random.Random, tag: str = H, max_degree: int = 4,
                     regular: bool = False, constant: bool = False, polar: bool = False,
                     infinitesimal: bool = False) -> Character | InfChar:
    """Seeded pseudo-random character (or infinitesimal character).

    Tree values are Laurent polynomials with z-exponents in ``[-deg, 2]``;
    ``regular`` restricts to ``[0, 2]``, ``polar`` to ``[-deg, -1]`` and
    ``constant`` to rationals.  Values are drawn eagerly in canonical tree
    order so a seed fixes the character regardless of evaluation order.
    """
    values = {}
    for t in _trees(tag, max_degree):
        d = degree(tag, Forest((t,)))
        if constant:
            low, high = 0, 0
        elif regular:
            low, high = 0, 2
        elif polar:
            low, high = -d, -1
        else:
            low, high = -d, 2
        values[t] = random_laurent(rng, low, high)
    cls = InfChar if infinitesimal else Character
    return cls(tag, values)


# --- character files ------------------------------------------------------------------------

class CharFileError(ValueError):
    def __init__(self, message: str, line: int = 0, source: str = ""):
        where = f"{source or 'input'}:{line}: " if line else ""
        super().__init__(where + message)
        self.line = line


class CharSpec:
    """A parsed definition block: tag plus tree values, turned into a map on demand."""

    def __init__(self, name: str, tag: str):
        self.name = name
        self.tag = tag
        self.values: dict[Tree, LaurentPoly] = {}

    def character(self) -> Character:
        return Character(self.tag, self.values, name=self.name)

    def infinitesimal(self) -> InfChar:
        return InfChar(self.tag, self.values, name=self.name)


_HEADER = re.compile(r"^\[char\s+([A-Za-z_][A-Za-z_0-9]*)\s+on\s+([HK])\s*\]$")


def _add_value(spec: CharSpec, lhs: str, rhs: str, line: int, source: str) -> None:
    lhs, rhs = lhs.strip(), rhs.strip()
    if lhs == "default":
        if parse_laurent(rhs):
            raise CharFileError("only 'default = 0' is supported", line, source)
        return
    try:
        f = parse_forest(lhs)
        value = parse_laurent(rhs)
    except ValueError as exc:
        raise CharFileError(str(exc), line, source) from None
    if not f.is_tree():
        raise CharFileError(f"values are given on single trees, not on {f}", line, source)
    t = f.trees[0]
    if spec.tag == K and t.vertex_count == 1:
        raise CharFileError("the single vertex is the unit of K and carries no value", line, source)
    if t in spec.values:
        raise CharFileError(f"duplicate value for {t}", line, source)
    spec.values[t] = value


def parse_characters(text: str, source: str = "") -> dict[str, CharSpec]:
    """Parse a character file into named specs, keeping file order."""
    specs: dict[str, CharSpec] = {}
    current: CharSpec | None = None
    for number, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _HEADER.match(line)
        if m:
            name, tag = m.groups()
            if name in specs:
                raise CharFileError(f"character {name!r} defined twice", number, source)
            current = specs[name] = CharSpec(name, tag)
            continue
        if line.startswith("[char"):
            raise CharFileError("malformed header; expected '[char NAME on H|K]'", number, source)
        if current is None:
            raise CharFileError("value line before any '[char ...]' header", number, source)
        if "=" not in line:
            raise CharFileError("expected '<forest> = <value>'", number, source)
        lhs, rhs = line.split("=", 1)
        _add_value(current, lhs, rhs, number, source)
    return specs


_DEF_HEAD = re.compile(r"^\s*([A-Za-z_][A-Za-z_0-9]*)(?:\s+on\s+([HK]))?\s*:(.*)$", re.S)


def parse_inline(text: str) -> CharSpec:
    """``NAME [on H|K]: <forest>=<value>; ...``; the tag defaults to H."""
    m = _DEF_HEAD.match(text)
    if not m:
        raise CharFileError(f"expected 'NAME [on H|K]: forest=value; ...', got {text!r}")
    name, tag, body = m.groups()
    spec = CharSpec(name, tag or H)
    for part in body.split(";"):
        if not part.strip():
            continue
        if "=" not in part:
            raise CharFileError(f"expected '<forest>=<value>' in {part.strip()!r}")
        lhs, rhs = part.split("=", 1)
        _add_value(spec, lhs, rhs, 0, "--def")
    return spec


def render_character(name: str, f: LinMap, max_degree: int) -> str:
    """Character-file block listing the values on all trees up to ``max_degree``."""
    lines = [f"[char {name} on {f.tag}]"]
    for t in _trees(f.tag, max_degree):
        lines.append(f"{t} = {f.on_forest(Forest((t,)))}")
    return "\n".join(lines)
