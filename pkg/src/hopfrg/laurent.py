"""Exact Laurent polynomials in the regulator ``z``.

Coefficients are multivariate polynomials over the rationals in a small set of
declared formal parameters (``t`` and ``s`` out of the box).  The minimal
subtraction splitting at ``z = 0`` is exposed through :func:`pi_minus`,
:func:`residue` and :func:`const_term`.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Union

Monomial = tuple  # sorted tuple of (name, exponent) pairs
Scalar = Union[int, Fraction]

_DECLARED: set[str] = {"t", "s"}


class UnknownParameter(ValueError):
    pass


class PoleAtZero(ValueError):
    """A strictly negative power of ``z`` survived where a regular value was required."""

    def __init__(self, value: "LaurentPoly", context: str = ""):
        msg = f"pole at z=0 in {value}"
        if context:
            msg += f" ({context})"
        super().__init__(msg)
        self.value = value
        self.context = context


def declare_parameters(*names: str) -> None:
    for name in names:
        if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", name) or name == "z":
            raise ValueError(f"invalid parameter name {name!r}")
        _DECLARED.add(name)


def declared_parameters() -> frozenset[str]:
    return frozenset(_DECLARED)


def _check_declared(name: str) -> None:
    if name not in _DECLARED:
        raise UnknownParameter(f"unknown parameter {name!r}")


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    exps = dict(a)
    for name, e in b:
        exps[name] = exps.get(name, 0) + e
    return tuple(sorted(exps.items()))


def _mono_str(m: Monomial) -> str:
    return "*".join(name if e == 1 else f"{name}^{e}" for name, e in m)


def _frac(c: Scalar) -> Fraction:
    return c if isinstance(c, Fraction) else Fraction(c)


class _Sparse:
    """Shared plumbing for sparse rational-coefficient polynomials."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping | None = None):
        self._terms = {k: _frac(c) for k, c in (terms or {}).items() if c}

    @classmethod
    def _raw(cls, terms: dict):
        obj = cls.__new__(cls)
        obj._terms = terms
        return obj

    @staticmethod
    def _key_mul(a, b):
        raise NotImplementedError

    def _coerce(self, other):
        raise NotImplementedError

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for k, c in other._terms.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return self._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return self._raw({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return self._raw({})
            return self._raw({k: c * other for k, c in self._terms.items()})
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out: dict = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                k = self._key_mul(k1, k2)
                v = out.get(k, 0) + c1 * c2
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
        return self._raw(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not supported here")
        result = self._coerce(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def parameters(self) -> frozenset[str]:
        return frozenset(name for k in self._terms for name, _ in self._mono_of(k))

    @staticmethod
    def _mono_of(key) -> Monomial:
        raise NotImplementedError


class ParamPoly(_Sparse):
    """Polynomial over Q in the formal parameters; keys are monomials."""

    __slots__ = ()

    @staticmethod
    def _key_mul(a, b):
        return _mono_mul(a, b)

    @staticmethod
    def _mono_of(key) -> Monomial:
        return key

    def _coerce(self, other) -> "ParamPoly":
        if isinstance(other, ParamPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return ParamPoly({(): other})
        raise TypeError(type(other))

    @classmethod
    def const(cls, c: Scalar) -> "ParamPoly":
        return cls({(): c})

    @classmethod
    def var(cls, name: str) -> "ParamPoly":
        return cls({((name, 1),): 1})

    def items(self):
        return self._terms.items()

    def is_constant(self) -> bool:
        return all(m == () for m in self._terms)

    def constant(self) -> Fraction:
        return self._terms.get((), Fraction(0))

    def derivative(self, name: str) -> "ParamPoly":
        out: dict = {}
        for m, c in self._terms.items():
            exps = dict(m)
            e = exps.get(name, 0)
            if not e:
                continue
            if e == 1:
                del exps[name]
            else:
                exps[name] = e - 1
            key = tuple(sorted(exps.items()))
            out[key] = out.get(key, 0) + c * e
        return ParamPoly(out)

    def substitute(self, name: str, value: "ParamPoly") -> "ParamPoly":
        out = ParamPoly()
        powers: dict[int, ParamPoly] = {}
        for m, c in self._terms.items():
            exps = dict(m)
            e = exps.pop(name, 0)
            rest = ParamPoly({tuple(sorted(exps.items())): c})
            if e:
                if e not in powers:
                    powers[e] = value ** e
                rest = rest * powers[e]
            out = out + rest
        return out

    def _sort_key(self, m: Monomial):
        return (sum(e for _, e in m), m)

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for m in sorted(self._terms, key=self._sort_key):
            c = self._terms[m]
            if not m:
                parts.append(str(c))
            elif c == 1:
                parts.append(_mono_str(m))
            elif c == -1:
                parts.append("-" + _mono_str(m))
            else:
                parts.append(f"{c}*{_mono_str(m)}")
        return _join_signed(parts)

    def __repr__(self) -> str:
        return f"ParamPoly({str(self)!r})"


def _join_signed(parts: list[str]) -> str:
    out = parts[0]
    for p in parts[1:]:
        out += " - " + p[1:] if p.startswith("-") else " + " + p
    return out


class LaurentPoly(_Sparse):
    """Finite Laurent polynomial in ``z`` with :class:`ParamPoly` coefficients.

    Stored flat: keys are ``(z_exponent, monomial)``.
    """

    __slots__ = ()

    @staticmethod
    def _key_mul(a, b):
        return (a[0] + b[0], _mono_mul(a[1], b[1]))

    @staticmethod
    def _mono_of(key) -> Monomial:
        return key[1]

    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            return other
        if isinstance(other, ParamPoly):
            return LaurentPoly.from_param(other)
        if isinstance(other, (int, Fraction)):
            return LaurentPoly({(0, ()): other})
        raise TypeError(type(other))

    @classmethod
    def const(cls, c: Scalar) -> "LaurentPoly":
        return cls({(0, ()): c})

    @classmethod
    def z(cls, k: int = 1) -> "LaurentPoly":
        return cls({(k, ()): 1})

    @classmethod
    def var(cls, name: str) -> "LaurentPoly":
        return cls({(0, ((name, 1),)): 1})

    @classmethod
    def from_param(cls, p: ParamPoly, k: int = 0) -> "LaurentPoly":
        return cls._raw({(k, m): c for m, c in p.items()})

    @classmethod
    def from_coefficients(cls, coeffs: Mapping[int, ParamPoly | Scalar]) -> "LaurentPoly":
        out = cls()
        for k, p in coeffs.items():
            if not isinstance(p, ParamPoly):
                p = ParamPoly.const(p)
            out = out + cls.from_param(p, k)
        return out

    def exponents(self) -> list[int]:
        return sorted({k for k, _ in self._terms})

    def coeff(self, k: int) -> ParamPoly:
        return ParamPoly._raw({m: c for (e, m), c in self._terms.items() if e == k})

    def coefficients(self) -> dict[int, ParamPoly]:
        return {k: self.coeff(k) for k in self.exponents()}

    def min_exponent(self) -> int | None:
        return min((k for k, _ in self._terms), default=None)

    def is_constant(self) -> bool:
        """True when the value is a bare rational (no ``z``, no parameters)."""
        return all(key == (0, ()) for key in self._terms)

    def constant(self) -> Fraction:
        return self._terms.get((0, ()), Fraction(0))

    def is_regular(self) -> bool:
        """In ``A_+``: no strictly negative powers of ``z``."""
        return all(k >= 0 for k, _ in self._terms)

    def is_polar(self) -> bool:
        """In ``A_-``: only strictly negative powers of ``z``."""
        return all(k < 0 for k, _ in self._terms)

    def map_coefficients(self, fn) -> "LaurentPoly":
        return LaurentPoly.from_coefficients({k: fn(p) for k, p in self.coefficients().items()})

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for k, p in sorted(self.coefficients().items()):
            if k == 0:
                parts.append(str(p))
                continue
            zk = "z" if k == 1 else f"z^{k}"
            if p.is_constant():
                c = p.constant()
                if c == 1:
                    parts.append(zk)
                elif c == -1:
                    parts.append("-" + zk)
                else:
                    parts.append(f"{c}*{zk}")
            else:
                parts.append(f"({p})*{zk}")
        return _join_signed(parts)

    def __repr__(self) -> str:
        return f"LaurentPoly({str(self)!r})"


def as_laurent(x) -> LaurentPoly:
    if isinstance(x, LaurentPoly):
        return x
    if isinstance(x, ParamPoly):
        return LaurentPoly.from_param(x)
    if isinstance(x, (int, Fraction)):
        return LaurentPoly.const(x)
    if isinstance(x, str):
        return parse_laurent(x)
    raise TypeError(f"cannot convert {type(x).__name__} to LaurentPoly")


ZERO = LaurentPoly()
ONE = LaurentPoly.const(1)
Z = LaurentPoly.z(1)
Z_INV = LaurentPoly.z(-1)


def pi_minus(a: LaurentPoly) -> LaurentPoly:
    """Projection onto ``A_-`` parallel to ``A_+``: keep strictly negative powers of z."""
    return LaurentPoly._raw({key: c for key, c in a._terms.items() if key[0] < 0})


def pi_plus(a: LaurentPoly) -> LaurentPoly:
    return LaurentPoly._raw({key: c for key, c in a._terms.items() if key[0] >= 0})


def residue(a: LaurentPoly) -> ParamPoly:
    return a.coeff(-1)


def const_term(a: LaurentPoly, context: str = "") -> ParamPoly:
    """Value at ``z = 0`` of a pole-free Laurent polynomial."""
    if not a.is_regular():
        raise PoleAtZero(a, context)
    return a.coeff(0)


def d_param(a, name: str):
    _check_declared(name)
    if isinstance(a, ParamPoly):
        return a.derivative(name)
    return a.map_coefficients(lambda p: p.derivative(name))


def subst_param(a, name: str, value):
    """Substitute ``value`` (a ParamPoly or rational) for parameter ``name``."""
    _check_declared(name)
    if not isinstance(value, ParamPoly):
        value = ParamPoly.const(value)
    if isinstance(a, ParamPoly):
        return a.substitute(name, value)
    return a.map_coefficients(lambda p: p.substitute(name, value))


# --- text grammar ----------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


class LaurentSyntaxError(ValueError):
    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position} in {text!r}")
        self.position = position
        self.text = text


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str, int]] = []
        for m in _TOKEN.finditer(text):
            if m.group(1):
                self.tokens.append(("num", m.group(1), m.start(1)))
            elif m.group(2):
                self.tokens.append(("name", m.group(2), m.start(2)))
            else:
                self.tokens.append(("op", m.group(3), m.start(3)))
        self.i = 0

    def error(self, message: str):
        pos = self.tokens[self.i][2] if self.i < len(self.tokens) else len(self.text)
        raise LaurentSyntaxError(message, self.text, pos)

    def peek(self) -> str | None:
        return self.tokens[self.i][1] if self.i < len(self.tokens) else None

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def parse(self) -> LaurentPoly:
        if not self.tokens:
            self.error("empty expression")
        value = self.sum()
        if self.i != len(self.tokens):
            self.error(f"unexpected {self.peek()!r}")
        return value

    def sum(self) -> LaurentPoly:
        value = self.product()
        while self.peek() in ("+", "-"):
            op = self.take()[1]
            rhs = self.product()
            value = value + rhs if op == "+" else value - rhs
        return value

    def product(self) -> LaurentPoly:
        value = self.unary()
        while self.peek() in ("*", "/"):
            op = self.take()[1]
            rhs = self.unary()
            value = value * rhs if op == "*" else value * self.invert(rhs)
        return value

    def invert(self, v: LaurentPoly) -> LaurentPoly:
        if len(v._terms) != 1:
            self.error("can only divide by a single term")
        ((k, m), c), = v._terms.items()
        if m:
            self.error("cannot divide by a parameter")
        return LaurentPoly({(-k, ()): 1 / c})

    def unary(self) -> LaurentPoly:
        if self.peek() == "-":
            self.take()
            return -self.unary()
        if self.peek() == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> LaurentPoly:
        base = self.atom()
        if self.peek() != "^":
            return base
        self.take()
        sign = 1
        if self.peek() in ("-", "+"):
            sign = -1 if self.take()[1] == "-" else 1
        if self.i >= len(self.tokens) or self.tokens[self.i][0] != "num":
            self.error("expected integer exponent")
        n = sign * int(self.take()[1])
        if n >= 0:
            return base ** n
        return self.invert(base) ** (-n)

    def atom(self) -> LaurentPoly:
        if self.i >= len(self.tokens):
            self.error("unexpected end of input")
        kind, text, _ = self.tokens[self.i]
        if kind == "num":
            self.i += 1
            return LaurentPoly.const(int(text))
        if kind == "name":
            self.i += 1
            if text == "z":
                return Z
            if text not in _DECLARED:
                self.i -= 1
                self.error(f"unknown parameter {text!r}")
            return LaurentPoly.var(text)
        if text == "(":
            self.i += 1
            value = self.sum()
            if self.peek() != ")":
                self.error("expected ')'")
            self.i += 1
            return value
        self.error(f"unexpected {text!r}")


def parse_laurent(text: str) -> LaurentPoly:
    """Parse e.g. ``3/2*z^-2 + (1+2*t)*z^0 + z^3``."""
    return _Parser(text).parse()


def parse_param(text: str) -> ParamPoly:
    value = parse_laurent(text)
    if any(k != 0 for k in value.exponents()):
        raise LaurentSyntaxError("parameter polynomial must not contain z", text, 0)
    return value.coeff(0)


def laurent_sum(values: Iterable[LaurentPoly]) -> LaurentPoly:
    out: dict = {}
    for v in values:
        for k, c in v._terms.items():
            s = out.get(k, 0) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
    return LaurentPoly._raw(out)
