"""Renormalization-group machinery driven by an infinitesimal character of K.

An infinitesimal character ``alpha`` of K acts on H through the coaction:
``B_alpha = (alpha (x) Id) o Phi``.  From it we build the action of
K-characters on H-characters, the flow ``phi_t = exp(t z alpha) * phi``,
the operator ``R~_alpha``, the group ``F_t`` and the beta function.
"""
from __future__ import annotations

from fractions import Fraction
from math import factorial

from .algebra import H, K, LinComb, Tensor, antipode, coaction, delta_H, degree
from .characters import (
    Character,
    InfChar,
    LinMap,
    birkhoff,
    conv_exp,
    conv_inverse,
    conv_log,
    convolve,
)
from .forests import Forest, Tree, enumerate_forests, enumerate_trees
from .laurent import (
    ZERO,
    Z,
    Z_INV,
    LaurentPoly,
    ParamPoly,
    as_laurent,
    const_term,
    d_param,
    declare_parameters,
    laurent_sum,
    residue,
    subst_param,
)
from .report import Report


class Infeasible(ValueError):
    """No character of the requested shape solves the degree-``degree`` equations."""

    def __init__(self, degree: int, forest: Forest, residual: LaurentPoly):
        super().__init__(
            f"no solution at degree {degree}: constraint on {forest} reduces to {residual} = 0"
        )
        self.degree = degree
        self.forest = forest
        self.residual = residual


def _check(tag: str, f: LinMap, expected: str) -> None:
    if f.tag != expected:
        raise ValueError(f"expected a map on {expected}, got one on {tag}")


# --- B_alpha, the action, E_alpha ---------------------------------------------------

def b_alpha(alpha: LinMap, x) -> LinComb:
    """``sum alpha(K-leg) * H-leg`` over the coaction; coefficients in A."""
    _check(alpha.tag, alpha, K)
    out: dict = {}
    for (k, h), c in coaction(x).items():
        v = c * alpha.on_forest(k)
        if v:
            out[h] = out.get(h, ZERO) + v
    return LinComb(H, {f: v for f, v in out.items() if v})


def star_action(g: LinMap, phi: LinMap) -> LinMap:
    """``(g * phi)(x) = sum g(K-leg) phi(H-leg)``; a Character when both inputs are."""
    _check(g.tag, g, K)
    _check(phi.tag, phi, H)

    def on(x: Forest) -> LaurentPoly:
        return laurent_sum(c * g.on_forest(k) * phi.on_forest(h) for (k, h), c in coaction(x).items())

    if isinstance(g, Character) and isinstance(phi, Character):
        return Character(H, lambda t: on(Forest((t,))))
    return LinMap(H, on)


def apply_to_comb(phi: LinMap, comb: LinComb) -> LaurentPoly:
    """Evaluate a map on an A-coefficient combination of forests."""
    return laurent_sum(as_laurent(c) * phi.on_forest(f) for f, c in comb.items())


def e_alpha(alpha: LinMap, x) -> LinComb:
    """``(S * B_alpha)(x) = sum S(x1) B_alpha(x2)`` in A (x) H."""
    total = LinComb(H)
    for (a, b), c in delta_H(x).items():
        total = total + c * (antipode(a, H) * b_alpha(alpha, b))
    return LinComb(H, {f: as_laurent(v) for f, v in total.items()})


def coderivation_sides(alpha: LinMap, x) -> tuple[Tensor, Tensor]:
    """Both sides of ``Delta_H o B_alpha = B_{tm alpha} o Delta_H`` as A-valued H (x) H tensors.

    The right side pairs ``alpha`` with the product of the two K-legs of
    ``Phi (x) Phi`` applied to ``Delta_H(x)``.
    """
    left: dict = {}
    for h, c in b_alpha(alpha, x).items():
        for legs, d in delta_H(h).items():
            left[legs] = left.get(legs, ZERO) + c * d
    right: dict = {}
    for (x1, x2), c in delta_H(x).items():
        for (k1, h1), c1 in coaction(x1).items():
            for (k2, h2), c2 in coaction(x2).items():
                v = c * c1 * c2 * alpha.on_forest(k1 * k2)
                if v:
                    right[(h1, h2)] = right.get((h1, h2), ZERO) + v
    return Tensor((H, H), left), Tensor((H, H), right)


def coderivation_leibniz(alpha: LinMap, x) -> Tensor:
    """``(B_alpha (x) Id + Id (x) B_alpha) o Delta_H``: the infinitesimal form of the right side."""
    out: dict = {}
    for (x1, x2), c in delta_H(x).items():
        for h, v in b_alpha(alpha, x1).items():
            out[(h, x2)] = out.get((h, x2), ZERO) + c * v
        for h, v in b_alpha(alpha, x2).items():
            out[(x1, h)] = out.get((x1, h), ZERO) + c * v
    return Tensor((H, H), out)


# --- Z twist and the flow ---------------------------------------------------------------

def z_twist(g: Character, direction: str = "fwd") -> Character:
    """``exp(z^{+-1} log g)``."""
    _check(g.tag, g, K)
    if direction not in ("fwd", "inv"):
        raise ValueError("direction must be 'fwd' or 'inv'")
    scale = Z if direction == "fwd" else Z_INV
    return conv_exp(conv_log(g).scaled(scale))


class FlowCharacter(Character):
    """A character whose values depend polynomially on the formal parameter ``param``."""

    def __init__(self, values, param: str = "t", name: str = "", source: LinMap | None = None):
        declare_parameters(param)
        super().__init__(H, values, name=name, source=source)
        self.param = param

    def substitute(self, value) -> Character:
        """Replace the flow parameter by a rational or by a parameter polynomial."""
        if isinstance(value, str):
            declare_parameters(value)
            value = ParamPoly.var(value)
        return Character(H, lambda t: subst_param(self.tree_value(t), self.param, value))

    def at_zero(self) -> Character:
        return self.substitute(0)

    def renamed(self, param: str) -> "FlowCharacter":
        declare_parameters(param)
        return FlowCharacter(
            lambda t: subst_param(self.tree_value(t), self.param, ParamPoly.var(param)), param
        )

    def derivative(self) -> LinMap:
        """Forest-wise ``d/dparam``; linear, not multiplicative."""
        return LinMap(H, lambda x: d_param(self.on_forest(x), self.param))


def _regular_alpha(alpha: InfChar) -> InfChar:
    def value(t: Tree) -> LaurentPoly:
        v = alpha.tree_value(t)
        if not v.is_regular():
            raise ValueError(f"alpha must take values in A_+, but alpha({t}) = {v}")
        return v

    if alpha.generators is not None:
        for t in alpha.generators:
            value(t)
    return InfChar(K, value)


def flow(phi: Character, alpha: InfChar, param: str = "t") -> FlowCharacter:
    """``phi_t = exp(t z alpha) * phi`` with ``t`` kept formal."""
    _check(phi.tag, phi, H)
    _check(alpha.tag, alpha, K)
    declare_parameters(param)
    alpha = _regular_alpha(alpha)
    tz = LaurentPoly.var(param) * Z
    g = conv_exp(alpha.scaled(tz))
    acted = star_action(g, phi)
    return FlowCharacter(acted.tree_value, param, name="flow")


def h_flow(phi: Character, alpha: InfChar, param: str = "t") -> FlowCharacter:
    """``h_t = phi^{*-1} * phi_t``."""
    phi_t = flow(phi, alpha, param)
    h = convolve(conv_inverse(phi), phi_t)
    return FlowCharacter(h.tree_value, param, name="h")


# --- R~ and R --------------------------------------------------------------------------------

def r_tilde(phi: Character, alpha: InfChar) -> InfChar:
    """``phi^{*-1} * (alpha * phi)``; the full linear map is kept as ``.source``."""
    _check(phi.tag, phi, H)
    gamma = convolve(conv_inverse(phi), star_action(alpha, phi))
    return InfChar(H, lambda t: gamma.on_forest(Forest((t,))), name="rtilde", source=gamma)


def _ad(a: LinMap, y: LinMap) -> LinMap:
    return convolve(a, y) - convolve(y, a)


def r_alpha(a: InfChar, alpha: InfChar, method: str = "direct") -> InfChar:
    """``R_alpha(a) = exp(-a) * (alpha * exp(a))``.

    ``integral`` evaluates ``sum_k (-ad a)^k / (k+1)! (a o B_alpha)``,
    truncated once ``k`` reaches the degree.
    """
    if method == "direct":
        return r_tilde(conv_exp(a), alpha)
    if method != "integral":
        raise ValueError(f"unknown method {method!r}")
    seed = star_action(alpha, a)
    ads = [seed]

    def term(k: int) -> LinMap:
        while len(ads) <= k:
            ads.append(_ad(a, ads[-1]))
        return ads[k]

    def on(x: Forest) -> LaurentPoly:
        return laurent_sum(
            Fraction((-1) ** k, factorial(k + 1)) * term(k).on_forest(x) for k in range(degree(H, x) + 1)
        )

    total = LinMap(H, on)
    return InfChar(H, lambda t: total.on_forest(Forest((t,))), name="R", source=total)


# --- locality, RG, beta -----------------------------------------------------------------

def locality_check(phi: Character, alpha: InfChar, max_degree: int, param: str = "t") -> Report:
    """Report the forests where the counterterm of the flow still depends on ``param``."""
    minus, _ = birkhoff(flow(phi, alpha, param))
    rep = Report("locality")
    for x in enumerate_forests(max_degree):
        rep.check(f"d/d{param} flow_minus = 0", x, d_param(minus.on_forest(x), param), ZERO)
    return rep


def rg_flow(phi: Character, alpha: InfChar, max_degree: int, param: str = "t") -> FlowCharacter:
    """``F_t(x) = lim_{z->0} h_t(x)``; a pole raises :class:`PoleAtZero` naming the tree."""
    h = h_flow(phi, alpha, param)
    values = {
        t: LaurentPoly.from_param(const_term(h.tree_value(t), context=f"h_{param}({t})"))
        for t in enumerate_trees(max_degree)
    }
    return FlowCharacter(values, param, name="F")


BETA_METHODS = ("generator", "residue", "counterterm")


def beta(phi: Character, alpha: InfChar, max_degree: int, method: str = "generator", param: str = "t") -> InfChar:
    """Beta function on trees up to ``max_degree``, by one of :data:`BETA_METHODS`."""
    trees = enumerate_trees(max_degree)
    if method == "generator":
        F = rg_flow(phi, alpha, max_degree, param)
        dF = F.derivative()
        values = {t: subst_param(dF.on_forest(Forest((t,))), F.param, 0) for t in trees}
    elif method == "residue":
        gamma = r_tilde(phi, alpha)
        values = {t: LaurentPoly.from_param(residue(gamma.tree_value(t))) for t in trees}
    elif method == "counterterm":
        minus, _ = birkhoff(phi)
        acted = star_action(alpha, minus)
        values = {t: -LaurentPoly.from_param(residue(acted.on_forest(Forest((t,))))) for t in trees}
    else:
        raise ValueError(f"unknown method {method!r}; choose from {', '.join(BETA_METHODS)}")
    return InfChar(H, values, name=f"beta[{method}]")


# --- solving z R~(phi) = chi for polar phi ---------------------------------------------------

def construct_local_minus(alpha: InfChar, chi: InfChar, max_degree: int) -> Character:
    """Find ``phi`` with ``phi(ker eps)`` polar and ``z R~_alpha(phi) = chi`` up to ``max_degree``.

    ``z R~(phi) = chi`` is rewritten as ``alpha * phi = phi * (chi / z)``.  On a
    tree of degree ``n`` both sides involve ``phi`` only below degree ``n``,
    and the degree ``n - 1`` tree values enter linearly.  Those values are
    taken with poles of order ``<= n - 1``; the unknown coefficients are solved
    exactly, free ones set to zero.  Trees of the top degree are left at zero.
    """
    _check(alpha.tag, alpha, K)
    _check(chi.tag, chi, H)
    values: dict[Tree, LaurentPoly] = {}
    for n in range(1, max_degree + 1):
        unknowns: list[tuple[Tree, int, str]] = []
        trial = dict(values)
        if n >= 2:
            for i, t in enumerate(enumerate_trees(n - 1)):
                if t.vertex_count != n - 1:
                    continue
                v = ZERO
                for k in range(1, n):
                    name = f"_u{n - 1}_{i}_{k}"
                    unknowns.append((t, k, name))
                    v = v + LaurentPoly.var(name) * LaurentPoly.z(-k)
                trial[t] = v
        declare_parameters(*(name for _, _, name in unknowns))
        phi = Character(H, trial)
        target = convolve(phi, chi.scaled(Z_INV))
        acted = star_action(alpha, phi)
        rows: list[tuple[Forest, LaurentPoly, dict[str, Fraction], Fraction]] = []
        for t in enumerate_trees(n):
            if t.vertex_count != n:
                continue
            x = Forest((t,))
            residual = acted.on_forest(x) - target.on_forest(x)
            for k, p in residual.coefficients().items():
                row: dict[str, Fraction] = {}
                const = Fraction(0)
                for mono, c in p.items():
                    if not mono:
                        const += c
                    elif len(mono) == 1 and mono[0][1] == 1:
                        row[mono[0][0]] = c
                    else:
                        raise ValueError(f"nonlinear constraint on {x}: {p}")
                rows.append((x, residual, row, const))
        names = [name for _, _, name in unknowns]
        solution = _solve(names, rows, n)
        for t, k, name in unknowns:
            c = solution.get(name, Fraction(0))
            if c:
                values[t] = values.get(t, ZERO) + LaurentPoly.const(c) * LaurentPoly.z(-k)
    return Character(H, values, name="phi_minus")


def _solve(names: list[str], rows, n: int) -> dict[str, Fraction]:
    """Exact solve through reduced row echelon form; free variables are set to zero."""
    if not rows:
        return {}
    from sympy import Matrix, Rational

    index = {name: j for j, name in enumerate(names)}
    width = len(names) + 1

    def echelon(count: int):
        aug = Matrix.zeros(count, width)
        for i, (_, _, row, const) in enumerate(rows[:count]):
            for name, c in row.items():
                aug[i, index[name]] = Rational(c.numerator, c.denominator)
            aug[i, width - 1] = Rational(-const.numerator, const.denominator)
        return aug.rref()

    reduced, pivots = echelon(len(rows))
    if width - 1 in pivots:
        # name the first constraint that makes the system inconsistent
        for count in range(1, len(rows) + 1):
            if width - 1 in echelon(count)[1]:
                forest, residual, _, _ = rows[count - 1]
                raise Infeasible(n, forest, residual)
    out: dict[str, Fraction] = {}
    for i, j in enumerate(pivots):
        v = reduced[i, width - 1]
        out[names[j]] = Fraction(int(v.p), int(v.q))
    return out


def is_polar_character(phi: Character, max_degree: int) -> bool:
    return all(phi.tree_value(t).is_polar() for t in enumerate_trees(max_degree))
