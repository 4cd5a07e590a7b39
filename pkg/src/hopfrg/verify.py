"""Invariant suites behind ``hopfrg verify``.

Every suite returns a :class:`~hopfrg.report.Report`.  Checks are exact; a
FAIL line carries the identity, the forest and both sides.  Known
discrepancies between stated identities and what the definitions give are
reported as NOTE lines together with the corrected identity, which is checked.
"""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable

from .algebra import H, K, LinComb, check_compatibility, check_hopf_axioms, coaction
from .characters import (
    Character,
    InfChar,
    LinMap,
    birkhoff,
    birkhoff_series_oracle,
    conv_exp,
    conv_inverse,
    conv_log,
    convolve,
    counit_character,
    infinitesimality_failures,
    maps_equal,
    multiplicativity_failures,
    random_character,
    random_laurent,
)
from .forests import UNIT, Forest, enumerate_forests, enumerate_trees, parse_forest
from .laurent import ZERO, Z, LaurentPoly, ParamPoly, PoleAtZero, d_param, pi_minus, residue, subst_param
from .renorm import (
    BETA_METHODS,
    FlowCharacter,
    Infeasible,
    apply_to_comb,
    b_alpha,
    beta,
    coderivation_leibniz,
    coderivation_sides,
    construct_local_minus,
    e_alpha,
    flow,
    h_flow,
    locality_check,
    r_alpha,
    r_tilde,
    rg_flow,
    star_action,
    z_twist,
)
from .report import Report

SUITES = ("hopf", "compat", "birkhoff", "biderivation", "cocycle", "rg")


def _rng(suite: str, seed: int) -> random.Random:
    return random.Random(f"{suite}:{seed}")


# --- hopf / compat --------------------------------------------------------------------

def hopf_suite(max_degree: int = 4, seed: int = 0, k_degree: int | None = None) -> Report:
    rep = Report("hopf", seed=seed)
    rep.merge(check_hopf_axioms(H, max_degree))
    rep.merge(check_hopf_axioms(K, max_degree if k_degree is None else k_degree))
    return rep


def compat_suite(max_degree: int = 4, seed: int = 0) -> Report:
    rep = Report("compat", seed=seed)
    return rep.merge(check_compatibility(max_degree))


# --- birkhoff -------------------------------------------------------------------------

def rota_baxter(rng: random.Random, pairs: int, rep: Report) -> None:
    for i in range(pairs):
        a = random_laurent(rng, -4, 3, 4)
        b = random_laurent(rng, -4, 3, 4)
        left = pi_minus(a) * pi_minus(b)
        right = pi_minus(pi_minus(a) * b + a * pi_minus(b) - a * b)
        rep.check("rota-baxter", f"pair {i}: ({a}, {b})", left, right)


def birkhoff_suite(max_degree: int = 4, seed: int = 0, count: int = 20, pairs: int = 100) -> Report:
    rng = _rng("birkhoff", seed)
    rep = Report("birkhoff", seed=seed)
    e = counit_character(H)
    for i in range(count):
        phi = random_character(rng, H, max_degree)
        minus, plus = birkhoff(phi)
        maps_equal(convolve(conv_inverse(minus), plus), phi, max_degree, f"#{i} decomposition", rep)
        for name, f in (("minus", minus), ("plus", plus)):
            for fail in multiplicativity_failures(f, max_degree).failures:
                rep.fail(f"#{i} {name} multiplicative", fail.forest, fail.left, fail.right)
            rep.checks += 1
        for x in enumerate_forests(max_degree):
            if not x.is_unit():
                v = minus.on_forest(x)
                rep.check(f"#{i} minus in A_-", x, v.is_polar(), True)
            rep.check(f"#{i} plus in A_+", x, plus.on_forest(x).is_regular(), True)
        series_minus, series_plus = birkhoff_series_oracle(phi, max_degree)
        maps_equal(minus, series_minus, max_degree, f"#{i} series minus", rep)
        maps_equal(plus, series_plus, max_degree, f"#{i} series plus", rep)
        psi = random_character(rng, H, max_degree)
        chi = random_character(rng, H, max_degree)
        maps_equal(convolve(convolve(phi, psi), chi), convolve(phi, convolve(psi, chi)),
                   max_degree, f"#{i} associative", rep)
        maps_equal(convolve(e, phi), phi, max_degree, f"#{i} unit", rep)
        maps_equal(convolve(phi, conv_inverse(phi)), e, max_degree, f"#{i} inverse", rep)
        a = random_character(rng, H, max_degree, infinitesimal=True)
        maps_equal(conv_log(conv_exp(a)), a, max_degree, f"#{i} log exp", rep)
    rota_baxter(rng, pairs, rep)
    return rep


# --- biderivation ---------------------------------------------------------------------

def _random_forest(rng: random.Random, forests: list[Forest]) -> Forest:
    return rng.choice([f for f in forests if not f.is_unit()])


def _comb_product(a: LinComb, f: Forest) -> LinComb:
    return a * LinComb.basis(H, f)


def biderivation_suite(max_degree: int = 4, seed: int = 0, pairs: int = 50, char_pairs: int = 20) -> Report:
    rng = _rng("biderivation", seed)
    rep = Report("biderivation", seed=seed)
    alpha = random_character(rng, K, max_degree + 2, infinitesimal=True)
    small = enumerate_forests(3)
    for i in range(pairs):
        x, y = _random_forest(rng, small), _random_forest(rng, small)
        left = b_alpha(alpha, x * y)
        right = _comb_product(b_alpha(alpha, x), y) + _comb_product(b_alpha(alpha, y), x)
        rep.check("derivation", f"{x} * {y}", left, right)
    for x in enumerate_forests(max_degree):
        left, right = coderivation_sides(alpha, x)
        rep.check("coderivation", x, left, right)
        rep.check("coderivation leibniz", x, left, coderivation_leibniz(alpha, x))
    for i in range(char_pairs):
        phi = random_character(rng, H, max_degree)
        psi = random_character(rng, H, max_degree)
        left = star_action(alpha, convolve(phi, psi))
        right = convolve(star_action(alpha, phi), psi) + convolve(phi, star_action(alpha, psi))
        maps_equal(left, right, max_degree, f"#{i} convolution derivation", rep)
    # the K-action is an action of the convolution group of K
    g = conv_exp(random_character(rng, K, max_degree, infinitesimal=True))
    g2 = conv_exp(random_character(rng, K, max_degree, infinitesimal=True))
    phi = random_character(rng, H, max_degree)
    maps_equal(star_action(g, star_action(g2, phi)), star_action(convolve(g, g2), phi),
               max_degree, "action associative", rep)
    maps_equal(star_action(counit_character(K), phi), phi, max_degree, "action unit", rep)
    # coaction-primitive elements lie in the kernel of B_alpha
    for x in enumerate_forests(max_degree):
        if coaction(x).terms.keys() == {(UNIT, x)}:
            rep.check("kernel on coaction-primitives", x, b_alpha(alpha, x), LinComb(H))
    # alpha = 0 makes the flow trivial
    zero = InfChar(K, {})
    maps_equal(flow(phi, zero), phi, max_degree, "zero alpha flow", rep)
    maps_equal(r_tilde(phi, zero), InfChar(H, {}), max_degree, "zero alpha rtilde", rep)
    ell = parse_forest("[[]]").trees[0]
    prim = LinComb(H, {"[[]]": 1, "[] []": Fraction(-1, 2)})
    b_prim = LinComb(H)
    for f, c in prim.items():
        b_prim = b_prim + c * b_alpha(alpha, f)
    rep.note(f"B_alpha([[]] - 1/2*[] []) = {b_prim}; alpha([[]]) = {alpha.tree_value(ell)} "
             "(a Delta_H-primitive outside the kernel)")
    return rep


# --- cocycle --------------------------------------------------------------------------

def cocycle_suite(max_degree: int = 4, seed: int = 0, count: int = 3) -> Report:
    rng = _rng("cocycle", seed)
    rep = Report("cocycle", seed=seed)
    for i in range(count):
        alpha = random_character(rng, K, max_degree + 1, infinitesimal=True)
        phi = random_character(rng, H, max_degree + 1)
        psi = random_character(rng, H, max_degree)
        gamma = r_tilde(phi, alpha)
        for fail in infinitesimality_failures(gamma.source, max_degree + 1).failures:
            rep.fail(f"#{i} rtilde infinitesimal", fail.forest, fail.left, fail.right)
        rep.checks += 1
        rep.check(f"#{i} rtilde vanishes in degree 1", "[]", gamma("[]"), ZERO)
        left = r_tilde(convolve(phi, psi), alpha).source
        right = r_tilde(psi, alpha).source + convolve(convolve(conv_inverse(psi), gamma.source), psi)
        maps_equal(left, right, max_degree, f"#{i} cocycle", rep)
        a = random_character(rng, H, max_degree, infinitesimal=True)
        direct = r_alpha(a, alpha, "direct")
        integral = r_alpha(a, alpha, "integral")
        maps_equal(direct.source, integral.source, max_degree, f"#{i} R direct vs integral", rep)
        for x in enumerate_forests(max_degree):
            rep.check(f"#{i} phi o E_alpha", x, apply_to_comb(phi, e_alpha(alpha, x)), gamma.source.on_forest(x))
        g = conv_exp(random_character(rng, K, max_degree, infinitesimal=True))
        maps_equal(z_twist(z_twist(g, "fwd"), "inv"), g, max_degree, f"#{i} Z inverse", rep)
    return rep


# --- flow / RG ------------------------------------------------------------------------

def _sum_of(s: str, t: str) -> ParamPoly:
    return ParamPoly.var(s) + ParamPoly.var(t)


def _derivative_at_zero(f: FlowCharacter | LinMap, param: str) -> LinMap:
    return LinMap(H, lambda x: subst_param(d_param(f.on_forest(x), param), param, 0))


def _plus_flow(phi: Character, alpha: InfChar, t: str) -> LinMap:
    _, plus = birkhoff(flow(phi, alpha, t))
    return plus


def rg_identities(phi: Character, alpha: InfChar, degree: int, label: str, rep: Report,
                  polar: bool, chi: InfChar | None = None, t: str = "t", s: str = "s") -> None:
    """Flow/RG identities for one local character; ``polar`` marks counterterm-only ``phi``."""
    forests = enumerate_forests(degree)
    loc = locality_check(phi, alpha, degree, t)
    for fail in loc.failures:
        rep.fail(f"{label} locality", fail.forest, fail.left, fail.right)
    rep.checks += loc.checks

    h = h_flow(phi, alpha, t)
    rt_h = r_tilde(h, alpha).scaled(Z)
    rt_phi = r_tilde(phi, alpha).scaled(Z)
    for x in forests:
        left = h.derivative().on_forest(x)
        right = convolve(h, rt_h).on_forest(x) + convolve(rt_phi, h).on_forest(x)
        rep.check(f"{label} flow ODE", x, left, right)

    h_s = h_flow(phi, alpha, s)
    moved = flow(h, alpha, s)
    maps_equal(h.substitute(_sum_of(s, t)), convolve(h_s, moved), degree, f"{label} composition", rep)

    try:
        F = rg_flow(phi, alpha, degree, t)
    except PoleAtZero as exc:
        rep.fail(f"{label} rg pole", exc.context, exc.value, "regular")
        return
    maps_equal(F.substitute(_sum_of(s, t)), convolve(F.renamed(s), F), degree, f"{label} group law", rep)

    betas = {}
    for method in BETA_METHODS:
        try:
            betas[method] = beta(phi, alpha, degree, method, t)
        except PoleAtZero as exc:
            rep.fail(f"{label} beta {method} pole", exc.context, exc.value, "regular")
    for method in BETA_METHODS[1:]:
        if method in betas and "generator" in betas:
            maps_equal(betas["generator"], betas[method], degree, f"{label} beta generator vs {method}", rep)
    if chi is not None and "generator" in betas:
        maps_equal(betas["generator"], chi, degree, f"{label} beta = chi", rep)

    minus, plus = birkhoff(phi)
    d_plus = _derivative_at_zero(_plus_flow(phi, alpha, t), t)
    corrected = convolve(conv_inverse(plus), d_plus)
    maps_equal(rt_phi, corrected, degree, f"{label} z rtilde = plus^-1 * d/dt plus", rep)
    literal = Report("literal")
    maps_equal(rt_phi, d_plus, degree, "literal", literal)
    if polar:
        for fail in literal.failures:
            rep.fail(f"{label} z rtilde = d/dt plus", fail.forest, fail.left, fail.right)
        rep.checks += literal.checks
        res = LinMap(H, lambda x: LaurentPoly.from_param(residue(star_action(alpha, phi).on_forest(x))))
        maps_equal(rt_phi, res, degree, f"{label} z rtilde = Res(alpha * phi)", rep)
    elif literal.failures:
        first = literal.failures[0]
        rep.note(f"{label}: z rtilde(phi) = d/dt|0 (phi_t)_+ fails on {len(literal.failures)} forests "
                 f"(first {first.forest}: {first.left} vs {first.right}); "
                 "the form with (phi_+)^-1 * d/dt|0 (phi_t)_+ holds")


def _constant_alpha(rng: random.Random, degree: int) -> InfChar:
    values = {}
    for t in enumerate_trees(degree + 1):
        if t.vertex_count < 2:
            continue
        values[t] = LaurentPoly.const(Fraction(rng.choice([1, 2, 3, -1]), rng.randint(1, 2)))
    return InfChar(K, values)


def solver_cases(alpha: InfChar, degree: int, rng: random.Random) -> list[tuple[str, InfChar, int]]:
    """Targets ``chi`` known to be reachable, with the degree they are solved to."""
    c = Fraction(rng.choice([1, 2, 3, -2]), rng.randint(1, 3))
    cases = [("solver chi=0", InfChar(H, {}), degree),
             ("solver chi on [[]]", InfChar(H, {"[[]]": c}), min(degree, 2))]
    if degree >= 3:
        cases.append(("solver chi on degree 3", InfChar(H, {"[[[]]]": c, "[[][]]": c}), 3))
    return cases


def rg_suite(max_degree: int = 4, seed: int = 0, count: int = 3, t: str = "t", s: str = "s") -> Report:
    rng = _rng("rg", seed)
    rep = Report("rg", seed=seed)
    degree = min(max_degree, 3)
    for i in range(count):
        alpha = random_character(rng, K, degree, regular=True, infinitesimal=True)
        phi = random_character(rng, H, degree, regular=True)
        rg_identities(phi, alpha, degree, f"A_+ #{i}", rep, polar=False, chi=InfChar(H, {}), t=t, s=s)
    alpha = _constant_alpha(rng, degree)
    for label, chi, d in solver_cases(alpha, degree, rng):
        try:
            phi = construct_local_minus(alpha, chi, d)
        except Infeasible as exc:
            rep.fail(f"{label} infeasible", exc.forest, exc.residual, 0)
            continue
        rg_identities(phi, alpha, d, label, rep, polar=True, chi=chi, t=t, s=s)
    if degree >= 3:
        for text in ("[]", "[[]]"):
            try:
                construct_local_minus(alpha, InfChar(H, {text: 1}), degree)
                rep.note(f"chi supported on {text} solved to degree {degree}")
            except Infeasible as exc:
                rep.note(f"chi supported on {text}: {exc}")
    rep.note("alpha(1_K) = 0 throughout (alpha infinitesimal)")
    return rep


_RUNNERS: dict[str, Callable[..., Report]] = {
    "hopf": hopf_suite,
    "compat": compat_suite,
    "birkhoff": birkhoff_suite,
    "biderivation": biderivation_suite,
    "cocycle": cocycle_suite,
    "rg": rg_suite,
}


def run_suite(name: str, max_degree: int = 4, seed: int = 0, t: str = "t", s: str = "s") -> Report:
    if name not in _RUNNERS:
        raise ValueError(f"unknown suite {name!r}")
    if name == "rg":
        return rg_suite(max_degree=max_degree, seed=seed, t=t, s=s)
    return _RUNNERS[name](max_degree=max_degree, seed=seed)


def _run_args(args: tuple) -> Report:
    return run_suite(*args)


def run_suites(names: list[str], max_degree: int = 4, seed: int = 0, jobs: int = 1,
               t: str = "t", s: str = "s") -> list[Report]:
    """Run several suites, optionally in worker processes; order follows ``names``."""
    work = [(n, max_degree, seed, t, s) for n in names]
    if jobs > 1 and len(work) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_args, work))
    return [_run_args(w) for w in work]
