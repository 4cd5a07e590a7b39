import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hopfrg.algebra import H, K, LinComb
from hopfrg.characters import (
    Character,
    InfChar,
    LinMap,
    birkhoff,
    conv_exp,
    conv_inverse,
    convolve,
    counit_character,
    is_infinitesimal,
    maps_equal,
    random_character,
)
from hopfrg.forests import UNIT, enumerate_forests, parse_forest
from hopfrg.laurent import ONE, ZERO, Z, LaurentPoly, d_param, parse_laurent, subst_param
from hopfrg.renorm import (
    apply_to_comb,
    b_alpha,
    beta,
    coderivation_leibniz,
    coderivation_sides,
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

L = parse_laurent
F = parse_forest
e = counit_character(H)
ELL = InfChar(K, {"[[]]": 1})


# --- B_alpha, action, E_alpha -------------------------------------------------------

def test_b_alpha_examples():
    assert b_alpha(ELL, F("[]")) == LinComb(H)
    assert b_alpha(ELL, F("[[]]")) == LinComb(H, {F("[]"): ONE})
    assert b_alpha(ELL, F("[[[]]]")) == LinComb(H, {F("[[]]"): 2 * ONE})


def test_star_action_examples():
    g = conv_exp(InfChar(K, {"[[]]": L("3")}))
    acted = star_action(g, e)
    assert acted(UNIT) == ONE
    assert all(acted.on_forest(f) == ZERO for f in enumerate_forests(4) if f != UNIT)
    phi = Character(H, {"[]": L("z^-1 + 2")})
    assert star_action(ELL, phi)("[[]]") == phi("[]")


def test_e_alpha_examples():
    assert e_alpha(ELL, F("[]")) == LinComb(H)
    assert e_alpha(ELL, F("[[]]")) == LinComb(H, {F("[]"): ONE})


def test_z_twist_examples():
    eK = counit_character(K)
    assert maps_equal(z_twist(eK), eK, 3).ok
    g = conv_exp(ELL)
    assert z_twist(g)("[[]]") == Z


def test_coaction_primitive_in_kernel():
    assert b_alpha(random_character(random.Random(0), K, 3, infinitesimal=True), F("[]")) == LinComb(H)


def test_delta_primitive_is_not_in_kernel():
    # [[]] - 1/2 [][] is primitive for the coproduct of H but B_alpha does not kill it
    prim = {F("[[]]"): 1, F("[] []"): Fraction(-1, 2)}
    total = LinComb(H)
    for f, c in prim.items():
        total = total + c * b_alpha(ELL, f)
    assert total == LinComb(H, {F("[]"): ONE})


# --- flow ---------------------------------------------------------------------------

def test_flow_examples():
    assert maps_equal(flow(e, ELL), e, 4).ok
    phi = Character(H, {"[]": L("z^-1"), "[[]]": L("5*z^-2")})
    assert flow(phi, ELL)("[[]]") == phi("[[]]") + L("t")
    assert maps_equal(flow(phi, ELL).at_zero(), phi, 4).ok


def test_flow_rejects_polar_alpha():
    with pytest.raises(ValueError):
        flow(e, InfChar(K, {"[[]]": L("z^-1")}))


def test_flow_derivative():
    rng = random.Random(11)
    phi = random_character(rng, H, 4)
    alpha = random_character(rng, K, 4, regular=True, infinitesimal=True)
    phi_t = flow(phi, alpha)
    za = alpha.scaled(Z)
    rhs = star_action(za, phi_t)
    for x in enumerate_forests(4):
        assert d_param(phi_t.on_forest(x), "t") == rhs.on_forest(x)


def test_h_flow_at_zero_is_counit():
    phi = random_character(random.Random(4), H, 4)
    assert maps_equal(h_flow(phi, ELL).at_zero(), e, 4).ok


# --- R~ and R ---------------------------------------------------------------------

def test_r_tilde_examples():
    assert maps_equal(r_tilde(e, ELL), InfChar(H, {}), 4).ok
    phi = random_character(random.Random(8), H, 4)
    alpha = random_character(random.Random(9), K, 4, infinitesimal=True)
    assert r_tilde(phi, alpha)("[]") == ZERO
    assert r_tilde(Character(H, {"[]": L("z^-1")}), ELL)("[[]]") == L("z^-1")


def test_r_alpha_examples():
    zero = InfChar(H, {})
    assert maps_equal(r_alpha(zero, ELL, "direct"), zero, 4).ok
    assert maps_equal(r_alpha(zero, ELL, "integral"), zero, 4).ok


def test_r_alpha_degree_two_by_hand():
    # on [[]]: exp(a)([[]]) = a([[]]) + a([])^2/2 and the bracket terms cancel in degree 2
    a = InfChar(H, {"[]": L("2*z"), "[[]]": L("7")})
    expected = a("[]") * ONE
    assert r_alpha(a, ELL, "direct")("[[]]") == expected
    assert r_alpha(a, ELL, "integral")("[[]]") == expected


seeds = st.integers(0, 10_000)


@given(seeds)
def test_r_alpha_methods_agree(seed):
    rng = random.Random(seed)
    a = random_character(rng, H, 4, infinitesimal=True)
    alpha = random_character(rng, K, 4, infinitesimal=True)
    assert maps_equal(r_alpha(a, alpha, "direct").source, r_alpha(a, alpha, "integral").source, 4).ok


@given(seeds)
def test_r_tilde_is_infinitesimal_and_cocycle(seed):
    rng = random.Random(seed)
    alpha = random_character(rng, K, 4, infinitesimal=True)
    phi = random_character(rng, H, 4)
    psi = random_character(rng, H, 4)
    gamma = r_tilde(phi, alpha)
    assert is_infinitesimal(gamma.source, 4)
    left = r_tilde(convolve(phi, psi), alpha).source
    right = r_tilde(psi, alpha).source + convolve(convolve(conv_inverse(psi), gamma.source), psi)
    assert maps_equal(left, right, 4).ok
    for x in enumerate_forests(4):
        assert apply_to_comb(phi, e_alpha(alpha, x)) == gamma.source.on_forest(x)


@given(seeds)
def test_biderivation(seed):
    rng = random.Random(seed)
    alpha = random_character(rng, K, 5, infinitesimal=True)
    forests = [f for f in enumerate_forests(3) if f != UNIT]
    x, y = rng.choice(forests), rng.choice(forests)
    assert b_alpha(alpha, x * y) == b_alpha(alpha, x) * LinComb.basis(H, y) + b_alpha(alpha, y) * LinComb.basis(H, x)
    for f in enumerate_forests(3):
        left, right = coderivation_sides(alpha, f)
        assert left == right == coderivation_leibniz(alpha, f)


@given(seeds)
def test_convolution_derivation(seed):
    rng = random.Random(seed)
    alpha = random_character(rng, K, 4, infinitesimal=True)
    phi, psi = random_character(rng, H, 4), random_character(rng, H, 4)
    left = star_action(alpha, convolve(phi, psi))
    right = convolve(star_action(alpha, phi), psi) + convolve(phi, star_action(alpha, psi))
    assert maps_equal(left, right, 4).ok


@given(seeds)
def test_action_is_a_group_action(seed):
    rng = random.Random(seed)
    g = conv_exp(random_character(rng, K, 3, infinitesimal=True))
    h = conv_exp(random_character(rng, K, 3, infinitesimal=True))
    phi = random_character(rng, H, 3)
    assert maps_equal(star_action(g, star_action(h, phi)), star_action(convolve(g, h), phi), 3).ok


@given(seeds)
def test_z_twist_roundtrip(seed):
    g = conv_exp(random_character(random.Random(seed), K, 3, infinitesimal=True))
    assert maps_equal(z_twist(z_twist(g, "fwd"), "inv"), g, 3).ok


def test_zero_alpha():
    phi = random_character(random.Random(12), H, 4)
    zero = InfChar(K, {})
    assert maps_equal(flow(phi, zero), phi, 4).ok
    assert maps_equal(r_tilde(phi, zero), InfChar(H, {}), 4).ok


# --- locality, RG, beta on regular characters ----------------------------------------

def test_locality_examples():
    assert locality_check(e, ELL, 4).ok
    reg = random_character(random.Random(13), H, 3, regular=True)
    assert locality_check(reg, random_character(random.Random(14), K, 3, regular=True, infinitesimal=True), 3).ok
    generic = Character(H, {"[]": L("z^-1"), "[[]]": L("z^-1")})
    rep = locality_check(generic, ELL, 3)
    assert sorted(f.forest for f in rep.failures) == ["[[[]]]", "[[][]]"]


def test_rg_and_beta_on_regular_character():
    rng = random.Random(15)
    phi = random_character(rng, H, 3, regular=True)
    alpha = random_character(rng, K, 3, regular=True, infinitesimal=True)
    F_t = rg_flow(phi, alpha, 3)
    h = h_flow(phi, alpha)
    for t in F_t.generators:
        assert F_t.tree_value(t) == LaurentPoly.from_param(h.tree_value(t).coeff(0))
    for method in ("generator", "residue", "counterterm"):
        b = beta(phi, alpha, 3, method)
        assert all(b.tree_value(t) == ZERO for t in b.generators)
    assert maps_equal(rg_flow(e, alpha, 3), e, 3).ok
    assert all(v == ZERO for v in beta(e, alpha, 3).generators.values())


def test_literal_rtilde_derivative_identity_needs_plus_correction():
    # With phi_+ != e the statement z R~(phi) = d/dt|0 (phi_t)_+ breaks at degree 3;
    # multiplying by (phi_+)^-1 on the left repairs it.
    phi = Character(H, {"[]": L("1")})
    _, plus_t = birkhoff(flow(phi, ELL))
    d_plus = LinMap(H, lambda x: subst_param(d_param(plus_t.on_forest(x), "t"), "t", 0))
    zr = r_tilde(phi, ELL).scaled(Z)
    assert zr("[[]]") == d_plus.on_forest(F("[[]]"))
    assert zr("[[[]]]") != d_plus.on_forest(F("[[[]]]"))
    _, plus = birkhoff(phi)
    assert maps_equal(zr, convolve(conv_inverse(plus), d_plus), 4).ok
