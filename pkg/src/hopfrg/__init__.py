"""Exact computations with the rooted-tree Hopf algebras H and K, Laurent-valued
characters, Birkhoff decomposition and the renormalization flow induced by an
infinitesimal character of K."""
from .algebra import H, K, LinComb, Tensor, antipode, coaction, counit, delta_H, delta_K
from .characters import (
    Character,
    InfChar,
    LinMap,
    birkhoff,
    bogoliubov,
    conv_exp,
    conv_inverse,
    conv_log,
    convolve,
    counit_character,
)
from .forests import Forest, Tree, parse_forest, render_forest
from .laurent import LaurentPoly, ParamPoly, parse_laurent
from .renorm import (
    Infeasible,
    b_alpha,
    beta,
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

__version__ = "0.1.0"
