"""Acceptance criteria 1-7, all at exact equality."""
import subprocess
import sys
import time

import pytest

from hopfrg.algebra import H, antipode
from hopfrg.forests import enumerate_forests
from hopfrg.verify import biderivation_suite, birkhoff_suite, cocycle_suite, compat_suite, hopf_suite, rg_suite

SEED = 42


def _show(rep):
    print(rep.render())
    assert rep.ok, "\n".join(f.line() for f in rep.failures)


@pytest.mark.criterion(1, "Hopf axioms on H (<= 6 vertices) and K (<= 4 edges)")
def test_hopf_axioms():
    start = time.perf_counter()
    rep = hopf_suite(max_degree=6, seed=SEED, k_degree=4)
    for f in enumerate_forests(6):
        rep.check("antipode left vs right", f, antipode(f, H, "left"), antipode(f, H, "right"))
    _show(rep)
    assert time.perf_counter() - start < 60


@pytest.mark.criterion(2, "Compatibility of coaction and coproduct (<= 5 vertices)")
def test_compatibility():
    start = time.perf_counter()
    _show(compat_suite(max_degree=5, seed=SEED))
    assert time.perf_counter() - start < 60


@pytest.mark.criterion(3, "Birkhoff decomposition, series oracle and Rota-Baxter")
def test_birkhoff():
    start = time.perf_counter()
    _show(birkhoff_suite(max_degree=4, seed=SEED, count=20, pairs=100))
    assert time.perf_counter() - start < 30


@pytest.mark.criterion(4, "B_alpha derivation, coderivation and convolution derivation")
def test_biderivation():
    _show(biderivation_suite(max_degree=4, seed=SEED, pairs=50, char_pairs=20))


@pytest.mark.criterion(5, "R~ infinitesimal, cocycle, R direct vs integral, phi o E_alpha")
def test_rtilde():
    _show(cocycle_suite(max_degree=4, seed=SEED))


@pytest.mark.criterion(6, "Locality, flow ODE, composition, group law, beta, derivative and residue identities")
def test_flow_rg():
    start = time.perf_counter()
    rep = rg_suite(max_degree=3, seed=SEED)
    _show(rep)
    for note in rep.notes:
        print("NOTE", note)
    assert time.perf_counter() - start < 120


def _cli(*argv):
    return subprocess.run([sys.executable, "-m", "hopfrg.cli", *argv], capture_output=True, text=True)


@pytest.mark.criterion(7, "CLI golden outputs and verify --suite all")
def test_cli_golden():
    coprod = _cli("coprod", "[[]]")
    assert (coprod.returncode, coprod.stdout) == (0, "[[]] # 1 + 1 # [[]] + [] # []\n")
    anti = _cli("antipode", "[[]]")
    assert (anti.returncode, anti.stdout) == (0, "-1*[[]] + [] []\n")
    compat = _cli("verify", "--suite", "compat", "--max-degree", "4")
    assert compat.returncode == 0 and "failures: 0" in compat.stdout.splitlines()
    full = _cli("verify", "--suite", "all", "--max-degree", "4", "--seed", "42")
    assert full.returncode == 0, full.stdout
    again = _cli("verify", "--suite", "all", "--max-degree", "4", "--seed", "42")
    assert again.stdout == full.stdout
