import pytest

from hopfrg.verify import SUITES, run_suite, run_suites


def test_parallel_run_matches_serial():
    names = ["hopf", "compat", "cocycle"]
    serial = [r.render() for r in run_suites(names, 3, 7, jobs=1)]
    parallel = [r.render() for r in run_suites(names, 3, 7, jobs=2)]
    assert serial == parallel


@pytest.mark.parametrize("name", SUITES)
def test_each_suite_passes_at_low_degree(name):
    rep = run_suite(name, 2, 1)
    assert rep.ok and rep.checks > 0


def test_rg_suite_logs_open_question_probes():
    rep = run_suite("rg", 3, 42)
    assert rep.ok
    assert any("chi supported on []" in n for n in rep.notes)
    assert any("(phi_+)^-1" in n for n in rep.notes)


def test_custom_parameter_names():
    assert run_suite("rg", 2, 3, t="u", s="v").ok


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("nope")
