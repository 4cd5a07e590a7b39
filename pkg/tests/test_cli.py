import subprocess
import sys

import pytest

from hopfrg.cli import main

SAMPLE = """\
[char phi on H]
[] = z^-1
[[]] = z^-1
[char alpha on K]
[[]] = 1
[char chi on H]
[[]] = 2
"""


@pytest.fixture
def chars(tmp_path):
    p = tmp_path / "sample.chars"
    p.write_text(SAMPLE)
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# --- golden outputs ---------------------------------------------------------------

def test_coprod_golden(capsys):
    assert run(capsys, "coprod", "[[]]")[:2] == (0, "[[]] # 1 + 1 # [[]] + [] # []\n")


def test_antipode_golden(capsys):
    assert run(capsys, "antipode", "[[]]")[:2] == (0, "-1*[[]] + [] []\n")


def test_verify_compat_golden(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "compat", "--max-degree", "4")
    assert code == 0
    assert out.splitlines()[-1] == "failures: 0"


def test_kcoprod_and_coact(capsys):
    assert run(capsys, "kcoprod", "[[[]]]")[1] == "[[[]]] # 1 + 1 # [[[]]] + 2*[[]] # [[]]\n"
    assert run(capsys, "coact", "[[[]]]")[1] == "1 # [[[]]] + 2*[[]] # [[]] + [[[]]] # []\n"
    assert run(capsys, "antipode", "[[[]]]", "--algebra", "K")[1] == "-1*[[[]]] + 2*[[]] [[]]\n"


def test_enumerate(capsys):
    out = run(capsys, "enumerate", "--max-degree", "2")[1]
    assert out == "1\n[]\n[[]]\n[] []\n"
    out = run(capsys, "enumerate", "--max-degree", "2", "--output", "tsv")[1]
    assert out == "0\t1\n1\t[]\n2\t[[]]\n2\t[] []\n"


def test_character_commands(capsys, chars):
    code, out, _ = run(capsys, "birkhoff", "phi", "--chars", chars, "--max-degree", "2")
    assert code == 0
    assert out == (
        "[char phi_minus on H]\n[] = -z^-1\n[[]] = z^-2 - z^-1\n\n"
        "[char phi_plus on H]\n[] = 0\n[[]] = 0\n"
    )
    assert run(capsys, "flow", "phi", "alpha", "--chars", chars, "--max-degree", "2")[1] == (
        "[char phi_t on H]\n[] = z^-1\n[[]] = z^-1 + t\n"
    )
    assert run(capsys, "flow", "phi", "alpha", "--chars", chars, "--max-degree", "2", "--t-symbol", "u")[1] == (
        "[char phi_u on H]\n[] = z^-1\n[[]] = z^-1 + u\n"
    )
    assert run(capsys, "rtilde", "phi", "alpha", "--chars", chars, "--max-degree", "2")[1] == (
        "[char rtilde_phi on H]\n[] = 0\n[[]] = z^-1\n"
    )
    assert run(capsys, "baction", "alpha", "[[[]]]", "--chars", chars)[1] == "2*[[]]\n"
    assert run(capsys, "inverse", "phi", "--chars", chars, "--max-degree", "1")[1] == "[char phi_inv on H]\n[] = -z^-1\n"
    assert run(capsys, "convolve", "phi", "phi", "--chars", chars, "--max-degree", "1")[1] == (
        "[char phi_phi on H]\n[] = 2*z^-1\n"
    )


def test_character_output_reparses(capsys, chars):
    from hopfrg.characters import parse_characters

    out = run(capsys, "birkhoff", "phi", "--chars", chars, "--max-degree", "3")[1]
    specs = parse_characters(out)
    assert set(specs) == {"phi_minus", "phi_plus"}


def test_rg_beta_and_locality(capsys, chars):
    assert run(capsys, "rg", "phi", "alpha", "--chars", chars, "--max-degree", "2")[1] == "[char F_phi on H]\n[] = 0\n[[]] = t\n"
    for method in ("generator", "residue", "counterterm"):
        out = run(capsys, "beta", "phi", "alpha", "--chars", chars, "--max-degree", "2", "--method", method)[1]
        assert out == "[char beta_phi on H]\n[] = 0\n[[]] = 1\n"
    code, out, _ = run(capsys, "locality", "phi", "alpha", "--chars", chars, "--max-degree", "3")
    assert code == 1
    assert "FAIL\td/dt flow_minus = 0\t[[[]]]\tz^-1\t0" in out.splitlines()


def test_rg_pole_is_reported(capsys):
    code, out, _ = run(capsys, "rg", "phi", "alpha", "--def", "phi: []=z^-1",
                       "--def", "alpha on K: [[]]=1", "--max-degree", "3")
    assert code == 1
    assert out == "FAIL\tpole at z=0\th_t([[[]]])\t(-t)*z^-1 + (t^2)*z\tregular\n"


def test_construct_local(capsys, chars):
    code, out, _ = run(capsys, "construct-local", "alpha", "chi", "--chars", chars, "--max-degree", "2")
    assert code == 0
    assert out == "[char local_chi on H]\n[] = 2*z^-1\n[[]] = 0\n"
    code, out, _ = run(capsys, "construct-local", "alpha", "chi", "--chars", chars, "--max-degree", "3")
    assert code == 1
    assert out.startswith("INFEASIBLE\t3\t[[][]]\t")


def test_inline_definitions(capsys):
    code, out, _ = run(capsys, "inverse", "phi", "--def", "phi: []=z^-1; [[]]=2", "--max-degree", "2")
    assert code == 0 and out == "[char phi_inv on H]\n[] = -z^-1\n[[]] = z^-2 - 2\n"


@pytest.mark.parametrize("argv", [
    ["coprod", "[[]"],
    ["coprod", "[]", "--max-degree", "-1"],
    ["coprod", "[]", "--bogus"],
    ["frobnicate"],
    ["flow", "phi", "alpha", "--def", "phi: []=1", "--def", "alpha on K: [[]]=z^-1"],
    ["inverse", "nobody"],
    ["inverse", "phi", "--def", "phi: []=z^^2"],
    ["flow", "phi", "alpha", "--def", "phi: []=1", "--def", "alpha: [[]]=1"],
    ["verify", "--t-symbol", "s"],
    ["verify", "--jobs", "0"],
])
def test_usage_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_env_default_degree(capsys, monkeypatch):
    monkeypatch.setenv("HOPFRG_MAX_DEGREE", "1")
    assert run(capsys, "enumerate")[1] == "1\n[]\n"
    monkeypatch.setenv("HOPFRG_MAX_DEGREE", "x")
    assert run(capsys, "enumerate")[0] == 2


def test_verify_output_is_byte_stable(capsys):
    a = run(capsys, "verify", "--suite", "birkhoff", "--max-degree", "3", "--seed", "5")
    b = run(capsys, "verify", "--suite", "birkhoff", "--max-degree", "3", "--seed", "5")
    assert a[:2] == b[:2] and a[0] == 0
    assert "seed: 5" in a[1]
    assert "elapsed" in a[2]


def test_verify_tsv(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "hopf", "--max-degree", "2", "--output", "tsv")
    assert code == 0 and out.splitlines()[-1] == "hopf\tfailures\t0"


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "hopfrg.cli", "coprod", "[[]]"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "[[]] # 1 + 1 # [[]] + [] # []\n"
