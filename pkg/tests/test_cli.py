from pathlib import Path

import pytest

import plcg
from plcg.cli import main, parse_zeta
from plcg.io import InputError

CORPUS = Path(plcg.__file__).parent / "corpus"


def m(name):
    return str(CORPUS / f"{name}.manifest.json")


def test_parse_zeta():
    assert parse_zeta("1+2^3", 2, 8).residue == 9
    assert parse_zeta("1+3*2^2", 2, 8).residue == 13
    assert parse_zeta("17", 2, 8).residue == 17
    with pytest.raises(InputError):
        parse_zeta("1+3^2", 2, 8)
    with pytest.raises(InputError):
        parse_zeta("6", 2, 8)
    with pytest.raises(InputError):
        parse_zeta("five", 2, 8)


def test_validate_exit_codes(capsys):
    assert main(["validate", m("d8-finite")]) == 0
    assert main(["validate", m("d8-corrupt")]) == 1
    assert main(["validate", m("bad-cocycle")]) == 1
    out = capsys.readouterr().out
    assert "[FAIL]" in out
    assert main(["validate", m("d8-s4")]) == 0
    assert main(["validate", str(CORPUS / "missing.manifest.json")]) == 2


def test_construct_refuses_outside_gamma(capsys):
    assert main(["construct", m("central-z4z4"), "--zeta", "3"]) == 3
    err = capsys.readouterr().err
    assert "require ζ ≡ 1 mod 4 (got ζ = 3)" in err


def test_construct_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["construct", m("inv-torus"), "--zeta", "1+2^3", "--json-out", str(a)]) == 0
    assert main(["construct", m("inv-torus"), "--zeta", "9", "--json-out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    out = capsys.readouterr().out
    assert "k_G = 3" in out


def test_construct_needs_conjugation_fusion():
    assert main(["construct", m("d8-s4"), "--zeta", "3"]) == 2


def test_report_modes(capsys):
    assert main(["report", m("nonsplit-j2"), "--mode", "properties"]) == 0
    assert main(["report", m("nonsplit-j2"), "--mode", "homomorphism", "--zeta1", "9", "--zeta2", "17"]) == 0
    assert main(["report", m("nonsplit-j2"), "--mode", "homomorphism", "--zeta1", "5", "--zeta2", "9"]) == 3
    assert main(["report", m("nonsplit-j2"), "--mode", "homomorphism"]) == 2
    out = capsys.readouterr().out
    assert "[FAIL]" not in out


def test_corpus_command(tmp_path, capsys):
    assert main(["corpus", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "p3-perm.manifest.json").exists()
