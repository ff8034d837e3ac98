import json
import subprocess
import sys

import pytest

from charvar import __version__
from charvar.cli import SUBCOMMANDS, main, parse_knot, run
from charvar.errors import NotAKnot, ParseError
from charvar.tangle import KnotClass


def test_parse_knot():
    K = parse_knot("M(-2,3,7)")
    assert K.parity_class is KnotClass.EVEN and str(K) == "M(3,7,-2)"
    assert parse_knot(" M( 3/1 , 5/2,7/3 ) ").parity_class is KnotClass.ODD
    with pytest.raises(NotAKnot):
        parse_knot("M(3,4,4)")


@pytest.mark.parametrize("spec, pos", [("K(3,3,3)", 0), ("M(3,,3)", 4), ("M(3,3", 5),
                                       ("M(3,3/0,3)", 6), ("M(3,3) x", 7)])
def test_parse_errors_report_position(spec, pos):
    with pytest.raises(ParseError) as err:
        parse_knot(spec)
    assert err.value.position == pos


def test_exit_codes(capsys):
    assert main(["x2", "M(3,3,3)"]) == 0
    assert main(["x2", "M(3,3"]) == 2
    assert main(["x2", "M(3,4,4)"]) == 1
    assert main(["riley", "3", "--iota", "1"]) == 1
    assert main(["bogus"]) == 2
    capsys.readouterr()


def test_x2_json_counts():
    out, code = run(["x2", "M(3,3,3)", "--format", "json"])
    doc = json.loads(out)
    assert code == 0
    assert len(doc["equations"]) == 4 and len(doc["inequations"]) == 2
    assert all(e["note"] for e in doc["equations"] + doc["inequations"])


def test_latex_output():
    out, _ = run(["riley", "3/1", "--format", "latex"])
    assert r"\begin{align*}" in out and r"\kappa" in out


def test_negative_fraction_argument():
    out, code = run(["tangle-traces", "-7/3", "--format", "json"])
    assert code == 0 and json.loads(out)["input"] == "-7/3"


def test_xprime_all_vectors():
    doc = json.loads(run(["xprime", "M(3,3,3)", "--format", "json"])[0])
    assert len(doc["systems"]) == 12


def test_verify_with_point_file(tmp_path):
    out, code = run(["verify", "M(3,3,3)", "--seed", "3", "--format", "json"])
    assert code == 0
    point = json.loads(out)["point"]
    path = tmp_path / "point.json"
    path.write_text(json.dumps(point))
    out, code = run(["verify", "M(3,3,3)", "--point", str(path), "--format", "json"])
    assert code == 0 and json.loads(out)["report"]["ok"]
    point["r1"][0] += 0.5
    path.write_text(json.dumps(point))
    assert run(["verify", "M(3,3,3)", "--point", str(path)])[1] == 1


def test_tolerance_from_environment(monkeypatch, tmp_path):
    monkeypatch.setenv("CHARVAR_TOLERANCE", "1e-3")
    doc = json.loads(run(["verify", "M(3,3,3)", "--seed", "0", "--format", "json"])[0])
    assert doc["report"]["tolerance"] == 1e-3
    monkeypatch.setenv("CHARVAR_TOLERANCE", "abc")
    assert run(["verify", "M(3,3,3)", "--seed", "0"])[1] == 2


def test_list_and_version(capsys):
    out, code = run(["--list-subcommands"])
    assert out.split() == list(SUBCOMMANDS)
    assert main(["--version"]) == 0
    assert __version__ in capsys.readouterr().out


def test_console_script_runs():
    proc = subprocess.run([sys.executable, "-m", "charvar.cli", "theta", "5/2"],
                          capture_output=True, text=True, check=True)
    assert "theta_ne" in proc.stdout
