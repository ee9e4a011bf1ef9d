import csv
import json

import pytest

from germ2.cli import main
from germ2.germio import parse_germ


@pytest.fixture
def files(tmp_path):
    texts = {
        "F": "map F(x,y) = (x + x^2, y + x*y) order 12",
        "F2": "map F(x,y) = (x + x^2 + x*y, y + x*y + y^2) order 12",
        "S": "map G(x,y) = (x + x^2, y + y^2) order 8",
        "bad": "map G(x,y) = (0.5*x, y)",
        "f": "field f(x,y) = ((x^2+3*x*y), (3*x*y+y^2))",
        "pair": ("field f(x,y) = (x^2 + 3*x*y, 3*x*y + y^2)\n"
                 "field g(x,y) = (3*x^3 - 5*x^2*y + x*y^2 + y^3, x^3 + x^2*y - 5*x*y^2 + 3*y^3)"),
        "h": "map h(x) = x + 2*x^2 + x^3 order 12",
        "inv": "map A(x,y) = (-x, -y) order 6",
    }
    out = {}
    for name, text in texts.items():
        p = tmp_path / f"{name}.germ"
        p.write_text(text + "\n")
        out[name] = str(p)
    return out


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


class TestExact:
    def test_parse_roundtrip(self, capsys, files):
        code, out, _ = run(capsys, "parse", files["f"])
        assert code == 0
        assert out.strip() == "field f(x,y) = (x^2 + 3*x*y, 3*x*y + y^2) order 12"
        assert parse_germ(out).first().obj.key() == parse_germ(open(files["f"]).read()).first().obj.key()

    def test_exp_then_log(self, capsys, files, tmp_path):
        code, out, _ = run(capsys, "--order", "8", "exp", files["f"])
        assert code == 0 and out.startswith("map ")
        p = tmp_path / "E.germ"
        p.write_text(out)
        code, out2, _ = run(capsys, "log", str(p))
        assert code == 0
        assert parse_germ(out2).first().obj.key() == parse_germ(open(files["f"]).read(), 8).first().obj.key()

    def test_bracket_zero(self, capsys, files):
        code, out, _ = run(capsys, "bracket", files["pair"])
        assert code == 0 and "(0, 0)" in out

    def test_commutator(self, capsys, files):
        code, out, _ = run(capsys, "--order", "8", "commutator", files["F"], files["F"])
        assert code == 0 and json.loads(out)["identity"] is True
        code, out, _ = run(capsys, "--order", "8", "commutator", files["F"], files["S"])
        d = json.loads(out)
        assert code == 0 and d["identity"] is False and d["flat_order"] == "3"

    def test_order(self, capsys, files):
        code, out, _ = run(capsys, "order", files["inv"])
        assert code == 0 and "2" in out

    def test_normal_form_json(self, capsys, files):
        code, out, _ = run(capsys, "--order", "6", "normal-form", "dicritic", files["F2"])
        assert code == 0
        d = json.loads(out)
        assert d["k"] == 1 and d["p"] == "1 + v"

    def test_residue(self, capsys, files):
        code, out, _ = run(capsys, "residue", files["h"])
        assert code == 0 and "-1/4" in out

    def test_resonances(self, capsys):
        code, out, _ = run(capsys, "resonances", "2", "4", "3")
        assert code == 0

    def test_sla(self, capsys):
        code, out, _ = run(capsys, "sla", "--matrix", "0,1;1,0", "--lambda", "1/2,1/2")
        assert code == 0 and "true" in out.lower()

    def test_deterministic(self, capsys, files):
        a = run(capsys, "--order", "6", "normal-form", "dicritic", files["F2"])
        b = run(capsys, "--order", "6", "normal-form", "dicritic", files["F2"])
        assert a == b


class TestNumeric:
    def test_orbit_csv(self, capsys, files, tmp_path):
        path = tmp_path / "out.csv"
        code, out, _ = run(capsys, "orbit", files["F"], "--start=-1/10,-3/100", "--n=200", "--csv", str(path))
        assert code == 0
        rows = list(csv.reader(open(path)))
        assert rows[0] == ["n", "re_x", "im_x", "re_v", "im_v", "seq1_error"]
        assert len(rows) == 202
        assert json.loads(out)["stopped"] == "max-iterations"

    def test_seq1(self, capsys, files):
        code, out, _ = run(capsys, "seq1", files["F"], "--start=-1/10,-3/100", "--n=10000")
        assert code == 0 and json.loads(out)["raw_error"] < 1e-2

    def test_flower_seeded(self, capsys, files):
        argv = ("--seed", "5", "flower", files["F"], "--samples", "20", "--n", "300", "--R", "4")
        a, b = run(capsys, *argv), run(capsys, *argv)
        assert a[0] == 0 and a == b


class TestErrors:
    def test_syntax_error_exit_1(self, capsys, files):
        code, _, err = run(capsys, "parse", files["bad"])
        assert code == 1 and "non-rational literal" in err and "line 1" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "parse", str(tmp_path / "nope.germ"))
        assert code == 1 and "cannot read" in err

    def test_bad_usage(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["no-such-command"])
        assert info.value.code == 1

    def test_math_error_exit_2(self, capsys, files):
        code, _, err = run(capsys, "normal-form", "dicritic", files["S"])
        assert code == 2 and err.startswith("germ2: error[normalform]:")

    def test_dynamics_error(self, capsys, files):
        code, _, err = run(capsys, "flower", files["S"], "--samples", "5")
        assert code == 2 and "error[dynamics]" in err

    def test_lie_error(self, capsys, files):
        code, _, err = run(capsys, "log", files["inv"])
        assert code == 2 and "error[lie]" in err
