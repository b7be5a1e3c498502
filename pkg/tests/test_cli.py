import json
import subprocess
import sys

import pytest

from twistdioph import RationalFunction, parse, parse_rational_function, serialize
from twistdioph.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def fields(out):
    return dict(line.split(": ", 1) for line in out.splitlines() if ": " in line)


class TestInfo:
    def test_twist_info(self, capsys):
        code, out, _ = run(capsys, "twist-info")
        assert code == 0
        f = fields(out)
        assert f["h = P(1,t)"] == "1 - t^2 + t^3"
        assert f["rho"] == "(t)/(1 - t^2 + t^3)"
        assert f["admissible"] == "true"

    def test_gamma(self, capsys):
        code, out, _ = run(capsys, "gamma", "1")
        assert code == 0
        assert fields(out)["point"] == "(1:1:t)" and fields(out)["ev0"] == "1"
        _, out, _ = run(capsys, "gamma", "0")
        assert fields(out)["point"] == "(0:1:0)" and fields(out)["v_inf(u)"] == "+inf"
        _, out, _ = run(capsys, "gamma", "6")
        assert fields(out)["ev0"] == "6"

    def test_encode(self, capsys):
        code, out, _ = run(capsys, "encode", "1")
        assert code == 0
        assert parse_rational_function(fields(out)["u"], "x") == RationalFunction(1)

    def test_singular_curve(self, capsys):
        code, _, err = run(capsys, "gamma", "2", "--curve", "0,0,0")
        assert code == 2 and "repeated root" in err

    def test_usage_errors(self, capsys):
        assert run(capsys, "gamma", "x")[0] == 2
        assert run(capsys, "gamma", "1", "--curve", "1,2")[0] == 2
        assert run(capsys)[0] == 2

    def test_admissible(self, capsys):
        code, out, _ = run(capsys, "admissible", "--f", "x^2")
        assert code == 1
        assert "reason: non-étale above branch point 0" in out.splitlines()
        assert run(capsys, "admissible", "--f", "x/(1+x)")[0] == 0


class TestPipeline:
    @pytest.fixture()
    def artifact(self, tmp_path, capsys):
        path = tmp_path / "art.json"
        code, _, _ = run(capsys, "compile", "--system", "x*y = z", "--out", str(path))
        assert code == 0
        return path

    def test_compile_lift_verify(self, artifact, tmp_path, capsys):
        wit = tmp_path / "w.json"
        assert run(capsys, "lift", str(artifact), "3,4,12", "--out", str(wit))[0] == 0
        code, out, _ = run(capsys, "verify", str(artifact), str(wit))
        assert code == 0
        assert out.splitlines()[-1].startswith("result: PASS")
        code, out, _ = run(capsys, "verify", str(artifact), str(wit), "-v")
        assert "curve:x: pass" in out

    def test_named_solution(self, artifact, tmp_path, capsys):
        wit = tmp_path / "w.json"
        assert run(capsys, "lift", str(artifact), "x=2,y=5,z=10", "--out", str(wit))[0] == 0

    def test_not_a_solution(self, artifact, capsys):
        code, _, err = run(capsys, "lift", str(artifact), "3,4,11")
        assert code == 1 and "not a solution" in err
        assert run(capsys, "lift", str(artifact), "3,4")[0] == 2

    def test_perturbed_witness(self, artifact, tmp_path, capsys):
        _, text, _ = run(capsys, "lift", str(artifact), "3,4,12")
        w = parse(text).perturbed("u_z", RationalFunction.gen())
        wit = tmp_path / "bad.json"
        wit.write_text(serialize(w))
        code, out, _ = run(capsys, "verify", str(artifact), str(wit))
        assert code == 1
        assert out.splitlines()[-1].startswith("result: FAIL")

    def test_file_errors(self, artifact, tmp_path, capsys):
        assert run(capsys, "verify", str(artifact), str(tmp_path / "missing.json"))[0] == 2
        d = json.loads(artifact.read_text())
        d["version"] = 999
        old = tmp_path / "old.json"
        old.write_text(json.dumps(d))
        code, _, err = run(capsys, "lift", str(old), "1,1,1")
        assert code == 2 and "version" in err
        # a witness where an artifact is expected
        _, text, _ = run(capsys, "lift", str(artifact), "1,1,1")
        wit = tmp_path / "w.json"
        wit.write_text(text)
        assert run(capsys, "lift", str(wit), "1,1,1")[0] == 2

    def test_system_file(self, tmp_path, capsys):
        src = tmp_path / "sys.txt"
        src.write_text("# pythagoras\nx^2 + y^2 = z^2\n")
        code, out, _ = run(capsys, "compile", "--system-file", str(src))
        assert code == 0
        assert parse(out).system.variables == ["x", "y", "z"]

    def test_compile_not_admissible(self, capsys):
        code, _, err = run(capsys, "compile", "--system", "x = y", "--f", "x^2")
        assert code == 1 and "not admissible" in err

    def test_module_entry_point(self):
        r = subprocess.run([sys.executable, "-m", "twistdioph", "gamma", "1"], capture_output=True, text=True)
        assert r.returncode == 0 and "point: (1:1:t)" in r.stdout


class TestArithmetic:
    def test_varkr(self, capsys):
        code, out, _ = run(capsys, "varkr", "1")
        assert code == 0
        f = fields(out)
        assert (f["v0(s)"], f["v_inf(s)"], f["class"]) == ("0", "-2", "Y0")

    def test_qform(self, capsys):
        _, out, _ = run(capsys, "qform", "1,1,1,1", "--place", "real")
        assert out.splitlines()[-1] == "anisotropic"
        _, out, _ = run(capsys, "qform", "1,-1", "--place", "p:3")
        assert out.splitlines()[-1] == "isotropic"
        _, out, _ = run(capsys, "qform", "1,1")
        assert fields(out)["place"] == "Q" and out.splitlines()[-1] == "anisotropic"
        assert run(capsys, "qform", "1,0")[0] == 2
        assert run(capsys, "qform", "1,a")[0] == 2

    def test_newton(self, capsys):
        code, out, _ = run(capsys, "newton", "p + t^2", "--p", "3")
        assert code == 0
        assert "segment 0..2: slope -1/2" in out.splitlines()
        assert fields(out)["vertices"] == "(0, 1) (2, 0)"
