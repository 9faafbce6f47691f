import json

from classmoments.cli import main


def _json(capsys):
    return json.loads(capsys.readouterr().out)


def test_classgroup(capsys):
    assert main(["classgroup", "--d", "23"]) == 0
    out = _json(capsys)
    assert out["h"] == 3 and out["divisors"] == [3] and out["g_parts"]["3"]["torsion_count"] == 3
    assert out["config"]["d"] == 23


def test_lattice(capsys):
    assert main(["lattice", "--ell", "1", "--b", "0", "--radius", "10"]) == 0
    assert _json(capsys)["count"] == 317


def test_exit_codes(capsys):
    assert main(["lattice", "--ell", "5", "--b", "9", "--radius", "10"]) == 2
    assert main(["classgroup", "--d", "12"]) == 2
    assert main(["lattice", "--ell", "1", "--b", "0", "--radius", "100000", "--budget", "5"]) == 3
    assert main(["tg", "--X", "5000", "--Z", "16", "--budget", "5"]) == 3
    assert main(["moments", "--grid", "100,1000"]) == 2


def test_verify_quick_trivial(capsys):
    assert main(["verify", "--quick", "--only", "5,10"]) == 0
    out = capsys.readouterr().out
    assert "[PASS]  5" in out and "[PASS] 10" in out and "2/2 criteria passed" in out


def test_repcount_and_tg(capsys, tmp_path):
    assert main(["repcount", "--d", "10007", "--Z", "21", "--output", str(tmp_path)]) == 0
    out = _json(capsys)
    assert out["count"] == 2 * out["unordered"]
    assert (tmp_path / "witnesses_10007_21_3.csv").exists()
    assert main(["repcount", "--X", "10000", "--Z", "10", "--V0", "1"]) == 0
    assert _json(capsys)["count"] == 253
    assert main(["tg", "--X", "1000", "--Z", "6"]) == 0
    out = _json(capsys)
    assert out["total"] == out["sum_r"] == 0


def test_moments_fraction_k(capsys):
    assert main(["moments", "--g", "3", "--k", "3/2", "--grid", "100,1000,10000", "--H", "2"]) == 0
    out = _json(capsys)
    assert out["sigma"] == "41/36" and out["k"] == "3/2" and out["tail"]["H"] == 2
    assert main(["moments", "--mode", "fundamental", "--grid", "1000,10000,20000"]) == 0
    vals = _json(capsys)["dh_average"]
    assert vals == sorted(vals)


def test_sweep_artifacts_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["sweep", "--from", "1", "--to", "2000", "--g", "3,5", "--output", str(a)]) == 0
    assert main(["sweep", "--from", "1", "--to", "2000", "--g", "3,5", "--output", str(b)]) == 0
    name = "sweep_1_2000_g3-5.csv"
    assert (a / name).read_bytes() == (b / name).read_bytes()
    capsys.readouterr()
    assert main(["sweep", "--from", "1", "--to", "12"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "d,delta,h,h3_torsion,h3_sylow" and len(lines) == 9
