import json
import math
import subprocess
import sys

import numpy as np
import pytest

from symheun import checks
from symheun.checks import CheckResult
from symheun.cli import EXIT_CHECK, EXIT_INPUT, EXIT_NUMERIC, EXIT_USAGE, main
from symheun.core import CanonicalParams, elementary_symmetric
from symheun.fileio import params_to_dict

STANDARD = {"kind": "standard", "a": 3, "gamma": [0.6, 0.1], "delta": 0.7, "alpha": 0.4, "beta": [1.1, -0.2],
            "lam": [0.3, 0.1]}
GOLDEN = CanonicalParams(math.pi / 3, (math.pi / 4, math.pi / 6, math.pi / 8, math.pi / 10), 0.0)


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        path = tmp_path / name
        path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
        return str(path)
    return write


def _points(files, pts, name="pts.csv"):
    return files(name, "re,im\n" + "".join(f"{complex(z).real!r},{complex(z).imag!r}\n" for z in pts))


def _csv(path):
    rows = [line.split(",") for line in open(path).read().splitlines()]
    return rows[0], np.array([[float(v) for v in r] for r in rows[1:]])


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "symheun", "check"], capture_output=True, text=True)
    assert out.returncode == 0
    assert out.stdout.count("PASS") == len(checks.CHECKS)


def test_check_constant_configuration(capsys):
    assert main(["check"]) == 0
    assert "FAIL" not in capsys.readouterr().out


def test_check_failure_exit_code(monkeypatch, capsys):
    monkeypatch.setattr(checks, "CHECKS", (lambda p, rng: CheckResult("always off", 1.0, 0.5),))
    assert main(["check"]) == EXIT_CHECK
    assert capsys.readouterr().out.startswith("FAIL  always off")


def test_series_reports_erratum(files, tmp_path, capsys):
    prm = files("p.json", params_to_dict(GOLDEN))
    out, summ = tmp_path / "c.csv", tmp_path / "s.json"
    assert main(["series", "--params", prm, "--n", "200", "--engines", "both", "--out", str(out),
                 "--summary", str(summ)]) == 0
    header, data = _csv(out)
    assert header == ["n", "paper_re", "paper_im", "oracle_re", "oracle_im"] and data.shape == (201, 5)
    s = json.loads(summ.read_text())
    assert s["warning"] is True and s["discrepancy"] > 1e-10
    assert s["erratum"]["status"] == "erratum"
    assert (s["erratum"]["first_failing"]["n"], s["erratum"]["first_failing"]["offset"]) == (3, 2)
    assert "warning" in capsys.readouterr().err


def test_convert_sigma_report(files, capsys):
    assert main(["convert", "--params", files("std.json", STANDARD)]) == 0
    d = json.loads(capsys.readouterr().out)
    sigma = [complex(*v) for v in d["report"]["sigma"]]
    images = [complex(*v) for v in d["report"]["images"]]
    assert abs(sigma[0]) < 1e-12 and abs(sigma[2]) < 1e-12 and abs(sigma[3] - 1) < 1e-12
    assert abs(sigma[1] - elementary_symmetric(images)[1]) < 1e-12
    assert d["report"]["input_kind"] == "standard"
    assert d["kind"] == "canonical"


def test_eval_deterministic_across_workers(files, tmp_path):
    rng = np.random.default_rng(11)
    pts = 0.9 * rng.uniform(-1, 1, 150) + 0.9j * rng.uniform(-1, 1, 150)
    prm, pf = files("p.json", STANDARD), _points(files, pts)
    outs = []
    for w in (1, 3):
        out = tmp_path / f"v{w}.csv"
        assert main(["eval", "--params", prm, "--points", pf, "--workers", str(w), "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_convert_then_eval_round_trip(files, tmp_path, capsys):
    assert main(["convert", "--params", files("std.json", STANDARD)]) == 0
    d = json.loads(capsys.readouterr().out)
    can = files("can.json", {k: v for k, v in d.items() if k != "report"})
    pf = _points(files, [0.1 + 0.2j, -0.4 + 0.1j, 0.3j, 1.6 - 0.5j, 2.5])
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["eval", "--params", can, "--points", pf, "--out", str(a)]) == 0
    assert main(["eval", "--params", files("sym.json", {**d, "kind": "canonical"}), "--points", pf,
                 "--out", str(b)]) == 0
    _, va = _csv(a)
    _, vb = _csv(b)
    Fa, Fb = va[:, 2] + 1j * va[:, 3], vb[:, 2] + 1j * vb[:, 3]
    assert np.max(np.abs(Fa - Fb) / np.abs(Fa)) <= 1e-12
    assert np.max(va[:, 7]) <= 1e-8


def test_usage_errors(capsys):
    assert main([]) == EXIT_USAGE
    assert main(["eval", "--bogus"]) == EXIT_USAGE
    assert main(["eigen", "--ends", "4,1"]) == EXIT_USAGE
    assert main(["series", "--init", "1,0"]) == EXIT_USAGE
    assert main(["check", "--tol", "-1"]) == EXIT_USAGE


def test_input_errors(files, capsys):
    assert main(["convert", "--params", files("bad.json", "{not json")]) == EXIT_INPUT
    assert main(["convert", "--params", files("k.json", {"kind": "weird"})]) == EXIT_INPUT
    assert main(["convert", "--params", files("m.json", {"kind": "canonical", "phi": 0.5})]) == EXIT_INPUT
    assert main(["convert", "--params", "/nonexistent/p.json"]) == EXIT_INPUT
    prm = files("p.json", params_to_dict(GOLDEN))
    assert main(["eval", "--params", prm, "--points", files("pts.csv", "x,y\n1,2\n")]) == EXIT_INPUT
    assert "bad input" in capsys.readouterr().err


def test_eval_at_singular_point_is_numeric_failure(files, tmp_path, capsys):
    prm = files("p.json", params_to_dict(GOLDEN))
    out = tmp_path / "v.csv"
    z1 = GOLDEN.points.z[0]
    assert main(["eval", "--params", prm, "--points", _points(files, [0.2, z1]), "--out", str(out)]) == EXIT_NUMERIC
    _, v = _csv(out)
    assert np.isfinite(v[0]).all() and np.isnan(v[1, 2:]).all()
    assert "point" in capsys.readouterr().err


def test_eigen_and_ortho_golden(files, tmp_path):
    prm = files("p.json", params_to_dict(GOLDEN))
    gold = json.load(open(__file__.replace("test_cli.py", "golden/spectral.json")))
    out = tmp_path / "e.csv"
    assert main(["eigen", "--params", prm, "--via", "1,0", "--interval", "0,30", "--out", str(out)]) == 0
    header, e = _csv(out)
    lam = e[:, 1] + 1j * e[:, 2]
    for got, g in zip(lam, gold["eigenvalues"]):
        assert abs(got - complex(*g["lam"])) <= 1e-9
    lams = ";".join(f"{float(z.real)!r},{float(z.imag)!r}" for z in lam)
    out2 = tmp_path / "o.csv"
    assert main(["ortho", "--params", prm, "--via", "1,0", f"--lams={lams}", "--out", str(out2)]) == 0
    header, o = _csv(out2)
    assert header[-1] == "ratio" and o.shape[0] == 1 and o[0, -1] <= 1e-6


def test_laurent_summary(files, tmp_path, capsys):
    prm = files("p.json", params_to_dict(GOLDEN))
    out = tmp_path / "l.csv"
    assert main(["laurent", "--params", prm, "--n", "50", "--out", str(out)]) == 0
    s = json.loads(capsys.readouterr().out)
    assert s["inverted_params"]["kind"] == "canonical" and s["tail_bound"] >= 0
    assert _csv(out)[1].shape == (51, 3)
