import subprocess
import sys

import pytest

from localmath.cli import main

FIELD = """alpha: "0.5*y1"
domain:
  boxMin: [0, 0, 0, 0]
  boxMax: [0, 1, 0, 0]
points: [1, 1000, 1, 1]
"""
LATTICE = """alpha: "0.2*sin(y1)"
domain:
  boxMin: [-1, -1, -1, -1]
  boxMax: [1, 1, 1, 1]
points: [3, 3, 3, 3]
"""
SPINOR = """re: ["cos(y1)", "0", "1", "y0"]
im: ["sin(y1)", "0", "0", "0"]
"""
GAUGE = """b: 0.3
m: 0.5
B: ["0.1*y1", "0", "0", "y2"]
"""


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_value_table(capsys):
    code, out, _ = run(["value-table", "30"], capsys)
    assert code == 0
    assert out.splitlines() == ["value,subset", "30,1", "15,2", "10,3", "6,5", "5,6", "3,10", "2,15", "1,30"]
    assert run(["value-table", "0"], capsys)[0] == 2


def test_integrate(write, capsys):
    f = write("f.yaml", FIELD)
    code, out, _ = run(["integrate", "--field", f, "--psi", "1", "--ref", "0,0,0,0"], capsys)
    assert code == 0
    fields = dict(line.split(": ") for line in out.splitlines())
    assert abs(float(fields["value"]) - 2 * (2.718281828459045 ** 0.5 - 1)) < 1e-6
    assert {"scale", "spacing", "error_estimate"} <= fields.keys()


def test_malformed_expression_exit_code(write, capsys):
    f = write("f.yaml", FIELD.replace("0.5*y1", "0.5*(y1"))
    code, _, err = run(["integrate", "--field", f, "--psi", "1", "--ref", "0,0,0,0"], capsys)
    assert code == 2 and "line 1, column" in err
    code, _, err = run(["integrate", "--field", write("g.yaml", FIELD), "--psi", "exp(y0,y1)",
                        "--ref", "0,0,0,0"], capsys)
    assert code == 2 and "arity" in err


def test_missing_file_and_bad_vector(write, capsys):
    assert run(["restrict-check", "--field", "/nonexistent.yaml", "--epsilon", "1"], capsys)[0] == 2
    f = write("f.yaml", FIELD)
    assert run(["integrate", "--field", f, "--psi", "1", "--ref", "0,0"], capsys)[0] == 2


def test_derivative_check(write, capsys, tmp_path):
    f = write("f.yaml", FIELD)
    fig = tmp_path / "conv.png"
    code, out, _ = run(["derivative-check", "--field", f, "--psi", "sin(y1)", "--point", "0,0.3,0,0",
                        "--mu", "1", "--figure", str(fig)], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("h,quotient_re")
    assert len(lines) == 5 and lines[-1].startswith("# observed order")
    assert fig.stat().st_size > 0


def test_restrict_check(write, capsys):
    f = write("f.yaml", FIELD)
    code, out, _ = run(["restrict-check", "--field", f, "--epsilon", "0.1"], capsys)
    assert code == 1 and "result: fail" in out and "maxNorm: 0.5" in out
    code, out, _ = run(["restrict-check", "--field", f, "--epsilon", "1"], capsys)
    assert code == 0 and "result: pass" in out


def test_lagrangian_and_gauge_check(write, capsys, tmp_path):
    f, psi, gauge = write("f.yaml", LATTICE), write("psi.yaml", SPINOR), write("g.yaml", GAUGE)
    theta = write("t.yaml", 'theta: "0.4*y1*y2"\n')
    out_csv = tmp_path / "L.csv"
    code, out, _ = run(["lagrangian", "--field", f, "--psi", psi, "--gauge", gauge,
                        "--out", str(out_csv), "--gauge-check", theta], capsys)
    assert code == 0 and "result: pass" in out
    rows = out_csv.read_text().splitlines()
    assert rows[0] == "y0,y1,y2,y3,re_L,im_L" and len(rows) == 82


def test_geodesic(write, capsys, tmp_path):
    f = write("f.yaml", FIELD)
    csv_path, fig = tmp_path / "g.csv", tmp_path / "g.svg"
    code, _, _ = run(["geodesic", "--field", f, "--start", "0,0,0,0", "--velocity", "1,0.2,0,0",
                      "--tau", "1", "--steps", "100", "--out", str(csv_path), "--figure", str(fig)], capsys)
    assert code == 0
    rows = csv_path.read_text().splitlines()
    assert rows[0] == "tau,p0,p1,p2,p3,v0,v1,v2,v3" and len(rows) == 102
    assert fig.read_text().startswith("<?xml")
    code, _, _ = run(["geodesic", "--field", f, "--start", "0,0,0,0", "--velocity", "0,1,0,0"], capsys)
    assert code == 2


def test_outputs_byte_identical(write, capsys, tmp_path):
    f = write("f.yaml", FIELD)
    blobs = []
    for k in range(2):
        c, fig = tmp_path / f"g{k}.csv", tmp_path / f"g{k}.png"
        main(["geodesic", "--field", f, "--start", "0,0,0,0", "--velocity", "1,0.2,0,0",
              "--steps", "50", "--out", str(c), "--figure", str(fig)])
        blobs.append((c.read_bytes(), fig.read_bytes()))
    assert blobs[0] == blobs[1]


def test_path_length(write, capsys):
    f = write("f.yaml", FIELD)
    p = write("p.yaml", 'p: ["0", "s", "0", "0"]\nmetric: euclidean\n')
    code, out, _ = run(["path-length", "--field", f, "--path", p, "--ref", "0,0,0,0"], capsys)
    assert code == 0
    value = float(out.splitlines()[0].split(": ")[1])
    assert abs(value - 2 * (2.718281828459045 ** 0.5 - 1)) < 1e-6
    spacelike = write("s.yaml", 'points: [[0,0,0,0],[0,1,0,0]]\n')
    code, _, err = run(["path-length", "--field", f, "--path", spacelike], capsys)
    assert code == 1 and "spacelike" in err


@pytest.mark.parametrize("command", ["value-table", "integrate", "derivative-check", "lagrangian",
                                     "geodesic", "path-length", "restrict-check", "selftest"])
def test_help_has_example(command, capsys):
    code = main([command, "--help"])
    text = capsys.readouterr().out
    assert code == 0 and f"localmath {command}" in text.split("example:")[1]


def test_no_command_is_usage_error(capsys):
    assert run([], capsys)[0] == 2


def test_selftest_perturbed_gammas_fail():
    proc = subprocess.run([sys.executable, "-m", "localmath", "selftest", "--perturb-gamma", "0.1"],
                          capture_output=True, text=True)
    assert proc.returncode == 1
    assert proc.stdout.splitlines()[0].startswith("[FAIL]  0 gamma")


@pytest.mark.parametrize("seed", [1, 2, 3, 4, 5])
def test_selftest_verdicts_seed_invariant(seed, capsys):
    assert main(["selftest", "--seed", str(seed)]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[-1] == "12/12 checks passed"
