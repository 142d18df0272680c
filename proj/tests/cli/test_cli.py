import json
import math
import os
import subprocess

import pytest

CLI = os.environ.get("NDJAC_CLI", "ndjac")


def run(*args, cwd=None):
    return subprocess.run([CLI, *map(str, args)], capture_output=True, text=True, cwd=cwd)


def report(proc):
    return json.loads(proc.stdout)


def test_chart_task_passes():
    p = run("verify", "--task", "mp-herm", "--beta", 2, "--m", 3, "--q", 2, "--points", 20, "--seed", 7)
    assert p.returncode == 0, p.stderr
    r = report(p)
    assert r["pass"] is True
    assert len(r["records"]) == 20
    assert set(r) == {"task", "engine", "records", "pass", "constant_estimate", "seed", "runtime_ms", "version"}


def test_equality_task_passes():
    p = run("verify", "--task", "uhlig-svd", "--beta", 1, "--m", 2, "--n", 1, "--trials", 200000, "--seed", 1)
    assert p.returncode == 0, p.stderr
    assert all(abs(rec["z"]) < 3 for rec in report(p)["records"])


def test_failed_check_exits_1():
    # the ratio is constant, but not to one part in a million at this sample size
    p = run("verify", "--task", "svd", "--m", 1, "--n", 2, "--q", 1, "--trials", 10000, "--cv-tol", 1e-6, "--seed", 1)
    assert p.returncode == 1, p.stderr
    assert report(p)["pass"] is False


@pytest.mark.parametrize(
    "args",
    [
        ["verify", "--task", "sd", "--beta", 8, "--m", 2, "--q", 1],
        ["verify", "--task", "svd", "--engine", "chart"],
        ["verify", "--task", "nonsense"],
        ["verify", "--task", "sd", "--trials", 10],
        ["gamma", "--m", 2, "--beta", 1, "--a", 0.5],
        ["volume", "--m", 3, "--n", 2, "--beta", 1],
        ["factor", "--kind", "sd", "--beta", 1, "--m", 2, "--q", 2, "--lambda", "1,2"],
        ["frobnicate"],
    ],
)
def test_usage_and_input_errors_exit_2(args):
    p = run(*args)
    assert p.returncode == 2
    assert p.stderr


def test_octonion_message():
    p = run("verify", "--task", "sd", "--beta", 8, "--m", 2, "--q", 1)
    assert "octonion results conjectural" in p.stderr


def test_inconclusive_exits_3():
    p = run("verify", "--task", "uhlig-mp", "--beta", 2, "--m", 3, "--n", 2, "--trials", 10000, "--seed", 1)
    assert p.returncode == 3
    assert "inconclusive" in p.stderr


def test_same_seed_same_bytes():
    args = ["verify", "--task", "w", "--m", 2, "--n", 3, "--q", 1, "--trials", 10000, "--seed", 5]
    a, b = report(run(*args)), report(run(*args, "--jobs", 3))
    a.pop("runtime_ms")
    b.pop("runtime_ms")
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_factor_values():
    p = run("factor", "--kind", "mp-herm", "--beta", 1, "--m", 2, "--q", 1, "--lambda", 2)
    assert p.returncode == 0
    assert float(p.stdout.split("value:")[1].split()[0]) == pytest.approx(0.0625)
    p = run("factor", "--kind", "tau", "--beta", 2, "--q", 3)
    assert float(p.stdout.split()[-1]) == -3
    p = run("factor", "--kind", "congruence-ns", "--beta", 1, "--m", 2, "--det-b", 2)
    assert float(p.stdout.split("value:")[1].split()[0]) == pytest.approx(8.0)


def value_of(proc):
    return float(proc.stdout.split("value:")[1].split()[0])


def test_gamma_and_volume():
    assert value_of(run("gamma", "--m", 1, "--beta", 1, "--a", 0.5)) == pytest.approx(math.sqrt(math.pi))
    assert value_of(run("volume", "--m", 1, "--n", 3, "--beta", 1)) == pytest.approx(4 * math.pi)


def test_sample_stiefel_file(tmp_path):
    out = tmp_path / "h1.json"
    p = run("sample", "stiefel", "--n", 4, "--q", 2, "--beta", 4, "--seed", 3, "--out", out)
    assert p.returncode == 0, p.stderr
    m = json.loads(out.read_text())
    assert (m["beta"], m["rows"], m["cols"]) == (4, 4, 2)
    # quaternion inner products <h_a, h_b> = sum conj(x) y over rows
    def qmul(x, y):
        a1, b1, c1, d1 = x
        a2, b2, c2, d2 = y
        return (
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )

    e = m["entries"]
    for a in range(2):
        for b in range(2):
            acc = [0.0] * 4
            for i in range(4):
                x = e[i][a]
                conj = (x[0], -x[1], -x[2], -x[3])
                acc = [s + t for s, t in zip(acc, qmul(conj, e[i][b]))]
            assert acc[0] == pytest.approx(1.0 if a == b else 0.0, abs=1e-10)
            assert all(abs(t) < 1e-10 for t in acc[1:])


def test_table_and_csv_formats():
    base = ["verify", "--task", "chol", "--m", 2, "--q", 1, "--points", 3, "--seed", 2]
    t = run(*base, "--format", "table")
    assert t.returncode == 0
    assert t.stdout.startswith("# table layout is for reading only")
    c = run(*base, "--format", "csv")
    assert c.returncode == 0
    assert len(c.stdout.strip().splitlines()) == 4
