import json
import subprocess
import sys

import pytest

from finmonoid.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


GOLDEN = [
    (["rank", "--p", "2", "--subspace", "e0;e1"], "3\n"),
    (["rank", "--subspace", "e0+e1"], "2\n"),
    (["unrank", "--p", "2", "--id", "14"], "e0;e1;e2\n"),
    (["star", "--p", "2", "--lhs", "e0", "--rhs", "e0"], "<e0,e1> (id 3)\nfactors: {0^2}\n"),
    (["star", "--lhs", "e0", "--rhs", "e0;e1"], "<e0,e1,e2> (id 14)\nfactors: {0^3}\n"),
    (["factor", "--subspace", "e0;e1;e2"], "{0^3}\nclass: Q\n"),
    (["classify", "--id", "0"], "P\n"),
    (["classify", "--id", "3"], "Q\n"),
    (["rank", "--subspace", "e0;e1", "--format", "machine"], '{"id": 3, "subspace": "<e0,e1>"}\n'),
    (["star", "--lhs", "e0", "--rhs", "e0", "--format", "machine"], '{"factors": "{0^2}", "id": 3, "subspace": "<e0,e1>"}\n'),
    (["classify", "--id", "3", "--format", "machine"], '{"class": "Q", "id": 3}\n'),
]


@pytest.mark.parametrize("argv,expected", GOLDEN)
def test_golden_output(capsys, argv, expected):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert out == expected
    # byte-identical on a second run
    assert run(capsys, *argv)[1] == expected


def test_rank_p3(capsys):
    code, out, _ = run(capsys, "rank", "--p", "3", "--subspace", "e0;e1")
    assert code == 0 and out == "4\n"


@pytest.mark.parametrize(
    "argv",
    [
        ["rank", "--subspace", "e0+"],
        ["rank", "--subspace", "0"],
        ["unrank", "--id", "-1"],
        ["star", "--lhs", "e0", "--rhs", "e0", "--bogus"],
        ["rank", "--p", "4", "--subspace", "e0"],
        ["mean", "--group", "Q2", "--fn", "const:1", "--n", "3"],
        ["mean", "--group", "Z2", "--fn", "wave:1", "--n", "3"],
        ["verify", "--max-id", "3", "--checks", "comm,bogus"],
        ["lemma", "--name", "nope"],
        ["frobnicate"],
    ],
)
def test_parse_errors_exit_2(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        code = main(argv)
        raise SystemExit(code)
    assert exc.value.code == 2


def test_verify_exit_codes(capsys):
    code, out, _ = run(capsys, "verify", "--p", "2", "--max-id", "10")
    assert code == 0 and "PASS" in out
    code, out, _ = run(capsys, "verify", "--max-id", "30", "--checks", "comm", "--budget", "0.5")
    assert code == 1 and "incomplete" in out and "FAIL" in out


def test_verify_machine(capsys):
    code, out, _ = run(capsys, "verify", "--max-id", "3", "--checks", "comm,cancel,contain,factor,groth", "--format", "machine")
    doc = json.loads(out)
    assert code == 0 and doc["pass"] and doc["failures"] == []
    assert doc["counts"]["comm"] == 16


def test_trace_file(tmp_path, capsys):
    path = tmp_path / "trace.json"
    code, out, _ = run(capsys, "trace", "--p", "2", "--steps", "50", "--out", str(path))
    assert code == 0
    doc = json.loads(path.read_text())
    assert len(doc["steps"]) == 50 and doc["sha256"] in out
    first = path.read_bytes()
    run(capsys, "trace", "--steps", "50", "--out", str(path))
    assert path.read_bytes() == first


def test_mean(capsys):
    code, out, _ = run(capsys, "mean", "--group", "Z2", "--fn", "slab:i=1,c=0", "--n", "2", "--shifts", "e1,e2")
    assert code == 0
    assert out.splitlines()[:2] == ["n = 2", "value = 0.2"]
    code, out, _ = run(capsys, "mean", "--group", "Z2", "--fn", "slab:i=1,c=0", "--n", "2", "--shifts", "e1", "--format", "machine")
    doc = json.loads(out)
    assert doc["n"] == 2 and doc["value"] == [0.2] and doc["defects"][0]["shift"] == [1, 0]


def test_mean_on_n_lifts(capsys):
    code, out, _ = run(capsys, "mean", "--group", "N1", "--fn", "point:1", "--n", "10", "--format", "machine")
    assert code == 0 and json.loads(out)["value"] == [pytest.approx(2 / 21)]


@pytest.mark.parametrize(
    "name,params",
    [
        ("groth-decomposition", ""),
        ("kernel-bound", ""),
        ("kernel-bound", "c=-1"),
        ("disjoint-support", ""),
        ("zero-semigroup", "order=3"),
        ("coset", "moduli=2x3"),
        ("quotient", ""),
        ("iso", ""),
    ],
)
def test_lemmas_pass(capsys, name, params):
    argv = ["lemma", "--name", name]
    if params:
        argv += ["--params", params]
    code, out, _ = run(capsys, *argv)
    assert code == 0 and out.startswith("pass")


def test_lemma_failure_exit_1(capsys):
    code, out, _ = run(capsys, "lemma", "--name", "quotient", "--params", "proj=2:0")
    assert code == 1 and out.startswith("fail")


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "finmonoid", "star", "--lhs", "e0", "--rhs", "e0"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert res.returncode == 0
    assert res.stdout.splitlines()[0] == "<e0,e1> (id 3)"
