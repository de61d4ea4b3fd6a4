"""CLI exit codes and golden outputs.

Set COGEF_REGEN_GOLDEN=1 to rewrite the files under tests/golden.
"""

import io
import os
from pathlib import Path

import pytest

from cogef.cli import run_cli

GOLDEN = Path(__file__).parent / "golden"
REGEN = os.environ.get("COGEF_REGEN_GOLDEN") == "1"


def run(argv, cwd):
    out = io.StringIO()
    old = os.getcwd()
    os.chdir(cwd)
    try:
        code = run_cli(argv, out)
    finally:
        os.chdir(old)
    return code, out.getvalue()


def golden(name, text):
    path = GOLDEN / name
    if REGEN:
        path.write_text(text)
    assert text == path.read_text(), f"output differs from {path}"


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    for argv in (["gen", "jia", "2", "--out", "jia2.json"],
                 ["gen", "cevallos", "6", "--out", "cev6.json"],
                 ["gen", "odd-cycle", "5", "--out", "c5.json"],
                 ["gen", "dual-complete", "4", "--det", "2", "--out", "d4.json"]):
        assert run(argv, d)[0] == 0
    (d / "one.json").write_text('{"A": [[2]], "b": [1]}\n')
    (d / "apex.json").write_text('{"A": [[2]], "b": [2]}\n')
    return d


@pytest.mark.parametrize("name", ["jia2.json", "cev6.json", "c5.json", "d4.json"])
def test_generated_files_are_golden(workdir, name):
    golden(f"gen_{name}", (workdir / name).read_text())


@pytest.mark.parametrize("name,code", [
    ("jia2", 2), ("cev6", 2), ("c5", 0), ("d4", 0), ("one", 0), ("apex", 0)])
def test_check(workdir, name, code):
    got, out = run(["check", f"{name}.json"], workdir)
    assert got == code
    golden(f"check_{name}.txt", out)


def test_check_jia_names_condition_three(workdir):
    _, out = run(["check", "jia2.json"], workdir)
    assert out.startswith("REJECT") and "(iii) fail" in out


def test_check_json(workdir):
    import json

    code, out = run(["check", "d4.json", "--json"], workdir)
    doc = json.loads(out)
    assert code == 0 and doc["verdict"] == "accept" and doc["profile"]["delta"] == 2


@pytest.mark.parametrize("fmt", ["lp", "mps", "json"])
def test_build(workdir, fmt):
    code, out = run(["build", "c5.json", "--format", fmt, "--out", f"c5_out.{fmt}"], workdir)
    assert code == 0 and (workdir / f"c5_out.{fmt}").exists()
    golden(f"build_c5_{fmt}.txt", out)
    golden(f"c5_out.{fmt}", (workdir / f"c5_out.{fmt}").read_text())


def test_build_rejected(workdir):
    code, out = run(["build", "jia2.json", "--out", "x.lp"], workdir)
    assert code == 2 and not (workdir / "x.lp").exists()


def test_verify(workdir):
    code, out = run(["verify", "c5.json", "--objectives", "50", "--seed", "1"], workdir)
    assert code == 0 and out.startswith("PASS")
    golden("verify_c5.txt", out)


def test_verify_is_deterministic(workdir):
    a = run(["verify", "one.json", "--objectives", "10", "--seed", "4", "--json"], workdir)
    b = run(["verify", "one.json", "--objectives", "10", "--seed", "4", "--json"], workdir)
    assert a == b and a[0] == 0


@pytest.mark.parametrize("argv", [
    [], ["bogus"], ["check"], ["build", "c5.json"], ["build", "c5.json", "--out", "x", "--format", "xls"],
    ["check", "missing.json"], ["gen", "odd-cycle", "4", "--out", "x.json"], ["--delta-cap", "two", "check", "c5.json"],
])
def test_usage_errors(workdir, argv, capsys):
    assert run(argv, workdir)[0] == 64


def test_malformed_instance_is_a_usage_error(workdir):
    (workdir / "bad.json").write_text('{"A": [[1, 0], [1]], "b": [0, 0]}')
    assert run(["check", "bad.json"], workdir)[0] == 64
