import csv
import io
import json
import math
import subprocess
import sys

import pytest

from diagdensity import cli
from diagdensity.verify import CheckResult


def run_cli(capsys, *argv):
    code = cli.run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def parse_csv(text):
    lines = text.splitlines()
    table = [l for l in lines if not l.startswith("# ")]
    summary = dict(l[2:].split(",", 1) for l in lines if l.startswith("# "))
    rows = list(csv.DictReader(io.StringIO("\n".join(table))))
    return rows, summary


def test_local_example(capsys):
    code, out, _ = run_cli(capsys, "local", "--coeffs", "1,1,1", "--k", "6", "--prime-limit", "7")
    assert code == 0
    last = out.strip().splitlines()[-1]
    assert last.startswith("7,1,4,0.571428571429,1.14285714286")
    rows, _ = parse_csv(out)
    assert rows[-1]["density_exact"] == "4/7"


def test_bound_example(capsys):
    code, out, _ = run_cli(
        capsys, "bound", "--coeffs", "1,1,1", "--k", "40", "--s", "3", "--prime-limit", "100", "--format", "json"
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["inputs"]["mode"] == "exact"
    terms = {r["p"]: r["term"] for r in doc["rows"]}
    assert terms[41] == pytest.approx(math.log(41 / 4), abs=1e-9)
    assert terms[41] == pytest.approx(2.327, abs=1e-3)
    assert doc["summary"]["log_inv_density_lower"] == pytest.approx(math.fsum(terms.values()), abs=1e-9)


def test_average_example(capsys):
    code, out, _ = run_cli(capsys, "average", "--s", "3", "--X", "13", "--prime-limit", "1000")
    assert code == 0
    rows, _ = parse_csv(out)
    assert float(rows[-1]["average"]) == pytest.approx(0.06184, abs=1e-5)
    assert float(rows[-1]["reference"]) == pytest.approx(math.sqrt(13) / math.log(13), rel=1e-11)


@pytest.mark.parametrize(
    "argv",
    [
        ["local", "--coeffs", "2,-3,5", "--k", "9", "--prime-limit", "60"],
        ["bound", "--k", "30", "--s", "3", "--prime-limit", "500"],
        ["scan", "--coeffs", "1,1,-1", "--k", "3", "--N", "60", "--B", "4", "--sieve-primes", "7,13"],
        ["average", "--s", "3", "--X", "20,40"],
        ["lemma3", "--X", "100", "--Y", "4"],
        ["landau", "--X", "1000"],
    ],
)
def test_json_and_csv_agree(capsys, argv):
    _, text_csv, _ = run_cli(capsys, *argv, "--format", "csv")
    _, text_json, _ = run_cli(capsys, *argv, "--format", "json")
    rows, summary = parse_csv(text_csv)
    doc = json.loads(text_json)
    assert len(rows) == len(doc["rows"])

    def same(a, b):
        if b is None:
            return a == ""
        if isinstance(b, bool):
            return a == ("true" if b else "false")
        if isinstance(b, (int, float)):
            return f"{float(a):.12g}" == f"{float(b):.12g}"
        return a == str(b)

    for r, j in zip(rows, doc["rows"]):
        assert r.keys() == j.keys()
        assert all(same(r[c], j[c]) for c in r)
    assert summary.keys() == doc["summary"].keys()
    assert all(same(summary[c], doc["summary"][c]) for c in summary)


def test_twelve_significant_digits(capsys):
    _, out, _ = run_cli(capsys, "landau", "--X", "1000")
    rows, _ = parse_csv(out)
    digits = rows[0]["partial_sum"].replace(".", "").lstrip("0")
    assert len(digits) <= 12


def test_out_file(capsys, tmp_path):
    path = tmp_path / "local.csv"
    code, out, _ = run_cli(capsys, "local", "--coeffs", "1,1,1", "--k", "6", "--prime-limit", "7", "--out", str(path))
    assert code == 0 and out == ""
    assert path.read_text().splitlines()[0].startswith("p,m,value_set_size")


def test_argument_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.run(["local", "--k", "nope"])
    assert exc.value.code == 2
    code, _, err = run_cli(capsys, "local", "--k", "3")
    assert code == 2 and "usage:" in err
    code, _, err = run_cli(capsys, "local", "--coeffs", "0,0", "--k", "3")
    assert code == 2 and "zero" in err


def test_resource_error(capsys):
    code, out, err = run_cli(capsys, "scan", "--coeffs", "1,1,1", "--k", "2", "--N", "10", "--B", "2000")
    assert code == 3 and out == "" and "smaller B" in err


def test_verify_failure_exit(capsys, monkeypatch):
    monkeypatch.setattr(cli, "run_checks", lambda seed, threads: [CheckResult("broken", False, "forced")])
    code, out, _ = run_cli(capsys, "verify")
    assert code == 1 and "broken,false,forced" in out


def test_threads_do_not_change_output(capsys):
    argv = ["scan", "--coeffs", "1,2,-3", "--k", "3", "--N", "400", "--B", "7", "--sieve-primes", "7,13"]
    _, a, _ = run_cli(capsys, *argv, "--threads", "1")
    _, b, _ = run_cli(capsys, *argv, "--threads", "8")
    assert a == b
    argv = ["average", "--s", "3", "--X", "60", "--per-k"]
    _, a, _ = run_cli(capsys, *argv, "--threads", "1")
    _, b, _ = run_cli(capsys, *argv, "--threads", "8")
    assert a == b


def test_threads_env(monkeypatch):
    monkeypatch.setenv("DIAGDENSITY_THREADS", "5")
    args = cli.build_parser().parse_args(["landau"])
    assert args.threads == 5
    args = cli.build_parser().parse_args(["landau", "--threads", "2"])
    assert args.threads == 2


@pytest.mark.parametrize("name", sorted(cli.COMMANDS))
def test_help_documents_columns(name):
    proc = subprocess.run([sys.executable, "-m", "diagdensity", name, "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "columns:" in proc.stdout
