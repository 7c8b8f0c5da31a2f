import json

import pytest

from primbounds.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_basic_lower_report(capsys):
    code, out, _ = run(capsys, "bound", "--target", "alpha", "--flavor", "basic-lower",
                       "--l", "2", "--K", "1000000")
    rep = json.loads(out)
    assert code == 0
    assert float(rep["bound"]) >= 1.31464
    assert rep["direction"] == "lower" and "wall_time" in rep and rep["steps"]


def test_improved_upper_beta(capsys):
    code, out, _ = run(capsys, "bound", "--target", "beta", "--flavor", "improved-upper",
                       "--S", "5", "--Ks", "1048576,1048576,960,196,98", "--format", "text")
    assert code == 0
    value = float(out.split("upper bound ")[1].split()[0])
    assert value <= 1.574445


def test_oracle(capsys):
    code, out, _ = run(capsys, "oracle", "f", "--n", "7", "--no-timing")
    assert code == 0 and json.loads(out)["value"] == "12"
    code, out, _ = run(capsys, "oracle", "coprime", "--n", "20")
    rep = json.loads(out)
    assert rep["pi"] == 8 and 0 < float(rep["residual_exponent"]) < 2


def test_table_and_cache_dir(capsys, tmp_path):
    target = tmp_path / "r.tbl"
    code, out, _ = run(capsys, "table", "--l", "2", "--kind", "r'", "--K", "500", "--out", str(target))
    assert code == 0 and target.read_text().startswith("2;2,3;MaxTruncated;500\n")
    code, out, _ = run(capsys, "bound", "--target", "alpha", "--flavor", "crude-upper", "--l", "2",
                       "--K", "5000", "--cache-dir", str(tmp_path / "c"), "--no-timing")
    assert code == 0 and list((tmp_path / "c").glob("*.tbl"))
    code, again, _ = run(capsys, "bound", "--target", "alpha", "--flavor", "crude-upper", "--l", "2",
                         "--K", "5000", "--cache-dir", str(tmp_path / "c"), "--no-timing")
    assert again == out


@pytest.mark.parametrize("argv", [
    ["bound", "--target", "gamma", "--flavor", "basic-lower", "--l", "2", "--K", "5"],
    ["bound", "--target", "alpha", "--flavor", "basic-lower", "--l", "2"],
    ["bound", "--target", "alpha", "--flavor", "improved-lower", "--S", "2", "--Ks", "5,4,3"],
    ["bound", "--target", "beta", "--flavor", "crude-upper", "--l", "2", "--K", "9"],
    ["table", "--l", "1", "--kind", "zzz", "--K", "5"],
    ["oracle", "f"],
    [],
])
def test_usage_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_resource_refusal_exit_3(capsys):
    assert run(capsys, "oracle", "g", "--n", "99")[0] == 3
    assert run(capsys, "bound", "--target", "alpha", "--flavor", "basic-lower",
               "--l", "3", "--K", "2000000")[0] == 3


def test_bad_cache_exit_1(capsys, tmp_path):
    (tmp_path / "l2_MaxTruncated.tbl").write_text("2;2,3;MaxTruncated;10\n1,3\n")
    code, _, err = run(capsys, "bound", "--target", "alpha", "--flavor", "basic-lower",
                       "--l", "2", "--K", "100", "--cache-dir", str(tmp_path))
    assert code == 1 and "CacheFormatError" in err


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--format", "text")
    assert code == 0 and "all checks passed" in out
