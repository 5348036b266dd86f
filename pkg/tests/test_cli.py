import json

import pytest

from dhtr.cli import main
from dhtr.weightpoly import WeightPolynomial


def run(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as err:  # argparse/validation exits carry the code
        code = err.code
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_dh_command(capsys):
    code, out, _ = run(capsys, "dh", "--g", "0", "--mu", "2,1,1,1")
    assert code == 0
    assert out.strip() == ("25 q5 + 64 q4 q1 + 54 q3 q2 + 81 q3 q1^2 + "
                           "72 q2^2 q1 + 70 q2 q1^3 + 10 q1^5")


def test_dh_s_poly(capsys):
    code, out, _ = run(capsys, "dh", "--g", "0", "--mu", "1", "--s-poly")
    assert code == 0
    assert out.strip() == "q1"


def test_dh_json_round_trip(capsys):
    code, out, _ = run(capsys, "dh", "--g", "1", "--mu", "2", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    poly = WeightPolynomial.from_json(payload["poly"], payload["d"])
    assert payload["g"] == 1 and payload["mu"] == [2]
    assert not poly.is_zero()


def test_ph_command(capsys):
    code, out, _ = run(capsys, "ph", "--g", "2", "--mu", "3")
    assert code == 0
    assert out.strip() == "3/4 q3 + 19/30 q2 q1 + 5/48 q1^3"


def test_oracle_command(capsys):
    code, out, _ = run(capsys, "oracle", "--g", "1", "--mu", "2")
    assert code == 0
    assert "EQUAL" in out


def test_oracle_json(capsys):
    code, out, _ = run(capsys, "oracle", "--g", "0", "--mu", "2", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["equal"] is True
    assert any(entry["lambda"] == [2] for entry in payload["counts"])


def test_qc_verify(capsys):
    code, out, _ = run(capsys, "qc-verify", "--d", "1", "--K", "5", "--L", "2")
    assert code == 0
    assert "verdict: PASS" in out


def test_bad_usage_exit_codes(capsys):
    assert run(capsys, "table", "Q")[0] == 2
    assert run(capsys, "dh", "--g", "0", "--mu", "0,1")[0] == 2
    with pytest.raises(SystemExit) as err:
        main(["no-such-command"])
    assert err.value.code == 2


def test_deterministic_output_across_thread_counts(capsys):
    _, out1, _ = run(capsys, "--threads", "1", "dh", "--g", "1", "--mu", "3,1")
    _, out4, _ = run(capsys, "--threads", "4", "dh", "--g", "1", "--mu", "3,1")
    assert out1 == out4


def test_table_csv_format(capsys):
    code, out, err = run(capsys, "table", "B", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "g,mu,poly"
    assert len(lines) == 41  # header + 40 rows
    assert "all equal" in err


def test_tr_verify_two_point_path(capsys):
    # (g, n) = (0, 2) dispatches to the two-point origin check
    code, out, _ = run(capsys, "tr-verify", "--g", "0", "--n", "2",
                       "--mu-max", "3", "--precision", "192")
    assert code == 0
    assert "verdict: PASS" in out


def test_tr_verify_json_schema(capsys):
    code, out, _ = run(capsys, "tr-verify", "--g", "1", "--n", "1",
                       "--mu-max", "2", "--precision", "192",
                       "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert {"g", "n", "mu_max", "tolerance", "max_residual",
            "verdict", "rows"} <= set(payload)
    for row in payload["rows"]:
        assert {"mu", "predicted", "expected", "rel_residual",
                "verdict"} == set(row)
