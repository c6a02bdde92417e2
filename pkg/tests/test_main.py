import io
import json

import numpy as np
import pytest

from main import (
    EXIT_DOMAIN,
    EXIT_OK,
    EXIT_ORACLE_SIZE,
    parse_args,
    read_rule_csv,
    run,
    write_rule_csv,
)
from rule_api import gauss_jacobi_rule
from utils import config


def _run(capsys, argv):
    code = run(parse_args(argv))
    return code, capsys.readouterr()


def test_parse_args_defaults():
    cfg = parse_args(["nodes", "--n", "25", "--alpha", "50", "--beta", "41"])
    assert (cfg.command, cfg.n, cfg.alpha, cfg.beta) == ("nodes", 25, 50.0, 41.0)
    assert (cfg.order, cfg.J, cfg.format, cfg.digits) == (4, 3, "csv", 17)
    assert cfg.x == ()
    assert not cfg.oracle


def test_parse_args_eval_points():
    cfg = parse_args(["eval", "--n", "125", "--alpha", "90", "--beta", "75", "--x", "0", "0.5"])
    assert cfg.x == (0.0, 0.5)


def test_parse_args_rejects_order():
    with pytest.raises(SystemExit):
        parse_args(["nodes", "--n", "25", "--alpha", "50", "--beta", "41", "--order", "3"])


def test_nodes_command(capsys):
    code, out = _run(capsys, ["nodes", "--n", "25", "--alpha", "50", "--beta", "41", "--order", "0"])
    assert code == EXIT_OK
    lines = out.out.splitlines()
    assert lines[0] == "ell,node,flag"
    assert len(lines) == 26
    first = lines[1].split(",")
    assert first[0] == "1"
    assert float(first[1]) == pytest.approx(-0.7415548, abs=1.5e-7)


def test_rule_command_json(capsys):
    code, out = _run(capsys, ["rule", "--n", "1", "--alpha", "0", "--beta", "0", "--format", "json"])
    assert code == EXIT_OK
    payload = json.loads(out.out)
    assert payload["nodes"] == [0.0]
    assert payload["weights"][0] == pytest.approx(2.0, rel=1e-15)
    assert len(payload["flags"]) == 1


def test_oracle_digits(capsys):
    code, out = _run(capsys, ["nodes", "--n", "2", "--alpha", "0", "--beta", "0",
                              "--oracle", "--digits", "30"])
    assert code == EXIT_OK
    second = out.out.splitlines()[2].split(",")[1]
    # 1/√3 = 0.57735026918962576450914878050195...
    assert second.startswith("0.577350269189625764509148780")


def test_eval_command(capsys):
    code, out = _run(capsys, ["eval", "--n", "125", "--alpha", "90", "--beta", "75",
                              "--x", "0", "0.1", "--format", "json"])
    assert code == EXIT_OK
    records = json.loads(out.out)
    assert len(records) == 2
    assert set(records[0]) == {"x", "value", "derivative", "v", "v_prime"}


def test_check_command(capsys):
    code, out = _run(capsys, ["check", "--n", "100", "--alpha", "50", "--beta", "41", "--order", "2"])
    assert code == EXIT_OK
    lines = out.out.splitlines()
    assert lines[0] == "ell,node_err_abs,node_err_rel,w_err_rel,omega_err_rel"
    errors = np.array([float(line.split(",")[1]) for line in lines[1:]])
    assert len(errors) == 100
    assert np.all(errors[9:90] < 1e-8)


def test_bench_command(capsys):
    code, out = _run(capsys, ["bench", "--n", "50", "--alpha", "10", "--beta", "20"])
    assert code == EXIT_OK
    phases = [line.split(",")[0] for line in out.out.splitlines()[1:]]
    assert phases == ["params", "nodes", "weights"]


def test_output_file(tmp_path, capsys):
    target = tmp_path / "rule.csv"
    code, out = _run(capsys, ["rule", "--n", "30", "--alpha", "5", "--beta", "7",
                              "--output", str(target)])
    assert code == EXIT_OK
    assert out.out == ""
    frame = read_rule_csv(target)
    assert list(frame.columns) == ["ell", "node", "weight", "weight_scaled", "flag"]
    assert len(frame) == 30


@pytest.mark.parametrize("argv, expected", [
    (["nodes", "--n", "10", "--alpha", "-2", "--beta", "0"], EXIT_DOMAIN),
    (["nodes", "--n", "10", "--alpha", "1", "--beta", "1", "--digits", "20"], EXIT_DOMAIN),
    (["eval", "--n", "125", "--alpha", "90", "--beta", "75", "--x", "0.95"], EXIT_DOMAIN),
    (["eval", "--n", "125", "--alpha", "90", "--beta", "75"], EXIT_DOMAIN),
    (["nodes", "--n", "10", "--alpha", "1", "--beta", "1", "--threads", "0"], EXIT_DOMAIN),
])
def test_error_exit_codes(capsys, argv, expected):
    code, out = _run(capsys, argv)
    assert code == expected
    assert "error:" in out.err


def test_oracle_size_exit_code(capsys, monkeypatch):
    monkeypatch.setattr(config, "oracle_max_n", 50)
    code, out = _run(capsys, ["check", "--n", "100", "--alpha", "50", "--beta", "41"])
    assert code == EXIT_ORACLE_SIZE
    assert "error:" in out.err


def test_csv_round_trip():
    rule = gauss_jacobi_rule(40, 12, 3)
    buffer = io.StringIO()
    write_rule_csv(rule, buffer)
    buffer.seek(0)
    frame = read_rule_csv(buffer)
    assert np.array_equal(frame["node"].to_numpy(), rule.nodes)
    assert np.array_equal(frame["weight"].to_numpy(), rule.weights_classical)
    assert list(frame["flag"]) == list(rule.meta.flags)
