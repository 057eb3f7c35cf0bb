import json

import pytest

from grasscut.cli import main, parse_rational, rational


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    return json.loads(out)


def test_rational_encoding():
    assert rational("3/6") == {"n": "1", "d": "2"}
    assert parse_rational({"n": "-4", "d": "6"}) * 3 == -2
    assert parse_rational("5") == 5
    with pytest.raises(ValueError):
        parse_rational(0.5)


def test_enumerate_counts(capsys):
    assert run_json(capsys, "enumerate", "paves", "--s", "1,1,1,2")["count"] == 12
    assert run_json(capsys, "enumerate", "pavings", "--s", "1,1,1,2")["count"] == 8
    assert run_json(capsys, "enumerate", "vs", "--s", "1,1")["count"] == 1
    assert run_json(capsys, "enumerate", "cs", "--s", "1,1,1,1")["count"] == 7
    gw = run_json(capsys, "enumerate", "gw", "--s", "1,1,1,1", "--w", "1,1,1,1")
    assert gw["count"] == 3


def test_points_order_is_reported(capsys):
    out = run_json(capsys, "enumerate", "vs", "--s", "1,1,1,2")
    assert out["points"][0] == "12"
    assert len(out["points"]) == 7


def test_fan(capsys):
    out = run_json(capsys, "fan", "--s", "1,1,1,2", "--paving", "S1244")
    (cone,) = out["cones"]
    assert cone["name"] == "S1244"
    assert set(cone["generator_names"]) == {"14.23/13.24", "13.24/14.23", "13.44/14.34", "12.34/14.23"}
    assert len(run_json(capsys, "fan", "--s", "1,1,1,2", "--all")["cones"]) == 8


def test_chart_eval(capsys, tmp_path):
    p = tmp_path / "p.json"
    p.write_text(json.dumps({"epsP_2": {"n": "1", "d": "2"}, "xX_12": 3, "hH_22": "-2"}))
    out = run_json(capsys, "chart-eval", "X_1A", "--params", str(p))
    assert out["minors"]["1,3"] == {"n": "1", "d": "2"}
    p.write_text(json.dumps({"epsP_2": 0, "xX_12": 3, "hH_22": -2}))
    code, _, err = run(capsys, "chart-eval", "X_1A", "--params", str(p))
    assert code == 5 and "epsP_2" in err
    p.write_text(json.dumps({"epsP_2": 1}))
    assert run(capsys, "chart-eval", "X_1A", "--params", str(p))[0] == 2


@pytest.mark.parametrize("argv,code", [
    (["enumerate", "paves", "--s", "1,1,1,1,1"], 3),
    (["fan", "--s", "1,1,1,1,1", "--all"], 3),
    (["fan", "--s", "1,1,1,2", "--paving", "S99"], 4),
    (["enumerate", "vs", "--s", "1,x"], 2),
    (["enumerate", "vs"], 2),
    (["enumerate", "gw", "--s", "1,1"], 2),
    (["verify", "charts", "--s", "1,1,1,2", "--trials", "0"], 2),
    (["bogus"], 2),
])
def test_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_verify_pass_and_fail(capsys, tmp_path):
    code, out, _ = run(capsys, "verify", "cross-ratio", "--s", "1,1,1,1", "--trials", "10")
    assert code == 0
    code, out, _ = run(capsys, "verify", "embeddings", "--s", "1,1,1,2", "--trials", "2",
                       "--out", str(tmp_path / "r.json"))
    # X_1A and X_2 fail the unit clause
    assert code == 1
    assert out.splitlines()[-1] == "FAIL embeddings"
    assert json.loads((tmp_path / "r.json").read_text())


def test_text_format(capsys):
    code, out, _ = run(capsys, "enumerate", "vs", "--s", "1,1", "--format", "text")
    assert code == 0 and "count" in out


def test_determinism(capsys):
    a = run(capsys, "verify", "lemma-em", "--s", "1,1,1,1", "--trials", "3", "--seed", "9")
    b = run(capsys, "verify", "lemma-em", "--s", "1,1,1,1", "--trials", "3", "--seed", "9")
    assert a == b and a[0] == 0
