import csv
import io
import math

import numpy as np
import pytest

from powerfrontier.cli import EXIT_DATA, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, main
from powerfrontier.simulation import FrontierModel, frontier_g2, read_sample_csv


def run(argv):
    try:
        return main(argv)
    except SystemExit as exc:
        return exc.code


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_simulate_then_estimate_round_trip(tmp_path, capsys):
    data = tmp_path / "s.csv"
    assert run(["simulate", "--n", "400", "--seed", "3", "-o", str(data)]) == EXIT_OK
    sample = read_sample_csv(data)
    assert sample.n == 400
    assert np.all(sample.y <= frontier_g2(sample.x[:, 0]))
    out = tmp_path / "est.csv"
    assert run(["estimate", str(data), "-o", str(out), "--grid", "11", "--ci", "0.95"]) == EXIT_OK
    got = rows(out.read_text())
    assert len(got) == 11 and set(got[0]) == {"x", "ghat", "defined", "ci_lo", "ci_hi"}
    for r in got:
        if r["defined"] == "1":
            assert float(r["ci_lo"]) <= float(r["ghat"]) <= float(r["ci_hi"])
    err = capsys.readouterr().err
    assert "sqrt(n)" in err and "4*sd(X)/sqrt(n)" in err


def test_estimate_p1_is_twice_the_mean(tmp_path, capsys):
    data = tmp_path / "d.csv"
    data.write_text("x,y\n0.5,1.0\n0.5,0.4\n0.5,0.7\n")
    assert run(["estimate", str(data), "--p", "1", "--h", "0.1", "--grid", "1"]) == EXIT_OK
    (r,) = rows(capsys.readouterr().out)
    assert float(r["x"]) == 0.5
    assert float(r["ghat"]) == pytest.approx(2 * 0.7, rel=1e-14)


def test_estimate_gamma_one_matches_plain(tmp_path, capsys):
    data = tmp_path / "s.csv"
    run(["simulate", "--n", "200", "--seed", "5", "-o", str(data)])
    capsys.readouterr()
    run(["estimate", str(data), "--grid", "21"])
    plain = capsys.readouterr().out
    run(["estimate", str(data), "--grid", "21", "--gamma", "1"])
    assert capsys.readouterr().out == plain
    assert run(["estimate", str(data), "--gamma", "2", "--ci", "0.9"]) == EXIT_USAGE


def test_estimate_errors(tmp_path, capsys):
    empty = tmp_path / "e.csv"
    empty.write_text("")
    assert run(["estimate", str(empty)]) == EXIT_DATA
    assert "empty sample" in capsys.readouterr().err
    bad = tmp_path / "b.csv"
    bad.write_text("x,y\n0.1,1\n0.2,oops\n")
    assert run(["estimate", str(bad)]) == EXIT_DATA
    assert "line 3" in capsys.readouterr().err
    assert run(["estimate", str(tmp_path / "missing.csv")]) == EXIT_DATA
    far = tmp_path / "f.csv"
    far.write_text("x,y\n0.0,1\n0.01,1\n")
    assert run(["estimate", str(far), "--h", "0.001", "--grid-min", "0.5", "--grid-max", "0.9"]) == EXIT_NUMERIC
    const = tmp_path / "c.csv"
    const.write_text("x,y\n0.3,1\n0.3,2\n")
    assert run(["estimate", str(const)]) == EXIT_NUMERIC


def test_usage_errors():
    assert run(["estimate"]) == EXIT_USAGE
    assert run(["simulate", "--n", "5", "--frontier", "g7"]) == EXIT_USAGE
    assert run(["simulate", "--n", "5", "--seed", "-1"]) == EXIT_USAGE
    assert run(["bogus"]) == EXIT_USAGE


def test_simulate_stdout_and_determinism(capsys):
    assert run(["simulate", "--n", "5", "--gamma", "2", "--covariate", "beta22", "--seed", "9"]) == EXIT_OK
    first = capsys.readouterr().out
    run(["simulate", "--n", "5", "--gamma", "2", "--covariate", "beta22", "--seed", "9"])
    assert capsys.readouterr().out == first
    s = read_sample_csv(io.StringIO(first))
    assert s.n == 5
    assert np.all((s.y >= 0) & (s.y <= frontier_g2(s.x[:, 0])))


def test_experiment_default_design_shape(tmp_path, capsys):
    out = tmp_path / "r.csv"
    trace = tmp_path / "t.csv"
    code = run(["experiment", "--m", "2", "--grid-size", "41", "--out", str(out), "--trace", str(trace)])
    assert code == EXIT_OK
    report = rows(out.read_text())
    assert len(report) == 36
    assert len(rows(trace.read_text())) == 72
    assert "gamma = 3" in capsys.readouterr().out


def test_experiment_config_file(tmp_path, capsys):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("# small run\nn_values = 100,200\ngamma_values = 2\nm = 2\nseed = 7\nestimators = power_kernel,corrected_gamma\n")
    assert run(["experiment", "--config", str(cfg), "--grid-size", "21"]) == EXIT_OK
    got = rows(capsys.readouterr().out)
    assert len(got) == 4
    assert {r["estimator"] for r in got} == {"power_kernel", "corrected_gamma"}
    cfg.write_text("nope = 1\n")
    assert run(["experiment", "--config", str(cfg)]) == EXIT_DATA


def test_experiment_is_byte_reproducible(capsys):
    argv = ["experiment", "--m", "2", "--n-values", "100", "--gammas", "1,3", "--grid-size", "21"]
    run(argv)
    a = capsys.readouterr().out
    run(argv)
    assert capsys.readouterr().out == a


def test_coverage_command(capsys):
    assert run(["coverage", "--n", "300", "--m", "10", "--points", "0.5"]) == EXIT_OK
    (r,) = rows(capsys.readouterr().out)
    assert int(r["n_defined"]) == 10 and 0 <= float(r["coverage"]) <= 1
    assert run(["coverage", "--m", "0"]) == EXIT_USAGE
