import csv
import io
import json
import os
import subprocess
import sys

import pytest

from slicetheta.cli import dumps, main
from slicetheta.clifford import UnitVector
from slicetheta.lattice import Lattice
from slicetheta.slice_algebra import SlicePoint
from slicetheta.theta import ThetaParams, theta_null


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


# -- lattice-info ---------------------------------------------------------------------


def test_lattice_info_inline_Z2(capsys):
    code, rep = run_json(capsys, "lattice-info", "--lattice", "1,0;0,1", "--radius-sq", "2")
    assert code == 0
    assert rep["gram_det"] == 1.0 and rep["is_unimodular"] is True
    assert [s["count"] for s in rep["shells"]] == [1, 4, 4]


def test_lattice_info_diag(capsys):
    code, rep = run_json(capsys, "lattice-info", "--lattice", "2,0;0,1")
    assert rep["gram_det"] == 4.0 and rep["is_unimodular"] is False


def test_lattice_info_D4_file(capsys, tmp_path):
    f = tmp_path / "d4.json"
    f.write_text(json.dumps(Lattice.checkerboard(4).to_json()))
    code, rep = run_json(capsys, "lattice-info", "--lattice", str(f))
    assert code == 0 and rep["is_even"] is True and rep["gram_det"] == pytest.approx(4.0)


def test_lattice_info_csv(capsys):
    code, out, _ = run(capsys, "lattice-info", "--lattice", "Z2", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["key", "value"] and ["gram_det", "1"] in rows


def test_lattice_parse_errors(capsys, tmp_path):
    code, _, err = run(capsys, "lattice-info", "--lattice", "1,0;0,a")
    assert code == 2 and "row 2, column 2" in err
    f = tmp_path / "bad.json"
    f.write_text('{"generators": [[1, 0],\n [0, 1]')
    code, _, err = run(capsys, "lattice-info", "--lattice", str(f))
    assert code == 2 and "line 2" in err and "column" in err


# -- eval ---------------------------------------------------------------------------------


def test_eval_matches_library_bytes(capsys):
    code, out, _ = run(capsys, "eval", "--lattice", "Z2", "--function", "theta-null", "--x0", "0", "--r", "1", "--omega", "1")
    assert code == 0
    L = Lattice.integer(2)
    t = theta_null(SlicePoint(0.0, 1.0, UnitVector.basis(1, 1)), ThetaParams(L))
    expected = {
        "function": "theta-null",
        "model": "H",
        "lattice": L.generators.tolist(),
        "x": [0.0, 1.0],
        "omega": [1.0],
        "value": t.value.as_pair(),
        "tail_bound": t.tail_bound,
        "terms_used": t.terms_used,
    }
    assert out == dumps(expected) + "\n"


def test_eval_eta_all_halves(capsys):
    code, rep = run_json(capsys, "eval", "--lattice", "Z2", "--function", "eta", "--r", "1.2")
    assert code == 0 and rep["qtilde"] == [1, 1]
    assert all(map(lambda v: abs(v) < 1e3, rep["value"])) and rep["tail_bound"] >= 0


def test_eval_other_functions(capsys):
    for fn in ("theta", "theta-tilde", "theta-tilde-tilde", "discriminant"):
        code, rep = run_json(capsys, "eval", "--function", fn, "--x0", "0.2", "--r", "0.9")
        assert code == 0, fn
    code, rep = run_json(capsys, "eval", "--function", "monogenic", "--x0", "1.2", "--r", "0.3")
    assert code == 0 and len(rep["value"]) == 4


def test_eval_Hr_real_point_needs_omega(capsys):
    assert run(capsys, "eval", "--model", "Hr", "--x0", "1", "--r", "0")[0] == 2
    code, rep = run_json(capsys, "eval", "--model", "Hr", "--x0", "1", "--r", "0", "--omega", "1")
    assert code == 0


def test_eval_domain_and_usage_errors(capsys):
    assert run(capsys, "eval", "--x0", "0", "--r", "0", "--omega", "1")[0] == 2
    assert run(capsys, "eval", "--model", "Hr", "--x0", "-1", "--r", "1")[0] == 2
    assert run(capsys, "eval", "--omega", "1,1,1")[0] == 2
    assert run(capsys, "eval", "--function", "nope")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2


def test_eval_omega_normalized_with_warning(capsys):
    code, out, err = run(capsys, "eval", "--lattice", "Z4", "--omega", "2,0,0")
    assert code == 0 and "normalizing" in err
    assert json.loads(out)["omega"] == [1.0, 0.0, 0.0]


def test_eval_csv(capsys):
    code, out, _ = run(capsys, "eval", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["function", "x0", "r", "value_re", "value_im", "tail_bound", "terms_used"]


# -- verify -----------------------------------------------------------------------------------


def test_verify_theta_H_twenty_rows(capsys):
    code, rep = run_json(capsys, "verify", "theta-H", "--lattice", "Z2", "--samples", "20", "--seed", "7")
    assert code == 0 and rep["all_passed"]
    assert [r["sample"] for r in rep["rows"]] == list(range(20))


def test_verify_csv_columns(capsys):
    code, out, _ = run(capsys, "verify", "theta-Hr", "--lattice", "Z4", "--samples", "3", "--format", "csv")
    header = next(csv.reader(io.StringIO(out)))
    assert header[:9] == ["identity", "x0", "r", "omega_1", "omega_2", "omega_3", "abs_residual", "tail_budget", "passed"]
    assert len(out.strip().splitlines()) == 4


@pytest.mark.parametrize("identity", ["conjugated", "eta", "discriminant"])
def test_verify_conjugated_family(capsys, identity):
    code, rep = run_json(capsys, "verify", identity, "--lattice", "Z2", "--samples", "3")
    assert code == 0
    assert len(rep["rows"]) == (6 if identity == "conjugated" else 3)


def test_verify_needs_unimodular(capsys):
    assert run(capsys, "verify", "eta", "--lattice", "D4", "--samples", "1")[0] == 2


def test_verify_heat_ratio(capsys):
    res = {}
    for h in ("1e-3", "5e-4"):
        code, rep = run_json(capsys, "verify", "heat", "--samples", "3", "--seed", "1", "--fd-step", h)
        assert code == 0
        res[h] = [r["abs_residual"] for r in rep["rows"]]
    for a, b in zip(res["1e-3"], res["5e-4"]):
        assert 3.5 <= a / b <= 4.5


def test_verify_fueter_map_columns(capsys):
    code, out, _ = run(capsys, "verify", "fueter-map", "--samples", "2", "--format", "csv")
    header = next(csv.reader(io.StringIO(out)))
    assert {"residual_plain", "residual_pi2", "residual_two_pi2", "best"} <= set(header)
    assert code == 0


def test_verify_monogenic_functional(capsys):
    code, rep = run_json(capsys, "verify", "monogenic-functional", "--samples", "2")
    assert code == 0 and rep["all_passed"]


def test_verify_failure_exit_code(capsys):
    # the literal |det Gram| factor breaks the law on diag(2,1)
    code, rep = run_json(capsys, "verify", "theta-H", "--lattice", "2,0;0,1", "--normalization", "gram_det", "--samples", "2")
    assert code == 1 and not rep["all_passed"]


def test_verify_unknown_identity(capsys):
    assert run(capsys, "verify", "riemann", "--samples", "1")[0] == 2


def test_verify_writes_out_file(capsys, tmp_path):
    f = tmp_path / "rep.json"
    code, out, _ = run(capsys, "verify", "theta-H", "--samples", "2", "--out", str(f))
    assert code == 0 and out == ""
    assert json.loads(f.read_text())["samples"] == 2


def test_verify_thread_count_invariance(capsys, monkeypatch):
    outs = []
    for threads in ("1", "4", "4"):
        monkeypatch.setenv("THETA_THREADS", threads)
        outs.append(run(capsys, "verify", "theta-H", "--lattice", "D4", "--samples", "6", "--seed", "3")[1])
    assert outs[0] == outs[1] == outs[2]
    monkeypatch.setenv("THETA_THREADS", "many")
    assert run(capsys, "verify", "theta-H", "--samples", "1")[0] == 2


def test_module_entry_point_subprocess():
    env = dict(os.environ, THETA_THREADS="2")
    cmd = [sys.executable, "-m", "slicetheta", "verify", "theta-Hr", "--samples", "3", "--seed", "11"]
    a = subprocess.run(cmd, capture_output=True, env=env, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, env=env, check=True).stdout
    assert a == b and json.loads(a)["all_passed"]
