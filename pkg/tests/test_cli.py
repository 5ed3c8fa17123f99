import json

import numpy as np
import pytest

from instances import r0_singular_scalar, scalar, two_root_scalar
from wienerhopf.cli import ENV_RESIDUAL, EXIT_INPUT, EXIT_NEGATIVE, EXIT_OK, main
from wienerhopf.generate import blaschke_obstruction, instance_from_seed
from wienerhopf.jsonio import decode_representation, dumps, encode_representation
from wienerhopf.representation import stable_to_dichotomous


@pytest.fixture
def write_rep(tmp_path):
    def write(rep, name="rep.json"):
        path = tmp_path / name
        path.write_text(dumps(encode_representation(rep)))
        return str(path)

    return write


def run(capsys, *argv):
    status = main(list(argv))
    out = capsys.readouterr()
    return status, out.out, out.err


def run_json(capsys, *argv):
    status, out, _ = run(capsys, *argv)
    return status, json.loads(out)


def test_validate_codes(capsys, write_rep, tmp_path):
    assert run_json(capsys, "validate", write_rep(r0_singular_scalar()))[0] == EXIT_OK
    status, rep = run_json(capsys, "validate", write_rep(scalar(1, 1, 1.0, 1, 1, 0.5, 1)))
    assert status == EXIT_NEGATIVE and rep["ok"] is False
    missing = str(tmp_path / "missing.json")
    assert run(capsys, "validate", missing)[0] == EXIT_INPUT
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run(capsys, "validate", str(bad))[0] == EXIT_INPUT


def test_usage_errors(capsys, write_rep):
    path = write_rep(r0_singular_scalar())
    assert run(capsys, "factorize", path, "--bogus")[0] == EXIT_INPUT
    assert run(capsys, "factorize", path, "--method", "newton")[0] == EXIT_INPUT
    assert run(capsys)[0] == EXIT_INPUT
    assert run(capsys, "toeplitz-profile", path, "--sizes", "4,0")[0] == EXIT_INPUT
    assert run(capsys, "factorize", path, "--circle-samples", "0")[0] == EXIT_INPUT
    assert run(capsys, "gen", "--dims", "1,2")[0] == EXIT_INPUT


def test_version(capsys):
    assert run(capsys, "--version")[0] == EXIT_OK


def test_factorize_first_example(capsys, write_rep):
    status, rep = run_json(capsys, "factorize", write_rep(r0_singular_scalar(0.5)))
    assert status == EXIT_OK and rep["ok"] is True
    assert rep["schema"] == 1 and rep["report"] == "factorize"
    assert rep["certificate"]["method"] == "toeplitz"
    assert rep["verdict"]["measures"]["product_residual"] <= 1e-10


@pytest.mark.parametrize("side", ["right", "left"])
@pytest.mark.parametrize("route", ["riccati", "subspace"])
def test_factorize_sides_and_routes(capsys, write_rep, side, route):
    status, rep = run_json(capsys, "factorize", write_rep(instance_from_seed(3)), "--side", side, "--route", route)
    assert status == EXIT_OK and rep["verdict"]["ok"]


def test_factorize_accepts_dichotomous_input(capsys, write_rep):
    real = stable_to_dichotomous(instance_from_seed(5))
    for route in ("riccati", "subspace"):
        assert run_json(capsys, "factorize", write_rep(real), "--route", route)[0] == EXIT_OK


def test_factorize_negative(capsys, write_rep):
    # R(z) = z: no canonical factorization
    status, rep = run_json(capsys, "factorize", write_rep(scalar(0.0, 1.0, 0.0, 1.0, 0.0, 0.5, 0.0)),
                           "--method", "subspace")
    assert status == EXIT_NEGATIVE and rep["ok"] is False and rep["reason"]
    status, rep = run_json(capsys, "factorize", write_rep(blaschke_obstruction(0.4)), "--side", "left")
    assert status == EXIT_NEGATIVE


def test_output_is_deterministic(capsys, write_rep, tmp_path):
    path = write_rep(instance_from_seed(7))
    outs = []
    for i in range(2):
        target = tmp_path / f"out{i}.json"
        assert run(capsys, "factorize", path, "-o", str(target))[0] == EXIT_OK
        outs.append(target.read_bytes())
    assert outs[0] == outs[1]
    assert run(capsys, "factorize", path)[1].encode() == outs[0]


def test_residual_env_and_flag(capsys, write_rep, monkeypatch):
    path = write_rep(instance_from_seed(8))
    monkeypatch.setenv(ENV_RESIDUAL, "1e-30")
    status, rep = run_json(capsys, "factorize", path, "--method", "subspace")
    assert status == EXIT_NEGATIVE and rep["verdict"]["ok"] is False
    status, rep = run_json(capsys, "factorize", path, "--method", "subspace", "--residual-tol", "1e-8")
    assert status == EXIT_OK
    monkeypatch.setenv(ENV_RESIDUAL, "tiny")
    assert run(capsys, "factorize", path)[0] == EXIT_INPUT


def test_leftright(capsys, write_rep):
    status, rep = run_json(capsys, "leftright", write_rep(r0_singular_scalar(0.5)))
    assert status == EXIT_NEGATIVE and rep["reason"] == "R(0) not invertible"
    status, rep = run_json(capsys, "leftright", write_rep(two_root_scalar(0.5, 0.5, 1.0, 2.0)))
    assert status == EXIT_OK and rep["left_exists"] is True
    status, rep = run_json(capsys, "leftright", write_rep(blaschke_obstruction(0.4)))
    assert status == EXIT_NEGATIVE and rep["left_exists"] is False


@pytest.mark.parametrize("seed", range(5))
def test_leftright_consistent_with_left_factorize(capsys, write_rep, seed):
    path = write_rep(instance_from_seed(seed))
    lr = run_json(capsys, "leftright", path)[0]
    left = run_json(capsys, "factorize", path, "--side", "left")[0]
    assert lr == left == EXIT_OK


def test_solset(capsys, write_rep):
    status, rep = run_json(capsys, "solset", write_rep(two_root_scalar(0.5, 0.5, 1.0, 2.0)))
    assert status == EXIT_OK
    roots = sorted(complex(*r).real for r in rep["sets"]["ricc2"]["roots"])
    np.testing.assert_allclose(roots, [0.5, 4.0], atol=1e-10)
    assert run(capsys, "solset", write_rep(instance_from_seed(0)))[0] == EXIT_INPUT


def test_toeplitz_profile_csv(capsys, write_rep):
    status, out, _ = run(capsys, "toeplitz-profile", write_rep(r0_singular_scalar(0.5)), "--sizes", "4,8,16")
    assert status == EXIT_OK
    lines = out.strip().split("\n")
    assert lines[0] == "N,rcond,q_delta"
    assert [line.split(",")[0] for line in lines[1:]] == ["4", "8", "16"]
    assert lines[-1].endswith(",")
    assert float(lines[1].split(",")[2]) > 0


def test_gen_round_trip(capsys):
    status, out, _ = run(capsys, "gen", "--seed", "11", "--dims", "1,2,3")
    assert status == EXIT_OK
    rep = decode_representation(json.loads(out))
    assert (rep.p_minus, rep.p_plus, rep.m) == (1, 2, 3)
    assert rep.allclose(instance_from_seed(11, (1, 2, 3)), atol=0)
