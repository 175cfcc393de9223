import filecmp
import json
import math
import subprocess
import sys

import numpy as np
import pytest

import berrylab
from berrylab.circuits import circuit_to_json_dict
from berrylab.corpus import (
    bqp_yes_circuit,
    duqma_yes_circuit,
    equatorial_loop,
    synthetic_verifier_instance,
)
from berrylab.hamiltonians import constant, make_family, save_family
from berrylab.hardness import save_instance


def run_cli(*argv, env=None):
    cmd = [sys.executable, "-m", "berrylab.cli", *[str(a) for a in argv]]
    return subprocess.run(cmd, capture_output=True, text=True, env=env, timeout=300)


@pytest.fixture(scope="module")
def work(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    save_family(equatorial_loop(), str(d / "eq.json"))
    save_instance(synthetic_verifier_instance("yes"), str(d / "syn"))
    with open(d / "yes.circuit.json", "w") as fh:
        json.dump(circuit_to_json_dict(bqp_yes_circuit()), fh)
    with open(d / "duqma.circuit.json", "w") as fh:
        json.dump(circuit_to_json_dict(duqma_yes_circuit()), fh)
    return d


# -- oracle --------------------------------------------------------------------


def test_oracle_equatorial(work):
    out = work / "oracle.json"
    p = run_cli("oracle", "--instance", work / "eq.json", "--out", out)
    assert p.returncode == 0, p.stderr
    payload = json.loads(out.read_text())
    assert abs(payload["theta_B"] - math.pi) < 1e-4
    assert payload["converged"] is True
    assert payload["min_gap"] == pytest.approx(2.0, rel=1e-9)
    assert (work / "oracle.json.manifest.json").exists()
    assert (work / "oracle.json.sweep.csv").exists()


def test_oracle_manifest_golden(work):
    out = work / "oracle2.json"
    p = run_cli("oracle", "--instance", work / "eq.json", "--out", out)
    assert p.returncode == 0
    manifest = json.loads((work / "oracle2.json.manifest.json").read_text())
    assert manifest == {
        "command": "oracle",
        "package_version": berrylab.__version__,
        "parameters": {
            "instance": str(work / "eq.json"),
            "grid_size": 256,
            "gap_grid": 64,
            "sweep_grid": 33,
            "sweep_out": str(work / "oracle2.json.sweep.csv"),
            "out": str(out),
        },
        "seed": None,
    }


def test_oracle_rerun_bit_identical(work):
    a, b = work / "rep_a.json", work / "rep_b.json"
    assert run_cli("oracle", "--instance", work / "eq.json", "--out", a).returncode == 0
    assert run_cli("oracle", "--instance", work / "eq.json", "--out", b).returncode == 0
    assert a.read_text() == b.read_text()
    assert (work / "rep_a.json.sweep.csv").read_text() == (
        work / "rep_b.json.sweep.csv"
    ).read_text()


# -- error paths ---------------------------------------------------------------


def test_malformed_json_names_the_position(work, tmp_path):
    bad = tmp_path / "broken.json"
    bad.write_text("{not json")
    p = run_cli("oracle", "--instance", bad, "--out", tmp_path / "x.json")
    assert p.returncode == 2
    assert "line 1" in p.stderr


def test_unknown_family_record(work, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"kind": "mystery"}))
    p = run_cli("oracle", "--instance", bad, "--out", tmp_path / "x.json")
    assert p.returncode == 2


def test_missing_file(tmp_path):
    p = run_cli("oracle", "--instance", tmp_path / "nope.json", "--out", tmp_path / "x")
    assert p.returncode == 2
    assert "nope.json" in p.stderr


def test_capacity_exit_code(tmp_path, monkeypatch):
    import os

    fam = make_family(3, [("ZXI", constant(1.0)), ("IXZ", constant(0.4))])
    save_family(fam, str(tmp_path / "big.json"))
    env = dict(os.environ, BERRYLAB_MAX_QUBITS="2")
    p = run_cli(
        "oracle", "--instance", tmp_path / "big.json", "--out", tmp_path / "o.json",
        env=env,
    )
    assert p.returncode == 3


def test_degenerate_family_exit_code(tmp_path):
    fam = make_family(2, [("ZI", constant(1.0))])
    save_family(fam, str(tmp_path / "deg.json"))
    p = run_cli(
        "oracle", "--instance", tmp_path / "deg.json", "--out", tmp_path / "o.json"
    )
    assert p.returncode == 4
    assert "degenerate" in p.stderr


# -- bpe / murta ------------------------------------------------------------------


def test_bpe_equatorial_and_determinism(work):
    a, b = work / "bpe_a.json", work / "bpe_b.json"
    pa = run_cli("bpe", "--instance", work / "eq.json", "--seed", 11, "--out", a)
    assert pa.returncode == 0, pa.stderr
    pb = run_cli("bpe", "--instance", work / "eq.json", "--seed", 11, "--out", b)
    assert pb.returncode == 0
    assert a.read_text() == b.read_text()
    payload = json.loads(a.read_text())
    assert abs(payload["theta_B_hat"] - math.pi) <= 0.05
    assert json.loads((work / "bpe_a.json.manifest.json").read_text())["seed"] == 11


def test_murta_subcommand(work):
    out = work / "murta.json"
    p = run_cli("murta", "--instance", work / "eq.json", "--seed", 0, "--out", out)
    assert p.returncode == 0, p.stderr
    payload = json.loads(out.read_text())
    est = payload["theta_B_hat"]
    assert min(est, 2 * math.pi - est) <= 0.1  # aliased to 0, not pi


# -- genhard ------------------------------------------------------------------------


def test_genhard_bqp_round_trip(work):
    p = run_cli(
        "genhard", "--circuit", work / "yes.circuit.json", "--kind", "bqp",
        "--idle-steps", 2, "--out", work / "ghy",
    )
    assert p.returncode == 0, p.stderr
    prov = json.loads((work / "ghy.provenance.json").read_text())
    assert 0.0 < prov["oracle_theta_B"] <= math.pi / 2.0
    from berrylab.hardness import load_instance

    inst = load_instance(str(work / "ghy"))
    assert inst.kind == "bqp"
    assert inst.circuit is not None


def test_genhard_duqma_needs_witness(work):
    p = run_cli(
        "genhard", "--circuit", work / "duqma.circuit.json", "--kind", "duqma",
        "--out", work / "ghd",
    )
    assert p.returncode == 2
    assert "witness" in p.stderr.lower()


def test_genhard_refuses_oversized_r(work):
    p = run_cli(
        "genhard", "--circuit", work / "yes.circuit.json", "--kind", "bqp",
        "--idle-steps", 2, "--r", 0.9, "--out", work / "ghbad",
    )
    assert p.returncode == 2
    assert "gap" in p.stderr


# -- verify ---------------------------------------------------------------------------


def test_verify_on_synthetic_instance(work):
    out = work / "verify.json"
    p = run_cli(
        "verify", "--instance", work / "syn", "--witness", "ground",
        "--runs", 10, "--seed", 5, "--out", out,
    )
    assert p.returncode == 0, p.stderr
    payload = json.loads(out.read_text())
    assert payload["accept_rate"] == 1.0
    assert payload["energy_pass_rate"] == 1.0
    assert len(payload["runs"]) == 10
    assert (work / "verify.json.rates.csv").exists()


def test_verify_rerun_bit_identical(work):
    a, b = work / "ver_a.json", work / "ver_b.json"
    for out in (a, b):
        p = run_cli(
            "verify", "--instance", work / "syn", "--witness", "ground",
            "--runs", 5, "--seed", 9, "--out", out,
        )
        assert p.returncode == 0
    assert a.read_text() == b.read_text()


def test_verify_excited_witness_rejects_often(work):
    out = work / "verify_exc.json"
    p = run_cli(
        "verify", "--instance", work / "syn", "--witness", "excited:1",
        "--runs", 20, "--seed", 7, "--out", out,
    )
    assert p.returncode == 0, p.stderr
    payload = json.loads(out.read_text())
    assert payload["energy_pass_rate"] == 0.0
    assert payload["accept_rate"] <= 0.5


# -- sweep -----------------------------------------------------------------------------


def test_sweep_csv_shape(work):
    out = work / "sweep.csv"
    p = run_cli("sweep", "--instance", work / "eq.json", "--grid-size", 9, "--out", out)
    assert p.returncode == 0, p.stderr
    lines = out.read_text().strip().splitlines()
    header = lines[0].split(",")
    assert header[0] == "lambda"
    assert len(lines) == 10  # header + 9 grid points
