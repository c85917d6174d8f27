import json

import numpy as np
import pytest

from sepdisc import (
    Dims,
    HermitianOperator,
    construct_two_state,
    example1,
    example2,
    ghz_state,
)
from sepdisc.cli import main
from sepdisc.operators import hermitize
from sepdisc.serialize import (
    ensemble_to_payload,
    measurement_to_payload,
    operator_to_payload,
    read_json,
    validate_payload,
    write_json,
)


def _run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    payload = json.loads(captured.out) if captured.out.startswith("{") else None
    return code, payload, captured


def _write_example1(tmp_path):
    ensemble, measurement = example1(2, 2)
    epath = tmp_path / "e1.ensemble.json"
    mpath = tmp_path / "e1.measurement.json"
    write_json(epath, ensemble_to_payload(ensemble))
    write_json(mpath, measurement_to_payload(measurement))
    acc = sum(
        ensemble.weighted(i).entries @ el.entries
        for i, el in enumerate(measurement.elements)
    )
    dual = HermitianOperator(ensemble.dims, hermitize(acc))
    dpath = tmp_path / "e1.dual.json"
    write_json(dpath, operator_to_payload(dual))
    return str(epath), str(mpath), str(dpath)


def test_gen_writes_validated_files(tmp_path, capsys):
    prefix = str(tmp_path / "ex1")
    code, payload, _ = _run(capsys, ["gen", "example1", "--m", "2", "--d", "2", "--out", prefix])
    assert code == 0
    validate_payload(payload, "run_report")
    assert payload["outputs"]["ensemble_path"] == prefix + ".ensemble.json"
    assert payload["outputs"]["n_states"] == 4
    assert payload["outputs"]["n_elements"] == 4
    raw = read_json(prefix + ".ensemble.json")
    validate_payload(raw, "ensemble")
    raw = read_json(prefix + ".measurement.json")
    validate_payload(raw, "measurement")
    assert raw["certificates"] is not None


def test_gen_ensemble_only_example(tmp_path, capsys):
    prefix = str(tmp_path / "ex3")
    code, payload, _ = _run(capsys, ["gen", "example3", "--m", "2", "--d", "2", "--out", prefix])
    assert code == 0
    assert payload["outputs"]["measurement_path"] is None
    raw = read_json(prefix + ".ensemble.json")
    validate_payload(raw, "ensemble")
    assert len(raw["states"]) == 3


def test_solve_beats_separable_bound(tmp_path, capsys):
    epath, _, _ = _write_example1(tmp_path)
    out = str(tmp_path / "result.json")
    code, payload, _ = _run(capsys, ["solve", "--ensemble", epath, "--out", out])
    assert code == 0
    result = payload["outputs"]["result"]
    assert result["converged"]
    assert result["p_value"] >= 2 / 3 + 1e-3
    raw = read_json(out)
    validate_payload(raw, "discrimination_result")


def test_verify_slackness_exit_ok(tmp_path, capsys):
    epath, mpath, dpath = _write_example1(tmp_path)
    code, payload, _ = _run(
        capsys,
        [
            "verify",
            "--theorem",
            "1",
            "--ensemble",
            epath,
            "--measurement",
            mpath,
            "--dual",
            dpath,
        ],
    )
    assert code == 0
    report = payload["outputs"]["report"]
    assert report["check"] == "slackness"
    assert report["holds"] and report["certified"]
    assert report["p_sep"] == pytest.approx(2 / 3, abs=1e-9)


def test_verify_gap_exit_ok(tmp_path, capsys):
    epath, mpath, _ = _write_example1(tmp_path)
    code, payload, _ = _run(
        capsys,
        ["verify", "--theorem", "3", "--ensemble", epath, "--measurement", mpath],
    )
    assert code == 0
    report = payload["outputs"]["report"]
    assert report["gap_certified"]
    assert report["details"]["cross_check_ok"]


def test_verify_equality_exit_ok(tmp_path, capsys):
    ensemble, _ = example2(2, 2)
    acc = sum(ensemble.weighted(i).entries for i in range(ensemble.n))
    dual = HermitianOperator(ensemble.dims, hermitize(acc))
    epath = tmp_path / "e2.ensemble.json"
    dpath = tmp_path / "e2.dual.json"
    write_json(epath, ensemble_to_payload(ensemble))
    write_json(dpath, operator_to_payload(dual))
    code, payload, _ = _run(
        capsys,
        [
            "verify",
            "--theorem",
            "4",
            "--ensemble",
            str(epath),
            "--dual",
            str(dpath),
            "--q-value",
            "1.0",
        ],
    )
    assert code == 0
    report = payload["outputs"]["report"]
    assert report["check"] == "equality"
    assert report["p_sep"] == 1.0


def test_verify_dominance_holds_and_refuted(tmp_path, capsys):
    code, payload, _ = _run(
        capsys,
        ["gen", "example3", "--m", "2", "--d", "2", "--out", str(tmp_path / "e3")],
    )
    assert code == 0
    epath = str(tmp_path / "e3.ensemble.json")
    code, payload, _ = _run(capsys, ["verify", "--theorem", "c1", "--ensemble", epath])
    assert code == 0
    assert payload["outputs"]["report"]["p_sep"] == 0.5
    code, payload, _ = _run(capsys, ["verify", "--theorem", "c2", "--ensemble", epath])
    assert code == 0
    assert payload["outputs"]["report"]["gap_certified"]

    e1path, _, _ = _write_example1(tmp_path)
    code, payload, _ = _run(capsys, ["verify", "--theorem", "c1", "--ensemble", e1path])
    assert code == 1
    assert not payload["outputs"]["report"]["holds"]


def test_verify_inconclusive_exit(tmp_path, capsys):
    # witness with diagonal noise: block positive only heuristically, so the
    # dominance verdict holds without certification
    dims = Dims((2, 2))
    phi = ghz_state(2, 2, 0)
    noise = np.diag([0.03, 0.05, 0.02, 0.04])
    witness = HermitianOperator(
        dims, np.eye(4) + noise - 2.0 * phi.to_density().entries
    )
    ensemble = construct_two_state(witness, 2.0 * phi.to_density(), seed=0)
    epath = tmp_path / "noisy.ensemble.json"
    write_json(epath, ensemble_to_payload(ensemble))
    code, payload, _ = _run(
        capsys, ["verify", "--theorem", "c1", "--ensemble", str(epath)]
    )
    assert code == 2
    report = payload["outputs"]["report"]
    assert report["holds"]
    assert not report["certified"]


def test_verify_missing_flag_usage_error(tmp_path, capsys):
    epath, _, _ = _write_example1(tmp_path)
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--theorem", "1", "--ensemble", epath])
    assert exc.value.code == 2


def test_construct_two_state_cli(tmp_path, capsys):
    dims = Dims((2, 2))
    phi = ghz_state(2, 2, 0)
    witness = HermitianOperator.identity(dims) - 2.0 * phi.to_density()
    wpath = tmp_path / "w.json"
    ppath = tmp_path / "p.json"
    write_json(wpath, operator_to_payload(witness))
    write_json(ppath, operator_to_payload(2.0 * phi.to_density()))
    out = str(tmp_path / "built")
    code, payload, _ = _run(
        capsys,
        [
            "construct",
            "two-state",
            "--witness",
            str(wpath),
            "--p-op",
            str(ppath),
            "--out",
            out,
        ],
    )
    assert code == 0
    raw = read_json(out + ".ensemble.json")
    validate_payload(raw, "ensemble")
    assert payload["outputs"]["report"]["gap_certified"]
    assert raw["states"][0]["eta"] == pytest.approx(2 / 3, abs=1e-9)


def test_construct_rejects_non_witness(tmp_path, capsys):
    dims = Dims((2, 2))
    eye = HermitianOperator.identity(dims)
    wpath = tmp_path / "notw.json"
    ppath = tmp_path / "p.json"
    write_json(wpath, operator_to_payload(eye))
    write_json(ppath, operator_to_payload(eye))
    code, _, captured = _run(
        capsys,
        [
            "construct",
            "two-state",
            "--witness",
            str(wpath),
            "--p-op",
            str(ppath),
            "--out",
            str(tmp_path / "x"),
        ],
    )
    assert code == 70
    assert "error:" in captured.err


def test_reproduce_json_all_ok(capsys):
    code, payload, _ = _run(
        capsys, ["reproduce", "example3", "--pairs", "2,2", "--format", "json"]
    )
    assert code == 0
    validate_payload(payload, "run_report")
    assert payload["outputs"]["all_ok"]
    assert all(r["ok"] for r in payload["outputs"]["rows"])


def test_reproduce_table_format(capsys):
    code, payload, captured = _run(
        capsys, ["reproduce", "example3", "--pairs", "2,2", "--format", "table"]
    )
    assert code == 0
    assert payload is None
    assert "0 failed" in captured.out


def test_reproduce_deterministic_modulo_timing(capsys):
    argv = ["reproduce", "example3", "--pairs", "2,2", "--format", "json"]
    _, first, _ = _run(capsys, argv)
    _, second, _ = _run(capsys, argv)
    first.pop("timing_seconds")
    second.pop("timing_seconds")
    assert first == second


def test_seed_resolution(tmp_path, capsys, monkeypatch):
    code, payload, _ = _run(
        capsys,
        ["gen", "example3", "--m", "2", "--d", "2", "--out", str(tmp_path / "a")],
    )
    assert payload["seed"] == 0
    monkeypatch.setenv("SEPDISC_SEED", "7")
    code, payload, _ = _run(
        capsys,
        ["gen", "example3", "--m", "2", "--d", "2", "--out", str(tmp_path / "b")],
    )
    assert payload["seed"] == 7
    code, payload, _ = _run(
        capsys,
        [
            "gen",
            "example3",
            "--m",
            "2",
            "--d",
            "2",
            "--out",
            str(tmp_path / "c"),
            "--seed",
            "3",
        ],
    )
    assert payload["seed"] == 3


def test_runtime_errors_exit_70(tmp_path, capsys):
    code, _, captured = _run(
        capsys, ["solve", "--ensemble", str(tmp_path / "missing.json")]
    )
    assert code == 70
    assert "error:" in captured.err

    bad = tmp_path / "bad.json"
    bad.write_text('{"states": []}\n')
    code, _, captured = _run(capsys, ["solve", "--ensemble", str(bad)])
    assert code == 70

    notjson = tmp_path / "notjson.json"
    notjson.write_text("not json at all\n")
    code, _, captured = _run(capsys, ["solve", "--ensemble", str(notjson)])
    assert code == 70


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
