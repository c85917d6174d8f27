"""Command-line front end.

Subcommands: gen (write reference ensembles), solve (fixed-point global
optimum), verify (the five separability checks), construct (witness-based
nonlocal ensembles), reproduce (compare every reference value against its
closed form). Every JSON output is wrapped in a run report that validates
against the shipped schemas.

Exit codes: 0 success (verify: holds and certified), 1 check failed
(verify: does not hold; reproduce: some row off), 2 inconclusive (verify:
holds but rests on heuristic non-refutation; also argparse usage errors),
70 runtime failure (bad input files, precondition violations).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import jsonschema
import numpy as np

from . import __version__
from .discrimination import solve_pg_iterative, success_probability
from .ensembles import (
    Ensemble,
    Measurement,
    construct_n_state,
    construct_two_state,
    example1,
    example2,
    example3,
)
from .errors import SepdiscError
from .operators import Dims, HermitianOperator, ghz_state, trace_inner
from .sep_bounds import (
    analyze_dual,
    certify_dominance_gap,
    certify_slackness,
    certify_strict_gap,
    check_pivot_dominance,
    verify_equality_certificate,
)
from .serialize import (
    _plain,
    dual_analysis_to_payload,
    discrimination_result_to_payload,
    ensemble_from_payload,
    ensemble_to_payload,
    measurement_from_payload,
    measurement_to_payload,
    operator_from_payload,
    read_json,
    validate_payload,
    verification_report_to_payload,
    write_json,
)

EXIT_OK = 0
EXIT_NOT_HOLDS = 1
EXIT_INCONCLUSIVE = 2
EXIT_RUNTIME = 70

GEN_EXAMPLES = {"example1": example1, "example2": example2, "example3": example3}
DEFAULT_PAIRS = ["2,2", "3,2", "2,3"]


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("SEPDISC_SEED")
    if env is not None:
        return int(env)
    return 0


def _emit_report(argv, seed, started, inputs, outputs) -> None:
    payload = {
        "command": ["sepdisc"] + list(argv),
        "version": __version__,
        "seed": seed,
        "timing_seconds": time.perf_counter() - started,
        "inputs": _plain(inputs),
        "outputs": _plain(outputs),
    }
    validate_payload(payload, "run_report")
    json.dump(payload, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _load_ensemble(path) -> Ensemble:
    raw = read_json(path)
    validate_payload(raw, "ensemble")
    return ensemble_from_payload(raw)


def _load_measurement(path) -> Measurement:
    raw = read_json(path)
    validate_payload(raw, "measurement")
    return measurement_from_payload(raw)


def _load_operator(path) -> HermitianOperator:
    raw = read_json(path)
    validate_payload(raw, "operator")
    return operator_from_payload(raw)


def _report_exit(report) -> int:
    if not report.holds:
        return EXIT_NOT_HOLDS
    return EXIT_OK if report.certified else EXIT_INCONCLUSIVE


def cmd_gen(args, argv) -> int:
    started = time.perf_counter()
    seed = _resolve_seed(args)
    build = GEN_EXAMPLES[args.example]
    built = build(args.m, args.d)
    if isinstance(built, tuple):
        ensemble, measurement = built
    else:
        ensemble, measurement = built, None
    prefix = args.out or "%s_m%d_d%d" % (args.example, args.m, args.d)
    ensemble_path = prefix + ".ensemble.json"
    payload = ensemble_to_payload(ensemble)
    validate_payload(payload, "ensemble")
    write_json(ensemble_path, payload)
    measurement_path = None
    n_elements = None
    if measurement is not None:
        measurement_path = prefix + ".measurement.json"
        payload = measurement_to_payload(measurement)
        validate_payload(payload, "measurement")
        write_json(measurement_path, payload)
        n_elements = measurement.n
    _emit_report(
        argv,
        seed,
        started,
        inputs={"example": args.example, "m": args.m, "d": args.d},
        outputs={
            "ensemble_path": ensemble_path,
            "n_states": ensemble.n,
            "measurement_path": measurement_path,
            "n_elements": n_elements,
        },
    )
    return EXIT_OK


def cmd_solve(args, argv) -> int:
    started = time.perf_counter()
    seed = _resolve_seed(args)
    ensemble = _load_ensemble(args.ensemble)
    result = solve_pg_iterative(ensemble, max_iters=args.max_iters, tol=args.tol)
    payload = discrimination_result_to_payload(result)
    validate_payload(payload, "discrimination_result")
    if args.out:
        write_json(args.out, payload)
    _emit_report(
        argv,
        seed,
        started,
        inputs={
            "ensemble": args.ensemble,
            "max_iters": args.max_iters,
            "tol": args.tol,
        },
        outputs={"result": payload, "result_path": args.out},
    )
    return EXIT_OK


def cmd_verify(args, argv, parser) -> int:
    started = time.perf_counter()
    seed = _resolve_seed(args)
    needs = {
        "1": ("measurement", "dual"),
        "2": ("measurement", "dual"),
        "3": ("measurement",),
        "4": ("dual", "q_value"),
        "c1": (),
        "c2": (),
    }[args.theorem]
    for name in needs:
        if getattr(args, name) is None:
            parser.error(
                "--theorem %s requires --%s" % (args.theorem, name.replace("_", "-"))
            )
    ensemble = _load_ensemble(args.ensemble)
    common = {"restarts": args.restarts, "tol": args.tol, "seed": seed}
    if args.theorem in ("1", "2"):
        measurement = _load_measurement(args.measurement)
        dual_op = _load_operator(args.dual)
        report = certify_slackness(ensemble, measurement, dual_op, **common)
    elif args.theorem == "3":
        measurement = _load_measurement(args.measurement)
        report = certify_strict_gap(
            ensemble, measurement, solver_max_iters=args.max_iters, **common
        )
    elif args.theorem == "4":
        dual_op = _load_operator(args.dual)
        report = verify_equality_certificate(ensemble, dual_op, args.q_value, **common)
    elif args.theorem == "c1":
        report = check_pivot_dominance(ensemble, pivot=args.pivot, **common)
    else:
        report = certify_dominance_gap(ensemble, pivot=args.pivot, **common)
    payload = verification_report_to_payload(report)
    validate_payload(payload, "verification_report")
    _emit_report(
        argv,
        seed,
        started,
        inputs={
            "theorem": args.theorem,
            "ensemble": args.ensemble,
            "measurement": args.measurement,
            "dual": args.dual,
            "q_value": args.q_value,
            "pivot": args.pivot,
            "restarts": args.restarts,
            "tol": args.tol,
        },
        outputs={"report": payload},
    )
    return _report_exit(report)


def cmd_construct(args, argv, parser) -> int:
    started = time.perf_counter()
    seed = _resolve_seed(args)
    validate = not args.skip_witness_validation
    witnesses = [_load_operator(p) for p in args.witness]
    if args.kind == "two-state":
        if len(witnesses) != 1:
            parser.error("two-state takes exactly one --witness")
        if args.p_op is None:
            parser.error("two-state requires --p-op")
        p_op = _load_operator(args.p_op)
        ensemble = construct_two_state(
            witnesses[0],
            p_op,
            restarts=args.restarts,
            seed=seed,
            validate_witness=validate,
        )
    else:
        lambdas = None
        if args.lambdas != "auto":
            lambdas = [float(x) for x in args.lambdas.split(",")]
        ensemble = construct_n_state(
            witnesses,
            lambdas=lambdas,
            restarts=args.restarts,
            seed=seed,
            validate_witness=validate,
        )
    ensemble_path = args.out + ".ensemble.json"
    payload = ensemble_to_payload(ensemble)
    validate_payload(payload, "ensemble")
    write_json(ensemble_path, payload)
    report = certify_dominance_gap(
        ensemble, pivot=0, restarts=args.restarts, tol=args.tol, seed=seed
    )
    report_payload = verification_report_to_payload(report)
    validate_payload(report_payload, "verification_report")
    _emit_report(
        argv,
        seed,
        started,
        inputs={
            "kind": args.kind,
            "witness": list(args.witness),
            "p_op": args.p_op,
            "lambdas": args.lambdas,
            "restarts": args.restarts,
        },
        outputs={"ensemble_path": ensemble_path, "report": report_payload},
    )
    return _report_exit(report)


def _parse_pairs(raw_pairs) -> list[tuple[int, int]]:
    pairs = []
    for raw in raw_pairs:
        parts = raw.split(",")
        if len(parts) != 2:
            raise SepdiscError("bad pair %r, expected m,d" % raw)
        pairs.append((int(parts[0]), int(parts[1])))
    return pairs


def _row(scope, m, d, check, computed, expected, ok) -> dict:
    return {
        "scope": scope,
        "m": m,
        "d": d,
        "check": check,
        "computed": computed,
        "expected": expected,
        "ok": bool(ok),
    }


def _ghz_witness(dims: Dims, d: int, j: int) -> HermitianOperator:
    phi = ghz_state(dims.m, d, j)
    return HermitianOperator.identity(dims) - float(d) * phi.to_density()


def _reproduce_example1(m, d, restarts, seed) -> list[dict]:
    ensemble, measurement = example1(m, d)
    total = d**m
    expected_p = total / (total + d)
    report = certify_strict_gap(
        ensemble, measurement, restarts=restarts, seed=seed, cross_check=True
    )
    p = success_probability(ensemble, measurement)
    rows = [
        _row("example1", m, d, "p_sep", p, expected_p, abs(p - expected_p) <= 1e-9),
        _row(
            "example1",
            m,
            d,
            "gap_certified",
            report.holds and report.certified,
            True,
            report.holds and report.certified and report.gap_certified,
        ),
    ]
    acc = sum(
        ensemble.weighted(i).entries @ el.entries
        for i, el in enumerate(measurement.elements)
    )
    dual_op = HermitianOperator(ensemble.dims, (acc + acc.conj().T) / 2.0)
    phi = ghz_state(m, d, 0).to_density()
    defect = trace_inner(dual_op - ensemble.weighted(ensemble.n - 1), phi)
    expected_defect = -(d - 1) / (total + d)
    rows.append(
        _row(
            "example1",
            m,
            d,
            "ew_defect",
            defect,
            expected_defect,
            abs(defect - expected_defect) <= 1e-9,
        )
    )
    margin = report.details.get("p_g_margin", float("nan"))
    rows.append(
        _row("example1", m, d, "p_g_margin", margin, ">= 1e-3", margin >= 1e-3)
    )
    return rows


def _reproduce_example2(m, d, restarts, seed) -> list[dict]:
    ensemble, measurement = example2(m, d)
    total = d**m
    p = success_probability(ensemble, measurement)
    rows = [_row("example2", m, d, "p_success", p, 1.0, abs(p - 1.0) <= 1e-10)]
    acc = sum(ensemble.weighted(i).entries for i in range(ensemble.n))
    dual_op = HermitianOperator(ensemble.dims, (acc + acc.conj().T) / 2.0)
    slack = certify_slackness(
        ensemble, measurement, dual_op, restarts=restarts, seed=seed
    )
    rows.append(
        _row(
            "example2",
            m,
            d,
            "slackness",
            slack.holds and slack.certified,
            True,
            slack.holds and slack.certified,
        )
    )
    rows.append(
        _row(
            "example2",
            m,
            d,
            "trace_dual",
            dual_op.trace(),
            1.0,
            abs(dual_op.trace() - 1.0) <= 1e-9,
        )
    )
    equality = verify_equality_certificate(
        ensemble, dual_op, 1.0, restarts=restarts, seed=seed
    )
    rows.append(
        _row("example2", m, d, "equality", equality.holds, True, equality.holds)
    )
    phi = ghz_state(m, d, 0).to_density()
    eye = HermitianOperator.identity(ensemble.dims)
    for t in (0.0, 0.5):
        blended = t * dual_op + (1.0 - t) / total * eye
        analysis = analyze_dual(ensemble, blended, restarts=restarts, seed=seed)
        witnessed = analysis.witnessed and 0 in analysis.ew_indices
        rows.append(
            _row(
                "example2",
                m,
                d,
                "blend_t%.1f_witnessed" % t,
                witnessed,
                True,
                witnessed,
            )
        )
        defect = trace_inner(blended - ensemble.weighted(0), phi)
        expected_defect = -(1.0 - t) * (d - 1) / total
        rows.append(
            _row(
                "example2",
                m,
                d,
                "blend_t%.1f_defect" % t,
                defect,
                expected_defect,
                abs(defect - expected_defect) <= 1e-9,
            )
        )
        rows.append(
            _row(
                "example2",
                m,
                d,
                "blend_t%.1f_trace" % t,
                blended.trace(),
                1.0,
                abs(blended.trace() - 1.0) <= 1e-9,
            )
        )
    return rows


def _reproduce_example3(m, d, restarts, seed) -> list[dict]:
    ensemble = example3(m, d)
    total = d**m
    dominance = check_pivot_dominance(ensemble, pivot=0, restarts=restarts, seed=seed)
    rows = [
        _row(
            "example3",
            m,
            d,
            "dominance",
            dominance.holds and dominance.certified,
            True,
            dominance.holds and dominance.certified,
        ),
        _row(
            "example3",
            m,
            d,
            "p_sep",
            dominance.p_sep,
            0.5,
            dominance.p_sep == 0.5,
        ),
    ]
    gap = certify_dominance_gap(ensemble, pivot=0, restarts=restarts, seed=seed)
    rows.append(
        _row(
            "example3",
            m,
            d,
            "gap_certified",
            gap.holds and gap.certified,
            True,
            gap.holds and gap.certified and gap.gap_certified,
        )
    )
    expected_defect = -((d - 1) ** 2) / (2.0 * d * (total - d))
    defects = gap.details["defects"]
    ok = len(defects) == ensemble.n - 1 and all(
        abs(v - expected_defect) <= 1e-9 for v in defects
    )
    rows.append(
        _row(
            "example3",
            m,
            d,
            "ew_defects",
            defects,
            expected_defect,
            ok,
        )
    )
    return rows


def _proportionality_residual(diff: HermitianOperator, w: HermitianOperator) -> float:
    scale = trace_inner(diff, w) / trace_inner(w, w)
    return float(np.linalg.norm(diff.entries - scale * w.entries))


def _reproduce_constructions(m, d, restarts, seed) -> list[dict]:
    dims = Dims.of((d,) * m)
    total = dims.total
    phi = ghz_state(m, d, 0)
    w0 = _ghz_witness(dims, d, 0)
    p_op = float(d) * phi.to_density()
    two = construct_two_state(w0, p_op, restarts=restarts, seed=seed)
    expected_eta = total / (total + d)
    eta0 = float(two.states[0][0])
    rows = [
        _row(
            "construct2",
            m,
            d,
            "eta_pivot",
            eta0,
            expected_eta,
            abs(eta0 - expected_eta) <= 1e-9,
        )
    ]
    resid = _proportionality_residual(two.weighted(0) - two.weighted(1), w0)
    rows.append(
        _row("construct2", m, d, "proportionality", resid, 0.0, resid <= 1e-9)
    )
    report = certify_dominance_gap(two, pivot=0, restarts=restarts, seed=seed)
    rows.append(
        _row(
            "construct2",
            m,
            d,
            "gap_certified",
            report.holds and report.certified,
            True,
            report.holds and report.certified,
        )
    )
    witnesses = [_ghz_witness(dims, d, 1), _ghz_witness(dims, d, 2)]
    multi = construct_n_state(witnesses, restarts=restarts, seed=seed)
    resids = [
        _proportionality_residual(multi.weighted(0) - multi.weighted(i + 1), w)
        for i, w in enumerate(witnesses)
    ]
    rows.append(
        _row(
            "constructN",
            m,
            d,
            "proportionality",
            max(resids),
            0.0,
            max(resids) <= 1e-9,
        )
    )
    report = certify_dominance_gap(multi, pivot=0, restarts=restarts, seed=seed)
    rows.append(
        _row(
            "constructN",
            m,
            d,
            "gap_certified",
            report.holds and report.certified,
            True,
            report.holds and report.certified,
        )
    )
    return rows


REPRODUCERS = {
    "example1": _reproduce_example1,
    "example2": _reproduce_example2,
    "example3": _reproduce_example3,
    "constructions": _reproduce_constructions,
}


def _print_table(rows) -> None:
    header = ("scope", "m", "d", "check", "computed", "expected", "ok")
    widths = [11, 2, 2, 22, 24, 24, 4]
    line = "  ".join("%-*s" % (w, h) for w, h in zip(widths, header))
    print(line)
    print("-" * len(line))
    for r in rows:
        cells = (
            r["scope"],
            r["m"],
            r["d"],
            r["check"],
            _cell(r["computed"]),
            _cell(r["expected"]),
            "ok" if r["ok"] else "FAIL",
        )
        print("  ".join("%-*s" % (w, c) for w, c in zip(widths, cells)))


def _cell(value) -> str:
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, float):
        return "%.12g" % value
    if isinstance(value, list):
        return "[" + ", ".join("%.6g" % v for v in value) + "]"
    return str(value)


def cmd_reproduce(args, argv) -> int:
    started = time.perf_counter()
    seed = _resolve_seed(args)
    pairs = _parse_pairs(args.pairs)
    scopes = list(REPRODUCERS) if args.scope == "all" else [args.scope]
    rows = []
    for scope in scopes:
        for m, d in pairs:
            rows.extend(REPRODUCERS[scope](m, d, args.restarts, seed))
    all_ok = all(r["ok"] for r in rows)
    if args.format == "table":
        _print_table(rows)
        print("%d checks, %d failed" % (len(rows), sum(not r["ok"] for r in rows)))
    else:
        _emit_report(
            argv,
            seed,
            started,
            inputs={
                "scope": args.scope,
                "pairs": ["%d,%d" % p for p in pairs],
                "restarts": args.restarts,
            },
            outputs={"rows": rows, "all_ok": all_ok},
        )
    return EXIT_OK if all_ok else EXIT_NOT_HOLDS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sepdisc",
        description="Multipartite state discrimination with separable measurements.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a reference ensemble to JSON files")
    p.add_argument("example", choices=sorted(GEN_EXAMPLES))
    p.add_argument("--m", type=int, required=True, help="number of parties")
    p.add_argument("--d", type=int, required=True, help="local dimension")
    p.add_argument("--out", help="output path prefix (default <example>_m<m>_d<d>)")
    p.add_argument("--seed", type=int)

    p = sub.add_parser("solve", help="globally optimal discrimination")
    p.add_argument("--ensemble", required=True)
    p.add_argument("--max-iters", type=int, default=5000)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--out", help="also write the result payload to this path")
    p.add_argument("--seed", type=int)

    p = sub.add_parser("verify", help="run one of the separability checks")
    p.add_argument(
        "--theorem",
        required=True,
        choices=["1", "2", "3", "4", "c1", "c2"],
        help="1/2 slackness pairing, 3 strict gap, 4 equality, c1 dominance, c2 dominance gap",
    )
    p.add_argument("--ensemble", required=True)
    p.add_argument("--measurement")
    p.add_argument("--dual", help="dual operator JSON (checks 1, 2, 4)")
    p.add_argument("--q-value", dest="q_value", type=float, help="claimed optimum (check 4)")
    p.add_argument("--pivot", type=int, default=0)
    p.add_argument("--restarts", type=int, default=64)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-iters", type=int, default=5000)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("construct", help="build an ensemble from witnesses")
    p.add_argument("kind", choices=["two-state", "n-state"])
    p.add_argument(
        "--witness", action="append", required=True, help="witness JSON, repeatable"
    )
    p.add_argument("--p-op", dest="p_op", help="PSD operator JSON (two-state)")
    p.add_argument("--lambdas", default="auto", help='"auto" or comma-separated weights')
    p.add_argument("--out", default="constructed", help="output path prefix")
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument(
        "--skip-witness-validation",
        action="store_true",
        help="trust the inputs to be witnesses (unsafe)",
    )
    p.add_argument("--seed", type=int)

    p = sub.add_parser("reproduce", help="check every reference value")
    p.add_argument(
        "scope",
        nargs="?",
        default="all",
        choices=["all"] + sorted(REPRODUCERS),
    )
    p.add_argument(
        "--pairs",
        nargs="+",
        default=DEFAULT_PAIRS,
        help="m,d pairs (default: 2,2 3,2 2,3)",
    )
    p.add_argument("--format", choices=["json", "table"], default="json")
    p.add_argument("--restarts", type=int, default=64)
    p.add_argument("--seed", type=int)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "gen":
            return cmd_gen(args, argv)
        if args.command == "solve":
            return cmd_solve(args, argv)
        if args.command == "verify":
            return cmd_verify(args, argv, parser)
        if args.command == "construct":
            return cmd_construct(args, argv, parser)
        return cmd_reproduce(args, argv)
    except (SepdiscError, OSError, json.JSONDecodeError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_RUNTIME
    except jsonschema.ValidationError as exc:
        print("error: invalid payload: %s" % exc.message, file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
