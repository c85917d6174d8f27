"""End-to-end acceptance run, one test per release criterion.

pytest -v prints one PASSED/FAILED line per criterion; each test also
prints an explicit "PASS criterion N" line with the measured values so a
captured log shows the numbers behind the verdicts.
"""

import time

import numpy as np

from helpers import random_density, random_hermitian, random_state, random_two_state_ensemble
from sepdisc import (
    Dims,
    Ensemble,
    HermitianOperator,
    analyze_dual,
    certify_dominance_gap,
    certify_slackness,
    certify_strict_gap,
    check_optimality,
    check_pivot_dominance,
    construct_n_state,
    construct_two_state,
    decide_block_positivity,
    detect_ew,
    example1,
    example2,
    example3,
    ghz_state,
    helstrom_two_state,
    max_product_overlap,
    min_product_expectation,
    partial_transpose,
    solve_pg_iterative,
    success_probability,
    trace_inner,
    trace_nonneg_check,
    verify_equality_certificate,
)
from sepdisc import kernels
from sepdisc.operators import hermitize

PAIRS_SMALL = [(2, 2), (3, 2), (2, 3)]
# every (m, d) with m >= 2, d >= 2, d^m <= 81
PAIRS_81 = [
    (2, 2), (3, 2), (4, 2), (5, 2), (6, 2),
    (2, 3), (3, 3), (4, 3),
    (2, 4), (3, 4),
    (2, 5), (2, 6), (2, 7), (2, 8), (2, 9),
]


def _report(criterion, failures, detail):
    ok = not failures
    line = "%s criterion %d: %s" % ("PASS" if ok else "FAIL", criterion, detail)
    if failures:
        line += " | failures: " + "; ".join(failures)
    print(line)
    assert ok, line


def _pairing_dual(ensemble, measurement):
    acc = sum(
        ensemble.weighted(i).entries @ el.entries
        for i, el in enumerate(measurement.elements)
    )
    return HermitianOperator(ensemble.dims, hermitize(acc))


def test_criterion_01_separable_optimum_of_gap_family():
    failures = []
    values = []
    for m, d in PAIRS_SMALL:
        started = time.perf_counter()
        ensemble, measurement = example1(m, d)
        total = d**m
        p = success_probability(ensemble, measurement)
        expected = total / (total + d)
        values.append(p)
        if abs(p - expected) > 1e-9:
            failures.append("(%d,%d) p_sep %.12f vs %.12f" % (m, d, p, expected))
        report = certify_strict_gap(ensemble, measurement, seed=0)
        if not (report.holds and report.certified and report.gap_certified):
            failures.append("(%d,%d) gap not certified" % (m, d))
        dual = _pairing_dual(ensemble, measurement)
        phi = ghz_state(m, d, 0).to_density()
        defect = trace_inner(dual - ensemble.weighted(ensemble.n - 1), phi)
        expected_defect = -(d - 1) / (total + d)
        if abs(defect - expected_defect) > 1e-9:
            failures.append(
                "(%d,%d) defect %.12f vs %.12f" % (m, d, defect, expected_defect)
            )
        elapsed = time.perf_counter() - started
        if elapsed >= 10.0:
            failures.append("(%d,%d) took %.1f s" % (m, d, elapsed))
    _report(1, failures, "p_sep values %s" % ", ".join("%.9f" % v for v in values))


def test_criterion_02_global_strictly_beats_separable():
    failures = []
    margins = []
    for m, d in PAIRS_SMALL:
        ensemble, measurement = example1(m, d)
        p_sep = success_probability(ensemble, measurement)
        result = solve_pg_iterative(ensemble)
        margins.append(result.p_value - p_sep)
        if result.p_value < p_sep + 1e-3:
            failures.append(
                "(%d,%d) p_g %.9f p_sep %.9f" % (m, d, result.p_value, p_sep)
            )
    _report(2, failures, "margins %s" % ", ".join("%.6f" % v for v in margins))


def test_criterion_03_perfect_family_and_blends():
    failures = []
    for m, d in PAIRS_SMALL:
        ensemble, measurement = example2(m, d)
        total = d**m
        p = success_probability(ensemble, measurement)
        if abs(p - 1.0) > 1e-10:
            failures.append("(%d,%d) p %.12f" % (m, d, p))
        acc = sum(ensemble.weighted(i).entries for i in range(ensemble.n))
        dual = HermitianOperator(ensemble.dims, hermitize(acc))
        slack = certify_slackness(ensemble, measurement, dual, seed=0)
        if not (slack.holds and abs(dual.trace() - 1.0) <= 1e-9):
            failures.append("(%d,%d) slackness fails" % (m, d))
        equality = verify_equality_certificate(ensemble, dual, 1.0, seed=0)
        if not equality.holds:
            failures.append("(%d,%d) equality fails" % (m, d))
        phi = ghz_state(m, d, 0).to_density()
        eye = HermitianOperator.identity(ensemble.dims)
        for t in (0.0, 0.5):
            blend = t * dual + (1.0 - t) / total * eye
            if abs(blend.trace() - 1.0) > 1e-9:
                failures.append("(%d,%d) t=%.1f trace" % (m, d, t))
            analysis = analyze_dual(ensemble, blend, seed=0)
            if not (analysis.witnessed and 0 in analysis.ew_indices):
                failures.append("(%d,%d) t=%.1f not witnessed" % (m, d, t))
            defect = trace_inner(blend - ensemble.weighted(0), phi)
            expected = -(1.0 - t) * (d - 1) / total
            if abs(defect - expected) > 1e-9:
                failures.append(
                    "(%d,%d) t=%.1f defect %.12f vs %.12f" % (m, d, t, defect, expected)
                )
    _report(3, failures, "p = 1, equality and blend defects hold on all pairs")


def test_criterion_04_dominance_family():
    failures = []
    expected_defects = {(2, 2): -1 / 8, (3, 2): -1 / 24, (2, 3): -1 / 9}
    for m, d in PAIRS_SMALL:
        ensemble = example3(m, d)
        total = d**m
        dominance = check_pivot_dominance(ensemble, pivot=0, seed=0)
        if not (dominance.holds and dominance.certified):
            failures.append("(%d,%d) dominance fails" % (m, d))
        if dominance.p_sep != 0.5:
            failures.append("(%d,%d) p_sep %r" % (m, d, dominance.p_sep))
        gap = certify_dominance_gap(ensemble, pivot=0, seed=0)
        if not (gap.holds and gap.certified and gap.gap_certified):
            failures.append("(%d,%d) gap fails" % (m, d))
        expected = -((d - 1) ** 2) / (2 * d * (total - d))
        if abs(expected - expected_defects[(m, d)]) > 1e-15:
            failures.append("(%d,%d) formula vs literal" % (m, d))
        defects = gap.details["defects"]
        if len(defects) != ensemble.n - 1 or any(
            abs(v - expected) > 1e-9 for v in defects
        ):
            failures.append("(%d,%d) defects %r" % (m, d, defects))
    _report(4, failures, "p_sep = 1/2 with defects -1/8, -1/24, -1/9")


def test_criterion_05_solver_matches_closed_form():
    failures = []
    worst = 0.0
    count = 0
    for dims in [Dims((2, 1)), Dims((2, 2))]:
        rng = np.random.default_rng(dims.total)
        for _ in range(50):
            ensemble = random_two_state_ensemble(rng, dims)
            closed = helstrom_two_state(ensemble)
            iterated = solve_pg_iterative(ensemble)
            gap = abs(iterated.p_value - closed.p_value)
            worst = max(worst, gap)
            count += 1
            if gap > 1e-6:
                failures.append("case %d gap %.2e" % (count, gap))
            if min(iterated.residual_min_eigs) < -1e-8:
                failures.append("case %d residual" % count)
    _report(5, failures, "%d ensembles, worst |p - p_closed| = %.2e" % (count, worst))


def test_criterion_06_convergence_implies_optimality():
    failures = []
    rng = np.random.default_rng(99)
    checked = 0
    cases = []
    for _ in range(15):
        cases.append(random_two_state_ensemble(rng, Dims((2, 2))))
    for n in (3, 4):
        for _ in range(5):
            etas = rng.dirichlet(np.ones(n))
            cases.append(
                Ensemble(
                    [(float(e), random_density(rng, Dims((2, 2)))) for e in etas]
                )
            )
    cases.append(example1(2, 2)[0])
    cases.append(example2(2, 2)[0])
    for i, ensemble in enumerate(cases):
        result = solve_pg_iterative(ensemble)
        if not result.converged:
            continue
        checked += 1
        residuals = check_optimality(ensemble, result.measurement)
        if min(residuals) < -1e-8:
            failures.append("case %d residual %.2e" % (i, min(residuals)))
    _report(
        6, failures, "%d converged runs, all residuals >= -1e-8" % checked
    )


def test_criterion_07_product_overlap_engine():
    failures = []
    for m, d in PAIRS_81:
        dims = Dims((d,) * m)
        for j in range(d):
            overlap = max_product_overlap(ghz_state(m, d, j), restarts=16, seed=0)
            if abs(overlap - 1.0 / d) > 1e-7:
                failures.append("(%d,%d) j=%d overlap %.9f" % (m, d, j, overlap))
        witness = HermitianOperator.identity(dims) - float(d) * ghz_state(
            m, d, 0
        ).to_density()
        verdict = min_product_expectation(witness, restarts=16, seed=0)
        if verdict.min_value < -1e-7 or verdict.min_value > 1e-7:
            failures.append("(%d,%d) min expectation %.2e" % (m, d, verdict.min_value))
    _report(7, failures, "overlap = 1/d and witness floor = 0 on %d pairs" % len(PAIRS_81))


def test_criterion_08_witness_detection():
    failures = []
    for m, d in PAIRS_81:
        dims = Dims((d,) * m)
        witness = HermitianOperator.identity(dims) - float(d) * ghz_state(
            m, d, 0
        ).to_density()
        verdict = detect_ew(witness, restarts=16, seed=0)
        if not verdict.is_ew:
            failures.append("(%d,%d) not flagged" % (m, d))
            continue
        psi = verdict.violating_state
        expectation = float(
            np.real(psi.amplitudes.conj() @ witness.entries @ psi.amplitudes)
        )
        if expectation >= 0:
            failures.append("(%d,%d) violation %.2e" % (m, d, expectation))
    swap = np.zeros((4, 4), dtype=complex)
    for a in range(2):
        for b in range(2):
            swap[2 * a + b, 2 * b + a] = 1.0
    verdict = detect_ew(HermitianOperator(Dims((2, 2)), swap), restarts=16, seed=0)
    if not verdict.is_ew or verdict.min_eigenvalue > -0.5:
        failures.append("swap not flagged")
    rng = np.random.default_rng(8)
    rejected = 0
    for k in range(50):
        dims = Dims((2, 2)) if k % 2 == 0 else Dims((2, 3))
        scale = float(rng.uniform(0.1, 3.0))
        psd = HermitianOperator(dims, scale * random_density(rng, dims).entries)
        verdict = detect_ew(psd, restarts=4, seed=0)
        if verdict.is_ew:
            failures.append("psd case %d flagged" % k)
        else:
            rejected += 1
    _report(
        8,
        failures,
        "%d witness pairs + swap flagged, %d/50 psd inputs rejected"
        % (len(PAIRS_81), rejected),
    )


def test_criterion_09_constructors_certify_their_gap():
    failures = []
    built = 0
    for m, d in PAIRS_SMALL:
        dims = Dims((d,) * m)
        phis = [ghz_state(m, d, j) for j in range(3)]
        witnesses = [
            HermitianOperator.identity(dims) - float(d) * phi.to_density()
            for phi in phis
        ]
        ensembles = [
            (construct_two_state(witnesses[0], float(d) * phis[0].to_density(), seed=0), [witnesses[0]]),
            (construct_n_state([witnesses[1]], seed=0), [witnesses[1]]),
            (construct_n_state(witnesses[1:3], seed=0), witnesses[1:3]),
        ]
        for ensemble, ws in ensembles:
            built += 1
            if abs(sum(ensemble.etas) - 1.0) > 1e-10:
                failures.append("(%d,%d) priors" % (m, d))
            for i, w in enumerate(ws):
                diff = ensemble.weighted(0) - ensemble.weighted(i + 1)
                scale = trace_inner(diff, w) / trace_inner(w, w)
                resid = float(np.linalg.norm(diff.entries - scale * w.entries))
                if resid > 1e-9 or scale <= 0:
                    failures.append("(%d,%d) proportionality %.2e" % (m, d, resid))
            report = certify_dominance_gap(ensemble, pivot=0, seed=0)
            if not (report.holds and report.certified and report.gap_certified):
                failures.append("(%d,%d) gap not certified" % (m, d))
    _report(9, failures, "%d constructed ensembles all certify the gap" % built)


def test_criterion_10_randomized_property_suite():
    started = time.perf_counter()
    failures = []
    kern = kernels.active()
    rng = np.random.default_rng(1234)
    dims_cycle = [Dims((2, 2)), Dims((3, 2)), Dims((2, 3))]
    cases = 0

    def random_locals(dims):
        return [
            (lambda v: v / np.linalg.norm(v))(
                rng.standard_normal(d) + 1j * rng.standard_normal(d)
            )
            for d in dims
        ]

    for k in range(250):
        dims = dims_cycle[k % 3]
        op = random_hermitian(rng, dims)
        _, _, _, trace = kern.min_sweep(
            op.entries, dims.sizes, random_locals(dims), 40, 0.0
        )
        if np.diff(trace).max(initial=0.0) > 1e-12:
            failures.append("min_sweep %d not monotone" % k)
        cases += 1

    for k in range(250):
        dims = dims_cycle[k % 3]
        psi = random_state(rng, dims)
        _, _, _, trace = kern.overlap_sweep(
            psi.amplitudes, dims.sizes, random_locals(dims), 40, 0.0
        )
        if np.diff(trace).min(initial=0.0) < -1e-12:
            failures.append("overlap_sweep %d not monotone" % k)
        cases += 1

    for k in range(150):
        n = 2 + k % 2
        etas = rng.dirichlet(np.ones(n))
        ensemble = Ensemble(
            [(float(e), random_density(rng, Dims((2, 2)))) for e in etas]
        )
        result = solve_pg_iterative(ensemble, max_iters=3, tol=1e-15)
        total = sum(el.entries for el in result.measurement.elements)
        if np.abs(total - np.eye(4)).max() > 1e-9:
            failures.append("completeness %d" % k)
        cases += 1

    for k in range(150):
        dims = dims_cycle[k % 3]
        a = random_hermitian(rng, dims)
        b = random_hermitian(rng, dims)
        if abs(trace_inner(a, b) - trace_inner(b, a)) > 1e-10:
            failures.append("trace_inner %d" % k)
        cases += 1

    for k in range(100):
        dims = dims_cycle[k % 3]
        op = random_hermitian(rng, dims)
        party = k % 2
        back = partial_transpose(partial_transpose(op, party), party)
        if np.abs(back.entries - op.entries).max() > 1e-12:
            failures.append("pt involution %d" % k)
        if abs(back.trace() - op.trace()) > 1e-12:
            failures.append("pt trace %d" % k)
        cases += 1

    for k in range(100):
        dims = dims_cycle[k % 3]
        scale = float(rng.uniform(0.1, 2.0))
        op = HermitianOperator(dims, scale * random_density(rng, dims).entries)
        verdict, _, _ = decide_block_positivity(op, restarts=2, max_iters=15, seed=k)
        if verdict.status == "VIOLATED":
            failures.append("psd violated %d" % k)
        elif not trace_nonneg_check(op, verdict):
            failures.append("trace check %d" % k)
        cases += 1

    elapsed = time.perf_counter() - started
    if cases != 1000:
        failures.append("only %d cases" % cases)
    if elapsed >= 60.0:
        failures.append("took %.1f s" % elapsed)
    _report(10, failures, "%d cases in %.1f s" % (cases, elapsed))
