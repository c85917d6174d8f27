"""Separable-measurement bounds via dual operators and witness defects.

The separable optimum p_sep of an ensemble equals the minimum trace over
Hermitian H with every H - eta_i rho_i block positive (dual feasibility).
All checks here certify statements about p_sep by exhibiting or analyzing
such duals:

  slackness       a feasible dual paired with a measurement, zero slackness
  gap             a certified-separable measurement whose dual combination
                  contains an entanglement witness, forcing p_sep < p_g
  equality        a feasible dual with every difference PSD, forcing
                  p_sep = p_g
  dominance       always guessing one state is separably optimal
  dominance-gap   dominance plus a witness among the differences

Conclusions are flagged certified when every load-bearing block-positivity
verdict is exact (special form, found violation, or plain PSD); otherwise
they rest on heuristic non-refutation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .cones import (
    VIOLATED,
    BlockPositivityVerdict,
    decide_block_positivity,
)
from .discrimination import solve_pg_iterative, success_probability
from .ensembles import Ensemble, Measurement
from .errors import (
    CertificateMissingError,
    DimsMismatchError,
    PreconditionError,
    TraceMismatchError,
)
from .operators import HermitianOperator, hermitize, trace_inner

DEFAULT_RESTARTS = 64
DEFAULT_TOL = 1e-9
Q_MATCH_ATOL = 1e-9


@dataclass(frozen=True)
class DualAnalysis:
    """Block-positivity analysis of H - eta_i rho_i for every state.

    feasible means no difference had a certified violation; witnessed
    additionally requires some difference to be an entanglement witness
    (block positive with a negative eigenvalue). witnessed implies
    feasible by construction.
    """

    feasible: bool
    witnessed: bool
    ew_indices: tuple[int, ...]
    trace: float
    min_eigenvalues: tuple[float, ...]
    per_state: tuple[BlockPositivityVerdict, ...]
    exact: tuple[bool, ...]

    @property
    def certified(self) -> bool:
        return all(self.exact)


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one of the five checks.

    certified distinguishes exact conclusions from heuristic
    non-refutation; gap_certified asserts p_sep < p_g. p_sep, when
    present, is the certified separable optimum.
    """

    check: str
    holds: bool
    certified: bool
    p_sep: float | None
    gap_certified: bool
    details: dict = field(default_factory=dict)


def _verdict_summary(v: BlockPositivityVerdict) -> dict:
    return {"status": v.status, "min_value": v.min_value, "restarts_used": v.restarts_used}


def analyze_dual(
    ensemble: Ensemble,
    dual_op: HermitianOperator,
    restarts: int = DEFAULT_RESTARTS,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
) -> DualAnalysis:
    """Feasibility and witness content of a candidate dual operator."""
    if dual_op.dims.sizes != ensemble.dims.sizes:
        raise DimsMismatchError("dual operator lives on different dims")
    verdicts = []
    min_eigs = []
    exact = []
    for i in range(ensemble.n):
        diff = dual_op - ensemble.weighted(i)
        verdict, w_min, is_exact = decide_block_positivity(
            diff, restarts=restarts, tol=tol, seed=seed
        )
        verdicts.append(verdict)
        min_eigs.append(w_min)
        exact.append(is_exact)
    feasible = all(v.status != VIOLATED for v in verdicts)
    ew_indices = tuple(
        i
        for i, (v, w_min) in enumerate(zip(verdicts, min_eigs))
        if v.status != VIOLATED and w_min < -tol
    )
    witnessed = feasible and bool(ew_indices)
    return DualAnalysis(
        feasible,
        witnessed,
        ew_indices,
        dual_op.trace(),
        tuple(min_eigs),
        tuple(verdicts),
        tuple(exact),
    )


def certify_slackness(
    ensemble: Ensemble,
    measurement: Measurement,
    dual_op: HermitianOperator,
    restarts: int = DEFAULT_RESTARTS,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
) -> VerificationReport:
    """Pair a measurement with a feasible dual through zero slackness.

    When every Tr[M_i (H - eta_i rho_i)] vanishes and H is feasible, the
    measurement is separably optimal and p_sep = Tr H; the report also
    cross-checks Tr H against the measurement's success probability.
    The measurement must carry separable certificates, otherwise zero
    slackness pins down only the global problem.
    """
    if not measurement.is_separable_certified:
        raise CertificateMissingError(
            "slackness certification needs separable certificates"
        )
    if measurement.n != ensemble.n:
        raise PreconditionError(
            "%d outcomes for %d states" % (measurement.n, ensemble.n)
        )
    analysis = analyze_dual(ensemble, dual_op, restarts=restarts, tol=tol, seed=seed)
    slackness = [
        trace_inner(el, dual_op - ensemble.weighted(i))
        for i, el in enumerate(measurement.elements)
    ]
    slack_ok = all(abs(s) <= tol for s in slackness)
    p = success_probability(ensemble, measurement)
    trace_ok = abs(p - analysis.trace) <= tol
    holds = analysis.feasible and slack_ok and trace_ok
    return VerificationReport(
        check="slackness",
        holds=holds,
        certified=analysis.certified,
        p_sep=p if holds else None,
        gap_certified=False,
        details={
            "slackness": slackness,
            "trace": analysis.trace,
            "success_probability": p,
            "dual_feasible": analysis.feasible,
            "dual_witnessed": analysis.witnessed,
            "ew_indices": list(analysis.ew_indices),
            "min_eigenvalues": list(analysis.min_eigenvalues),
            "per_state": [_verdict_summary(v) for v in analysis.per_state],
        },
    )


def certify_strict_gap(
    ensemble: Ensemble,
    measurement: Measurement,
    restarts: int = DEFAULT_RESTARTS,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    cross_check: bool = True,
    solver_max_iters: int = 5000,
) -> VerificationReport:
    """Certify p_sep < p_g from a certified-separable measurement.

    Forms H = sum_i eta_i rho_i M_i; when H is feasible and some
    H - eta_i rho_i is an entanglement witness, the measurement is
    separably optimal (slackness is automatic) yet no global measurement
    can be this bad, so the gap is strict. A fixed-point solver estimate
    of p_g is attached as a diagnostic when cross_check is set.
    """
    if not measurement.is_separable_certified:
        raise CertificateMissingError("gap certification needs separable certificates")
    if measurement.n != ensemble.n:
        raise PreconditionError(
            "%d outcomes for %d states" % (measurement.n, ensemble.n)
        )
    acc = sum(
        ensemble.weighted(i).entries @ el.entries
        for i, el in enumerate(measurement.elements)
    )
    dual_op = HermitianOperator(ensemble.dims, hermitize(acc))
    analysis = analyze_dual(ensemble, dual_op, restarts=restarts, tol=tol, seed=seed)
    holds = analysis.witnessed
    p = success_probability(ensemble, measurement)
    details = {
        "trace": analysis.trace,
        "success_probability": p,
        "dual_feasible": analysis.feasible,
        "ew_indices": list(analysis.ew_indices),
        "min_eigenvalues": list(analysis.min_eigenvalues),
        "per_state": [_verdict_summary(v) for v in analysis.per_state],
    }
    if cross_check:
        est = solve_pg_iterative(ensemble, max_iters=solver_max_iters)
        details["p_g_estimate"] = est.p_value
        details["p_g_converged"] = est.converged
        details["p_g_margin"] = est.p_value - p
        details["cross_check_ok"] = bool(est.p_value > p + 1e-6)
    return VerificationReport(
        check="gap",
        holds=holds,
        certified=analysis.certified,
        p_sep=p if holds else None,
        gap_certified=holds,
        details=details,
    )


def check_pivot_dominance(
    ensemble: Ensemble,
    pivot: int = 0,
    restarts: int = DEFAULT_RESTARTS,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
) -> VerificationReport:
    """Is always guessing the pivot state separably optimal?

    Holds iff eta_pivot rho_pivot - eta_i rho_i is block positive for all
    other i, in which case p_sep = eta_pivot with the trivial measurement.
    The witnessing dual (the weighted pivot state itself) is recorded as
    unique only as an annotation; uniqueness is not verified.
    """
    if not 0 <= pivot < ensemble.n:
        raise PreconditionError("pivot %d out of range for %d states" % (pivot, ensemble.n))
    indices = [i for i in range(ensemble.n) if i != pivot]
    verdicts = []
    min_eigs = []
    exact = []
    for i in indices:
        diff = ensemble.weighted(pivot) - ensemble.weighted(i)
        verdict, w_min, is_exact = decide_block_positivity(
            diff, restarts=restarts, tol=tol, seed=seed
        )
        verdicts.append(verdict)
        min_eigs.append(w_min)
        exact.append(is_exact)
    holds = all(v.status != VIOLATED for v in verdicts)
    eta_pivot = float(ensemble.states[pivot][0])
    return VerificationReport(
        check="dominance",
        holds=holds,
        certified=all(exact),
        p_sep=eta_pivot if holds else None,
        gap_certified=False,
        details={
            "pivot": pivot,
            "indices": indices,
            "min_eigenvalues": min_eigs,
            "per_state": [_verdict_summary(v) for v in verdicts],
            "exact": exact,
            "uniqueness_verified": False,
        },
    )


def certify_dominance_gap(
    ensemble: Ensemble,
    pivot: int = 0,
    restarts: int = DEFAULT_RESTARTS,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
) -> VerificationReport:
    """Under dominance, p_sep < p_g iff some difference is a witness.

    Requires check_pivot_dominance to hold (PreconditionError otherwise).
    Each eta_pivot rho_pivot - eta_i rho_i that is block positive with a
    negative eigenvalue certifies the strict gap; the defect values are
    those negative minimum eigenvalues.
    """
    dominance = check_pivot_dominance(
        ensemble, pivot=pivot, restarts=restarts, tol=tol, seed=seed
    )
    if not dominance.holds:
        raise PreconditionError("dominance does not hold at pivot %d" % pivot)
    indices = dominance.details["indices"]
    min_eigs = dominance.details["min_eigenvalues"]
    statuses = [v["status"] for v in dominance.details["per_state"]]
    ew_flags = [
        status != VIOLATED and w_min < -tol
        for status, w_min in zip(statuses, min_eigs)
    ]
    holds = any(ew_flags)
    return VerificationReport(
        check="dominance-gap",
        holds=holds,
        certified=dominance.certified,
        p_sep=dominance.p_sep,
        gap_certified=holds,
        details={
            "pivot": pivot,
            "indices": indices,
            "ew_flags": ew_flags,
            "defects": [
                w_min for w_min, flag in zip(min_eigs, ew_flags) if flag
            ],
            "min_eigenvalues": min_eigs,
            "per_state": dominance.details["per_state"],
        },
    )


def verify_equality_certificate(
    ensemble: Ensemble,
    dual_op: HermitianOperator,
    q_value: float,
    restarts: int = DEFAULT_RESTARTS,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
) -> VerificationReport:
    """Certify p_sep = p_g = q_value from an all-PSD dual.

    The dual must have trace q_value (TraceMismatchError otherwise). If
    every H - eta_i rho_i is PSD the dual is feasible for the global
    problem too, collapsing the hierarchy at q_value. When some
    difference is not PSD, the report records whether H at least stays
    feasible (and witnessed) for the separable problem.
    """
    if abs(dual_op.trace() - q_value) > Q_MATCH_ATOL:
        raise TraceMismatchError(
            "dual trace %.12f does not match q = %.12f" % (dual_op.trace(), q_value)
        )
    min_eigs = [
        float(np.linalg.eigvalsh((dual_op - ensemble.weighted(i)).entries)[0])
        for i in range(ensemble.n)
    ]
    holds = all(w >= -tol for w in min_eigs)
    details = {"q_value": q_value, "min_eigenvalues": min_eigs}
    if not holds:
        analysis = analyze_dual(ensemble, dual_op, restarts=restarts, tol=tol, seed=seed)
        details["dual_feasible"] = analysis.feasible
        details["dual_witnessed"] = analysis.witnessed
        details["ew_indices"] = list(analysis.ew_indices)
    return VerificationReport(
        check="equality",
        holds=holds,
        certified=True,
        p_sep=float(q_value) if holds else None,
        gap_certified=False,
        details=details,
    )


def probe_dominance_uniqueness(
    ensemble: Ensemble,
    pivot: int = 0,
    trials: int = 16,
    eps: float = 1e-3,
    restarts: int = 16,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
) -> dict:
    """Diagnostic search for alternative optimal duals under dominance.

    Samples random traceless Hermitian directions around the dominance
    dual eta_pivot rho_pivot and reports any perturbed operator that stays
    feasible at the same trace, which would falsify a uniqueness claim.
    Sampling only ever falsifies; it never proves uniqueness.
    """
    base = ensemble.weighted(pivot)
    total = ensemble.dims.total
    rng = np.random.default_rng([seed, 2 * trials + 1])
    found = []
    for t in range(trials):
        raw = rng.standard_normal((total, total)) + 1j * rng.standard_normal((total, total))
        direction = (raw + raw.conj().T) / 2.0
        direction -= np.trace(direction).real / total * np.eye(total)
        direction /= np.linalg.norm(direction)
        cand = HermitianOperator(
            ensemble.dims, base.entries + eps * direction
        )
        analysis = analyze_dual(ensemble, cand, restarts=restarts, tol=tol, seed=seed)
        if analysis.feasible:
            found.append(t)
    return {
        "pivot": pivot,
        "trials": trials,
        "eps": eps,
        "alternatives_found": len(found),
        "alternative_trials": found,
        "uniqueness_falsified": bool(found),
    }
