"""Minimum-error discrimination: success probabilities and optimal POVMs.

The optimality criterion used throughout: a measurement attains the global
optimum iff sum_j eta_j rho_j M_j - eta_i rho_i is PSD for every i. The
residual minimum eigenvalues of those operators certify optimality when
they are all nonnegative (within tolerance).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ensembles import Ensemble, Measurement
from .errors import PreconditionError
from .operators import HermitianOperator, eig_hermitian, trace_inner

PROB_CLAMP_TOL = 1e-9
HELSTROM_TIE_TOL = 1e-12
SUPPORT_CUTOFF = 1e-12

DEFAULT_MAX_ITERS = 5000
DEFAULT_TOL = 1e-8


@dataclass(frozen=True)
class DiscriminationResult:
    """A measurement with its success probability and optimality residuals."""

    p_value: float
    measurement: Measurement
    residual_min_eigs: tuple[float, ...]
    iterations: int
    converged: bool


def success_probability(ensemble: Ensemble, measurement: Measurement) -> float:
    """sum_i eta_i Tr(rho_i M_i), outcome i paired with state i."""
    if measurement.n != ensemble.n:
        raise PreconditionError(
            "%d outcomes for %d states" % (measurement.n, ensemble.n)
        )
    p = sum(
        eta * trace_inner(rho, el)
        for (eta, rho), el in zip(ensemble.states, measurement.elements)
    )
    if p < -PROB_CLAMP_TOL or p > 1.0 + PROB_CLAMP_TOL:
        raise PreconditionError("success probability %.12f is outside [0, 1]" % p)
    return min(max(float(p), 0.0), 1.0)


def _weighted(ensemble: Ensemble) -> list[np.ndarray]:
    return [eta * rho.entries for eta, rho in ensemble.states]


def _residuals(gs: list[np.ndarray], ms: list[np.ndarray]) -> list[float]:
    gamma = sum(g @ m for g, m in zip(gs, ms))
    gamma = (gamma + gamma.conj().T) / 2.0
    return [float(np.linalg.eigvalsh(gamma - g)[0]) for g in gs]


def check_optimality(ensemble: Ensemble, measurement: Measurement) -> list[float]:
    """Min eigenvalue of sum_j eta_j rho_j M_j - eta_i rho_i per state.

    All values >= -tol certifies that the measurement attains the global
    optimum at that tolerance. The operator sum is symmetrized before the
    eigenvalue computation; away from optimality it need not be Hermitian.
    """
    if measurement.n != ensemble.n:
        raise PreconditionError(
            "%d outcomes for %d states" % (measurement.n, ensemble.n)
        )
    return _residuals(_weighted(ensemble), [el.entries for el in measurement.elements])


def helstrom_two_state(ensemble: Ensemble) -> DiscriminationResult:
    """Closed-form optimum for two states.

    Projects onto the nonnegative eigenspace of eta_1 rho_1 - eta_2 rho_2
    (eigenvalues within 1e-12 of zero count as outcome 0) and evaluates
    p = eta_2 + sum of positive eigenvalues.
    """
    if ensemble.n != 2:
        raise PreconditionError("closed form needs exactly two states, got %d" % ensemble.n)
    (eta1, rho1), (eta2, rho2) = ensemble.states
    delta = eta1 * rho1 - eta2 * rho2
    w, v = eig_hermitian(delta)
    keep = w >= -HELSTROM_TIE_TOL
    vk = v[:, keep]
    m1 = HermitianOperator(ensemble.dims, vk @ vk.conj().T)
    m2 = HermitianOperator.identity(ensemble.dims) - m1
    measurement = Measurement([m1, m2])
    p = eta2 + float(w[w > 0].sum())
    p = min(max(p, 0.0), 1.0)
    residuals = check_optimality(ensemble, measurement)
    converged = all(r >= -1e-10 for r in residuals)
    return DiscriminationResult(p, measurement, tuple(residuals), 0, converged)


def solve_pg_iterative(
    ensemble: Ensemble,
    max_iters: int = DEFAULT_MAX_ITERS,
    tol: float = DEFAULT_TOL,
) -> DiscriminationResult:
    """Fixed-point iteration for the globally optimal measurement.

    Starting from the uniform measurement, each step maps
    M_i -> T^(-1/2) eta_i rho_i M_i eta_i rho_i T^(-1/2) with
    T = sum_j eta_j rho_j M_j eta_j rho_j, taking the pseudo-inverse square
    root on T's support and spreading T's kernel projector uniformly over
    the outcomes so completeness is preserved. Iteration stops once every
    optimality residual is >= -tol; hitting max_iters first is reported as
    converged = False with the residuals attached.
    """
    gs = _weighted(ensemble)
    n = ensemble.n
    total = ensemble.dims.total
    eye = np.eye(total, dtype=np.complex128)
    ms = [eye / n for _ in range(n)]

    iterations = 0
    converged = False
    residuals = _residuals(gs, ms)
    for it in range(max_iters):
        if all(r >= -tol for r in residuals):
            converged = True
            break
        t = sum(g @ m @ g for g, m in zip(gs, ms))
        t = (t + t.conj().T) / 2.0
        w, v = np.linalg.eigh(t)
        cutoff = SUPPORT_CUTOFF * max(float(w[-1]), 0.0)
        keep = w > cutoff
        vk = v[:, keep]
        s = (vk / np.sqrt(w[keep])) @ vk.conj().T
        p_ker = eye - vk @ vk.conj().T
        ms = [s @ g @ m @ g @ s + p_ker / n for g, m in zip(gs, ms)]
        ms = [(m + m.conj().T) / 2.0 for m in ms]
        iterations = it + 1
        residuals = _residuals(gs, ms)
    else:
        converged = all(r >= -tol for r in residuals)

    measurement = Measurement([HermitianOperator(ensemble.dims, m) for m in ms])
    p = success_probability(ensemble, measurement)
    return DiscriminationResult(p, measurement, tuple(residuals), iterations, converged)
