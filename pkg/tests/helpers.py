"""Shared random builders for the test suite."""

import numpy as np

from sepdisc import Dims, Ensemble, HermitianOperator, StateVector


def random_hermitian(rng, dims) -> HermitianOperator:
    dims = Dims.of(dims)
    n = dims.total
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return HermitianOperator(dims, (a + a.conj().T) / 2.0)


def random_density(rng, dims, rank=None) -> HermitianOperator:
    dims = Dims.of(dims)
    n = dims.total
    r = rank or n
    a = rng.standard_normal((n, r)) + 1j * rng.standard_normal((n, r))
    rho = a @ a.conj().T
    return HermitianOperator(dims, rho / np.trace(rho).real)


def random_state(rng, dims) -> StateVector:
    dims = Dims.of(dims)
    v = rng.standard_normal(dims.total) + 1j * rng.standard_normal(dims.total)
    return StateVector(dims, v / np.linalg.norm(v))


def random_psd(rng, dims, rank=None) -> HermitianOperator:
    dims = Dims.of(dims)
    n = dims.total
    r = rank or n
    a = rng.standard_normal((n, r)) + 1j * rng.standard_normal((n, r))
    return HermitianOperator(dims, a @ a.conj().T)


def random_two_state_ensemble(rng, dims) -> Ensemble:
    eta = float(rng.uniform(0.05, 0.95))
    return Ensemble(
        [(eta, random_density(rng, dims)), (1.0 - eta, random_density(rng, dims))]
    )


def random_ensemble(rng, dims, n) -> Ensemble:
    etas = rng.dirichlet(np.ones(n))
    etas = etas / etas.sum()
    return Ensemble([(float(e), random_density(rng, dims)) for e in etas])
