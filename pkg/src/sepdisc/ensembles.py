"""Weighted state ensembles, measurements, and reference families.

The three generator families share one backbone: a GHZ-type state plus
computational product states, arranged so that the separable-measurement
optimum has a closed form. The two constructors run in the opposite
direction, turning entanglement witnesses into ensembles whose pairwise
prior-weighted differences are proportional to those witnesses.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .cones import ProductOperatorSum, detect_ew
from .errors import (
    CertificateMissingError,
    DimsMismatchError,
    PreconditionError,
    SizeOverflowError,
)
from .operators import (
    Dims,
    HermitianOperator,
    StateVector,
    basis_ket,
    eig_hermitian,
    ghz_state,
    is_psd,
    min_eigenvalue,
    product_basis_state,
)

PRIOR_SUM_ATOL = 1e-10
STATE_TRACE_ATOL = 1e-10
STATE_PSD_TOL = 1e-9
COMPLETENESS_ATOL = 1e-9
CERTIFICATE_MATCH_ATOL = 1e-9

TOTAL_DIM_CEILING = 4096


@dataclass(frozen=True, eq=False)
class Ensemble:
    """States with prior probabilities, all on one multipartite space."""

    states: tuple[tuple[float, HermitianOperator], ...]

    def __init__(self, states: Sequence):
        if not states:
            raise PreconditionError("ensemble needs at least one state")
        checked = []
        dims = None
        for i, (eta, rho) in enumerate(states):
            eta = float(eta)
            if eta <= 0:
                raise PreconditionError("prior %d is %g, must be positive" % (i, eta))
            if dims is None:
                dims = rho.dims
            elif rho.dims.sizes != dims.sizes:
                raise DimsMismatchError("state %d lives on different dims" % i)
            if abs(rho.trace() - 1.0) > STATE_TRACE_ATOL:
                raise PreconditionError("state %d has trace %.12f" % (i, rho.trace()))
            if not is_psd(rho, STATE_PSD_TOL):
                raise PreconditionError("state %d is not PSD within %g" % (i, STATE_PSD_TOL))
            checked.append((eta, rho))
        total = sum(eta for eta, _ in checked)
        if abs(total - 1.0) > PRIOR_SUM_ATOL:
            raise PreconditionError("priors sum to %.12f, expected 1" % total)
        object.__setattr__(self, "states", tuple(checked))

    @property
    def n(self) -> int:
        return len(self.states)

    @property
    def dims(self) -> Dims:
        return self.states[0][1].dims

    @property
    def etas(self) -> np.ndarray:
        return np.array([eta for eta, _ in self.states])

    @property
    def rhos(self) -> tuple[HermitianOperator, ...]:
        return tuple(rho for _, rho in self.states)

    def weighted(self, i: int) -> HermitianOperator:
        """eta_i * rho_i."""
        eta, rho = self.states[i]
        return eta * rho


@dataclass(frozen=True, eq=False)
class Measurement:
    """POVM elements, optionally with separable certificates.

    A certificate is a ProductOperatorSum expanding to its element, which
    proves the element separable. Zero elements carry empty sums.
    """

    elements: tuple[HermitianOperator, ...]
    certificates: tuple[ProductOperatorSum, ...] | None = None

    def __init__(self, elements: Sequence[HermitianOperator], certificates=None):
        if not elements:
            raise PreconditionError("measurement needs at least one element")
        dims = elements[0].dims
        acc = np.zeros((dims.total, dims.total), dtype=np.complex128)
        for i, el in enumerate(elements):
            if el.dims.sizes != dims.sizes:
                raise DimsMismatchError("element %d lives on different dims" % i)
            if not is_psd(el, STATE_PSD_TOL):
                raise PreconditionError("element %d is not PSD within %g" % (i, STATE_PSD_TOL))
            acc += el.entries
        defect = np.abs(acc - np.eye(dims.total)).max()
        if defect > COMPLETENESS_ATOL:
            raise PreconditionError(
                "elements sum to identity only within %.3e (> %g)" % (defect, COMPLETENESS_ATOL)
            )
        if certificates is not None:
            certificates = tuple(certificates)
            if len(certificates) != len(elements):
                raise CertificateMissingError(
                    "%d certificates for %d elements" % (len(certificates), len(elements))
                )
            for i, (el, cert) in enumerate(zip(elements, certificates)):
                if cert.dims.sizes != dims.sizes:
                    raise DimsMismatchError("certificate %d lives on different dims" % i)
                gap = np.linalg.norm(cert.expand().entries - el.entries)
                if gap > CERTIFICATE_MATCH_ATOL:
                    raise PreconditionError(
                        "certificate %d expands %.3e away from its element" % (i, gap)
                    )
        object.__setattr__(self, "elements", tuple(elements))
        object.__setattr__(self, "certificates", certificates)

    @property
    def n(self) -> int:
        return len(self.elements)

    @property
    def dims(self) -> Dims:
        return self.elements[0].dims

    @property
    def is_separable_certified(self) -> bool:
        return self.certificates is not None


def _check_pair(m: int, d: int):
    if m < 2:
        raise PreconditionError("need at least two parties, got m = %d" % m)
    if d < 2:
        raise PreconditionError("local dimension must be >= 2, got d = %d" % d)
    if d**m > TOTAL_DIM_CEILING:
        raise SizeOverflowError(
            "total dimension %d exceeds ceiling %d" % (d**m, TOTAL_DIM_CEILING)
        )


def _equal_index_projectors(m: int, d: int) -> list[HermitianOperator]:
    return [product_basis_state((d,) * m, (k,) * m).to_density() for k in range(d)]


def _not_all_equal_indices(m: int, d: int):
    for idx in itertools.product(range(d), repeat=m):
        if any(k != idx[0] for k in idx):
            yield idx


def _local_projector(d: int, k: int) -> np.ndarray:
    v = basis_ket(d, k)
    return np.outer(v, v.conj())


def example1(m: int, d: int) -> tuple[Ensemble, Measurement]:
    """d+2 states: the d all-equal product states, the normalized complement,
    and a GHZ state that the optimal separable measurement never guesses.

    The separable optimum is d^m / (d^m + d), achieved by the projective
    measurement onto the all-equal product states and their complement,
    with a zero element for the GHZ state.
    """
    _check_pair(m, d)
    dims = Dims((d,) * m)
    nn = dims.total
    denom = nn + d
    eye = HermitianOperator.identity(dims)
    equal_projs = _equal_index_projectors(m, d)
    complement = eye - sum(equal_projs[1:], equal_projs[0])
    ghz = ghz_state(m, d, 0).to_density()

    states = [(1.0 / denom, p) for p in equal_projs]
    states.append(((nn - d) / denom, (1.0 / (nn - d)) * complement))
    states.append((d / denom, ghz))

    elements = list(equal_projs) + [complement, HermitianOperator.zero(dims)]
    certs = [
        ProductOperatorSum(dims, [[_local_projector(d, k)] * m]) for k in range(d)
    ]
    certs.append(
        ProductOperatorSum(
            dims,
            [[_local_projector(d, k) for k in idx] for idx in _not_all_equal_indices(m, d)],
        )
    )
    certs.append(ProductOperatorSum(dims, []))
    return Ensemble(states), Measurement(elements, certs)


def example2(m: int, d: int) -> tuple[Ensemble, Measurement]:
    """d^m - d + 1 states discriminated perfectly by a separable measurement.

    A GHZ state with prior d/d^m sits inside the span of the all-equal
    product states; the remaining states are the not-all-equal
    computational product states (lexicographic order), each with prior
    1/d^m. Since all supports are orthogonal the measurement succeeds with
    probability exactly 1.
    """
    _check_pair(m, d)
    dims = Dims((d,) * m)
    nn = dims.total
    ghz = ghz_state(m, d, 0).to_density()
    betas = [product_basis_state(dims, idx) for idx in _not_all_equal_indices(m, d)]

    states = [(d / nn, ghz)]
    states.extend((1.0 / nn, b.to_density()) for b in betas)

    equal_projs = _equal_index_projectors(m, d)
    m0 = sum(equal_projs[1:], equal_projs[0])
    elements = [m0] + [b.to_density() for b in betas]
    certs = [
        ProductOperatorSum(dims, [[_local_projector(d, k)] * m for k in range(d)])
    ]
    certs.extend(
        ProductOperatorSum(dims, [[_local_projector(d, k) for k in idx]])
        for idx in _not_all_equal_indices(m, d)
    )
    return Ensemble(states), Measurement(elements, certs)


def example3(m: int, d: int) -> Ensemble:
    """The maximally mixed state against d phased-GHZ mixtures.

    State 0 is I/d^m with prior 1/2; states 1..d mix the d phased GHZ
    states with just enough identity to make the prior-weighted difference
    against state 0 a multiple of I - d |Phi_j><Phi_j|. Guessing state 0
    regardless of the outcome is separably optimal at probability 1/2.
    """
    _check_pair(m, d)
    dims = Dims((d,) * m)
    nn = dims.total
    eye = HermitianOperator.identity(dims)
    states = [(0.5, (1.0 / nn) * eye)]
    ghz_coeff = (d * d - d) / (nn - d)
    eye_coeff = (nn - d * d) / (nn * (nn - d))
    for j in range(2, d + 2):
        phi = ghz_state(m, d, j).to_density()
        states.append((1.0 / (2 * d), ghz_coeff * phi + eye_coeff * eye))
    return Ensemble(states)


def construct_two_state(
    witness: HermitianOperator,
    p_op: HermitianOperator,
    restarts: int = 32,
    seed: int = 0,
    validate_witness: bool = True,
) -> Ensemble:
    """Two-state ensemble whose weighted difference is proportional to witness.

    Given a witness W and a PSD operator P with P + W PSD, the ensemble
    ((Tr(P+W), P+W), (Tr P, P)) normalized by Tr(2P+W) satisfies
    eta_1 rho_1 - eta_2 rho_2 = W / Tr(2P+W), so its separable optimum is
    eta_1 while the witness certifies a strict gap to the global optimum.
    """
    if p_op.dims.sizes != witness.dims.sizes:
        raise DimsMismatchError("witness and P live on different dims")
    if validate_witness:
        verdict = detect_ew(witness, restarts=restarts, seed=seed)
        if not verdict.is_ew:
            raise PreconditionError("witness input was not detected as an entanglement witness")
    if not is_psd(p_op):
        raise PreconditionError("P must be PSD")
    shifted = p_op + witness
    if not is_psd(shifted):
        raise PreconditionError("P + W must be PSD")
    tr_p = p_op.trace()
    tr_s = shifted.trace()
    if tr_p <= 1e-12 or tr_s <= 1e-12:
        raise PreconditionError("P and P + W must have positive trace")
    denom = 2 * tr_p + witness.trace()
    return Ensemble(
        [
            (tr_s / denom, (1.0 / tr_s) * shifted),
            (tr_p / denom, (1.0 / tr_p) * p_op),
        ]
    )


def auto_lambda(witness: HermitianOperator) -> float:
    """Largest scale lam with I - lam * W still PSD, i.e. 1 / max eigenvalue."""
    top = float(eig_hermitian(witness)[0][-1])
    if top <= 0:
        raise PreconditionError("witness has no positive eigenvalue")
    return 1.0 / top


def construct_n_state(
    witnesses: Sequence[HermitianOperator],
    lambdas: Sequence[float] | None = None,
    restarts: int = 32,
    seed: int = 0,
    validate_witness: bool = True,
) -> Ensemble:
    """Ensemble of len(witnesses)+1 states led by the maximally mixed state.

    With scales lam_i > 0 keeping I - lam_i W_i PSD (defaults to
    auto_lambda), state 0 is I/total and state i normalizes
    I - lam_i W_i, so eta_0 rho_0 - eta_i rho_i is proportional to W_i.
    """
    if not witnesses:
        raise PreconditionError("need at least one witness")
    dims = witnesses[0].dims
    for i, w in enumerate(witnesses):
        if w.dims.sizes != dims.sizes:
            raise DimsMismatchError("witness %d lives on different dims" % i)
        if validate_witness:
            verdict = detect_ew(w, restarts=restarts, seed=seed)
            if not verdict.is_ew:
                raise PreconditionError("input %d was not detected as an entanglement witness" % i)
    if lambdas is None:
        lambdas = [auto_lambda(w) for w in witnesses]
    lambdas = [float(l) for l in lambdas]
    if len(lambdas) != len(witnesses):
        raise PreconditionError("%d scales for %d witnesses" % (len(lambdas), len(witnesses)))
    if any(l <= 0 for l in lambdas):
        raise PreconditionError("scales must be positive")

    eye = HermitianOperator.identity(dims)
    shifted = []
    for i, (w, lam) in enumerate(zip(witnesses, lambdas)):
        op = eye - lam * w
        if min_eigenvalue(op) < -STATE_PSD_TOL:
            raise PreconditionError("I - lam * W is not PSD for witness %d (lam = %g)" % (i, lam))
        if op.trace() <= 1e-12:
            raise PreconditionError("I - lam * W has nonpositive trace for witness %d" % i)
        shifted.append(op)

    total = dims.total
    denom = (1 + len(witnesses)) * total - sum(
        lam * w.trace() for w, lam in zip(witnesses, lambdas)
    )
    states = [(total / denom, (1.0 / total) * eye)]
    states.extend((op.trace() / denom, (1.0 / op.trace()) * op) for op in shifted)
    return Ensemble(states)
