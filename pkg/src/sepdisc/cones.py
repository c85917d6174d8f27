"""Block positivity, separable operator sums, and entanglement witnesses.

An operator E is block positive when <e|E|e> >= 0 for every product vector
e. The cone of such operators strictly contains the PSD cone; Hermitian
operators that are block positive but not PSD are entanglement witnesses.
Deciding block positivity is hard in general, so the heuristic here is an
alternating minimization over product vectors with random restarts. For
operators of the special form a*I - b|psi><psi| the decision reduces
exactly to the maximum product overlap of psi.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .errors import DimsMismatchError, PreconditionError
from .operators import (
    Dims,
    HermitianOperator,
    ProductVector,
    StateVector,
    eig_hermitian,
    hermitize,
    is_psd,
)

VIOLATED = "VIOLATED"
NO_VIOLATION_FOUND = "NO_VIOLATION_FOUND"
EXACT_BLOCK_POSITIVE = "EXACT_BLOCK_POSITIVE"

DEFAULT_RESTARTS = 32
DEFAULT_MAX_ITERS = 200
DEFAULT_TOL = 1e-9
SWEEP_CONV_TOL = 1e-12
RANK1_MATCH_ATOL = 1e-10

LOCAL_PSD_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ProductOperatorSum:
    """Sum of tensor products of local PSD factors.

    Expanding any such sum gives a separable (hence PSD) operator, which
    makes these objects certificates of separability for measurement
    elements.
    """

    dims: Dims
    terms: tuple[tuple[np.ndarray, ...], ...] = field(repr=False)

    def __init__(self, dims, terms: Sequence[Sequence]):
        dims = Dims.of(dims)
        checked = []
        for t, term in enumerate(terms):
            if len(term) != dims.m:
                raise DimsMismatchError(
                    "term %d has %d factors, expected %d" % (t, len(term), dims.m)
                )
            factors = []
            for k, raw in enumerate(term):
                f = hermitize(raw)
                if f.shape[0] != dims[k]:
                    raise DimsMismatchError(
                        "term %d factor %d has size %d, expected %d"
                        % (t, k, f.shape[0], dims[k])
                    )
                if np.linalg.eigvalsh(f)[0] < -LOCAL_PSD_TOL:
                    raise PreconditionError(
                        "term %d factor %d is not PSD within %g" % (t, k, LOCAL_PSD_TOL)
                    )
                f.flags.writeable = False
                factors.append(f)
            checked.append(tuple(factors))
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "terms", tuple(checked))

    def __len__(self):
        return len(self.terms)

    def expand(self) -> HermitianOperator:
        """Dense sum of the tensor-product terms (PSD, asserted)."""
        total = self.dims.total
        acc = np.zeros((total, total), dtype=np.complex128)
        for term in self.terms:
            block = term[0]
            for f in term[1:]:
                block = np.kron(block, f)
            acc += block
        out = HermitianOperator(self.dims, acc)
        if not is_psd(out, LOCAL_PSD_TOL):
            raise AssertionError("expanded product-operator sum is not PSD")
        return out


@dataclass(frozen=True)
class BlockPositivityVerdict:
    """Outcome of a block-positivity check.

    VIOLATED is certified by the attached product vector. The heuristic
    search can only ever report NO_VIOLATION_FOUND; EXACT_BLOCK_POSITIVE
    is reserved for the special-form decision rule.
    """

    status: str
    min_value: float
    restarts_used: int
    witness: ProductVector | None = None


@dataclass(frozen=True)
class EwVerdict:
    """Outcome of entanglement-witness detection."""

    is_ew: bool
    min_eigenvalue: float
    block_positivity: BlockPositivityVerdict
    violating_state: StateVector | None = None


def _random_product_locals(dims: Dims, rng: np.random.Generator) -> list[np.ndarray]:
    locs = []
    for d in dims:
        v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        locs.append(v / np.linalg.norm(v))
    return locs


def min_product_expectation(
    op: HermitianOperator,
    restarts: int = DEFAULT_RESTARTS,
    max_iters: int = DEFAULT_MAX_ITERS,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
) -> BlockPositivityVerdict:
    """Search for product vectors with negative expectation on op.

    Each restart draws an independent product vector (stream derived from
    (seed, restart index)) and runs alternating minimization to a sweep
    improvement below 1e-12. The best value over restarts is an upper
    bound on the true product minimum: VIOLATED is a certificate, while
    NO_VIOLATION_FOUND is only an absence of counterexamples.
    """
    if restarts < 1:
        raise PreconditionError("restarts must be >= 1")
    kern = kernels.active()
    best = np.inf
    best_locs = None
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        locs0 = _random_product_locals(op.dims, rng)
        val, locs, _, _ = kern.min_sweep(
            op.entries, op.dims.sizes, locs0, max_iters, SWEEP_CONV_TOL
        )
        if val < best:
            best = val
            best_locs = locs
    best = float(best)
    if best < -tol:
        return BlockPositivityVerdict(VIOLATED, best, restarts, ProductVector(best_locs))
    return BlockPositivityVerdict(NO_VIOLATION_FOUND, best, restarts)


def _max_overlap(
    psi: StateVector, restarts: int, max_iters: int, seed: int
) -> tuple[float, ProductVector]:
    kern = kernels.active()
    best = -1.0
    best_locs = None
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        locs0 = _random_product_locals(psi.dims, rng)
        val, locs, _, _ = kern.overlap_sweep(
            psi.amplitudes, psi.dims.sizes, locs0, max_iters, SWEEP_CONV_TOL
        )
        if val > best:
            best = val
            best_locs = locs
    return min(max(float(best), 0.0), 1.0), ProductVector(best_locs)


def max_product_overlap(
    psi: StateVector,
    restarts: int = DEFAULT_RESTARTS,
    max_iters: int = DEFAULT_MAX_ITERS,
    seed: int = 0,
) -> float:
    """Best found value of |<e|psi>|^2 over product vectors (lower bound)."""
    if restarts < 1:
        raise PreconditionError("restarts must be >= 1")
    val, _ = _max_overlap(psi, restarts, max_iters, seed)
    return val


def is_block_positive_rank1_shift(
    a: float,
    b: float,
    psi: StateVector,
    restarts: int = DEFAULT_RESTARTS,
    max_iters: int = DEFAULT_MAX_ITERS,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
) -> BlockPositivityVerdict:
    """Decide block positivity of a*I - b|psi><psi| with b >= 0.

    The product minimum of this family is exactly a - b * max|<e|psi>|^2,
    so the decision reduces to one overlap computation.
    """
    if b < 0:
        raise PreconditionError("rank-1 shift rule needs b >= 0, got %g" % b)
    overlap, pv = _max_overlap(psi, restarts, max_iters, seed)
    min_value = float(a - b * overlap)
    if min_value < -tol:
        return BlockPositivityVerdict(VIOLATED, min_value, restarts, pv)
    return BlockPositivityVerdict(EXACT_BLOCK_POSITIVE, min_value, restarts)


def rank1_shift_decomposition(
    op: HermitianOperator, atol: float = RANK1_MATCH_ATOL
) -> tuple[float, float, StateVector] | None:
    """Match op against the form a*I - b|psi><psi| with b >= 0.

    The spectrum of that form is a with multiplicity total-1 and a-b at
    the bottom, so matching is a question about the top total-1
    eigenvalues being constant within atol. Returns (a, b, psi) or None.
    """
    w, v = eig_hermitian(op)
    rest = w[1:]
    a = float(rest.mean())
    if np.abs(rest - a).max() > atol:
        return None
    b = max(a - float(w[0]), 0.0)
    psi = StateVector(op.dims, v[:, 0])
    return a, b, psi


def decide_block_positivity(
    op: HermitianOperator,
    restarts: int = DEFAULT_RESTARTS,
    max_iters: int = DEFAULT_MAX_ITERS,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
) -> tuple[BlockPositivityVerdict, float, bool]:
    """Best available block-positivity answer for op.

    Uses the exact rank-1-shift rule when op matches that form, else the
    heuristic search. Returns (verdict, min_eigenvalue, exact) where exact
    records whether the conclusion is certified: a matched special form, a
    found violation, or plain positive semidefiniteness all qualify.
    """
    w_min = float(np.linalg.eigvalsh(op.entries)[0])
    form = rank1_shift_decomposition(op)
    if form is not None:
        a, b, psi = form
        verdict = is_block_positive_rank1_shift(
            a, b, psi, restarts=restarts, max_iters=max_iters, tol=tol, seed=seed
        )
        return verdict, w_min, True
    verdict = min_product_expectation(
        op, restarts=restarts, max_iters=max_iters, tol=tol, seed=seed
    )
    exact = verdict.status == VIOLATED or w_min >= -tol
    return verdict, w_min, exact


def detect_ew(
    op: HermitianOperator,
    restarts: int = DEFAULT_RESTARTS,
    max_iters: int = DEFAULT_MAX_ITERS,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
) -> EwVerdict:
    """Decide whether op is an entanglement witness.

    A witness must be block positive while having a negative eigenvalue.
    Any PSD input is rejected outright, as is any input with a certified
    block-positivity violation. When op is a witness, the bottom
    eigenvector is an entangled state it detects: its expectation equals
    the (negative) minimum eigenvalue.
    """
    verdict, min_eig, _ = decide_block_positivity(
        op, restarts=restarts, max_iters=max_iters, tol=tol, seed=seed
    )
    is_ew = verdict.status != VIOLATED and min_eig < -tol
    violating = None
    if is_ew:
        _, v = eig_hermitian(op)
        violating = StateVector(op.dims, v[:, 0])
    return EwVerdict(is_ew, min_eig, verdict, violating)


def trace_nonneg_check(op: HermitianOperator, verdict: BlockPositivityVerdict) -> bool:
    """Consistency check: block-positive operators have nonnegative trace.

    A nonzero block-positive operator in fact has strictly positive trace,
    so an essentially-zero trace is only acceptable for an essentially-zero
    operator. Requires a non-VIOLATED verdict for op.
    """
    if verdict.status == VIOLATED:
        raise PreconditionError("trace check is only meaningful without a violation")
    tr = op.trace()
    if tr < -1e-9:
        return False
    if abs(tr) <= 1e-9:
        return op.frobenius_norm() <= 1e-8
    return True
