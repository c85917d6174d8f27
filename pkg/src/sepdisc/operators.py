"""Dense operator algebra on multipartite Hilbert spaces.

Operators and vectors are stored as explicit complex arrays together with
the ordered list of local dimensions. Hermiticity and normalization are
enforced on admission so that downstream code can assume both.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimsMismatchError,
    EigensolverError,
    HermiticityError,
    SizeOverflowError,
)

HERMITICITY_ATOL = 1e-10
UNIT_NORM_ATOL = 1e-10
PSD_TOL = 1e-9
TRACE_IMAG_ATOL = 1e-10

TOTAL_DIM_CEILING = 4096


@dataclass(frozen=True)
class Dims:
    """Ordered local dimensions of a multipartite space."""

    sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        object.__setattr__(self, "sizes", sizes)
        if len(sizes) < 2:
            raise ValueError("need at least two parties, got %r" % (sizes,))
        if any(s < 1 for s in sizes):
            raise ValueError("local dimensions must be >= 1, got %r" % (sizes,))

    @classmethod
    def of(cls, obj) -> "Dims":
        if isinstance(obj, Dims):
            return obj
        return cls(tuple(obj))

    @property
    def m(self) -> int:
        return len(self.sizes)

    @property
    def total(self) -> int:
        return int(np.prod(self.sizes))

    def __iter__(self):
        return iter(self.sizes)

    def __len__(self):
        return len(self.sizes)

    def __getitem__(self, k):
        return self.sizes[k]


def _check_same_dims(a: Dims, b: Dims, what: str):
    if a.sizes != b.sizes:
        raise DimsMismatchError("%s: dims %r vs %r" % (what, a.sizes, b.sizes))


def _as_square_complex(mat) -> np.ndarray:
    arr = np.asarray(mat, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError("expected a square matrix, got shape %r" % (arr.shape,))
    return arr


def hermitize(mat, atol: float = HERMITICITY_ATOL) -> np.ndarray:
    """Symmetrize a matrix that is Hermitian up to atol; reject otherwise."""
    arr = _as_square_complex(mat)
    defect = np.abs(arr - arr.conj().T).max() if arr.size else 0.0
    if defect > atol:
        raise HermiticityError(
            "matrix is not Hermitian (max deviation %.3e > %.1e)" % (defect, atol)
        )
    out = (arr + arr.conj().T) / 2.0
    return out


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """A Hermitian matrix on a multipartite space.

    The stored array is symmetrized on admission and frozen. Real linear
    combinations keep hermiticity, so +, -, and real scalar multiplication
    are provided directly.
    """

    dims: Dims
    entries: np.ndarray = field(repr=False)

    def __init__(self, dims, entries):
        dims = Dims.of(dims)
        arr = hermitize(entries)
        if arr.shape[0] != dims.total:
            raise DimsMismatchError(
                "matrix of size %d does not match dims %r (total %d)"
                % (arr.shape[0], dims.sizes, dims.total)
            )
        arr.flags.writeable = False
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "entries", arr)

    @classmethod
    def identity(cls, dims) -> "HermitianOperator":
        dims = Dims.of(dims)
        return cls(dims, np.eye(dims.total, dtype=np.complex128))

    @classmethod
    def zero(cls, dims) -> "HermitianOperator":
        dims = Dims.of(dims)
        return cls(dims, np.zeros((dims.total, dims.total), dtype=np.complex128))

    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.entries))

    def __add__(self, other: "HermitianOperator") -> "HermitianOperator":
        _check_same_dims(self.dims, other.dims, "operator sum")
        return HermitianOperator(self.dims, self.entries + other.entries)

    def __sub__(self, other: "HermitianOperator") -> "HermitianOperator":
        _check_same_dims(self.dims, other.dims, "operator difference")
        return HermitianOperator(self.dims, self.entries - other.entries)

    def __mul__(self, scalar) -> "HermitianOperator":
        c = complex(scalar)
        if abs(c.imag) > 0:
            raise ValueError("only real scalars keep hermiticity")
        return HermitianOperator(self.dims, self.entries * c.real)

    __rmul__ = __mul__

    def __neg__(self) -> "HermitianOperator":
        return HermitianOperator(self.dims, -self.entries)


@dataclass(frozen=True, eq=False)
class StateVector:
    """A unit vector on a multipartite space."""

    dims: Dims
    amplitudes: np.ndarray = field(repr=False)

    def __init__(self, dims, amplitudes):
        dims = Dims.of(dims)
        arr = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
        if arr.shape[0] != dims.total:
            raise DimsMismatchError(
                "vector of length %d does not match dims %r" % (arr.shape[0], dims.sizes)
            )
        nrm = float(np.linalg.norm(arr))
        if abs(nrm - 1.0) > UNIT_NORM_ATOL:
            raise ValueError("vector norm %.12f is not 1 within %g" % (nrm, UNIT_NORM_ATOL))
        arr = arr / nrm
        arr.flags.writeable = False
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", arr)

    def inner(self, other: "StateVector") -> complex:
        _check_same_dims(self.dims, other.dims, "inner product")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def to_density(self) -> HermitianOperator:
        return HermitianOperator(self.dims, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True, eq=False)
class ProductVector:
    """A product of local unit vectors, one per party."""

    dims: Dims
    locals: tuple[np.ndarray, ...] = field(repr=False)

    def __init__(self, locals: Sequence):
        vecs = []
        for v in locals:
            arr = np.asarray(v, dtype=np.complex128).reshape(-1)
            nrm = float(np.linalg.norm(arr))
            if abs(nrm - 1.0) > UNIT_NORM_ATOL:
                raise ValueError("local vector norm %.12f is not 1" % nrm)
            arr = arr / nrm
            arr.flags.writeable = False
            vecs.append(arr)
        dims = Dims(tuple(len(v) for v in vecs))
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "locals", tuple(vecs))

    def embed(self) -> StateVector:
        amp = self.locals[0]
        for v in self.locals[1:]:
            amp = np.kron(amp, v)
        return StateVector(self.dims, amp)

    def expectation(self, op: HermitianOperator) -> float:
        """<e|A|e> for this product vector."""
        _check_same_dims(self.dims, op.dims, "product expectation")
        amp = self.embed().amplitudes
        val = np.vdot(amp, op.entries @ amp)
        return float(val.real)

    def overlap_with(self, psi: StateVector) -> float:
        """|<e|psi>|^2 for this product vector."""
        _check_same_dims(self.dims, psi.dims, "product overlap")
        amp = self.embed().amplitudes
        return float(abs(np.vdot(amp, psi.amplitudes)) ** 2)


def basis_ket(d: int, k: int) -> np.ndarray:
    if not 0 <= k < d:
        raise ValueError("basis index %d out of range for dimension %d" % (k, d))
    v = np.zeros(d, dtype=np.complex128)
    v[k] = 1.0
    return v


def product_basis_state(dims, indices: Sequence[int]) -> StateVector:
    """|i1 ... im> in the computational product basis."""
    dims = Dims.of(dims)
    if len(indices) != dims.m:
        raise DimsMismatchError("need %d indices, got %d" % (dims.m, len(indices)))
    return ProductVector([basis_ket(d, k) for d, k in zip(dims, indices)]).embed()


def tensor(factors: Sequence) -> HermitianOperator:
    """Kronecker product of Hermitian factors, parties concatenated in order.

    Factors may be HermitianOperator instances (contributing their full
    dims) or plain square matrices (contributing one party each).
    """
    if not factors:
        raise ValueError("tensor needs at least one factor")
    sizes: list[int] = []
    mat = np.ones((1, 1), dtype=np.complex128)
    for f in factors:
        if isinstance(f, HermitianOperator):
            sizes.extend(f.dims.sizes)
            block = f.entries
        else:
            block = _as_square_complex(f)
            sizes.append(block.shape[0])
        mat = np.kron(mat, block)
    return HermitianOperator(Dims(tuple(sizes)), mat)


def eig_hermitian(op: HermitianOperator) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvector columns."""
    try:
        w, v = np.linalg.eigh(op.entries)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(str(exc)) from exc
    return w, v


def min_eigenvalue(op: HermitianOperator) -> float:
    try:
        w = np.linalg.eigvalsh(op.entries)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(str(exc)) from exc
    return float(w[0])


def is_psd(op: HermitianOperator, tol: float = PSD_TOL) -> bool:
    """Whether all eigenvalues are >= -tol."""
    return min_eigenvalue(op) >= -tol


def trace_inner(a: HermitianOperator, b: HermitianOperator) -> float:
    """Tr(AB) for Hermitian A, B; the imaginary residue must be < 1e-10."""
    _check_same_dims(a.dims, b.dims, "trace inner product")
    val = complex(np.einsum("ij,ji->", a.entries, b.entries))
    if abs(val.imag) > TRACE_IMAG_ATOL:
        raise HermiticityError("trace inner product has imaginary residue %.3e" % val.imag)
    return float(val.real)


def partial_transpose_matrix(mat, sizes: Iterable[int], party: int) -> np.ndarray:
    """Transpose one party's indices of a (possibly non-Hermitian) matrix."""
    sizes = tuple(int(s) for s in sizes)
    m = len(sizes)
    if not 0 <= party < m:
        raise ValueError("party %d out of range for %d parties" % (party, m))
    arr = _as_square_complex(mat)
    total = int(np.prod(sizes))
    if arr.shape[0] != total:
        raise DimsMismatchError("matrix of size %d does not match dims %r" % (arr.shape[0], sizes))
    t = arr.reshape(sizes + sizes)
    t = np.swapaxes(t, party, m + party)
    return np.ascontiguousarray(t.reshape(total, total))


def partial_transpose(op: HermitianOperator, party: int) -> HermitianOperator:
    """Partial transpose on one party; Hermitian in, Hermitian out."""
    out = partial_transpose_matrix(op.entries, op.dims.sizes, party)
    return HermitianOperator(op.dims, out)


def ghz_state(m: int, d: int, j: int = 0) -> StateVector:
    """Phased GHZ state (1/sqrt d) sum_k exp(i 2 pi j k / d) |k>^(x m).

    The phase index j only matters mod d; j = 0 gives the plain GHZ state.
    Distinct j are pairwise orthogonal.
    """
    if m < 2:
        raise ValueError("need at least two parties, got m = %d" % m)
    if d < 2:
        raise ValueError("local dimension must be >= 2, got d = %d" % d)
    if d**m > TOTAL_DIM_CEILING:
        raise SizeOverflowError("total dimension %d exceeds ceiling %d" % (d**m, TOTAL_DIM_CEILING))
    dims = Dims((d,) * m)
    amp = np.zeros(dims.total, dtype=np.complex128)
    stride = (dims.total - 1) // (d - 1)  # index of |k ... k> is k * (d^m - 1)/(d - 1)
    for k in range(d):
        amp[k * stride] = np.exp(2j * np.pi * j * k / d) / np.sqrt(d)
    return StateVector(dims, amp)
