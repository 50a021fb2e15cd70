"""Truncated Fock-space operator algebra for the three-mode system.

Two optical modes ``a`` and ``b`` and one mechanical mode ``c`` live on a
tensor-product Hilbert space with fixed ordering a (x) b (x) c.  Operators are
stored as sparse complex matrices together with the mode dimensions that
produced them; binary operations refuse to mix operators built for different
truncations.  Truncation artifacts (population leaking past a Fock cutoff) are
reported through :class:`TruncationWarning`, never silently ignored.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from numbers import Number

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

MODES = ("a", "b", "c")

#: population allowed above a Fock cutoff before a TruncationWarning fires
TAIL_TOL = 1e-6


class TruncationWarning(UserWarning):
    """A Fock-space truncation is too tight for the requested object."""


@dataclass(frozen=True)
class ModeDims:
    """Fock-space cutoffs (n_a, n_b, n_c); mode k keeps levels 0..n_k-1."""

    n_a: int
    n_b: int
    n_c: int
    max_total: int = field(default=50_000, compare=False, repr=False)

    def __post_init__(self):
        for n in (self.n_a, self.n_b, self.n_c):
            if not isinstance(n, (int, np.integer)) or n < 1:
                raise ValueError(f"mode dimensions must be integers >= 1, got {self!r}")
        if self.dim > self.max_total:
            raise ValueError(
                f"total dimension {self.dim} exceeds the configured maximum "
                f"{self.max_total}; lower the cutoffs or raise max_total"
            )

    @property
    def dim(self) -> int:
        return self.n_a * self.n_b * self.n_c

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.n_a, self.n_b, self.n_c)

    def mode_dim(self, mode: str) -> int:
        return self.as_tuple()[_mode_index(mode)]


def _mode_index(mode: str) -> int:
    try:
        return MODES.index(mode)
    except ValueError:
        raise ValueError(f"unknown mode {mode!r}, expected one of {MODES}") from None


def _check_same_dims(x, y):
    if x.dims != y.dims:
        raise ValueError(f"dimension mismatch: {x.dims} vs {y.dims}")


@dataclass(frozen=True, eq=False)
class FockOperator:
    """Sparse operator on the truncated a (x) b (x) c space."""

    dims: ModeDims
    data: sp.csr_matrix

    def __post_init__(self):
        d = self.dims.dim
        mat = self.data
        if not sp.issparse(mat) or mat.format != "csr" or mat.dtype != np.complex128:
            mat = sp.csr_matrix(mat, dtype=complex)
            object.__setattr__(self, "data", mat)
        if mat.shape != (d, d):
            raise ValueError(f"operator shape {mat.shape} does not match dims {self.dims}")

    # -- arithmetic (dims-checked) --------------------------------------
    def __add__(self, other):
        if isinstance(other, FockOperator):
            _check_same_dims(self, other)
            return FockOperator(self.dims, (self.data + other.data).tocsr())
        if isinstance(other, Number):
            return FockOperator(self.dims, (self.data + other * sp.identity(self.dims.dim, dtype=complex, format="csr")).tocsr())
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-1) * other if isinstance(other, (FockOperator, Number)) else NotImplemented

    def __rsub__(self, other):
        return (-1) * self + other

    def __neg__(self):
        return (-1) * self

    def __mul__(self, scalar):
        if isinstance(scalar, Number):
            return FockOperator(self.dims, (scalar * self.data).tocsr())
        return NotImplemented

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, FockOperator):
            _check_same_dims(self, other)
            return FockOperator(self.dims, (self.data @ other.data).tocsr())
        return NotImplemented

    # -- structure -------------------------------------------------------
    def dag(self) -> "FockOperator":
        """Adjoint; create(...) is defined as destroy(...).dag() so the pair is exact."""
        return FockOperator(self.dims, self.data.conjugate().transpose().tocsr())

    def to_dense(self) -> np.ndarray:
        return self.data.toarray()

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        diff = (self.data - self.data.conjugate().transpose()).tocoo()
        scale = max(1.0, abs(self.data).max() if self.data.nnz else 0.0)
        return diff.nnz == 0 or np.abs(diff.data).max() <= tol * scale

    def expect(self, state: "QuantumState") -> complex:
        """<O> in the given state (complex; take .real for Hermitian O)."""
        _check_same_dims(self, state)
        if state.kind == "pure":
            return complex(np.vdot(state.data, self.data @ state.data))
        return complex(np.trace(self.data @ state.data))


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Pure state (1-D amplitude vector) or density matrix (2-D dense array)."""

    dims: ModeDims
    data: np.ndarray

    def __post_init__(self):
        d = self.dims.dim
        arr = np.asarray(self.data, dtype=complex)
        object.__setattr__(self, "data", arr)
        if arr.ndim == 1 and arr.shape == (d,):
            return
        if arr.ndim == 2 and arr.shape == (d, d):
            return
        raise ValueError(f"state shape {arr.shape} does not match dims {self.dims}")

    @property
    def kind(self) -> str:
        return "pure" if self.data.ndim == 1 else "mixed"

    def norm(self) -> float:
        if self.kind == "pure":
            return float(np.linalg.norm(self.data))
        return float(np.trace(self.data).real)

    def as_density(self) -> np.ndarray:
        if self.kind == "pure":
            return np.outer(self.data, self.data.conj())
        return self.data


# -- single-mode building blocks ------------------------------------------

def _destroy_matrix(n: int) -> sp.csr_matrix:
    return sp.diags(np.sqrt(np.arange(1, n, dtype=float)), offsets=1, dtype=complex, format="csr")


def _embed(dims: ModeDims, mode: str, op: sp.spmatrix) -> sp.csr_matrix:
    """kron with identities so a single-mode operator acts on the full space."""
    k = _mode_index(mode)
    ns = dims.as_tuple()
    left = sp.identity(int(np.prod(ns[:k], dtype=int)), dtype=complex, format="csr")
    right = sp.identity(int(np.prod(ns[k + 1:], dtype=int)), dtype=complex, format="csr")
    return sp.kron(sp.kron(left, op, format="csr"), right, format="csr")


def identity(dims: ModeDims) -> FockOperator:
    return FockOperator(dims, sp.identity(dims.dim, dtype=complex, format="csr"))


def destroy(dims: ModeDims, mode: str) -> FockOperator:
    """Annihilation operator of one mode, sqrt(n) on the first superdiagonal."""
    return FockOperator(dims, _embed(dims, mode, _destroy_matrix(dims.mode_dim(mode))))


def create(dims: ModeDims, mode: str) -> FockOperator:
    return destroy(dims, mode).dag()


def number(dims: ModeDims, mode: str) -> FockOperator:
    n = dims.mode_dim(mode)
    return FockOperator(dims, _embed(dims, mode, sp.diags(np.arange(n, dtype=float), dtype=complex, format="csr")))


def displacement(dims: ModeDims, mode: str, amp: complex) -> FockOperator:
    """Displacement operator exp(amp * adag - conj(amp) * a) of one mode.

    Built by matrix exponential (scaling and squaring) of the truncated
    anti-Hermitian generator, hence unitary to rounding on the whole space;
    it only *represents* the untruncated displacement faithfully on Fock
    levels well below the cutoff.  Warns when |amp|^2 crowds the cutoff.
    """
    n = dims.mode_dim(mode)
    if abs(amp) ** 2 > n / 4:
        warnings.warn(
            f"displacement |amp|^2 = {abs(amp)**2:.3g} is large for cutoff {n}; "
            "matrix elements near the cutoff are unreliable",
            TruncationWarning,
            stacklevel=2,
        )
    a = _destroy_matrix(n)
    gen = (amp * a.conjugate().transpose() - np.conj(amp) * a).tocsc()
    d_single = spla.expm(gen)
    return FockOperator(dims, _embed(dims, mode, sp.csr_matrix(d_single)))


# -- state constructors ----------------------------------------------------

def vacuum(dims: ModeDims) -> QuantumState:
    vec = np.zeros(dims.dim, dtype=complex)
    vec[0] = 1.0
    return QuantumState(dims, vec)


def basis(dims: ModeDims, occupations: tuple[int, int, int]) -> QuantumState:
    """Fock basis state |n_a, n_b, n_c>."""
    ns = dims.as_tuple()
    for occ, n in zip(occupations, ns):
        if not 0 <= occ < n:
            raise ValueError(f"occupation {occupations} outside cutoffs {ns}")
    idx = (occupations[0] * ns[1] + occupations[1]) * ns[2] + occupations[2]
    vec = np.zeros(dims.dim, dtype=complex)
    vec[idx] = 1.0
    return QuantumState(dims, vec)


def _coherent_vector(n: int, amp: complex, context: str, tail_tol: float = TAIL_TOL) -> np.ndarray:
    vec = np.zeros(n, dtype=complex)
    vec[0] = np.exp(-0.5 * abs(amp) ** 2)
    for k in range(1, n):
        vec[k] = vec[k - 1] * amp / np.sqrt(k)
    tail = 1.0 - float(np.vdot(vec, vec).real)
    if tail > tail_tol:
        warnings.warn(
            f"{context}: population {tail:.3g} beyond cutoff {n} (amp={amp:.4g})",
            TruncationWarning,
            stacklevel=3,
        )
    return vec / np.linalg.norm(vec)


def coherent_state(dims: ModeDims, mode: str, amp: complex) -> QuantumState:
    """Coherent state on one mode, vacuum on the others."""
    k = _mode_index(mode)
    parts = []
    for i, n in enumerate(dims.as_tuple()):
        if i == k:
            parts.append(_coherent_vector(n, amp, "coherent_state"))
        else:
            ground = np.zeros(n, dtype=complex)
            ground[0] = 1.0
            parts.append(ground)
    vec = parts[0]
    for p in parts[1:]:
        vec = np.kron(vec, p)
    return QuantumState(dims, vec)


def thermal_state(dims: ModeDims, mode: str, nbar: float) -> QuantumState:
    """Thermal (geometric) mixture on one mode, vacuum projectors on the others."""
    if nbar < 0:
        raise ValueError("nbar must be >= 0")
    k = _mode_index(mode)
    mats = []
    for i, n in enumerate(dims.as_tuple()):
        if i == k and nbar > 0:
            q = nbar / (1.0 + nbar)
            p = (1.0 - q) * q ** np.arange(n)
            tail = q ** n  # geometric tail above the cutoff
            if tail > TAIL_TOL:
                warnings.warn(
                    f"thermal_state: population {tail:.3g} beyond cutoff {n} (nbar={nbar:.4g})",
                    TruncationWarning,
                    stacklevel=2,
                )
            mats.append(np.diag(p / p.sum()))
        else:
            proj = np.zeros((n, n), dtype=float)
            proj[0, 0] = 1.0
            mats.append(proj)
    rho = mats[0]
    for m in mats[1:]:
        rho = np.kron(rho, m)
    return QuantumState(dims, rho.astype(complex))


def partial_trace(state: QuantumState, keep: str) -> QuantumState:
    """Reduced density matrix of one mode; the other cutoffs collapse to 1."""
    k = _mode_index(keep)
    ns = state.dims.as_tuple()
    rho = state.as_density().reshape(*ns, *ns)
    # trace out the two modes not kept, in descending axis order
    for axis in sorted((i for i in range(3) if i != k), reverse=True):
        rho = np.trace(rho, axis1=axis, axis2=axis + rho.ndim // 2)
    new = [1, 1, 1]
    new[k] = ns[k]
    return QuantumState(ModeDims(*new), rho)


def expectation(op: FockOperator, state: QuantumState) -> complex:
    return op.expect(state)
