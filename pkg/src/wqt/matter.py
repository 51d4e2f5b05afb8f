"""Finite-dimensional complex matrix observables and state functionals.

This is the material corner of a weak system: here observables regain the
full *-algebra structure, states act through trace functionals, and a
representation carrier can be built from any such functional via the Gram
matrix of the algebra basis.  Exact canonical commutation relations are
impossible in finite dimension, so the clock/shift pair below realizes
the translation relation U T U^-1 = T + 1 (mod N) instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

HERMITICITY_TOL = 1e-10
PSD_TOL = 1e-10
TRACE_TOL = 1e-10
EIG_MERGE_TOL = 1e-8
GRAM_RANK_TOL = 1e-10
MULT_RESIDUAL_TOL = 1e-8


class MatterError(Exception):
    """Raised for malformed matrices or mismatched dimensions."""


@dataclass(frozen=True)
class MatrixObservable:
    """An element of the matrix algebra; not necessarily self-adjoint."""

    matrix: np.ndarray
    name: str = ""

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise MatterError("matrix observable must be square")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def adjoint(self) -> "MatrixObservable":
        return MatrixObservable(self.matrix.conj().T, name=f"{self.name}*" if self.name else "")

    def is_self_adjoint(self, tol: float = HERMITICITY_TOL) -> bool:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T))) <= tol


@dataclass(frozen=True)
class DensityState:
    """A self-adjoint, positive, trace-one matrix (checked at construction)."""

    rho: np.ndarray
    name: str = ""

    def __post_init__(self):
        r = np.asarray(self.rho, dtype=complex)
        if r.ndim != 2 or r.shape[0] != r.shape[1]:
            raise MatterError("density matrix must be square")
        if np.max(np.abs(r - r.conj().T)) > HERMITICITY_TOL:
            raise MatterError("density matrix is not self-adjoint")
        eigs = np.linalg.eigvalsh(r)
        if eigs.min() < -PSD_TOL:
            raise MatterError(f"density matrix has negative eigenvalue {eigs.min():.3e}")
        if abs(np.trace(r).real - 1.0) > TRACE_TOL:
            raise MatterError("density matrix trace differs from one")
        object.__setattr__(self, "rho", r)

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    @property
    def rank(self) -> int:
        eigs = np.linalg.eigvalsh(self.rho)
        return int(np.sum(eigs > GRAM_RANK_TOL * max(eigs.max(), 1.0)))

    @classmethod
    def pure(cls, vector: Sequence[complex], name: str = "") -> "DensityState":
        v = np.asarray(vector, dtype=complex)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()), name=name)

    @classmethod
    def maximally_mixed(cls, dim: int, name: str = "") -> "DensityState":
        return cls(np.eye(dim) / dim, name=name)


def expectation(state: DensityState, obs: MatrixObservable) -> complex:
    """trace(rho A); linear in A and real on self-adjoint A."""
    if state.dim != obs.dim:
        raise MatterError(
            f"dimension mismatch: state {state.dim}, observable {obs.dim}")
    return complex(np.trace(state.rho @ obs.matrix))


@dataclass(frozen=True)
class ExpectationFunctional:
    """The positive linear functional A -> trace(rho A) of a density state."""

    state: DensityState

    def __call__(self, obs: MatrixObservable) -> complex:
        return expectation(self.state, obs)

    @property
    def dim(self) -> int:
        return self.state.dim


@dataclass(frozen=True)
class EquivalenceCheck:
    """Result of comparing two states through a family of observables."""

    equivalent: bool
    spanning: bool
    witness: Optional[str] = None

    def __bool__(self):
        return self.equivalent


def matrix_units(dim: int) -> list:
    """The standard basis E_ij of the dim x dim matrix algebra, row-major."""
    units = []
    for i in range(dim):
        for j in range(dim):
            m = np.zeros((dim, dim), dtype=complex)
            m[i, j] = 1.0
            units.append(MatrixObservable(m, name=f"E{i}{j}"))
    return units


def physically_equivalent(z1: DensityState, z2: DensityState,
                          basis: Sequence[MatrixObservable],
                          tol: float = 1e-10) -> EquivalenceCheck:
    """Two states are physically equivalent when all basis expectations agree.

    A non-spanning basis cannot separate all states; the result then
    carries ``spanning=False`` as a warning rather than an error.
    """
    if z1.dim != z2.dim:
        raise MatterError("states have different dimensions")
    vecs = np.stack([b.matrix.reshape(-1) for b in basis])
    spanning = np.linalg.matrix_rank(vecs, tol=1e-10) == z1.dim ** 2
    for b in basis:
        if abs(expectation(z1, b) - expectation(z2, b)) > tol:
            return EquivalenceCheck(False, spanning, witness=b.name or "basis element")
    return EquivalenceCheck(True, spanning)


@dataclass(frozen=True)
class GNSResult:
    """Gram-matrix data of the representation built from a state functional."""

    gram: np.ndarray
    carrier_dim: int
    null_dim: int
    mult_residual: float

    @property
    def gram_min_eig(self) -> float:
        return float(np.linalg.eigvalsh(self.gram).min())


def gns_construct(functional: ExpectationFunctional) -> GNSResult:
    """Build the representation carrier from a positive functional.

    The Gram matrix G[m, m'] = E(B_m* B_m') over the matrix-unit basis is
    positive semidefinite; its null space is the ideal divided out, and
    the carrier dimension is its rank.  Left multiplication represented on
    the carrier is checked to be multiplicative on a fixed pair of test
    elements.
    """
    rho = functional.state.rho
    n = functional.dim
    units = matrix_units(n)
    nn = n * n
    gram = np.empty((nn, nn), dtype=complex)
    for m, bm in enumerate(units):
        left = rho @ bm.matrix.conj().T
        for mp, bmp in enumerate(units):
            gram[m, mp] = np.trace(left @ bmp.matrix)
    eigvals, eigvecs = np.linalg.eigh(gram)
    scale = max(float(eigvals.max()), 1.0)
    keep = eigvals > GRAM_RANK_TOL * scale
    carrier_dim = int(np.sum(keep))
    basis = eigvecs[:, keep] / np.sqrt(eigvals[keep])

    def represent(matrix: np.ndarray) -> np.ndarray:
        lmul = np.kron(matrix, np.eye(n))   # row-major vec: vec(AX) = (A kron I) vec(X)
        return basis.conj().T @ gram @ lmul @ basis

    rng = np.random.default_rng(7)
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    b = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    resid = float(np.max(np.abs(represent(a @ b) - represent(a) @ represent(b))))
    return GNSResult(gram, carrier_dim, nn - carrier_dim, resid)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Distinct eigenvalues with orthogonal projectors summing to identity."""

    eigenvalues: tuple
    projectors: tuple
    matches_declared: Optional[bool] = None

    def reconstruction_error(self, obs: MatrixObservable) -> float:
        total = sum(v * p for v, p in zip(self.eigenvalues, self.projectors))
        return float(np.max(np.abs(total - obs.matrix)))


def spectral_decompose(obs: MatrixObservable,
                       declared_spectrum: Optional[Sequence[float]] = None
                       ) -> SpectralDecomposition:
    """Eigendecompose a self-adjoint matrix, merging eigenvalues within tolerance."""
    if not obs.is_self_adjoint():
        raise MatterError(f"{obs.name or 'matrix'} is not self-adjoint")
    eigvals, eigvecs = np.linalg.eigh(obs.matrix)
    groups: list = []
    for k, v in enumerate(eigvals):
        if groups and abs(v - groups[-1][0][-1]) <= EIG_MERGE_TOL:
            groups[-1][0].append(v)
            groups[-1][1].append(k)
        else:
            groups.append(([v], [k]))
    values = []
    projectors = []
    for vals, idx in groups:
        values.append(float(np.mean(vals)))
        vecs = eigvecs[:, idx]
        projectors.append(vecs @ vecs.conj().T)
    matches = None
    if declared_spectrum is not None:
        declared = sorted(float(v) for v in declared_spectrum)
        matches = (len(declared) == len(values)
                   and all(abs(a - b) <= EIG_MERGE_TOL
                           for a, b in zip(declared, values)))
    return SpectralDecomposition(tuple(values), tuple(projectors), matches)


@dataclass(frozen=True)
class WeylPair:
    """Clock T = diag(0..N-1) and cyclic shift U with U T U^-1 = T + 1 (mod N).

    Matrices are integer-valued, so the defining relation can be checked
    exactly; float copies are provided for numeric work.
    """

    modulus: int
    clock: np.ndarray   # integer diagonal
    shift: np.ndarray   # 0/1 permutation, unitary

    @property
    def clock_f(self) -> np.ndarray:
        return self.clock.astype(float)

    @property
    def shift_f(self) -> np.ndarray:
        return self.shift.astype(float)

    def relation_defect(self) -> np.ndarray:
        """U T U^-1 - (T + 1 mod N), exactly, as an integer matrix."""
        utu = self.shift @ self.clock @ self.shift.T
        shifted = np.diag((np.diag(self.clock) + 1) % self.modulus)
        return utu - shifted

    def relation_exact(self) -> bool:
        return not self.relation_defect().any()


def weyl_pair(modulus: int) -> WeylPair:
    """Construct the finite clock/shift pair for a given modulus."""
    if modulus < 2:
        raise MatterError("weyl pair needs modulus >= 2")
    n = modulus
    clock = np.diag(np.arange(n, dtype=object))
    shift = np.zeros((n, n), dtype=object)
    for j in range(n):
        shift[(j + 1) % n, j] = 1
    # sanity: this orientation advances the clock: U T U^T = T + 1 (mod N)
    return WeylPair(n, clock, shift)


def dephase(state: DensityState, basis: Optional[np.ndarray] = None) -> DensityState:
    """Remove coherences in the pointer basis, keeping the diagonal.

    With ``basis`` a unitary U, the diagonal is kept in the rotated frame
    U* rho U; default is the computational basis.  Idempotent and
    trace-preserving.
    """
    rho = state.rho
    if basis is not None:
        u = np.asarray(basis, dtype=complex)
        if np.max(np.abs(u.conj().T @ u - np.eye(state.dim))) > 1e-10:
            raise MatterError("pointer basis must be unitary")
        rotated = u.conj().T @ rho @ u
        out = u @ np.diag(np.diag(rotated)) @ u.conj().T
    else:
        out = np.diag(np.diag(rho))
    return DensityState(out, name=f"dephased_{state.name}" if state.name else "")


def purity(state: DensityState) -> float:
    return float(np.trace(state.rho @ state.rho).real)
