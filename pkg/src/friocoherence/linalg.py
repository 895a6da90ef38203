"""Dense complex Hermitian linear algebra and entropy kernels.

Conventions shared by the whole package:

* every entropy is in bits (base-2 logarithms);
* eigenvalues in ``[-1e-10, 0)`` are rounding noise and are clipped to zero
  before any logarithm is taken; anything more negative is a hard error,
  because it signals a genuinely invalid state rather than float dust.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITIAN_ATOL = 1e-12
TRACE_ATOL = 1e-10
EIGENVALUE_FLOOR = -1e-10
PROB_FLOOR = -1e-12
PROB_SUM_ATOL = 1e-10

__all__ = [
    "DensityMatrix",
    "NotHermitianError",
    "ProbabilityVector",
    "binary_entropy",
    "hermitian_eigen",
    "partial_trace",
    "shannon_entropy",
    "von_neumann_entropy",
]


class NotHermitianError(ValueError):
    """A matrix violated the Hermiticity tolerance.

    The worst offending entry index (row, column) and its deviation are kept
    on the exception for diagnostics.
    """

    def __init__(self, index: tuple[int, int], deviation: float):
        self.index = index
        self.deviation = deviation
        super().__init__(
            f"matrix is not Hermitian: |M - M^dagger| = {deviation:.3e} "
            f"at entry {index}"
        )


def _require_hermitian(matrix: np.ndarray, atol: float = HERMITIAN_ATOL) -> None:
    deviation = np.abs(matrix - matrix.conj().T)
    worst = float(deviation.max())
    if worst > atol:
        row, col = np.unravel_index(int(deviation.argmax()), deviation.shape)
        raise NotHermitianError((int(row), int(col)), worst)


@dataclass(frozen=True)
class DensityMatrix:
    """Complex Hermitian, positive-semidefinite, unit-trace matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {m.shape}")
        _require_hermitian(m)
        trace = float(m.trace().real)
        if abs(trace - 1.0) > TRACE_ATOL:
            raise ValueError(f"density matrix trace is {trace!r}, expected 1")
        smallest = float(np.linalg.eigvalsh(m)[0])
        if smallest < EIGENVALUE_FLOOR:
            raise ValueError(
                f"density matrix has negative eigenvalue {smallest:.3e}"
            )
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        """Spectrum sorted descending, with rounding noise clipped to zero."""
        values = np.linalg.eigvalsh(self.matrix)[::-1]
        return np.where(values < 0.0, 0.0, values)

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)


@dataclass(frozen=True)
class ProbabilityVector:
    """Discrete probability distribution; tiny negative entries are clipped."""

    entries: np.ndarray

    def __post_init__(self):
        p = np.array(self.entries, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("probability vector must be one-dimensional and nonempty")
        smallest = float(p.min())
        if smallest < PROB_FLOOR:
            raise ValueError(f"negative probability {smallest:.3e}")
        p = np.where(p < 0.0, 0.0, p)
        total = float(p.sum())
        if abs(total - 1.0) > PROB_SUM_ATOL:
            raise ValueError(f"probabilities sum to {total!r}, expected 1")
        p.flags.writeable = False
        object.__setattr__(self, "entries", p)

    @property
    def size(self) -> int:
        return self.entries.size


def hermitian_eigen(matrix) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns the eigenvalues sorted in descending order together with the
    matching unitary of column eigenvectors, so that
    ``matrix == vectors @ diag(values) @ vectors.conj().T``.

    Raises:
        NotHermitianError: if the input deviates from Hermiticity by more
            than ``HERMITIAN_ATOL`` anywhere; the offending entry is named.
    """
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    _require_hermitian(m)
    values, vectors = np.linalg.eigh(m)
    return values[::-1].copy(), vectors[:, ::-1].copy()


def _entropy_bits(values: np.ndarray) -> float:
    positive = values[values > 0.0]
    if positive.size == 0:
        return 0.0
    return float(-(positive * np.log2(positive)).sum() + 0.0)  # +0.0 kills -0.0


def shannon_entropy(probabilities) -> float:
    """Shannon entropy in bits, with the 0 log 0 := 0 convention."""
    if not isinstance(probabilities, ProbabilityVector):
        probabilities = ProbabilityVector(np.asarray(probabilities, dtype=float))
    return _entropy_bits(probabilities.entries)


def von_neumann_entropy(rho) -> float:
    """Entropy of a density matrix in bits: -sum(lambda * log2(lambda))."""
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(rho)
    return _entropy_bits(rho.eigenvalues())


def binary_entropy(x: float) -> float:
    """Entropy of a biased coin in bits; H2(0) = H2(1) = 0."""
    if x < -1e-12 or x > 1.0 + 1e-12:
        raise ValueError(f"binary entropy argument {x!r} outside [0, 1]")
    x = min(max(float(x), 0.0), 1.0)
    return _entropy_bits(np.array([x, 1.0 - x]))


def partial_trace(rho, dims: tuple[int, int], over: str = "ancilla") -> DensityMatrix:
    """Trace out one factor of a system (x) ancilla bipartition.

    ``dims`` declares the factor dimensions in tensor order (system first,
    ancilla second); ``over`` names the factor to remove.
    """
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(rho)
    dim_system, dim_ancilla = dims
    if dim_system * dim_ancilla != rho.dim:
        raise ValueError(
            f"dimensions {dims} do not factor the {rho.dim}-dimensional state"
        )
    blocks = rho.matrix.reshape(dim_system, dim_ancilla, dim_system, dim_ancilla)
    if over == "ancilla":
        reduced = np.einsum("ajbj->ab", blocks)
    elif over == "system":
        reduced = np.einsum("iaib->ab", blocks)
    else:
        raise ValueError(f"subsystem label must be 'system' or 'ancilla', got {over!r}")
    return DensityMatrix(reduced)
