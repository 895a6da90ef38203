"""Symmetric-state ensembles: construction, distinguishability, sampling.

An ensemble is a set of N equiprobable pure states that share one
nonnegative amplitude profile and differ only by powers of the primitive
N-th root of unity applied along the computational basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .linalg import DensityMatrix

SUPPORT_EPS = 1e-12
NORM_ATOL = 1e-10
MIN_COEFF_RTOL = 1e-9

__all__ = [
    "EnsembleSpec",
    "coefficient_family",
    "distinguishability",
    "input_density_matrix",
    "iter_random_specs",
    "p_correct",
    "sample_random_spec",
    "symmetric_states",
]


@dataclass(frozen=True)
class EnsembleSpec:
    """Amplitude profile of N equiprobable symmetric pure states.

    State j applies the phase ``omega**(j*k)`` to basis entry k, where
    ``omega = exp(2j*pi/N)``. Coefficients at or below ``SUPPORT_EPS`` lie
    outside the support; the number of supported entries is the dimension
    the ensemble actually spans.
    """

    coefficients: np.ndarray

    def __post_init__(self):
        a = np.array(self.coefficients, dtype=float)
        if a.ndim != 1 or a.size < 2:
            raise ValueError("need a one-dimensional list of at least two coefficients")
        if float(a.min()) < -1e-12:
            raise ValueError(f"coefficients must be nonnegative, got {a.min()!r}")
        a = np.where(a < 0.0, 0.0, a)
        norm = float((a**2).sum())
        if abs(norm - 1.0) > NORM_ATOL:
            raise ValueError(f"squared coefficients sum to {norm!r}, expected 1")
        if not np.any(a > SUPPORT_EPS):
            raise ValueError("ensemble has empty support")
        a.flags.writeable = False
        object.__setattr__(self, "coefficients", a)

    @classmethod
    def from_raw(cls, values: Sequence[float], normalize: bool = False) -> "EnsembleSpec":
        """Build a spec from plain numbers, optionally rescaling to unit norm.

        Normalization is meant for hand-typed inputs (CLI literals rounded to
        a few decimals); exact constructions should pass vectors that already
        satisfy the 1e-10 norm tolerance.
        """
        a = np.asarray(list(values), dtype=float)
        if normalize:
            if a.ndim != 1 or a.size < 2:
                raise ValueError("need at least two coefficients")
            if float(a.min()) < 0.0:
                raise ValueError("coefficients must be nonnegative")
            norm = float(np.sqrt((a**2).sum()))
            if norm <= 0.0:
                raise ValueError("coefficients are all zero")
            a = a / norm
        return cls(a)

    @property
    def num_states(self) -> int:
        return self.coefficients.size

    @property
    def support(self) -> np.ndarray:
        """Boolean mask of the supported basis entries."""
        return self.coefficients > SUPPORT_EPS

    @property
    def support_dim(self) -> int:
        return int(self.support.sum())

    def smallest_coefficient(self) -> tuple[float, int]:
        """Smallest supported coefficient and its multiplicity.

        Ties are resolved with a 1e-9 relative tolerance so the multiplicity
        is stable under rounding of equal inputs.
        """
        supported = self.coefficients[self.support]
        a_min = float(supported.min())
        multiplicity = int((supported <= a_min * (1.0 + MIN_COEFF_RTOL)).sum())
        return a_min, multiplicity


def symmetric_states(spec: EnsembleSpec) -> np.ndarray:
    """The N ensemble states as rows of an (N, N) complex array."""
    n_states = spec.num_states
    indices = np.arange(n_states)
    phases = np.exp(2j * np.pi * np.outer(indices, indices) / n_states)
    amplitudes = np.where(spec.support, spec.coefficients, 0.0)
    return phases * amplitudes[np.newaxis, :]


def input_density_matrix(spec: EnsembleSpec) -> DensityMatrix:
    """Uniform average of the ensemble states: diag of the squared profile.

    The root-of-unity phases cancel in the average, so the matrix is exactly
    diagonal.
    """
    weights = np.where(spec.support, spec.coefficients**2, 0.0)
    return DensityMatrix(np.diag(weights.astype(complex)))


def p_correct(spec: EnsembleSpec) -> float:
    """Best average probability of naming the prepared state: (sum_k a_k)^2 / N."""
    total = float(spec.coefficients.sum())
    return total * total / spec.num_states


def distinguishability(spec: EnsembleSpec) -> float:
    """Rescaled excess of ``p_correct`` over blind guessing, in [0, n/N].

    A parallel set (single supported entry) carries no information, so its
    distinguishability is defined to be 0.
    """
    n = spec.support_dim
    if n == 1:
        return 0.0
    return n / (n - 1) * (p_correct(spec) - 1.0 / spec.num_states)


def coefficient_family(a0: float, a_min: float, num_states: int) -> EnsembleSpec:
    """Three-coefficient family (a0, a_min, remainder, 0, ..., 0).

    The third coefficient absorbs the rest of the normalization; indices
    beyond the first three are zero-padded up to ``num_states``.
    """
    if not 0.0 <= a_min <= a0:
        raise ValueError(f"need 0 <= a_min <= a0, got a_min={a_min}, a0={a0}")
    if a0**2 + a_min**2 > 1.0 + 1e-12:
        raise ValueError(f"a0^2 + a_min^2 = {a0 ** 2 + a_min ** 2!r} exceeds 1")
    if num_states < 3:
        raise ValueError("the family needs at least three basis entries")
    rest = float(np.sqrt(max(0.0, 1.0 - a0**2 - a_min**2)))
    coefficients = np.zeros(num_states)
    coefficients[:3] = (a0, a_min, rest)
    return EnsembleSpec(coefficients)


def iter_random_specs(
    num_states: int,
    support_dim: int,
    count: int,
    seed: int,
    support_indices: Sequence[int] | None = None,
) -> Iterator[EnsembleSpec]:
    """Deterministic stream of random ensembles.

    The squared supported coefficients are uniform on the simplex
    (normalized independent standard-exponential draws). Nonzero entries sit
    at the first ``support_dim`` indices unless ``support_indices`` says
    otherwise. Draws whose smallest squared coefficient falls below 1e-9 are
    redrawn so the support mask stays stable; the excluded region is of
    negligible measure.
    """
    if not 1 <= support_dim <= num_states:
        raise ValueError(f"need 1 <= support_dim <= num_states, got {support_dim}")
    if support_indices is None:
        indices = np.arange(support_dim)
    else:
        indices = np.asarray(list(support_indices), dtype=int)
        if indices.size != support_dim or np.unique(indices).size != support_dim:
            raise ValueError("support_indices must list support_dim distinct indices")
        if indices.min() < 0 or indices.max() >= num_states:
            raise ValueError("support index out of range")
    rng = np.random.default_rng(seed)
    for _ in range(count):
        while True:
            squared = rng.standard_exponential(support_dim)
            squared /= squared.sum()
            if support_dim == 1 or float(squared.min()) > 1e-9:
                break
        coefficients = np.zeros(num_states)
        coefficients[indices] = np.sqrt(squared)
        yield EnsembleSpec(coefficients)


def sample_random_spec(
    num_states: int,
    support_dim: int,
    seed: int,
    support_indices: Sequence[int] | None = None,
) -> EnsembleSpec:
    """First element of the seeded random stream; same seed, same spec."""
    return next(iter_random_specs(num_states, support_dim, 1, seed, support_indices))
