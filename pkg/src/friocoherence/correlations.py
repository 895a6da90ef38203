"""System-ancilla correlations: mutual information, classical correlations, discord.

The ancilla is always the second, two-dimensional tensor factor. Discord is
computed from the ancilla side: total correlations minus the best classical
correlations extractable by a rank-1 projective measurement of the ancilla.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ensemble import EnsembleSpec
from .linalg import DensityMatrix, partial_trace, von_neumann_entropy
from .separation import output_entropies, separation_profile

THETA_POINTS = 64
PHI_POINTS = 64
REFINE_TOL = 1e-6
DISCORD_FLOOR = -1e-8
_CHUNK = 512

__all__ = [
    "AncillaProjectorPair",
    "OptimizationFailure",
    "classical_correlation",
    "closed_form_max_j",
    "max_classical_correlation",
    "mutual_information",
    "quantum_discord",
]


class OptimizationFailure(RuntimeError):
    """The numerical maximization returned an inconsistent optimum."""


@dataclass(frozen=True)
class AncillaProjectorPair:
    """Rank-1 projective measurement of the qubit ancilla.

    The first projector is onto cos(theta)|0> + exp(i phi) sin(theta)|1>, the
    second onto its orthogonal complement; theta in [0, pi/2] and phi in
    [0, 2 pi) cover every such measurement. theta = 0 is the natural
    (computational) basis.
    """

    theta: float
    phi: float

    def __post_init__(self):
        theta = float(self.theta)
        if theta < -1e-12 or theta > np.pi / 2 + 1e-12:
            raise ValueError(f"theta {theta!r} outside [0, pi/2]")
        theta = min(max(theta, 0.0), np.pi / 2)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", float(self.phi) % (2.0 * np.pi))

    def plus_vector(self) -> np.ndarray:
        return np.array(
            [np.cos(self.theta), np.exp(1j * self.phi) * np.sin(self.theta)]
        )

    def minus_vector(self) -> np.ndarray:
        return np.array(
            [-np.exp(-1j * self.phi) * np.sin(self.theta), np.cos(self.theta)]
        )

    def projectors(self) -> np.ndarray:
        """The two 2x2 projectors, stacked; they sum to the identity."""
        plus = self.plus_vector()
        first = np.outer(plus, plus.conj())
        return np.stack([first, np.eye(2, dtype=complex) - first])


def _split_dims(rho: DensityMatrix) -> int:
    if rho.dim % 2 != 0:
        raise ValueError(
            f"expected a system x qubit-ancilla state, got odd dimension {rho.dim}"
        )
    return rho.dim // 2


def mutual_information(rho_joint) -> float:
    """Total system-ancilla correlations: S(system) + S(ancilla) - S(joint)."""
    if not isinstance(rho_joint, DensityMatrix):
        rho_joint = DensityMatrix(rho_joint)
    dim_system = _split_dims(rho_joint)
    rho_system = partial_trace(rho_joint, (dim_system, 2), over="ancilla")
    rho_ancilla = partial_trace(rho_joint, (dim_system, 2), over="system")
    value = (
        von_neumann_entropy(rho_system)
        + von_neumann_entropy(rho_ancilla)
        - von_neumann_entropy(rho_joint)
    )
    if value < -1e-9:
        raise ValueError(f"mutual information evaluated to {value!r}")
    return max(0.0, float(value))


def _conditioned_blocks(blocks: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Unnormalized conditional system blocks (I (x) <v|) rho (I (x) |v>).

    ``blocks`` is the joint matrix reshaped to (d, 2, d, 2); ``vectors`` is a
    (g, 2) stack of ancilla vectors. Returns a (g, d, d) stack.
    """
    return np.einsum("ga,manb,gb->gmn", vectors.conj(), blocks, vectors)


def _conditional_terms(stack: np.ndarray) -> np.ndarray:
    """Per block M: the weighted entropy q * S(M / q) with q = tr(M).

    Uses -sum(lam log2 lam) + q log2 q over the eigenvalues lam of M, with a
    fast path when every block is diagonal.
    """
    size = stack.shape[0]
    diagonals = np.einsum("gmm->gm", stack)
    off_mass = np.abs(stack).sum(axis=(1, 2)) - np.abs(diagonals).sum(axis=1)
    if float(off_mass.max(initial=0.0)) < 1e-13:
        eigs = diagonals.real
    else:
        eigs = np.linalg.eigvalsh(stack)
    eigs = np.where(eigs > 0.0, eigs, 1.0)  # log(1) = 0 stands in for 0 log 0
    entropy_sum = -(np.where(eigs != 1.0, eigs * np.log2(eigs), 0.0)).sum(axis=1)
    weights = diagonals.real.sum(axis=1)
    terms = np.empty(size)
    positive = weights > 1e-12
    terms[~positive] = 0.0
    terms[positive] = entropy_sum[positive] + weights[positive] * np.log2(
        weights[positive]
    )
    return terms


def _j_values(
    blocks: np.ndarray, entropy_system: float, thetas: np.ndarray, phis: np.ndarray
) -> np.ndarray:
    """Classical correlations for paired (theta, phi) arrays, vectorized."""
    plus = np.stack([np.cos(thetas), np.exp(1j * phis) * np.sin(thetas)], axis=1)
    minus = np.stack([-np.exp(-1j * phis) * np.sin(thetas), np.cos(thetas)], axis=1)
    values = np.empty(thetas.size)
    for start in range(0, thetas.size, _CHUNK):
        stop = min(start + _CHUNK, thetas.size)
        conditioned = _conditioned_blocks(blocks, plus[start:stop])
        total = _conditional_terms(conditioned)
        conditioned = _conditioned_blocks(blocks, minus[start:stop])
        total += _conditional_terms(conditioned)
        values[start:stop] = entropy_system - total
    return values


def classical_correlation(rho_joint, projectors: AncillaProjectorPair) -> float:
    """Information gained about the system by measuring the ancilla.

    S(system) minus the average conditional system entropy under the given
    rank-1 ancilla measurement.
    """
    if not isinstance(rho_joint, DensityMatrix):
        rho_joint = DensityMatrix(rho_joint)
    dim_system = _split_dims(rho_joint)
    rho_system = partial_trace(rho_joint, (dim_system, 2), over="ancilla")
    blocks = rho_joint.matrix.reshape(dim_system, 2, dim_system, 2)
    value = _j_values(
        blocks,
        von_neumann_entropy(rho_system),
        np.array([projectors.theta]),
        np.array([projectors.phi]),
    )[0]
    if value < -1e-9:
        raise ValueError(f"classical correlation evaluated to {value!r}")
    return max(0.0, float(value))


def max_classical_correlation(
    rho_joint,
    theta_points: int = THETA_POINTS,
    phi_points: int = PHI_POINTS,
    refine_tol: float = REFINE_TOL,
) -> tuple[float, AncillaProjectorPair]:
    """Classical correlations maximized over rank-1 ancilla measurements.

    Exhaustive (theta, phi) grid followed by coordinate descent with step
    halving down to ``refine_tol`` in the parameters. The objective is smooth
    and two-dimensional, so the global grid guards against local maxima; on a
    tie the smallest grid index (theta-major) wins, which keeps the returned
    maximizer reproducible.
    """
    if not isinstance(rho_joint, DensityMatrix):
        rho_joint = DensityMatrix(rho_joint)
    dim_system = _split_dims(rho_joint)
    rho_system = partial_trace(rho_joint, (dim_system, 2), over="ancilla")
    entropy_system = von_neumann_entropy(rho_system)
    blocks = rho_joint.matrix.reshape(dim_system, 2, dim_system, 2)

    thetas = np.linspace(0.0, np.pi / 2, theta_points)
    phis = np.linspace(0.0, 2.0 * np.pi, phi_points, endpoint=False)
    grid_theta, grid_phi = np.meshgrid(thetas, phis, indexing="ij")
    flat_theta = grid_theta.ravel()
    flat_phi = grid_phi.ravel()
    values = _j_values(blocks, entropy_system, flat_theta, flat_phi)
    best_index = int(np.argmax(values))
    best_value = float(values[best_index])
    theta = float(flat_theta[best_index])
    phi = float(flat_phi[best_index])

    def evaluate(candidate_theta: float, candidate_phi: float) -> float:
        return float(
            _j_values(
                blocks,
                entropy_system,
                np.array([candidate_theta]),
                np.array([candidate_phi]),
            )[0]
        )

    step_theta = float(thetas[1] - thetas[0]) if theta_points > 1 else np.pi / 4
    step_phi = float(phis[1] - phis[0]) if phi_points > 1 else np.pi / 2
    while max(step_theta, step_phi) > refine_tol:
        improved = False
        for cand_theta, cand_phi in (
            (min(theta + step_theta, np.pi / 2), phi),
            (max(theta - step_theta, 0.0), phi),
            (theta, (phi + step_phi) % (2.0 * np.pi)),
            (theta, (phi - step_phi) % (2.0 * np.pi)),
        ):
            value = evaluate(cand_theta, cand_phi)
            if value > best_value:
                best_value, theta, phi = value, cand_theta, cand_phi
                improved = True
        if not improved:
            step_theta /= 2.0
            step_phi /= 2.0
    return max(0.0, best_value), AncillaProjectorPair(theta, phi)


def quantum_discord(rho_joint, **optimizer_options) -> float:
    """Quantum correlations from the ancilla side: mutual information minus
    the maximal classical correlation.

    Values in [-1e-8, 0) are clipped to zero; anything more negative means
    the maximization overshot and is reported as a failure.
    """
    if not isinstance(rho_joint, DensityMatrix):
        rho_joint = DensityMatrix(rho_joint)
    total = mutual_information(rho_joint)
    best, _ = max_classical_correlation(rho_joint, **optimizer_options)
    value = total - best
    if value < DISCORD_FLOOR:
        raise OptimizationFailure(
            f"discord evaluated to {value!r}; classical correlations exceeded "
            "the mutual information beyond rounding"
        )
    return max(0.0, float(value))


def closed_form_max_j(spec: EnsembleSpec, xi: float) -> float:
    """Classical correlations extracted by the natural ancilla-basis measurement.

    For the separation family this measurement is the maximizer, giving
    S(input) - P S(success) - Q S(failure) with the usual zero-weight
    conventions.
    """
    profile = separation_profile(spec, xi)
    entropy_in, entropy_success, entropy_failure = output_entropies(spec, xi)
    value = entropy_in - profile.p_success * entropy_success
    if entropy_failure is not None:
        value -= profile.p_failure * entropy_failure
    return max(0.0, float(value))
