"""The probabilistic separation step that trades success rate for distinguishability.

Everything the two-outcome separation of a symmetric ensemble produces:
success/failure probabilities, output amplitude profiles, the diagonal
detection operators, the joint system-ancilla state, the ancilla state, and
the two closed-form coherences of the stage.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ensemble import EnsembleSpec
from .linalg import DensityMatrix, binary_entropy, shannon_entropy

XI_ATOL = 1e-12
NO_FAILURE_EPS = 1e-12

__all__ = [
    "NoFailureBranchError",
    "SeparationProfile",
    "ancilla_coherence",
    "ancilla_eigenvalues",
    "ancilla_state",
    "bipartite_state",
    "effective_min_coefficient",
    "failure_coefficients",
    "output_density_matrices",
    "output_entropies",
    "separation_coherence",
    "separation_detection_operators",
    "separation_profile",
    "success_coefficients",
    "success_failure_probabilities",
]


class NoFailureBranchError(ValueError):
    """The ensemble separates deterministically; failure states are undefined."""


def _check_xi(xi: float) -> float:
    xi = float(xi)
    if xi < -XI_ATOL or xi > 1.0 + XI_ATOL:
        raise ValueError(f"separation parameter {xi!r} outside [0, 1]")
    return min(max(xi, 0.0), 1.0)


def effective_min_coefficient(spec: EnsembleSpec) -> tuple[float, int]:
    """Smallest supported coefficient with the parallel-set convention.

    A one-dimensional (parallel) ensemble cannot be made more distinguishable,
    so its effective minimum is 0 with multiplicity 0; this forces the success
    probability to vanish for any xi > 0.
    """
    if spec.support_dim == 1:
        return 0.0, 0
    return spec.smallest_coefficient()


def success_failure_probabilities(spec: EnsembleSpec, xi: float) -> tuple[float, float]:
    """Optimal success and failure probabilities of the separation step.

    At xi = 0 the step is the identity and always succeeds. A parallel input
    with xi > 0 always fails. An ensemble that is already uniform over its
    support (n * a_min^2 = 1) never fails, whatever xi.
    """
    xi = _check_xi(xi)
    if spec.support_dim == 1:
        return (1.0, 0.0) if xi == 0.0 else (0.0, 1.0)
    a_min, _ = spec.smallest_coefficient()
    weight = spec.support_dim * a_min * a_min
    if weight >= 1.0 - NO_FAILURE_EPS:
        return 1.0, 0.0
    p = weight / ((1.0 - xi) * weight + xi)
    return p, 1.0 - p


def success_coefficients(spec: EnsembleSpec, xi: float) -> np.ndarray:
    """Amplitude profile after a successful separation.

    Interpolates each supported squared coefficient linearly toward the
    uniform value 1/n; xi = 0 returns the input profile, xi = 1 the maximally
    distinguishable one.
    """
    xi = _check_xi(xi)
    squared = (1.0 - xi) * spec.coefficients**2 + xi / spec.support_dim
    return np.where(spec.support, np.sqrt(squared), 0.0)


def failure_coefficients(spec: EnsembleSpec) -> np.ndarray:
    """Amplitude profile after a failed separation; independent of xi.

    Exactly ``multiplicity`` supported entries vanish, so the failed outputs
    span ``support_dim - multiplicity`` dimensions.

    Raises:
        NoFailureBranchError: when the supported profile is already uniform,
            in which case the separation never fails.
    """
    a_min, _ = effective_min_coefficient(spec)
    weight = spec.support_dim * a_min * a_min
    if weight >= 1.0 - NO_FAILURE_EPS:
        raise NoFailureBranchError("separation of this ensemble cannot fail")
    squared = (spec.coefficients**2 - a_min * a_min) / (1.0 - weight)
    squared = np.where(spec.support, np.maximum(squared, 0.0), 0.0)
    return np.sqrt(squared)


@dataclass(frozen=True)
class SeparationProfile:
    """Everything the separation step yields for one (ensemble, xi) point.

    ``failure_coefficients`` is None whenever the failure probability is
    zero, in which case every failure-weighted quantity downstream is zero
    by convention.
    """

    xi: float
    a_min: float
    multiplicity: int
    p_success: float
    p_failure: float
    success_coefficients: np.ndarray
    failure_coefficients: np.ndarray | None


def separation_profile(spec: EnsembleSpec, xi: float) -> SeparationProfile:
    xi = _check_xi(xi)
    a_min, multiplicity = effective_min_coefficient(spec)
    p, q = success_failure_probabilities(spec, xi)
    failed = failure_coefficients(spec) if q > NO_FAILURE_EPS else None
    return SeparationProfile(
        xi=xi,
        a_min=a_min,
        multiplicity=multiplicity,
        p_success=p,
        p_failure=q,
        success_coefficients=success_coefficients(spec, xi),
        failure_coefficients=failed,
    )


def separation_detection_operators(
    spec: EnsembleSpec, xi: float
) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal success/failure detection operators on the input basis.

    The success operator rescales each supported amplitude from a_k to
    sqrt(P) b_k; the failure operator to sqrt(Q) btilde_k. Together they
    resolve the support projector, and applying the success operator to any
    ensemble state reproduces the corresponding separated state after
    renormalization.
    """
    profile = separation_profile(spec, xi)
    support = spec.support
    safe = np.where(support, spec.coefficients, 1.0)
    diag_success = np.where(
        support,
        np.sqrt(profile.p_success) * profile.success_coefficients / safe,
        0.0,
    )
    if profile.failure_coefficients is None:
        diag_failure = np.zeros_like(diag_success)
    else:
        diag_failure = np.where(
            support,
            np.sqrt(profile.p_failure) * profile.failure_coefficients / safe,
            0.0,
        )
    return np.diag(diag_success.astype(complex)), np.diag(diag_failure.astype(complex))


def output_density_matrices(
    spec: EnsembleSpec, xi: float
) -> tuple[DensityMatrix, DensityMatrix | None]:
    """Average output states of the success and failure branches.

    The probability-weighted mixture of the two reproduces the input state.
    The failure matrix is None when the failure probability is zero.
    """
    profile = separation_profile(spec, xi)
    rho_success = DensityMatrix(np.diag((profile.success_coefficients**2).astype(complex)))
    rho_failure = None
    if profile.failure_coefficients is not None:
        rho_failure = DensityMatrix(
            np.diag((profile.failure_coefficients**2).astype(complex))
        )
    return rho_success, rho_failure


def output_entropies(spec: EnsembleSpec, xi: float) -> tuple[float, float, float | None]:
    """Entropies (bits) of the input, success, and failure average states.

    All three states are diagonal, so these are Shannon entropies of the
    squared amplitude profiles. The failure entropy is None when that branch
    is absent.
    """
    profile = separation_profile(spec, xi)
    weights_in = np.where(spec.support, spec.coefficients**2, 0.0)
    entropy_in = shannon_entropy(weights_in)
    entropy_success = shannon_entropy(profile.success_coefficients**2)
    entropy_failure = None
    if profile.failure_coefficients is not None:
        entropy_failure = shannon_entropy(profile.failure_coefficients**2)
    return entropy_in, entropy_success, entropy_failure


_ANCILLA_FAILED = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)  # |0><0|
_ANCILLA_SUCCEEDED = np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex)  # |1><1|
_FLIP = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)


def _branch_overlap(profile: SeparationProfile) -> float:
    """Sum of products of success and failure amplitudes (0 without a failure branch)."""
    if profile.failure_coefficients is None:
        return 0.0
    return float((profile.success_coefficients * profile.failure_coefficients).sum())


def bipartite_state(spec: EnsembleSpec, xi: float) -> DensityMatrix:
    """Joint system-ancilla state after the separation coupling.

    Tensor order is system (x) ancilla with ancilla basis (|0>, |1>); the
    ancilla reads |1> on success and |0> on failure. Tracing out the ancilla
    returns the input state exactly.
    """
    profile = separation_profile(spec, xi)
    rho_success = np.diag((profile.success_coefficients**2).astype(complex))
    joint = profile.p_success * np.kron(rho_success, _ANCILLA_SUCCEEDED)
    if profile.failure_coefficients is not None:
        rho_failure = np.diag((profile.failure_coefficients**2).astype(complex))
        cross = np.diag(
            (profile.success_coefficients * profile.failure_coefficients).astype(complex)
        )
        joint = joint + profile.p_failure * np.kron(rho_failure, _ANCILLA_FAILED)
        joint = joint + np.sqrt(profile.p_success * profile.p_failure) * np.kron(
            cross, _FLIP
        )
    return DensityMatrix(joint)


def ancilla_state(spec: EnsembleSpec, xi: float) -> DensityMatrix:
    """Reduced ancilla state after the coupling, in the basis (|0>, |1>)."""
    profile = separation_profile(spec, xi)
    off = np.sqrt(profile.p_success * profile.p_failure) * _branch_overlap(profile)
    matrix = np.array(
        [[profile.p_failure, off], [off, profile.p_success]], dtype=complex
    )
    return DensityMatrix(matrix)


def ancilla_eigenvalues(spec: EnsembleSpec, xi: float) -> tuple[float, float]:
    """Closed-form ancilla spectrum (larger eigenvalue first)."""
    profile = separation_profile(spec, xi)
    overlap = _branch_overlap(profile)
    discriminant = 1.0 - 4.0 * profile.p_success * profile.p_failure * (
        1.0 - overlap * overlap
    )
    root = np.sqrt(max(0.0, discriminant))
    return (1.0 + root) / 2.0, (1.0 - root) / 2.0


def ancilla_coherence(spec: EnsembleSpec, xi: float) -> float:
    """Basis coherence created in the ancilla: H2(P) minus the ancilla entropy."""
    profile = separation_profile(spec, xi)
    larger, _ = ancilla_eigenvalues(spec, xi)
    return max(0.0, binary_entropy(profile.p_success) - binary_entropy(larger))


def separation_coherence(spec: EnsembleSpec, xi: float) -> float:
    """Coherence cost of implementing the two-outcome separation on the input.

    Closed form: H2(P) + P S(success) + Q S(failure) - S(input), with the
    failure term dropped when that branch is absent.
    """
    profile = separation_profile(spec, xi)
    entropy_in, entropy_success, entropy_failure = output_entropies(spec, xi)
    value = binary_entropy(profile.p_success) + profile.p_success * entropy_success
    if entropy_failure is not None:
        value += profile.p_failure * entropy_failure
    value -= entropy_in
    return max(0.0, value)
