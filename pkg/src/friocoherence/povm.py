"""POVMs for the discrimination strategies and the generic coherence evaluator.

Three measurement families are built here: the best deterministic
identification measurement, the standard fixed-inconclusive-rate measurement
(identification elements plus one inconclusive outcome), and its concatenated
variant that also identifies the failed branch.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ensemble import EnsembleSpec
from .linalg import DensityMatrix, shannon_entropy, von_neumann_entropy
from .separation import separation_detection_operators

COMPLETENESS_ATOL = 1e-10
ELEMENT_EIG_FLOOR = -1e-10
OUTCOME_EPS = 1e-12
COHERENCE_FLOOR = -1e-9

__all__ = [
    "Povm",
    "concatenated_povm",
    "frio_povm",
    "me_povm",
    "measure",
    "povm_coherence",
    "uniform_phase_states",
]


@dataclass(frozen=True)
class Povm:
    """Ordered detection operators with a declared diagonal support projector.

    ``detection_ops`` has shape (outcomes, dim, dim); ``support`` is the 0/1
    diagonal of the projector the elements must resolve.
    """

    detection_ops: np.ndarray
    support: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        ops = np.array(self.detection_ops, dtype=complex)
        if ops.ndim != 3 or ops.shape[1] != ops.shape[2]:
            raise ValueError(f"detection operators must be (k, d, d), got {ops.shape}")
        support = np.array(self.support, dtype=float)
        if support.shape != (ops.shape[1],) or not np.all((support == 0.0) | (support == 1.0)):
            raise ValueError("support must be a 0/1 vector matching the operator dimension")
        labels = tuple(self.labels)
        if len(labels) != ops.shape[0]:
            raise ValueError("need one label per detection operator")
        elements = np.einsum("kij,kil->kjl", ops.conj(), ops)
        residual = float(np.abs(elements.sum(axis=0) - np.diag(support)).max())
        if residual > COMPLETENESS_ATOL:
            raise ValueError(
                f"POVM completeness residual {residual:.3e} exceeds {COMPLETENESS_ATOL}"
            )
        smallest = min(float(np.linalg.eigvalsh(e)[0]) for e in elements)
        if smallest < ELEMENT_EIG_FLOOR:
            raise ValueError(f"POVM element has negative eigenvalue {smallest:.3e}")
        ops.flags.writeable = False
        support.flags.writeable = False
        object.__setattr__(self, "detection_ops", ops)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "labels", labels)

    @property
    def num_outcomes(self) -> int:
        return self.detection_ops.shape[0]

    @property
    def dim(self) -> int:
        return self.detection_ops.shape[1]

    def elements(self) -> np.ndarray:
        """Positive elements A_i^dagger A_i, stacked."""
        ops = self.detection_ops
        return np.einsum("kij,kil->kjl", ops.conj(), ops)


def uniform_phase_states(spec: EnsembleSpec) -> np.ndarray:
    """Rows are the maximally distinguishable phase states on the support.

    These are the xi = 1 limits of the separated states: uniform amplitude
    1/sqrt(n) on the support, phased by root-of-unity powers. They are
    mutually orthogonal exactly when the ensemble spans the full space.
    """
    n_states = spec.num_states
    indices = np.arange(n_states)
    phases = np.exp(2j * np.pi * np.outer(indices, indices) / n_states)
    amplitude = np.where(spec.support, 1.0 / np.sqrt(spec.support_dim), 0.0)
    return phases * amplitude[np.newaxis, :]


def _identification_roots(spec: EnsembleSpec) -> np.ndarray:
    """Stack of sqrt(n/N) |u_j><u_j|: the positive roots of the identification elements.

    The root is exact because each element is a scaled rank-1 projector; the
    generic eigendecomposition square root is kept as a test oracle.
    """
    states = uniform_phase_states(spec)
    scale = np.sqrt(spec.support_dim / spec.num_states)
    return scale * np.einsum("jk,jl->jkl", states, states.conj())


def me_povm(spec: EnsembleSpec) -> Povm:
    """Best deterministic identification measurement: N rank-1 elements."""
    ops = _identification_roots(spec)
    labels = tuple(str(j) for j in range(spec.num_states))
    return Povm(ops, spec.support.astype(float), labels)


def frio_povm(spec: EnsembleSpec, xi: float) -> Povm:
    """Identification with a fixed inconclusive rate: N + 1 outcomes.

    Conclusive operators compose the identification roots with the separation
    success operator; the lone inconclusive outcome is the failure operator.
    """
    op_success, op_failure = separation_detection_operators(spec, xi)
    conclusive = _identification_roots(spec) @ op_success
    ops = np.concatenate([conclusive, op_failure[np.newaxis]], axis=0)
    labels = (*(str(j) for j in range(spec.num_states)), "?")
    return Povm(ops, spec.support.astype(float), labels)


def concatenated_povm(spec: EnsembleSpec, xi: float) -> Povm:
    """Identification of both branches: 2N outcomes, all postmeasurement states pure."""
    op_success, op_failure = separation_detection_operators(spec, xi)
    roots = _identification_roots(spec)
    ops = np.concatenate([roots @ op_success, roots @ op_failure], axis=0)
    labels = (
        *(str(j) for j in range(spec.num_states)),
        *(f"?{j}" for j in range(spec.num_states)),
    )
    return Povm(ops, spec.support.astype(float), labels)


def measure(povm: Povm, rho) -> list[tuple[float, DensityMatrix | None]]:
    """Outcome probabilities and normalized postmeasurement states.

    States are omitted (None) for outcomes whose probability is at most
    1e-12, which also keeps the 0 log 0 convention exact downstream.
    """
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(rho)
    if rho.dim != povm.dim:
        raise ValueError(f"state dimension {rho.dim} does not match POVM dimension {povm.dim}")
    inside = povm.support[:, np.newaxis] * rho.matrix * povm.support[np.newaxis, :]
    if float(np.abs(rho.matrix - inside).max()) > 1e-10:
        raise ValueError("state has weight outside the measurement support")
    results: list[tuple[float, DensityMatrix | None]] = []
    total = 0.0
    for op in povm.detection_ops:
        transformed = op @ rho.matrix @ op.conj().T
        probability = max(0.0, float(np.trace(transformed).real))
        total += probability
        if probability > OUTCOME_EPS:
            results.append((probability, DensityMatrix(transformed / probability)))
        else:
            results.append((probability, None))
    if abs(total - 1.0) > 1e-10:
        raise ValueError(f"outcome probabilities sum to {total!r}, expected 1")
    return results


def povm_coherence(rho, povm: Povm) -> float:
    """Coherence cost of implementing the POVM on the state, in bits.

    Entropy of the outcome distribution, plus the average postmeasurement
    entropy, minus the input entropy. Nonnegative and bounded by the log of
    the outcome count; values outside those bounds beyond 1e-9 are errors
    rather than clipped.
    """
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(rho)
    outcomes = measure(povm, rho)
    probabilities = np.array([p for p, _ in outcomes])
    value = shannon_entropy(probabilities) - von_neumann_entropy(rho)
    value += sum(p * von_neumann_entropy(state) for p, state in outcomes if state is not None)
    if value < COHERENCE_FLOOR:
        raise ValueError(f"coherence evaluated to {value!r}, below the rounding floor")
    upper = float(np.log2(povm.num_outcomes))
    if value > upper + 1e-9:
        raise ValueError(f"coherence {value!r} exceeds the outcome-count bound {upper!r}")
    return max(0.0, float(value))
