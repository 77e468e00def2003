"""
Shear-building model.

The N-storey building is a chain of lumped floor masses joined by
inter-storey springs. This module builds M, K and the proportional
damping matrix C, and computes the undamped modal data.
"""
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple
import logging

import numpy as np
import scipy.linalg as la

from tmdreef.core.exceptions import InvalidModelError, NumericalError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BuildingModel:
    """
    N-storey shear building.

    masses[i] and stiffnesses[i] belong to floor i+1; stiffnesses[i] is the
    spring between floor i+1 and the floor below it (the ground for i = 0).
    damping_matrix replaces the proportional model when given.
    rayleigh_modes are the 1-based modes at which the proportional model
    hits xi_s exactly; the two lowest by default.
    """
    masses: np.ndarray
    stiffnesses: np.ndarray
    xi_s: float
    damping_matrix: Optional[np.ndarray] = field(default=None, repr=False)
    rayleigh_modes: Tuple[int, int] = (1, 2)

    def __post_init__(self):
        masses = np.asarray(self.masses, dtype=float).ravel()
        stiffnesses = np.asarray(self.stiffnesses, dtype=float).ravel()
        object.__setattr__(self, "masses", masses)
        object.__setattr__(self, "stiffnesses", stiffnesses)
        object.__setattr__(self, "xi_s", float(self.xi_s))

        if masses.size == 0:
            raise InvalidModelError("Building needs at least one floor")
        if masses.size != stiffnesses.size:
            raise InvalidModelError(
                f"Got {masses.size} masses but {stiffnesses.size} stiffnesses"
            )
        if not np.all(np.isfinite(masses)) or np.any(masses <= 0):
            raise InvalidModelError(f"Floor masses must be strictly positive: {masses.tolist()}")
        if not np.all(np.isfinite(stiffnesses)) or np.any(stiffnesses <= 0):
            raise InvalidModelError(
                f"Storey stiffnesses must be strictly positive: {stiffnesses.tolist()}"
            )
        if not 0.0 <= self.xi_s < 1.0:
            raise InvalidModelError(f"xi_s must lie in [0, 1), got {self.xi_s}")

        if self.damping_matrix is not None:
            C = np.asarray(self.damping_matrix, dtype=float)
            n = masses.size
            if C.shape != (n, n) or not np.allclose(C, C.T):
                raise InvalidModelError(f"damping_matrix must be a symmetric {n}x{n} matrix")
            object.__setattr__(self, "damping_matrix", C)

        i, j = (int(v) for v in self.rayleigh_modes)
        if not 1 <= i < j <= max(masses.size, 2):
            raise InvalidModelError(
                f"rayleigh_modes must be two distinct ascending modes in 1..{masses.size}, got {self.rayleigh_modes}"
            )
        object.__setattr__(self, "rayleigh_modes", (i, j))

    @property
    def n_floors(self) -> int:
        return int(self.masses.size)

    @classmethod
    def from_lists(cls, masses: Sequence[float], stiffnesses: Sequence[float], xi_s: float,
                   rayleigh_modes: Sequence[int] = (1, 2)) -> "BuildingModel":
        return cls(np.asarray(masses, dtype=float), np.asarray(stiffnesses, dtype=float), xi_s,
                   rayleigh_modes=tuple(rayleigh_modes))


@dataclass(frozen=True, eq=False)
class StructuralMatrices:
    """M, K and C of a building, plus the Rayleigh coefficients C = a*M + b*K if proportional."""
    M: np.ndarray
    K: np.ndarray
    C: np.ndarray
    rayleigh: Optional[tuple] = None

    @property
    def n_dof(self) -> int:
        return int(self.M.shape[0])


@dataclass(frozen=True, eq=False)
class ModalData:
    """Undamped natural frequencies (rad/s, ascending) and modal damping ratios."""
    natural_frequencies: np.ndarray
    damping_ratios: np.ndarray
    mode_shapes: Optional[np.ndarray] = field(default=None, repr=False)


def stiffness_matrix(stiffnesses: np.ndarray) -> np.ndarray:
    """Tridiagonal shear-building stiffness matrix."""
    k = np.asarray(stiffnesses, dtype=float)
    n = k.size
    K = np.zeros((n, n))
    for i in range(n):
        K[i, i] = k[i] + (k[i + 1] if i + 1 < n else 0.0)
        if i + 1 < n:
            K[i, i + 1] = K[i + 1, i] = -k[i + 1]
    return K


def undamped_frequencies(M: np.ndarray, K: np.ndarray) -> tuple:
    """
    Solve the generalized eigenproblem K phi = w^2 M phi.

    Returns:
        (omega ascending, mass-normalized mode shapes as columns)
    """
    try:
        la.cholesky(K)
        eigvals, eigvecs = la.eigh(K, M)
    except la.LinAlgError as e:
        logger.error(f"❌ Eigen-solve failed: {e}")
        raise NumericalError(f"Generalized eigen-solve of (K, M) failed: {e}") from e

    if np.any(eigvals <= 0):
        raise NumericalError(f"Non-positive eigenvalues: {eigvals.tolist()}")
    return np.sqrt(eigvals), eigvecs


def build_matrices(model: BuildingModel) -> StructuralMatrices:
    """
    Assemble M, K and C for a building.

    C = (2 xi_s w1 w2 / (w1 + w2)) M + (2 xi_s / (w1 + w2)) K with w1, w2
    the undamped frequencies of the two anchor modes (the two lowest unless
    the model says otherwise), computed from (K, M) first.
    """
    M = np.diag(model.masses)
    K = stiffness_matrix(model.stiffnesses)

    if model.damping_matrix is not None:
        return StructuralMatrices(M=M, K=K, C=model.damping_matrix.copy())

    if model.xi_s == 0.0:
        return StructuralMatrices(M=M, K=K, C=np.zeros_like(M), rayleigh=(0.0, 0.0))

    if model.n_floors < 2:
        raise InvalidModelError(
            "Proportional damping needs two modes; give a single-storey building "
            "an explicit damping_matrix or xi_s = 0"
        )

    omega, _ = undamped_frequencies(M, K)
    i, j = model.rayleigh_modes
    w1, w2 = omega[i - 1], omega[j - 1]
    a = 2.0 * model.xi_s * w1 * w2 / (w1 + w2)
    b = 2.0 * model.xi_s / (w1 + w2)
    return StructuralMatrices(M=M, K=K, C=a * M + b * K, rayleigh=(a, b))


def modal_analysis(mats: StructuralMatrices) -> ModalData:
    """
    Natural frequencies and modal damping ratios.

    With Rayleigh damping xi_i = a / (2 w_i) + b w_i / 2; for an explicit C
    the ratio is taken from the modal projection phi_i^T C phi_i / (2 w_i).
    """
    omega, phi = undamped_frequencies(mats.M, mats.K)
    if mats.rayleigh is not None:
        a, b = mats.rayleigh
        xi = a / (2.0 * omega) + b * omega / 2.0
    else:
        xi = np.einsum("ji,jk,ki->i", phi, mats.C, phi) / (2.0 * omega)
    return ModalData(natural_frequencies=omega, damping_ratios=xi, mode_shapes=phi)
