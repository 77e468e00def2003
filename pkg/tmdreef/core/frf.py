"""
Frequency response of the building with TMDs attached.

Primary path: assemble the (N+M)-DOF augmented system and solve
(K - w^2 M + j w C) U = -M r for unit ground acceleration at every grid
frequency. The floor absolute acceleration is y_i = 1 - w^2 u_i.
The fitness is the largest refined peak of |y_i| over all floors.
"""
from concurrent.futures import Executor
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Tuple
import logging

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import minimize_scalar

from tmdreef.core.config import get_settings
from tmdreef.core.exceptions import InconclusiveError, InvalidDesignError, SingularSystemError
from tmdreef.core.schemas import FrfConfig
from tmdreef.core.structure import BuildingModel, StructuralMatrices, build_matrices, modal_analysis
from tmdreef.core.tmd import TmdDesign, physical_coefficients

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class AugmentedSystem:
    """
    Building plus TMDs. Coordinates: N floor displacements, then M TMD
    displacements, all relative to the ground.
    """
    M: np.ndarray
    C: np.ndarray
    K: np.ndarray
    n_floors: int
    n_tmds: int

    @property
    def n_dof(self) -> int:
        return self.n_floors + self.n_tmds

    @cached_property
    def active_dofs(self) -> np.ndarray:
        """Floors plus every TMD with a non-zero mass; zero-mass TMD rows are all zero."""
        tmd_mass = np.diag(self.M)[self.n_floors:]
        tmd_idx = self.n_floors + np.flatnonzero(tmd_mass > 0)
        return np.concatenate([np.arange(self.n_floors), tmd_idx]).astype(int)

    @cached_property
    def reduced(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(M, C, K) restricted to the active coordinates."""
        idx = self.active_dofs
        sel = np.ix_(idx, idx)
        return self.M[sel], self.C[sel], self.K[sel]


@dataclass(frozen=True, eq=False)
class FrfCurves:
    """|Y_i / A_g| per floor (rows) over the frequency grid (columns), linear scale."""
    omega_grid: np.ndarray
    magnitudes: np.ndarray

    @property
    def n_floors(self) -> int:
        return int(self.magnitudes.shape[0])

    def to_db(self) -> np.ndarray:
        return 20.0 * np.log10(self.magnitudes)


@dataclass(frozen=True)
class FitnessValue:
    """Peak magnitude over floors and frequencies, with where it occurs."""
    value: float
    argmax_floor: int
    argmax_omega: float

    @property
    def db(self) -> float:
        return float(20.0 * np.log10(self.value))


def assemble(building: BuildingModel, design: TmdDesign,
             mats: Optional[StructuralMatrices] = None) -> AugmentedSystem:
    """
    Attach every TMD to its floor.

    For TMD j on floor i: k_t enters (i, i) and (t, t) positively and
    (i, t), (t, i) negatively; c_t likewise; m_t sits on (t, t).
    """
    mats = mats or build_matrices(building)
    n, m = building.n_floors, design.n_tmds
    size = n + m

    M = np.zeros((size, size))
    C = np.zeros((size, size))
    K = np.zeros((size, size))
    M[:n, :n] = mats.M
    C[:n, :n] = mats.C
    K[:n, :n] = mats.K

    for j, unit in enumerate(design.units):
        if unit.floor > n:
            raise InvalidDesignError(
                f"TMD {j + 1} placed on floor {unit.floor} of a {n}-floor building"
            )
        i, t = unit.floor - 1, n + j
        k_t, c_t = physical_coefficients(unit)
        M[t, t] = unit.mass_t
        for A, value in ((K, k_t), (C, c_t)):
            A[i, i] += value
            A[t, t] += value
            A[i, t] -= value
            A[t, i] -= value

    return AugmentedSystem(M=M, C=C, K=K, n_floors=n, n_tmds=m)


def frequency_grid(building: BuildingModel, cfg: FrfConfig,
                   mats: Optional[StructuralMatrices] = None) -> np.ndarray:
    """Uniform grid from omega_min to omega_max_factor times the highest bare frequency."""
    modal = modal_analysis(mats or build_matrices(building))
    omega_max = cfg.omega_max_factor * float(modal.natural_frequencies[-1])
    n_points = int(np.ceil((omega_max - cfg.omega_min) / cfg.step)) + 1
    return np.linspace(cfg.omega_min, omega_max, n_points)


def _solve_grid(sys: AugmentedSystem, grid: np.ndarray) -> np.ndarray:
    """Floor absolute-acceleration ratios, shape (N, len(grid)), complex."""
    Mr, Cr, Kr = sys.reduced
    n = Mr.shape[0]
    w = grid[:, None, None]
    D = Kr[None, :, :] - w ** 2 * Mr[None, :, :] + 1j * w * Cr[None, :, :]
    rhs = np.broadcast_to(-Mr.sum(axis=1), (grid.size, n))[..., None].astype(complex)

    try:
        U = np.linalg.solve(D, rhs)[..., 0]
    except np.linalg.LinAlgError:
        for k, omega in enumerate(grid):
            if np.linalg.matrix_rank(D[k]) < n:
                raise SingularSystemError(omega) from None
        raise SingularSystemError(float(grid[0]), "Singular system somewhere on the grid") from None

    Y = 1.0 - grid[:, None] ** 2 * U[:, :sys.n_floors]
    bad = ~np.all(np.isfinite(Y), axis=1)
    if np.any(bad):
        raise SingularSystemError(float(grid[np.argmax(bad)]))
    return Y.T


def frf(sys: AugmentedSystem, grid: np.ndarray, executor: Optional[Executor] = None,
        n_chunks: int = 4) -> FrfCurves:
    """
    FRF magnitudes of every floor over the grid.

    With an executor the grid is split into chunks solved concurrently;
    every grid point is still its own solve, so results match the serial path.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0 or np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be non-empty, positive and strictly ascending")

    if executor is None or n_chunks <= 1:
        Y = _solve_grid(sys, grid)
    else:
        parts = np.array_split(grid, n_chunks)
        Y = np.concatenate(list(executor.map(lambda g: _solve_grid(sys, g), parts)), axis=1)

    return FrfCurves(omega_grid=grid, magnitudes=np.abs(Y))


def point_magnitudes(sys: AugmentedSystem, omega: float) -> np.ndarray:
    """|Y_i / A_g| of every floor at a single frequency."""
    return np.abs(_solve_grid(sys, np.array([float(omega)]))[:, 0])


def _local_maxima(mag: np.ndarray) -> np.ndarray:
    if mag.size == 1:
        return np.array([0])
    interior = np.flatnonzero((mag[1:-1] >= mag[:-2]) & (mag[1:-1] >= mag[2:])) + 1
    ends = []
    if mag[0] >= mag[1]:
        ends.append(0)
    if mag[-1] >= mag[-2]:
        ends.append(mag.size - 1)
    return np.concatenate([interior, np.array(ends, dtype=int)]).astype(int)


def infinity_norm(sys: AugmentedSystem, curves: FrfCurves, cfg: FrfConfig) -> FitnessValue:
    """
    Largest peak over floors, refined around grid maxima.

    Ties go to the lowest floor, then the lowest frequency.
    """
    grid, mags = curves.omega_grid, curves.magnitudes
    threshold = (1.0 - cfg.peak_margin) * float(mags.max())
    candidates = []

    for i in range(curves.n_floors):
        for k in _local_maxima(mags[i]):
            value, omega = float(mags[i, k]), float(grid[k])
            if value < threshold:
                continue
            if 0 < k < grid.size - 1:
                res = minimize_scalar(
                    lambda w, floor=i: -point_magnitudes(sys, w)[floor],
                    bounds=(float(grid[k - 1]), float(grid[k + 1])),
                    method="bounded",
                    options={"xatol": cfg.refine_tol},
                )
                if -res.fun > value:
                    value, omega = float(-res.fun), float(res.x)
            candidates.append((value, i + 1, omega))

    value, floor, omega = min(candidates, key=lambda c: (-c[0], c[1], c[2]))
    return FitnessValue(value=value, argmax_floor=floor, argmax_omega=omega)


def fitness(building: BuildingModel, design: TmdDesign, cfg: FrfConfig,
            grid: Optional[np.ndarray] = None,
            mats: Optional[StructuralMatrices] = None) -> FitnessValue:
    """g(x): linear infinity norm of the worst floor FRF."""
    mats = mats or build_matrices(building)
    sys = assemble(building, design, mats)
    if grid is None:
        grid = frequency_grid(building, cfg, mats)
    return infinity_norm(sys, frf(sys, grid), cfg)


class TmdProblem:
    """
    A building with a fixed FRF configuration.

    Caches the structural matrices and frequency grid so repeated fitness
    calls during a search only assemble and solve.
    """

    def __init__(self, building: BuildingModel, cfg: Optional[FrfConfig] = None):
        self.building = building
        self.cfg = cfg or FrfConfig()
        self.mats = build_matrices(building)
        self.grid = frequency_grid(building, self.cfg, self.mats)
        logger.debug(
            f"Problem ready: {building.n_floors} floors, grid {self.grid[0]:.2f}-"
            f"{self.grid[-1]:.2f} rad/s ({self.grid.size} points)"
        )

    @property
    def n_floors(self) -> int:
        return self.building.n_floors

    def evaluate(self, design: TmdDesign) -> FitnessValue:
        return fitness(self.building, design, self.cfg, grid=self.grid, mats=self.mats)

    def curves(self, design: TmdDesign) -> FrfCurves:
        return frf(assemble(self.building, design, self.mats), self.grid)


def time_domain_check(sys: AugmentedSystem, omega: float, floor: int,
                      max_horizon: Optional[float] = None) -> float:
    """
    Steady-state peak of |floor absolute acceleration| under a_g = sin(w t).

    Integrates the first-order form of the augmented system from rest for
    ten decay time constants, then reads the peak over the last forcing
    period. Used to cross-check frf.
    """
    if omega <= 0:
        raise ValueError("omega must be positive")
    if not 1 <= floor <= sys.n_floors:
        raise InvalidDesignError(f"floor {floor} outside 1..{sys.n_floors}")
    max_horizon = max_horizon or get_settings().TIME_DOMAIN_MAX_HORIZON

    Mr, Cr, Kr = sys.reduced
    n = Mr.shape[0]
    Minv = np.linalg.inv(Mr)
    A = np.block([[np.zeros((n, n)), np.eye(n)], [-Minv @ Kr, -Minv @ Cr]])
    eig = np.linalg.eigvals(A)
    sigma = float(np.min(-eig.real))
    if sigma <= 0:
        raise InconclusiveError("System is not asymptotically stable; no steady state to compare")

    period = 2.0 * np.pi / omega
    horizon = 10.0 / sigma + 2.0 * period
    if horizon > max_horizon:
        raise InconclusiveError(
            f"Transient needs {horizon:.1f} s to decay, more than the {max_horizon:.1f} s horizon"
        )
    max_step = min(2.0 * np.pi / float(np.max(np.abs(eig))), period) / 50.0

    def rhs(t, x):
        dx = A @ x
        dx[n:] -= np.sin(omega * t)
        return dx

    t_eval = np.linspace(horizon - 2.0 * period, horizon, 801)
    sol = solve_ivp(rhs, (0.0, horizon), np.zeros(2 * n), method="RK45",
                    t_eval=t_eval, max_step=max_step, rtol=1e-8, atol=1e-11)
    if not sol.success:
        raise InconclusiveError(f"Integration failed: {sol.message}")

    # absolute acceleration = relative acceleration + a_g = (A x)[n + i]
    y = (A @ sol.y)[n + floor - 1]
    previous, last = np.max(np.abs(y[:401])), np.max(np.abs(y[400:]))
    if abs(last - previous) > 1e-3 * last:
        raise InconclusiveError(
            f"Response still drifting after {horizon:.1f} s ({previous:.6g} vs {last:.6g})"
        )
    return float(last)
