"""
Tuned mass damper model.

A TMD is stored as (omega_t, xi_t, mass_t, floor) because that is how the
search space is bounded; physical (k_t, c_t) are derived on demand.
"""
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from tmdreef.core.exceptions import InvalidDesignError, PoleError


@dataclass(frozen=True)
class TmdUnit:
    """One TMD: natural frequency (rad/s), damping ratio, moving mass (kg), floor (1-based)."""
    omega_t: float
    xi_t: float
    mass_t: float
    floor: int

    def __post_init__(self):
        for name in ("omega_t", "xi_t", "mass_t"):
            value = float(getattr(self, name))
            if not np.isfinite(value) or value < 0:
                raise InvalidDesignError(f"{name} must be finite and non-negative, got {value}")
            object.__setattr__(self, name, value)
        if int(self.floor) != self.floor or self.floor < 1:
            raise InvalidDesignError(f"floor must be a positive integer, got {self.floor}")
        object.__setattr__(self, "floor", int(self.floor))

    @property
    def is_active(self) -> bool:
        """A zero-mass TMD exerts no force on the building."""
        return self.mass_t > 0.0


@dataclass(frozen=True)
class TmdDesign:
    """Ordered list of TMD units: the decoded form of x = [Omega_t, Xi_t, M_t, FB]."""
    units: Tuple[TmdUnit, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "units", tuple(self.units))

    def __len__(self) -> int:
        return len(self.units)

    def __iter__(self):
        return iter(self.units)

    @property
    def n_tmds(self) -> int:
        return len(self.units)

    @property
    def omegas(self) -> List[float]:
        return [u.omega_t for u in self.units]

    @property
    def xis(self) -> List[float]:
        return [u.xi_t for u in self.units]

    @property
    def masses(self) -> List[float]:
        return [u.mass_t for u in self.units]

    @property
    def floors(self) -> List[int]:
        return [u.floor for u in self.units]

    def placement_matrix(self, n_floors: int) -> np.ndarray:
        """K[j, i] = 1 iff TMD j sits on floor i+1."""
        P = np.zeros((self.n_tmds, n_floors))
        for j, unit in enumerate(self.units):
            if unit.floor > n_floors:
                raise InvalidDesignError(f"TMD {j + 1} on floor {unit.floor} of a {n_floors}-floor building")
            P[j, unit.floor - 1] = 1.0
        return P

    @classmethod
    def from_vectors(
        cls,
        omegas: Sequence[float],
        xis: Sequence[float],
        masses: Sequence[float],
        floors: Iterable[int],
    ) -> "TmdDesign":
        floors = list(floors)
        sizes = {len(omegas), len(xis), len(masses), len(floors)}
        if len(sizes) != 1:
            raise InvalidDesignError(
                f"Design vectors differ in length: omega={len(omegas)}, xi={len(xis)}, "
                f"mass={len(masses)}, floors={len(floors)}"
            )
        return cls(tuple(TmdUnit(w, x, m, f) for w, x, m, f in zip(omegas, xis, masses, floors)))


def physical_coefficients(unit: TmdUnit) -> Tuple[float, float]:
    """k_t = m_t w_t^2 and c_t = 2 xi_t w_t m_t."""
    k_t = unit.mass_t * unit.omega_t ** 2
    c_t = 2.0 * unit.xi_t * unit.omega_t * unit.mass_t
    return k_t, c_t


def tmd_transfer(unit: TmdUnit, s: complex) -> complex:
    """
    Force fed back to the host floor per unit floor absolute acceleration.

    H(s) = -m_t (2 xi_t w_t s + w_t^2) / (s^2 + 2 xi_t w_t s + w_t^2)
    """
    if unit.mass_t == 0.0 or unit.omega_t == 0.0:
        return 0j
    w, xi = unit.omega_t, unit.xi_t
    num = 2.0 * xi * w * s + w ** 2
    den = s ** 2 + 2.0 * xi * w * s + w ** 2
    if den == 0:
        raise PoleError(f"TMD transfer evaluated at its pole s = {s} (omega_t = {w}, xi_t = {xi})")
    return complex(-unit.mass_t * num / den)
