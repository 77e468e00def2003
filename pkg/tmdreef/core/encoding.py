"""
Flat gene encoding of TMD designs.

Genes are ordered [omega_1..M, xi_1..M, mass_1..M, fb_1..M]. Floor genes
travel through the continuous operators as reals; repair snaps them back
to the nearest allowed floor. Pinned floors (fixed-location experiments)
are zero-width intervals, so no operator can move them.
"""
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from tmdreef.core.exceptions import ConfigError, InvalidGenomeError
from tmdreef.core.tmd import TmdDesign

Genome = np.ndarray


@dataclass(frozen=True, eq=False)
class SearchSpace:
    """Per-class gene bounds plus the discrete floor set."""
    n_tmds: int
    omega_bounds: Tuple[float, float]
    xi_bounds: Tuple[float, float]
    mass_bounds: Tuple[float, float]
    floor_set: Tuple[int, ...]
    fixed_floors: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if self.n_tmds < 1:
            raise ConfigError(f"n_tmds must be at least 1, got {self.n_tmds}")
        for name in ("omega_bounds", "xi_bounds", "mass_bounds"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ConfigError(f"{name}: lower bound {lo} exceeds upper bound {hi}")
            object.__setattr__(self, name, (float(lo), float(hi)))
        floors = tuple(sorted(set(int(f) for f in self.floor_set)))
        if not floors:
            raise ConfigError("floor_set must not be empty")
        object.__setattr__(self, "floor_set", floors)
        if self.fixed_floors is not None:
            fixed = tuple(int(f) for f in self.fixed_floors)
            if len(fixed) != self.n_tmds or any(f not in floors for f in fixed):
                raise ConfigError(f"fixed_floors {fixed} incompatible with {self.n_tmds} TMDs on floors {floors}")
            object.__setattr__(self, "fixed_floors", fixed)

    @property
    def n_genes(self) -> int:
        return 4 * self.n_tmds

    @property
    def lower(self) -> np.ndarray:
        return self._bounds()[0]

    @property
    def upper(self) -> np.ndarray:
        return self._bounds()[1]

    @property
    def width(self) -> np.ndarray:
        lo, hi = self._bounds()
        return hi - lo

    @property
    def floor_slice(self) -> slice:
        return slice(3 * self.n_tmds, 4 * self.n_tmds)

    def _bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        m = self.n_tmds
        if self.fixed_floors is not None:
            fb_lo = fb_hi = np.asarray(self.fixed_floors, dtype=float)
        else:
            fb_lo = np.full(m, float(self.floor_set[0]))
            fb_hi = np.full(m, float(self.floor_set[-1]))
        lo = np.concatenate([np.full(m, self.omega_bounds[0]), np.full(m, self.xi_bounds[0]),
                             np.full(m, self.mass_bounds[0]), fb_lo])
        hi = np.concatenate([np.full(m, self.omega_bounds[1]), np.full(m, self.xi_bounds[1]),
                             np.full(m, self.mass_bounds[1]), fb_hi])
        return lo, hi

    @classmethod
    def for_building(cls, n_floors: int, n_tmds: int,
                     omega_bounds=(0.0, 50.0), xi_bounds=(0.0, 0.3), mass_bounds=(0.0, 0.05),
                     floor_set: Optional[Sequence[int]] = None,
                     fixed_floors: Optional[Sequence[int]] = None) -> "SearchSpace":
        return cls(
            n_tmds=n_tmds,
            omega_bounds=tuple(omega_bounds),
            xi_bounds=tuple(xi_bounds),
            mass_bounds=tuple(mass_bounds),
            floor_set=tuple(floor_set or range(1, n_floors + 1)),
            fixed_floors=tuple(fixed_floors) if fixed_floors is not None else None,
        )


def _snap_floors(values: np.ndarray, space: SearchSpace) -> np.ndarray:
    floors = np.asarray(space.floor_set, dtype=float)
    rounded = np.clip(np.rint(values), floors[0], floors[-1])
    return floors[np.abs(rounded[:, None] - floors[None, :]).argmin(axis=1)]


def random_genome(space: SearchSpace, rng: np.random.Generator) -> Genome:
    """Uniform draw inside the box; floor genes uniform over the floor set."""
    m = space.n_tmds
    genome = rng.uniform(space.lower, space.upper)
    if space.fixed_floors is not None:
        genome[space.floor_slice] = space.fixed_floors
    else:
        genome[space.floor_slice] = rng.choice(np.asarray(space.floor_set, dtype=float), size=m)
    return genome


def repair(genome: Genome, space: SearchSpace) -> Genome:
    """Clamp continuous genes to their bounds and snap floor genes to the floor set."""
    genome = np.asarray(genome, dtype=float)
    if genome.shape != (space.n_genes,):
        raise InvalidGenomeError(f"Genome has shape {genome.shape}, expected ({space.n_genes},)")
    out = np.clip(genome, space.lower, space.upper)
    if space.fixed_floors is not None:
        out[space.floor_slice] = space.fixed_floors
    else:
        out[space.floor_slice] = _snap_floors(out[space.floor_slice], space)
    return out


def is_feasible(genome: Genome, space: SearchSpace) -> bool:
    genome = np.asarray(genome, dtype=float)
    if genome.shape != (space.n_genes,) or not np.all(np.isfinite(genome)):
        return False
    if np.any(genome < space.lower) or np.any(genome > space.upper):
        return False
    fb = genome[space.floor_slice]
    return bool(np.all(fb == np.rint(fb)) and all(int(f) in space.floor_set for f in fb))


def decode(genome: Genome, space: SearchSpace) -> TmdDesign:
    """Split a repaired genome into TMD units."""
    if not is_feasible(genome, space):
        raise InvalidGenomeError("Genome must be repaired before decoding")
    m = space.n_tmds
    return TmdDesign.from_vectors(
        genome[:m], genome[m:2 * m], genome[2 * m:3 * m],
        [int(round(f)) for f in genome[3 * m:]],
    )


def encode(design: TmdDesign, space: SearchSpace) -> Genome:
    """Inverse of decode for designs inside the space."""
    if design.n_tmds != space.n_tmds:
        raise InvalidGenomeError(f"Design has {design.n_tmds} TMDs, space expects {space.n_tmds}")
    return np.concatenate([design.omegas, design.xis, design.masses, design.floors]).astype(float)
