"""
Pydantic models for configuration documents and serialized results.
"""
from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator


class SubstrateKind(str, Enum):
    """Exploration operators a reef substrate can carry."""
    HS = "HS"
    DE = "DE"
    TWO_POINT = "2Px"
    GAUSSIAN = "GM"
    MULTI_POINT = "MPx"


DEFAULT_SUBSTRATES = [
    SubstrateKind.HS,
    SubstrateKind.DE,
    SubstrateKind.TWO_POINT,
    SubstrateKind.GAUSSIAN,
    SubstrateKind.MULTI_POINT,
]


# ============= Numerical Settings =============
class FrfConfig(BaseModel):
    """Frequency grid and peak refinement used by the fitness functional."""
    omega_min: float = Field(default=0.5, gt=0)
    omega_max_factor: float = Field(
        default=1.4, gt=1.0,
        description="Grid ends at this multiple of the highest bare-building frequency"
    )
    step: float = Field(default=0.01, gt=0, le=0.01)
    refine_tol: float = Field(default=1.0e-6, gt=0)
    peak_margin: float = Field(
        default=0.01, ge=0, lt=1,
        description="Grid maxima this far below the global grid maximum are not refined"
    )


class OperatorParams(BaseModel):
    """Parameters of the substrate operators."""
    hmcr: float = Field(default=0.9, ge=0, le=1)
    par: float = Field(default=0.3, ge=0, le=1)
    bw: float = Field(default=0.05, ge=0, description="Pitch bandwidth as a fraction of the interval width")
    de_f: float = Field(default=0.6, ge=0, le=2)
    de_cr: float = Field(default=0.9, ge=0, le=1)
    gm_start: float = Field(default=0.2, ge=0)
    gm_end: float = Field(default=0.02, ge=0)
    gm_p_mut: Optional[float] = Field(default=None, gt=0, le=1, description="Defaults to 1/(4M)")
    mpx_points: Optional[int] = Field(default=None, ge=1, description="None means uniform crossover")
    brood_sigma: float = Field(default=0.1, ge=0)


class CroParams(BaseModel):
    """Coral reef parameters."""
    reef_rows: int = Field(default=10, ge=1)
    reef_cols: int = Field(default=12, ge=1)
    rho: float = Field(default=0.6, gt=0, lt=1)
    f_b: float = Field(default=0.97, gt=0, le=1)
    n_att: int = Field(default=3, ge=1)
    p_d: float = Field(default=0.05, ge=0, le=1)
    f_d: float = Field(default=0.1, gt=0, lt=1)
    alpha: int = Field(default=1000, ge=1)
    substrates: List[SubstrateKind] = Field(default_factory=lambda: list(DEFAULT_SUBSTRATES), min_length=1)

    @property
    def reef_size(self) -> int:
        return self.reef_rows * self.reef_cols

    @model_validator(mode="after")
    def _substrates_fit_reef(self):
        if len(self.substrates) > self.reef_size:
            raise ValueError(
                f"{len(self.substrates)} substrates do not fit a reef of {self.reef_size} cells"
            )
        return self


# ============= Experiment Documents =============
class BuildingSpec(BaseModel):
    """Shear building parameters."""
    masses: List[float] = Field(..., min_length=1)
    stiffnesses: List[float] = Field(..., min_length=1)
    xi_s: float = Field(..., ge=0, lt=1)
    rayleigh_modes: Tuple[int, int] = Field(
        default=(1, 2),
        description="1-based modes where the proportional damping equals xi_s"
    )

    @model_validator(mode="after")
    def _check_lengths(self):
        if len(self.masses) != len(self.stiffnesses):
            raise ValueError(
                f"masses has {len(self.masses)} entries but stiffnesses has {len(self.stiffnesses)}"
            )
        if any(m <= 0 for m in self.masses) or any(k <= 0 for k in self.stiffnesses):
            raise ValueError("masses and stiffnesses must be strictly positive")
        i, j = self.rayleigh_modes
        if len(self.masses) > 1 and not 1 <= i < j <= len(self.masses):
            raise ValueError(f"rayleigh_modes {self.rayleigh_modes} must be ascending modes in 1..{len(self.masses)}")
        return self

    @property
    def n_floors(self) -> int:
        return len(self.masses)


class BoundsSpec(BaseModel):
    """Gene bounds per class; floors default to every floor of the building."""
    omega: Tuple[float, float] = (0.0, 50.0)
    xi: Tuple[float, float] = (0.0, 0.3)
    mass: Tuple[float, float] = (0.0, 0.05)
    floors: Optional[List[int]] = None

    @field_validator("omega", "xi", "mass")
    @classmethod
    def _ordered(cls, v):
        lo, hi = v
        if lo < 0 or lo > hi:
            raise ValueError(f"interval must satisfy 0 <= lower <= upper, got [{lo}, {hi}]")
        return v


class ExperimentConfig(BaseModel):
    """Validated experiment document with every default filled in."""
    name: str = "experiment"
    building: BuildingSpec
    n_tmds: int = Field(..., ge=1)
    bounds: BoundsSpec = Field(default_factory=BoundsSpec)
    fixed_floors: Optional[List[int]] = None
    cro: CroParams = Field(default_factory=CroParams)
    operators: OperatorParams = Field(default_factory=OperatorParams)
    frf: FrfConfig = Field(default_factory=FrfConfig)
    seeds: List[int] = Field(default_factory=lambda: list(range(30)), min_length=1)
    mode: str = "cro-sl"

    @model_validator(mode="after")
    def _check_dimensions(self):
        n = self.building.n_floors
        if n < 2:
            raise ValueError("optimization presets need at least two floors")
        if self.bounds.floors is None:
            self.bounds.floors = list(range(1, n + 1))
        floors = self.bounds.floors
        if not floors or any(f < 1 or f > n for f in floors):
            raise ValueError(f"bounds.floors must be a non-empty subset of 1..{n}, got {floors}")
        if self.fixed_floors is not None:
            if len(self.fixed_floors) != self.n_tmds:
                raise ValueError(
                    f"fixed_floors has {len(self.fixed_floors)} entries for {self.n_tmds} TMDs"
                )
            if any(f not in floors for f in self.fixed_floors):
                raise ValueError(f"fixed_floors {self.fixed_floors} outside floor set {floors}")
        parse_mode(self.mode)
        return self


def parse_mode(mode: str) -> Optional[SubstrateKind]:
    """'cro-sl' -> None, 'standalone:<tag>' -> that substrate."""
    if mode == "cro-sl":
        return None
    prefix, _, tag = mode.partition(":")
    if prefix != "standalone" or not tag:
        raise ValueError(f"mode must be 'cro-sl' or 'standalone:<substrate>', got '{mode}'")
    try:
        return SubstrateKind(tag)
    except ValueError:
        valid = ", ".join(k.value for k in SubstrateKind)
        raise ValueError(f"unknown substrate '{tag}' (valid: {valid})") from None


class DesignDocument(BaseModel):
    """TMD design as stored in YAML design files."""
    name: Optional[str] = None
    omega: List[float]
    xi: List[float]
    mass: List[float]
    floors: List[int]
    published_fitness: Optional[float] = None
    notes: Optional[str] = None

    @model_validator(mode="after")
    def _same_length(self):
        sizes = {len(self.omega), len(self.xi), len(self.mass), len(self.floors)}
        if len(sizes) != 1:
            raise ValueError("omega, xi, mass and floors must have the same length")
        return self


# ============= Results =============
class FinalSolution(BaseModel):
    """Best coral of a run."""
    genes: List[float]
    fitness: float
    argmax_floor: int
    argmax_omega: float


class RunReport(BaseModel):
    """Outcome of one CRO run."""
    mode: str
    rng_seed: int
    substrates: List[SubstrateKind]
    best_per_iteration: List[float]
    iteration_winners: List[Optional[SubstrateKind]]
    evaluations_used: int
    initial_evaluations: int
    final_best: FinalSolution

    @property
    def substrate_best_counts(self) -> Dict[str, int]:
        """Total best-larva wins per substrate (brooding wins are not attributed)."""
        counts = {kind.value: 0 for kind in self.substrates}
        for winner in self.iteration_winners:
            if winner is not None:
                counts[winner.value] += 1
        return counts


class ComparisonRow(BaseModel):
    mode: str
    min: float
    mean: float
    std: float
    n_seeds: int


class ComparisonTable(BaseModel):
    """Min / Mean of final fitness per algorithm across seeds."""
    preset: str
    rows: List[ComparisonRow] = Field(default_factory=list)

    def row(self, mode: str) -> ComparisonRow:
        for row in self.rows:
            if row.mode == mode:
                return row
        raise KeyError(mode)
