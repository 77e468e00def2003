"""
Substrate operators.

Each reef substrate carries one exploration operator used for broadcast
spawning. Every operator draws a fixed number of random values for a given
genome length, whatever the masks end up selecting, so a run is a pure
function of its seed.
"""
from dataclasses import dataclass
from typing import Callable, Dict, List, Sequence
import logging

import numpy as np

from tmdreef.core.encoding import Genome, SearchSpace, repair
from tmdreef.core.schemas import OperatorParams, SubstrateKind

logger = logging.getLogger(__name__)


@dataclass
class OperatorContext:
    """Where the run is and what the operators may touch."""
    iteration: int
    max_iterations: int
    space: SearchSpace
    rng: np.random.Generator
    params: OperatorParams

    @property
    def p_mut(self) -> float:
        return self.params.gm_p_mut or 1.0 / self.space.n_genes


def gaussian_scale(iteration: int, max_iterations: int, width: np.ndarray,
                   start: float = 0.2, end: float = 0.02) -> np.ndarray:
    """
    Linearly decaying deviation, start*(A-B) at k = 0 to end*(A-B) at k = alpha.

    Iterations past alpha (budget-driven runs) keep the end value.
    """
    frac = min(iteration / max_iterations, 1.0)
    return np.asarray(width, dtype=float) * (start + frac * (end - start))


def hs_operator(base: Genome, pool: Sequence[Genome], ctx: OperatorContext) -> Genome:
    """
    Harmony-search improvisation over the pool.

    Per gene: with probability HMCR recall the gene of a random pool member
    and, with probability PAR, shift it by up to bw * width; otherwise draw
    the gene uniformly in its interval.
    """
    rng, space, p = ctx.rng, ctx.space, ctx.params
    memory = np.asarray(pool, dtype=float)
    n = base.size

    recall = rng.random(n) < p.hmcr
    picks = rng.integers(memory.shape[0], size=n)
    pitch = rng.random(n) < p.par
    shift = rng.uniform(-1.0, 1.0, n) * p.bw * space.width
    fresh = rng.uniform(space.lower, space.upper)

    recalled = memory[picks, np.arange(n)] + np.where(pitch, shift, 0.0)
    return repair(np.where(recall, recalled, fresh), space)


def de_operator(base: Genome, pool: Sequence[Genome], ctx: OperatorContext) -> Genome:
    """DE/rand/1/bin: donor a + F (b - c), binomial crossover with the base at CR."""
    rng, p = ctx.rng, ctx.params
    a, b, c = (np.asarray(g, dtype=float) for g in pool[:3])
    donor = a + p.de_f * (b - c)

    n = base.size
    cross = rng.random(n) < p.de_cr
    cross[rng.integers(n)] = True
    return repair(np.where(cross, donor, base), ctx.space)


def two_point_crossover(parent1: Genome, parent2: Genome, ctx: OperatorContext) -> Genome:
    """Segment between two distinct cut points from parent2, the rest from parent1."""
    n = parent1.size
    lo, hi = np.sort(ctx.rng.choice(n + 1, size=2, replace=False))
    child = np.array(parent1, dtype=float)
    child[lo:hi] = parent2[lo:hi]
    return repair(child, ctx.space)


def gaussian_mutation(base: Genome, ctx: OperatorContext) -> Genome:
    """Per-gene Gaussian noise with the decaying deviation, applied with probability p_mut."""
    rng, p = ctx.rng, ctx.params
    sigma = gaussian_scale(ctx.iteration, ctx.max_iterations, ctx.space.width, p.gm_start, p.gm_end)
    n = base.size
    mutate = rng.random(n) < ctx.p_mut
    noise = rng.normal(0.0, 1.0, n) * sigma
    return repair(base + np.where(mutate, noise, 0.0), ctx.space)


def multi_point_crossover(parent1: Genome, parent2: Genome, ctx: OperatorContext) -> Genome:
    """
    Uniform crossover by default; with mpx_points set, alternate segments
    between that many distinct cut points.
    """
    rng, n = ctx.rng, parent1.size
    points = ctx.params.mpx_points
    if points is None:
        take_first = rng.random(n) < 0.5
    else:
        k = min(points, n - 1)
        cuts = np.sort(rng.choice(np.arange(1, n), size=k, replace=False)) if k > 0 else np.array([], int)
        segment = np.searchsorted(cuts, np.arange(n), side="right")
        take_first = segment % 2 == 0
    return repair(np.where(take_first, parent1, parent2), ctx.space)


def brooding(base: Genome, space: SearchSpace, rng: np.random.Generator, sigma: float = 0.1) -> Genome:
    """Internal reproduction: each gene moves with probability 1/(4M) by N(0, sigma * width)."""
    n = base.size
    mutate = rng.random(n) < 1.0 / space.n_genes
    noise = rng.normal(0.0, 1.0, n) * sigma * space.width
    return repair(base + np.where(mutate, noise, 0.0), space)


# ============= Dispatch =============
# Number of mates each operator needs besides the base coral.
# HS consumes the whole substrate pool as its harmony memory.
MATE_COUNT: Dict[SubstrateKind, int] = {
    SubstrateKind.HS: 1,
    SubstrateKind.DE: 3,
    SubstrateKind.TWO_POINT: 1,
    SubstrateKind.GAUSSIAN: 0,
    SubstrateKind.MULTI_POINT: 1,
}


def _apply_hs(base, mates, ctx):
    return hs_operator(base, [base, *mates], ctx)


def _apply_de(base, mates, ctx):
    return de_operator(base, mates, ctx)


def _apply_two_point(base, mates, ctx):
    return two_point_crossover(base, mates[0], ctx)


def _apply_gaussian(base, mates, ctx):
    return gaussian_mutation(base, ctx)


def _apply_multi_point(base, mates, ctx):
    return multi_point_crossover(base, mates[0], ctx)


SUBSTRATE_OPERATORS: Dict[SubstrateKind, Callable[[Genome, List[Genome], OperatorContext], Genome]] = {
    SubstrateKind.HS: _apply_hs,
    SubstrateKind.DE: _apply_de,
    SubstrateKind.TWO_POINT: _apply_two_point,
    SubstrateKind.GAUSSIAN: _apply_gaussian,
    SubstrateKind.MULTI_POINT: _apply_multi_point,
}


def apply_substrate(kind: SubstrateKind, base: Genome, mates: List[Genome], ctx: OperatorContext) -> Genome:
    """Produce one broadcast larva with the operator of the given substrate."""
    return SUBSTRATE_OPERATORS[kind](base, mates, ctx)
