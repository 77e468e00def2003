"""
Coral Reefs Optimization with substrate layers.

Flow per iteration:
1. Spawn: every coral either broadcasts (substrate operator) or broods
2. Settle: each larva tries n_att random cells
3. Depredate: a few of the worst corals die
The best coral ever seen is archived outside the reef.
"""
from concurrent.futures import Executor, ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence
import logging
import math

import numpy as np
from tqdm import tqdm

from tmdreef.core.encoding import Genome, SearchSpace, decode, random_genome
from tmdreef.core.frf import FitnessValue, TmdProblem
from tmdreef.core.schemas import (
    CroParams,
    FinalSolution,
    OperatorParams,
    RunReport,
    SubstrateKind,
)
from tmdreef.core.substrates import MATE_COUNT, OperatorContext, apply_substrate, brooding

logger = logging.getLogger(__name__)

Evaluator = Callable[[Genome], FitnessValue]


@dataclass
class Coral:
    """A genome with its cached health (fitness, lower is healthier)."""
    genome: Genome
    fitness: FitnessValue

    @property
    def value(self) -> float:
        return self.fitness.value


@dataclass
class Larva(Coral):
    """Newly spawned coral; substrate is None for brooded larvae."""
    substrate: Optional[SubstrateKind] = None


class Reef:
    """
    Fixed grid of cells; each cell is empty or holds a coral and belongs to
    one substrate for the whole run.
    """

    def __init__(self, params: CroParams):
        self.rows = params.reef_rows
        self.cols = params.reef_cols
        self.substrates: List[SubstrateKind] = list(params.substrates)
        self.cells: List[Optional[Coral]] = [None] * self.size
        self.substrate_of = substrate_partition(self.size, len(self.substrates))

    @property
    def size(self) -> int:
        return self.rows * self.cols

    def occupied(self) -> List[int]:
        return [i for i, coral in enumerate(self.cells) if coral is not None]

    def n_occupied(self) -> int:
        return sum(coral is not None for coral in self.cells)

    def substrate_at(self, cell: int) -> SubstrateKind:
        return self.substrates[self.substrate_of[cell]]

    def best_cell(self) -> Optional[int]:
        occupied = self.occupied()
        if not occupied:
            return None
        return min(occupied, key=lambda i: (self.cells[i].value, i))

    def grid(self) -> np.ndarray:
        """Fitness per cell as a rows x cols array, NaN where empty."""
        values = [coral.value if coral is not None else np.nan for coral in self.cells]
        return np.asarray(values).reshape(self.rows, self.cols)


def substrate_partition(size: int, n_substrates: int) -> np.ndarray:
    """Contiguous equal blocks of cells; the remainder goes to the last substrate."""
    block = size // n_substrates
    return np.minimum(np.arange(size) // block, n_substrates - 1)


def evaluate_all(genomes: Sequence[Genome], evaluator: Evaluator,
                 executor: Optional[Executor] = None) -> List[FitnessValue]:
    """Evaluate in order; concurrent evaluation keeps the input order."""
    if executor is None:
        return [evaluator(g) for g in genomes]
    return list(executor.map(evaluator, genomes))


def initialize(params: CroParams, space: SearchSpace, rng: np.random.Generator,
               evaluator: Evaluator, executor: Optional[Executor] = None) -> Reef:
    """Occupy round(rho * size) random cells (at least one) with random corals."""
    reef = Reef(params)
    n_occupied = max(1, int(round(params.rho * reef.size)))
    cells = np.sort(rng.choice(reef.size, size=n_occupied, replace=False))
    genomes = [random_genome(space, rng) for _ in cells]
    for cell, genome, fit in zip(cells, genomes, evaluate_all(genomes, evaluator, executor)):
        reef.cells[int(cell)] = Coral(genome, fit)

    logger.debug(f"Reef initialized: {n_occupied}/{reef.size} cells occupied")
    return reef


def _draw_mates(kind: SubstrateKind, cell: int, local: List[int], pool: List[int],
                reef: Reef, rng: np.random.Generator) -> List[Genome]:
    """
    Mates come from broadcasting corals of the same substrate, or from the
    whole broadcast pool when the substrate is too sparse. A lone coral
    mates with itself.
    """
    need = MATE_COUNT[kind]
    if need == 0:
        return []
    candidates = [c for c in local if c != cell]
    if len(candidates) < need:
        candidates = [c for c in pool if c != cell] or [cell]

    if kind is SubstrateKind.HS:
        chosen = candidates
    else:
        picks = rng.choice(len(candidates), size=need, replace=len(candidates) < need)
        chosen = [candidates[int(p)] for p in picks]
    return [reef.cells[c].genome for c in chosen]


def spawn_phase(reef: Reef, params: CroParams, space: SearchSpace, rng: np.random.Generator,
                evaluator: Evaluator, iteration: int = 0, max_iterations: Optional[int] = None,
                operator_params: Optional[OperatorParams] = None,
                executor: Optional[Executor] = None) -> List[Larva]:
    """
    One larva per occupied coral, in cell order.

    Each coral broadcasts with probability f_b through its substrate
    operator, otherwise it broods.
    """
    operator_params = operator_params or OperatorParams()
    ctx = OperatorContext(
        iteration=iteration,
        max_iterations=max_iterations or params.alpha,
        space=space,
        rng=rng,
        params=operator_params,
    )

    occupied = reef.occupied()
    broadcast = rng.random(len(occupied)) < params.f_b
    pool = [c for c, b in zip(occupied, broadcast) if b]
    by_substrate = {}
    for c in pool:
        by_substrate.setdefault(reef.substrate_at(c), []).append(c)

    genomes, origins = [], []
    for cell, is_broadcast in zip(occupied, broadcast):
        base = reef.cells[cell].genome
        if is_broadcast:
            kind = reef.substrate_at(cell)
            mates = _draw_mates(kind, cell, by_substrate[kind], pool, reef, rng)
            genomes.append(apply_substrate(kind, base, mates, ctx))
            origins.append(kind)
        else:
            genomes.append(brooding(base, space, rng, operator_params.brood_sigma))
            origins.append(None)

    fits = evaluate_all(genomes, evaluator, executor)
    return [Larva(g, f, substrate=o) for g, f, o in zip(genomes, fits, origins)]


def settle(reef: Reef, larvae: Sequence[Larva], params: CroParams, rng: np.random.Generator) -> Reef:
    """
    Each larva tries up to n_att random cells: it takes an empty cell or
    evicts a strictly worse coral; otherwise it is lost.
    """
    settled = 0
    for larva in larvae:
        for _ in range(params.n_att):
            cell = int(rng.integers(reef.size))
            occupant = reef.cells[cell]
            if occupant is None or larva.value < occupant.value:
                reef.cells[cell] = Coral(larva.genome, larva.fitness)
                settled += 1
                break
    logger.debug(f"Settlement: {settled}/{len(larvae)} larvae settled")
    return reef


def depredate(reef: Reef, params: CroParams, rng: np.random.Generator) -> Reef:
    """Each of the worst ceil(f_d * occupied) corals dies with probability p_d; the best never does."""
    occupied = reef.occupied()
    if len(occupied) <= 1:
        return reef

    best = reef.best_cell()
    worst_first = sorted(occupied, key=lambda i: (-reef.cells[i].value, i))
    n_candidates = math.ceil(params.f_d * len(occupied) - 1e-9)
    candidates = [c for c in worst_first[:n_candidates] if c != best]
    killed = rng.random(len(candidates)) < params.p_d
    for cell, dies in zip(candidates, killed):
        if dies:
            reef.cells[cell] = None
    return reef


def _winner(larvae: Sequence[Larva]) -> Optional[SubstrateKind]:
    """Substrate of the best larva of the iteration; brooded winners are not attributed."""
    if not larvae:
        return None
    best = min(range(len(larvae)), key=lambda i: (larvae[i].value, i))
    return larvae[best].substrate


def run(problem: TmdProblem, params: CroParams, space: SearchSpace, rng_seed: int,
        operator_params: Optional[OperatorParams] = None,
        evaluation_budget: Optional[int] = None,
        mode: str = "cro-sl",
        workers: int = 1,
        show_progress: bool = False) -> RunReport:
    """
    Full CRO-SL run.

    Runs alpha iterations, or, with an evaluation budget, keeps iterating
    until evaluations_used reaches the budget.
    """
    rng = np.random.default_rng(rng_seed)

    def evaluator(genome: Genome) -> FitnessValue:
        return problem.evaluate(decode(genome, space))

    executor = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        reef = initialize(params, space, rng, evaluator, executor)
        initial = reef.n_occupied()
        evaluations = initial
        archive = reef.cells[reef.best_cell()]

        best_per_iteration: List[float] = []
        winners: List[Optional[SubstrateKind]] = []

        if evaluation_budget is None:
            iterations = range(params.alpha)
            total = params.alpha
        else:
            iterations = _count_while(lambda: evaluations < evaluation_budget)
            total = None
        progress = tqdm(iterations, total=total, desc=f"{mode} seed {rng_seed}",
                        unit="it", disable=not show_progress, leave=False)

        for k in progress:
            larvae = spawn_phase(reef, params, space, rng, evaluator, iteration=k,
                                 max_iterations=params.alpha, operator_params=operator_params,
                                 executor=executor)
            evaluations += len(larvae)
            winners.append(_winner(larvae))

            for larva in larvae:
                if larva.value < archive.value:
                    archive = Coral(larva.genome.copy(), larva.fitness)

            settle(reef, larvae, params, rng)
            depredate(reef, params, rng)
            best_per_iteration.append(archive.value)
            logger.debug(f"iter {k}: best {archive.value:.6f}, occupied {reef.n_occupied()}, evals {evaluations}")
            progress.set_postfix(best=f"{archive.value:.4f}")
    finally:
        if executor is not None:
            executor.shutdown()

    logger.info(f"✅ {mode} seed {rng_seed}: best {archive.value:.4f} after {evaluations} evaluations")
    return RunReport(
        mode=mode,
        rng_seed=rng_seed,
        substrates=list(params.substrates),
        best_per_iteration=best_per_iteration,
        iteration_winners=winners,
        evaluations_used=evaluations,
        initial_evaluations=initial,
        final_best=FinalSolution(
            genes=[float(g) for g in archive.genome],
            fitness=archive.fitness.value,
            argmax_floor=archive.fitness.argmax_floor,
            argmax_omega=archive.fitness.argmax_omega,
        ),
    )


def _count_while(condition: Callable[[], bool]):
    k = 0
    while condition():
        yield k
        k += 1
