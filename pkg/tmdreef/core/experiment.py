"""
Experiment harness.

Turns an experiment document into a problem and search space, runs the
reef in cro-sl or standalone mode over many seeds, and evaluates fixed
designs against a building.

Output layout of run_experiment:
    <out_dir>/comparison.csv
    <out_dir>/<mode>/seed_<n>/{report.json, convergence.csv, substrate_ratios.csv, frf.csv, design.yaml}
"""
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union
import logging

import numpy as np
from joblib import Parallel, delayed
from pydantic import ValidationError

from tmdreef.core import reef
from tmdreef.core.config import get_settings
from tmdreef.core.encoding import SearchSpace, decode
from tmdreef.core.exceptions import ConfigError
from tmdreef.core.exporter import export_frf, export_traces, save_comparison
from tmdreef.core.frf import FitnessValue, FrfCurves, TmdProblem
from tmdreef.core.presets import (
    check_design_fits,
    document_from_design,
    load_preset,
    read_yaml,
    write_design,
)
from tmdreef.core.schemas import (
    ComparisonRow,
    ComparisonTable,
    CroParams,
    ExperimentConfig,
    RunReport,
    parse_mode,
)
from tmdreef.core.structure import BuildingModel, ModalData, modal_analysis
from tmdreef.core.tmd import TmdDesign

logger = logging.getLogger(__name__)

CRO_SL = "cro-sl"


# ============= Config =============
def deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """Recursive dict merge; override wins, lists are replaced whole."""
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_config(path: Optional[Union[str, Path]] = None, preset: Optional[str] = None,
                overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    """
    Build a validated ExperimentConfig.

    Layers, later wins: preset (from --preset or the document's `preset`
    key), the document at path, then overrides.
    """
    document = read_yaml(path) if path is not None else {}
    preset = preset or document.pop("preset", None)
    document.pop("preset", None)

    data: Dict[str, Any] = load_preset(preset) if preset else {}
    if preset:
        data.setdefault("name", preset)
    data = deep_merge(data, document)
    data = deep_merge(data, overrides or {})

    if not data:
        raise ConfigError("Either a config document or a preset is required")
    try:
        cfg = ExperimentConfig(**data)
    except ValidationError as e:
        raise ConfigError(f"Invalid experiment config: {e}") from None

    logger.debug(f"Config '{cfg.name}': {cfg.building.n_floors} floors, {cfg.n_tmds} TMDs, mode {cfg.mode}")
    return cfg


def building_model(cfg: ExperimentConfig) -> BuildingModel:
    b = cfg.building
    return BuildingModel.from_lists(b.masses, b.stiffnesses, b.xi_s, b.rayleigh_modes)


def search_space(cfg: ExperimentConfig) -> SearchSpace:
    return SearchSpace.for_building(
        n_floors=cfg.building.n_floors,
        n_tmds=cfg.n_tmds,
        omega_bounds=cfg.bounds.omega,
        xi_bounds=cfg.bounds.xi,
        mass_bounds=cfg.bounds.mass,
        floor_set=cfg.bounds.floors,
        fixed_floors=cfg.fixed_floors,
    )


def build_problem(cfg: ExperimentConfig) -> TmdProblem:
    return TmdProblem(building_model(cfg), cfg.frf)


def modal_summary(cfg: ExperimentConfig) -> ModalData:
    return modal_analysis(build_problem(cfg).mats)


# ============= Runs =============
def mode_params(cro: CroParams, mode: str) -> CroParams:
    """Standalone modes put a single substrate on the whole reef."""
    kind = parse_mode(mode)
    if kind is None:
        return cro
    return cro.model_copy(update={"substrates": [kind]})


def nominal_budget(cro: CroParams) -> int:
    """Evaluations of a run whose occupancy stays at its initial value."""
    initial = max(1, int(round(cro.rho * cro.reef_size)))
    return initial * (cro.alpha + 1)


def mode_dirname(mode: str) -> str:
    return mode.replace(":", "-")


def final_design(report: RunReport, cfg: ExperimentConfig) -> TmdDesign:
    return decode(np.asarray(report.final_best.genes), search_space(cfg))


def run_single(cfg: ExperimentConfig, mode: str, seed: int,
               evaluation_budget: Optional[int] = None,
               out_dir: Optional[Path] = None,
               workers: Optional[int] = None,
               show_progress: bool = False) -> RunReport:
    """One reef run; with out_dir, also write its traces and final design."""
    settings = get_settings()
    problem = build_problem(cfg)
    space = search_space(cfg)
    report = reef.run(
        problem,
        mode_params(cfg.cro, mode),
        space,
        rng_seed=seed,
        operator_params=cfg.operators,
        evaluation_budget=evaluation_budget,
        mode=mode,
        workers=workers or settings.EVAL_WORKERS,
        show_progress=show_progress,
    )

    if out_dir is not None:
        run_dir = Path(out_dir) / mode_dirname(mode) / f"seed_{seed}"
        design = final_design(report, cfg)
        export_traces(report, run_dir, curves=problem.curves(design))
        write_design(run_dir / "design.yaml", document_from_design(
            design, name=f"{cfg.name} {mode} seed {seed}", fitness=report.final_best.fitness,
        ))
    return report


def _run_batch(cfg: ExperimentConfig, mode: str, seeds: Sequence[int],
               budgets: Dict[int, Optional[int]], out_dir: Optional[Path], jobs: int) -> List[RunReport]:
    show_progress = jobs == 1 and get_settings().SHOW_PROGRESS
    if jobs == 1:
        return [run_single(cfg, mode, s, budgets.get(s), out_dir, show_progress=show_progress) for s in seeds]
    return Parallel(n_jobs=jobs)(
        delayed(run_single)(cfg, mode, s, budgets.get(s), out_dir) for s in seeds
    )


def compare(reports: Dict[str, List[RunReport]], preset: str = "") -> ComparisonTable:
    """Min / Mean / Std of final fitness per mode."""
    rows = []
    for mode, runs in reports.items():
        if not runs:
            continue
        finals = np.array([r.final_best.fitness for r in runs])
        rows.append(ComparisonRow(
            mode=mode,
            min=float(finals.min()),
            mean=float(finals.mean()),
            std=float(finals.std()),
            n_seeds=len(runs),
        ))
    return ComparisonTable(preset=preset, rows=rows)


def run_experiment(cfg: ExperimentConfig, seeds: Optional[Sequence[int]] = None,
                   modes: Optional[Sequence[str]] = None,
                   out_dir: Optional[Union[str, Path]] = None,
                   jobs: Optional[int] = None) -> Tuple[ComparisonTable, Dict[str, List[RunReport]]]:
    """
    Run every mode over every seed.

    cro-sl runs first; each standalone run then gets the evaluation budget
    used by the cro-sl run with the same seed (or the nominal budget if
    cro-sl is not part of the experiment). The comparison table is
    rewritten after every mode, and on interruption, so partial results
    survive.
    """
    seeds = list(seeds if seeds is not None else cfg.seeds)
    modes = list(modes or [cfg.mode])
    for mode in modes:
        try:
            parse_mode(mode)
        except ValueError as e:
            raise ConfigError(str(e)) from None
    modes.sort(key=lambda m: m != CRO_SL)
    jobs = jobs or get_settings().SEED_JOBS
    out_dir = Path(out_dir) if out_dir is not None else None

    logger.info(f"\n{'='*60}")
    logger.info(f"🚀 {cfg.name}: modes {', '.join(modes)} over {len(seeds)} seeds")
    logger.info(f"{'='*60}")

    reports: Dict[str, List[RunReport]] = {}
    try:
        for mode in modes:
            if mode == CRO_SL:
                budgets = {s: None for s in seeds}
            elif CRO_SL in reports:
                budgets = {r.rng_seed: r.evaluations_used for r in reports[CRO_SL]}
            else:
                budgets = {s: nominal_budget(cfg.cro) for s in seeds}

            reports[mode] = _run_batch(cfg, mode, seeds, budgets, out_dir, jobs)
            finals = [r.final_best.fitness for r in reports[mode]]
            logger.info(f"✅ {mode}: min {min(finals):.4f}, mean {np.mean(finals):.4f}")
            _flush(reports, cfg, out_dir)
    except KeyboardInterrupt:
        logger.warning(f"⚠️ Interrupted; keeping results of {len(reports)} completed mode(s)")
        _flush(reports, cfg, out_dir)
        raise

    return compare(reports, cfg.name), reports


def _flush(reports: Dict[str, List[RunReport]], cfg: ExperimentConfig, out_dir: Optional[Path]) -> None:
    if out_dir is not None and reports:
        save_comparison(compare(reports, cfg.name), out_dir / "comparison.csv")


# ============= Fixed designs =============
@dataclass
class DesignEvaluation:
    """Fitness of a design plus the curves used to plot it."""
    fitness: FitnessValue
    bare_fitness: FitnessValue
    equipped: FrfCurves
    bare: FrfCurves

    @property
    def reduction_db(self) -> float:
        return self.bare_fitness.db - self.fitness.db


def evaluate_design(cfg: ExperimentConfig, design: TmdDesign,
                    out_dir: Optional[Union[str, Path]] = None) -> DesignEvaluation:
    """
    g(x) of a fixed design, with the bare building as reference.

    The design must carry cfg.n_tmds TMDs on floors of the building.
    """
    problem = build_problem(cfg)
    check_design_fits(design, problem.n_floors, cfg.n_tmds)

    empty = TmdDesign()
    result = DesignEvaluation(
        fitness=problem.evaluate(design),
        bare_fitness=problem.evaluate(empty),
        equipped=problem.curves(design),
        bare=problem.curves(empty),
    )

    if out_dir is not None:
        out_dir = Path(out_dir)
        export_frf(result.equipped, out_dir / "frf_equipped.csv")
        export_frf(result.bare, out_dir / "frf_bare.csv")
    return result
