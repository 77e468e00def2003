"""
Command-line entry point for tmdreef.

Subcommands: run, compare, evaluate, export, modal.
"""
from pathlib import Path
from typing import List, Optional, Sequence
import logging
import sys

import click
import numpy as np

from tmdreef.core.config import get_settings
from tmdreef.core.exceptions import TmdReefError
from tmdreef.core.experiment import (
    CRO_SL,
    build_problem,
    evaluate_design,
    final_design,
    load_config,
    modal_summary,
    run_experiment,
)
from tmdreef.core.exporter import export_traces, load_report
from tmdreef.core.frf import FitnessValue, FrfCurves
from tmdreef.core.presets import design_from_document, load_design
from tmdreef.core.schemas import SubstrateKind

logger = logging.getLogger("tmdreef")


# ====================== Logging Configuration ======================

def setup_logging(verbose: bool = False) -> None:
    settings = get_settings()
    logging.basicConfig(
        level=logging.DEBUG if verbose else getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO),
        format=settings.LOG_FORMAT,
    )


# ====================== Shared Options ======================

def _parse_seeds(value: Optional[str]) -> Optional[List[int]]:
    """'0-29' or '1,4,7' -> list of ints."""
    if not value:
        return None
    seeds = []
    for part in value.split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = part.split("-", 1)
            seeds.extend(range(int(lo), int(hi) + 1))
        else:
            seeds.append(int(part))
    return seeds


def config_options(f):
    f = click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False, path_type=Path),
                     help="Experiment YAML document")(f)
    f = click.option("--preset", help="Bundled preset (n2-paper, n4-paper, n2-lab, ...)")(f)
    return f


def run_options(f):
    f = click.option("--seed", type=int, help="Single RNG seed")(f)
    f = click.option("--seeds", help="Seed list or range, e.g. 0-29 or 1,2,3")(f)
    f = click.option("--out-dir", type=click.Path(file_okay=False, path_type=Path),
                     help="Output directory (default: TMDREEF_OUTPUT_DIR)")(f)
    f = click.option("--alpha", type=int, help="Override the iteration count")(f)
    f = click.option("--jobs", type=int, help="Parallel seed jobs (default: TMDREEF_SEED_JOBS)")(f)
    return f


def _load(config_path, preset, alpha=None):
    overrides = {"cro": {"alpha": alpha}} if alpha else None
    return load_config(config_path, preset=preset, overrides=overrides)


def _seeds(seed: Optional[int], seeds: Optional[str]) -> Optional[Sequence[int]]:
    if seed is not None:
        return [seed]
    return _parse_seeds(seeds)


def _log_fitness(label: str, value: FitnessValue) -> None:
    logger.info(
        f"  {label}: g = {value.value:.4f} ({value.db:.2f} dB) "
        f"at floor {value.argmax_floor}, {value.argmax_omega:.3f} rad/s"
    )


def _log_peaks(label: str, curves: FrfCurves) -> None:
    db = curves.to_db()
    for i in range(curves.n_floors):
        k = int(np.argmax(db[i]))
        logger.info(f"  {label} floor {i + 1}: peak {db[i, k]:.2f} dB at {curves.omega_grid[k]:.2f} rad/s")


# ====================== Commands ======================

@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Debug logging")
def cli(verbose: bool):
    """Design and place tuned mass dampers with a coral reef optimizer."""
    setup_logging(verbose)


@cli.command()
@config_options
@run_options
@click.option("--mode", help="cro-sl or standalone:<HS|DE|2Px|GM|MPx> (default: config mode)")
def run(config_path, preset, seed, seeds, out_dir, alpha, jobs, mode):
    """Run the optimizer over one or more seeds."""
    cfg = _load(config_path, preset, alpha)
    out_dir = out_dir or get_settings().OUTPUT_DIR
    _, reports = run_experiment(cfg, seeds=_seeds(seed, seeds), modes=[mode or cfg.mode],
                                out_dir=out_dir, jobs=jobs)

    for mode_name, runs in reports.items():
        best = min(runs, key=lambda r: r.final_best.fitness)
        design = final_design(best, cfg)
        logger.info(f"🏆 {mode_name} best seed {best.rng_seed}: g = {best.final_best.fitness:.4f}")
        logger.info(f"   omega = {np.round(design.omegas, 4).tolist()}")
        logger.info(f"   xi    = {np.round(design.xis, 4).tolist()}")
        logger.info(f"   mass  = {np.round(design.masses, 4).tolist()}")
        logger.info(f"   floors = {design.floors}")
    logger.info(f"📁 Results in {out_dir}")


@cli.command()
@config_options
@run_options
@click.option("--modes", help="Comma-separated modes (default: cro-sl plus every standalone substrate)")
def compare(config_path, preset, seed, seeds, out_dir, alpha, jobs, modes):
    """Compare cro-sl against each substrate on its own, at equal evaluation budgets."""
    cfg = _load(config_path, preset, alpha)
    out_dir = out_dir or get_settings().OUTPUT_DIR
    if modes:
        mode_list = [m.strip() for m in modes.split(",")]
    else:
        mode_list = [CRO_SL] + [f"standalone:{k.value}" for k in SubstrateKind]

    table, _ = run_experiment(cfg, seeds=_seeds(seed, seeds), modes=mode_list, out_dir=out_dir, jobs=jobs)

    logger.info(f"\n{'='*60}")
    logger.info(f"📊 {table.preset}")
    logger.info(f"{'='*60}")
    logger.info(f"{'mode':<16} {'min':>10} {'mean':>10} {'std':>10} {'seeds':>6}")
    for row in table.rows:
        logger.info(f"{row.mode:<16} {row.min:>10.4f} {row.mean:>10.4f} {row.std:>10.4f} {row.n_seeds:>6}")
    logger.info(f"📁 Comparison written to {Path(out_dir) / 'comparison.csv'}")


@cli.command()
@config_options
@click.option("--design", "design_ref", required=True, help="Design YAML file or bundled design name (see data/designs)")
@click.option("--mass", "mass_override", type=float, help="Replace every TMD mass (kg)")
@click.option("--out-dir", type=click.Path(file_okay=False, path_type=Path), help="Write bare/equipped FRF CSVs here")
def evaluate(config_path, preset, design_ref, mass_override, out_dir):
    """Fitness of a fixed design, with bare and equipped FRF export."""
    cfg = _load(config_path, preset)
    doc = load_design(design_ref)
    result = evaluate_design(cfg, design_from_document(doc, mass_override), out_dir=out_dir)

    logger.info(f"🏗️ {cfg.name} with design {doc.name}")
    _log_fitness("bare", result.bare_fitness)
    _log_fitness("equipped", result.fitness)
    _log_peaks("bare", result.bare)
    _log_peaks("equipped", result.equipped)
    logger.info(f"  reduction: {result.reduction_db:.2f} dB")
    if doc.published_fitness is not None:
        rel = (result.fitness.value - doc.published_fitness) / doc.published_fitness
        logger.info(f"  published g = {doc.published_fitness:.4f} (relative difference {rel:+.3%})")
    click.echo(f"{result.fitness.value:.6f} {result.fitness.db:.4f} {result.fitness.argmax_floor} "
               f"{result.fitness.argmax_omega:.6f}")


@cli.command()
@click.argument("report_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@config_options
@click.option("--out-dir", type=click.Path(file_okay=False, path_type=Path), help="Default: the report's directory")
def export(report_path, config_path, preset, out_dir):
    """Re-export traces of a saved run report (FRF too when a config is given)."""
    report = load_report(report_path)
    curves = None
    if config_path or preset:
        cfg = _load(config_path, preset)
        curves = build_problem(cfg).curves(final_design(report, cfg))
    written = export_traces(report, out_dir or report_path.parent, curves=curves)
    for kind, path in written.items():
        logger.info(f"  ✅ {kind}: {path}")


@cli.command()
@config_options
def modal(config_path, preset):
    """Natural frequencies and modal damping of the building."""
    cfg = _load(config_path, preset)
    data = modal_summary(cfg)
    logger.info(f"🏗️ {cfg.name}: {cfg.building.n_floors} floors")
    for i, (w, xi) in enumerate(zip(data.natural_frequencies, data.damping_ratios), 1):
        click.echo(f"mode {i}: omega = {w:.3f} rad/s ({w / (2 * np.pi):.3f} Hz), xi = {xi:.4f}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI and map errors to exit codes."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except TmdReefError as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        return e.exit_code
    except KeyboardInterrupt:
        logger.error("❌ Interrupted; partial results were flushed")
        return 130
    except click.exceptions.Abort:
        return 130
    except click.ClickException as e:
        e.show()
        return e.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
