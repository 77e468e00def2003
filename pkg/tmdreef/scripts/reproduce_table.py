"""
Reproduce the algorithm comparison on both benchmark buildings.

Run this to regenerate the Min/Mean table:
1. For each preset (n2-paper, n4-paper)
2. Run cro-sl, then every substrate on its own with the same evaluation budget
3. Write per-run traces and comparison.csv under the output directory

Full size (30 seeds, alpha = 1000) takes a while; use --seeds/--alpha
for a quick look.
"""
import sys
import os

sys.path.append(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from pathlib import Path

import click

from tmdreef.core.config import get_settings
from tmdreef.core.experiment import CRO_SL, load_config, run_experiment
from tmdreef.core.schemas import SubstrateKind
import logging

logging.basicConfig(
    level=logging.INFO,
    format='%(message)s'
)
logger = logging.getLogger(__name__)

PRESETS = ["n2-paper", "n4-paper"]
MODES = [CRO_SL] + [f"standalone:{k.value}" for k in SubstrateKind]


@click.command()
@click.option("--seeds", type=int, default=30, help="Number of seeds (0..n-1)")
@click.option("--alpha", type=int, default=None, help="Override the iteration count")
@click.option("--jobs", type=int, default=None, help="Parallel seed jobs")
@click.option("--out-dir", type=click.Path(file_okay=False, path_type=Path), default=None)
def reproduce(seeds, alpha, jobs, out_dir):
    out_dir = out_dir or get_settings().OUTPUT_DIR / "comparison"
    overrides = {"cro": {"alpha": alpha}} if alpha else None

    tables = {}
    for preset in PRESETS:
        cfg = load_config(preset=preset, overrides=overrides)
        table, _ = run_experiment(cfg, seeds=range(seeds), modes=MODES, out_dir=out_dir / preset, jobs=jobs)
        tables[preset] = table

    logger.info(f"\n{'='*60}")
    logger.info(f"📊 FINAL SUMMARY")
    logger.info(f"{'='*60}\n")
    logger.info(f"{'mode':<16}" + "".join(f"{p + ' min':>20}{p + ' mean':>20}" for p in PRESETS))
    for mode in MODES:
        line = f"{mode:<16}"
        for preset in PRESETS:
            row = tables[preset].row(mode)
            line += f"{row.min:>20.4f}{row.mean:>20.4f}"
        logger.info(line)

    for preset in PRESETS:
        cro = tables[preset].row(CRO_SL)
        best_standalone = min(r.min for r in tables[preset].rows if r.mode != CRO_SL)
        mark = "✅" if cro.min <= best_standalone else "⚠️"
        logger.info(f"{mark} {preset}: cro-sl min {cro.min:.4f} vs best standalone min {best_standalone:.4f}")

    logger.info(f"\n   Results saved in: {out_dir}\n")


if __name__ == "__main__":
    reproduce()
