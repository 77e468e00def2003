"""
Search-free check of the published TMD designs.

What it does:
1. For each bundled design under data/designs, load the building it was found for
2. Evaluate g(x) on the bare and equipped building
3. Compare with the published fitness

The n2-lab-top-best masses are printed as 0.0100 kg but the rig's TMDs weigh 0.100 kg;
both are evaluated.
"""
import sys
import os

sys.path.append(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from tmdreef.core.experiment import evaluate_design, load_config
from tmdreef.core.presets import design_from_document, load_design
import logging

logging.basicConfig(
    level=logging.INFO,
    format='%(message)s'
)
logger = logging.getLogger(__name__)

# design name -> (preset, mass override)
CASES = [
    ("n2-paper-best", "n2-paper", None),
    ("n4-paper-best", "n4-paper", None),
    ("n4-paper-top-best", "n4-paper-top", None),
    ("n2-lab-best", "n2-lab", None),
    ("n2-lab-top-best", "n2-lab-top", None),
    ("n2-lab-top-best", "n2-lab-top", 0.1),
]


def check_all():
    logger.info(f"\n{'='*60}")
    logger.info("🔍 Published design check")
    logger.info(f"{'='*60}\n")

    results = []
    for design_name, preset, mass in CASES:
        doc = load_design(design_name)
        cfg = load_config(preset=preset)
        result = evaluate_design(cfg, design_from_document(doc, mass))
        label = design_name if mass is None else f"{design_name} (m={mass})"
        results.append((label, preset, result, doc.published_fitness))

    logger.info(f"{'design':<26} {'preset':<14} {'bare dB':>8} {'g':>9} {'dB':>7} {'published':>10} {'diff':>8}")
    logger.info("-" * 88)
    for label, preset, result, published in results:
        g = result.fitness
        diff = (g.value - published) / published if published else float("nan")
        logger.info(
            f"{label:<26} {preset:<14} {result.bare_fitness.db:>8.2f} {g.value:>9.4f} "
            f"{g.db:>7.2f} {published:>10.4f} {diff:>+8.2%}"
        )

    logger.info(f"\n{'='*60}")
    logger.info("✅ Done")
    logger.info(f"{'='*60}\n")


if __name__ == "__main__":
    check_all()
