"""Deterministic RNG substreams.

Every random draw in the toolkit flows from one root seed.  Scenario-level
draws (jammed-band placement) and block-level draws (fading, shadowing,
noise) get independent substreams keyed by integer coordinates, so block
synthesis is order-independent and safely parallelizable.
"""

from __future__ import annotations

import numpy as np


def scenario_rng(seed: int, scenario_id: int) -> np.random.Generator:
    """Substream for per-scenario draws, e.g. the jammed-band offset."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(scenario_id)]))


def block_rng(seed: int, scenario_id: int, block_index: int) -> np.random.Generator:
    """Substream for all randomness inside one resource block."""
    return np.random.default_rng(
        np.random.SeedSequence([int(seed), int(scenario_id), int(block_index)])
    )
