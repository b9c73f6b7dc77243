#!/usr/bin/env python3

"""
Repository-wide limits and tolerances.

CONFIG is a plain mapping with upper-case keys. Library functions read it at
call time, so tests and the CLI can adjust an entry without re-importing.
"""

import os
import logging
from typing import Any, Dict, Mapping, Optional

logger = logging.getLogger(__name__)

ENV_PREFIX = "ONEWAY_"

DEFAULTS: Dict[str, Any] = {
    # enumeration caps (desk scale)
    'MAX_BENCH_BITS': 12,
    'MAX_Y_SIZE': 1_000_000,
    'MAX_VC_COLUMNS': 24,
    'MAX_VC_DIMENSION': 20,
    'MAX_REC_ROWS': 24,
    'REC_BLOCK_BITS': 8,
    'MAX_PARTITION_ROWS': 12,
    'MAX_QUANTUM_DIM': 16,
    'MAX_SIGN_PATTERN_BITS': 4,
    'SCORE_CHUNK_CELLS': 1 << 22,
    'GREEDY_RESTARTS': 32,
    # tolerances
    'MASS_TOL': 1e-9,
    'CONSTRUCTION_TOL': 1e-12,
    'COMPARE_TOL': 1e-9,
    'QUANTUM_TOL': 1e-10,
    'SAMPLER_FLOOR': 1e-13,
    'SAMPLER_MAX_ROUNDS': 10_000_000,
}

CONFIG: Dict[str, Any] = dict(DEFAULTS)


def setting(key: str, override: Optional[Any] = None) -> Any:
    """Return ``override`` when given, otherwise the current CONFIG value."""
    if override is not None:
        return override
    return CONFIG[key]


def load_env_overrides(environ: Optional[Mapping[str, str]] = None) -> Dict[str, Any]:
    """Apply ONEWAY_<KEY> environment variables to CONFIG.

    Values are coerced to the type of the default. Returns the applied
    overrides.
    """
    environ = os.environ if environ is None else environ
    applied = {}
    for key, default in DEFAULTS.items():
        raw = environ.get(ENV_PREFIX + key)
        if raw is None:
            continue
        try:
            value = type(default)(float(raw)) if isinstance(default, int) else type(default)(raw)
        except ValueError:
            raise ValueError(f"{ENV_PREFIX}{key}={raw!r} is not a valid {type(default).__name__}")
        CONFIG[key] = value
        applied[key] = value
    if applied:
        logger.info("config overrides from environment: %s", applied)
    return applied


def reset() -> None:
    """Restore every CONFIG entry to its default."""
    CONFIG.clear()
    CONFIG.update(DEFAULTS)
