# Constants, defaults, setting resolution
import logging
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from dotenv import dotenv_values

from src.errors import InputError

logger = logging.getLogger(__name__)

# Synthetic benchmark defaults
DEFAULT_D = 10
DEFAULT_LAG = 1
DEFAULT_T = 1000
DEFAULT_MEAN_DEGREE = 1.0
DEFAULT_ETA = 1.5
DEFAULT_SIGMA = 1.0
DEFAULT_BURN_IN = 100
STABILITY_RETRIES = 5
STABILITY_SHRINK = 0.9
STABILITY_REDRAWS = 50  # fresh supports and weights once the shrinks run out

# Weight ranges for ground-truth sampling
INSTANTANEOUS_RANGES = ((-2.0, -0.5), (0.5, 2.0))
LAGGED_RANGES = ((-1.0, -0.25), (0.25, 2.0))  # scaled by 1 / eta**k

# Training defaults
DEFAULT_EPOCHS = 2000
DEFAULT_BATCH_SIZE = 16
DEFAULT_LR = 1e-2
DEFAULT_LAMBDA1 = 1.0
DEFAULT_LAMBDA2 = 0.01
DEFAULT_OMEGA = 0.01
DEFAULT_TAU = 1.0
DEFAULT_TAU_FINAL = 0.3
DEFAULT_THRESHOLD = 0.3
DEFAULT_SEED = 0
EMBED_RATIO = 2 / 5  # k = round(EMBED_RATIO * d)

# No-mask ablation: lambda1 escalation
LAMBDA1_GROWTH = 10.0
LAMBDA1_EVERY = 500
LAMBDA1_MAX = 1e4

# Benchmark grid
DEFAULT_BENCH_DS = [10]
DEFAULT_BENCH_SEEDS = [1, 2, 3]
DEFAULT_JOBS = 1

# Rank study
DEFAULT_TARGET_TPR = 0.9
DEFAULT_RANK_RATIOS = [0.2, 0.4, 0.6]
DEFAULT_RANK_KS = [1, 2, 4, 6, 8]

# Paths
PROJECT_ROOT = Path(__file__).parent.parent
OUTPUTS_DIR = PROJECT_ROOT / "outputs"

# Config files: KEY=VALUE, keys are flag names upper-cased, optional prefix
CONFIG_PREFIX = "LOCALDBN_"


def _coerce(key: str, raw: str, default: Any) -> Any:
    """Coerce a config-file string to the type of its default."""
    try:
        if isinstance(default, bool):
            lowered = raw.strip().lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        if isinstance(default, list):
            return [type(default[0])(v) for v in raw.replace(",", " ").split()] if default else raw.split()
        if default is None:
            for cast in (int, float):
                try:
                    return cast(raw)
                except ValueError:
                    pass
    except ValueError:
        raise InputError(f"Config key {key}: cannot parse {raw!r}")
    return raw


def load_config_file(path: Path) -> Dict[str, str]:
    """Read a dotenv-style config file into {flag_name: raw string}."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"Config file not found: {path}")

    values = {}
    for key, raw in dotenv_values(path).items():
        if raw is None:
            continue
        name = key[len(CONFIG_PREFIX):] if key.startswith(CONFIG_PREFIX) else key
        values[name.lower()] = raw
    return values


def resolve_settings(
    flags: Mapping[str, Any],
    defaults: Mapping[str, Any],
    config_path: Optional[Path] = None,
) -> Dict[str, Any]:
    """Merge settings with precedence flags > config file > defaults.

    Args:
        flags: Parsed command-line values; None means "not given"
        defaults: Default value for every known setting
        config_path: Optional dotenv-style config file

    Returns:
        Dict with one entry per key of defaults
    """
    file_values = load_config_file(config_path) if config_path else {}
    for key in file_values:
        if key not in defaults:
            logger.warning("Ignoring unknown config key %r in %s", key, config_path)

    settings = dict(defaults)
    for key, default in defaults.items():
        if key in file_values:
            settings[key] = _coerce(key, file_values[key], default)
        if flags.get(key) is not None:
            settings[key] = flags[key]
    return settings
