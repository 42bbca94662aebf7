"""Few-bit CSI acquisition for centralized cell-free massive MIMO.

Monte Carlo comparison of estimate-and-quantize (EQ) and quantize-and-estimate
(QE) channel acquisition over a bit-limited fronthaul, with trained vector
quantization against per-antenna uniform scalar quantization baselines.
"""

from .errors import ConfigError, NumericalError
from .harness import ExperimentConfig, load_config, run_experiment, sweep, validate

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "NumericalError",
    "load_config",
    "run_experiment",
    "sweep",
    "validate",
    "__version__",
]
