"""Package exception types."""

from __future__ import annotations


class NumericalError(RuntimeError):
    """A linear-algebra step failed beyond the built-in regularization."""


class ConfigError(ValueError):
    """Invalid experiment configuration; carries every violation at once."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid configuration:\n" + "\n".join(f"  - {v}" for v in self.violations))
