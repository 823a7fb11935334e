import logging
import os
from dataclasses import dataclass, replace
from fractions import Fraction

# --- ENGINE TUNABLES ---
# Caps guard the constructions that are exponential by nature:
#   subset_cap        -> 2^k target sets in the reduction
#   disjunct_cap      -> DNF expansion of queries
#   oracle_cap        -> pure memoryless strategies enumerated by the oracle
#   hard_instance_max_layers -> denominators 8h*2^n of generated instances

WORKERS_ENV = 'MOCHECK_WORKERS'
LOG_LEVEL_ENV = 'MOCHECK_LOG_LEVEL'


@dataclass(frozen=True)
class EngineSettings:
    subset_cap: int = 16
    disjunct_cap: int = 4096
    oracle_cap: int = 10**6
    # Mass the qualitative strategy moves to an almost-sure phase at each eligible state.
    # Any value in (0, 1) keeps positive properties positive; the reported values follow it.
    # On the loop-or-leave model 1/2 is offered at the dummy start, u and p1, giving (11/24, 13/24).
    switch_probability: Fraction = Fraction(1, 2)
    hard_instance_max_layers: int = 24
    batch_size: int = 64
    workers: int = 1
    log_level: str = 'WARNING'

    def __post_init__(self):
        if not 0 < self.switch_probability < 1:
            raise ValueError("switch_probability must lie strictly between 0 and 1")
        if self.workers < 1:
            raise ValueError("workers must be positive")
        if not isinstance(logging.getLevelName(self.log_level.upper()), int):
            raise ValueError(f"unknown log level {self.log_level!r}")

    @staticmethod
    def from_env(**overrides) -> 'EngineSettings':
        """Defaults, then the environment, then explicit overrides (None means keep)."""
        settings = EngineSettings()
        workers = os.environ.get(WORKERS_ENV)
        if workers:
            settings = replace(settings, workers=max(1, int(workers)))
        level = os.environ.get(LOG_LEVEL_ENV)
        if level:
            settings = replace(settings, log_level=level.upper())
        given = {k: v for k, v in overrides.items() if v is not None}
        return replace(settings, **given) if given else settings


DEFAULT_SETTINGS = EngineSettings()
