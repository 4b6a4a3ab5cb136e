import os
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

VERSION = "0.1.0"


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        return default


@dataclass
class Config:
    # Search budgets
    budget: int = 10_000_000
    threads: int = os.cpu_count() or 1
    seed: int = 0
    split_depth: int = 4
    # Size caps
    max_grid_points: int = 2 ** 24
    max_product_elements: int = 10 ** 6
    exact_search_max_points: int = 64
    exhaustive_oracle_max_points: int = 20
    # Cross-check limits
    width_oracle_max_elements: int = 20
    dilworth_check_max_points: int = 4000
    exact_partition_max_points: int = 36
    subgrid_exhaustive_limit: int = 20_000
    # Multiplier reported for O(.) formulas
    bound_constant: Fraction = field(default_factory=lambda: Fraction(1))
    # Logging
    log_dir: Optional[str] = None
    log_level: str = "INFO"

    @classmethod
    def from_env(cls) -> "Config":
        base = cls()
        return replace(
            base,
            budget=_env_int("PGL_BUDGET", base.budget),
            threads=max(1, _env_int("PGL_THREADS", base.threads)),
            seed=_env_int("PGL_SEED", base.seed),
            log_dir=os.getenv("PGL_LOG_DIR") or None,
            log_level=os.getenv("PGL_LOG_LEVEL", base.log_level).upper(),
        )

    def with_overrides(self, **overrides) -> "Config":
        """Copy with every non-None override applied (CLI flags win over env)."""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


CONF = Config.from_env()
