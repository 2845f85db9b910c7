"""Element budgets and shared defaults."""
from __future__ import annotations

import os

DEFAULT_BUDGET = 5_000_000
ENV_BUDGET = "GROWTHLAB_BUDGET"


def resolve_budget(budget: int | None = None) -> int:
    """Explicit argument wins, then the GROWTHLAB_BUDGET env var, then the default."""
    if budget is not None:
        return budget
    env = os.environ.get(ENV_BUDGET)
    if env:
        return int(env)
    return DEFAULT_BUDGET
