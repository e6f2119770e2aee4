"""Fitting of existential constants over test families."""

from __future__ import annotations

import math
from typing import Any, Hashable, Sequence


def fit_constant(pairs: Sequence[tuple[float, float]], groups: Sequence[Hashable] | None = None,
                 floor: float = 0.0) -> dict[str, Any]:
    """Smallest ``c >= floor`` with ``statistic <= c * shape`` for every ``(statistic, shape)``.

    Each member (a group of pairs, or each pair when ``groups`` is None) has its
    own minimal constant; ``stability`` is the max/min ratio of those that are
    positive. A family whose members all sit at the floor (every bound slack)
    has stability 1.
    """
    if not pairs:
        raise ValueError("cannot fit a constant to an empty family")
    groups = list(range(len(pairs))) if groups is None else list(groups)
    if len(groups) != len(pairs):
        raise ValueError("groups must align with pairs")
    per: dict[Hashable, float] = {}
    for (stat, shape), g in zip(pairs, groups):
        if shape > 0:
            c = stat / shape
        elif stat <= 0:
            c = -math.inf  # bound holds for every c >= 0
        else:
            c = math.inf  # no constant works
        per[g] = max(per.get(g, -math.inf), c)
    members = {g: max(c, floor) for g, c in per.items()}
    constant = max(members.values())
    positive = [c for c in members.values() if c > 0 and math.isfinite(c)]
    if not math.isfinite(constant):
        stability = math.inf
    elif positive and len(positive) == len(members):
        stability = max(positive) / min(positive)
    elif positive:
        # slack members need nothing; measure spread among the binding ones
        stability = max(positive) / min(positive)
    else:
        stability = 1.0
    binding = sorted((g for g, c in members.items() if c == constant), key=str)
    return {"constant": float(constant), "stability": float(stability), "members": len(members),
            "binding": binding, "per_member": {str(g): float(c) for g, c in sorted(members.items(), key=lambda t: str(t[0]))},
            "all_slack": not positive}
