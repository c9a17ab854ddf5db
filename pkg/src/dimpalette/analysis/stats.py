"""Two-group rank statistics: Mann-Whitney U with exact and approximate p-values.

U is computed from midranks (ties share the mean of their rank block), so
U_A + U_B = n_A * n_B always holds. The two-sided p-value is exact by
enumeration of all C(n, n_A) group labelings while n_A * n_B <= 64 (the null
distribution of U is symmetric about n_A * n_B / 2, ties included, because
reversing the pooled order maps each labeling to its mirror); larger designs
fall back to the normal approximation with tie and continuity corrections.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

from ..errors import DegenerateInput

EXACT_LIMIT = 64


@dataclass(frozen=True)
class GroupSummary:
    mean: float
    sd: float
    n: int

    def to_json(self) -> dict:
        return {"mean": self.mean, "sd": self.sd, "n": self.n}


@dataclass(frozen=True)
class TestResult:
    u_statistic: float  # U for group A
    p_value: float
    method: str  # "exact" | "normal"
    group_a: GroupSummary
    group_b: GroupSummary

    def to_json(self) -> dict:
        return {
            "uStatistic": self.u_statistic,
            "pValue": self.p_value,
            "method": self.method,
            "groupSummaries": {"a": self.group_a.to_json(), "b": self.group_b.to_json()},
        }


def midranks(values: list[float]) -> list[float]:
    """Fractional ranks, 1-based; tied values share the mean of their block."""
    order = sorted(range(len(values)), key=values.__getitem__)
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        mean_rank = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = mean_rank
        i = j + 1
    return ranks


def summarize(values: list[float]) -> GroupSummary:
    n = len(values)
    mean = sum(values) / n
    sd = math.sqrt(sum((v - mean) ** 2 for v in values) / (n - 1)) if n > 1 else 0.0
    return GroupSummary(mean=mean, sd=sd, n=n)


def mann_whitney_u(group_a: list[float], group_b: list[float]) -> TestResult:
    """Two-sided Mann-Whitney U test of group A against group B."""
    n_a, n_b = len(group_a), len(group_b)
    if n_a < 1 or n_b < 1:
        raise DegenerateInput("both groups need at least one observation")
    pooled = list(group_a) + list(group_b)
    if min(pooled) == max(pooled):
        raise DegenerateInput("all values identical across both groups")
    ranks = midranks(pooled)
    rank_sum_a = sum(ranks[:n_a])
    u_a = rank_sum_a - n_a * (n_a + 1) / 2
    if n_a * n_b <= EXACT_LIMIT:
        p = _exact_p(ranks, n_a, u_a)
        method = "exact"
    else:
        p = _normal_p(ranks, n_a, n_b, u_a)
        method = "normal"
    return TestResult(
        u_statistic=u_a,
        p_value=p,
        method=method,
        group_a=summarize(group_a),
        group_b=summarize(group_b),
    )


def _exact_p(ranks: list[float], n_a: int, observed_u: float) -> float:
    """P(|U - mu| >= |observed - mu|) over every assignment of pooled values to A."""
    n = len(ranks)
    mu = n_a * (n - n_a) / 2
    observed_dev = abs(observed_u - mu)
    offset = n_a * (n_a + 1) / 2
    hits = 0
    total = 0
    for subset in combinations(range(n), n_a):
        u = sum(ranks[i] for i in subset) - offset
        if abs(u - mu) >= observed_dev - 1e-9:
            hits += 1
        total += 1
    return hits / total


def _normal_p(ranks: list[float], n_a: int, n_b: int, u_a: float) -> float:
    n = n_a + n_b
    mu = n_a * n_b / 2
    tie_term = _tie_sum(ranks)
    variance = n_a * n_b / 12 * ((n + 1) - tie_term / (n * (n - 1)))
    if variance <= 0:
        raise DegenerateInput("zero variance after tie correction")
    deviation = u_a - mu
    if deviation > 0:
        deviation -= 0.5  # continuity correction toward the mean
    elif deviation < 0:
        deviation += 0.5
    z = deviation / math.sqrt(variance)
    return min(1.0, 2 * _norm_sf(abs(z)))


def _tie_sum(ranks: list[float]) -> float:
    counts: dict[float, int] = {}
    for r in ranks:
        counts[r] = counts.get(r, 0) + 1
    return float(sum(t**3 - t for t in counts.values()))


def _norm_sf(x: float) -> float:
    return 0.5 * math.erfc(x / math.sqrt(2))
