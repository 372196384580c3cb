"""Mann-Whitney U test.

u1 counts pairs won by group1 (ties count one half), computed through
the midrank identity u1 = R1 - n1(n1+1)/2. Small tie-free samples get
the exact permutation p-value from the count distribution; everything
else uses the normal approximation with tie-corrected variance and a
continuity correction of one half. ``alternative="less"`` asserts that
group1 tends to produce smaller values than group2.
"""

from dataclasses import dataclass
from typing import List, Sequence

from ..errors import DegenerateDataError, InsufficientDataError
from ._backend import kernels
from .special import normal_cdf
from .welch import GREATER, LESS, TWO_SIDED

EXACT_SIZE_LIMIT = 12


@dataclass(frozen=True)
class MannWhitneyResult:
    dependent: str
    u1: float
    u2: float
    n1: int
    n2: int
    p_value: float
    method: str  # "exact" | "normal_approx"
    tie_correction_applied: bool
    alternative: str

    def to_dict(self) -> dict:
        return {
            "kind": "mann_whitney_u",
            "dependent": self.dependent,
            "u1": self.u1,
            "u2": self.u2,
            "n1": self.n1,
            "n2": self.n2,
            "p_value": self.p_value,
            "method": self.method,
            "tie_correction_applied": self.tie_correction_applied,
            "alternative": self.alternative,
        }


def _midranks(pooled: Sequence[float]) -> List[float]:
    order = sorted(range(len(pooled)), key=pooled.__getitem__)
    ranks = [0.0] * len(pooled)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and pooled[order[j + 1]] == pooled[order[i]]:
            j += 1
        mid = 0.5 * (i + j) + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = mid
        i = j + 1
    return ranks


def _exact_p(u1: float, n1: int, n2: int, alternative: str) -> float:
    counts = kernels.mwu_exact_counts(n1, n2)
    total = sum(counts)
    u = int(u1)
    if alternative == LESS:
        return sum(counts[: u + 1]) / total
    if alternative == GREATER:
        return sum(counts[u:]) / total
    lo = min(u, n1 * n2 - u)
    p = (sum(counts[: lo + 1]) + sum(counts[n1 * n2 - lo :])) / total
    return min(p, 1.0)


def mann_whitney_u(
    group1: Sequence[float],
    group2: Sequence[float],
    alternative: str = TWO_SIDED,
    dependent: str = "",
) -> MannWhitneyResult:
    """Rank-sum comparison of two samples."""
    n1, n2 = len(group1), len(group2)
    if n1 == 0 or n2 == 0:
        raise InsufficientDataError(
            f"both groups must be non-empty, got n1={n1}, n2={n2}"
        )

    pooled = list(group1) + list(group2)
    n = n1 + n2
    ranks = _midranks(pooled)
    r1 = sum(ranks[:n1])
    u1 = r1 - n1 * (n1 + 1) / 2.0
    u2 = n1 * n2 - u1

    # Exactness needs the count distribution to be the permutation
    # distribution, which requires all pooled values distinct.
    if n <= EXACT_SIZE_LIMIT and len(set(pooled)) == n:
        p = _exact_p(u1, n1, n2, alternative)
        return MannWhitneyResult(
            dependent=dependent,
            u1=u1,
            u2=u2,
            n1=n1,
            n2=n2,
            p_value=p,
            method="exact",
            tie_correction_applied=False,
            alternative=alternative,
        )

    tie_sum = 0
    seen: dict = {}
    for v in pooled:
        seen[v] = seen.get(v, 0) + 1
    for count in seen.values():
        tie_sum += count**3 - count
    variance = n1 * n2 / 12.0 * ((n + 1) - tie_sum / (n * (n - 1)))
    if variance <= 0.0:
        raise DegenerateDataError("all pooled values are identical, U has no variance")
    sd = variance**0.5

    mean = n1 * n2 / 2.0
    p_less = normal_cdf((u1 - mean + 0.5) / sd)
    p_greater = 1.0 - normal_cdf((u1 - mean - 0.5) / sd)
    if alternative == LESS:
        p = p_less
    elif alternative == GREATER:
        p = p_greater
    else:
        p = min(1.0, 2.0 * min(p_less, p_greater))
    return MannWhitneyResult(
        dependent=dependent,
        u1=u1,
        u2=u2,
        n1=n1,
        n2=n2,
        p_value=p,
        method="normal_approx",
        tie_correction_applied=tie_sum > 0,
        alternative=alternative,
    )
