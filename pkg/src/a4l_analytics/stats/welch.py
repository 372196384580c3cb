"""Welch's two-sample t-test and its post-hoc power.

Group ordering is the caller's contract: ``alternative="less"`` asserts
that group1's mean is below group2's. The test statistic is

    t = (m1 - m2) / sqrt(s1^2/n1 + s2^2/n2)

with Welch-Satterthwaite degrees of freedom. Post-hoc power evaluates
the noncentral t distribution at the observed noncentrality with the
same degrees of freedom, so the power statement matches the test that
was actually run.
"""

from dataclasses import dataclass
from typing import Sequence, Tuple

from ..errors import DegenerateDataError, InsufficientDataError
from .special import noncentral_t_cdf, student_t_cdf, student_t_quantile
from .summaries import GroupSummary, descriptives

TWO_SIDED = "two_sided"
LESS = "less"
GREATER = "greater"


@dataclass(frozen=True)
class WelchResult:
    dependent: str
    group1: GroupSummary
    group2: GroupSummary
    t: float
    df: float
    p_value: float
    alternative: str
    alpha: float

    def to_dict(self) -> dict:
        return {
            "kind": "welch_ttest",
            "dependent": self.dependent,
            "group1": self.group1.to_dict(),
            "group2": self.group2.to_dict(),
            "t": self.t,
            "df": self.df,
            "p_value": self.p_value,
            "alternative": self.alternative,
            "alpha": self.alpha,
        }


@dataclass(frozen=True)
class PowerResult:
    dependent: str
    noncentrality: float
    df: float
    critical_value: float
    power: float
    alpha: float
    alternative: str

    def to_dict(self) -> dict:
        return {
            "kind": "welch_power",
            "dependent": self.dependent,
            "noncentrality": self.noncentrality,
            "df": self.df,
            "critical_value": self.critical_value,
            "power": self.power,
            "alpha": self.alpha,
            "alternative": self.alternative,
        }


def _welch_parts(g1: GroupSummary, g2: GroupSummary) -> Tuple[float, float]:
    """Standard error and Welch-Satterthwaite df from two summaries.

    The df uses the scale-free form 1 / (r^2/(n1-1) + (1-r)^2/(n2-1))
    with r = v1/(v1+v2), which cannot underflow for tiny variances the
    way the textbook se^4-over-sum-of-squares layout does.
    """
    v1 = g1.variance / g1.n
    v2 = g2.variance / g2.n
    se2 = v1 + v2
    if se2 == 0.0:
        raise DegenerateDataError(
            "group variances are below representable precision, "
            "the t statistic is undefined"
        )
    r = v1 / se2
    df = 1.0 / (r * r / (g1.n - 1) + (1.0 - r) * (1.0 - r) / (g2.n - 1))
    return se2**0.5, df


def _check_groups(g1: GroupSummary, g2: GroupSummary) -> None:
    if g1.n < 2 or g2.n < 2:
        raise InsufficientDataError(
            f"each group needs n >= 2 non-missing values, got n1={g1.n}, n2={g2.n}"
        )
    # variance == 0.0 also catches sample spreads below the double-
    # precision floor, where no finite t statistic is representable
    if g1.variance + g2.variance == 0.0:
        raise DegenerateDataError(
            "both groups have zero variance, the t statistic is undefined"
        )


def welch_ttest(
    group1: Sequence[float],
    group2: Sequence[float],
    alternative: str = TWO_SIDED,
    alpha: float = 0.05,
    dependent: str = "",
    labels: Tuple[str, str] = ("group1", "group2"),
) -> WelchResult:
    """Welch's unequal-variances t-test of two numeric samples."""
    g1 = descriptives(group1, label=labels[0])
    g2 = descriptives(group2, label=labels[1])
    _check_groups(g1, g2)

    se, df = _welch_parts(g1, g2)
    t = (g1.mean - g2.mean) / se
    f = student_t_cdf(t, df)
    if alternative == LESS:
        p = f
    elif alternative == GREATER:
        p = 1.0 - f
    else:
        p = 2.0 * min(f, 1.0 - f)
    return WelchResult(
        dependent=dependent,
        group1=g1,
        group2=g2,
        t=t,
        df=df,
        p_value=p,
        alternative=alternative,
        alpha=alpha,
    )


def welch_power(
    group1: GroupSummary,
    group2: GroupSummary,
    alpha: float = 0.05,
    alternative: str = TWO_SIDED,
    dependent: str = "",
) -> PowerResult:
    """Post-hoc power of the Welch test at the observed effect."""
    _check_groups(group1, group2)

    se, df = _welch_parts(group1, group2)
    nc = (group1.mean - group2.mean) / se
    if alternative == GREATER:
        crit = student_t_quantile(1.0 - alpha, df)
        power = 1.0 - noncentral_t_cdf(crit, df, nc)
    elif alternative == LESS:
        crit = student_t_quantile(alpha, df)
        power = noncentral_t_cdf(crit, df, nc)
    else:
        crit = student_t_quantile(1.0 - 0.5 * alpha, df)
        power = 1.0 - noncentral_t_cdf(crit, df, nc) + noncentral_t_cdf(-crit, df, nc)
    return PowerResult(
        dependent=dependent,
        noncentrality=nc,
        df=df,
        critical_value=crit,
        power=min(max(power, 0.0), 1.0),
        alpha=alpha,
        alternative=alternative,
    )
