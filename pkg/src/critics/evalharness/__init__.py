from critics.evalharness.judge import (
    WinRateRow,
    WinRateTable,
    aggregate_win_rates,
    judge_pair,
)
from critics.evalharness.kappa import AgreementReport, cohen_kappa, fleiss_kappa
from critics.evalharness.verdicts import (
    MetricSet,
    Outcome,
    PLAN_METRICS,
    TEXT_METRICS,
    Verdict,
    VerdictSet,
    derandomize,
    parse_verdicts,
    render_verdicts,
)

__all__ = [
    "AgreementReport",
    "MetricSet",
    "Outcome",
    "PLAN_METRICS",
    "TEXT_METRICS",
    "Verdict",
    "VerdictSet",
    "WinRateRow",
    "WinRateTable",
    "aggregate_win_rates",
    "cohen_kappa",
    "derandomize",
    "fleiss_kappa",
    "judge_pair",
    "parse_verdicts",
    "render_verdicts",
]
