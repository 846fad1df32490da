"""Order-randomized pairwise judging and win-rate aggregation."""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass

from critics.errors import EmptyInput, MixedMetricSets, VerdictParseFailure
from critics.gateway import Backend, ChatRequest, JUDGE_TEMPERATURE, complete, load_template, render_prompt
from critics.evalharness.verdicts import (
    MetricSet,
    Outcome,
    Verdict,
    VerdictSet,
    derandomize,
    parse_verdicts,
)

logger = logging.getLogger(__name__)

_STRICT_FORMAT_REMINDER = "output your final verdict by strictly following this format"

JUDGE_REPROMPTS = 3


@dataclass(frozen=True)
class WinRateRow:
    rate_a: float
    rate_b: float
    n: int


WinRateTable = dict[str, WinRateRow]


def judge_pair(
    item_a: str,
    item_b: str,
    metrics: MetricSet,
    seed: int,
    backend: Backend,
    pair_id: str = "",
    model: str = "judge",
) -> VerdictSet:
    """Judges one pair at temperature 0 with a seeded presentation-order flip."""
    if not item_a or not item_b:
        raise EmptyInput("both items must be non-empty")
    order = "AB" if random.Random(seed).random() < 0.5 else "BA"
    first, second = (item_a, item_b) if order == "AB" else (item_b, item_a)
    template = load_template("judge_pair_plan" if metrics.stage == "plan" else "judge_pair_text")
    prompt = render_prompt(template, {"item_a": first, "item_b": second})

    last_exc: VerdictParseFailure | None = None
    for attempt in range(JUDGE_REPROMPTS):
        request = ChatRequest(
            model=model,
            temperature=JUDGE_TEMPERATURE,
            messages=(("user", prompt),),
        )
        raw = complete(request, backend).content
        try:
            verdicts = parse_verdicts(raw, metrics)
        except VerdictParseFailure as exc:
            last_exc = exc
            logger.warning("verdict parse failed (attempt %d): %s", attempt + 1, exc)
            prompt = prompt + "\n\n" + _STRICT_FORMAT_REMINDER
            continue
        return VerdictSet(
            pair_id=pair_id,
            presentation_order=order,
            verdicts=derandomize(verdicts, order),
            raw_response=raw,
        )
    assert last_exc is not None
    raise last_exc


def aggregate_win_rates(sets: list[VerdictSet], metrics: MetricSet) -> WinRateTable:
    """Per-metric win rates; "both good" credits both sides, so a row's two
    rates may sum above 100."""
    if not sets:
        raise EmptyInput("no verdict sets")
    for vs in sets:
        ids = tuple(v.metric_id for v in vs.verdicts)
        if ids != metrics.metrics:
            raise MixedMetricSets(f"verdict set {vs.pair_id!r} has metrics {ids}")

    table: WinRateTable = {}
    for k, metric_id in enumerate(metrics.metrics):
        wins_a = wins_b = 0
        for vs in sets:
            outcome = vs.verdicts[k].outcome
            if outcome in (Outcome.A, Outcome.BOTH):
                wins_a += 1
            if outcome in (Outcome.B, Outcome.BOTH):
                wins_b += 1
        n = len(sets)
        table[metric_id] = WinRateRow(
            rate_a=100.0 * wins_a / n,
            rate_b=100.0 * wins_b / n,
            n=n,
        )
    return table
