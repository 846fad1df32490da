"""Pairwise verdict model: token parsing, rendering, and de-randomization.

Judges answer one question per metric and finish with a strict token line
like ``1:[[A]], 2:[[B]], 3:[[B]], 4:[[BY]]``. The premise-relevance metric
uses its own token family (BY/OA/OB/BN/UN); ties appear as [[C]] or [[TI]]
depending on the prompt and both normalize to the same outcome.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

from critics.errors import VerdictParseFailure


class Outcome(enum.Enum):
    A = "A"
    B = "B"
    BOTH = "Both"
    NEITHER = "Neither"
    TIE = "Tie-or-undetermined"

    def flipped(self) -> "Outcome":
        if self is Outcome.A:
            return Outcome.B
        if self is Outcome.B:
            return Outcome.A
        return self


@dataclass(frozen=True)
class MetricSet:
    stage: str  # "plan" | "text"
    metrics: tuple[str, ...]

    def __post_init__(self):
        if not self.metrics:
            raise ValueError("metrics must be non-empty")
        if len(set(self.metrics)) != len(self.metrics):
            raise ValueError("metric ids must be unique")


PLAN_METRICS = MetricSet(stage="plan", metrics=("interesting", "coherent", "creative", "relevant"))
TEXT_METRICS = MetricSet(stage="text", metrics=("interesting", "coherence", "consistency", "creative"))


@dataclass(frozen=True)
class Verdict:
    metric_id: str
    outcome: Outcome

    def flipped(self) -> "Verdict":
        return Verdict(self.metric_id, self.outcome.flipped())


@dataclass(frozen=True)
class VerdictSet:
    pair_id: str
    presentation_order: str  # "AB" | "BA"
    verdicts: tuple[Verdict, ...]
    raw_response: str


_TOKEN_TO_OUTCOME = {
    "A": Outcome.A,
    "B": Outcome.B,
    "C": Outcome.TIE,
    "TI": Outcome.TIE,
    "UN": Outcome.TIE,
    "OA": Outcome.A,
    "OB": Outcome.B,
    "BY": Outcome.BOTH,
    "BN": Outcome.NEITHER,
}

# Rendering uses the relevance family for Both/Neither so that render/parse
# is an exact round-trip over the whole outcome enum.
_OUTCOME_TO_TOKEN = {
    Outcome.A: "A",
    Outcome.B: "B",
    Outcome.TIE: "C",
    Outcome.BOTH: "BY",
    Outcome.NEITHER: "BN",
}

_ITEM_RE = re.compile(r"(\d+)\s*:\s*\[\[([A-Za-z]+)\]\]")


def parse_verdicts(raw: str, metrics: MetricSet) -> tuple[Verdict, ...]:
    """Extracts the final ``n:[[TOKEN]]`` list, tolerating surrounding prose."""
    found = _ITEM_RE.findall(raw)
    if len(found) < len(metrics.metrics):
        raise VerdictParseFailure(0, raw.strip()[-60:])
    # Keep the trailing run: a re-prompted judge may repeat earlier lines.
    found = found[-len(metrics.metrics) :]
    verdicts = []
    for k, (pos, token) in enumerate(found):
        if int(pos) != k + 1:
            raise VerdictParseFailure(int(pos), token)
        token = token.upper()
        if token not in _TOKEN_TO_OUTCOME:
            raise VerdictParseFailure(int(pos), token)
        verdicts.append(Verdict(metrics.metrics[k], _TOKEN_TO_OUTCOME[token]))
    return tuple(verdicts)


def render_verdicts(verdicts: tuple[Verdict, ...]) -> str:
    return ", ".join(
        f"{k + 1}:[[{_OUTCOME_TO_TOKEN[v.outcome]}]]" for k, v in enumerate(verdicts)
    )


def derandomize(verdicts: tuple[Verdict, ...], presentation_order: str) -> tuple[Verdict, ...]:
    """Maps verdicts back so A/B refer to the caller's original arguments."""
    if presentation_order == "AB":
        return verdicts
    if presentation_order == "BA":
        return tuple(v.flipped() for v in verdicts)
    raise ValueError(f"bad presentation order {presentation_order!r}")
