"""Domain types for the sentence-level text refinement stage."""

from __future__ import annotations

from dataclasses import dataclass

from critics.crplan.types import LeaderDecision
from critics.story import SentenceSpan, StoryText

_TEXT_CRITICS = ("image", "voice")


@dataclass(frozen=True)
class RevisionSuggestion:
    criterion_id: str
    original: str
    replacement: str
    reason: str

    def __post_init__(self):
        if self.criterion_id not in _TEXT_CRITICS:
            raise ValueError(f"unknown text critic {self.criterion_id!r}")
        if not self.replacement:
            raise ValueError("replacement must be non-empty")

    def to_dict(self) -> dict:
        return {
            "criterion_id": self.criterion_id,
            "original": self.original,
            "replacement": self.replacement,
            "reason": self.reason,
        }

    @classmethod
    def from_dict(cls, data: dict) -> RevisionSuggestion:
        return cls(**data)


@dataclass(frozen=True)
class CrTextConfig:
    rounds: int = 3
    context_window: int = 5
    use_leader: bool = True
    rng_seed: int = 0
    reprompt_limit: int = 3
    model: str = "gpt-3.5-turbo"

    def __post_init__(self):
        if self.rounds < 0:
            raise ValueError("rounds must be >= 0")
        if self.context_window < 0:
            raise ValueError("context_window must be >= 0")
        if self.reprompt_limit < 1:
            raise ValueError("reprompt_limit must be >= 1")


@dataclass(frozen=True)
class CrTextRound:
    round: int
    target: SentenceSpan
    image: RevisionSuggestion
    voice: RevisionSuggestion
    decision: LeaderDecision
    output: StoryText

    def __post_init__(self):
        if self.decision.author_kind == "machine" and self.decision.chosen_index not in (0, 1):
            raise ValueError("machine decisions choose image (0) or voice (1)")

    def to_dict(self) -> dict:
        return {
            "round": self.round,
            "target": self.target.to_dict(),
            "image": self.image.to_dict(),
            "voice": self.voice.to_dict(),
            "decision": self.decision.to_dict(),
            "output": self.output.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> CrTextRound:
        return cls(
            round=data["round"],
            target=SentenceSpan.from_dict(data["target"]),
            image=RevisionSuggestion.from_dict(data["image"]),
            voice=RevisionSuggestion.from_dict(data["voice"]),
            decision=LeaderDecision.from_dict(data["decision"]),
            output=StoryText.from_dict(data["output"]),
        )
