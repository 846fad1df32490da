"""Session state: the persistent record of one interactive refinement run."""

from __future__ import annotations

import time
import uuid
from dataclasses import dataclass, field, replace
from typing import Any

from critics.crplan.types import CrPlanConfig, Critique, LeaderDecision, PersonaSet, RoundRecord
from critics.crtext.types import CrTextConfig, CrTextRound, RevisionSuggestion
from critics.errors import ValidationError
from critics.story import SentenceSpan, StoryPackage, StoryText

STATUSES = (
    "awaiting_critiques",
    "awaiting_leader",
    "refining",
    "awaiting_advance",
    "evaluating",
    "finalized",
    "failed",
)

_MARK_VALUES = ("pass", "fail")
_ACCEPT_VALUES = ("pass", "fail", "unmarked")
_EVENT_KINDS = ("critique_submitted", "critique_edited", "leader_decision", "skip_round", "mark_submitted")


@dataclass(frozen=True)
class HumanMark:
    round: int
    edited: str
    accepted: str = "unmarked"
    auto_edited: str | None = None

    def __post_init__(self):
        if self.edited not in _MARK_VALUES:
            raise ValidationError(f"edited must be one of {_MARK_VALUES}")
        if self.accepted not in _ACCEPT_VALUES:
            raise ValidationError(f"accepted must be one of {_ACCEPT_VALUES}")

    def to_dict(self) -> dict:
        return {
            "round": self.round,
            "edited": self.edited,
            "accepted": self.accepted,
            "auto_edited": self.auto_edited,
        }

    @classmethod
    def from_dict(cls, data: dict) -> HumanMark:
        return cls(**data)


@dataclass(frozen=True)
class InterventionEvent:
    session_id: str
    round: int
    kind: str
    payload: dict
    actor: str
    timestamp: float = field(default_factory=time.time)

    def __post_init__(self):
        if self.kind not in _EVENT_KINDS:
            raise ValidationError(f"unknown event kind {self.kind!r}")

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "round": self.round,
            "kind": self.kind,
            "payload": self.payload,
            "actor": self.actor,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_dict(cls, data: dict) -> InterventionEvent:
        return cls(**data)


@dataclass(frozen=True)
class PendingPlanRound:
    """Work in flight for the plan round currently being assembled."""

    round: int
    critiques: tuple[Critique, ...] = ()
    decision: LeaderDecision | None = None

    def to_dict(self) -> dict:
        return {
            "round": self.round,
            "critiques": [c.to_dict() for c in self.critiques],
            "decision": self.decision.to_dict() if self.decision else None,
        }

    @classmethod
    def from_dict(cls, data: dict) -> PendingPlanRound:
        return cls(
            round=data["round"],
            critiques=tuple(Critique.from_dict(d) for d in data["critiques"]),
            decision=LeaderDecision.from_dict(data["decision"]) if data.get("decision") else None,
        )


@dataclass(frozen=True)
class PendingTextRound:
    round: int
    target: SentenceSpan
    image: RevisionSuggestion
    voice: RevisionSuggestion
    decision: LeaderDecision | None = None

    def to_dict(self) -> dict:
        return {
            "round": self.round,
            "target": self.target.to_dict(),
            "image": self.image.to_dict(),
            "voice": self.voice.to_dict(),
            "decision": self.decision.to_dict() if self.decision else None,
        }

    @classmethod
    def from_dict(cls, data: dict) -> PendingTextRound:
        return cls(
            round=data["round"],
            target=SentenceSpan.from_dict(data["target"]),
            image=RevisionSuggestion.from_dict(data["image"]),
            voice=RevisionSuggestion.from_dict(data["voice"]),
            decision=LeaderDecision.from_dict(data["decision"]) if data.get("decision") else None,
        )


@dataclass(frozen=True)
class Session:
    id: str
    stage: str  # plan | text
    config: CrPlanConfig | CrTextConfig
    subject: StoryPackage | StoryText  # current working state
    initial_subject: StoryPackage | StoryText
    status: str = "awaiting_critiques"
    version: int = 1
    human_leader: bool = False
    label: str = ""  # grouping key for cross-annotator agreement
    personas: PersonaSet | None = None
    rounds: tuple[RoundRecord | CrTextRound, ...] = ()
    pending: PendingPlanRound | PendingTextRound | None = None
    human_marks: tuple[HumanMark, ...] = ()
    selected_index: int | None = None
    evaluator_transcript: str = ""
    revised_ordinals: tuple[int, ...] = ()
    error: str = ""

    def __post_init__(self):
        if self.stage not in ("plan", "text"):
            raise ValidationError(f"unknown stage {self.stage!r}")
        if self.status not in STATUSES:
            raise ValidationError(f"unknown status {self.status!r}")

    def bump(self, **changes: Any) -> Session:
        """Return the next version of this session with ``changes`` applied."""
        return replace(self, version=self.version + 1, **changes)

    @property
    def current_round(self) -> int:
        return len(self.rounds) + 1

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "stage": self.stage,
            "config": _config_to_dict(self.config),
            "subject": self.subject.to_dict(),
            "initial_subject": self.initial_subject.to_dict(),
            "status": self.status,
            "version": self.version,
            "human_leader": self.human_leader,
            "label": self.label,
            "personas": self.personas.to_dict() if self.personas else None,
            "rounds": [r.to_dict() for r in self.rounds],
            "pending": self.pending.to_dict() if self.pending else None,
            "human_marks": [m.to_dict() for m in self.human_marks],
            "selected_index": self.selected_index,
            "evaluator_transcript": self.evaluator_transcript,
            "revised_ordinals": list(self.revised_ordinals),
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, data: dict) -> Session:
        stage = data["stage"]
        subject_cls = StoryPackage if stage == "plan" else StoryText
        round_cls = RoundRecord if stage == "plan" else CrTextRound
        pending_cls = PendingPlanRound if stage == "plan" else PendingTextRound
        return cls(
            id=data["id"],
            stage=stage,
            config=_config_from_dict(stage, data["config"]),
            subject=subject_cls.from_dict(data["subject"]),
            initial_subject=subject_cls.from_dict(data["initial_subject"]),
            status=data["status"],
            version=data["version"],
            human_leader=data["human_leader"],
            label=data.get("label", ""),
            personas=PersonaSet.from_dict(data["personas"]) if data.get("personas") else None,
            rounds=tuple(round_cls.from_dict(d) for d in data["rounds"]),
            pending=pending_cls.from_dict(data["pending"]) if data.get("pending") else None,
            human_marks=tuple(HumanMark.from_dict(d) for d in data["human_marks"]),
            selected_index=data.get("selected_index"),
            evaluator_transcript=data.get("evaluator_transcript", ""),
            revised_ordinals=tuple(data.get("revised_ordinals", ())),
            error=data.get("error", ""),
        )


def _config_to_dict(config: CrPlanConfig | CrTextConfig) -> dict:
    if isinstance(config, CrPlanConfig):
        return {
            "rounds": config.rounds,
            "criteria": [c.to_dict() for c in config.criteria],
            "use_personas": config.use_personas,
            "use_leader": config.use_leader,
            "reprompt_limit": config.reprompt_limit,
            "rng_seed": config.rng_seed,
            "model": config.model,
            "max_workers": config.max_workers,
        }
    return {
        "rounds": config.rounds,
        "context_window": config.context_window,
        "use_leader": config.use_leader,
        "rng_seed": config.rng_seed,
        "reprompt_limit": config.reprompt_limit,
        "model": config.model,
    }


def _config_from_dict(stage: str, data: dict) -> CrPlanConfig | CrTextConfig:
    if stage == "plan":
        from critics.crplan.types import Criterion

        data = dict(data)
        data["criteria"] = tuple(Criterion.from_dict(d) for d in data.get("criteria", []))
        return CrPlanConfig(**data)
    return CrTextConfig(**data)


def new_session_id() -> str:
    return str(uuid.uuid4())
