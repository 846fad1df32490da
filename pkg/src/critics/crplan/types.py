"""Domain types for the plan-critique stage."""

from __future__ import annotations

from dataclasses import dataclass, field

from critics.story import StoryPackage

_STAGES = ("plan", "text")
_ROLES = ("expert", "leader")
_AUTHOR_KINDS = ("machine", "human")


@dataclass(frozen=True)
class Criterion:
    """A named critique axis with the rubric text shown to the critic."""

    id: str
    name: str
    rubric: str
    stage: str = "plan"

    def __post_init__(self):
        if not self.id:
            raise ValueError("criterion id must be non-empty")
        if not self.rubric:
            raise ValueError("criterion rubric must be non-empty")
        if self.stage not in _STAGES:
            raise ValueError(f"unknown stage {self.stage!r}")

    def to_dict(self) -> dict:
        return {"id": self.id, "name": self.name, "rubric": self.rubric, "stage": self.stage}

    @classmethod
    def from_dict(cls, data: dict) -> Criterion:
        return cls(id=data["id"], name=data["name"], rubric=data["rubric"], stage=data.get("stage", "plan"))


@dataclass(frozen=True)
class Persona:
    profession: str
    feedback_focus: str
    feedback_focus_details: str
    role: str = "expert"

    def __post_init__(self):
        for name in ("profession", "feedback_focus", "feedback_focus_details"):
            if not getattr(self, name):
                raise ValueError(f"persona {name} must be non-empty")
        if self.role not in _ROLES:
            raise ValueError(f"unknown role {self.role!r}")

    def to_dict(self) -> dict:
        return {
            "profession": self.profession,
            "feedback_focus": self.feedback_focus,
            "feedback_focus_details": self.feedback_focus_details,
            "role": self.role,
        }

    @classmethod
    def from_dict(cls, data: dict) -> Persona:
        return cls(**data)


@dataclass(frozen=True)
class PersonaSet:
    experts: tuple[Persona, ...]
    leader: Persona

    def __post_init__(self):
        if len(self.experts) != 3:
            raise ValueError("exactly three expert personas required")
        if any(p.role != "expert" for p in self.experts):
            raise ValueError("experts must have role 'expert'")
        if self.leader.role != "leader":
            raise ValueError("leader must have role 'leader'")

    def to_dict(self) -> dict:
        return {"experts": [p.to_dict() for p in self.experts], "leader": self.leader.to_dict()}

    @classmethod
    def from_dict(cls, data: dict) -> PersonaSet:
        return cls(
            experts=tuple(Persona.from_dict(d) for d in data["experts"]),
            leader=Persona.from_dict(data["leader"]),
        )


@dataclass(frozen=True)
class Critique:
    """One critic question, with the drafts the critic considered."""

    criterion_id: str
    question: str
    rationale: str
    author_kind: str = "machine"
    author_name: str = ""
    candidates_considered: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.question:
            raise ValueError("critique question must be non-empty")
        if self.author_kind not in _AUTHOR_KINDS:
            raise ValueError(f"unknown author kind {self.author_kind!r}")
        if self.author_kind == "machine" and len(self.candidates_considered) != 3:
            raise ValueError("machine critiques must carry exactly 3 candidate questions")

    def to_dict(self) -> dict:
        return {
            "criterion_id": self.criterion_id,
            "question": self.question,
            "rationale": self.rationale,
            "author_kind": self.author_kind,
            "author_name": self.author_name,
            "candidates_considered": list(self.candidates_considered),
        }

    @classmethod
    def from_dict(cls, data: dict) -> Critique:
        data = dict(data)
        data["candidates_considered"] = tuple(data.get("candidates_considered", ()))
        return cls(**data)


@dataclass(frozen=True)
class LeaderDecision:
    chosen_index: int
    justification: str
    author_kind: str = "machine"

    def __post_init__(self):
        if self.chosen_index < 0:
            raise ValueError("chosen_index must be >= 0")
        if self.author_kind not in _AUTHOR_KINDS:
            raise ValueError(f"unknown author kind {self.author_kind!r}")
        if self.author_kind == "machine" and not self.justification:
            raise ValueError("machine decisions must carry a justification")

    def to_dict(self) -> dict:
        return {
            "chosen_index": self.chosen_index,
            "justification": self.justification,
            "author_kind": self.author_kind,
        }

    @classmethod
    def from_dict(cls, data: dict) -> LeaderDecision:
        return cls(**data)


@dataclass(frozen=True)
class RoundRecord:
    round: int
    input_plan: StoryPackage
    critiques: tuple[Critique, ...]
    decision: LeaderDecision
    refined_plan: StoryPackage

    def __post_init__(self):
        if self.round < 1:
            raise ValueError("round numbers start at 1")
        if not self.critiques:
            raise ValueError("a round must carry at least one critique")

    def to_dict(self) -> dict:
        return {
            "round": self.round,
            "input_plan": self.input_plan.to_dict(),
            "critiques": [c.to_dict() for c in self.critiques],
            "decision": self.decision.to_dict(),
            "refined_plan": self.refined_plan.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> RoundRecord:
        return cls(
            round=data["round"],
            input_plan=StoryPackage.from_dict(data["input_plan"]),
            critiques=tuple(Critique.from_dict(d) for d in data["critiques"]),
            decision=LeaderDecision.from_dict(data["decision"]),
            refined_plan=StoryPackage.from_dict(data["refined_plan"]),
        )


@dataclass(frozen=True)
class CrPlanResult:
    rounds: tuple[RoundRecord, ...]
    candidates: tuple[StoryPackage, ...]
    selected_index: int
    evaluator_transcript: str

    def __post_init__(self):
        if len(self.candidates) != len(self.rounds) + 1:
            raise ValueError("candidates must be the initial plan plus one per round")
        if not 0 <= self.selected_index < len(self.candidates):
            raise ValueError("selected_index out of range")

    def to_dict(self) -> dict:
        return {
            "rounds": [r.to_dict() for r in self.rounds],
            "candidates": [c.to_dict() for c in self.candidates],
            "selected_index": self.selected_index,
            "evaluator_transcript": self.evaluator_transcript,
        }

    @classmethod
    def from_dict(cls, data: dict) -> CrPlanResult:
        return cls(
            rounds=tuple(RoundRecord.from_dict(d) for d in data["rounds"]),
            candidates=tuple(StoryPackage.from_dict(d) for d in data["candidates"]),
            selected_index=data["selected_index"],
            evaluator_transcript=data["evaluator_transcript"],
        )


@dataclass(frozen=True)
class CrPlanConfig:
    rounds: int = 3
    criteria: tuple[Criterion, ...] = ()
    use_personas: bool = True
    use_leader: bool = True
    reprompt_limit: int = 3
    rng_seed: int = 0
    model: str = "gpt-3.5-turbo"
    max_workers: int = 1

    def __post_init__(self):
        if self.rounds < 0:
            raise ValueError("rounds must be >= 0")
        if self.reprompt_limit < 1:
            raise ValueError("reprompt_limit must be >= 1")
        if self.max_workers < 1:
            raise ValueError("max_workers must be >= 1")
        if not self.criteria:
            from critics.crplan.catalog import default_plan_criteria

            object.__setattr__(self, "criteria", default_plan_criteria())
        if any(c.stage != "plan" for c in self.criteria):
            raise ValueError("plan-stage config requires plan-stage criteria")
