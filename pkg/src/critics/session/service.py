"""Session operations: the state machine driving interactive refinement runs.

Statuses move awaiting_critiques -> awaiting_leader (human gate) -> refining
-> awaiting_advance per round; plan sessions end with evaluating -> finalized,
text sessions finalize after the last round.  Every mutation bumps the version
by exactly one and is persisted before returning.
"""

from __future__ import annotations

import logging
import threading
from collections import defaultdict
from dataclasses import replace

from critics.crplan import engine as plan_engine
from critics.crplan.types import CrPlanConfig, Critique, LeaderDecision, RoundRecord
from critics.crtext import engine as text_engine
from critics.crtext.types import CrTextConfig, CrTextRound
from critics.errors import (
    Conflict,
    CriticsError,
    IllegalState,
    IndexOutOfRange,
    RoundIncomplete,
    SessionError,
    UnknownRound,
    UnmarkedRounds,
    ValidationError,
)
from critics.evalharness import fleiss_kappa
from critics.gateway import Backend
from critics.session.model import (
    HumanMark,
    InterventionEvent,
    PendingPlanRound,
    PendingTextRound,
    Session,
    new_session_id,
)
from critics.session.storage import SessionStore
from critics.story import (
    StoryPackage,
    StoryText,
    normalize_package_text,
    render_story_package,
    replace_span,
)

log = logging.getLogger(__name__)

_TERMINAL = ("finalized", "failed")


class SessionService:
    def __init__(self, store: SessionStore, backend: Backend):
        self.store = store
        self.backend = backend
        self._locks: dict[str, threading.Lock] = defaultdict(threading.Lock)
        self._guard = threading.Lock()

    def _lock(self, session_id: str) -> threading.Lock:
        with self._guard:
            return self._locks[session_id]

    # -- reads ------------------------------------------------------------

    def get_state(self, session_id: str, since: int | None = None) -> Session | None:
        """Current snapshot, or None when unchanged since ``since``."""
        session = self.store.load(session_id)
        if since is not None and session.version == since:
            return None
        return session

    def list_sessions(self) -> list[Session]:
        return [self.store.load(sid) for sid in self.store.list_ids()]

    def export_text(self, session_id: str) -> str:
        session = self.store.load(session_id)
        if session.status != "finalized":
            raise IllegalState("session is not finalized")
        if session.stage == "plan":
            candidates = (session.initial_subject, *(r.refined_plan for r in session.rounds))
            return render_story_package(candidates[session.selected_index or 0])
        return session.subject.body

    # -- mutations --------------------------------------------------------

    def create_session(
        self,
        stage: str,
        config: CrPlanConfig | CrTextConfig,
        subject: StoryPackage | StoryText,
        *,
        human_leader: bool = False,
        label: str = "",
    ) -> Session:
        if stage == "plan" and not isinstance(subject, StoryPackage):
            raise ValidationError("plan sessions need a story package subject")
        if stage == "text" and not isinstance(subject, StoryText):
            raise ValidationError("text sessions need a story text subject")
        session = Session(
            id=new_session_id(),
            stage=stage,
            config=config,
            subject=subject,
            initial_subject=subject,
            human_leader=human_leader,
            label=label,
        )
        self.store.save(session)
        return session

    def _mutate(self, session_id: str, expected_version: int | None, fn) -> Session:
        with self._lock(session_id):
            session = self.store.load(session_id)
            if expected_version is not None and session.version != expected_version:
                raise Conflict(
                    f"version mismatch: expected {expected_version}, at {session.version}"
                )
            updated, event = fn(session)
            self.store.save(updated, event.to_dict() if event else None)
            return updated

    def advance(self, session_id: str, expected_version: int | None = None) -> Session:
        return self._mutate(session_id, expected_version, self._advance_steps)

    def _advance_steps(self, session: Session) -> tuple[Session, None]:
        if session.status in _TERMINAL:
            raise IllegalState(f"session is {session.status}")
        if session.status == "awaiting_leader":
            raise IllegalState("waiting for a leader decision")
        try:
            while True:
                session = self._step(session)
                if session.status == "awaiting_advance" and len(session.rounds) >= session.config.rounds:
                    continue  # last round done: roll straight into finalization
                if session.status in ("awaiting_leader", "awaiting_advance", *_TERMINAL):
                    return session, None
        except SessionError:
            raise
        except CriticsError as exc:
            log.error("session %s failed: %s", session.id, exc)
            return session.bump(status="failed", error=str(exc)), None

    def _step(self, session: Session) -> Session:
        handler = {
            "plan": self._step_plan,
            "text": self._step_text,
        }[session.stage]
        return handler(session)

    def _step_plan(self, session: Session) -> Session:
        cfg: CrPlanConfig = session.config
        if session.status == "awaiting_critiques":
            if len(session.rounds) >= cfg.rounds:
                return session.bump(status="evaluating")
            personas = session.personas
            if cfg.use_personas and personas is None:
                personas = plan_engine.create_personas(
                    session.subject, self.backend, model=cfg.model, reprompt_limit=cfg.reprompt_limit
                )
            human = session.pending.critiques if session.pending else ()
            machine = tuple(
                plan_engine.generate_critique(
                    plan_engine._expert_for(personas, i), criterion, session.subject, self.backend,
                    model=cfg.model, reprompt_limit=cfg.reprompt_limit,
                )
                for i, criterion in enumerate(cfg.criteria)
            )
            pending = PendingPlanRound(round=session.current_round, critiques=machine + human)
            status = "awaiting_leader" if session.human_leader else "refining"
            return session.bump(personas=personas, pending=pending, status=status)
        if session.status == "refining":
            pending: PendingPlanRound = session.pending
            decision = pending.decision
            if decision is None:
                if cfg.use_leader:
                    decision = plan_engine.leader_select(
                        pending.critiques, session.subject,
                        session.personas.leader if session.personas else None,
                        self.backend, model=cfg.model, reprompt_limit=cfg.reprompt_limit,
                    )
                else:
                    decision = LeaderDecision(
                        chosen_index=0,
                        justification="leaderless mode: all critiques applied sequentially",
                    )
            if cfg.use_leader or pending.decision is not None:
                refined = plan_engine.refine_plan(
                    session.subject, pending.critiques[decision.chosen_index], self.backend,
                    model=cfg.model, reprompt_limit=cfg.reprompt_limit,
                )
            else:
                refined = session.subject
                for critique in pending.critiques:
                    refined = plan_engine.refine_plan(
                        refined, critique, self.backend,
                        model=cfg.model, reprompt_limit=cfg.reprompt_limit,
                    )
            record = RoundRecord(
                round=pending.round,
                input_plan=session.subject,
                critiques=pending.critiques,
                decision=decision,
                refined_plan=refined,
            )
            return session.bump(
                rounds=session.rounds + (record,), subject=refined, pending=None,
                status="awaiting_advance",
            )
        if session.status == "awaiting_advance":
            if len(session.rounds) >= cfg.rounds:
                return session.bump(status="evaluating")
            return session.bump(status="awaiting_critiques")
        if session.status == "evaluating":
            candidates = (session.initial_subject, *(r.refined_plan for r in session.rounds))
            if len(candidates) == 1:
                selected, transcript = 0, ""
            else:
                selected, transcript = plan_engine.evaluate_candidates(
                    candidates, session.initial_subject.premise, self.backend,
                    rng_seed=cfg.rng_seed, model=cfg.model, reprompt_limit=cfg.reprompt_limit,
                )
            return session.bump(
                status="finalized", selected_index=selected, evaluator_transcript=transcript
            )
        raise IllegalState(f"cannot advance from {session.status}")

    def _step_text(self, session: Session) -> Session:
        cfg: CrTextConfig = session.config
        if session.status == "awaiting_critiques":
            if len(session.rounds) >= cfg.rounds:
                return session.bump(status="finalized")
            span = text_engine.sample_sentence(
                session.subject, cfg.rng_seed, session.current_round,
                frozenset(session.revised_ordinals),
            )
            target = session.subject.sentence(span)
            context = text_engine.context_excerpt(session.subject, span, cfg.context_window)
            image = text_engine.image_critique(target, context, self.backend,
                                               model=cfg.model, reprompt_limit=cfg.reprompt_limit)
            voice = text_engine.voice_critique(target, context, self.backend,
                                               model=cfg.model, reprompt_limit=cfg.reprompt_limit)
            pending = PendingTextRound(
                round=session.current_round, target=span, image=image, voice=voice
            )
            status = "awaiting_leader" if session.human_leader else "refining"
            return session.bump(pending=pending, status=status)
        if session.status == "refining":
            pending: PendingTextRound = session.pending
            context = text_engine.context_excerpt(session.subject, pending.target, cfg.context_window)
            decision = pending.decision
            if decision is None and not cfg.use_leader:
                output = replace_span(session.subject, pending.target, pending.image.replacement)
                new_span = output.sentence_index[min(pending.target.ordinal, len(output.sentence_index) - 1)]
                voice = text_engine.voice_critique(
                    output.sentence(new_span),
                    text_engine.context_excerpt(output, new_span, cfg.context_window),
                    self.backend, model=cfg.model, reprompt_limit=cfg.reprompt_limit,
                )
                output = replace_span(output, new_span, voice.replacement)
                pending = replace(pending, voice=voice)
                decision = LeaderDecision(
                    chosen_index=1,
                    justification="leaderless mode: image then voice applied in order",
                )
            else:
                if decision is None:
                    decision = text_engine.leader_select_revision(
                        pending.image, pending.voice, context, self.backend,
                        model=cfg.model, reprompt_limit=cfg.reprompt_limit,
                    )
                chosen = (pending.image, pending.voice)[decision.chosen_index]
                output = replace_span(session.subject, pending.target, chosen.replacement)
            record = CrTextRound(
                round=pending.round, target=pending.target, image=pending.image,
                voice=pending.voice, decision=decision, output=output,
            )
            return session.bump(
                rounds=session.rounds + (record,), subject=output, pending=None,
                revised_ordinals=session.revised_ordinals + (pending.target.ordinal,),
                status="awaiting_advance",
            )
        if session.status == "awaiting_advance":
            if len(session.rounds) >= cfg.rounds:
                return session.bump(status="finalized")
            return session.bump(status="awaiting_critiques")
        raise IllegalState(f"cannot advance from {session.status}")

    def submit_critique(
        self,
        session_id: str,
        round: int,
        critique: Critique,
        expected_version: int | None = None,
    ) -> Session:
        def fn(session: Session) -> tuple[Session, InterventionEvent]:
            if session.stage != "plan":
                raise IllegalState("critiques can only be submitted to plan sessions")
            if session.status not in ("awaiting_critiques", "awaiting_leader"):
                raise IllegalState(f"cannot submit critiques while {session.status}")
            if critique.author_kind != "human":
                raise ValidationError("submitted critiques must be human-authored")
            if round != session.current_round:
                raise UnknownRound(f"round {round} is not open (current: {session.current_round})")
            pending = session.pending or PendingPlanRound(round=round)
            pending = replace(pending, critiques=pending.critiques + (critique,))
            event = InterventionEvent(
                session_id=session.id, round=round, kind="critique_submitted",
                payload=critique.to_dict(), actor=f"human:{critique.author_name}",
            )
            return session.bump(pending=pending), event

        return self._mutate(session_id, expected_version, fn)

    def submit_leader_decision(
        self,
        session_id: str,
        round: int,
        decision: LeaderDecision,
        expected_version: int | None = None,
    ) -> Session:
        def fn(session: Session) -> tuple[Session, InterventionEvent]:
            if session.status != "awaiting_leader":
                raise IllegalState(f"cannot submit a decision while {session.status}")
            if decision.author_kind != "human":
                raise ValidationError("submitted decisions must be human-authored")
            if round != session.current_round:
                raise UnknownRound(f"round {round} is not open (current: {session.current_round})")
            n = len(session.pending.critiques) if session.stage == "plan" else 2
            if not 0 <= decision.chosen_index < n:
                raise IndexOutOfRange(f"chosen_index {decision.chosen_index} not in [0, {n})")
            pending = replace(session.pending, decision=decision)
            event = InterventionEvent(
                session_id=session.id, round=round, kind="leader_decision",
                payload=decision.to_dict(), actor="human",
            )
            return session.bump(pending=pending, status="refining"), event

        return self._mutate(session_id, expected_version, fn)

    def mark_round(
        self,
        session_id: str,
        round: int,
        mark: HumanMark,
        expected_version: int | None = None,
    ) -> Session:
        def fn(session: Session) -> tuple[Session, InterventionEvent]:
            if round < 1 or round > len(session.rounds):
                raise RoundIncomplete(f"round {round} has not completed")
            record = session.rounds[round - 1]
            stored = replace(mark, round=round, auto_edited=_auto_edited(session.stage, record))
            kept = tuple(m for m in session.human_marks if m.round != round)
            event = InterventionEvent(
                session_id=session.id, round=round, kind="mark_submitted",
                payload=stored.to_dict(), actor="human",
            )
            return session.bump(human_marks=kept + (stored,)), event

        return self._mutate(session_id, expected_version, fn)


def _auto_edited(stage: str, record) -> str:
    if stage == "plan":
        changed = normalize_package_text(render_story_package(record.input_plan)) != (
            normalize_package_text(render_story_package(record.refined_plan))
        )
    else:
        chosen = (record.image, record.voice)[min(record.decision.chosen_index, 1)]
        changed = chosen.replacement != chosen.original
    return "pass" if changed else "fail"


def compute_user_metrics(sessions: list[Session]) -> dict:
    """Edited/Accepted pass rates over all marked rounds, plus cross-annotator
    agreement on Accepted when sessions are grouped by label."""
    if not sessions:
        raise UnmarkedRounds("no sessions given")
    marks: list[HumanMark] = []
    for session in sessions:
        if session.status != "finalized":
            raise UnmarkedRounds(f"session {session.id} is not finalized")
        marked_rounds = {m.round for m in session.human_marks}
        missing = set(range(1, len(session.rounds) + 1)) - marked_rounds
        if missing:
            raise UnmarkedRounds(f"session {session.id} rounds unmarked: {sorted(missing)}")
        if any(m.accepted == "unmarked" for m in session.human_marks):
            raise UnmarkedRounds(f"session {session.id} has unmarked accepted judgments")
        marks.extend(session.human_marks)
    edited = [m.auto_edited or m.edited for m in marks]
    accepted = [m.accepted for m in marks]
    result = {
        "edited_pass_rate": round(100.0 * edited.count("pass") / len(edited), 2),
        "accepted_pass_rate": round(100.0 * accepted.count("pass") / len(accepted), 2),
        "fleiss": None,
        "n_rounds": len(marks),
    }
    groups: dict[str, list[Session]] = defaultdict(list)
    for session in sessions:
        if session.label:
            groups[session.label].append(session)
    sizes = {len(g) for g in groups.values()}
    if groups and sizes == {len(next(iter(groups.values())))} and min(sizes) >= 2:
        counts = []
        for label, group in sorted(groups.items()):
            n_rounds = min(len(s.rounds) for s in group)
            for r in range(1, n_rounds + 1):
                row = [0, 0]
                for session in group:
                    accepted_mark = next(m.accepted for m in session.human_marks if m.round == r)
                    row[0 if accepted_mark == "pass" else 1] += 1
                counts.append(row)
        result["fleiss"] = fleiss_kappa(counts)
    return result
