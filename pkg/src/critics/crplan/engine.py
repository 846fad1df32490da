"""The plan-critique loop: personas, critiques, leader arbitration, refinement,
and final candidate selection."""

from __future__ import annotations

import logging
import random
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

from critics.crplan.types import (
    Criterion,
    CrPlanConfig,
    CrPlanResult,
    Critique,
    LeaderDecision,
    Persona,
    PersonaSet,
    RoundRecord,
)
from critics.errors import (
    CritiqueParseFailure,
    DecisionParseFailure,
    EmptyCritiqueList,
    PartialRunError,
    PersonaParseFailure,
    RefinementParseFailure,
    VerdictParseFailure,
)
from critics.gateway import (
    Backend,
    ChatRequest,
    CREATIVE_TEMPERATURE,
    JUDGE_TEMPERATURE,
    complete,
    load_template,
    render_prompt,
)
from critics.story import StoryPackage, parse_story_package, render_story_package

log = logging.getLogger(__name__)

_FORMAT_REMINDER = "\n\nPlease answer again, strictly following the requested format."


@dataclass(frozen=True)
class SessionHooks:
    """Intervention points for human participation.

    ``before_leader`` receives (round, critiques, plan) and returns the
    possibly-extended critique list plus an optional human decision; when a
    decision is returned the machine leader is skipped.  ``before_advance``
    receives the completed RoundRecord before the next round starts.
    """

    before_leader: Callable[[int, tuple[Critique, ...], StoryPackage], tuple[tuple[Critique, ...], LeaderDecision | None]] | None = None
    before_advance: Callable[[int, RoundRecord], None] | None = None


def _ask(backend: Backend, prompt: str, *, model: str, temperature: float) -> str:
    request = ChatRequest(model=model, messages=(("user", prompt),), temperature=temperature)
    return complete(request, backend).content


_PERSONA_BLOCK_RE = re.compile(r"^\s*(Expert\s*\d+|Leader)\s*[.:]?\s*$", re.MULTILINE)
_PERSONA_FIELD_RE = re.compile(
    r"^\s*(Profession|Feedback Focus Details|Feedback Focus)\s*:\s*(.*)$", re.MULTILINE
)


def _strip_slashes(text: str) -> str:
    return text.strip().strip("/").strip()


def _parse_personas(raw: str) -> PersonaSet:
    splits = list(_PERSONA_BLOCK_RE.finditer(raw))
    if not splits:
        raise PersonaParseFailure("no Expert/Leader block headers found")
    blocks: list[tuple[str, str]] = []
    for i, m in enumerate(splits):
        end = splits[i + 1].start() if i + 1 < len(splits) else len(raw)
        header = "leader" if m.group(1).lower().startswith("leader") else "expert"
        blocks.append((header, raw[m.end() : end]))
    experts: list[Persona] = []
    leader: Persona | None = None
    for role, body in blocks:
        fields = {k.lower(): _strip_slashes(v) for k, v in _PERSONA_FIELD_RE.findall(body)}
        try:
            persona = Persona(
                profession=fields["profession"],
                feedback_focus=fields["feedback focus"],
                feedback_focus_details=fields["feedback focus details"],
                role=role,
            )
        except (KeyError, ValueError) as exc:
            raise PersonaParseFailure(f"incomplete {role} block: {exc}") from exc
        if role == "leader":
            leader = persona
        else:
            experts.append(persona)
    if len(experts) != 3 or leader is None:
        raise PersonaParseFailure(
            f"expected 3 experts and a leader, got {len(experts)} experts, leader={leader is not None}"
        )
    return PersonaSet(experts=tuple(experts), leader=leader)


def create_personas(
    pkg: StoryPackage,
    backend: Backend,
    *,
    model: str = "gpt-3.5-turbo",
    reprompt_limit: int = 3,
) -> PersonaSet:
    """Ask for three expert personas and a leader in one completion."""
    template = load_template("persona_creator")
    prompt = render_prompt(template, {"story": render_story_package(pkg)})
    last_error: Exception | None = None
    for attempt in range(reprompt_limit):
        raw = _ask(backend, prompt if attempt == 0 else prompt + _FORMAT_REMINDER,
                   model=model, temperature=CREATIVE_TEMPERATURE)
        try:
            return _parse_personas(raw)
        except PersonaParseFailure as exc:
            log.warning("persona parse attempt %d failed: %s", attempt + 1, exc)
            last_error = exc
    raise PersonaParseFailure(f"persona parsing failed after {reprompt_limit} attempts: {last_error}")


_CANDIDATE_RE = re.compile(r"^\s*\(?([123])[\).]\s*(.+?)\s*$", re.MULTILINE)
_QUESTION_RE = re.compile(r"^\s*Question\s*:\s*(.*)$", re.MULTILINE)
_WHY_RE = re.compile(r"^\s*Why\s*:\s*(.*?)\s*$", re.MULTILINE | re.DOTALL)


def _persona_preamble(persona: Persona) -> str:
    return (
        f"You are a critic with the following persona.\n"
        f"Profession: {persona.profession}\n"
        f"Feedback Focus: {persona.feedback_focus}\n"
        f"Feedback Focus Details: {persona.feedback_focus_details}\n"
    )


def _criterion_preamble(criterion: Criterion) -> str:
    return f'The criteria for "{criterion.name}" are:\n{criterion.rubric}\n'


def _parse_critique(raw: str, criterion: Criterion, persona: Persona | None) -> Critique:
    candidates = {int(n): text.strip() for n, text in _CANDIDATE_RE.findall(raw)}
    q = _QUESTION_RE.search(raw)
    if len(candidates) < 3 or q is None or not q.group(1).strip():
        raise CritiqueParseFailure("missing numbered candidates or Question marker")
    why = _WHY_RE.search(raw)
    return Critique(
        criterion_id=criterion.id,
        question=q.group(1).strip(),
        rationale=why.group(1).strip() if why else "",
        author_kind="machine",
        author_name=persona.profession if persona else "",
        candidates_considered=(candidates[1], candidates[2], candidates[3]),
    )


def generate_critique(
    persona: Persona | None,
    criterion: Criterion,
    pkg: StoryPackage,
    backend: Backend,
    *,
    model: str = "gpt-3.5-turbo",
    reprompt_limit: int = 3,
) -> Critique:
    """Ask one critic for three candidate questions and their pick.

    ``persona`` may be None (persona ablation); the persona block is then
    omitted from the prompt.
    """
    template = load_template("critique_creator")
    body = render_prompt(
        template,
        {"story_plan": render_story_package(pkg), "critic_type": criterion.name},
    )
    parts = []
    if persona is not None:
        parts.append(_persona_preamble(persona))
    parts.append(_criterion_preamble(criterion))
    parts.append(body)
    prompt = "\n".join(parts)
    raw = ""
    for attempt in range(reprompt_limit):
        raw = _ask(backend, prompt if attempt == 0 else prompt + _FORMAT_REMINDER,
                   model=model, temperature=CREATIVE_TEMPERATURE)
        try:
            return _parse_critique(raw, criterion, persona)
        except CritiqueParseFailure as exc:
            log.warning("critique parse attempt %d failed: %s", attempt + 1, exc)
    # Final fallback: treat the whole reply as the question rather than
    # losing the round to a formatting quirk.
    question = raw.strip()
    if not question:
        raise CritiqueParseFailure(f"empty critique after {reprompt_limit} attempts")
    return Critique(
        criterion_id=criterion.id,
        question=question,
        rationale="",
        author_kind="machine",
        author_name=persona.profession if persona else "",
        candidates_considered=(question, question, question),
    )


_ORDINAL_RE = re.compile(r"(?:question|critique)\s*(?:is\s*)?#?\s*([0-9]+)\b", re.IGNORECASE)
_LEADING_NUM_RE = re.compile(r"\b([0-9]+)\s*\)")


def _parse_decision(raw: str, critiques: tuple[Critique, ...]) -> int:
    # Prefer a verbatim quote of one question; earliest occurrence wins.
    best: tuple[int, int] | None = None
    for idx, critique in enumerate(critiques):
        pos = raw.find(critique.question)
        if pos >= 0 and (best is None or pos < best[0]):
            best = (pos, idx)
    if best is not None:
        return best[1]
    for regex in (_ORDINAL_RE, _LEADING_NUM_RE):
        m = regex.search(raw)
        if m:
            n = int(m.group(1))
            if 1 <= n <= len(critiques):
                return n - 1
    raise DecisionParseFailure("reply names no presented critique")


def leader_select(
    critiques: tuple[Critique, ...],
    pkg: StoryPackage,
    leader: Persona | None,
    backend: Backend,
    *,
    model: str = "gpt-3.5-turbo",
    reprompt_limit: int = 3,
) -> LeaderDecision:
    """Have the leader pick one critique; degenerate single-critique case
    resolves without a provider call."""
    if not critiques:
        raise EmptyCritiqueList("no critiques to arbitrate")
    if len(critiques) == 1:
        return LeaderDecision(chosen_index=0, justification="only one critique presented")
    questions = "\n".join(f"{i + 1}) {c.question}" for i, c in enumerate(critiques))
    template = load_template("leader_plan")
    body = render_prompt(template, {"questions": questions, "story_plan": render_story_package(pkg)})
    prompt = (_persona_preamble(leader) + "\n" + body) if leader else body
    for attempt in range(reprompt_limit):
        raw = _ask(backend, prompt if attempt == 0 else prompt + _FORMAT_REMINDER,
                   model=model, temperature=CREATIVE_TEMPERATURE)
        try:
            return LeaderDecision(chosen_index=_parse_decision(raw, critiques), justification=raw.strip())
        except DecisionParseFailure as exc:
            log.warning("decision parse attempt %d failed: %s", attempt + 1, exc)
    raise DecisionParseFailure(f"leader decision unparseable after {reprompt_limit} attempts")


def refine_plan(
    pkg: StoryPackage,
    critique: Critique,
    backend: Backend,
    *,
    model: str = "gpt-3.5-turbo",
    reprompt_limit: int = 3,
) -> StoryPackage:
    """Rewrite the plan against one critique; output must re-parse."""
    template = load_template("refine_plan")
    prompt = render_prompt(
        template,
        {"final_critique": critique.question, "story_plan": render_story_package(pkg)},
    )
    last_error: Exception | None = None
    for attempt in range(reprompt_limit):
        raw = _ask(backend, prompt if attempt == 0 else prompt + _FORMAT_REMINDER,
                   model=model, temperature=CREATIVE_TEMPERATURE)
        try:
            return parse_story_package(raw)
        except Exception as exc:
            log.warning("refinement parse attempt %d failed: %s", attempt + 1, exc)
            last_error = exc
    raise RefinementParseFailure(f"refined plan unparseable after {reprompt_limit} attempts: {last_error}")


_EVAL_TOKEN_RE = re.compile(r"\[\[(A|B|C|TI)\]\]")


def evaluate_candidates(
    candidates: tuple[StoryPackage, ...],
    premise: str,
    backend: Backend,
    *,
    rng_seed: int = 0,
    model: str = "gpt-3.5-turbo",
    reprompt_limit: int = 3,
) -> tuple[int, str]:
    """Sequential knockout over candidate plans; ties keep the incumbent.

    Presentation order per pairing is drawn from a seeded coin so position
    bias averages out across runs.
    """
    if not candidates:
        raise ValueError("at least one candidate required")
    if len(candidates) == 1:
        return 0, ""
    template = load_template("evaluator_pair")
    rng = random.Random(rng_seed)
    incumbent = 0
    transcript: list[str] = []
    for challenger in range(1, len(candidates)):
        order = "AB" if rng.random() < 0.5 else "BA"
        first, second = (incumbent, challenger) if order == "AB" else (challenger, incumbent)
        story_set = (
            f"Story plan A:\n{render_story_package(candidates[first])}\n"
            f"Story plan B:\n{render_story_package(candidates[second])}"
        )
        prompt = render_prompt(template, {"story_set": story_set})
        winner: int | None = None
        raw = ""
        for attempt in range(reprompt_limit):
            raw = _ask(backend, prompt if attempt == 0 else prompt + _FORMAT_REMINDER,
                       model=model, temperature=JUDGE_TEMPERATURE)
            tokens = _EVAL_TOKEN_RE.findall(raw)
            if tokens:
                token = tokens[-1]
                if token in ("C", "TI"):
                    winner = incumbent
                else:
                    winner = first if token == "A" else second
                break
        if winner is None:
            raise VerdictParseFailure(0, "<missing>")
        transcript.append(
            f"pairing {challenger}: candidate {incumbent} vs candidate {challenger} "
            f"(order {order}) -> winner {winner}\n{raw.strip()}"
        )
        incumbent = winner
    return incumbent, "\n\n".join(transcript)


def _expert_for(personas: PersonaSet | None, index: int) -> Persona | None:
    if personas is None:
        return None
    return personas.experts[index % len(personas.experts)]


def run_crplan(
    pkg: StoryPackage,
    cfg: CrPlanConfig,
    backend: Backend,
    session_hooks: SessionHooks | None = None,
) -> CrPlanResult:
    """Run the full plan-critique loop and pick the best candidate."""
    personas: PersonaSet | None = None
    rounds: list[RoundRecord] = []
    try:
        if cfg.use_personas and cfg.rounds > 0:
            personas = create_personas(pkg, backend, model=cfg.model, reprompt_limit=cfg.reprompt_limit)
        current = pkg
        for round_no in range(1, cfg.rounds + 1):
            critiques = _round_critiques(current, cfg, personas, backend)
            if session_hooks and session_hooks.before_leader:
                critiques, human_decision = session_hooks.before_leader(round_no, critiques, current)
            else:
                human_decision = None
            if not critiques:
                raise EmptyCritiqueList(f"round {round_no} has no critiques")
            if cfg.use_leader or human_decision is not None:
                decision = human_decision or leader_select(
                    critiques, current, personas.leader if personas else None, backend,
                    model=cfg.model, reprompt_limit=cfg.reprompt_limit,
                )
                refined = refine_plan(
                    current, critiques[decision.chosen_index], backend,
                    model=cfg.model, reprompt_limit=cfg.reprompt_limit,
                )
            else:
                # Leaderless ablation: apply every critique in criterion order.
                refined = current
                for critique in critiques:
                    refined = refine_plan(refined, critique, backend,
                                          model=cfg.model, reprompt_limit=cfg.reprompt_limit)
                decision = LeaderDecision(
                    chosen_index=0,
                    justification="leaderless mode: all critiques applied sequentially",
                )
            record = RoundRecord(
                round=round_no,
                input_plan=current,
                critiques=critiques,
                decision=decision,
                refined_plan=refined,
            )
            if session_hooks and session_hooks.before_advance:
                session_hooks.before_advance(round_no, record)
            rounds.append(record)
            current = refined
        candidates = (pkg, *(r.refined_plan for r in rounds))
        if len(candidates) == 1:
            selected, transcript = 0, ""
        else:
            selected, transcript = evaluate_candidates(
                candidates, pkg.premise, backend,
                rng_seed=cfg.rng_seed, model=cfg.model, reprompt_limit=cfg.reprompt_limit,
            )
    except PartialRunError:
        raise
    except Exception as exc:
        raise PartialRunError(exc, rounds) from exc
    return CrPlanResult(
        rounds=tuple(rounds),
        candidates=candidates,
        selected_index=selected,
        evaluator_transcript=transcript,
    )


def _round_critiques(
    current: StoryPackage,
    cfg: CrPlanConfig,
    personas: PersonaSet | None,
    backend: Backend,
) -> tuple[Critique, ...]:
    def one(index: int, criterion: Criterion) -> Critique:
        return generate_critique(
            _expert_for(personas, index), criterion, current, backend,
            model=cfg.model, reprompt_limit=cfg.reprompt_limit,
        )

    if cfg.max_workers > 1 and len(cfg.criteria) > 1:
        with ThreadPoolExecutor(max_workers=cfg.max_workers) as pool:
            futures = [pool.submit(one, i, c) for i, c in enumerate(cfg.criteria)]
            return tuple(f.result() for f in futures)
    return tuple(one(i, c) for i, c in enumerate(cfg.criteria))
