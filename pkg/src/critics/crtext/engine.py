"""The text refinement loop: sample a sentence, gather image and voice
revisions, pick one, splice it in."""

from __future__ import annotations

import logging
import random
import re
from dataclasses import dataclass
from typing import Callable

from critics.crplan.types import LeaderDecision
from critics.crtext.types import CrTextConfig, CrTextRound, RevisionSuggestion
from critics.errors import (
    DecisionParseFailure,
    NoSentences,
    PartialRunError,
    SuggestionParseFailure,
)
from critics.gateway import Backend, ChatRequest, CREATIVE_TEMPERATURE, complete, load_template, render_prompt
from critics.story import SentenceSpan, StoryText, replace_span

log = logging.getLogger(__name__)

_FORMAT_REMINDER = "\n\nPlease answer again, strictly following the requested format."

_IMAGE_FEATURES = ("insight", "see", "hear", "feel", "body")
_VOICE_FEATURES = ("informal language", "unusual words", "noteworthy sentence structures", "authenticity")


@dataclass(frozen=True)
class TextSessionHooks:
    """Intervention points mirroring the plan stage.

    ``before_leader`` receives (round, image, voice, context) and may return a
    human decision (index 0/1) to skip the machine leader; ``before_advance``
    receives the completed CrTextRound.
    """

    before_leader: Callable[[int, RevisionSuggestion, RevisionSuggestion, str], LeaderDecision | None] | None = None
    before_advance: Callable[[int, CrTextRound], None] | None = None


def _ask(backend: Backend, prompt: str, *, model: str) -> str:
    request = ChatRequest(model=model, messages=(("user", prompt),), temperature=CREATIVE_TEMPERATURE)
    return complete(request, backend).content


def sample_sentence(
    story: StoryText,
    rng_seed: int,
    round: int,
    revised: frozenset[int] = frozenset(),
) -> SentenceSpan:
    """Draw one sentence, seeded by (rng_seed, round), skipping already
    revised ordinals while any unrevised ones remain."""
    if not story.sentence_index:
        raise NoSentences("story has no sentences")
    pool = [s for s in story.sentence_index if s.ordinal not in revised]
    if not pool:
        pool = list(story.sentence_index)
    rng = random.Random(f"{rng_seed}:{round}")
    return pool[rng.randrange(len(pool))]


def context_excerpt(story: StoryText, span: SentenceSpan, window: int) -> str:
    """The target sentence with up to ``window`` sentences on each side."""
    lo = max(0, span.ordinal - window)
    hi = min(len(story.sentence_index), span.ordinal + window + 1)
    return " ".join(story.sentence(s) for s in story.sentence_index[lo:hi])


_REVISION_RE = re.compile(r"^\s*Suggested Revision\s*:\s*(.*?)\s*$", re.MULTILINE)
_ORIGINAL_RE = re.compile(r"^\s*Original Sentence\s*:\s*(.*?)\s*$", re.MULTILINE)
_REASON_RE = re.compile(r"^\s*Reason for Change\s*:\s*(.*?)\s*$", re.MULTILINE | re.DOTALL)


def _dequote(text: str) -> str:
    return text.strip().strip("/").strip().strip('"“”').strip()


def _parse_suggestion(raw: str, criterion_id: str, target: str, features: tuple[str, ...]) -> RevisionSuggestion:
    m = _REVISION_RE.search(raw)
    if m is None or not _dequote(m.group(1)):
        raise SuggestionParseFailure("missing Suggested Revision marker")
    original = _ORIGINAL_RE.search(raw)
    original_text = _dequote(original.group(1)) if original else target
    # Tolerate quote/whitespace drift, but never let the critic retarget.
    if original_text.strip('"“” \t') != target.strip('"“” \t'):
        original_text = target
    reason_match = _REASON_RE.search(raw)
    reason = reason_match.group(1).strip() if reason_match else ""
    if not any(f in reason.lower() for f in features):
        raise SuggestionParseFailure("reason names no creativity feature")
    return RevisionSuggestion(
        criterion_id=criterion_id,
        original=original_text,
        replacement=_dequote(m.group(1)),
        reason=reason,
    )


def _critique(
    template_id: str,
    criterion_id: str,
    features: tuple[str, ...],
    target: str,
    context: str,
    backend: Backend,
    *,
    model: str,
    reprompt_limit: int,
) -> RevisionSuggestion:
    template = load_template(template_id)
    prompt = render_prompt(template, {"context": context, "target": target})
    last: RevisionSuggestion | None = None
    for attempt in range(reprompt_limit):
        raw = _ask(backend, prompt if attempt == 0 else prompt + _FORMAT_REMINDER, model=model)
        try:
            return _parse_suggestion(raw, criterion_id, target, features)
        except SuggestionParseFailure as exc:
            log.warning("%s suggestion attempt %d rejected: %s", criterion_id, attempt + 1, exc)
            # A revision without a recognizable reason is still usable on the
            # final attempt; a missing revision never is.
            m = _REVISION_RE.search(raw)
            if m and _dequote(m.group(1)):
                reason = _REASON_RE.search(raw)
                last = RevisionSuggestion(
                    criterion_id=criterion_id,
                    original=target,
                    replacement=_dequote(m.group(1)),
                    reason=reason.group(1).strip() if reason else "",
                )
    if last is not None:
        return last
    raise SuggestionParseFailure(f"{criterion_id} critic gave no usable revision after {reprompt_limit} attempts")


def image_critique(
    target: str,
    context: str,
    backend: Backend,
    *,
    model: str = "gpt-3.5-turbo",
    reprompt_limit: int = 3,
) -> RevisionSuggestion:
    return _critique("image_critic", "image", _IMAGE_FEATURES, target, context, backend,
                     model=model, reprompt_limit=reprompt_limit)


def voice_critique(
    target: str,
    context: str,
    backend: Backend,
    *,
    model: str = "gpt-3.5-turbo",
    reprompt_limit: int = 3,
) -> RevisionSuggestion:
    return _critique("voice_critic", "voice", _VOICE_FEATURES, target, context, backend,
                     model=model, reprompt_limit=reprompt_limit)


def leader_select_revision(
    image: RevisionSuggestion,
    voice: RevisionSuggestion,
    context: str,
    backend: Backend,
    *,
    model: str = "gpt-3.5-turbo",
    reprompt_limit: int = 3,
) -> LeaderDecision:
    """Pick image (0) or voice (1) by matching the quoted replacement text."""
    if image.replacement == voice.replacement:
        return LeaderDecision(chosen_index=0, justification="suggestions are identical")
    template = load_template("leader_text")
    prompt = render_prompt(
        template,
        {
            "context": context,
            "image_refinement": image.replacement,
            "voice_refinement": voice.replacement,
        },
    )
    for attempt in range(reprompt_limit):
        raw = _ask(backend, prompt if attempt == 0 else prompt + _FORMAT_REMINDER, model=model)
        positions = [
            (raw.find(image.replacement), 0),
            (raw.find(voice.replacement), 1),
        ]
        hits = sorted((p, i) for p, i in positions if p >= 0)
        if hits:
            return LeaderDecision(chosen_index=hits[0][1], justification=raw.strip())
        lowered = raw.lower()
        for marker, index in (("image", 0), ("voice", 1)):
            if marker in lowered:
                return LeaderDecision(chosen_index=index, justification=raw.strip())
        log.warning("text leader attempt %d quoted neither revision", attempt + 1)
    raise DecisionParseFailure(f"text leader decision unparseable after {reprompt_limit} attempts")


def run_crtext(
    story: StoryText,
    cfg: CrTextConfig,
    backend: Backend,
    session_hooks: TextSessionHooks | None = None,
) -> tuple[StoryText, tuple[CrTextRound, ...]]:
    """Run ``cfg.rounds`` sentence refinements over the story."""
    rounds: list[CrTextRound] = []
    revised: set[int] = set()
    current = story
    try:
        for round_no in range(1, cfg.rounds + 1):
            span = sample_sentence(current, cfg.rng_seed, round_no, frozenset(revised))
            target = current.sentence(span)
            context = context_excerpt(current, span, cfg.context_window)
            image = image_critique(target, context, backend,
                                   model=cfg.model, reprompt_limit=cfg.reprompt_limit)
            voice = voice_critique(target, context, backend,
                                   model=cfg.model, reprompt_limit=cfg.reprompt_limit)
            decision: LeaderDecision | None = None
            if session_hooks and session_hooks.before_leader:
                decision = session_hooks.before_leader(round_no, image, voice, context)
            if decision is None:
                if cfg.use_leader:
                    decision = leader_select_revision(image, voice, context, backend,
                                                      model=cfg.model, reprompt_limit=cfg.reprompt_limit)
                    chosen = (image, voice)[decision.chosen_index]
                    output = replace_span(current, span, chosen.replacement)
                else:
                    # Leaderless ablation: image first, then voice revises the
                    # image output in place.
                    output = replace_span(current, span, image.replacement)
                    new_span = output.sentence_index[min(span.ordinal, len(output.sentence_index) - 1)]
                    voice = voice_critique(output.sentence(new_span),
                                           context_excerpt(output, new_span, cfg.context_window),
                                           backend, model=cfg.model, reprompt_limit=cfg.reprompt_limit)
                    output = replace_span(output, new_span, voice.replacement)
                    decision = LeaderDecision(
                        chosen_index=1,
                        justification="leaderless mode: image then voice applied in order",
                    )
            else:
                chosen = (image, voice)[decision.chosen_index]
                output = replace_span(current, span, chosen.replacement)
            record = CrTextRound(
                round=round_no, target=span, image=image, voice=voice,
                decision=decision, output=output,
            )
            if session_hooks and session_hooks.before_advance:
                session_hooks.before_advance(round_no, record)
            rounds.append(record)
            revised.add(span.ordinal)
            current = output
    except PartialRunError:
        raise
    except Exception as exc:
        raise PartialRunError(exc, rounds) from exc
    return current, tuple(rounds)
