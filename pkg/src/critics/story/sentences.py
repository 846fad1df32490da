"""Deterministic sentence segmentation and single-sentence replacement.

Splitting is heuristic: a run of ``.!?`` (plus any closing quotes) ends a
sentence when followed by whitespace and a capital (optionally behind an
opening quote) or by end of text. A fixed abbreviation list never splits.
Adequate for English narrative prose; no statistical tokenizer involved.
"""

from __future__ import annotations

import re

from critics.errors import EmptyText, SpanNotFound
from critics.story.model import SentenceSpan, StoryText

_TERMINATORS = ".!?"
_CLOSING_QUOTES = "\"'”’)"
_OPENING_QUOTES = "\"'“‘("

# Abbreviations that end in '.' but never terminate a sentence.
_ABBREVIATIONS = {"mr.", "mrs.", "dr.", "ms.", "st.", "vs.", "e.g.", "i.e."}

_UPPER_RE = re.compile(r"[A-Z]")


def _is_abbreviation(body: str, dot_end: int) -> bool:
    """True when the token ending at body[dot_end-1] == '.' is a known abbreviation."""
    k = dot_end - 1
    while k >= 0 and not body[k].isspace():
        k -= 1
    token = body[k + 1 : dot_end].lower()
    return token in _ABBREVIATIONS


def _boundary_after(body: str, i: int) -> int | None:
    """If a sentence boundary starts at terminator index i, returns the
    exclusive end of the sentence (after the terminator run and any closing
    quotes); otherwise None."""
    j = i
    while j < len(body) and body[j] in _TERMINATORS:
        j += 1
    if body[j - 1] == "." and _is_abbreviation(body, j):
        return None
    while j < len(body) and body[j] in _CLOSING_QUOTES:
        j += 1
    k = j
    while k < len(body) and body[k].isspace():
        k += 1
    if k == len(body):
        return j if k > j or j == len(body) else None
    if k == j:
        return None  # terminator glued to the next character: not a boundary
    while k < len(body) and body[k] in _OPENING_QUOTES:
        k += 1
    if k < len(body) and _UPPER_RE.match(body[k]):
        return j
    return None


def segment_sentences(body: str) -> StoryText:
    if not body or not body.strip():
        raise EmptyText("cannot segment empty text")

    spans: list[SentenceSpan] = []
    n = len(body)
    pos = 0
    while pos < n:
        while pos < n and body[pos].isspace():
            pos += 1
        if pos >= n:
            break
        start = pos
        end = None
        i = pos
        while i < n:
            if body[i] in _TERMINATORS:
                b = _boundary_after(body, i)
                if b is not None:
                    end = b
                    break
                while i < n and body[i] in _TERMINATORS:
                    i += 1
                continue
            i += 1
        if end is None:
            end = n
            while end > start and body[end - 1].isspace():
                end -= 1
        spans.append(SentenceSpan(start=start, end=end, ordinal=len(spans)))
        pos = end
    return StoryText(body=body, sentence_index=tuple(spans))


def replace_span(story: StoryText, span: SentenceSpan, replacement: str) -> StoryText:
    if span not in story.sentence_index:
        raise SpanNotFound(f"span {span} not in story index")
    new_body = story.body[: span.start] + replacement + story.body[span.end :]
    return segment_sentences(new_body)
