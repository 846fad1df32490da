"""Exception hierarchy shared across the engine, gateway, and service layers."""

from __future__ import annotations


class CriticsError(Exception):
    """Base class for all package errors."""


# --- story model ---------------------------------------------------------


class StoryModelError(CriticsError):
    pass


class MissingSection(StoryModelError):
    def __init__(self, name: str):
        super().__init__(f"missing section: {name}")
        self.name = name


class OutlineParseError(StoryModelError):
    def __init__(self, line: str, reason: str):
        super().__init__(f"outline parse error at {line!r}: {reason}")
        self.line = line
        self.reason = reason


class EmptyText(StoryModelError):
    pass


class SpanNotFound(StoryModelError):
    pass


class NoSentences(StoryModelError):
    pass


# --- gateway -------------------------------------------------------------


class GatewayError(CriticsError):
    pass


class MissingSlot(GatewayError):
    def __init__(self, name: str):
        super().__init__(f"unbound template slot: {name}")
        self.name = name


class UnknownSlot(GatewayError):
    def __init__(self, name: str):
        super().__init__(f"binding for unknown slot: {name}")
        self.name = name


class ProviderUnreachable(GatewayError):
    pass


class RateLimited(GatewayError):
    pass


class MalformedProviderResponse(GatewayError):
    pass


class ProviderTimeout(GatewayError):
    pass


class ScriptExhausted(GatewayError):
    pass


class NoMatcherAccepts(GatewayError):
    def __init__(self, prompt: str):
        super().__init__(f"no script entry accepts prompt: {prompt[:120]!r}")
        self.prompt = prompt


# --- engines -------------------------------------------------------------


class EngineError(CriticsError):
    pass


class PersonaParseFailure(EngineError):
    pass


class CritiqueParseFailure(EngineError):
    pass


class DecisionParseFailure(EngineError):
    pass


class RefinementParseFailure(EngineError):
    pass


class SuggestionParseFailure(EngineError):
    pass


class EmptyCritiqueList(EngineError):
    pass


class PartialRunError(EngineError):
    """Wraps a stage failure mid-run, carrying the rounds completed so far."""

    def __init__(self, cause: Exception, completed_rounds: list):
        super().__init__(f"run aborted after {len(completed_rounds)} round(s): {cause}")
        self.cause = cause
        self.completed_rounds = completed_rounds


# --- evaluation harness --------------------------------------------------


class EvalError(CriticsError):
    pass


class VerdictParseFailure(EvalError):
    def __init__(self, position: int, token: str):
        super().__init__(f"bad verdict at position {position}: {token!r}")
        self.position = position
        self.token = token


class MixedMetricSets(EvalError):
    pass


class EmptyInput(EvalError):
    pass


class LengthMismatch(EvalError):
    pass


class RaggedMatrix(EvalError):
    pass


class TooFewRaters(EvalError):
    pass


# --- session service -----------------------------------------------------


class SessionError(CriticsError):
    def __init__(self, message: str, code: str = "session_error"):
        super().__init__(message)
        self.code = code


class ValidationError(SessionError):
    def __init__(self, message: str):
        super().__init__(message, code="validation_error")


class StorageError(SessionError):
    def __init__(self, message: str):
        super().__init__(message, code="storage_error")


class NotFound(SessionError):
    def __init__(self, message: str = "session not found"):
        super().__init__(message, code="not_found")


class Conflict(SessionError):
    def __init__(self, message: str):
        super().__init__(message, code="conflict")


class IllegalState(SessionError):
    def __init__(self, message: str):
        super().__init__(message, code="illegal_state")


class UnknownRound(SessionError):
    def __init__(self, message: str):
        super().__init__(message, code="unknown_round")


class IndexOutOfRange(SessionError):
    def __init__(self, message: str):
        super().__init__(message, code="index_out_of_range")


class RoundIncomplete(SessionError):
    def __init__(self, message: str):
        super().__init__(message, code="round_incomplete")


class UnmarkedRounds(SessionError):
    def __init__(self, message: str):
        super().__init__(message, code="unmarked_rounds")
