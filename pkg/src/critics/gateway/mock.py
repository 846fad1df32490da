"""Deterministic scripted backend for tests and protocol simulation.

A script is an ordered list of entries. Each completion call consumes the
first unconsumed entry whose matcher accepts the rendered prompt, so output
is fully determined by (script, call order). Entries may also inject
transient failures to exercise the retry path.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Union

from critics.errors import NoMatcherAccepts, ScriptExhausted
from critics.gateway.client import Backend, ChatRequest, TransientProviderError

Matcher = Union[None, str, Callable[[str], bool]]


@dataclass
class ScriptEntry:
    matcher: Matcher  # None = always; str = substring; callable = predicate
    response: str = ""
    fail: bool = False  # transient failure instead of a response
    consumed: bool = False

    def accepts(self, prompt: str) -> bool:
        if self.matcher is None:
            return True
        if isinstance(self.matcher, str):
            return self.matcher in prompt
        return bool(self.matcher(prompt))


@dataclass
class CallRecord:
    prompt: str
    response: str | None
    failed: bool


class MockBackend(Backend):
    """Scripted stand-in for a chat-completion provider."""

    provider_id = "mock"
    backoff_base_s = 0.0  # no real sleeping between scripted retries

    def __init__(self, script: list[ScriptEntry]):
        if not script:
            raise ValueError("script must be non-empty")
        self.script = list(script)
        self.calls: list[CallRecord] = []
        self._lock = threading.Lock()

    def send(self, request: ChatRequest) -> str:
        prompt = "\n".join(content for _, content in request.messages)
        with self._lock:
            remaining = [e for e in self.script if not e.consumed]
            if not remaining:
                raise ScriptExhausted(f"script exhausted at call {len(self.calls) + 1}")
            for entry in remaining:
                if entry.accepts(prompt):
                    entry.consumed = True
                    if entry.fail:
                        self.calls.append(CallRecord(prompt, None, failed=True))
                        raise TransientProviderError("scripted failure")
                    self.calls.append(CallRecord(prompt, entry.response, failed=False))
                    return entry.response
            self.calls.append(CallRecord(prompt, None, failed=True))
            raise NoMatcherAccepts(prompt)

    @property
    def attempts(self) -> int:
        return len(self.calls)

    @property
    def failures(self) -> int:
        return sum(1 for c in self.calls if c.failed)


def mock_provider(script: list[tuple[Matcher, str]]) -> MockBackend:
    """Builds a MockBackend from (matcher, response) pairs."""
    return MockBackend([ScriptEntry(matcher=m, response=r) for m, r in script])


def always(response: str, times: int = 1) -> list[ScriptEntry]:
    return [ScriptEntry(matcher=None, response=response) for _ in range(times)]


def load_script(path: str | Path) -> MockBackend:
    """Loads a script from a JSON file.

    Format: a list of objects {"match": <substring or null>, "response": <text>,
    "fail": <bool, optional>, "times": <int, optional>}.
    """
    raw = json.loads(Path(path).read_text())
    entries: list[ScriptEntry] = []
    for obj in raw:
        for _ in range(int(obj.get("times", 1))):
            entries.append(
                ScriptEntry(
                    matcher=obj.get("match"),
                    response=obj.get("response", ""),
                    fail=bool(obj.get("fail", False)),
                )
            )
    return MockBackend(entries)


class RepeatingBackend(Backend):
    """Non-consuming variant: answers by matcher lookup on every call.

    Useful for long synthetic runs (e.g. thousand-pair judge simulations)
    where writing one script entry per call is impractical.
    """

    provider_id = "mock-repeat"
    backoff_base_s = 0.0

    def __init__(self, responder: Callable[[str], str]):
        self.responder = responder
        self.calls: list[str] = []
        self._lock = threading.Lock()

    def send(self, request: ChatRequest) -> str:
        prompt = "\n".join(content for _, content in request.messages)
        with self._lock:
            self.calls.append(prompt)
        return self.responder(prompt)
