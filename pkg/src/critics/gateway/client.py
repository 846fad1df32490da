"""Provider-agnostic chat-completion client with retry/backoff.

The HTTP backend posts a chat-completions-style JSON body; the scripted
mock backend (``critics.gateway.mock``) satisfies the same interface and
keeps everything deterministic for tests and simulations.
"""

from __future__ import annotations

import json
import logging
import os
import random
import time
import urllib.error
import urllib.request
from dataclasses import dataclass, field

from critics.errors import (
    GatewayError,
    MalformedProviderResponse,
    ProviderTimeout,
    ProviderUnreachable,
    RateLimited,
)

logger = logging.getLogger(__name__)

Message = tuple[str, str]  # (role, content)

_VALID_ROLES = {"system", "user", "assistant"}


@dataclass(frozen=True)
class ChatRequest:
    model: str
    messages: tuple[Message, ...]
    temperature: float = 1.0
    max_retries: int = 3

    def __post_init__(self):
        if not self.messages:
            raise ValueError("messages must be non-empty")
        for role, _ in self.messages:
            if role not in _VALID_ROLES:
                raise ValueError(f"invalid role {role!r}")
        if self.messages[-1][0] != "user":
            raise ValueError("last message must have role 'user'")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature must be in [0, 2]")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")


@dataclass(frozen=True)
class Completion:
    content: str
    provider_id: str
    latency_ms: int


@dataclass(frozen=True)
class ProviderConfig:
    endpoint_url: str
    api_key_env: str = "LLM_API_KEY"
    default_model: str = "gpt-3.5-turbo"
    timeout_ms: int = 60_000

    def __post_init__(self):
        if self.timeout_ms <= 0:
            raise ValueError("timeout_ms must be positive")


class TransientProviderError(GatewayError):
    """Transport failure, 429, or 5xx: worth retrying."""

    def __init__(self, message: str, rate_limited: bool = False):
        super().__init__(message)
        self.rate_limited = rate_limited


class Backend:
    """Minimal backend interface: a single completion attempt."""

    provider_id = "backend"
    backoff_base_s = 1.0

    def send(self, request: ChatRequest) -> str:  # pragma: no cover - interface
        raise NotImplementedError


@dataclass
class HttpBackend(Backend):
    config: ProviderConfig
    provider_id: str = "http"
    backoff_base_s: float = 1.0
    # Dotted path to the content field in the provider's response JSON.
    content_path: tuple = ("choices", 0, "message", "content")

    def send(self, request: ChatRequest) -> str:
        api_key = os.environ.get(self.config.api_key_env)
        if not api_key:
            raise ProviderUnreachable(
                f"API key environment variable {self.config.api_key_env} is not set"
            )
        body = json.dumps(
            {
                "model": request.model or self.config.default_model,
                "temperature": request.temperature,
                "messages": [{"role": r, "content": c} for r, c in request.messages],
            }
        ).encode()
        req = urllib.request.Request(
            self.config.endpoint_url,
            data=body,
            headers={
                "Content-Type": "application/json",
                "Authorization": f"Bearer {api_key}",
            },
        )
        try:
            with urllib.request.urlopen(req, timeout=self.config.timeout_ms / 1000) as resp:
                payload = json.loads(resp.read().decode())
        except urllib.error.HTTPError as exc:
            if exc.code == 429:
                raise TransientProviderError("rate limited", rate_limited=True) from exc
            if exc.code >= 500:
                raise TransientProviderError(f"server error {exc.code}") from exc
            raise MalformedProviderResponse(f"HTTP {exc.code}") from exc
        except TimeoutError as exc:
            raise ProviderTimeout(str(exc)) from exc
        except urllib.error.URLError as exc:
            raise TransientProviderError(str(exc)) from exc

        node = payload
        try:
            for key in self.content_path:
                node = node[key]
        except (KeyError, IndexError, TypeError) as exc:
            raise MalformedProviderResponse(f"missing content field: {exc}") from exc
        if not isinstance(node, str) or not node:
            raise MalformedProviderResponse("empty completion content")
        return node


def complete(request: ChatRequest, backend: Backend, sleeper=time.sleep) -> Completion:
    """Runs one completion with up to ``request.max_retries`` retries.

    Backoff is exponential (base from the backend, factor 2) with +-20%
    jitter. Only transient failures are retried.
    """
    rng = random.Random()
    last: TransientProviderError | None = None
    start = time.monotonic()
    for attempt in range(request.max_retries + 1):
        try:
            content = backend.send(request)
        except TransientProviderError as exc:
            last = exc
            logger.warning("attempt %d failed: %s", attempt + 1, exc)
            if attempt < request.max_retries and backend.backoff_base_s > 0:
                delay = backend.backoff_base_s * (2**attempt)
                sleeper(delay * (1.0 + rng.uniform(-0.2, 0.2)))
            continue
        latency_ms = int((time.monotonic() - start) * 1000)
        return Completion(content=content, provider_id=backend.provider_id, latency_ms=latency_ms)

    assert last is not None
    if last.rate_limited:
        raise RateLimited(str(last))
    raise ProviderUnreachable(str(last))
