from critics.gateway.client import (
    Backend,
    ChatRequest,
    Completion,
    HttpBackend,
    ProviderConfig,
    TransientProviderError,
    complete,
)
from critics.gateway.mock import (
    MockBackend,
    RepeatingBackend,
    ScriptEntry,
    always,
    load_script,
    mock_provider,
)
from critics.gateway.templates import (
    PromptTemplate,
    available_templates,
    load_template,
    render_prompt,
)

# Call temperatures: critics, leaders, refiners, and persona creation run
# "hot"; evaluator and judge calls run deterministic.
CREATIVE_TEMPERATURE = 1.0
JUDGE_TEMPERATURE = 0.0

__all__ = [
    "Backend",
    "ChatRequest",
    "Completion",
    "CREATIVE_TEMPERATURE",
    "HttpBackend",
    "JUDGE_TEMPERATURE",
    "MockBackend",
    "PromptTemplate",
    "ProviderConfig",
    "RepeatingBackend",
    "ScriptEntry",
    "TransientProviderError",
    "always",
    "available_templates",
    "complete",
    "load_script",
    "load_template",
    "mock_provider",
    "render_prompt",
]
