from critics.crtext.engine import (
    TextSessionHooks,
    context_excerpt,
    image_critique,
    leader_select_revision,
    run_crtext,
    sample_sentence,
    voice_critique,
)
from critics.crtext.types import CrTextConfig, CrTextRound, RevisionSuggestion

__all__ = [
    "CrTextConfig",
    "CrTextRound",
    "RevisionSuggestion",
    "TextSessionHooks",
    "context_excerpt",
    "image_critique",
    "leader_select_revision",
    "run_crtext",
    "sample_sentence",
    "voice_critique",
]
