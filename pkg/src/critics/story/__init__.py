from critics.story.model import (
    CharacterEntry,
    Outline,
    OutlineItem,
    SentenceSpan,
    StoryPackage,
    StoryText,
    validate_package,
)
from critics.story.sentences import replace_span, segment_sentences
from critics.story.text import (
    normalize_package_text,
    parse_story_package,
    render_story_package,
)

__all__ = [
    "CharacterEntry",
    "Outline",
    "OutlineItem",
    "SentenceSpan",
    "StoryPackage",
    "StoryText",
    "normalize_package_text",
    "parse_story_package",
    "render_story_package",
    "replace_span",
    "segment_sentences",
    "validate_package",
]
