"""Domain types for story packages, outlines, and segmented story text."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from critics.errors import StoryModelError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CharacterEntry:
    name: str
    description: str

    def to_dict(self) -> dict:
        return {"name": self.name, "description": self.description}

    @classmethod
    def from_dict(cls, d: dict) -> "CharacterEntry":
        return cls(name=d["name"], description=d.get("description", ""))


@dataclass(frozen=True)
class OutlineItem:
    label: str
    summary: str
    scene: str | None = None
    characters: tuple[str, ...] = ()
    children: tuple["OutlineItem", ...] = ()

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "summary": self.summary,
            "scene": self.scene,
            "characters": list(self.characters),
            "children": [c.to_dict() for c in self.children],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "OutlineItem":
        return cls(
            label=d["label"],
            summary=d["summary"],
            scene=d.get("scene"),
            characters=tuple(d.get("characters", ())),
            children=tuple(cls.from_dict(c) for c in d.get("children", ())),
        )

    def walk(self):
        yield self
        for child in self.children:
            yield child


@dataclass(frozen=True)
class Outline:
    items: tuple[OutlineItem, ...] = ()

    def walk(self):
        for item in self.items:
            yield from item.walk()

    def to_list(self) -> list:
        return [i.to_dict() for i in self.items]

    @classmethod
    def from_list(cls, items: list) -> "Outline":
        return cls(items=tuple(OutlineItem.from_dict(i) for i in items))


@dataclass(frozen=True)
class StoryPackage:
    premise: str
    setting: str
    characters: tuple[CharacterEntry, ...]
    outline: Outline

    def to_dict(self) -> dict:
        return {
            "premise": self.premise,
            "setting": self.setting,
            "characters": [c.to_dict() for c in self.characters],
            "outline": self.outline.to_list(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StoryPackage":
        return cls(
            premise=d["premise"],
            setting=d.get("setting", ""),
            characters=tuple(CharacterEntry.from_dict(c) for c in d.get("characters", ())),
            outline=Outline.from_list(d.get("outline", ())),
        )

    def character_names(self) -> set[str]:
        return {c.name for c in self.characters}


def _check_labels(items: tuple[OutlineItem, ...], expected: list[str], where: str) -> None:
    labels = [i.label for i in items]
    if labels != expected[: len(labels)]:
        raise StoryModelError(f"non-consecutive outline labels {labels} in {where}")


def validate_package(pkg: StoryPackage) -> list[str]:
    """Checks hard invariants (raising StoryModelError) and returns warnings."""
    if not pkg.premise.strip():
        raise StoryModelError("premise is empty")
    names = [c.name for c in pkg.characters]
    for name in names:
        if not name.strip():
            raise StoryModelError("character with empty name")
    if len(set(names)) != len(names):
        raise StoryModelError("duplicate character names")
    _check_labels(pkg.outline.items, [str(n) for n in range(1, len(pkg.outline.items) + 1)], "top level")
    letters = [chr(ord("a") + k) for k in range(26)]
    for item in pkg.outline.items:
        _check_labels(item.children, letters, f"item {item.label}")
        for child in item.children:
            if child.children:
                raise StoryModelError("outline deeper than 2 levels")
            if not child.summary.strip():
                raise StoryModelError("outline item with empty summary")
        if not item.summary.strip():
            raise StoryModelError("outline item with empty summary")

    warnings = []
    known = pkg.character_names()
    for item in pkg.outline.walk():
        for name in item.characters:
            if name not in known:
                warnings.append(f"outline item {item.label} references unknown character {name!r}")
    for w in warnings:
        logger.warning(w)
    return warnings


@dataclass(frozen=True)
class SentenceSpan:
    start: int
    end: int
    ordinal: int

    def to_dict(self) -> dict:
        return {"start": self.start, "end": self.end, "ordinal": self.ordinal}

    @classmethod
    def from_dict(cls, d: dict) -> "SentenceSpan":
        return cls(start=d["start"], end=d["end"], ordinal=d["ordinal"])


@dataclass(frozen=True)
class StoryText:
    body: str
    sentence_index: tuple[SentenceSpan, ...] = field(default_factory=tuple)

    def sentence(self, span: SentenceSpan) -> str:
        return self.body[span.start : span.end]

    def to_dict(self) -> dict:
        return {
            "body": self.body,
            "sentence_index": [s.to_dict() for s in self.sentence_index],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StoryText":
        return cls(
            body=d["body"],
            sentence_index=tuple(SentenceSpan.from_dict(s) for s in d.get("sentence_index", ())),
        )
