"""Parser, renderer, and canonicalizer for the story-package text format.

The format has four sections in order:

    Premise: <prose>

    Setting: <prose>

    Characters:
    <Name>: <description>
    ...

    Outline:
    1. <summary> Scene: <scene> Characters: <a, b>
    a. <child summary> ...
    2. ...

``parse_story_package`` accepts whitespace-noisy variants of this layout
(LLM output is unstable); ``render_story_package`` emits the canonical form;
``normalize_package_text`` is a purely textual canonicalization such that
``render(parse(x)) == normalize(x)`` for any parseable ``x``.
"""

from __future__ import annotations

import re

from critics.errors import MissingSection, OutlineParseError
from critics.story.model import (
    CharacterEntry,
    Outline,
    OutlineItem,
    StoryPackage,
    validate_package,
)

_HEADER_RE = re.compile(r"^(premise|settings?|characters|outline)\s*:\s*(.*)$", re.IGNORECASE)
_NUM_ITEM_RE = re.compile(r"^(\d+)\.\s+(.*)$")
_LETTER_ITEM_RE = re.compile(r"^([a-z])\.\s+(.*)$")
_CHAR_LINE_RE = re.compile(r"^([^:]{1,80}):\s*(.*)$")


def _clean_lines(raw: str) -> list[str]:
    text = raw.replace("\r\n", "\n").replace("\r", "\n").expandtabs(1)
    lines = []
    for line in text.split("\n"):
        lines.append(re.sub(r" {2,}", " ", line).strip())
    return lines


def _split_sections(lines: list[str]) -> dict[str, list[str]]:
    """Groups cleaned lines under the four canonical section names."""
    sections: dict[str, list[str]] = {}
    current: str | None = None
    for line in lines:
        m = _HEADER_RE.match(line)
        if m:
            name = m.group(1).lower()
            if name == "settings":
                name = "setting"
            name = name.capitalize()
            # A repeated header (e.g. a "Characters:" tail wrapped onto its
            # own line inside the outline) is content, not a new section.
            if name not in sections:
                current = name
                sections[current] = []
                rest = m.group(2).strip()
                if rest:
                    sections[current].append(rest)
                continue
        if current is not None and line:
            sections[current].append(line)
    return sections


def _parse_item_tail(rest: str) -> tuple[str, str | None, tuple[str, ...]]:
    """Splits an outline item body into (summary, scene, characters)."""
    scene: str | None = None
    characters: tuple[str, ...] = ()
    idx_c = rest.find("Characters:")
    if idx_c >= 0:
        tail = rest[idx_c + len("Characters:") :].strip()
        characters = tuple(c.strip() for c in tail.split(",") if c.strip())
        rest = rest[:idx_c].rstrip()
    idx_s = rest.find("Scene:")
    if idx_s >= 0:
        scene = rest[idx_s + len("Scene:") :].strip()
        rest = rest[:idx_s].rstrip()
    return rest.strip(), scene, characters


def _parse_outline(lines: list[str]) -> Outline:
    # Join continuation lines into their item line first.
    joined: list[str] = []
    for line in lines:
        if _NUM_ITEM_RE.match(line) or _LETTER_ITEM_RE.match(line):
            joined.append(line)
        elif joined:
            joined[-1] = joined[-1] + " " + line
        else:
            raise OutlineParseError(line, "expected a numbered item")

    items: list[dict] = []
    for line in joined:
        m = _NUM_ITEM_RE.match(line)
        if m:
            label, rest = m.group(1), m.group(2)
            if label != str(len(items) + 1):
                raise OutlineParseError(line, f"expected item {len(items) + 1}")
            summary, scene, chars = _parse_item_tail(rest)
            if not summary:
                raise OutlineParseError(line, "empty summary")
            items.append({"label": label, "summary": summary, "scene": scene, "characters": chars, "children": []})
            continue
        m = _LETTER_ITEM_RE.match(line)
        if m:
            if not items:
                raise OutlineParseError(line, "lettered item before any numbered item")
            label, rest = m.group(1), m.group(2)
            siblings = items[-1]["children"]
            expected = chr(ord("a") + len(siblings))
            if label != expected:
                raise OutlineParseError(line, f"expected item {expected}")
            summary, scene, chars = _parse_item_tail(rest)
            if not summary:
                raise OutlineParseError(line, "empty summary")
            siblings.append(OutlineItem(label=label, summary=summary, scene=scene, characters=chars))
            continue
        raise OutlineParseError(line, "matches no outline production")

    return Outline(
        items=tuple(
            OutlineItem(
                label=i["label"],
                summary=i["summary"],
                scene=i["scene"],
                characters=i["characters"],
                children=tuple(i["children"]),
            )
            for i in items
        )
    )


def parse_story_package(raw: str) -> StoryPackage:
    sections = _split_sections(_clean_lines(raw))
    for name in ("Premise", "Setting", "Characters", "Outline"):
        if name not in sections:
            raise MissingSection(name)

    characters = []
    for line in sections["Characters"]:
        m = _CHAR_LINE_RE.match(line)
        if m:
            characters.append(CharacterEntry(name=m.group(1).strip(), description=m.group(2).strip()))
        elif characters:
            prev = characters[-1]
            characters[-1] = CharacterEntry(prev.name, (prev.description + " " + line).strip())
        else:
            raise OutlineParseError(line, "expected 'Name: description'")

    pkg = StoryPackage(
        premise=" ".join(sections["Premise"]),
        setting=" ".join(sections["Setting"]),
        characters=tuple(characters),
        outline=_parse_outline(sections["Outline"]),
    )
    validate_package(pkg)
    return pkg


def _render_item_line(item: OutlineItem) -> str:
    parts = [f"{item.label}. {item.summary}"]
    if item.scene is not None:
        parts.append(f"Scene: {item.scene}" if item.scene else "Scene:")
    if item.characters:
        parts.append("Characters: " + ", ".join(item.characters))
    return re.sub(r" {2,}", " ", " ".join(parts)).strip()


def render_story_package(pkg: StoryPackage) -> str:
    validate_package(pkg)
    out = [f"Premise: {pkg.premise}", "", f"Setting: {pkg.setting}", "", "Characters:"]
    for c in pkg.characters:
        out.append(f"{c.name}: {c.description}".rstrip())
    out.extend(["", "Outline:"])
    for item in pkg.outline.items:
        out.append(_render_item_line(item))
        for child in item.children:
            out.append(_render_item_line(child))
    return "\n".join(out) + "\n"


def normalize_package_text(raw: str) -> str:
    """Textual canonicalization of a package, independent of the parse tree.

    Collapses whitespace, joins continuation lines, renames "Settings" to
    "Setting", and re-emits the canonical section layout.
    """
    sections = _split_sections(_clean_lines(raw))
    for name in ("Premise", "Setting", "Characters", "Outline"):
        if name not in sections:
            raise MissingSection(name)

    char_lines: list[str] = []
    for line in sections["Characters"]:
        if _CHAR_LINE_RE.match(line) or not char_lines:
            char_lines.append(line.rstrip())
        else:
            char_lines[-1] = char_lines[-1] + " " + line

    outline_lines: list[str] = []
    for line in sections["Outline"]:
        if _NUM_ITEM_RE.match(line) or _LETTER_ITEM_RE.match(line):
            outline_lines.append(line)
        elif outline_lines:
            outline_lines[-1] = outline_lines[-1] + " " + line
        else:
            outline_lines.append(line)
    outline_lines = [re.sub(r" {2,}", " ", line).strip() for line in outline_lines]

    out = ["Premise: " + " ".join(sections["Premise"]), "", "Setting: " + " ".join(sections["Setting"]), "", "Characters:"]
    out.extend(char_lines)
    out.extend(["", "Outline:"])
    out.extend(outline_lines)
    return "\n".join(out) + "\n"
