"""Prompt templates with ``{{placeholder}}`` slots, loaded from a file catalog.

Templates ship as plain text files (one per prompt role) so they can be
diffed and overridden by users without code changes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from critics.errors import MissingSlot, UnknownSlot

_SLOT_RE = re.compile(r"\{\{\s*([a-zA-Z0-9_]+)\s*\}\}")

_BUILTIN_DIR = Path(__file__).resolve().parent / "prompts"


@dataclass(frozen=True)
class PromptTemplate:
    id: str
    body: str
    required_slots: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        found = frozenset(_SLOT_RE.findall(self.body))
        if not self.required_slots:
            object.__setattr__(self, "required_slots", found)
        elif found != self.required_slots:
            raise ValueError(
                f"template {self.id}: declared slots {sorted(self.required_slots)} "
                f"!= slots in body {sorted(found)}"
            )


def render_prompt(template: PromptTemplate, bindings: dict[str, str], strict: bool = True) -> str:
    missing = template.required_slots - bindings.keys()
    if missing:
        raise MissingSlot(sorted(missing)[0])
    if strict:
        extra = bindings.keys() - template.required_slots
        if extra:
            raise UnknownSlot(sorted(extra)[0])

    def _sub(m: re.Match) -> str:
        return bindings[m.group(1)]

    out = _SLOT_RE.sub(_sub, template.body)
    assert "{{" not in out
    return out


def load_template(template_id: str, search_dirs: list[Path] | None = None) -> PromptTemplate:
    """Loads ``<id>.txt`` from the override dirs first, then the built-ins."""
    for directory in list(search_dirs or []) + [_BUILTIN_DIR]:
        path = Path(directory) / f"{template_id}.txt"
        if path.is_file():
            return PromptTemplate(id=template_id, body=path.read_text())
    raise FileNotFoundError(f"no template named {template_id!r}")


def available_templates() -> list[str]:
    return sorted(p.stem for p in _BUILTIN_DIR.glob("*.txt"))
