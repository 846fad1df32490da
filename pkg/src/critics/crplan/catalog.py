"""Criteria catalog: built-in critique axes plus user-registered ones.

The catalog is a JSON list of ``{id, name, rubric, stage}`` objects so new
criteria can be added without code changes.
"""

from __future__ import annotations

import json
from pathlib import Path

from critics.crplan.types import Criterion

_BUILTIN_FILE = Path(__file__).parent / "criteria" / "default_criteria.json"

# The three default plan-stage critique axes, in the order leaderless mode
# applies them.
DEFAULT_PLAN_CRITERION_IDS = ("originality", "structure", "ending")


def load_catalog(path: Path | None = None) -> dict[str, Criterion]:
    """Load a criteria catalog file, keyed by criterion id."""
    raw = json.loads((path or _BUILTIN_FILE).read_text(encoding="utf-8"))
    catalog: dict[str, Criterion] = {}
    for entry in raw:
        criterion = Criterion.from_dict(entry)
        if criterion.id in catalog:
            raise ValueError(f"duplicate criterion id {criterion.id!r}")
        catalog[criterion.id] = criterion
    return catalog


def get_criterion(criterion_id: str, extra_paths: tuple[Path, ...] = ()) -> Criterion:
    """Look up a criterion by id, checking user catalogs before built-ins."""
    for path in extra_paths:
        catalog = load_catalog(path)
        if criterion_id in catalog:
            return catalog[criterion_id]
    catalog = load_catalog()
    if criterion_id not in catalog:
        raise KeyError(f"unknown criterion {criterion_id!r}")
    return catalog[criterion_id]


def default_plan_criteria() -> tuple[Criterion, ...]:
    catalog = load_catalog()
    return tuple(catalog[cid] for cid in DEFAULT_PLAN_CRITERION_IDS)
