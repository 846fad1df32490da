"""Chance-corrected inter-rater agreement: Cohen's and Fleiss' kappa."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from critics.errors import EmptyInput, LengthMismatch, RaggedMatrix, TooFewRaters


def cohen_kappa(r1: list, r2: list) -> float:
    """kappa = (p_o - p_e) / (1 - p_e) for two raters over shared categories."""
    if len(r1) != len(r2):
        raise LengthMismatch(f"{len(r1)} vs {len(r2)} ratings")
    n = len(r1)
    if n == 0:
        raise EmptyInput("no ratings")

    p_o = sum(1 for a, b in zip(r1, r2) if a == b) / n
    m1 = Counter(r1)
    m2 = Counter(r2)
    p_e = sum(m1[c] * m2[c] for c in set(m1) | set(m2)) / (n * n)
    if p_e == 1.0:
        # Both raters used a single, identical category everywhere.
        return 1.0 if p_o == 1.0 else 0.0
    return (p_o - p_e) / (1.0 - p_e)


def fleiss_kappa(counts: list[list[int]]) -> float:
    """Fleiss' kappa from an items x categories matrix of rater counts."""
    if not counts:
        raise EmptyInput("no items")
    n_raters = sum(counts[0])
    for row in counts:
        if len(row) != len(counts[0]):
            raise RaggedMatrix("rows have differing category counts")
        if sum(row) != n_raters:
            raise RaggedMatrix("rows sum to differing rater counts")
    if n_raters < 2:
        raise TooFewRaters(f"need >= 2 raters, got {n_raters}")

    n_items = len(counts)
    total = n_items * n_raters
    p_j = [sum(row[j] for row in counts) / total for j in range(len(counts[0]))]
    p_bar = sum(
        (sum(c * c for c in row) - n_raters) / (n_raters * (n_raters - 1)) for row in counts
    ) / n_items
    p_e = sum(p * p for p in p_j)
    if p_e == 1.0:
        return 1.0 if p_bar == 1.0 else 0.0
    return (p_bar - p_e) / (1.0 - p_e)


@dataclass(frozen=True)
class AgreementReport:
    cohen: dict[str, float] = field(default_factory=dict)  # rater-pair label -> kappa
    fleiss: float | None = None
    n_items: int = 0
    n_categories: int = 0

    def to_dict(self) -> dict:
        return {
            "cohen": dict(self.cohen),
            "fleiss": self.fleiss,
            "n_items": self.n_items,
            "n_categories": self.n_categories,
        }
