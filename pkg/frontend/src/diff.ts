// Round-to-round change computation: outline-item granularity for plans,
// sentence granularity for texts.

import type { OutlineItem, SentenceSpan, SessionState, StoryPackage, StoryText, TextRound } from "./types.js";

export interface OutlineEntry {
  /** Hierarchical path such as "1." or "1. > a)". */
  path: string;
  item: OutlineItem;
}

export function flattenOutline(items: OutlineItem[], prefix = ""): OutlineEntry[] {
  const out: OutlineEntry[] = [];
  for (const item of items) {
    const path = prefix ? `${prefix} > ${item.label}` : item.label;
    out.push({ path, item });
    out.push(...flattenOutline(item.children, path));
  }
  return out;
}

export type ChangeKind = "added" | "removed" | "changed";

export interface OutlineChange {
  kind: ChangeKind;
  path: string;
  before?: OutlineItem;
  after?: OutlineItem;
}

export interface FieldChange {
  field: "premise" | "setting" | "characters";
  before: string;
  after: string;
}

export interface PlanDiff {
  fields: FieldChange[];
  outline: OutlineChange[];
}

function sameItem(a: OutlineItem, b: OutlineItem): boolean {
  return (
    a.summary === b.summary &&
    (a.scene ?? "") === (b.scene ?? "") &&
    a.characters.join("|") === b.characters.join("|")
  );
}

function charactersKey(plan: StoryPackage): string {
  return plan.characters.map((c) => `${c.name}: ${c.description}`).join("\n");
}

export function diffPlan(before: StoryPackage, after: StoryPackage): PlanDiff {
  const fields: FieldChange[] = [];
  if (before.premise !== after.premise) {
    fields.push({ field: "premise", before: before.premise, after: after.premise });
  }
  if (before.setting !== after.setting) {
    fields.push({ field: "setting", before: before.setting, after: after.setting });
  }
  if (charactersKey(before) !== charactersKey(after)) {
    fields.push({ field: "characters", before: charactersKey(before), after: charactersKey(after) });
  }

  const beforeEntries = new Map(flattenOutline(before.outline).map((e) => [e.path, e.item]));
  const afterEntries = new Map(flattenOutline(after.outline).map((e) => [e.path, e.item]));
  const outline: OutlineChange[] = [];
  for (const [path, item] of beforeEntries) {
    const counterpart = afterEntries.get(path);
    if (counterpart === undefined) {
      outline.push({ kind: "removed", path, before: item });
    } else if (!sameItem(item, counterpart)) {
      outline.push({ kind: "changed", path, before: item, after: counterpart });
    }
  }
  for (const [path, item] of afterEntries) {
    if (!beforeEntries.has(path)) {
      outline.push({ kind: "added", path, after: item });
    }
  }
  return { fields, outline };
}

export function isPlanDiffEmpty(diff: PlanDiff): boolean {
  return diff.fields.length === 0 && diff.outline.length === 0;
}

/** Spans of the current text body whose sentences were revised so far. */
export function revisedSpans(state: SessionState): SentenceSpan[] {
  if (state.stage !== "text") return [];
  const subject = state.subject as StoryText;
  const revised = new Set(state.revised_ordinals);
  return subject.sentence_index.filter((s) => revised.has(s.ordinal));
}

/** The span of a finished text round's revised sentence within that round's output. */
export function roundHighlight(round: TextRound): SentenceSpan | null {
  const index = round.output.sentence_index;
  if (index.length === 0) return null;
  const ordinal = Math.min(round.target.ordinal, index.length - 1);
  return index[ordinal];
}

export interface HighlightSegment {
  text: string;
  highlighted: boolean;
}

/** Splits a body into plain/highlighted segments for rendering. */
export function segmentBody(body: string, spans: SentenceSpan[]): HighlightSegment[] {
  const sorted = [...spans].sort((a, b) => a.start - b.start);
  const segments: HighlightSegment[] = [];
  let cursor = 0;
  for (const span of sorted) {
    if (span.start > cursor) {
      segments.push({ text: body.slice(cursor, span.start), highlighted: false });
    }
    segments.push({ text: body.slice(span.start, span.end), highlighted: true });
    cursor = span.end;
  }
  if (cursor < body.length) {
    segments.push({ text: body.slice(cursor), highlighted: false });
  }
  return segments;
}
