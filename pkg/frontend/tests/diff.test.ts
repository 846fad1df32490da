import { describe, expect, it } from "vitest";

import { diffPlan, flattenOutline, isPlanDiffEmpty, revisedSpans, segmentBody } from "../src/diff.js";
import type { OutlineItem, SessionState, StoryPackage } from "../src/types.js";

function item(label: string, summary: string, children: OutlineItem[] = []): OutlineItem {
  return { label, summary, scene: null, characters: [], children };
}

function plan(outline: OutlineItem[], premise = "A premise.", setting = "A town."): StoryPackage {
  return { premise, setting, characters: [{ name: "John", description: "a student" }], outline };
}

describe("flattenOutline", () => {
  it("yields hierarchical paths in document order", () => {
    const entries = flattenOutline([item("1.", "top", [item("a)", "nested")]), item("2.", "other")]);
    expect(entries.map((e) => e.path)).toEqual(["1.", "1. > a)", "2."]);
  });
});

describe("diffPlan", () => {
  it("reports no changes for identical plans", () => {
    const a = plan([item("1.", "same")]);
    expect(isPlanDiffEmpty(diffPlan(a, a))).toBe(true);
  });

  it("detects changed outline items at item granularity", () => {
    const before = plan([item("1.", "old summary", [item("a)", "kept")])]);
    const after = plan([item("1.", "new summary", [item("a)", "kept")])]);
    const diff = diffPlan(before, after);
    expect(diff.outline).toHaveLength(1);
    expect(diff.outline[0]).toMatchObject({ kind: "changed", path: "1." });
    expect(diff.outline[0].before?.summary).toBe("old summary");
    expect(diff.outline[0].after?.summary).toBe("new summary");
  });

  it("detects added and removed items, including nested ones", () => {
    const before = plan([item("1.", "top", [item("a)", "will vanish")])]);
    const after = plan([item("1.", "top"), item("2.", "brand new")]);
    const diff = diffPlan(before, after);
    const byKind = Object.fromEntries(diff.outline.map((c) => [c.kind, c.path]));
    expect(byKind["removed"]).toBe("1. > a)");
    expect(byKind["added"]).toBe("2.");
  });

  it("reports premise and setting changes separately from the outline", () => {
    const before = plan([item("1.", "s")], "Old premise.", "Old town.");
    const after = plan([item("1.", "s")], "New premise.", "Old town.");
    const diff = diffPlan(before, after);
    expect(diff.fields).toEqual([
      { field: "premise", before: "Old premise.", after: "New premise." },
    ]);
    expect(diff.outline).toHaveLength(0);
  });

  it("detects character roster changes", () => {
    const before = plan([item("1.", "s")]);
    const after = { ...before, characters: [{ name: "Abe", description: "a hermit" }] };
    const diff = diffPlan(before, after);
    expect(diff.fields.map((f) => f.field)).toEqual(["characters"]);
  });
});

describe("sentence highlighting", () => {
  const body = "One. Two. Three.";
  const index = [
    { start: 0, end: 4, ordinal: 0 },
    { start: 5, end: 9, ordinal: 1 },
    { start: 10, end: 16, ordinal: 2 },
  ];

  it("selects spans for revised ordinals only", () => {
    const state = {
      stage: "text",
      subject: { body, sentence_index: index },
      revised_ordinals: [1],
    } as unknown as SessionState;
    expect(revisedSpans(state)).toEqual([{ start: 5, end: 9, ordinal: 1 }]);
  });

  it("segments a body around highlighted spans and preserves every byte", () => {
    const segments = segmentBody(body, [index[1]]);
    expect(segments).toEqual([
      { text: "One. ", highlighted: false },
      { text: "Two.", highlighted: true },
      { text: " Three.", highlighted: false },
    ]);
    expect(segments.map((s) => s.text).join("")).toBe(body);
  });

  it("handles zero highlights and highlights at the edges", () => {
    expect(segmentBody(body, [])).toEqual([{ text: body, highlighted: false }]);
    const segments = segmentBody(body, [index[0], index[2]]);
    expect(segments[0]).toEqual({ text: "One.", highlighted: true });
    expect(segments.at(-1)).toEqual({ text: "Three.", highlighted: true });
  });
});
