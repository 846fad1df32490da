import { describe, expect, it } from "vitest";

import {
  escapeHtml,
  renderCritiquePanel,
  renderLeaderConsole,
  renderMarksView,
  renderPlanRoundDiff,
  renderSessionBoard,
} from "../src/views.js";
import type { Critique, PlanRound, SessionState, SessionSummary, StoryPackage } from "../src/types.js";

function critique(question: string, criterion = "originality", kind: "machine" | "human" = "machine"): Critique {
  return {
    criterion_id: criterion,
    question,
    rationale: "because",
    author_kind: kind,
    author_name: kind === "human" ? "writer" : "",
    candidates_considered: [question, question, question],
  };
}

function baseState(overrides: Partial<SessionState>): SessionState {
  return {
    id: "abcd1234efgh",
    stage: "plan",
    status: "awaiting_critiques",
    version: 3,
    human_leader: true,
    label: "",
    subject: {} as never,
    initial_subject: {} as never,
    rounds: [],
    pending: null,
    human_marks: [],
    selected_index: null,
    evaluator_transcript: "",
    revised_ordinals: [],
    error: "",
    config: { rounds: 3 },
    ...overrides,
  };
}

describe("escapeHtml", () => {
  it("neutralises markup in user text", () => {
    expect(escapeHtml(`<script>"x" & y</script>`)).toBe(
      "&lt;script&gt;&quot;x&quot; &amp; y&lt;/script&gt;",
    );
  });
});

describe("session board", () => {
  it("shows a friendly message when empty", () => {
    expect(renderSessionBoard([])).toContain("No sessions yet");
  });

  it("renders one row per session with status chip and round count", () => {
    const rows: SessionSummary[] = [
      { id: "11111111aa", stage: "plan", status: "awaiting_leader", round: 1, version: 9, label: "s1" },
      { id: "22222222bb", stage: "text", status: "finalized", round: 3, version: 20, label: "" },
    ];
    const html = renderSessionBoard(rows);
    expect(html.match(/class="session-row"/g)).toHaveLength(2);
    expect(html).toContain("status-awaiting_leader");
    expect(html).toContain("awaiting leader");
    expect(html).toContain("11111111");
  });
});

describe("critique panel", () => {
  it("lists pending critiques with criterion badges and author kind", () => {
    const state = baseState({
      status: "awaiting_leader",
      pending: {
        round: 2,
        critiques: [critique("What if A?"), critique("What if B?", "structure", "human")],
        decision: null,
      },
    });
    const html = renderCritiquePanel(state);
    expect(html).toContain("round 2");
    expect(html).toContain("badge-originality");
    expect(html).toContain("badge-structure");
    expect(html).toContain("What if A?");
    expect(html).toContain("human: writer");
    expect(html).toContain('id="critique-form"');
  });

  it("omits the submit form once the round is past the critique phase", () => {
    const state = baseState({ status: "refining", pending: { round: 1, critiques: [], decision: null } });
    expect(renderCritiquePanel(state)).not.toContain('id="critique-form"');
  });
});

describe("leader console", () => {
  it("is idle unless the session awaits a leader", () => {
    expect(renderLeaderConsole(baseState({ status: "refining" }))).toContain("not needed");
  });

  it("offers one radio option per pending critique", () => {
    const state = baseState({
      status: "awaiting_leader",
      pending: { round: 1, critiques: [critique("Q1?"), critique("Q2?"), critique("Q3?")], decision: null },
    });
    const html = renderLeaderConsole(state);
    expect(html.match(/type="radio"/g)).toHaveLength(3);
    expect(html).toContain('value="2"');
    expect(html).toContain('id="leader-form"');
  });
});

describe("marks view", () => {
  it("shows saved marks as checked and surfaces the automatic edit verdict", () => {
    const round: PlanRound = {
      round: 1,
      input_plan: {} as StoryPackage,
      critiques: [critique("Q?")],
      decision: { chosen_index: 0, justification: "j", author_kind: "machine" },
      refined_plan: {} as StoryPackage,
    };
    const state = baseState({
      status: "finalized",
      rounds: [round],
      human_marks: [{ round: 1, edited: "pass", accepted: "fail", auto_edited: "pass" }],
    });
    const html = renderMarksView(state, {
      edited_pass_rate: 100.0,
      accepted_pass_rate: 83.33,
      fleiss: null,
      n_rounds: 30,
    });
    expect(html).toContain('name="edited-1" value="pass" checked');
    expect(html).toContain('name="accepted-1" value="fail" checked');
    expect(html).toContain("100");
    expect(html).toContain("83.33");
  });
});

describe("plan round diff rendering", () => {
  const pkg = (summary: string): StoryPackage => ({
    premise: "P.",
    setting: "S.",
    characters: [],
    outline: [{ label: "1.", summary, scene: null, characters: [], children: [] }],
  });

  it("marks changed outline items with before/after text", () => {
    const round: PlanRound = {
      round: 2,
      input_plan: pkg("the old beat"),
      critiques: [critique("Q?")],
      decision: { chosen_index: 0, justification: "j", author_kind: "machine" },
      refined_plan: pkg("the new beat"),
    };
    const html = renderPlanRoundDiff(round);
    expect(html).toContain("change-changed");
    expect(html).toContain("<del>the old beat</del>");
    expect(html).toContain("<ins>the new beat</ins>");
  });

  it("says so when a round changed nothing", () => {
    const round: PlanRound = {
      round: 1,
      input_plan: pkg("same"),
      critiques: [critique("Q?")],
      decision: { chosen_index: 0, justification: "j", author_kind: "machine" },
      refined_plan: pkg("same"),
    };
    expect(renderPlanRoundDiff(round)).toContain("no changes");
  });
});
