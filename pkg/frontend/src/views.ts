// HTML renderers for the four workflow views. Pure string-in/string-out so
// they can be unit-tested without a DOM.

import { diffPlan, isPlanDiffEmpty, revisedSpans, segmentBody } from "./diff.js";
import type {
  Critique,
  PlanRound,
  SessionState,
  SessionSummary,
  StoryPackage,
  StoryText,
  TextRound,
  UserMetrics,
} from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function statusChip(status: string): string {
  return `<span class="chip status-${escapeHtml(status)}">${escapeHtml(status.replace(/_/g, " "))}</span>`;
}

// ---------------------------------------------------------------- session board

export function renderSessionBoard(sessions: SessionSummary[]): string {
  if (sessions.length === 0) {
    return `<p class="empty">No sessions yet. Create one above.</p>`;
  }
  const rows = sessions
    .map(
      (s) => `
    <tr data-session-id="${escapeHtml(s.id)}" class="session-row">
      <td><a href="#" class="open-session" data-session-id="${escapeHtml(s.id)}">${escapeHtml(
        s.id.slice(0, 8),
      )}</a></td>
      <td>${escapeHtml(s.label) || "&mdash;"}</td>
      <td>${escapeHtml(s.stage)}</td>
      <td>${statusChip(s.status)}</td>
      <td>${s.round}</td>
      <td>${s.version}</td>
    </tr>`,
    )
    .join("");
  return `<table class="board">
    <thead><tr><th>Session</th><th>Label</th><th>Stage</th><th>Status</th><th>Rounds done</th><th>Version</th></tr></thead>
    <tbody>${rows}</tbody>
  </table>`;
}

// -------------------------------------------------------------- critique panel

function renderCritique(c: Critique, index: number): string {
  const badge = `<span class="badge badge-${escapeHtml(c.criterion_id)}">${escapeHtml(c.criterion_id)}</span>`;
  const author = c.author_kind === "human" ? `human${c.author_name ? `: ${escapeHtml(c.author_name)}` : ""}` : "machine";
  return `<li class="critique" data-index="${index}">
    ${badge} <span class="author author-${c.author_kind}">${author}</span>
    <p class="question">${escapeHtml(c.question)}</p>
    <p class="rationale">${escapeHtml(c.rationale)}</p>
  </li>`;
}

export function renderCritiquePanel(state: SessionState): string {
  const critiques = state.pending?.critiques ?? [];
  const round = state.pending?.round ?? state.rounds.length + 1;
  const canSubmit = state.status === "awaiting_critiques" || state.status === "awaiting_leader";
  const list = critiques.length
    ? `<ol class="critiques">${critiques.map(renderCritique).join("")}</ol>`
    : `<p class="empty">No critiques for round ${round} yet.</p>`;
  const form = canSubmit
    ? `<form id="critique-form" data-round="${round}">
        <label>Focus <input name="criterion_id" value="originality" /></label>
        <label>Question <textarea name="question" required></textarea></label>
        <label>Why it matters <textarea name="rationale"></textarea></label>
        <button type="submit">Add critique</button>
      </form>`
    : "";
  return `<section class="critique-panel">
    <h2>Critiques &mdash; round ${round}</h2>
    ${list}
    ${form}
  </section>`;
}

// -------------------------------------------------------------- leader console

export function renderLeaderConsole(state: SessionState): string {
  if (state.status !== "awaiting_leader" || !state.pending) {
    return `<section class="leader-console"><p class="empty">Leader input is not needed right now.</p></section>`;
  }
  if (state.stage === "plan") {
    const critiques = state.pending.critiques ?? [];
    const options = critiques
      .map(
        (c, i) => `
      <label class="option">
        <input type="radio" name="chosen_index" value="${i}" ${i === 0 ? "checked" : ""} />
        <span class="badge">${escapeHtml(c.criterion_id)}</span> ${escapeHtml(c.question)}
      </label>`,
      )
      .join("");
    return `<section class="leader-console">
      <h2>Pick the critique to apply (round ${state.pending.round})</h2>
      <form id="leader-form" data-round="${state.pending.round}">
        ${options}
        <label>Justification <textarea name="justification"></textarea></label>
        <button type="submit">Apply decision</button>
      </form>
    </section>`;
  }
  const suggestions = [state.pending.image, state.pending.voice];
  const options = suggestions
    .map((s, i) =>
      s
        ? `
      <label class="option">
        <input type="radio" name="chosen_index" value="${i}" ${i === 0 ? "checked" : ""} />
        <span class="badge">${escapeHtml(s.criterion_id)}</span>
        <span class="replacement">${escapeHtml(s.replacement)}</span>
        <span class="reason">${escapeHtml(s.reason)}</span>
      </label>`
        : "",
    )
    .join("");
  return `<section class="leader-console">
    <h2>Pick the revision to apply (round ${state.pending.round})</h2>
    <p class="target">Target sentence: <em>${escapeHtml(
      state.pending.target ? String(state.pending.target.ordinal + 1) : "?",
    )}</em></p>
    <form id="leader-form" data-round="${state.pending.round}">
      ${options}
      <label>Justification <textarea name="justification"></textarea></label>
      <button type="submit">Apply decision</button>
    </form>
  </section>`;
}

// ----------------------------------------------------------------- marks view

export function renderMarksView(state: SessionState, metrics: UserMetrics | null): string {
  const marks = new Map(state.human_marks.map((m) => [m.round, m]));
  const rows = state.rounds
    .map((r) => {
      const mark = marks.get(r.round);
      const pick = (name: string, value: string, current: string | undefined) =>
        `<label><input type="radio" name="${name}-${r.round}" value="${value}" ${
          current === value ? "checked" : ""
        } /> ${value}</label>`;
      return `<tr class="mark-row" data-round="${r.round}">
        <td>${r.round}</td>
        <td>${pick("edited", "pass", mark?.edited)} ${pick("edited", "fail", mark?.edited)}</td>
        <td>${pick("accepted", "pass", mark?.accepted)} ${pick("accepted", "fail", mark?.accepted)}</td>
        <td class="auto">${mark ? escapeHtml(mark.auto_edited) : "&mdash;"}</td>
        <td><button class="save-mark" data-round="${r.round}">Save</button></td>
      </tr>`;
    })
    .join("");
  const aggregate = metrics
    ? `<p class="metrics">Edited pass rate: <b>${metrics.edited_pass_rate}</b> &middot; Accepted pass rate: <b>${
        typeof metrics.accepted_pass_rate === "number" ? metrics.accepted_pass_rate : escapeHtml(String(metrics.accepted_pass_rate))
      }</b> &middot; Agreement: <b>${metrics.fleiss ?? "n/a"}</b> over ${metrics.n_rounds} rounds</p>`
    : "";
  return `<section class="marks-view">
    <h2>Round marks</h2>
    <table class="marks">
      <thead><tr><th>Round</th><th>Edited</th><th>Accepted</th><th>Auto-detected edit</th><th></th></tr></thead>
      <tbody>${rows}</tbody>
    </table>
    ${aggregate}
  </section>`;
}

// ------------------------------------------------------------------ round diff

export function renderPlanRoundDiff(round: PlanRound): string {
  const diff = diffPlan(round.input_plan, round.refined_plan);
  if (isPlanDiffEmpty(diff)) {
    return `<p class="empty">Round ${round.round}: no changes.</p>`;
  }
  const fieldRows = diff.fields
    .map(
      (f) => `<li class="field-change">
        <b>${f.field}</b>
        <del>${escapeHtml(f.before)}</del>
        <ins>${escapeHtml(f.after)}</ins>
      </li>`,
    )
    .join("");
  const outlineRows = diff.outline
    .map((c) => {
      const before = c.before ? `<del>${escapeHtml(c.before.summary)}</del>` : "";
      const after = c.after ? `<ins>${escapeHtml(c.after.summary)}</ins>` : "";
      return `<li class="outline-change change-${c.kind}"><b>${escapeHtml(c.path)}</b> <span class="kind">${c.kind}</span> ${before} ${after}</li>`;
    })
    .join("");
  return `<div class="round-diff" data-round="${round.round}">
    <h3>Round ${round.round} changes</h3>
    <ul>${fieldRows}${outlineRows}</ul>
  </div>`;
}

export function renderTextRoundDiff(round: TextRound): string {
  return `<div class="round-diff" data-round="${round.round}">
    <h3>Round ${round.round} &mdash; sentence ${round.target.ordinal + 1}</h3>
    <p><del>${escapeHtml(round.image.original)}</del></p>
    <p><ins>${escapeHtml(
      round.decision.chosen_index === 0 ? round.image.replacement : round.voice.replacement,
    )}</ins></p>
  </div>`;
}

// -------------------------------------------------------------- subject views

export function renderPlanSubject(plan: StoryPackage): string {
  const items = (nodes: StoryPackage["outline"]): string =>
    nodes
      .map(
        (i) =>
          `<li><b>${escapeHtml(i.label)}</b> ${escapeHtml(i.summary)}${
            i.children.length ? `<ul>${items(i.children)}</ul>` : ""
          }</li>`,
      )
      .join("");
  return `<article class="plan">
    <p><b>Premise</b> ${escapeHtml(plan.premise)}</p>
    <p><b>Setting</b> ${escapeHtml(plan.setting)}</p>
    <ul class="characters">${plan.characters
      .map((c) => `<li><b>${escapeHtml(c.name)}</b> ${escapeHtml(c.description)}</li>`)
      .join("")}</ul>
    <ul class="outline">${items(plan.outline)}</ul>
  </article>`;
}

export function renderTextSubject(state: SessionState): string {
  const subject = state.subject as StoryText;
  const segments = segmentBody(subject.body, revisedSpans(state));
  const html = segments
    .map((s) => (s.highlighted ? `<mark>${escapeHtml(s.text)}</mark>` : escapeHtml(s.text)))
    .join("");
  return `<article class="text-body">${html}</article>`;
}
