// Browser entry point: wires the API client, poller and views together.

import { ApiClient, ApiError, pollSession, type PollerHandle } from "./api.js";
import type { Critique, LeaderDecision, PlanRound, SessionState, TextRound } from "./types.js";
import {
  renderCritiquePanel,
  renderLeaderConsole,
  renderMarksView,
  renderPlanRoundDiff,
  renderPlanSubject,
  renderSessionBoard,
  renderTextRoundDiff,
  renderTextSubject,
} from "./views.js";

const client = new ApiClient("");

let currentState: SessionState | null = null;
let poller: PollerHandle | null = null;
// Drafts survive re-renders and failed submits.
const critiqueDraft = { criterion_id: "originality", question: "", rationale: "" };

function byId(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

function showError(message: string): void {
  byId("error-bar").textContent = message;
}

function clearError(): void {
  byId("error-bar").textContent = "";
}

async function refreshBoard(): Promise<void> {
  const sessions = await client.listSessions();
  byId("board").innerHTML = renderSessionBoard(sessions);
  for (const link of document.querySelectorAll<HTMLAnchorElement>(".open-session")) {
    link.addEventListener("click", (ev) => {
      ev.preventDefault();
      void openSession(link.dataset.sessionId ?? "");
    });
  }
}

function renderSession(state: SessionState): void {
  currentState = state;
  byId("session-title").textContent = `${state.stage} session ${state.id.slice(0, 8)} — ${state.status} (v${state.version})`;
  byId("subject").innerHTML =
    state.stage === "plan" ? renderPlanSubject(state.subject as never) : renderTextSubject(state);
  byId("diffs").innerHTML = state.rounds
    .map((r) =>
      state.stage === "plan" ? renderPlanRoundDiff(r as PlanRound) : renderTextRoundDiff(r as TextRound),
    )
    .join("");
  byId("critiques").innerHTML = renderCritiquePanel(state);
  byId("leader").innerHTML = renderLeaderConsole(state);
  byId("marks").innerHTML = renderMarksView(state, null);
  restoreCritiqueDraft();
  wireSessionForms();
  void refreshBoard();
}

function restoreCritiqueDraft(): void {
  const form = document.getElementById("critique-form") as HTMLFormElement | null;
  if (!form) return;
  (form.elements.namedItem("criterion_id") as HTMLInputElement).value = critiqueDraft.criterion_id;
  (form.elements.namedItem("question") as HTMLTextAreaElement).value = critiqueDraft.question;
  (form.elements.namedItem("rationale") as HTMLTextAreaElement).value = critiqueDraft.rationale;
}

function wireSessionForms(): void {
  const state = currentState;
  if (!state) return;

  const critiqueForm = document.getElementById("critique-form") as HTMLFormElement | null;
  critiqueForm?.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const data = new FormData(critiqueForm);
    critiqueDraft.criterion_id = String(data.get("criterion_id") ?? "originality");
    critiqueDraft.question = String(data.get("question") ?? "");
    critiqueDraft.rationale = String(data.get("rationale") ?? "");
    const critique: Critique = {
      criterion_id: critiqueDraft.criterion_id,
      question: critiqueDraft.question,
      rationale: critiqueDraft.rationale,
      author_kind: "human",
      author_name: "writer",
      candidates_considered: [],
    };
    const round = Number(critiqueForm.dataset.round);
    client
      .submitCritique(state.id, round, critique, state.version)
      .then((next) => {
        critiqueDraft.question = "";
        critiqueDraft.rationale = "";
        clearError();
        renderSession(next);
      })
      .catch((err) => showError(describe(err)));
  });

  const leaderForm = document.getElementById("leader-form") as HTMLFormElement | null;
  leaderForm?.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const data = new FormData(leaderForm);
    const decision: LeaderDecision = {
      chosen_index: Number(data.get("chosen_index") ?? 0),
      justification: String(data.get("justification") ?? ""),
      author_kind: "human",
    };
    const round = Number(leaderForm.dataset.round);
    submitDecisionWithRetry(state.id, round, decision, state.version);
  });

  for (const button of document.querySelectorAll<HTMLButtonElement>(".save-mark")) {
    button.addEventListener("click", () => {
      const round = Number(button.dataset.round);
      const edited =
        document.querySelector<HTMLInputElement>(`input[name="edited-${round}"]:checked`)?.value ?? "pass";
      const accepted =
        document.querySelector<HTMLInputElement>(`input[name="accepted-${round}"]:checked`)?.value ??
        "unmarked";
      client
        .markRound(state.id, { round, edited: edited as "pass" | "fail", accepted: accepted as never })
        .then((next) => {
          clearError();
          renderSession(next);
        })
        .catch((err) => showError(describe(err)));
    });
  }

  byId("advance-btn").onclick = () => {
    client
      .advance(state.id, state.version)
      .then((next) => {
        clearError();
        renderSession(next);
      })
      .catch((err) => showError(describe(err)));
  };
}

// On a version conflict, fetch the fresh state and retry once against it.
function submitDecisionWithRetry(id: string, round: number, decision: LeaderDecision, version: number): void {
  client
    .submitLeaderDecision(id, round, decision, version)
    .then((next) => {
      clearError();
      renderSession(next);
    })
    .catch(async (err) => {
      if (err instanceof ApiError && err.detail === "Conflict") {
        const fresh = await client.getState(id);
        if (fresh && fresh.status === "awaiting_leader") {
          client
            .submitLeaderDecision(id, round, decision, fresh.version)
            .then((next) => {
              clearError();
              renderSession(next);
            })
            .catch((e2) => showError(describe(e2)));
          return;
        }
        if (fresh) renderSession(fresh);
        return;
      }
      showError(describe(err));
    });
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return `${err.detail || err.code}: ${err.message}`;
  return String(err);
}

async function openSession(id: string): Promise<void> {
  poller?.stop();
  const state = await client.getState(id);
  if (state) renderSession(state);
  poller = pollSession(client, id, renderSession, { onError: (err) => showError(describe(err)) });
  byId("session-view").hidden = false;
}

function wireCreateForm(): void {
  const form = byId("create-form") as HTMLFormElement;
  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const data = new FormData(form);
    client
      .createSession({
        stage: (data.get("stage") as "plan" | "text") ?? "plan",
        subject: String(data.get("subject") ?? ""),
        human_leader: data.get("human_leader") === "on",
        label: String(data.get("label") ?? ""),
        config: { rounds: Number(data.get("rounds") ?? 3) },
      })
      .then((state) => {
        clearError();
        void openSession(state.id);
      })
      .catch((err) => showError(describe(err)));
  });
}

export function start(): void {
  wireCreateForm();
  void refreshBoard();
  byId("export-btn").onclick = () => {
    if (!currentState) return;
    client
      .exportText(currentState.id)
      .then((text) => {
        byId("export-output").textContent = text;
        clearError();
      })
      .catch((err) => showError(describe(err)));
  };
}

if (typeof document !== "undefined" && document.readyState !== "loading") {
  start();
} else if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", start);
}
