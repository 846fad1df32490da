// Drives a real server process (scripted model backend) through a full
// human-led plan session: create, critique, lead three rounds, mark, export.

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { renderLeaderConsole, renderMarksView, renderSessionBoard } from "../src/views.js";
import type { PlanRound, SessionState } from "../src/types.js";

const here = fileURLToPath(new URL(".", import.meta.url));
const repoRoot = resolve(here, "..", "..");
const planText = readFileSync(join(repoRoot, "tests", "fixtures", "package_forest.txt"), "utf-8");

const PERSONA_REPLY = `Here are the experts for your story.
Expert 1.
Profession: // Sociologist //
Feedback Focus: // Community dynamics //
Feedback Focus Details: // How the town's social fabric drives the plot //
Expert 2.
Profession: // Psychologist specializing in emotions //
Feedback Focus: // Emotional arcs //
Feedback Focus Details: // Whether character feelings develop believably //
Expert 3.
Profession: // Futurist //
Feedback Focus: // Speculative setting //
Feedback Focus Details: // The plausibility of imagined futures //
Leader.
Profession: // Senior Editor //
Feedback Focus: // Overall narrative quality //
Feedback Focus Details: // Balancing originality with coherence //
`;

const CRITIQUE_REPLY = `1) What if the forest itself keeps a ledger of every visitor?
2) What if John's map is drawn in a language only the trees can read?
3) What if the journey is narrated by the destination?
Question: What if John's map is drawn in a language only the trees can read?
Why: It weaves an unconventional theme into the navigation itself.
`;

const ROUNDS = 3;

const mockScript = [
  { match: "Create three persona", response: PERSONA_REPLY },
  { match: "seeking three questions", response: CRITIQUE_REPLY, times: 3 * ROUNDS },
  { match: "Critical Feedback", response: planText, times: ROUNDS },
  { match: "story plan excerpts", response: "Too close to call. [[TI]]", times: ROUNDS },
];

const PORT = 8931;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;
let workDir: string;

async function waitForServer(): Promise<void> {
  for (let i = 0; i < 100; i += 1) {
    try {
      const res = await fetch(`${BASE}/sessions`);
      if (res.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 200));
  }
  throw new Error("server did not come up");
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), "writer-ui-e2e-"));
  const scriptPath = join(workDir, "script.json");
  writeFileSync(scriptPath, JSON.stringify(mockScript));
  server = spawn(
    "python3",
    [
      "-m",
      "critics.cli",
      "serve",
      "--host",
      "127.0.0.1",
      "--port",
      String(PORT),
      "--data-dir",
      join(workDir, "sessions"),
      "--mock-script",
      scriptPath,
    ],
    { cwd: repoRoot, stdio: ["ignore", "pipe", "pipe"] },
  );
  await waitForServer();
}, 60_000);

afterAll(() => {
  server?.kill();
  rmSync(workDir, { recursive: true, force: true });
});

describe("full human-led plan session", () => {
  const client = new ApiClient(BASE);

  it("runs three led rounds, marks them and exports the final plan", async () => {
    let state: SessionState = await client.createSession({
      stage: "plan",
      subject: planText,
      human_leader: true,
      label: "e2e",
      config: { rounds: ROUNDS },
    });
    expect(state.status).toBe("awaiting_critiques");

    // Round 1: machine critiques arrive, then the writer adds one of their own.
    state = await client.advance(state.id, state.version);
    expect(state.status).toBe("awaiting_leader");
    expect(state.pending?.critiques).toHaveLength(3);

    state = await client.submitCritique(
      state.id,
      1,
      {
        criterion_id: "structure",
        question: "What if the cash arrives in three installments, one per act?",
        rationale: "It would pace the mystery across the whole outline.",
        author_kind: "human",
        author_name: "writer",
        candidates_considered: [],
      },
      state.version,
    );
    expect(state.pending?.critiques).toHaveLength(4);

    // The leader console offers all four critiques as options.
    const consoleHtml = renderLeaderConsole(state);
    expect(consoleHtml.match(/type="radio"/g)).toHaveLength(4);
    expect(consoleHtml).toContain("three installments");

    for (let round = 1; round <= ROUNDS; round += 1) {
      if (state.status !== "awaiting_leader") {
        state = await client.advance(state.id, state.version);
      }
      expect(state.status).toBe("awaiting_leader");
      const options = state.pending?.critiques ?? [];
      const chosen = round === 1 ? options.length - 1 : 0; // round 1 applies the writer's critique
      state = await client.submitLeaderDecision(
        state.id,
        round,
        { chosen_index: chosen, justification: "leading this round by hand", author_kind: "human" },
        state.version,
      );
      expect(state.status).toBe("refining");
      state = await client.advance(state.id, state.version);
    }

    expect(state.status).toBe("finalized");
    expect(state.rounds).toHaveLength(3);
    const firstRound = state.rounds[0] as PlanRound;
    expect(firstRound.decision.author_kind).toBe("human");
    expect(firstRound.critiques.some((c) => c.author_kind === "human")).toBe(true);

    // Mark every round and read back the stored marks.
    for (const round of [1, 2, 3]) {
      state = await client.markRound(state.id, { round, edited: "pass", accepted: "pass" });
    }
    expect(state.human_marks).toHaveLength(3);
    const marksHtml = renderMarksView(state, await client.metrics());
    expect(marksHtml).toContain('name="accepted-3" value="pass" checked');

    // The UI export matches the server's raw export payload byte for byte.
    const uiExport = await client.exportText(state.id);
    const rawExport = await (await fetch(`${BASE}/sessions/${state.id}/export`)).text();
    expect(uiExport).toBe(rawExport);
    expect(uiExport.startsWith("Premise:")).toBe(true);

    // The board lists the finalized session.
    const board = renderSessionBoard(await client.listSessions());
    expect(board).toContain("status-finalized");
    expect(board).toContain("e2e");
  }, 60_000);

  it("serves the built UI bundle at the root path", async () => {
    const res = await fetch(`${BASE}/`);
    expect(res.status).toBe(200);
    const html = await res.text();
    expect(html).toContain("Collective-critique writing sessions");
  }, 15_000);
});
