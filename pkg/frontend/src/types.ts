// Shapes of the JSON documents exchanged with the session HTTP API.

export type Stage = "plan" | "text";

export type SessionStatus =
  | "awaiting_critiques"
  | "awaiting_leader"
  | "refining"
  | "awaiting_advance"
  | "evaluating"
  | "finalized"
  | "failed";

export interface OutlineItem {
  label: string;
  summary: string;
  scene: string | null;
  characters: string[];
  children: OutlineItem[];
}

export interface StoryPackage {
  premise: string;
  setting: string;
  characters: { name: string; description: string }[];
  outline: OutlineItem[];
}

export interface SentenceSpan {
  start: number;
  end: number;
  ordinal: number;
}

export interface StoryText {
  body: string;
  sentence_index: SentenceSpan[];
}

export interface Critique {
  criterion_id: string;
  question: string;
  rationale: string;
  author_kind: "machine" | "human";
  author_name: string;
  candidates_considered: string[];
}

export interface LeaderDecision {
  chosen_index: number;
  justification: string;
  author_kind: "machine" | "human";
}

export interface RevisionSuggestion {
  criterion_id: "image" | "voice";
  original: string;
  replacement: string;
  reason: string;
}

export interface PlanRound {
  round: number;
  input_plan: StoryPackage;
  critiques: Critique[];
  decision: LeaderDecision;
  refined_plan: StoryPackage;
}

export interface TextRound {
  round: number;
  target: SentenceSpan;
  image: RevisionSuggestion;
  voice: RevisionSuggestion;
  decision: LeaderDecision;
  output: StoryText;
}

export interface HumanMark {
  round: number;
  edited: "pass" | "fail";
  accepted: "pass" | "fail" | "unmarked";
  auto_edited: "pass" | "fail";
}

export interface PendingRound {
  round: number;
  critiques?: Critique[];
  target?: SentenceSpan;
  image?: RevisionSuggestion;
  voice?: RevisionSuggestion;
  decision: LeaderDecision | null;
}

export interface SessionState {
  id: string;
  stage: Stage;
  status: SessionStatus;
  version: number;
  human_leader: boolean;
  label: string;
  subject: StoryPackage | StoryText;
  initial_subject: StoryPackage | StoryText;
  rounds: (PlanRound | TextRound)[];
  pending: PendingRound | null;
  human_marks: HumanMark[];
  selected_index: number | null;
  evaluator_transcript: string;
  revised_ordinals: number[];
  error: string;
  config: { rounds: number; [key: string]: unknown };
}

export interface SessionSummary {
  id: string;
  stage: Stage;
  status: SessionStatus;
  round: number;
  version: number;
  label: string;
}

export interface UserMetrics {
  edited_pass_rate: number;
  accepted_pass_rate: number | string;
  fleiss: number | null;
  n_rounds: number;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  detail: string;
}
