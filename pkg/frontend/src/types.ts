// Wire types mirroring the workshop service's JSON bodies.

export interface IssueArea {
  label: string;
  keywords: string[];
}

export interface StepView {
  id: string;
  kind: string;
  phase: string;
  round_index: number;
  state: string;
  deadline: number | null;
  expired: boolean;
}

export interface ParticipantView {
  alias: string;
  role: string;
  group_label: string | null;
}

export interface WorkshopSnapshot {
  id: string;
  title: string;
  phase: string;
  current_step: string | null;
  open_step: StepView | null;
  steps: StepView[];
  participants: ParticipantView[];
  issue_areas: IssueArea[];
  criteria: string[];
  active_count: number;
  raw_count: number;
  round_count: number;
  chat_seq: number;
  final_items: string[] | null;
  top_k: number;
  rating_scale_max: number;
  guard_warnings: Record<string, unknown>[] | null;
}

export interface ItemView {
  id: string;
  text: string;
  status: string;
  area: string | null;
  merged_from: string[];
}

export interface RoundView {
  index: number;
  item_ids: string[];
  mean_ratings: Record<string, number>;
  borda: Record<string, number>;
  cutoff_scores: Record<string, number>;
  eliminated: string[];
  ratings_submitted: number;
  rankings_submitted: number;
  low_discrimination: boolean;
  convergence: ConvergenceReport | null;
}

export interface ConvergenceReport {
  round_index: number;
  kendall_w: number;
  eliminated_fraction: number;
  decision: "Converged" | "Iterate" | "BudgetStop";
  stagnant: boolean;
}

export interface ChatMessage {
  seq: number;
  alias: string;
  text: string;
  at: number;
}

export interface WorkshopEvent {
  seq: number;
  kind: string;
  at: number;
  actor: string | null;
  payload: Record<string, unknown>;
}

export interface JoinResponse {
  alias: string;
  token: string;
  role: string;
}

export interface StepResult {
  step_id: string;
  kind: string;
  round_index: number;
  reason: string;
  result: Record<string, unknown>;
}

export interface GateResponse {
  decision: "Converged" | "Iterate" | "BudgetStop";
  report: ConvergenceReport;
  final_items: string[] | null;
}

export interface MergeSuggestion {
  members: string[];
  heading: string;
  area: string;
}

export interface MergeGroup {
  members: string[];
  heading: string;
  area: string | null;
}

export interface AgendaDocument {
  agenda: Record<string, unknown>;
  issue_areas: (IssueArea | string)[];
}
