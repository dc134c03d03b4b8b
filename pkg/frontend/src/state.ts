// Client session state: a pure reducer over API snapshots and the event
// stream. Nothing here is authoritative; the server is.

import type {
  ChatMessage,
  ConvergenceReport,
  ItemView,
  StepView,
  WorkshopEvent,
  WorkshopSnapshot,
} from "./types.js";

export interface SessionView {
  workshopId: string;
  alias: string | null;
  role: string | null;
  phase: string;
  openStep: StepView | null;
  topK: number;
  ratingScaleMax: number;
  criteria: string[];
  participants: { alias: string; role: string; group_label: string | null }[];
  items: ItemView[];
  chat: ChatMessage[];
  activeCount: number;
  roundCount: number;
  finalItems: string[] | null;
  guardWarnings: Record<string, unknown>[];
  lastGate: ConvergenceReport | null;
  lastStepResult: { kind: string; result: Record<string, unknown> } | null;
  lastEventSeq: number;
}

export function initialView(workshopId: string): SessionView {
  return {
    workshopId,
    alias: null,
    role: null,
    phase: "Preparation",
    openStep: null,
    topK: 10,
    ratingScaleMax: 5,
    criteria: [],
    participants: [],
    items: [],
    chat: [],
    activeCount: 0,
    roundCount: 0,
    finalItems: null,
    guardWarnings: [],
    lastGate: null,
    lastStepResult: null,
    lastEventSeq: 0,
  };
}

export function applySnapshot(view: SessionView, snapshot: WorkshopSnapshot): SessionView {
  return {
    ...view,
    phase: snapshot.phase,
    openStep: snapshot.open_step,
    topK: snapshot.top_k,
    ratingScaleMax: snapshot.rating_scale_max,
    criteria: snapshot.criteria,
    participants: snapshot.participants,
    activeCount: snapshot.active_count,
    roundCount: snapshot.round_count,
    finalItems: snapshot.final_items,
    guardWarnings: snapshot.guard_warnings ?? view.guardWarnings,
  };
}

export function applyItems(view: SessionView, items: ItemView[]): SessionView {
  return { ...view, items };
}

export function applyChatBacklog(view: SessionView, messages: ChatMessage[]): SessionView {
  const known = new Set(view.chat.map((m) => m.seq));
  const merged = [...view.chat, ...messages.filter((m) => !known.has(m.seq))];
  merged.sort((a, b) => a.seq - b.seq);
  return { ...view, chat: merged };
}

/** Fold one stream event; duplicates (by seq) are ignored. */
export function applyEvent(view: SessionView, event: WorkshopEvent): SessionView {
  if (event.seq <= view.lastEventSeq) return view;
  const next: SessionView = { ...view, lastEventSeq: event.seq };
  const payload = event.payload as Record<string, any>;

  switch (event.kind) {
    case "participant_joined":
      next.participants = [
        ...next.participants,
        { alias: payload.alias, role: payload.role, group_label: payload.group_label ?? null },
      ];
      return next;
    case "phase_advanced":
      next.phase = payload.to_phase;
      next.openStep = null;
      return next;
    case "step_opened":
      next.openStep = {
        id: payload.step_id,
        kind: payload.kind,
        phase: next.phase,
        round_index: payload.round_index,
        state: "Open",
        deadline: payload.deadline ?? null,
        expired: false,
      };
      return next;
    case "step_closed":
      if (next.openStep && next.openStep.id === payload.step_id) {
        next.openStep = null;
      }
      next.lastStepResult = { kind: payload.kind, result: payload.result ?? {} };
      if (payload.kind === "Rating" || payload.kind === "Ranking") {
        next.roundCount = Math.max(next.roundCount, (payload.round_index as number) + 1);
      }
      return next;
    case "chat_message":
      if (!next.chat.some((m) => m.seq === payload.chat_seq)) {
        next.chat = [
          ...next.chat,
          { seq: payload.chat_seq, alias: payload.alias, text: payload.text, at: event.at },
        ];
      }
      return next;
    case "list_updated":
      next.activeCount = (payload.active_items as string[]).length;
      return next;
    case "gate_decision":
      next.lastGate = payload.report as ConvergenceReport;
      if (payload.final_items) next.finalItems = payload.final_items as string[];
      return next;
    case "guard_warning":
      next.guardWarnings = [...next.guardWarnings, payload];
      return next;
    case "ideas_submitted":
    case "merge_plan_applied":
    case "ratings_submitted":
    case "ranking_submitted":
    case "self_assessment_submitted":
    case "scenario_node_added":
    case "scenarios_composed":
    case "workshop_created":
      return next;
    default:
      return next;
  }
}
