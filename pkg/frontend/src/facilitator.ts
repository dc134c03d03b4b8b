// Chauffeur console: agenda control, merge review, cut-off, gate, export.

import { WorkshopApi, defaultAgendaDocument } from "./api.js";
import { applyEvent, applyItems, applySnapshot, initialView } from "./state.js";
import type { SessionView } from "./state.js";
import type {
  AgendaDocument,
  GateResponse,
  MergeGroup,
  MergeSuggestion,
  RoundView,
  StepResult,
  WorkshopEvent,
} from "./types.js";

export class FacilitatorConsole {
  view: SessionView;
  workshopId: string;

  constructor(
    public readonly api: WorkshopApi,
    workshopId = "",
  ) {
    this.workshopId = workshopId;
    this.view = initialView(workshopId);
  }

  async createWorkshop(
    title: string,
    document?: AgendaDocument,
    deterministicSeed?: number,
  ): Promise<string> {
    const snapshot = await this.api.createWorkshop(
      title,
      document ?? defaultAgendaDocument(),
      deterministicSeed,
    );
    this.workshopId = snapshot.id;
    this.view = applySnapshot(initialView(snapshot.id), snapshot);
    return snapshot.id;
  }

  async join(): Promise<string> {
    const joined = await this.api.join(this.workshopId, "Facilitator");
    this.api.token = joined.token;
    this.view = { ...this.view, alias: joined.alias, role: joined.role };
    return joined.alias;
  }

  async refresh(): Promise<SessionView> {
    const snapshot = await this.api.getWorkshop(this.workshopId);
    this.view = applySnapshot(this.view, snapshot);
    this.view = applyItems(this.view, await this.api.items(this.workshopId));
    return this.view;
  }

  onEvent(event: WorkshopEvent): SessionView {
    this.view = applyEvent(this.view, event);
    return this.view;
  }

  advancePhase(): Promise<{ phase: string }> {
    return this.api.advancePhase(this.workshopId);
  }

  openStep(kind: string): Promise<Record<string, unknown>> {
    return this.api.openStep(this.workshopId, kind);
  }

  closeStep(): Promise<StepResult> {
    return this.api.closeStep(this.workshopId);
  }

  /** Cluster proposals for the merge review screen; never auto-applied. */
  mergeReview(threshold?: number): Promise<MergeSuggestion[]> {
    return this.api.mergeSuggestions(this.workshopId, threshold);
  }

  /**
   * Apply the reviewed plan. Accepted multi-member suggestions become merge
   * groups; accepted singletons become area pre-assignments.
   */
  async applyReviewedPlan(
    accepted: MergeSuggestion[],
  ): Promise<Record<string, unknown>> {
    const groups: MergeGroup[] = [];
    const singles: Record<string, string> = {};
    for (const suggestion of accepted) {
      if (suggestion.members.length > 1) {
        groups.push({
          members: suggestion.members,
          heading: suggestion.heading,
          area: suggestion.area,
        });
      } else if (suggestion.members.length === 1) {
        singles[suggestion.members[0]] = suggestion.area;
      }
    }
    return this.api.applyMergePlan(this.workshopId, groups, singles);
  }

  cutoff(n: number): Promise<StepResult> {
    return this.api.cutoff(this.workshopId, n);
  }

  /** The last closed round's report, i.e. what the gate screen shows. */
  async gateReport(roundIndex: number): Promise<RoundView> {
    return this.api.round(this.workshopId, roundIndex);
  }

  gate(): Promise<GateResponse> {
    return this.api.gate(this.workshopId);
  }

  exportDocument(format: string, disclose = false): Promise<string> {
    return this.api.exportDocument(this.workshopId, format, disclose);
  }

  replayVerify(): Promise<{ match: boolean }> {
    return this.api.replayVerify(this.workshopId);
  }
}
