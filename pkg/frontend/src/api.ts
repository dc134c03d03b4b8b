// Typed fetch client for the workshop service. Every failure becomes an
// ApiError carrying the service's error name verbatim.

import type {
  AgendaDocument,
  ChatMessage,
  GateResponse,
  ItemView,
  JoinResponse,
  MergeGroup,
  MergeSuggestion,
  RoundView,
  StepResult,
  WorkshopSnapshot,
} from "./types.js";

export const TOKEN_HEADER = "X-Session-Token";

export class ApiError extends Error {
  readonly error: string;
  readonly detail: string;
  readonly status: number;

  constructor(error: string, detail: string, status: number) {
    super(detail ? `${error}: ${detail}` : error);
    this.error = error;
    this.detail = detail;
    this.status = status;
  }
}

export class WorkshopApi {
  constructor(
    public readonly baseUrl: string,
    public token: string | null = null,
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    params?: Record<string, string>,
  ): Promise<T> {
    const url = new URL(this.baseUrl + path);
    for (const [key, value] of Object.entries(params ?? {})) {
      url.searchParams.set(key, value);
    }
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (this.token) headers[TOKEN_HEADER] = this.token;
    const response = await fetch(url, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    if (!response.ok) {
      let error = "HTTPError";
      let detail = text;
      try {
        const parsed = JSON.parse(text) as { error?: string; detail?: string };
        error = parsed.error ?? error;
        detail = parsed.detail ?? "";
      } catch {
        // non-JSON error body, keep raw text as detail
      }
      throw new ApiError(error, detail, response.status);
    }
    const contentType = response.headers.get("content-type") ?? "";
    if (contentType.includes("application/json")) {
      return JSON.parse(text) as T;
    }
    return text as unknown as T;
  }

  /** GET returning the raw body bytes as text (export documents). */
  private async requestRaw(path: string, params?: Record<string, string>): Promise<string> {
    const url = new URL(this.baseUrl + path);
    for (const [key, value] of Object.entries(params ?? {})) {
      url.searchParams.set(key, value);
    }
    const headers: Record<string, string> = {};
    if (this.token) headers[TOKEN_HEADER] = this.token;
    const response = await fetch(url, { headers });
    const text = await response.text();
    if (!response.ok) {
      try {
        const parsed = JSON.parse(text) as { error?: string; detail?: string };
        throw new ApiError(parsed.error ?? "HTTPError", parsed.detail ?? "", response.status);
      } catch (error) {
        if (error instanceof ApiError) throw error;
        throw new ApiError("HTTPError", text, response.status);
      }
    }
    return text;
  }

  createWorkshop(
    title: string,
    document: AgendaDocument,
    deterministicSeed?: number,
  ): Promise<WorkshopSnapshot> {
    return this.request("POST", "/workshops", {
      title,
      agenda: document.agenda,
      issue_areas: document.issue_areas,
      deterministic_seed: deterministicSeed ?? null,
    });
  }

  getWorkshop(id: string): Promise<WorkshopSnapshot> {
    return this.request("GET", `/workshops/${id}`);
  }

  join(id: string, role: string, groupLabel?: string): Promise<JoinResponse> {
    return this.request("POST", `/workshops/${id}/participants`, {
      role,
      group_label: groupLabel ?? null,
    });
  }

  advancePhase(id: string): Promise<{ phase: string }> {
    return this.request("POST", `/workshops/${id}/phase/advance`);
  }

  openStep(id: string, kind: string): Promise<Record<string, unknown>> {
    return this.request("POST", `/workshops/${id}/steps/open`, { kind });
  }

  closeStep(id: string): Promise<StepResult> {
    return this.request("POST", `/workshops/${id}/steps/close`);
  }

  mergeSuggestions(id: string, threshold?: number): Promise<MergeSuggestion[]> {
    const params: Record<string, string> = {};
    if (threshold !== undefined) params.threshold = String(threshold);
    return this.request("GET", `/workshops/${id}/merge-suggestions`, undefined, params);
  }

  applyMergePlan(
    id: string,
    groups: MergeGroup[],
    singletonAreas: Record<string, string> = {},
  ): Promise<Record<string, unknown>> {
    return this.request("POST", `/workshops/${id}/merge-plan`, {
      groups,
      singleton_areas: singletonAreas,
    });
  }

  cutoff(id: string, n: number): Promise<StepResult> {
    return this.request("POST", `/workshops/${id}/cutoff`, { n });
  }

  gate(id: string): Promise<GateResponse> {
    return this.request("POST", `/workshops/${id}/gate`);
  }

  submitIdeas(id: string, texts: string[]): Promise<{ statement_ids: string[]; rejected: number }> {
    return this.request("POST", `/workshops/${id}/ideas`, { texts });
  }

  submitRatings(
    id: string,
    ratings: Record<string, number>,
    criterion?: string,
  ): Promise<{ status: string }> {
    return this.request("POST", `/workshops/${id}/ratings`, {
      ratings,
      criterion: criterion ?? null,
    });
  }

  submitRanking(id: string, items: string[]): Promise<{ status: string }> {
    return this.request("POST", `/workshops/${id}/ranking`, { items });
  }

  postChat(id: string, text: string): Promise<ChatMessage> {
    return this.request("POST", `/workshops/${id}/chat`, { text });
  }

  selfAssess(id: string, knowledgeGain: number, comment?: string): Promise<{ status: string }> {
    return this.request("POST", `/workshops/${id}/self-assessment`, {
      knowledge_gain: knowledgeGain,
      comment: comment ?? null,
    });
  }

  addScenarioNode(
    id: string,
    kind: string,
    text: string,
    parent?: string,
  ): Promise<{ node: Record<string, unknown>; guard_warning: Record<string, unknown> | null }> {
    return this.request("POST", `/workshops/${id}/scenario-nodes`, {
      kind,
      text,
      parent: parent ?? null,
    });
  }

  composeScenarios(
    id: string,
    selections: { label: string; visions: string[]; narrative?: string }[],
    target?: number,
  ): Promise<Record<string, unknown>> {
    return this.request("POST", `/workshops/${id}/scenarios/compose`, {
      selections,
      target: target ?? null,
    });
  }

  items(id: string, status = "Active"): Promise<ItemView[]> {
    return this.request("GET", `/workshops/${id}/items`, undefined, { status });
  }

  round(id: string, index: number): Promise<RoundView> {
    return this.request("GET", `/workshops/${id}/rounds/${index}`);
  }

  chat(id: string, fromSeq = 0): Promise<ChatMessage[]> {
    return this.request("GET", `/workshops/${id}/chat`, undefined, { from_seq: String(fromSeq) });
  }

  exportDocument(id: string, format: string, disclose = false): Promise<string> {
    return this.requestRaw(`/workshops/${id}/export`, {
      format,
      disclose: disclose ? "true" : "false",
    });
  }

  agenda(id: string): Promise<AgendaDocument> {
    return this.request("GET", `/workshops/${id}/agenda`);
  }

  replayVerify(id: string): Promise<{ match: boolean; live_hash: string; replay_hash: string }> {
    return this.request("GET", `/workshops/${id}/replay-verify`);
  }
}

/** The canonical run plan: idea pooling, merge, rate, rank, cut, chat, gate. */
export function defaultAgendaDocument(options?: {
  topK?: number;
  ratingScaleMax?: number;
  wMin?: number;
  maxRounds?: number;
  criteria?: string[];
  issueAreas?: (string | { label: string; keywords: string[] })[];
}): AgendaDocument {
  const critique = [
    { kind: "IdeaEntry", time_limit: null, params: {} },
    { kind: "Merge", time_limit: null, params: {} },
    { kind: "Rating", time_limit: null, params: {} },
    { kind: "Ranking", time_limit: null, params: {} },
    { kind: "CutOff", time_limit: null, params: {} },
    { kind: "SelfAssessment", time_limit: null, params: {} },
    { kind: "Chat", time_limit: null, params: {} },
    { kind: "SelfAssessment", time_limit: null, params: {} },
    { kind: "DelphiGate", time_limit: null, params: {} },
  ];
  return {
    agenda: {
      phases: [
        { phase: "Preparation", steps: [] },
        { phase: "Critique", steps: critique },
        {
          phase: "Fantasy",
          steps: [
            { kind: "TreeBuild", time_limit: null, params: {} },
            { kind: "Chat", time_limit: null, params: {} },
          ],
        },
        {
          phase: "Implementation",
          steps: [
            { kind: "TreeBuild", time_limit: null, params: {} },
            { kind: "ScenarioCompose", time_limit: null, params: {} },
          ],
        },
      ],
      top_k: options?.topK ?? 10,
      rating_scale_max: options?.ratingScaleMax ?? 5,
      convergence: {
        w_min: options?.wMin ?? 0.6,
        max_rounds: options?.maxRounds ?? 2,
        min_elimination_fraction: 0.1,
      },
      criteria: options?.criteria ?? [],
      guard: { max_nodes_per_vision: 40, max_total_nodes: 200 },
      cutoff_basis: "borda",
      cutoff_n: null,
      zero_support_elimination: true,
      compose_min: 2,
      compose_max: 3,
    },
    issue_areas: options?.issueAreas ?? ["Economic"],
  };
}
