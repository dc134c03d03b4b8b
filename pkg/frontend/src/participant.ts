// Participant station: join, keep a view in sync, and push submissions
// through the draft guards.

import { WorkshopApi } from "./api.js";
import { MemoryStorage, RankingDraft, RatingDraft, validChatText, validIdeaText, validKnowledgeGain } from "./forms.js";
import type { DraftStorage } from "./forms.js";
import { applyChatBacklog, applyEvent, applyItems, applySnapshot, initialView } from "./state.js";
import type { SessionView } from "./state.js";
import type { WorkshopEvent } from "./types.js";

export class ParticipantStation {
  view: SessionView;
  rating: RatingDraft;
  ranking: RankingDraft;

  constructor(
    public readonly api: WorkshopApi,
    public readonly workshopId: string,
    private readonly storage: DraftStorage = new MemoryStorage(),
  ) {
    this.view = initialView(workshopId);
    this.rating = new RatingDraft(5, storage, `${workshopId}:rating`);
    this.ranking = new RankingDraft(10, storage, `${workshopId}:ranking`);
  }

  async join(groupLabel?: string): Promise<string> {
    const joined = await this.api.join(this.workshopId, "Stakeholder", groupLabel);
    this.api.token = joined.token;
    this.view = { ...this.view, alias: joined.alias, role: joined.role };
    await this.refresh();
    return joined.alias;
  }

  /** Re-read the authoritative snapshot, items, and chat tail. */
  async refresh(): Promise<SessionView> {
    const snapshot = await this.api.getWorkshop(this.workshopId);
    this.view = applySnapshot(this.view, snapshot);
    this.view = applyItems(this.view, await this.api.items(this.workshopId));
    const lastSeen = this.view.chat.length ? this.view.chat[this.view.chat.length - 1].seq : 0;
    this.view = applyChatBacklog(this.view, await this.api.chat(this.workshopId, lastSeen));
    this.rating = new RatingDraft(snapshot.rating_scale_max, this.storage, `${this.workshopId}:rating`);
    this.ranking = new RankingDraft(snapshot.top_k, this.storage, `${this.workshopId}:ranking`);
    return this.view;
  }

  onEvent(event: WorkshopEvent): SessionView {
    this.view = applyEvent(this.view, event);
    return this.view;
  }

  async submitIdeas(raw: string): Promise<{ accepted: number; rejected: number }> {
    const texts = raw
      .split("\n")
      .map((line) => line.trim())
      .filter((line) => line.length > 0);
    if (!texts.length || !texts.every(validIdeaText)) {
      throw new Error("ideas must be non-empty and at most 2000 characters each");
    }
    const out = await this.api.submitIdeas(this.workshopId, texts);
    return { accepted: out.statement_ids.length, rejected: out.rejected };
  }

  /** Rejected values never leave the form; returns whether the tap landed. */
  rate(item: string, value: number): boolean {
    return this.rating.set(item, value);
  }

  pick(item: string): boolean {
    return this.ranking.add(item);
  }

  async submitRatings(criterion?: string): Promise<void> {
    await this.api.submitRatings(this.workshopId, this.rating.values(), criterion);
    this.rating.clear();
  }

  async submitRanking(): Promise<void> {
    await this.api.submitRanking(this.workshopId, this.ranking.items());
    this.ranking.clear();
  }

  async postChat(text: string): Promise<void> {
    if (!validChatText(text)) {
      throw new Error("chat messages must be non-empty and at most 1000 characters");
    }
    await this.api.postChat(this.workshopId, text);
  }

  async selfAssess(value: number, comment?: string): Promise<void> {
    if (!validKnowledgeGain(value)) {
      throw new Error("knowledge gain must be an integer from 0 to 5");
    }
    await this.api.selfAssess(this.workshopId, value, comment);
  }

  async addVision(text: string): Promise<void> {
    await this.api.addScenarioNode(this.workshopId, "Vision", text);
  }
}
