// Form-level enforcement and local draft persistence.
//
// The station blocks out-of-scale ratings and over-long ballots before
// they ever reach the wire, mirroring the service's OutOfScale and TooMany
// rules; drafts autosave to the provided storage and are submitted
// explicitly.

export interface DraftStorage {
  get(key: string): string | null;
  set(key: string, value: string): void;
  remove(key: string): void;
}

export class MemoryStorage implements DraftStorage {
  private data = new Map<string, string>();
  get(key: string): string | null {
    return this.data.get(key) ?? null;
  }
  set(key: string, value: string): void {
    this.data.set(key, value);
  }
  remove(key: string): void {
    this.data.delete(key);
  }
}

export class RatingDraft {
  private ratings: Record<string, number> = {};

  constructor(
    public readonly scaleMax: number,
    private readonly storage: DraftStorage = new MemoryStorage(),
    private readonly key = "rating-draft",
  ) {
    const saved = storage.get(key);
    if (saved) {
      try {
        this.ratings = JSON.parse(saved) as Record<string, number>;
      } catch {
        this.ratings = {};
      }
    }
  }

  /** Returns false (and stores nothing) when the value is out of scale. */
  set(item: string, value: number): boolean {
    if (!Number.isInteger(value) || value < 0 || value > this.scaleMax) {
      return false;
    }
    this.ratings[item] = value;
    this.persist();
    return true;
  }

  remove(item: string): void {
    delete this.ratings[item];
    this.persist();
  }

  get(item: string): number | undefined {
    return this.ratings[item];
  }

  values(): Record<string, number> {
    return { ...this.ratings };
  }

  size(): number {
    return Object.keys(this.ratings).length;
  }

  clear(): void {
    this.ratings = {};
    this.storage.remove(this.key);
  }

  private persist(): void {
    this.storage.set(this.key, JSON.stringify(this.ratings));
  }
}

export class RankingDraft {
  private ordered: string[] = [];

  constructor(
    public readonly topK: number,
    private readonly storage: DraftStorage = new MemoryStorage(),
    private readonly key = "ranking-draft",
  ) {
    const saved = storage.get(key);
    if (saved) {
      try {
        this.ordered = JSON.parse(saved) as string[];
      } catch {
        this.ordered = [];
      }
    }
  }

  /** Returns false when the ballot is full or the item already ranked. */
  add(item: string): boolean {
    if (this.ordered.length >= this.topK) return false;
    if (this.ordered.includes(item)) return false;
    this.ordered.push(item);
    this.persist();
    return true;
  }

  remove(item: string): void {
    this.ordered = this.ordered.filter((i) => i !== item);
    this.persist();
  }

  moveUp(item: string): void {
    const idx = this.ordered.indexOf(item);
    if (idx > 0) {
      [this.ordered[idx - 1], this.ordered[idx]] = [this.ordered[idx], this.ordered[idx - 1]];
      this.persist();
    }
  }

  moveDown(item: string): void {
    const idx = this.ordered.indexOf(item);
    if (idx >= 0 && idx < this.ordered.length - 1) {
      [this.ordered[idx + 1], this.ordered[idx]] = [this.ordered[idx], this.ordered[idx + 1]];
      this.persist();
    }
  }

  items(): string[] {
    return [...this.ordered];
  }

  isFull(): boolean {
    return this.ordered.length >= this.topK;
  }

  remaining(): number {
    return this.topK - this.ordered.length;
  }

  clear(): void {
    this.ordered = [];
    this.storage.remove(this.key);
  }

  private persist(): void {
    this.storage.set(this.key, JSON.stringify(this.ordered));
  }
}

/** 0..5 self-assessment selector guard. */
export function validKnowledgeGain(value: number): boolean {
  return Number.isInteger(value) && value >= 0 && value <= 5;
}

/** Idea and chat composer guards, mirroring the service's text caps. */
export function validIdeaText(text: string): boolean {
  const cleaned = text.trim();
  return cleaned.length > 0 && cleaned.length <= 2000;
}

export function validChatText(text: string): boolean {
  const cleaned = text.trim();
  return cleaned.length > 0 && cleaned.length <= 1000;
}
