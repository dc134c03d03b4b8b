import assert from "node:assert/strict";
import { test } from "node:test";

import {
  MemoryStorage,
  RankingDraft,
  RatingDraft,
  validChatText,
  validIdeaText,
  validKnowledgeGain,
} from "../src/forms.js";

test("rating draft accepts the whole scale and nothing beyond", () => {
  const draft = new RatingDraft(5);
  assert.equal(draft.set("i1", 0), true);
  assert.equal(draft.set("i1", 5), true);
  assert.equal(draft.set("i1", 6), false, "6 must be rejected in the form");
  assert.equal(draft.set("i1", -1), false);
  assert.equal(draft.set("i1", 3.5), false, "non-integers never reach the wire");
  assert.deepEqual(draft.values(), { i1: 5 });
});

test("rating draft autosaves and restores", () => {
  const storage = new MemoryStorage();
  const draft = new RatingDraft(5, storage, "w1:rating");
  draft.set("i1", 4);
  draft.set("i2", 2);
  const restored = new RatingDraft(5, storage, "w1:rating");
  assert.deepEqual(restored.values(), { i1: 4, i2: 2 });
  restored.clear();
  assert.deepEqual(new RatingDraft(5, storage, "w1:rating").values(), {});
});

test("ranking draft blocks the eleventh selection at top_k ten", () => {
  const draft = new RankingDraft(10);
  for (let i = 1; i <= 10; i++) {
    assert.equal(draft.add(`i${i}`), true);
  }
  assert.equal(draft.isFull(), true);
  assert.equal(draft.add("i11"), false, "the 11th pick is blocked in-form");
  assert.equal(draft.items().length, 10);
});

test("ranking draft rejects duplicates and keeps order", () => {
  const draft = new RankingDraft(5);
  draft.add("a");
  draft.add("b");
  assert.equal(draft.add("a"), false);
  draft.add("c");
  assert.deepEqual(draft.items(), ["a", "b", "c"]);
  draft.moveUp("c");
  assert.deepEqual(draft.items(), ["a", "c", "b"]);
  draft.moveDown("a");
  assert.deepEqual(draft.items(), ["c", "a", "b"]);
  draft.remove("a");
  assert.deepEqual(draft.items(), ["c", "b"]);
});

test("ranking draft autosaves across reloads", () => {
  const storage = new MemoryStorage();
  const draft = new RankingDraft(10, storage, "w1:ranking");
  draft.add("i3");
  draft.add("i1");
  assert.deepEqual(new RankingDraft(10, storage, "w1:ranking").items(), ["i3", "i1"]);
});

test("knowledge gain guard covers 0..5 integers only", () => {
  assert.equal(validKnowledgeGain(0), true);
  assert.equal(validKnowledgeGain(5), true);
  assert.equal(validKnowledgeGain(7), false);
  assert.equal(validKnowledgeGain(-1), false);
  assert.equal(validKnowledgeGain(2.5), false);
});

test("text guards mirror the service caps", () => {
  assert.equal(validIdeaText("a fine idea"), true);
  assert.equal(validIdeaText("   "), false);
  assert.equal(validIdeaText("x".repeat(2000)), true);
  assert.equal(validIdeaText("x".repeat(2001)), false);
  assert.equal(validChatText("x".repeat(1000)), true);
  assert.equal(validChatText("x".repeat(1001)), false);
});
