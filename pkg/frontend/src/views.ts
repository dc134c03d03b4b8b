// HTML renderers for both stations. Pure string builders so they are
// testable without a DOM. Participants appear exclusively as aliases;
// tokens never reach any renderer.

import type { RankingDraft, RatingDraft } from "./forms.js";
import type { SessionView } from "./state.js";
import type { ConvergenceReport, MergeSuggestion } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

/** Human countdown to a deadline (ms epoch); "expired" once passed. */
export function formatRemaining(deadlineMs: number, nowMs: number): string {
  const left = Math.floor((deadlineMs - nowMs) / 1000);
  if (left <= 0) return "expired";
  const minutes = Math.floor(left / 60);
  const seconds = left % 60;
  return minutes > 0 ? `${minutes}m ${seconds.toString().padStart(2, "0")}s left` : `${seconds}s left`;
}

export function renderHeader(view: SessionView, nowMs?: number): string {
  const step = view.openStep
    ? `${escapeHtml(view.openStep.kind)} open`
    : "no step open";
  const deadline =
    view.openStep?.deadline != null
      ? `<span class="deadline" data-deadline="${view.openStep.deadline}">${formatRemaining(
          view.openStep.deadline,
          nowMs ?? Date.now(),
        )}</span>`
      : "";
  const me = view.alias ? `you are <strong>${escapeHtml(view.alias)}</strong>` : "not joined";
  return `<header><h1>${escapeHtml(view.workshopId)}</h1>
<p>${escapeHtml(view.phase)} phase, ${step} ${deadline}</p>
<p>${me}</p></header>`;
}

export function renderParticipants(view: SessionView): string {
  const rows = view.participants
    .map((p) => `<li>${escapeHtml(p.alias)} (${escapeHtml(p.role)})</li>`)
    .join("");
  return `<ul class="participants">${rows}</ul>`;
}

export function renderItems(view: SessionView): string {
  const rows = view.items
    .map((item) => `<li data-item="${escapeHtml(item.id)}">${escapeHtml(item.text)}</li>`)
    .join("");
  return `<ol class="items">${rows}</ol>`;
}

export function renderChat(view: SessionView): string {
  const rows = view.chat
    .map(
      (m) =>
        `<li><span class="who">${escapeHtml(m.alias)}</span> <span class="said">${escapeHtml(m.text)}</span></li>`,
    )
    .join("");
  return `<ul class="chat">${rows}</ul>`;
}

export function renderIdeaComposer(): string {
  return `<form class="idea-composer">
<textarea name="ideas" rows="6" maxlength="2000" placeholder="one idea per line"></textarea>
<button type="submit">Submit ideas</button>
</form>`;
}

export function renderRatingForm(view: SessionView, draft: RatingDraft): string {
  const rows = view.items
    .map((item) => {
      const current = draft.get(item.id);
      const buttons = Array.from({ length: view.ratingScaleMax + 1 }, (_, value) => {
        const active = current === value ? " active" : "";
        return `<button type="button" class="rate${active}" data-item="${escapeHtml(item.id)}" data-value="${value}">${value}</button>`;
      }).join("");
      return `<li>${escapeHtml(item.text)} <span class="scale" data-max="${view.ratingScaleMax}">${buttons}</span></li>`;
    })
    .join("");
  return `<form class="rating-form"><ol>${rows}</ol>
<button type="submit">Submit ratings</button></form>`;
}

export function renderRankingForm(view: SessionView, draft: RankingDraft): string {
  const chosen = draft.items();
  const ranked = chosen
    .map(
      (id, index) =>
        `<li>#${index + 1} <span data-item="${escapeHtml(id)}">${escapeHtml(labelOf(view, id))}</span>
<button type="button" class="unrank" data-item="${escapeHtml(id)}">remove</button></li>`,
    )
    .join("");
  const pool = view.items
    .filter((item) => !chosen.includes(item.id))
    .map((item) => {
      const disabled = draft.isFull() ? " disabled" : "";
      return `<li>${escapeHtml(item.text)} <button type="button" class="pick" data-item="${escapeHtml(item.id)}"${disabled}>rank</button></li>`;
    })
    .join("");
  return `<form class="ranking-form">
<p class="capacity">${draft.remaining()} of ${draft.topK} slots left</p>
<ol class="ballot">${ranked}</ol>
<ul class="pool">${pool}</ul>
<button type="submit">Submit ranking</button></form>`;
}

export function renderSelfAssessment(): string {
  const buttons = Array.from(
    { length: 6 },
    (_, value) => `<button type="button" class="gain" data-value="${value}">${value}</button>`,
  ).join("");
  return `<form class="self-assessment">
<p>How much did this exchange add to your picture?</p>
${buttons}
<button type="submit">Submit</button></form>`;
}

export function renderChatComposer(): string {
  return `<form class="chat-composer">
<input name="message" maxlength="1000" placeholder="say something" />
<button type="submit">Send</button></form>`;
}

export function renderClosedResults(view: SessionView): string {
  if (!view.lastStepResult) return `<p class="results">Waiting for the next step.</p>`;
  const { kind, result } = view.lastStepResult;
  const entries = Object.entries(result)
    .filter(([, v]) => typeof v === "number" || typeof v === "boolean")
    .map(([k, v]) => `<li>${escapeHtml(k)}: ${String(v)}</li>`)
    .join("");
  return `<section class="results"><h2>${escapeHtml(kind)} closed</h2><ul>${entries}</ul></section>`;
}

export function renderStepPanel(
  view: SessionView,
  drafts: { rating: RatingDraft; ranking: RankingDraft },
): string {
  if (!view.openStep) return renderClosedResults(view);
  switch (view.openStep.kind) {
    case "IdeaEntry":
      return renderIdeaComposer();
    case "Rating":
      return renderRatingForm(view, drafts.rating);
    case "Ranking":
      return renderRankingForm(view, drafts.ranking);
    case "Chat":
      return renderChat(view) + renderChatComposer();
    case "SelfAssessment":
      return renderSelfAssessment();
    default:
      return `<p class="waiting">${escapeHtml(view.openStep.kind)} is running; nothing to enter here.</p>`;
  }
}

// ---- facilitator console ----

export function renderMergeReview(suggestions: MergeSuggestion[]): string {
  const rows = suggestions
    .map((s, index) => {
      const members = s.members.map((m) => `<code>${escapeHtml(m)}</code>`).join(" ");
      return `<li data-cluster="${index}">
<input name="heading-${index}" value="${escapeHtml(s.heading)}" />
<select name="area-${index}"><option selected>${escapeHtml(s.area)}</option></select>
${members}
<label><input type="checkbox" name="accept-${index}" checked /> accept</label></li>`;
    })
    .join("");
  return `<form class="merge-review"><ol>${rows}</ol>
<button type="submit">Apply merge plan</button></form>`;
}

export function renderGatePanel(report: ConvergenceReport, maxRounds: number): string {
  const w = report.kendall_w.toFixed(3);
  const fraction = (report.eliminated_fraction * 100).toFixed(1);
  // exactly one action is consistent with the decision table; offer only it
  return `<section class="gate">
<p>W = ${w}, eliminated ${fraction}%, round ${report.round_index + 1} of ${maxRounds}</p>
<button class="gate-action" data-decision="${report.decision}">${report.decision}</button>
</section>`;
}

export function renderGuardWarnings(view: SessionView): string {
  const rows = view.guardWarnings
    .map(
      (w) =>
        `<li>vision ${escapeHtml(String(w["vision_root"]))} at ${String(w["subtree_count"])} nodes (forest ${String(w["total_count"])})</li>`,
    )
    .join("");
  return rows ? `<ul class="guard-warnings">${rows}</ul>` : "";
}

export function renderExportControls(isFacilitator: boolean): string {
  const disclose = isFacilitator
    ? `<label><input type="checkbox" name="disclose" /> include authorship audit</label>`
    : "";
  return `<form class="export">
<select name="format">
<option>full-record</option><option>ratings-csv</option>
<option>chat-log</option><option>scenario-outline</option>
</select>
${disclose}
<button type="submit">Export</button></form>`;
}

function labelOf(view: SessionView, itemId: string): string {
  return view.items.find((i) => i.id === itemId)?.text ?? itemId;
}
