// Browser shell: one page, two stations. The left pane is the live
// participant station; facilitators unlock the console pane with their
// token. All state flows from API reads plus the event stream.

import { ApiError, WorkshopApi } from "./api.js";
import { FacilitatorConsole } from "./facilitator.js";
import type { DraftStorage } from "./forms.js";
import { ParticipantStation } from "./participant.js";
import { subscribe } from "./sse.js";
import type { StreamHandle } from "./sse.js";
import {
  formatRemaining,
  renderChat,
  renderExportControls,
  renderGatePanel,
  renderGuardWarnings,
  renderHeader,
  renderItems,
  renderMergeReview,
  renderParticipants,
  renderStepPanel,
} from "./views.js";
import type { MergeSuggestion } from "./types.js";

function localDraftStorage(): DraftStorage {
  return {
    get: (key) => window.localStorage.getItem(key),
    set: (key, value) => window.localStorage.setItem(key, value),
    remove: (key) => window.localStorage.removeItem(key),
  };
}

class App {
  station: ParticipantStation | null = null;
  console: FacilitatorConsole | null = null;
  stream: StreamHandle | null = null;
  suggestions: MergeSuggestion[] = [];
  root: HTMLElement;
  countdown: ReturnType<typeof setInterval> | null = null;

  constructor(root: HTMLElement) {
    this.root = root;
  }

  renderLanding(): void {
    this.root.innerHTML = `
<section class="landing">
  <h1>Workshop floor</h1>
  <form id="join-form">
    <input name="base" placeholder="service url" value="${location.origin}" />
    <input name="workshop" placeholder="workshop id (w1)" required />
    <input name="token" placeholder="facilitator token (optional)" />
    <button type="submit">Enter</button>
  </form>
</section>`;
    const form = document.getElementById("join-form") as HTMLFormElement;
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      const data = new FormData(form);
      void this.enter(
        String(data.get("base")),
        String(data.get("workshop")),
        String(data.get("token") || ""),
      );
    });
  }

  async enter(base: string, workshopId: string, facilitatorToken: string): Promise<void> {
    try {
      if (facilitatorToken) {
        const api = new WorkshopApi(base, facilitatorToken);
        this.console = new FacilitatorConsole(api, workshopId);
        await this.console.refresh();
      } else {
        const api = new WorkshopApi(base);
        this.station = new ParticipantStation(api, workshopId, localDraftStorage());
        await this.station.join();
      }
    } catch (error) {
      this.flashError(error);
      return;
    }
    const fromSeq = 0;
    this.stream = subscribe(base, workshopId, (event) => {
      this.station?.onEvent(event);
      this.console?.onEvent(event);
      if (event.kind === "step_opened" || event.kind === "step_closed" || event.kind === "list_updated") {
        void this.refreshAndRender();
        return;
      }
      this.render();
    }, { fromSeq });
    await this.refreshAndRender();
  }

  async refreshAndRender(): Promise<void> {
    try {
      if (this.station) await this.station.refresh();
      if (this.console) await this.console.refresh();
    } catch (error) {
      this.flashError(error);
    }
    this.render();
  }

  render(): void {
    const view = this.station?.view ?? this.console?.view;
    if (!view) return;
    const panel = this.station
      ? renderStepPanel(view, { rating: this.station.rating, ranking: this.station.ranking })
      : "";
    const consoleHtml = this.console ? this.renderConsole() : "";
    this.root.innerHTML = `
${renderHeader(view)}
<main>
  <section class="floor">
    ${renderItems(view)}
    ${panel}
    ${renderChat(view)}
  </section>
  <aside>
    ${renderParticipants(view)}
    ${consoleHtml}
  </aside>
</main>`;
    this.bind();
    this.tickCountdown();
  }

  tickCountdown(): void {
    if (this.countdown) clearInterval(this.countdown);
    const span = this.root.querySelector<HTMLElement>(".deadline[data-deadline]");
    if (!span) return;
    const deadline = Number(span.dataset.deadline);
    this.countdown = setInterval(() => {
      const current = this.root.querySelector<HTMLElement>(".deadline[data-deadline]");
      if (!current) {
        if (this.countdown) clearInterval(this.countdown);
        return;
      }
      current.textContent = formatRemaining(deadline, Date.now());
    }, 1000);
  }

  renderConsole(): string {
    if (!this.console) return "";
    const view = this.console.view;
    const gate = view.lastGate ? renderGatePanel(view.lastGate, 2) : "";
    return `<section class="console">
<h2>Chauffeur</h2>
<div class="controls">
  <button data-action="open-next">Open next step</button>
  <button data-action="close">Close step</button>
  <button data-action="advance">Advance phase</button>
  <button data-action="merge-review">Merge review</button>
  <button data-action="gate">Gate</button>
</div>
${this.suggestions.length ? renderMergeReview(this.suggestions) : ""}
${gate}
${renderGuardWarnings(view)}
${renderExportControls(true)}
</section>`;
  }

  bind(): void {
    const station = this.station;
    if (station) {
      this.root.querySelector(".idea-composer")?.addEventListener("submit", (event) => {
        event.preventDefault();
        const textarea = this.root.querySelector<HTMLTextAreaElement>(".idea-composer textarea");
        if (textarea) {
          station
            .submitIdeas(textarea.value)
            .then(() => (textarea.value = ""))
            .catch((error) => this.flashError(error));
        }
      });
      for (const button of this.root.querySelectorAll<HTMLButtonElement>("button.rate")) {
        button.addEventListener("click", () => {
          station.rate(button.dataset.item ?? "", Number(button.dataset.value));
          this.render();
        });
      }
      for (const button of this.root.querySelectorAll<HTMLButtonElement>("button.pick")) {
        button.addEventListener("click", () => {
          station.pick(button.dataset.item ?? "");
          this.render();
        });
      }
      for (const button of this.root.querySelectorAll<HTMLButtonElement>("button.unrank")) {
        button.addEventListener("click", () => {
          station.ranking.remove(button.dataset.item ?? "");
          this.render();
        });
      }
      this.root.querySelector(".rating-form")?.addEventListener("submit", (event) => {
        event.preventDefault();
        station.submitRatings().then(() => this.refreshAndRender()).catch((e) => this.flashError(e));
      });
      this.root.querySelector(".ranking-form")?.addEventListener("submit", (event) => {
        event.preventDefault();
        station.submitRanking().then(() => this.refreshAndRender()).catch((e) => this.flashError(e));
      });
      this.root.querySelector(".chat-composer")?.addEventListener("submit", (event) => {
        event.preventDefault();
        const input = this.root.querySelector<HTMLInputElement>(".chat-composer input");
        if (input) {
          station.postChat(input.value).then(() => (input.value = "")).catch((e) => this.flashError(e));
        }
      });
      this.root.querySelector(".self-assessment")?.addEventListener("submit", (event) => {
        event.preventDefault();
        const active = this.root.querySelector<HTMLButtonElement>("button.gain.active");
        const value = active ? Number(active.dataset.value) : NaN;
        station.selfAssess(value).then(() => this.refreshAndRender()).catch((e) => this.flashError(e));
      });
      for (const button of this.root.querySelectorAll<HTMLButtonElement>("button.gain")) {
        button.addEventListener("click", () => {
          this.root
            .querySelectorAll("button.gain")
            .forEach((b) => b.classList.remove("active"));
          button.classList.add("active");
        });
      }
    }

    const console_ = this.console;
    if (console_) {
      this.root.querySelector("[data-action=close]")?.addEventListener("click", () => {
        console_.closeStep().then(() => this.refreshAndRender()).catch((e) => this.flashError(e));
      });
      this.root.querySelector("[data-action=advance]")?.addEventListener("click", () => {
        console_.advancePhase().then(() => this.refreshAndRender()).catch((e) => this.flashError(e));
      });
      this.root.querySelector("[data-action=merge-review]")?.addEventListener("click", () => {
        console_
          .mergeReview()
          .then((suggestions) => {
            this.suggestions = suggestions;
            this.render();
          })
          .catch((e) => this.flashError(e));
      });
      this.root.querySelector(".merge-review")?.addEventListener("submit", (event) => {
        event.preventDefault();
        console_
          .applyReviewedPlan(this.suggestions)
          .then(() => {
            this.suggestions = [];
            return this.refreshAndRender();
          })
          .catch((e) => this.flashError(e));
      });
      this.root.querySelector(".gate-action")?.addEventListener("click", () => {
        console_.gate().then(() => this.refreshAndRender()).catch((e) => this.flashError(e));
      });
      this.root.querySelector(".export")?.addEventListener("submit", (event) => {
        event.preventDefault();
        const select = this.root.querySelector<HTMLSelectElement>(".export select");
        const disclose = this.root.querySelector<HTMLInputElement>(".export input[name=disclose]");
        console_
          .exportDocument(select?.value ?? "full-record", Boolean(disclose?.checked))
          .then((doc) => {
            const blob = new Blob([doc], { type: "text/plain" });
            const link = document.createElement("a");
            link.href = URL.createObjectURL(blob);
            link.download = `${console_.workshopId}-${select?.value ?? "export"}.txt`;
            link.click();
          })
          .catch((e) => this.flashError(e));
      });
      this.root.querySelector("[data-action=open-next]")?.addEventListener("click", () => {
        const pending = prompt("Step kind to open (IdeaEntry, Merge, Rating, ...)") ?? "";
        if (pending) {
          console_.openStep(pending).then(() => this.refreshAndRender()).catch((e) => this.flashError(e));
        }
      });
    }
  }

  flashError(error: unknown): void {
    // API errors surface verbatim with the error name
    const message = error instanceof ApiError ? `${error.error}: ${error.detail}` : String(error);
    const banner = document.createElement("div");
    banner.className = "error-banner";
    banner.textContent = message;
    this.root.prepend(banner);
    setTimeout(() => banner.remove(), 6000);
  }
}

if (typeof document !== "undefined") {
  const root = document.getElementById("app");
  if (root) {
    new App(root).renderLanding();
  }
}
