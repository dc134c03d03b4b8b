// End-to-end flows against a live service instance: the participant
// station walks idea, rating, ranking, chat, and self-assessment with the
// form guards active, and the chauffeur console walks merge review,
// cut-off, gate, and export. Skipped when python3 is unavailable.

import assert from "node:assert/strict";
import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { after, before, test } from "node:test";

import { WorkshopApi, defaultAgendaDocument } from "../src/api.js";
import { FacilitatorConsole } from "../src/facilitator.js";
import { ParticipantStation } from "../src/participant.js";
import { fetchBacklog } from "../src/sse.js";
import { renderChat, renderParticipants, renderStepPanel } from "../src/views.js";

const havePython = spawnSync("python3", ["-c", "import scenarioforge"], { encoding: "utf-8" }).status === 0;

let proc: ChildProcess | null = null;
let baseUrl = "";
let dataDir = "";

async function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const probe = createServer();
    probe.listen(0, "127.0.0.1", () => {
      const address = probe.address();
      if (address && typeof address === "object") {
        const port = address.port;
        probe.close(() => resolve(port));
      } else {
        reject(new Error("no port"));
      }
    });
  });
}

before(async () => {
  if (!havePython) return;
  const port = await freePort();
  dataDir = mkdtempSync(join(tmpdir(), "scenarioforge-ui-"));
  proc = spawn(
    "python3",
    ["-m", "scenarioforge.service", "--port", String(port), "--data-dir", dataDir, "--no-fsync"],
    { stdio: "ignore" },
  );
  baseUrl = `http://127.0.0.1:${port}`;
  for (let attempt = 0; attempt < 100; attempt++) {
    try {
      const response = await fetch(`${baseUrl}/healthz`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 100));
  }
  throw new Error("service did not come up");
});

after(() => {
  proc?.kill();
  if (dataDir) rmSync(dataDir, { recursive: true, force: true });
});

test("participant and facilitator complete a full critique round", { skip: !havePython }, async () => {
  const facApi = new WorkshopApi(baseUrl);
  const chauffeur = new FacilitatorConsole(facApi);
  const wid = await chauffeur.createWorkshop(
    "Browser-driven session",
    defaultAgendaDocument({
      issueAreas: [{ label: "Economic", keywords: ["trade", "market"] }],
    }),
  );
  await chauffeur.join();
  assert.equal(chauffeur.view.alias, "P1");

  const stations = [
    new ParticipantStation(new WorkshopApi(baseUrl), wid),
    new ParticipantStation(new WorkshopApi(baseUrl), wid),
  ];
  for (const station of stations) await station.join();
  assert.deepEqual(
    stations.map((s) => s.view.alias),
    ["P2", "P3"],
  );

  await chauffeur.advancePhase();

  // idea entry
  await chauffeur.openStep("IdeaEntry");
  const ideaOut = await stations[0].submitIdeas("market trade routes\nmarket trade tariffs");
  assert.equal(ideaOut.accepted, 2);
  await stations[1].submitIdeas("coastal fishing rights\nharbor dredging costs");
  await assert.rejects(stations[0].submitIdeas("   \n  "), /non-empty/);
  await chauffeur.closeStep();

  // merge review: proposals fetched, accepted as-is
  await chauffeur.openStep("Merge");
  const suggestions = await chauffeur.mergeReview();
  assert.ok(suggestions.length >= 2);
  const clustered = suggestions.find((s) => s.members.length === 2);
  assert.ok(clustered, "the two market-trade ideas should cluster");
  await chauffeur.applyReviewedPlan(suggestions);
  await chauffeur.closeStep();

  // rating with form-level scale enforcement
  await chauffeur.openStep("Rating");
  for (const station of stations) {
    await station.refresh();
    const items = station.view.items;
    assert.ok(items.length >= 3);
    assert.equal(station.rate(items[0].id, 6), false, "6 blocked before the wire");
    assert.equal(station.rate(items[0].id, 9000), false);
    assert.equal(station.rate(items[0].id, 5), true);
    assert.equal(station.rate(items[1].id, 3), true);
    assert.equal(station.rate(items[2].id, 1), true);
    await station.submitRatings();
  }
  const ratingClose = await chauffeur.closeStep();
  assert.equal(ratingClose.kind, "Rating");
  assert.equal((ratingClose.result as { submitted: number }).submitted, 2);

  // ranking with the top_k cap enforced in-form
  await chauffeur.openStep("Ranking");
  for (const station of stations) {
    await station.refresh();
    const ids = station.view.items.map((i) => i.id);
    for (const id of ids) station.pick(id);
    assert.ok(station.ranking.items().length <= station.ranking.topK);
    await station.submitRanking();
  }
  await chauffeur.closeStep();

  // cut to two items
  const cut = await chauffeur.cutoff(2);
  assert.equal(cut.kind, "CutOff");
  const report = (cut.result as { report: { decision: string; kendall_w: number } }).report;
  assert.ok(report.kendall_w >= 0 && report.kendall_w <= 1);

  // collateral self-assessment, then chat, then the second assessment
  await chauffeur.openStep("SelfAssessment");
  await assert.rejects(stations[0].selfAssess(7), /0 to 5/);
  await stations[0].selfAssess(4, "sharper picture now");
  await stations[1].selfAssess(2);
  await chauffeur.closeStep();

  await chauffeur.openStep("Chat");
  await stations[0].postChat("the cut kept the market items");
  await stations[1].postChat("fishing rights dropped off");
  await assert.rejects(stations[0].postChat("x".repeat(1001)), /1000/);
  await chauffeur.closeStep();

  await chauffeur.openStep("SelfAssessment");
  await stations[0].selfAssess(5);
  await chauffeur.closeStep();

  // gate runs with the recorded report
  const gate = await chauffeur.gate();
  assert.ok(["Converged", "Iterate", "BudgetStop"].includes(gate.decision));

  // exports: facilitator can disclose, output formats respond
  const fullRecord = await chauffeur.exportDocument("full-record", true);
  const parsed = JSON.parse(fullRecord) as { audit?: unknown; chat: { alias: string }[] };
  assert.ok(parsed.audit, "disclosed export carries the audit table");
  const csv = await chauffeur.exportDocument("ratings-csv");
  assert.ok(csv.startsWith("alias,round,step,item,value"));
  const verify = await chauffeur.replayVerify();
  assert.equal(verify.match, true);

  // no rendered view leaks anything but aliases
  for (const station of stations) {
    await station.refresh();
    const html = [
      renderParticipants(station.view),
      renderChat(station.view),
      renderStepPanel(station.view, { rating: station.rating, ranking: station.ranking }),
    ].join("");
    assert.ok(!html.includes(station.api.token ?? "nope"), "token never rendered");
    for (const participant of station.view.participants) {
      assert.ok(/^P\d+$/.test(participant.alias));
    }
  }

  // stream catch-up: the backlog replays densely from seq 1
  const backlog = await fetchBacklog(baseUrl, wid, 0);
  assert.ok(backlog.length > 20);
  assert.deepEqual(
    backlog.map((e) => e.seq),
    Array.from({ length: backlog.length }, (_, i) => i + 1),
  );
  const kinds = new Set(backlog.map((e) => e.kind));
  for (const required of ["step_opened", "step_closed", "chat_message", "gate_decision", "list_updated"]) {
    assert.ok(kinds.has(required), `stream carries ${required}`);
  }
});

test("facilitator console mirrors errors by name", { skip: !havePython }, async () => {
  const api = new WorkshopApi(baseUrl);
  const chauffeur = new FacilitatorConsole(api);
  await chauffeur.createWorkshop("Error surfacing");
  await chauffeur.join();
  await assert.rejects(chauffeur.openStep("CutOff"), (error: Error & { error?: string }) => {
    assert.equal(error.error, "OutOfOrder");
    return true;
  });
});
