// End-to-end: a scripted browser session against the real review service.
// The Python service is spawned as a subprocess on a real socket; the UI is
// driven through DOM clicks under happy-dom. Covers: a 3-item queue reviewed
// to completion, service stats matching the flag-derived verdicts exactly,
// and a mid-session reload resuming at the first unreviewed item.
import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ReviewApi } from "../src/api.js";
import { ReviewFlow } from "../src/flow.js";
import { handleKey } from "../src/keyboard.js";
import { ReviewScreen } from "../src/ui.js";
import { until } from "./fakes.js";

const PORT = 8200 + Math.floor(Math.random() * 500);
const BASE = `http://127.0.0.1:${PORT}`;

let workdir: string;
let service: ChildProcess | undefined;
let serviceUp = false;

async function probe(): Promise<void> {
  try {
    const response = await fetch(`${BASE}/api/session/nothing/next`);
    serviceUp = response.status === 404;
  } catch {
    serviceUp = false;
  }
}
setInterval(probe, 150).unref();

function click(root: HTMLElement, selector: string): void {
  const node = root.querySelector<HTMLButtonElement>(selector);
  if (!node) throw new Error(`no element matches ${selector}`);
  node.click();
}

function mountScreen(api: ReviewApi, sessionId: string) {
  const root = document.createElement("div");
  document.body.append(root);
  const flow = new ReviewFlow(api, sessionId, "e2e-bot");
  const screen = new ReviewScreen(root, api, flow);
  return { root, flow, screen };
}

async function reviewCurrentItem(
  root: HTMLElement,
  flow: ReviewFlow,
  answers: [string, string, string],
): Promise<string> {
  await until(() => flow.snapshot().phase === "reviewing");
  const itemId = flow.snapshot().item!.edited_id;
  const submit = () => root.querySelector<HTMLButtonElement>("#submit-button")!;
  expect(submit().disabled).toBe(true); // tri-state gate: nothing answered yet
  click(root, `#background_valid-${answers[0]}`);
  click(root, `#background_realistic-${answers[1]}`);
  expect(submit().disabled).toBe(true); // third rule still unset
  click(root, `#boat_preserved-${answers[2]}`);
  await until(() => !submit().disabled);
  click(root, "#submit-button");
  await until(() => {
    const state = flow.snapshot();
    return (
      state.phase === "done" ||
      (state.phase === "reviewing" && state.item!.edited_id !== itemId)
    );
  });
  return itemId;
}

beforeAll(async () => {
  workdir = mkdtempSync(join(tmpdir(), "review-e2e-"));
  const fixture = spawnSync("python3", [join(__dirname, "fixture.py"), workdir], {
    encoding: "utf-8",
  });
  if (fixture.status !== 0) {
    throw new Error(`fixture failed: ${fixture.stderr}`);
  }
  service = spawn(
    "seamorph",
    [
      "review", "serve",
      "--manifest", join(workdir, "out", "manifest.jsonl"),
      "--images-root", join(workdir, "out"),
      "--store", join(workdir, "store"),
      "--annotations", join(workdir, "annotations.json"),
      "--images", join(workdir, "images"),
      "--port", String(PORT),
    ],
    { stdio: "ignore" },
  );
  await until(() => serviceUp, 20000, 200);
}, 30000);

afterAll(() => {
  service?.kill();
  rmSync(workdir, { recursive: true, force: true });
});

describe("review UI against the live service", () => {
  it("reviews a 3-item queue; stats equal the flag-derived verdicts; reload resumes", async () => {
    const api = new ReviewApi(BASE);
    const session = await api.createSession({ sample_size: 3, seed: 42 });
    expect(session.n_items).toBe(3);

    // --- first client: review two items (one good, one with a failed rule)
    const first = mountScreen(api, session.session_id);
    await first.flow.start();
    await until(() => first.flow.snapshot().phase === "reviewing");
    expect(first.root.querySelector("#progress")!.textContent).toBe("0 / 3");
    expect(first.flow.snapshot().item!.boxes.length).toBeGreaterThan(0);

    const firstId = await reviewCurrentItem(first.root, first.flow, ["yes", "yes", "yes"]);
    const secondId = await reviewCurrentItem(first.root, first.flow, ["yes", "yes", "no"]);
    expect(secondId).not.toBe(firstId);

    // --- reload mid-session: a fresh client resumes at the first unreviewed
    const reloaded = mountScreen(api, session.session_id);
    await reloaded.flow.start();
    await until(() => reloaded.flow.snapshot().phase === "reviewing");
    const resumedId = reloaded.flow.snapshot().item!.edited_id;
    expect([firstId, secondId]).not.toContain(resumedId);
    expect(reloaded.root.querySelector("#progress")!.textContent).toBe("2 / 3");

    // --- finish the last item, driving one rule via the keyboard
    handleKey("1", reloaded.flow, {
      toggleBoxes: () => reloaded.screen.toggleBoxes(),
      zoomIn: () => reloaded.screen.zoomIn(),
      zoomOut: () => reloaded.screen.zoomOut(),
    });
    expect(reloaded.flow.snapshot().toggles.background_valid).toBe("yes");
    click(reloaded.root, "#background_realistic-yes");
    click(reloaded.root, "#boat_preserved-yes");
    await until(
      () => !reloaded.root.querySelector<HTMLButtonElement>("#submit-button")!.disabled,
    );
    click(reloaded.root, "#submit-button");
    await until(() => reloaded.flow.snapshot().phase === "done");
    expect(reloaded.root.querySelector("#done")).toBeTruthy();

    // --- the service's stats are exactly the flag-derived verdicts
    const stats = await api.sessionStats(session.session_id);
    expect(stats.n_reviewed).toBe(3);
    expect(stats.n_good).toBe(2); // the yes/yes/no item is not good
    expect(stats.good_rate).toBeCloseTo(200 / 3, 6);

    // duplicate submission for an already-reviewed item is rejected with 409
    await expect(
      api.submitVerdict(session.session_id, firstId, "e2e-bot", {
        background_valid: true,
        background_realistic: true,
        boat_preserved: true,
      }),
    ).rejects.toMatchObject({ status: 409 });

    // image bytes are served for both panes of the reviewed items
    const edited = await fetch(api.imageUrl(firstId));
    const source = await fetch(api.imageUrl(firstId, "source"));
    expect(edited.status).toBe(200);
    expect(source.status).toBe(200);
  }, 30000);

  it("cross-session stats aggregate through the service", async () => {
    const api = new ReviewApi(BASE);
    const good = await api.createSession({ sample_size: 2, seed: 7 });
    const bad = await api.createSession({ sample_size: 2, seed: 8 });
    for (const [session, keepGood] of [
      [good, true],
      [bad, false],
    ] as const) {
      const flow = new ReviewFlow(api, session.session_id, "e2e-bot");
      await flow.start();
      while (flow.snapshot().phase === "reviewing") {
        flow.setRule("background_valid", "yes");
        flow.setRule("background_realistic", "yes");
        flow.setRule("boat_preserved", keepGood ? "yes" : "no");
        await flow.submit();
      }
    }
    const stats = await api.crossStats([good.session_id, bad.session_id]);
    expect(stats.mean_good_rate).toBeCloseTo(50.0, 6);
    expect(stats.std_good_rate).toBeCloseTo(70.7107, 3);
  }, 30000);
});
