/** End-to-end: boots the real grading service and drives the UI flows
 * against it over HTTP. Every assertion below reads values that arrived in
 * API responses — nothing is computed on the client side. */

import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { spawn, type ChildProcessWithoutNullStreams } from "node:child_process";
import { mkdtempSync, existsSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";

import { ApiClient } from "../src/api.js";
import { renderReview, renderSolve } from "../src/render.js";
import { ReviewFlow } from "../src/review.js";
import { SolveFlow } from "../src/solve.js";

const PORT = 8473;
const BASE = `http://127.0.0.1:${PORT}`;
const KEY = "e2e-assessor-key";

const repoRoot = fileURLToPath(new URL("../..", import.meta.url));
const kbPath = join(repoRoot, "fixtures", "kb.json");
const distDir = join(repoRoot, "frontend", "dist");

let server: ChildProcessWithoutNullStreams | null = null;
let serverLog = "";

const client = new ApiClient(undefined, BASE);

beforeAll(async () => {
  const dataDir = mkdtempSync(join(tmpdir(), "stepmark-e2e-"));
  server = spawn(
    "stepmark",
    [
      "serve",
      "--kb",
      kbPath,
      "--data-dir",
      dataDir,
      "--host",
      "127.0.0.1",
      "--port",
      String(PORT),
      "--assessor-key",
      KEY,
      "--static",
      distDir,
    ],
    { env: process.env },
  );
  server.stdout.on("data", (chunk: Buffer) => (serverLog += chunk.toString()));
  server.stderr.on("data", (chunk: Buffer) => (serverLog += chunk.toString()));

  for (let attempt = 0; attempt < 120; attempt++) {
    if (server.exitCode !== null) {
      throw new Error(`service exited early (code ${server.exitCode}):\n${serverLog}`);
    }
    try {
      await client.listQuestions();
      return;
    } catch {
      await new Promise((resolve) => setTimeout(resolve, 250));
    }
  }
  throw new Error(`service did not come up on ${BASE}:\n${serverLog}`);
});

afterAll(() => {
  server?.kill();
});

describe("solve flow against the live service", () => {
  it("shows per-step badges and a 3/4 total for the follow-through trace", async () => {
    const flow = new SolveFlow(client);
    await flow.loadQuestions();
    expect(flow.state.questions.map((q) => q.id)).toContain("Q1");

    await flow.start("Q1", 2);
    expect(flow.state.phase).toBe("Entering");
    expect(flow.state.premiseText).toBe("3*x + 5 = 20");

    // right move, arithmetic slip: method tick, accuracy cross
    flow.setDraft("3x=14");
    await flow.submit();
    let badge = flow.state.steps[0]?.assessment;
    expect(badge?.classification).toBe("CorrectMethodWrongArithmetic");
    expect(badge?.method_awarded).toBe(1);
    expect(badge?.accuracy_awarded).toBe(0);
    expect(flow.state.runningTotal).toBe(1);

    let html = renderSolve(flow.state);
    expect(html).toContain("Right method, slip in the arithmetic");
    expect(html).toContain(">M1<");
    expect(html).toContain(">A0<");
    expect(html).toContain("Marks so far: <strong data-total>1/4</strong>");

    // correct division carried through the earlier slip: full credit
    flow.setDraft("x=14/3");
    await flow.submit();
    badge = flow.state.steps[1]?.assessment;
    expect(badge?.classification).toBe("CorrectMethod");
    expect(badge?.follow_through).toBe(true);
    expect(badge?.method_awarded).toBe(1);
    expect(badge?.accuracy_awarded).toBe(1);
    expect(flow.state.runningTotal).toBe(3);

    html = renderSolve(flow.state);
    expect(html).toContain("follow-through");
    expect(html).toContain("Marks so far: <strong data-total>3/4</strong>");

    await flow.end();
    expect(flow.state.phase).toBe("Finished");
    expect(flow.state.final?.earned).toBe(3);
    expect(flow.state.final?.max_marks).toBe(4);
    expect(flow.state.final?.final_answer_only_mark).toBe(0);

    html = renderSolve(flow.state);
    expect(html).toContain("<strong data-final-total>3/4</strong>");
    expect(html).toContain("answer-only marking would give 0/4");
  });

  it("labels a known sign error and still gives follow-through credit after it", async () => {
    const flow = new SolveFlow(client);
    await flow.loadQuestions();
    await flow.start("Q1", 2);

    flow.setDraft("3x = 25");
    await flow.submit();
    expect(flow.state.steps[0]?.assessment.classification).toBe("KnownError");
    const html = renderSolve(flow.state);
    expect(html).toContain("Known error");
    expect(html).toContain("check the sign when moving a term across =");

    flow.setDraft("x = 25/3");
    await flow.submit();
    expect(flow.state.steps[1]?.assessment.follow_through).toBe(true);
    await flow.end();
    expect(flow.state.final?.earned).toBe(3);
  });

  it("credits a one-line composition and ends the attempt for a solved question", async () => {
    const flow = new SolveFlow(client);
    await flow.loadQuestions();
    await flow.start("Q1", 1);

    flow.setDraft("x=5");
    await flow.submit();
    const badge = flow.state.steps[0]?.assessment;
    expect(badge?.classification).toBe("Composition");
    expect(badge?.matched).toHaveLength(2);

    // the question is solved, so the flow ends the session on its own
    expect(flow.state.phase).toBe("Finished");
    expect(flow.state.final?.earned).toBe(4);
    expect(flow.state.final?.reached_correct_final).toBe(true);

    const html = renderSolve(flow.state);
    expect(html).toContain("combined steps &times;2");
    expect(html).toContain("<strong data-final-total>4/4</strong>");
  });

  it("pins a syntax rejection to its character without spending a step", async () => {
    const flow = new SolveFlow(client);
    await flow.loadQuestions();
    await flow.start("Q1", 2);

    flow.setDraft("3x++5");
    await flow.submit();
    expect(flow.state.steps).toHaveLength(0);
    expect(flow.state.draft).toBe("3x++5");
    expect(flow.state.syntaxError?.offset).toBe(3);

    const html = renderSolve(flow.state);
    expect(html).toContain("3x++5\n   ^");
    expect(html).toContain('value="3x++5"');

    // fixing the line proceeds normally: the rejection consumed nothing
    flow.setDraft("3x = 15");
    await flow.submit();
    expect(flow.state.steps).toHaveLength(1);
    expect(flow.state.steps[0]?.assessment.classification).toBe("CorrectMethod");
    await flow.end();
    expect(flow.state.final?.earned).toBe(2);
  });
});

describe("review flow against the live service", () => {
  it("lists the queued unrecognized line and resolves it with a note", async () => {
    // a student line the knowledge base cannot explain → queued for review
    const solve = new SolveFlow(client);
    await solve.loadQuestions();
    await solve.start("Q1", 2);
    solve.setDraft("2x = 9");
    await solve.submit();
    expect(solve.state.steps[0]?.assessment.classification).toBe("Unrecognized");
    expect(renderSolve(solve.state)).toContain("Not recognized — queued for review");
    await solve.end();

    const review = new ReviewFlow(client);

    // wrong key: the prompt stays up with the typed key intact
    review.setKey("not-the-key");
    await review.unlock();
    expect(review.state.authorized).toBe(false);
    expect(review.state.authError).not.toBeNull();
    let html = renderReview(review.state);
    expect(html).toContain('data-form="key"');
    expect(html).toContain('value="not-the-key"');

    // right key: the queued line is listed as Open
    review.setKey(KEY);
    await review.unlock();
    expect(review.state.authorized).toBe(true);
    const queued = review.state.items.find((i) => i.submitted_text === "2x = 9");
    expect(queued).toBeDefined();
    expect(queued?.status).toBe("Open");
    html = renderReview(review.state);
    expect(html).toContain("2x = 9");
    expect(html).toContain('data-status="Open"');

    // resolve with a note → gone from Open, present under Resolved
    review.openResolver(queued!.id);
    review.setNote("halving both sides is not a recognized move here");
    await review.resolve();
    expect(review.state.items.find((i) => i.id === queued!.id)).toBeUndefined();

    await review.setFilter("Resolved");
    const resolved = review.state.items.find((i) => i.id === queued!.id);
    expect(resolved?.status).toBe("Resolved");
    expect(resolved?.note).toBe("halving both sides is not a recognized move here");
    html = renderReview(review.state);
    expect(html).toContain('data-status="Resolved"');
    expect(html).toContain("halving both sides is not a recognized move here");
  });
});

describe("built assets served by the grading service", () => {
  it.skipIf(!existsSync(join(distDir, "index.html")))(
    "serves the page shell and the compiled module",
    async () => {
      const page = await fetch(`${BASE}/`);
      expect(page.status).toBe(200);
      expect(await page.text()).toContain('id="solve-root"');

      const module = await fetch(`${BASE}/assets/main.js`);
      expect(module.status).toBe(200);
      expect(await module.text()).toContain("solve-root");
    },
  );
});
