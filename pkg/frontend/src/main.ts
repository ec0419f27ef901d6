/** Browser wiring: one SolveFlow and one ReviewFlow per tab, rendered into
 * the page on every state change, with all interaction routed through
 * data-action attributes so the markup stays declarative. */

import { ApiClient } from "./api.js";
import { SolveFlow } from "./solve.js";
import { ReviewFlow } from "./review.js";
import { renderReview, renderSolve } from "./render.js";

const api = new ApiClient();

const solveRoot = document.getElementById("solve-root") as HTMLElement;
const reviewRoot = document.getElementById("review-root") as HTMLElement;

const solve = new SolveFlow(api, (state) => {
  solveRoot.innerHTML = renderSolve(state);
  const line = solveRoot.querySelector<HTMLInputElement>('input[name="line"]');
  if (line) {
    line.focus();
    line.setSelectionRange(line.value.length, line.value.length);
  }
});

const review = new ReviewFlow(api, (state) => {
  reviewRoot.innerHTML = renderReview(state);
});

/** The Retry button replays whichever call last failed on the network. */
let retrySolve: () => Promise<void> = () => solve.loadQuestions();
let retryReview: () => Promise<void> = () => review.refresh();

function activateTab(name: "solve" | "review"): void {
  for (const button of document.querySelectorAll<HTMLButtonElement>("[data-tab]")) {
    button.classList.toggle("active", button.dataset.tab === name);
  }
  solveRoot.hidden = name !== "solve";
  reviewRoot.hidden = name !== "review";
}

document.addEventListener("click", (event) => {
  const target = (event.target as HTMLElement).closest<HTMLElement>("[data-action], [data-tab]");
  if (!target) return;
  const tab = target.dataset.tab;
  if (tab === "solve" || tab === "review") {
    activateTab(tab);
    return;
  }
  switch (target.dataset.action) {
    case "end":
      retrySolve = () => solve.end();
      void solve.end();
      break;
    case "again":
      solve.reset();
      break;
    case "retry":
      void retrySolve();
      break;
    case "filter-open":
      void review.setFilter("Open");
      break;
    case "filter-resolved":
      void review.setFilter("Resolved");
      break;
    case "lock":
      review.lock();
      break;
    case "open-resolve":
      if (target.dataset.item) review.openResolver(target.dataset.item);
      break;
    case "cancel-resolve":
      review.cancelResolver();
      break;
    case "review-retry":
      void retryReview();
      break;
  }
});

document.addEventListener("input", (event) => {
  const input = event.target as HTMLInputElement;
  if (input.name === "line") solve.setDraft(input.value);
  if (input.name === "key") review.setKey(input.value);
  if (input.name === "note") review.setNote(input.value);
});

document.addEventListener("submit", (event) => {
  const form = (event.target as HTMLElement).closest<HTMLFormElement>("[data-form]");
  if (!form) return;
  event.preventDefault();
  switch (form.dataset.form) {
    case "declare": {
      const data = new FormData(form);
      const questionId = String(data.get("question") ?? "");
      const steps = Number(data.get("steps") ?? 0);
      retrySolve = () => solve.start(questionId, steps);
      void solve.start(questionId, steps);
      break;
    }
    case "step":
      retrySolve = () => solve.submit();
      void solve.submit();
      break;
    case "key":
      retryReview = () => review.unlock();
      void review.unlock();
      break;
    case "resolve":
      retryReview = () => review.resolve();
      void review.resolve();
      break;
  }
});

activateTab("solve");
void solve.loadQuestions();
