/** Pure view functions: state in, HTML string out. Keeping these free of any
 * document access lets the tests assert on markup without a browser. */

import type { SolveViewState, StepBadge } from "./solve.js";
import type { ReviewViewState } from "./review.js";
import type { Assessment } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

const CLASSIFICATION_LABELS: Record<string, string> = {
  Restatement: "Restates the given equation",
  CorrectMethod: "Correct method",
  Composition: "Correct method",
  KnownError: "Known error",
  CorrectMethodWrongArithmetic: "Right method, slip in the arithmetic",
  ValidUnrecognizedTransform: "Equivalent, but not a recognized move",
  Unrecognized: "Not recognized — queued for review",
};

function classLabel(assessment: Assessment): string {
  return CLASSIFICATION_LABELS[assessment.classification] ?? assessment.classification;
}

function markChip(kind: "M" | "A", awarded: number): string {
  const state = awarded > 0 ? "earned" : "missed";
  return `<span class="chip mark-${state}" data-mark="${kind}">${kind}${awarded}</span>`;
}

export function renderBadge(step: StepBadge): string {
  const a = step.assessment;
  const chips: string[] = [markChip("M", a.method_awarded), markChip("A", a.accuracy_awarded)];
  if (a.classification === "Composition") {
    chips.push(`<span class="chip combined">combined steps &times;${a.matched.length}</span>`);
  }
  if (a.follow_through) {
    chips.push(`<span class="chip follow-through">follow-through</span>`);
  }
  if (a.ambiguous) {
    chips.push(`<span class="chip ambiguous">ambiguous</span>`);
  }
  const feedback = a.feedback ? `<p class="feedback">${escapeHtml(a.feedback)}</p>` : "";
  return `
    <li class="step" data-step="${step.index}" data-classification="${escapeHtml(a.classification)}">
      <code class="step-text">${escapeHtml(step.text)}</code>
      <span class="verdict">${escapeHtml(classLabel(a))}</span>
      ${chips.join(" ")}
      ${feedback}
    </li>`;
}

/** Draft line plus a caret pointing at the offending character. */
export function renderSyntaxPointer(text: string, offset: number, message: string): string {
  const caretPad = " ".repeat(Math.max(0, Math.min(offset, text.length)));
  return `
    <div class="syntax-error" role="alert">
      <p>${escapeHtml(message)}</p>
      <pre class="pointer">${escapeHtml(text)}\n${caretPad}^</pre>
    </div>`;
}

export function renderSolve(state: SolveViewState): string {
  const parts: string[] = ['<section class="solve">'];
  if (state.networkError) {
    parts.push(`
      <div class="network-error" role="alert">
        <p>Could not reach the grading service: ${escapeHtml(state.networkError)}</p>
        <button type="button" data-action="retry">Retry</button>
      </div>`);
  }
  if (state.notice) {
    parts.push(`<p class="notice" role="alert">${escapeHtml(state.notice)}</p>`);
  }
  if (state.phase === "Declaring") {
    parts.push(renderDeclaring(state));
  } else {
    parts.push(renderAttempt(state));
  }
  parts.push("</section>");
  return parts.join("\n");
}

function renderDeclaring(state: SolveViewState): string {
  if (!state.questions.length) {
    return `<p class="empty">No questions available.</p>`;
  }
  const options = state.questions
    .map(
      (q) =>
        `<option value="${escapeHtml(q.id)}">${escapeHtml(q.prompt)} (${q.max_marks} marks)</option>`,
    )
    .join("");
  return `
    <form class="declare" data-form="declare">
      <label>Question
        <select name="question">${options}</select>
      </label>
      <label>How many steps will you use?
        <input name="steps" type="number" min="${state.stepLimits.min}" max="${state.stepLimits.max}"
               value="${state.declaredSteps}" required>
      </label>
      <button type="submit" data-action="start" ${state.busy ? "disabled" : ""}>Start</button>
    </form>`;
}

function renderAttempt(state: SolveViewState): string {
  const parts: string[] = [];
  if (state.question) {
    parts.push(`<h2 class="prompt">${escapeHtml(state.question.prompt)}</h2>`);
    parts.push(`<p class="premise">Given: <code>${escapeHtml(state.premiseText)}</code></p>`);
  }
  parts.push(`<ol class="steps" aria-label="previous steps">`);
  for (const step of state.steps) {
    parts.push(renderBadge(step));
  }
  parts.push("</ol>");
  const max = state.question ? state.question.max_marks : 0;
  parts.push(
    `<p class="running-total">Marks so far: <strong data-total>${state.runningTotal}/${max}</strong></p>`,
  );
  if (state.phase === "Entering") {
    if (state.syntaxError) {
      parts.push(renderSyntaxPointer(state.draft, state.syntaxError.offset, state.syntaxError.message));
    }
    parts.push(`
      <form class="entry" data-form="step">
        <label>Step ${state.steps.length + 1}
          <input name="line" type="text" autocomplete="off" spellcheck="false"
                 placeholder="e.g. 3x = 15" value="${escapeHtml(state.draft)}">
        </label>
        <button type="submit" data-action="submit" ${state.busy ? "disabled" : ""}>Check step</button>
        <button type="button" data-action="end" ${state.busy ? "disabled" : ""}>End attempt</button>
      </form>`);
  }
  if (state.phase === "Finished" && state.final) {
    const f = state.final;
    parts.push(`
      <div class="final" data-final>
        <h3>Attempt complete</h3>
        <p class="total">Total: <strong data-final-total>${f.earned}/${f.max_marks}</strong></p>
        <p>Method marks ${f.earned_method}, accuracy marks ${f.earned_accuracy}.
           Final answer ${f.reached_correct_final ? "correct" : "not reached"};
           answer-only marking would give ${f.final_answer_only_mark}/${f.max_marks}.</p>
        <button type="button" data-action="again">Try another question</button>
      </div>`);
  }
  return parts.join("\n");
}

export function renderReview(state: ReviewViewState): string {
  const parts: string[] = ['<section class="review">'];
  if (state.networkError) {
    parts.push(`
      <div class="network-error" role="alert">
        <p>Could not reach the grading service: ${escapeHtml(state.networkError)}</p>
        <button type="button" data-action="review-retry">Retry</button>
      </div>`);
  }
  if (!state.authorized) {
    parts.push(renderKeyPrompt(state));
  } else {
    parts.push(renderQueue(state));
  }
  parts.push("</section>");
  return parts.join("\n");
}

function renderKeyPrompt(state: ReviewViewState): string {
  const error = state.authError
    ? `<p class="auth-error" role="alert">${escapeHtml(state.authError)}</p>`
    : "";
  return `
    <form class="key-prompt" data-form="key">
      <label>Assessor key
        <input name="key" type="password" value="${escapeHtml(state.key)}" autocomplete="off">
      </label>
      <button type="submit" data-action="unlock" ${state.busy ? "disabled" : ""}>Unlock</button>
      ${error}
    </form>`;
}

function renderQueue(state: ReviewViewState): string {
  const parts: string[] = [];
  parts.push(`
    <nav class="filters">
      <button type="button" data-action="filter-open"
              class="${state.filter === "Open" ? "active" : ""}">Open</button>
      <button type="button" data-action="filter-resolved"
              class="${state.filter === "Resolved" ? "active" : ""}">Resolved</button>
      <button type="button" data-action="lock">Lock</button>
    </nav>`);
  if (!state.items.length) {
    parts.push(`<p class="empty">No ${state.filter.toLowerCase()} items.</p>`);
    return parts.join("\n");
  }
  parts.push(`<ul class="queue">`);
  for (const item of state.items) {
    const resolver =
      state.resolving === item.id
        ? `
        <form class="resolver" data-form="resolve" data-item="${escapeHtml(item.id)}">
          <label>Note
            <input name="note" type="text" value="${escapeHtml(state.note)}">
          </label>
          <button type="submit" data-action="resolve" ${state.busy ? "disabled" : ""}>Resolve</button>
          <button type="button" data-action="cancel-resolve">Cancel</button>
        </form>`
        : item.status === "Open"
          ? `<button type="button" data-action="open-resolve" data-item="${escapeHtml(item.id)}">Resolve…</button>`
          : `<p class="note">Note: ${escapeHtml(item.note ?? "")}</p>`;
    parts.push(`
      <li class="review-item" data-item="${escapeHtml(item.id)}" data-status="${item.status}">
        <header>
          <span class="status ${item.status.toLowerCase()}">${item.status}</span>
          <span class="where">${escapeHtml(item.question_id)} · step ${item.step_index}</span>
        </header>
        <p>Submitted: <code>${escapeHtml(item.submitted_text)}</code></p>
        <p>Working from: <code>${escapeHtml(item.premise_text)}</code></p>
        <p class="reason">${escapeHtml(item.reason ?? "")}</p>
        ${resolver}
      </li>`);
  }
  parts.push("</ul>");
  return parts.join("\n");
}
