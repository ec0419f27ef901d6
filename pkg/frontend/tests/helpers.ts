/** Test doubles: a recording fetch stub and canned service responses shaped
 * exactly like the grading service's JSON (see docs/api.md). */

import type { FetchLike } from "../src/api.js";
import type { Assessment, ReviewItem } from "../src/types.js";

export interface RecordedCall {
  method: string;
  path: string;
  body: unknown;
  headers: Record<string, string>;
}

export type Reply = { status: number; body: unknown };

export function recordingFetch(handler: (call: RecordedCall) => Reply): {
  fetchImpl: FetchLike;
  calls: RecordedCall[];
} {
  const calls: RecordedCall[] = [];
  const fetchImpl: FetchLike = async (input, init) => {
    const call: RecordedCall = {
      method: init?.method ?? "GET",
      path: input,
      body: init?.body ? JSON.parse(String(init.body)) : undefined,
      headers: { ...((init?.headers ?? {}) as Record<string, string>) },
    };
    calls.push(call);
    const reply = handler(call);
    return new Response(JSON.stringify(reply.body), {
      status: reply.status,
      headers: { "Content-Type": "application/json" },
    });
  };
  return { fetchImpl, calls };
}

export const QUESTIONS = [
  { id: "Q1", prompt: "Solve 3x + 5 = 20 for x.", max_marks: 4 },
  { id: "Q2", prompt: "Solve x^2 - 5x + 6 = 0 for x.", max_marks: 4 },
];

export function assessment(overrides: Partial<Assessment>): Assessment {
  return {
    classification: "CorrectMethod",
    matched: [],
    method_awarded: 0,
    accuracy_awarded: 0,
    follow_through: false,
    ambiguous: false,
    feedback: "",
    reason: null,
    ...overrides,
  };
}

/** Known error then a correct-method line carried through it: 3/4 overall.
 * Mirrors the grading service's actual responses for this trace on Q1. */
export const FOLLOW_THROUGH_STEPS = [
  {
    text: "3x = 25",
    reply: {
      assessment: assessment({
        classification: "KnownError",
        matched: [{ production: "b_moveflip", params: ["5"] }],
        method_awarded: 1,
        accuracy_awarded: 0,
        feedback: "check the sign when moving a term across =",
      }),
      running_total: 1,
      may_continue: true,
    },
  },
  {
    text: "x = 25/3",
    reply: {
      assessment: assessment({
        classification: "CorrectMethod",
        matched: [{ production: "p_div", params: ["3"] }],
        method_awarded: 1,
        accuracy_awarded: 1,
        follow_through: true,
      }),
      running_total: 3,
      may_continue: true,
    },
  },
];

export const FOLLOW_THROUGH_FINAL = {
  question_id: "Q1",
  final: {
    earned_method: 2,
    earned_accuracy: 1,
    earned: 3,
    max_marks: 4,
    reached_correct_final: false,
    strategy_attribution: "S1",
    final_answer_only_mark: 0,
  },
};

export function reviewItem(overrides: Partial<ReviewItem>): ReviewItem {
  return {
    id: "rv-000001",
    session_id: "sess-1",
    question_id: "Q1",
    step_index: 1,
    submitted_text: "2x = 9",
    premise_text: "3x + 5 = 20",
    reason: "NoMatchingKnowledge",
    status: "Open",
    note: null,
    created_at: 1755129600.0,
    resolved_at: null,
    ...overrides,
  };
}
