/** Response shapes of the grading service, as documented in docs/api.md. */

export interface Question {
  id: string;
  prompt: string;
  max_marks: number;
}

export interface StepLimits {
  min: number;
  max: number;
}

export interface SessionCreated {
  session_id: string;
  question_id: string;
  declared_steps: number;
  step_limits: StepLimits;
  premise_text: string;
}

export interface MatchedProduction {
  production: string;
  params: string[];
}

export interface Assessment {
  classification:
    | "CorrectMethod"
    | "CorrectMethodWrongArithmetic"
    | "KnownError"
    | "Composition"
    | "Restatement"
    | "ValidUnrecognizedTransform"
    | "Unrecognized";
  matched: MatchedProduction[];
  method_awarded: number;
  accuracy_awarded: number;
  follow_through: boolean;
  ambiguous: boolean;
  feedback: string;
  reason: string | null;
}

export interface StepOutcome {
  assessment: Assessment;
  running_total: number;
  may_continue: boolean;
}

export interface TranscriptFinal {
  earned_method: number;
  earned_accuracy: number;
  earned: number;
  max_marks: number;
  reached_correct_final: boolean;
  strategy_attribution: string;
  final_answer_only_mark: number;
}

export interface Transcript {
  question_id: string;
  final: TranscriptFinal;
  [key: string]: unknown;
}

export interface ReviewItem {
  id: string;
  session_id: string;
  question_id: string;
  step_index: number;
  submitted_text: string;
  premise_text: string;
  reason: string | null;
  status: "Open" | "Resolved";
  note: string | null;
  created_at: number;
  resolved_at: number | null;
}

export interface ErrorBody {
  code: string;
  message: string;
  detail: Record<string, unknown>;
}
