/** Solve-flow state machine: declare step count, enter lines one at a time,
 * read the per-step verdicts, continue or end. Every mark shown comes from a
 * service response — this file never grades anything. */

import { ApiClient, ApiError, NetworkError } from "./api.js";
import type {
  Assessment,
  Question,
  StepLimits,
  TranscriptFinal,
} from "./types.js";

export type Phase = "Declaring" | "Entering" | "Finished";

export interface StepBadge {
  index: number;
  text: string;
  assessment: Assessment;
}

export interface InlineSyntaxError {
  offset: number;
  message: string;
}

export interface SolveViewState {
  questions: Question[];
  question: Question | null;
  declaredSteps: number;
  stepLimits: StepLimits;
  premiseText: string;
  sessionId: string | null;
  steps: StepBadge[];
  runningTotal: number;
  mayContinue: boolean;
  phase: Phase;
  draft: string;
  syntaxError: InlineSyntaxError | null;
  networkError: string | null;
  notice: string | null;
  final: TranscriptFinal | null;
  busy: boolean;
}

export function initialSolveState(): SolveViewState {
  return {
    questions: [],
    question: null,
    declaredSteps: 2,
    stepLimits: { min: 1, max: 12 },
    premiseText: "",
    sessionId: null,
    steps: [],
    runningTotal: 0,
    mayContinue: true,
    phase: "Declaring",
    draft: "",
    syntaxError: null,
    networkError: null,
    notice: null,
    final: null,
    busy: false,
  };
}

/** Drives one question attempt. One instance per browser tab: starting a new
 * attempt replaces the state wholesale, so concurrent tabs are independent. */
export class SolveFlow {
  state: SolveViewState = initialSolveState();

  constructor(
    private readonly api: ApiClient,
    private readonly onChange: (state: SolveViewState) => void = () => {},
  ) {}

  private emit(): void {
    this.onChange(this.state);
  }

  async loadQuestions(): Promise<void> {
    try {
      this.state.questions = await this.api.listQuestions();
      this.state.networkError = null;
    } catch (error) {
      this.state.networkError = describeFailure(error);
    }
    this.emit();
  }

  /** Declare the intended number of steps and open a session. */
  async start(questionId: string, declaredSteps: number): Promise<void> {
    if (this.state.busy) return;
    const question = this.state.questions.find((q) => q.id === questionId);
    if (!question) return;
    this.state.busy = true;
    this.emit();
    try {
      const created = await this.api.createSession(questionId, declaredSteps);
      this.state = {
        ...initialSolveState(),
        questions: this.state.questions,
        question,
        declaredSteps: created.declared_steps,
        stepLimits: created.step_limits,
        premiseText: created.premise_text,
        sessionId: created.session_id,
        phase: "Entering",
      };
    } catch (error) {
      this.state.busy = false;
      this.state.notice = describeFailure(error);
    }
    this.emit();
  }

  setDraft(text: string): void {
    this.state.draft = text;
  }

  /** Submit the draft line. A syntax rejection or network failure keeps the
   * draft (and the step counter) untouched so the user can fix or retry. */
  async submit(): Promise<void> {
    if (this.state.busy || this.state.phase !== "Entering" || !this.state.sessionId) return;
    const text = this.state.draft;
    if (!text.trim()) return;
    this.state.busy = true;
    this.state.syntaxError = null;
    this.state.networkError = null;
    this.emit();
    try {
      const outcome = await this.api.submitStep(this.state.sessionId, text);
      this.state.steps = [
        ...this.state.steps,
        { index: this.state.steps.length + 1, text, assessment: outcome.assessment },
      ];
      this.state.runningTotal = outcome.running_total;
      this.state.mayContinue = outcome.may_continue;
      this.state.draft = "";
      this.state.busy = false;
      this.emit();
      if (!outcome.may_continue) {
        await this.end(); // no more steps will be accepted; fetch the final report
      }
    } catch (error) {
      this.state.busy = false;
      if (error instanceof ApiError && error.syntaxOffset !== null) {
        this.state.syntaxError = { offset: error.syntaxOffset, message: error.message };
      } else if (error instanceof NetworkError) {
        this.state.networkError = error.message;
      } else {
        this.state.notice = describeFailure(error);
      }
      this.emit();
    }
  }

  /** End the attempt and show the total. Safe against double-clicks. */
  async end(): Promise<void> {
    if (this.state.busy || this.state.phase !== "Entering" || !this.state.sessionId) return;
    this.state.busy = true;
    this.emit();
    try {
      const transcript = await this.api.endSession(this.state.sessionId);
      this.state.final = transcript.final;
      this.state.phase = "Finished";
      this.state.busy = false;
    } catch (error) {
      this.state.busy = false;
      if (error instanceof NetworkError) {
        this.state.networkError = error.message;
      } else {
        this.state.notice = describeFailure(error);
      }
    }
    this.emit();
  }

  /** Back to the question list for another attempt. */
  reset(): void {
    this.state = { ...initialSolveState(), questions: this.state.questions };
    this.emit();
  }
}

export function describeFailure(error: unknown): string {
  if (error instanceof ApiError) return `${error.code}: ${error.message}`;
  if (error instanceof Error) return error.message;
  return String(error);
}
