/** Typed HTTP client for the grading service. All grading happens server-side;
 * this file only moves JSON. Endpoints per docs/api.md. */

import type {
  ErrorBody,
  Question,
  ReviewItem,
  SessionCreated,
  StepOutcome,
  Transcript,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** A non-2xx answer from the service, carrying its error envelope. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly detail: Record<string, unknown> = {},
  ) {
    super(message);
    this.name = "ApiError";
  }

  /** Character offset of a SYNTAX_ERROR, if this is one. */
  get syntaxOffset(): number | null {
    const offset = this.detail["offset"];
    return this.code === "SYNTAX_ERROR" && typeof offset === "number" ? offset : null;
  }
}

/** The request never reached the service (offline, refused, aborted). */
export class NetworkError extends Error {
  constructor(readonly reason: unknown) {
    super("could not reach the grading service");
    this.name = "NetworkError";
  }
}

export class ApiClient {
  constructor(
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
    private readonly base: string = "",
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    assessorKey?: string,
  ): Promise<T> {
    const headers: Record<string, string> = {};
    if (body !== undefined) headers["Content-Type"] = "application/json";
    if (assessorKey !== undefined) headers["X-Assessor-Key"] = assessorKey;

    let response: Response;
    try {
      response = await this.fetchImpl(this.base + path, {
        method,
        headers,
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (cause) {
      throw new NetworkError(cause);
    }

    if (!response.ok) {
      let envelope: Partial<ErrorBody> = {};
      try {
        envelope = (await response.json()) as ErrorBody;
      } catch {
        /* non-JSON error body; fall through to generic fields */
      }
      throw new ApiError(
        response.status,
        envelope.code ?? "UNKNOWN",
        envelope.message ?? response.statusText,
        envelope.detail ?? {},
      );
    }
    return (await response.json()) as T;
  }

  listQuestions(): Promise<Question[]> {
    return this.request<Question[]>("GET", "/api/questions");
  }

  createSession(questionId: string, declaredSteps: number): Promise<SessionCreated> {
    return this.request<SessionCreated>("POST", "/api/sessions", {
      question_id: questionId,
      declared_steps: declaredSteps,
    });
  }

  submitStep(sessionId: string, text: string): Promise<StepOutcome> {
    return this.request<StepOutcome>("POST", `/api/sessions/${sessionId}/steps`, { text });
  }

  endSession(sessionId: string): Promise<Transcript> {
    return this.request<Transcript>("POST", `/api/sessions/${sessionId}/end`);
  }

  listReview(key: string, status?: "Open" | "Resolved"): Promise<ReviewItem[]> {
    const query = status ? `?status=${status}` : "";
    return this.request<ReviewItem[]>("GET", `/api/review${query}`, undefined, key);
  }

  resolveReview(key: string, itemId: string, note: string): Promise<ReviewItem> {
    return this.request<ReviewItem>(
      "POST",
      `/api/review/${itemId}/resolve`,
      { note },
      key,
    );
  }
}
