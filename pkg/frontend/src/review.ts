/** Assessor review queue: key-gated listing of lines the grader could not
 * classify, with a resolve-with-note action. */

import { ApiClient, ApiError, NetworkError } from "./api.js";
import type { ReviewItem } from "./types.js";

export type ReviewFilter = "Open" | "Resolved";

export interface ReviewViewState {
  /** Entered key is kept even when the server rejects it, so the assessor
   * can correct a typo instead of retyping. */
  key: string;
  authorized: boolean;
  authError: string | null;
  filter: ReviewFilter;
  items: ReviewItem[];
  /** id of the item whose note editor is open, if any */
  resolving: string | null;
  note: string;
  networkError: string | null;
  busy: boolean;
}

export function initialReviewState(): ReviewViewState {
  return {
    key: "",
    authorized: false,
    authError: null,
    filter: "Open",
    items: [],
    resolving: null,
    note: "",
    networkError: null,
    busy: false,
  };
}

export class ReviewFlow {
  state: ReviewViewState = initialReviewState();

  constructor(
    private readonly api: ApiClient,
    private readonly onChange: (state: ReviewViewState) => void = () => {},
  ) {}

  private emit(): void {
    this.onChange(this.state);
  }

  setKey(key: string): void {
    this.state.key = key;
  }

  setNote(note: string): void {
    this.state.note = note;
  }

  /** Try the entered key by listing the queue. A 403 keeps the prompt (and
   * the typed key) on screen with the server's message. */
  async unlock(): Promise<void> {
    if (this.state.busy) return;
    this.state.busy = true;
    this.state.authError = null;
    this.state.networkError = null;
    this.emit();
    try {
      this.state.items = await this.api.listReview(this.state.key, this.state.filter);
      this.state.authorized = true;
      this.state.busy = false;
    } catch (error) {
      this.state.busy = false;
      this.state.authorized = false;
      if (error instanceof ApiError && error.status === 403) {
        this.state.authError = error.message;
      } else if (error instanceof NetworkError) {
        this.state.networkError = error.message;
      } else {
        this.state.authError = error instanceof Error ? error.message : String(error);
      }
    }
    this.emit();
  }

  async setFilter(filter: ReviewFilter): Promise<void> {
    this.state.filter = filter;
    this.emit();
    await this.refresh();
  }

  async refresh(): Promise<void> {
    if (!this.state.authorized) return;
    try {
      this.state.items = await this.api.listReview(this.state.key, this.state.filter);
      this.state.networkError = null;
    } catch (error) {
      if (error instanceof ApiError && error.status === 403) {
        this.state.authorized = false;
        this.state.authError = error.message;
      } else if (error instanceof NetworkError) {
        this.state.networkError = error.message;
      }
    }
    this.emit();
  }

  openResolver(itemId: string): void {
    this.state.resolving = itemId;
    this.state.note = "";
    this.emit();
  }

  cancelResolver(): void {
    this.state.resolving = null;
    this.state.note = "";
    this.emit();
  }

  /** Resolve the open item with the typed note, then reload the list so the
   * item moves to the Resolved filter. Guarded against double-clicks. */
  async resolve(): Promise<void> {
    if (this.state.busy || !this.state.resolving) return;
    this.state.busy = true;
    this.emit();
    try {
      await this.api.resolveReview(this.state.key, this.state.resolving, this.state.note);
      this.state.resolving = null;
      this.state.note = "";
      this.state.busy = false;
      await this.refresh();
    } catch (error) {
      this.state.busy = false;
      if (error instanceof ApiError && error.status === 403) {
        this.state.authorized = false;
        this.state.authError = error.message;
      } else if (error instanceof NetworkError) {
        this.state.networkError = error.message;
      } else {
        this.state.networkError = error instanceof Error ? error.message : String(error);
      }
      this.emit();
    }
  }

  lock(): void {
    this.state = initialReviewState();
    this.emit();
  }
}
