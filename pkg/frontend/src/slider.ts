import type { ApiClient } from "./api";
import { applyReselect, markStale, type ViewState } from "./state";
import type { ReselectResponse, SelectionState } from "./types";

export const DEBOUNCE_MS = 100;
export const RETRY_MS = 500;

type Scheduler = {
  set: (fn: () => void, ms: number) => unknown;
  clear: (handle: unknown) => void;
};

const defaultScheduler: Scheduler = {
  set: (fn, ms) => setTimeout(fn, ms),
  clear: (handle) => clearTimeout(handle as ReturnType<typeof setTimeout>),
};

/** Debounced threshold changes: at most one request per quiet window, at
 * most one in flight (the client aborts superseded ones), and a transient
 * failure marks the view stale and retries until a response lands or a
 * newer value supersedes it. */
export class ThresholdSlider {
  private pending: unknown = null;
  private lastValue: number | null = null;
  private generation = 0;

  constructor(
    private readonly api: ApiClient,
    private readonly state: ViewState,
    private readonly onUpdate: (resp: ReselectResponse) => void = () => {},
    private readonly scheduler: Scheduler = defaultScheduler,
  ) {}

  /** The field the slider drives, per the current selection method. */
  private payload(value: number): Partial<SelectionState> {
    if (this.state.selection?.method === "windowed_uniqueness") {
      return { method: "windowed_uniqueness", mu: Math.max(1, value) };
    }
    return { method: "score_threshold", lambda: value };
  }

  change(value: number): void {
    this.lastValue = value;
    this.generation += 1;
    if (this.pending !== null) this.scheduler.clear(this.pending);
    const generation = this.generation;
    this.pending = this.scheduler.set(() => {
      this.pending = null;
      void this.fire(value, generation);
    }, DEBOUNCE_MS);
  }

  private async fire(value: number, generation: number): Promise<void> {
    try {
      const resp = await this.api.reselect(this.payload(value));
      if (generation !== this.generation) return; // superseded while in flight
      applyReselect(this.state, resp);
      this.onUpdate(resp);
    } catch (err) {
      if ((err as Error).name === "AbortError") return;
      if (generation !== this.generation) return;
      markStale(this.state);
      this.pending = this.scheduler.set(() => {
        this.pending = null;
        void this.fire(value, generation);
      }, RETRY_MS);
    }
  }

  get currentValue(): number | null {
    return this.lastValue;
  }
}
