/**
 * Notification poller with exponential backoff.
 *
 * Polls every `baseMs` while things are happening; each quiet poll doubles
 * the delay up to `maxMs` so an idle tab settles at one request a minute.
 * Any activity — a poll that found something, or a local `kick()` after user
 * action — snaps the delay back to the base.
 */

export type PollTask = () => Promise<boolean>;

export interface PollerOptions {
  baseMs?: number;
  maxMs?: number;
  setTimeoutFn?: (fn: () => void, ms: number) => unknown;
  clearTimeoutFn?: (handle: unknown) => void;
}

export class Poller {
  private readonly baseMs: number;
  private readonly maxMs: number;
  private readonly setTimeoutFn: (fn: () => void, ms: number) => unknown;
  private readonly clearTimeoutFn: (handle: unknown) => void;
  private delayMs: number;
  private handle: unknown = null;
  private running = false;

  constructor(
    private readonly task: PollTask,
    options: PollerOptions = {},
  ) {
    this.baseMs = options.baseMs ?? 5000;
    this.maxMs = options.maxMs ?? 60000;
    this.setTimeoutFn = options.setTimeoutFn ?? ((fn, ms) => setTimeout(fn, ms));
    this.clearTimeoutFn = options.clearTimeoutFn ?? ((h) => clearTimeout(h as number));
    this.delayMs = this.baseMs;
  }

  get currentDelayMs(): number {
    return this.delayMs;
  }

  get isRunning(): boolean {
    return this.running;
  }

  start(): void {
    if (this.running) return;
    this.running = true;
    this.delayMs = this.baseMs;
    this.schedule();
  }

  stop(): void {
    this.running = false;
    if (this.handle !== null) {
      this.clearTimeoutFn(this.handle);
      this.handle = null;
    }
  }

  /** Local activity: poll soon and restart from the base delay. */
  kick(): void {
    if (!this.running) return;
    this.delayMs = this.baseMs;
    if (this.handle !== null) {
      this.clearTimeoutFn(this.handle);
      this.handle = null;
    }
    this.schedule();
  }

  private schedule(): void {
    this.handle = this.setTimeoutFn(() => void this.tick(), this.delayMs);
  }

  private async tick(): Promise<void> {
    this.handle = null;
    let sawActivity = false;
    try {
      sawActivity = await this.task();
    } catch {
      // network hiccup: treat as a quiet poll and back off
    }
    if (!this.running) return;
    this.delayMs = sawActivity ? this.baseMs : Math.min(this.delayMs * 2, this.maxMs);
    this.schedule();
  }
}
