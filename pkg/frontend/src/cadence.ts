/** Capture-and-submit loop: one frame per interval, one request in flight.
 *
 * A tick is skipped when the previous request has not resolved. A
 * rate-limited response restarts the cadence so the next attempt lands a
 * full interval later. Network failures flip a paused flag (the scene
 * shows a banner) and the loop keeps probing, resuming on recovery.
 */

export type SubmitResult = "ok" | "rate_limited" | "network_error" | "game_over";

export interface CaptureLoopOptions {
  intervalMs?: number;
  submit: () => Promise<SubmitResult>;
  onPausedChange?: (paused: boolean) => void;
}

export const DEFAULT_INTERVAL_MS = 1000;

export class CaptureLoop {
  readonly intervalMs: number;
  attempts = 0;
  skippedWhileInFlight = 0;
  paused = false;

  private timer: ReturnType<typeof setInterval> | null = null;
  private inFlight = false;
  private readonly submit: () => Promise<SubmitResult>;
  private readonly onPausedChange?: (paused: boolean) => void;

  constructor(options: CaptureLoopOptions) {
    this.intervalMs = options.intervalMs ?? DEFAULT_INTERVAL_MS;
    this.submit = options.submit;
    this.onPausedChange = options.onPausedChange;
  }

  get running(): boolean {
    return this.timer !== null;
  }

  start(): void {
    if (this.timer !== null) return;
    this.timer = setInterval(() => void this.tick(), this.intervalMs);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  private setPaused(paused: boolean): void {
    if (this.paused !== paused) {
      this.paused = paused;
      this.onPausedChange?.(paused);
    }
  }

  private async tick(): Promise<void> {
    if (this.inFlight) {
      this.skippedWhileInFlight += 1;
      return;
    }
    this.inFlight = true;
    this.attempts += 1;
    try {
      const result = await this.submit();
      if (result === "network_error") {
        this.setPaused(true);
        return;
      }
      this.setPaused(false);
      if (result === "rate_limited" && this.running) {
        // resynchronize: next attempt a full interval from now
        this.stop();
        this.start();
      } else if (result === "game_over") {
        this.stop();
      }
    } finally {
      this.inFlight = false;
    }
  }
}
