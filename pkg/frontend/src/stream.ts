// SSE consumption with reconnect/backoff and a staleness watchdog.
// EventSource construction is injected so tests can drive the client with a
// fake source and fake timers.

export interface EventSourceLike {
  onopen: ((ev: unknown) => void) | null;
  onmessage: ((ev: { data: string }) => void) | null;
  onerror: ((ev: unknown) => void) | null;
  close(): void;
}

export type EventSourceFactory = (url: string) => EventSourceLike;

export interface StreamCallbacks {
  onMessage(data: string): void;
  onStateChange(state: 'connecting' | 'open' | 'lost'): void;
}

const LOST_AFTER_MS = 5000;
const BACKOFF_START_MS = 500;
const BACKOFF_MAX_MS = 8000;

export class StreamClient {
  private source: EventSourceLike | null = null;
  private backoffMs = BACKOFF_START_MS;
  private lostTimer: ReturnType<typeof setTimeout> | null = null;
  private retryTimer: ReturnType<typeof setTimeout> | null = null;
  private stopped = false;

  constructor(
    private url: string,
    private callbacks: StreamCallbacks,
    private factory: EventSourceFactory = (u) => new EventSource(u) as EventSourceLike,
  ) {}

  connect(): void {
    this.stopped = false;
    this.open();
  }

  private open(): void {
    this.callbacks.onStateChange('connecting');
    this.armLostTimer();
    this.source = this.factory(this.url);
    this.source.onopen = () => {
      this.backoffMs = BACKOFF_START_MS;
      this.clearLostTimer();
      this.callbacks.onStateChange('open');
    };
    this.source.onmessage = (ev) => {
      this.callbacks.onMessage(ev.data);
    };
    this.source.onerror = () => {
      this.handleFailure();
    };
  }

  private handleFailure(): void {
    if (this.stopped) return;
    this.source?.close();
    this.source = null;
    this.clearLostTimer();
    this.callbacks.onStateChange('lost');
    this.retryTimer = setTimeout(() => this.open(), this.backoffMs);
    this.backoffMs = Math.min(this.backoffMs * 2, BACKOFF_MAX_MS);
  }

  private armLostTimer(): void {
    this.clearLostTimer();
    // no successful open within 5 s counts as engine-down
    this.lostTimer = setTimeout(() => {
      this.callbacks.onStateChange('lost');
    }, LOST_AFTER_MS);
  }

  private clearLostTimer(): void {
    if (this.lostTimer !== null) {
      clearTimeout(this.lostTimer);
      this.lostTimer = null;
    }
  }

  close(): void {
    this.stopped = true;
    this.clearLostTimer();
    if (this.retryTimer !== null) clearTimeout(this.retryTimer);
    this.source?.close();
    this.source = null;
  }
}
