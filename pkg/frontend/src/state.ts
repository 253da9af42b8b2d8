// Dashboard state: pure reducer over stream messages so it can be tested
// without a DOM or a live engine.

export type Connection = 'connecting' | 'live' | 'replay' | 'lost';

export interface ScalarPoint {
  step: number;
  value: number;
}

export interface FeedbackEntry {
  step: number;
  text: string;
}

export interface TelemetryMessage {
  kind: 'scalar' | 'text';
  tag: string;
  step: number;
  value: number | string;
  wall_time: number;
}

export interface GapMessage {
  kind: 'gap';
  dropped: number;
}

export type StreamMessage = TelemetryMessage | GapMessage;

export interface DashboardState {
  series: Map<string, ScalarPoint[]>;
  feedbackLog: FeedbackEntry[]; // newest first
  currentThreshold: number | null;
  connection: Connection;
  droppedEvents: number;
  gapSeen: boolean;
}

export function initialState(): DashboardState {
  return {
    series: new Map(),
    feedbackLog: [],
    currentThreshold: null,
    connection: 'connecting',
    droppedEvents: 0,
    gapSeen: false,
  };
}

export function parseMessage(data: string): StreamMessage | null {
  let obj: unknown;
  try {
    obj = JSON.parse(data);
  } catch {
    return null;
  }
  if (typeof obj !== 'object' || obj === null || !('kind' in obj)) return null;
  const msg = obj as Record<string, unknown>;
  if (msg.kind === 'gap' && typeof msg.dropped === 'number') {
    return { kind: 'gap', dropped: msg.dropped };
  }
  if (
    (msg.kind === 'scalar' || msg.kind === 'text') &&
    typeof msg.tag === 'string' &&
    typeof msg.step === 'number'
  ) {
    return msg as unknown as TelemetryMessage;
  }
  return null;
}

// Mutates state in place; rendering batches per animation frame, not per event.
export function applyMessage(state: DashboardState, msg: StreamMessage): void {
  if (msg.kind === 'gap') {
    state.droppedEvents += msg.dropped;
    state.gapSeen = true;
    return;
  }
  if (msg.kind === 'text') {
    state.feedbackLog.unshift({ step: msg.step, text: String(msg.value) });
    return;
  }
  const value = msg.value as number;
  let points = state.series.get(msg.tag);
  if (!points) {
    points = [];
    state.series.set(msg.tag, points);
  }
  points.push({ step: msg.step, value });
  // the engine's per-epoch report is the source of truth for the threshold rule
  if (msg.tag === 'threshold') {
    state.currentThreshold = value;
  }
}

// Engine acknowledgment of a POST /command; the rule also moves here so the
// operator sees the accepted value before the next epoch's report lands.
export function applyThresholdAck(state: DashboardState, threshold: number): void {
  state.currentThreshold = threshold;
}

export function seriesPoints(state: DashboardState, tag: string): ScalarPoint[] {
  return state.series.get(tag) ?? [];
}

export function validateThresholdInput(raw: string): number | null {
  const value = Number(raw);
  if (!Number.isFinite(value) || value <= 0) return null;
  return value;
}
