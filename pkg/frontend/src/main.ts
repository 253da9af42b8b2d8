import { ChartPanel } from './charts.js';
import { submitThreshold } from './api.js';
import {
  applyMessage,
  applyThresholdAck,
  initialState,
  parseMessage,
  validateThresholdInput,
} from './state.js';
import { StreamClient } from './stream.js';

const params = new URLSearchParams(location.search);
const engineBase = params.get('engine') ?? 'http://127.0.0.1:8321';

const state = initialState();
const panel = new ChartPanel(
  document.getElementById('loss-chart') as HTMLCanvasElement,
  document.getElementById('accuracy-chart') as HTMLCanvasElement,
  document.getElementById('variance-chart') as HTMLCanvasElement,
);

const badge = document.getElementById('connection-badge')!;
const feedbackList = document.getElementById('feedback-log')!;
const gapNote = document.getElementById('gap-note')!;
const thresholdInput = document.getElementById('threshold-input') as HTMLInputElement;
const thresholdForm = document.getElementById('threshold-form') as HTMLFormElement;
const thresholdError = document.getElementById('threshold-error')!;
const thresholdCurrent = document.getElementById('threshold-current')!;

let dirty = false;
function markDirty(): void {
  if (dirty) return;
  dirty = true;
  requestAnimationFrame(() => {
    dirty = false;
    render();
  });
}

function render(): void {
  panel.render(state);
  badge.textContent = state.connection;
  badge.className = `badge badge-${state.connection}`;
  thresholdCurrent.textContent =
    state.currentThreshold != null ? state.currentThreshold.toExponential(1) : '—';
  gapNote.hidden = !state.gapSeen;
  if (state.gapSeen) {
    gapNote.textContent = `stream gap: ${state.droppedEvents} event(s) dropped`;
  }
  feedbackList.replaceChildren(
    ...state.feedbackLog.slice(0, 200).map((entry) => {
      const li = document.createElement('li');
      li.textContent = entry.text;
      return li;
    }),
  );
}

const client = new StreamClient(`${engineBase}/events`, {
  onMessage(data) {
    const msg = parseMessage(data);
    if (msg) {
      applyMessage(state, msg);
      markDirty();
    }
  },
  onStateChange(s) {
    state.connection = s === 'open' ? 'live' : s === 'connecting' ? 'connecting' : 'lost';
    markDirty();
  },
});

thresholdForm.addEventListener('submit', async (ev) => {
  ev.preventDefault();
  const value = validateThresholdInput(thresholdInput.value);
  if (value === null) {
    thresholdError.textContent = 'threshold must be a positive finite number';
    return;
  }
  thresholdError.textContent = '';
  const result = await submitThreshold(engineBase, value);
  if (result.ok && result.threshold !== undefined) {
    applyThresholdAck(state, result.threshold);
    markDirty();
  } else {
    thresholdError.textContent = result.error ?? 'command rejected';
  }
});

client.connect();
