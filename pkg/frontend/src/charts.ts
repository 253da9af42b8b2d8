import {
  Chart,
  LineController,
  LineElement,
  PointElement,
  LinearScale,
  LogarithmicScale,
  CategoryScale,
  Legend,
  Tooltip,
} from 'chart.js';
import type { DashboardState, ScalarPoint } from './state.js';
import { seriesPoints } from './state.js';

Chart.register(
  LineController,
  LineElement,
  PointElement,
  LinearScale,
  LogarithmicScale,
  CategoryScale,
  Legend,
  Tooltip,
);

const KIND_COLORS: Record<string, string> = {
  'bp_variance.RX': '#d62728',
  'bp_variance.RY': '#2ca02c',
  'bp_variance.RZ': '#1f77b4',
};

// draws the threshold as a horizontal rule on the log-scale variance chart
const thresholdRule = {
  id: 'thresholdRule',
  afterDatasetsDraw(chart: Chart) {
    const threshold = (chart.options as { threshold?: number | null }).threshold;
    if (threshold == null || threshold <= 0) return;
    const yScale = chart.scales.y;
    const y = yScale.getPixelForValue(threshold);
    if (!Number.isFinite(y) || y < chart.chartArea.top || y > chart.chartArea.bottom) return;
    const ctx = chart.ctx;
    ctx.save();
    ctx.strokeStyle = '#000';
    ctx.setLineDash([6, 4]);
    ctx.beginPath();
    ctx.moveTo(chart.chartArea.left, y);
    ctx.lineTo(chart.chartArea.right, y);
    ctx.stroke();
    ctx.restore();
  },
};

function toXY(points: ScalarPoint[]): { x: number; y: number }[] {
  return points.map((p) => ({ x: p.step, y: p.value }));
}

function makeScalarChart(canvas: HTMLCanvasElement, label: string, color: string): Chart {
  return new Chart(canvas, {
    type: 'line',
    data: { datasets: [{ label, data: [], borderColor: color, pointRadius: 2 }] },
    options: {
      animation: false,
      parsing: false,
      scales: {
        x: { type: 'linear', title: { display: true, text: 'epoch' } },
        y: { type: 'linear' },
      },
    },
  });
}

function makeVarianceChart(canvas: HTMLCanvasElement): Chart {
  const datasets = Object.entries(KIND_COLORS).map(([tag, color]) => ({
    label: tag.replace('bp_variance.', ''),
    data: [] as { x: number; y: number }[],
    borderColor: color,
    pointRadius: 2,
    pointBackgroundColor: [] as string[],
  }));
  return new Chart(canvas, {
    type: 'line',
    data: { datasets },
    options: {
      animation: false,
      parsing: false,
      scales: {
        x: { type: 'linear', title: { display: true, text: 'epoch' } },
        y: { type: 'logarithmic', title: { display: true, text: 'gradient variance' } },
      },
    },
    plugins: [thresholdRule],
  });
}

export class ChartPanel {
  private loss: Chart;
  private accuracy: Chart;
  private variance: Chart;

  constructor(
    lossCanvas: HTMLCanvasElement,
    accuracyCanvas: HTMLCanvasElement,
    varianceCanvas: HTMLCanvasElement,
  ) {
    this.loss = makeScalarChart(lossCanvas, 'train loss', '#1f77b4');
    this.accuracy = makeScalarChart(accuracyCanvas, 'test accuracy', '#2ca02c');
    this.variance = makeVarianceChart(varianceCanvas);
  }

  render(state: DashboardState): void {
    this.loss.data.datasets[0].data = toXY(seriesPoints(state, 'train_loss'));
    this.accuracy.data.datasets[0].data = toXY(seriesPoints(state, 'test_accuracy'));
    const threshold = state.currentThreshold;
    this.variance.data.datasets.forEach((ds, i) => {
      const tag = Object.keys(KIND_COLORS)[i];
      const points = seriesPoints(state, tag);
      ds.data = toXY(points);
      // below-threshold points rendered highlighted
      (ds as unknown as { pointBackgroundColor: string[] }).pointBackgroundColor =
        points.map((p) =>
          threshold != null && p.value < threshold ? '#ff7f0e' : KIND_COLORS[tag],
        );
    });
    (this.variance.options as { threshold?: number | null }).threshold = threshold;
    this.loss.update('none');
    this.accuracy.update('none');
    this.variance.update('none');
  }
}
