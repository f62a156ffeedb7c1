import { Series } from "./csv";
import { Kind } from "./schema";
import {
  AXIS_COLOR,
  GRID_COLOR,
  PALETTE,
  Scene,
  TextItem,
} from "./scene";
import { Scale, extent, linearScale, logScale, tickLabel } from "./scales";

export const PLOT_FLOOR = 1e-6;

const WIDTH = 800;
const HEIGHT = 560;
const MARGIN = { left: 86, right: 24, top: 46, bottom: 72 };

interface Curve {
  label: string;
  x: number[];
  y: number[];
  color: string;
  dash?: number[];
}

interface FigureSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  logY: boolean;
  curves: Curve[];
  footnote?: string;
}

const ampDb = (a: number) => 20 * Math.log10(Math.max(a, 1e-8));

/** Turn the parsed series into plottable curves for the given figure kind. */
export function figureSpec(kind: Kind, series: Series[]): FigureSpec {
  const color = (i: number) => PALETTE[i % PALETTE.length];
  switch (kind) {
    case "ccdf": {
      let clipped = false;
      const curves = series.map((s, i) => ({
        label: s.name,
        x: s.columns.papr_db,
        y: s.columns.prob.map((p) => {
          if (p < PLOT_FLOOR) clipped = true;
          return Math.max(p, PLOT_FLOOR);
        }),
        color: color(i),
      }));
      return {
        title: "PAPR CCDF",
        xLabel: "PAPR (dB)",
        yLabel: "Pr(PAPR > x)",
        logY: true,
        curves,
        footnote: clipped ? `probabilities clipped at ${PLOT_FLOOR.toExponential(0)}` : undefined,
      };
    }
    case "psd":
      return {
        title: "Power spectral density",
        xLabel: "FFT bin",
        yLabel: "PSD (dB)",
        logY: false,
        curves: series.map((s, i) => ({
          label: s.name,
          x: s.columns.bin,
          y: s.columns.power_db,
          color: color(i),
        })),
      };
    case "af-delay":
      return {
        title: "Ambiguity function, zero-Doppler cut",
        xLabel: "delay lag (samples)",
        yLabel: "|A| (dB)",
        logY: false,
        curves: series.map((s, i) => ({
          label: s.name,
          x: s.columns.lag,
          y: s.columns.amp.map(ampDb),
          color: color(i),
        })),
      };
    case "af-doppler":
      return {
        title: "Ambiguity function, zero-delay cut",
        xLabel: "Doppler (frame cycles)",
        yLabel: "|A| (dB)",
        logY: false,
        curves: series.map((s, i) => ({
          label: s.name,
          x: s.columns.doppler,
          y: s.columns.amp.map(ampDb),
          color: color(i),
        })),
      };
    case "ber": {
      let clipped = false;
      const curves = series.map((s, i) => ({
        label: s.name,
        x: s.columns.snr_db,
        y: s.columns.ber.map((b) => {
          if (b < PLOT_FLOOR) clipped = true;
          return Math.max(b, PLOT_FLOOR);
        }),
        color: color(i),
      }));
      return {
        title: "Bit error rate",
        xLabel: "SNR (dB)",
        yLabel: "BER",
        logY: true,
        curves,
        footnote: clipped ? `BER values clipped at ${PLOT_FLOOR.toExponential(0)}` : undefined,
      };
    }
    case "rmse": {
      const curves: Curve[] = [];
      series.forEach((s, i) => {
        curves.push({
          label: `${s.name} range (m)`,
          x: s.columns.snr_db,
          y: s.columns.range_rmse_m,
          color: color(i),
        });
        curves.push({
          label: `${s.name} velocity (m/s)`,
          x: s.columns.snr_db,
          y: s.columns.velocity_rmse_mps,
          color: color(i),
          dash: [8, 5],
        });
      });
      return {
        title: "Sensing RMSE",
        xLabel: "SNR (dB)",
        yLabel: "RMSE",
        logY: false,
        curves,
      };
    }
  }
}

/** Lay a figure spec out as a renderer-independent scene. */
export function buildScene(spec: FigureSpec): Scene {
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;

  const xDomain = extent(spec.curves.map((c) => c.x), 0.02);
  const yData = spec.curves.map((c) => c.y);
  const xScale = linearScale(xDomain, [x0, x1]);
  let yScale: Scale;
  if (spec.logY) {
    const [lo, hi] = extent(yData);
    yScale = logScale(
      [Math.max(lo, PLOT_FLOOR), Math.max(hi, PLOT_FLOOR * 10)],
      [y0, y1]
    );
  } else {
    yScale = linearScale(extent(yData, 0.05), [y0, y1]);
  }

  const scene: Scene = {
    width: WIDTH,
    height: HEIGHT,
    background: "#ffffff",
    items: [],
  };
  const text = (t: Omit<TextItem, "type">) =>
    scene.items.push({ type: "text", ...t });

  // grid + ticks
  for (const t of xScale.ticks()) {
    const px = xScale.toPx(t);
    scene.items.push({
      type: "polyline",
      points: [
        [px, y0],
        [px, y1],
      ],
      color: GRID_COLOR,
      width: 1,
    });
    text({
      x: px,
      y: y0 + 18,
      text: tickLabel(t, false),
      color: AXIS_COLOR,
      size: 12,
      anchor: "middle",
    });
  }
  for (const t of yScale.ticks()) {
    const py = yScale.toPx(t);
    scene.items.push({
      type: "polyline",
      points: [
        [x0, py],
        [x1, py],
      ],
      color: GRID_COLOR,
      width: 1,
    });
    text({
      x: x0 - 6,
      y: py + 4,
      text: tickLabel(t, yScale.log),
      color: AXIS_COLOR,
      size: 12,
      anchor: "end",
    });
  }

  // frame
  scene.items.push({
    type: "polyline",
    points: [
      [x0, y1],
      [x1, y1],
      [x1, y0],
      [x0, y0],
      [x0, y1],
    ],
    color: AXIS_COLOR,
    width: 1.5,
  });

  // curves
  for (const c of spec.curves) {
    scene.items.push({
      type: "polyline",
      points: c.x.map((xv, i) => [xScale.toPx(xv), yScale.toPx(c.y[i])]),
      color: c.color,
      width: 2,
      dash: c.dash,
    });
  }

  // labels
  text({
    x: (x0 + x1) / 2,
    y: y1 - 14,
    text: spec.title,
    color: AXIS_COLOR,
    size: 16,
    anchor: "middle",
  });
  text({
    x: (x0 + x1) / 2,
    y: y0 + 40,
    text: spec.xLabel,
    color: AXIS_COLOR,
    size: 14,
    anchor: "middle",
  });
  text({
    x: 20,
    y: (y0 + y1) / 2,
    text: spec.yLabel,
    color: AXIS_COLOR,
    size: 14,
    anchor: "middle",
    rotated: true,
  });
  if (spec.footnote) {
    text({
      x: x0,
      y: HEIGHT - 10,
      text: `note: ${spec.footnote}`,
      color: "#555555",
      size: 11,
      anchor: "start",
    });
  }

  // legend, top-right inside the frame, sized to the longest label
  const maxLabel = Math.max(...spec.curves.map((c) => c.label.length));
  // 12 px/char matches the bitmap font advance at the legend text size
  const legendX = Math.max(x0 + 10, x1 - (maxLabel * 12 + 46));
  spec.curves.forEach((c, i) => {
    const ly = y1 + 16 + i * 18;
    const lx = legendX;
    scene.items.push({
      type: "polyline",
      points: [
        [lx, ly - 4],
        [lx + 28, ly - 4],
      ],
      color: c.color,
      width: 2,
      dash: c.dash,
    });
    text({
      x: lx + 34,
      y: ly,
      text: c.label,
      color: AXIS_COLOR,
      size: 12,
      anchor: "start",
    });
  });

  return scene;
}
