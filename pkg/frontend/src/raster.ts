/** Minimal software rasterizer: anti-aliased polylines plus a 5x7 bitmap
 * font, enough to draw the figure scenes without a native canvas. */

import { Scene, TextItem } from "./scene";

// 5x7 column-major bitmap font (bit 0 = top row of the column)
// eslint-disable-next-line @typescript-eslint/no-var-requires
const FONT = require("oled-font-5x7") as {
  width: number;
  height: number;
  lookup: string[];
  fontData: number[];
};

export interface Rgb {
  r: number;
  g: number;
  b: number;
}

export function parseColor(hex: string): Rgb {
  const m = /^#([0-9a-f]{6})$/i.exec(hex);
  if (!m) throw new Error(`unsupported color '${hex}'`);
  const v = parseInt(m[1], 16);
  return { r: (v >> 16) & 0xff, g: (v >> 8) & 0xff, b: v & 0xff };
}

export class Raster {
  readonly data: Uint8ClampedArray;

  constructor(readonly width: number, readonly height: number, bg: Rgb) {
    this.data = new Uint8ClampedArray(width * height * 4);
    for (let i = 0; i < width * height; i++) {
      this.data[4 * i] = bg.r;
      this.data[4 * i + 1] = bg.g;
      this.data[4 * i + 2] = bg.b;
      this.data[4 * i + 3] = 255;
    }
  }

  blend(x: number, y: number, c: Rgb, alpha: number): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height || alpha <= 0) {
      return;
    }
    const i = 4 * (y * this.width + x);
    const a = Math.min(alpha, 1);
    this.data[i] = this.data[i] * (1 - a) + c.r * a;
    this.data[i + 1] = this.data[i + 1] * (1 - a) + c.g * a;
    this.data[i + 2] = this.data[i + 2] * (1 - a) + c.b * a;
  }

  /** Xiaolin Wu anti-aliased line segment. */
  line(x0: number, y0: number, x1: number, y1: number, c: Rgb): void {
    const steep = Math.abs(y1 - y0) > Math.abs(x1 - x0);
    if (steep) {
      [x0, y0] = [y0, x0];
      [x1, y1] = [y1, x1];
    }
    if (x0 > x1) {
      [x0, x1] = [x1, x0];
      [y0, y1] = [y1, y0];
    }
    const dx = x1 - x0;
    const grad = dx === 0 ? 1 : (y1 - y0) / dx;
    const put = (px: number, py: number, a: number) =>
      steep ? this.blend(py, px, c, a) : this.blend(px, py, c, a);
    let y = y0 + grad * (Math.round(x0) - x0);
    for (let x = Math.round(x0); x <= Math.round(x1); x++) {
      const fy = Math.floor(y);
      const frac = y - fy;
      put(x, fy, 1 - frac);
      put(x, fy + 1, frac);
      y += grad;
    }
  }

  /** Polyline with approximate stroke width and optional dash pattern. */
  polyline(
    points: [number, number][],
    c: Rgb,
    width: number,
    dash?: number[]
  ): void {
    const segments = dash ? dashSegments(points, dash) : [points];
    const n = Math.max(1, Math.round(width));
    for (const seg of segments) {
      for (let i = 0; i + 1 < seg.length; i++) {
        const [xa, ya] = seg[i];
        const [xb, yb] = seg[i + 1];
        const len = Math.hypot(xb - xa, yb - ya) || 1;
        // offset replicas perpendicular to the segment emulate stroke width
        const ox = -(yb - ya) / len;
        const oy = (xb - xa) / len;
        for (let k = 0; k < n; k++) {
          const off = k - (n - 1) / 2;
          this.line(
            xa + ox * off,
            ya + oy * off,
            xb + ox * off,
            yb + oy * off,
            c
          );
        }
      }
    }
  }

  glyph(ch: string, x: number, y: number, c: Rgb, scale: number): void {
    let idx = FONT.lookup.indexOf(ch);
    if (idx < 0) idx = FONT.lookup.indexOf("?");
    for (let col = 0; col < FONT.width; col++) {
      const bits = FONT.fontData[idx * FONT.width + col];
      for (let row = 0; row < FONT.height; row++) {
        if ((bits >> row) & 1) {
          for (let sx = 0; sx < scale; sx++) {
            for (let sy = 0; sy < scale; sy++) {
              this.blend(x + col * scale + sx, y + row * scale + sy, c, 1);
            }
          }
        }
      }
    }
  }

  text(item: TextItem): void {
    const c = parseColor(item.color);
    const scale = Math.max(1, Math.round(item.size / 7));
    const advance = (FONT.width + 1) * scale;
    const textWidth = item.text.length * advance;
    const shift =
      item.anchor === "middle" ? -textWidth / 2 : item.anchor === "end" ? -textWidth : 0;
    if (!item.rotated) {
      const baseX = Math.round(item.x + shift);
      const baseY = Math.round(item.y - FONT.height * scale + 1);
      for (let i = 0; i < item.text.length; i++) {
        this.glyph(item.text[i], baseX + i * advance, baseY, c, scale);
      }
    } else {
      // rotate 90 degrees CCW about (x, y): text runs upward
      const baseY = Math.round(item.y - shift);
      const baseX = Math.round(item.x - FONT.height * scale + 1);
      for (let i = 0; i < item.text.length; i++) {
        this.glyphRotated(item.text[i], baseX, baseY - (i + 1) * advance, c, scale);
      }
    }
  }

  private glyphRotated(
    ch: string,
    x: number,
    y: number,
    c: Rgb,
    scale: number
  ): void {
    let idx = FONT.lookup.indexOf(ch);
    if (idx < 0) idx = FONT.lookup.indexOf("?");
    for (let col = 0; col < FONT.width; col++) {
      const bits = FONT.fontData[idx * FONT.width + col];
      for (let row = 0; row < FONT.height; row++) {
        if ((bits >> row) & 1) {
          // (col, row) -> (row, -col) for a CCW quarter turn
          for (let sx = 0; sx < scale; sx++) {
            for (let sy = 0; sy < scale; sy++) {
              this.blend(
                x + row * scale + sx,
                y + (FONT.width - 1 - col) * scale + sy,
                c,
                1
              );
            }
          }
        }
      }
    }
  }
}

/** Split a polyline into "on" segments following a dash pattern. */
export function dashSegments(
  points: [number, number][],
  dash: number[]
): [number, number][][] {
  const out: [number, number][][] = [];
  let current: [number, number][] = [];
  let phase = 0; // index into dash pattern
  let remaining = dash[0];
  let on = true;
  const flush = () => {
    if (current.length > 1) out.push(current);
    current = [];
  };
  for (let i = 0; i + 1 < points.length; i++) {
    let [xa, ya] = points[i];
    const [xb, yb] = points[i + 1];
    let segLen = Math.hypot(xb - xa, yb - ya);
    if (on && current.length === 0) current.push([xa, ya]);
    while (segLen > remaining) {
      const t = remaining / segLen;
      const xm = xa + (xb - xa) * t;
      const ym = ya + (yb - ya) * t;
      if (on) {
        current.push([xm, ym]);
        flush();
      } else {
        current = [[xm, ym]];
      }
      on = !on;
      segLen -= remaining;
      xa = xm;
      ya = ym;
      phase = (phase + 1) % dash.length;
      remaining = dash[phase];
    }
    remaining -= segLen;
    if (on) current.push([xb, yb]);
  }
  flush();
  return out;
}

export function renderRaster(scene: Scene): Raster {
  const raster = new Raster(
    scene.width,
    scene.height,
    parseColor(scene.background)
  );
  for (const item of scene.items) {
    if (item.type === "rect") {
      const c = parseColor(item.fill);
      for (let y = Math.round(item.y); y < Math.round(item.y + item.h); y++) {
        for (let x = Math.round(item.x); x < Math.round(item.x + item.w); x++) {
          raster.blend(x, y, c, 1);
        }
      }
    } else if (item.type === "polyline") {
      raster.polyline(item.points, parseColor(item.color), item.width, item.dash);
    } else {
      raster.text(item);
    }
  }
  return raster;
}
