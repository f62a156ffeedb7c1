/** Resolution-independent figure description shared by both renderers. */

export interface Polyline {
  type: "polyline";
  points: [number, number][];
  color: string;
  width: number;
  dash?: number[];
}

export interface TextItem {
  type: "text";
  x: number;
  y: number;
  text: string;
  color: string;
  size: number;
  anchor: "start" | "middle" | "end";
  /** rotate 90 degrees counter-clockwise about (x, y) */
  rotated?: boolean;
}

export interface RectItem {
  type: "rect";
  x: number;
  y: number;
  w: number;
  h: number;
  fill: string;
}

export type Item = Polyline | TextItem | RectItem;

export interface Scene {
  width: number;
  height: number;
  background: string;
  items: Item[];
}

/** Fixed series palette; index order makes identical inputs render identically. */
export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#17becf",
  "#8c564b",
  "#7f7f7f",
];

export const AXIS_COLOR = "#222222";
export const GRID_COLOR = "#dddddd";
