/** Pure scene model for the n-by-n correlation heatmap. */

import type { CorrelationDoc, FilterRequest } from "./types.js";

export interface HeatmapCell {
  row: number;
  col: number;
  a: string;
  b: string;
  score: number;
  color: string;
  /** Either endpoint was flagged degenerate by the server. */
  hatched: boolean;
  hover: string;
}

export interface HeatmapScene {
  names: string[];
  cells: HeatmapCell[];
}

function channel(v: number): number {
  return Math.round(255 * Math.min(1, Math.max(0, v)));
}

/** Signed scores get a blue-white-red diverging ramp over [-1, 1];
 * euclidean similarity gets a white-to-green ramp over (0, 1]. */
export function colorFor(method: string, score: number): string {
  if (method === "euclidean") {
    const s = Math.min(1, Math.max(0, score));
    return `rgb(${channel(1 - 0.75 * s)},${channel(1 - 0.25 * s)},${channel(1 - 0.75 * s)})`;
  }
  const s = Math.min(1, Math.max(-1, score));
  if (s >= 0) return `rgb(255,${channel(1 - s)},${channel(1 - s)})`;
  return `rgb(${channel(1 + s)},${channel(1 + s)},255)`;
}

export function heatmapScene(doc: CorrelationDoc): HeatmapScene {
  const degenerate = new Set(doc.degenerate);
  const cells: HeatmapCell[] = [];
  doc.names.forEach((a, row) => {
    doc.names.forEach((b, col) => {
      const score = doc.scores[row][col];
      cells.push({
        row,
        col,
        a,
        b,
        score,
        color: colorFor(doc.method, score),
        hatched: degenerate.has(a) || degenerate.has(b),
        hover: `${a} x ${b}: ${score.toFixed(4)} (${doc.method})`,
      });
    });
  });
  return { names: [...doc.names], cells };
}

/** Clicking a cell focuses the graph view on that pair. */
export function cellQuery(cell: HeatmapCell): FilterRequest {
  const nodes = cell.a === cell.b ? [cell.a] : [cell.a, cell.b];
  return { nodes, neighborhood_radius: 1 };
}
