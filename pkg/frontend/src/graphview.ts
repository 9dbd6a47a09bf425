/** Pure scene model for the force-directed graph view.
 *
 * The layout is a small deterministic spring relaxation: nodes start on
 * a circle in document order and settle over a fixed number of steps, so
 * the same document always renders the same picture.
 */

import { edgeKey, type GraphDoc, type GraphEdgeDoc } from "./types.js";

export interface SceneNode {
  id: string;
  label: string;
  x: number;
  y: number;
}

export interface SceneEdge {
  key: string;
  from: string;
  to: string;
  kind: "causal" | "correlation";
  directed: boolean;
  selfLoop: boolean;
  label: string;
  weight: number;
}

export interface GraphScene {
  nodes: SceneNode[];
  edges: SceneEdge[];
  empty: boolean;
}

function formatP(p: number | null): string {
  if (p === null) return "?";
  if (p === 0) return "0";
  if (p >= 0.001) return p.toFixed(3);
  return p.toExponential(1);
}

export function edgeLabel(edge: GraphEdgeDoc): string {
  if (edge.kind === "causal") {
    return `lag ${edge.lag}, p=${formatP(edge.p_value)}`;
  }
  return `${edge.method} r=${edge.weight.toFixed(2)}`;
}

const STEPS = 120;
const SPRING = 0.02;
const SPRING_LENGTH = 180;
const REPULSION = 18000;

function layout(ids: string[], links: [number, number][], width: number, height: number) {
  const n = ids.length;
  const cx = width / 2;
  const cy = height / 2;
  const r = Math.min(width, height) / 3;
  const xs = ids.map((_, i) => cx + r * Math.cos((2 * Math.PI * i) / n));
  const ys = ids.map((_, i) => cy + r * Math.sin((2 * Math.PI * i) / n));
  if (n === 1) return { xs: [cx], ys: [cy] };

  for (let step = 0; step < STEPS; step++) {
    const fx = new Array(n).fill(0);
    const fy = new Array(n).fill(0);
    for (let i = 0; i < n; i++) {
      for (let j = i + 1; j < n; j++) {
        const dx = xs[i] - xs[j];
        const dy = ys[i] - ys[j];
        const d2 = Math.max(dx * dx + dy * dy, 1);
        const push = REPULSION / d2;
        const d = Math.sqrt(d2);
        fx[i] += (push * dx) / d;
        fy[i] += (push * dy) / d;
        fx[j] -= (push * dx) / d;
        fy[j] -= (push * dy) / d;
      }
    }
    for (const [i, j] of links) {
      if (i === j) continue;
      const dx = xs[j] - xs[i];
      const dy = ys[j] - ys[i];
      const d = Math.max(Math.sqrt(dx * dx + dy * dy), 1);
      const pull = SPRING * (d - SPRING_LENGTH);
      fx[i] += (pull * dx) / d;
      fy[i] += (pull * dy) / d;
      fx[j] -= (pull * dx) / d;
      fy[j] -= (pull * dy) / d;
    }
    const cool = 1 - step / STEPS;
    for (let i = 0; i < n; i++) {
      xs[i] += Math.max(-12, Math.min(12, fx[i])) * cool;
      ys[i] += Math.max(-12, Math.min(12, fy[i])) * cool;
      xs[i] = Math.min(width - 40, Math.max(40, xs[i]));
      ys[i] = Math.min(height - 30, Math.max(30, ys[i]));
    }
  }
  return { xs, ys };
}

export function graphScene(doc: GraphDoc | null, width = 860, height = 560): GraphScene {
  if (doc === null || doc.nodes.length === 0) {
    return { nodes: [], edges: [], empty: true };
  }
  const ids = doc.nodes.map((n) => n.id);
  const index = new Map(ids.map((id, i) => [id, i]));
  const links: [number, number][] = doc.edges.map((e) => [
    index.get(e.a) as number,
    index.get(e.b) as number,
  ]);
  const { xs, ys } = layout(ids, links, width, height);

  const nodes = doc.nodes.map((n, i) => ({ id: n.id, label: n.label, x: xs[i], y: ys[i] }));
  const edges = doc.edges.map((e) => ({
    key: edgeKey(e),
    from: e.a,
    to: e.b,
    kind: e.kind,
    directed: e.kind === "causal",
    selfLoop: e.a === e.b,
    label: edgeLabel(e),
    weight: e.weight,
  }));
  return { nodes, edges, empty: false };
}
