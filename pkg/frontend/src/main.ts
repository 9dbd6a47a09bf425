/** Browser shell: wires the DOM controls to the session state and paints
 * the three views. All numbers shown come from server documents. */

import { ApiClient } from "./api.js";
import { jsonFile, turtleFile, type ExportFile } from "./export.js";
import { graphScene } from "./graphview.js";
import { cellQuery, heatmapScene } from "./heatmap.js";
import { AppState } from "./state.js";
import type { CorrelationMethod, ViewMode } from "./types.js";

const state = new AppState(new ApiClient());

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el as T;
};

const SVG_NS = "http://www.w3.org/2000/svg";

function download(file: ExportFile): void {
  const url = URL.createObjectURL(new Blob([file.text], { type: file.mime }));
  const a = document.createElement("a");
  a.href = url;
  a.download = file.filename;
  a.click();
  URL.revokeObjectURL(url);
}

function paintError(): void {
  const box = $("error");
  box.textContent = state.error ?? "";
  box.style.display = state.error ? "block" : "none";
}

function paintColumns(): void {
  const host = $("columns");
  host.innerHTML = "";
  for (const col of state.columns) {
    const label = document.createElement("label");
    const box = document.createElement("input");
    box.type = "checkbox";
    box.checked = state.selected.has(col.name);
    box.addEventListener("change", () => state.toggleColumn(col.name));
    label.append(
      box,
      ` ${col.name} (${col.kind}${col.missing_count ? `, ${col.missing_count} missing` : ""})`,
    );
    host.append(label);
  }
  $("session-info").textContent = state.sessionId
    ? `session ${state.sessionId.slice(0, 8)}… — ${state.datasetName}`
    : "no dataset loaded";
}

function paintHeatmap(): void {
  const host = $("heatmap");
  host.innerHTML = "";
  if (!state.correlation) {
    host.textContent = "Run a correlation pass to see the heatmap.";
    return;
  }
  const scene = heatmapScene(state.correlation.doc);
  const n = scene.names.length;
  host.style.gridTemplateColumns = `8rem repeat(${n}, 2.2rem)`;
  host.append(document.createElement("span"));
  for (const name of scene.names) {
    const head = document.createElement("span");
    head.className = "hm-head";
    head.textContent = name;
    host.append(head);
  }
  let row = -1;
  for (const cell of scene.cells) {
    if (cell.row !== row) {
      row = cell.row;
      const head = document.createElement("span");
      head.className = "hm-rowhead";
      head.textContent = scene.names[row];
      host.append(head);
    }
    const div = document.createElement("div");
    div.className = cell.hatched ? "hm-cell hatched" : "hm-cell";
    div.style.background = cell.color;
    div.title = cell.hover;
    div.addEventListener("click", () => {
      void state.focusPair(cell.a, cell.b).then(() => {
        setView("graph");
        paint();
      });
    });
    host.append(div);
  }
}

function edgePath(x1: number, y1: number, x2: number, y2: number, selfLoop: boolean): string {
  if (selfLoop) {
    return `M ${x1} ${y1 - 16} a 22 22 0 1 1 0.1 0`;
  }
  return `M ${x1} ${y1} L ${x2} ${y2}`;
}

function paintGraph(): void {
  const host = $("graph");
  host.innerHTML = "";
  const scene = graphScene(state.visibleGraph());
  if (scene.empty) {
    const note = document.createElement("p");
    note.className = "empty-state";
    note.textContent = "No edges survive the current thresholds.";
    host.append(note);
    return;
  }
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", "0 0 860 560");
  svg.innerHTML =
    '<defs><marker id="arrow" viewBox="0 0 10 10" refX="22" refY="5" ' +
    'markerWidth="7" markerHeight="7" orient="auto-start-reverse">' +
    '<path d="M 0 0 L 10 5 L 0 10 z" fill="#555"/></marker></defs>';
  const at = new Map(scene.nodes.map((n) => [n.id, n]));
  for (const edge of scene.edges) {
    const from = at.get(edge.from)!;
    const to = at.get(edge.to)!;
    const path = document.createElementNS(SVG_NS, "path");
    path.setAttribute("d", edgePath(from.x, from.y, to.x, to.y, edge.selfLoop));
    path.setAttribute("class", `edge ${edge.kind}`);
    if (edge.directed) path.setAttribute("marker-end", "url(#arrow)");
    svg.append(path);
    const text = document.createElementNS(SVG_NS, "text");
    text.setAttribute("class", "edge-label");
    if (edge.selfLoop) {
      text.setAttribute("x", String(from.x));
      text.setAttribute("y", String(from.y - 52));
    } else {
      text.setAttribute("x", String((from.x + to.x) / 2));
      text.setAttribute("y", String((from.y + to.y) / 2 - 6));
    }
    text.textContent = edge.label;
    svg.append(text);
  }
  for (const node of scene.nodes) {
    const g = document.createElementNS(SVG_NS, "g");
    g.setAttribute("class", "node");
    g.addEventListener("click", () => {
      void state.expandNeighborhood(node.id).then(paint);
    });
    const circle = document.createElementNS(SVG_NS, "circle");
    circle.setAttribute("cx", String(node.x));
    circle.setAttribute("cy", String(node.y));
    circle.setAttribute("r", "14");
    const text = document.createElementNS(SVG_NS, "text");
    text.setAttribute("x", String(node.x));
    text.setAttribute("y", String(node.y + 28));
    text.textContent = node.label;
    g.append(circle, text);
    svg.append(g);
  }
  host.append(svg);
}

function paintTable(): void {
  const host = $("table-view");
  host.innerHTML = "";
  if (!state.discovery) {
    host.textContent = "Run discovery to see the per-pair tests.";
    return;
  }
  const table = document.createElement("table");
  table.innerHTML =
    "<thead><tr><th>source</th><th>target</th><th>lag</th><th>F</th>" +
    "<th>p</th><th>adjusted</th><th>significant</th></tr></thead>";
  const body = document.createElement("tbody");
  for (const r of state.discovery.doc.results) {
    const tr = document.createElement("tr");
    const cells = [
      r.source,
      r.target,
      String(r.p),
      r.f_statistic === null ? "-" : r.f_statistic.toFixed(2),
      r.p_value === null ? "-" : r.p_value.toExponential(2),
      r.p_adjusted === null ? "-" : r.p_adjusted.toExponential(2),
      r.error ?? (r.significant ? "yes" : "no"),
    ];
    for (const value of cells) {
      const td = document.createElement("td");
      td.textContent = value;
      tr.append(td);
    }
    body.append(tr);
  }
  table.append(body);
  host.append(table);
}

function setView(mode: ViewMode): void {
  state.viewMode = mode;
  for (const name of ["heatmap", "graph", "table"] as const) {
    $(`view-${name}`).style.display = name === mode ? "" : "none";
    $(`tab-${name}`).classList.toggle("active", name === mode);
  }
}

function paint(): void {
  paintError();
  paintColumns();
  paintHeatmap();
  paintGraph();
  paintTable();
}

function numberValue(id: string): number {
  return Number(($(`${id}`) as unknown as HTMLInputElement).value);
}

function wire(): void {
  $("file").addEventListener("change", async (event) => {
    const input = event.target as HTMLInputElement;
    const file = input.files?.[0];
    if (!file) return;
    await state.uploadCsv(await file.text(), file.name.replace(/\.csv$/i, ""));
    paint();
  });

  $("run-preprocess").addEventListener("click", async () => {
    const columns = [...state.selected];
    await state.runPreprocess({
      imputation: ($("impute") as unknown as HTMLSelectElement).value,
      encoding: ($("encode") as unknown as HTMLSelectElement).value,
      columns,
    });
    await state.setCorrelationMethod(
      ($("method") as unknown as HTMLSelectElement).value as CorrelationMethod,
    );
    paint();
  });

  $("method").addEventListener("change", async (event) => {
    const method = (event.target as HTMLSelectElement).value as CorrelationMethod;
    await state.setCorrelationMethod(method);
    paint();
  });

  $("run-discovery").addEventListener("click", async () => {
    await state.runDiscovery({
      alpha: numberValue("alpha"),
      lag_policy: ($("lag-policy") as unknown as HTMLSelectElement).value as
        | "fixed"
        | "information_criterion"
        | "scan_best",
      multiple_testing: ($("mt") as unknown as HTMLSelectElement).value as
        | "none"
        | "benjamini_hochberg",
    });
    await state.buildGraph({
      corr_threshold: numberValue("corr-threshold"),
      alpha: numberValue("alpha"),
      method: ($("method") as unknown as HTMLSelectElement).value as CorrelationMethod,
    });
    setView("graph");
    paint();
  });

  const slider = (id: string, apply: (value: number) => Promise<void>) => {
    $(id).addEventListener("change", async (event) => {
      apply(Number((event.target as HTMLInputElement).value)).then(paint);
    });
  };
  slider("weight-floor", (v) => state.setWeightFloor(v));
  slider("max-p", (v) => state.setMaxPValue(v));
  $("lag-range").addEventListener("change", async (event) => {
    const hi = Number((event.target as HTMLInputElement).value);
    state.setLagRange(1, hi).then(paint);
  });
  $("clear-filter").addEventListener("click", async () => {
    await state.applyFilter(null);
    paint();
  });

  $("export-ttl").addEventListener("click", async () => {
    try {
      download(turtleFile(state.datasetName, await state.exportTurtle()));
    } catch (err) {
      state.error = String(err);
      paintError();
    }
  });
  $("export-json").addEventListener("click", async () => {
    try {
      download(jsonFile(state.datasetName, await state.exportJson()));
    } catch (err) {
      state.error = String(err);
      paintError();
    }
  });

  for (const name of ["heatmap", "graph", "table"] as const) {
    $(`tab-${name}`).addEventListener("click", () => {
      setView(name);
      paint();
    });
  }
  setView("heatmap");
  paint();
}

wire();
