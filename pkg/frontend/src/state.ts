/** Client-side session state and the request discipline around it.
 *
 * Every fetched artifact is the latest successful response for the
 * current settings: each control group carries a sequence number, and a
 * response that comes back after a newer request in its group has been
 * issued is dropped on the floor.
 */

import { ApiClient, ApiError, type Fetched } from "./api.js";
import type {
  ColumnInfo,
  CorrelationDoc,
  CorrelationMethod,
  DiscoveryDoc,
  DiscoveryRequest,
  FilterRequest,
  GraphDoc,
  GraphRequest,
  PreprocessDoc,
  PreprocessRequest,
  ViewMode,
} from "./types.js";

export class AppState {
  sessionId: string | null = null;
  datasetName = "";
  columns: ColumnInfo[] = [];
  selected = new Set<string>();
  viewMode: ViewMode = "heatmap";
  error: string | null = null;

  report: PreprocessDoc | null = null;
  correlation: Fetched<CorrelationDoc> | null = null;
  discovery: Fetched<DiscoveryDoc> | null = null;
  baseGraph: Fetched<GraphDoc> | null = null;
  filtered: Fetched<GraphDoc> | null = null;
  activeQuery: FilterRequest | null = null;

  private seq = { correlation: 0, discovery: 0, graph: 0, filter: 0 };

  constructor(private readonly api: ApiClient) {}

  /** What the graph view should draw right now. */
  visibleGraph(): GraphDoc | null {
    return this.filtered?.doc ?? this.baseGraph?.doc ?? null;
  }

  private fail(err: unknown): void {
    this.error = err instanceof ApiError ? err.message : String(err);
  }

  /** A new upload replaces the whole session; a rejected one leaves it alone. */
  async uploadCsv(csv: string, name: string): Promise<boolean> {
    this.error = null;
    try {
      const { doc } = await this.api.upload(csv, name);
      this.sessionId = doc.session_id;
      this.datasetName = name;
      this.columns = doc.columns;
      this.selected = new Set(doc.columns.map((c) => c.name));
      this.report = null;
      this.correlation = null;
      this.discovery = null;
      this.baseGraph = null;
      this.filtered = null;
      this.activeQuery = null;
      return true;
    } catch (err) {
      this.fail(err);
      return false;
    }
  }

  toggleColumn(name: string): void {
    if (this.selected.has(name)) this.selected.delete(name);
    else this.selected.add(name);
  }

  private sid(): string {
    if (this.sessionId === null) throw new Error("no active session");
    return this.sessionId;
  }

  /** Server semantics: a fresh preprocess invalidates everything downstream. */
  async runPreprocess(req: PreprocessRequest): Promise<boolean> {
    this.error = null;
    try {
      const { doc } = await this.api.preprocess(this.sid(), req);
      this.report = doc;
      this.correlation = null;
      this.discovery = null;
      this.baseGraph = null;
      this.filtered = null;
      this.activeQuery = null;
      return true;
    } catch (err) {
      this.fail(err);
      return false;
    }
  }

  async setCorrelationMethod(method: CorrelationMethod): Promise<void> {
    this.error = null;
    const seq = ++this.seq.correlation;
    try {
      const fetched = await this.api.correlation(this.sid(), method);
      if (seq !== this.seq.correlation) return;
      this.correlation = fetched;
    } catch (err) {
      if (seq === this.seq.correlation) this.fail(err);
    }
  }

  async runDiscovery(req: DiscoveryRequest): Promise<void> {
    this.error = null;
    const seq = ++this.seq.discovery;
    try {
      const fetched = await this.api.discovery(this.sid(), req);
      if (seq !== this.seq.discovery) return;
      this.discovery = fetched;
    } catch (err) {
      if (seq === this.seq.discovery) this.fail(err);
    }
  }

  async buildGraph(req: GraphRequest): Promise<void> {
    this.error = null;
    const seq = ++this.seq.graph;
    try {
      const fetched = await this.api.graph(this.sid(), req);
      if (seq !== this.seq.graph) return;
      this.baseGraph = fetched;
      this.filtered = null;
      this.activeQuery = null;
    } catch (err) {
      if (seq === this.seq.graph) this.fail(err);
    }
  }

  /** Commit a filter view; null clears back to the unfiltered graph. */
  async applyFilter(query: FilterRequest | null): Promise<void> {
    this.error = null;
    const seq = ++this.seq.filter;
    if (query === null || Object.keys(query).length === 0) {
      this.filtered = null;
      this.activeQuery = null;
      return;
    }
    try {
      const fetched = await this.api.filterJson(this.sid(), query);
      if (seq !== this.seq.filter) return; // a newer slider position won
      this.filtered = fetched;
      this.activeQuery = query;
    } catch (err) {
      if (seq === this.seq.filter) this.fail(err);
    }
  }

  private mergedQuery(patch: FilterRequest): FilterRequest {
    return { ...(this.activeQuery ?? {}), ...patch };
  }

  setWeightFloor(weight: number): Promise<void> {
    return this.applyFilter(this.mergedQuery({ min_abs_weight: weight }));
  }

  setMaxPValue(p: number): Promise<void> {
    return this.applyFilter(this.mergedQuery({ max_p_value: p }));
  }

  setLagRange(lo: number, hi: number): Promise<void> {
    return this.applyFilter(this.mergedQuery({ lag_range: [lo, hi] }));
  }

  /** Node click: restrict the view to the 1-hop neighborhood. */
  expandNeighborhood(nodeId: string): Promise<void> {
    return this.applyFilter({ nodes: [nodeId], neighborhood_radius: 1 });
  }

  /** Heatmap cell click: pre-fill a query on the pair. */
  focusPair(a: string, b: string): Promise<void> {
    return this.applyFilter({ nodes: a === b ? [a] : [a, b], neighborhood_radius: 1 });
  }

  /** Exports pass the server's serialization through byte-for-byte. */
  async exportTurtle(): Promise<string> {
    if (this.activeQuery !== null) {
      return this.api.filterTurtle(this.sid(), this.activeQuery);
    }
    return this.api.graphTurtle(this.sid());
  }

  async exportJson(): Promise<string> {
    const current = this.filtered ?? this.baseGraph;
    if (current === null) throw new Error("build the graph first");
    return current.raw;
  }
}
