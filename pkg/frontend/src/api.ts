/** Thin fetch wrapper over the JSON API.
 *
 * Responses are kept as raw text next to the parsed document so exports
 * can hand the server's bytes through untouched.
 */

import type {
  CorrelationDoc,
  CorrelationMethod,
  DiscoveryDoc,
  DiscoveryRequest,
  FilterRequest,
  GraphDoc,
  GraphRequest,
  PreprocessDoc,
  PreprocessRequest,
  UploadDoc,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

function extractDetail(status: number, text: string): string {
  try {
    const doc = JSON.parse(text);
    const detail = doc?.detail;
    if (typeof detail === "string") return detail;
    if (Array.isArray(detail)) {
      return detail.map((item) => item?.msg ?? JSON.stringify(item)).join("; ");
    }
  } catch {
    // non-JSON error body; fall through to the raw text
  }
  return text || `HTTP ${status}`;
}

export interface Fetched<T> {
  doc: T;
  raw: string;
}

export class ApiClient {
  constructor(
    private readonly fetchFn: FetchLike = (url, init) => globalThis.fetch(url, init),
    private readonly base: string = "",
  ) {}

  private async request(
    method: string,
    path: string,
    body?: string,
    contentType?: string,
  ): Promise<string> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.body = body;
      init.headers = { "content-type": contentType ?? "application/json" };
    }
    const resp = await this.fetchFn(this.base + path, init);
    const text = await resp.text();
    if (!resp.ok) throw new ApiError(resp.status, extractDetail(resp.status, text));
    return text;
  }

  private async json<T>(method: string, path: string, body?: unknown): Promise<Fetched<T>> {
    const raw = await this.request(
      method,
      path,
      body === undefined ? undefined : JSON.stringify(body),
    );
    return { doc: JSON.parse(raw) as T, raw };
  }

  upload(csv: string, name: string): Promise<Fetched<UploadDoc>> {
    return this.request(
      "POST",
      `/api/datasets?name=${encodeURIComponent(name)}`,
      csv,
      "text/csv",
    ).then((raw) => ({ doc: JSON.parse(raw) as UploadDoc, raw }));
  }

  preprocess(sid: string, req: PreprocessRequest): Promise<Fetched<PreprocessDoc>> {
    return this.json("POST", `/api/datasets/${sid}/preprocess`, req);
  }

  correlation(sid: string, method: CorrelationMethod): Promise<Fetched<CorrelationDoc>> {
    return this.json("POST", `/api/datasets/${sid}/correlation`, { method });
  }

  discovery(sid: string, req: DiscoveryRequest): Promise<Fetched<DiscoveryDoc>> {
    return this.json("POST", `/api/datasets/${sid}/granger`, req);
  }

  graph(sid: string, req: GraphRequest): Promise<Fetched<GraphDoc>> {
    return this.json("POST", `/api/datasets/${sid}/graph`, req);
  }

  graphTurtle(sid: string): Promise<string> {
    return this.request("GET", `/api/datasets/${sid}/graph.ttl`);
  }

  filterJson(sid: string, req: FilterRequest): Promise<Fetched<GraphDoc>> {
    return this.json("POST", `/api/datasets/${sid}/graph/filter`, req);
  }

  filterTurtle(sid: string, req: FilterRequest): Promise<string> {
    return this.request(
      "POST",
      `/api/datasets/${sid}/graph/filter?format=ttl`,
      JSON.stringify(req),
    );
  }
}
