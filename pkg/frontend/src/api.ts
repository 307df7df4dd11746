/** Typed client for the kgdd HTTP API.
 *
 * Every method maps to exactly one endpoint; error bodies keep the
 * server's {code, message, param} shape so views can render them
 * without translation.
 */

export interface ApiError {
  code: string;
  message: string;
  param: string | null;
}

export class ApiFailure extends Error {
  constructor(readonly status: number, readonly error: ApiError) {
    super(error.message);
    this.name = "ApiFailure";
  }
}

export type LayerValue = string | number;

export interface NamespaceInfo {
  id: number;
  name: string;
  kind: string;
  size: number;
}

export interface EntityItem {
  id: number;
  namespace: string;
  label: string;
  synonyms: string[];
}

export interface EntityPage {
  total: number;
  page: number;
  page_size: number;
  items: EntityItem[];
}

export interface VariableInfo {
  name: string;
  values: LayerValue[];
  entity?: number;
}

export interface CompileResult {
  mdd_id: string;
  node_count: number;
  solution_count: number;
  variables: VariableInfo[];
}

export interface ValueCount {
  value: LayerValue;
  count: number;
}

export interface LayerView {
  name: string;
  decided: boolean;
  chosen?: LayerValue;
  values?: ValueCount[];
  entity?: number;
}

export interface TrailStep {
  layer: string;
  value: LayerValue;
}

export interface RouteSummary {
  session_id: string;
  mdd_id: string;
  solution_count: number;
  trail: TrailStep[];
  layers: LayerView[];
}

export interface SubgraphNamespace {
  id: number;
  name: string;
  kind: string;
}

export interface SubgraphEntity {
  id: number;
  namespace: number;
  label: string;
  synonyms?: string[];
}

export interface SubgraphRelation {
  id: number;
  source: number;
  target: number;
  kind: string;
}

export interface Subgraph {
  namespaces: SubgraphNamespace[];
  entities: SubgraphEntity[];
  relations: SubgraphRelation[];
}

export interface PathsResult {
  mdd_id: string;
  count: number;
  paths: Record<string, LayerValue>[];
}

export type LayerRequest =
  | { name?: string; namespace: string }
  | { name?: string; entities: number[] };

export interface CombinationsRequest {
  kind: "combinations";
  layers: LayerRequest[];
  root_anchor?: number;
  end_anchor?: number;
  depth_limit?: number;
  adjacency?: "consecutive" | "all-pairs";
}

export interface ActivityRequest {
  kind: "activity";
  entities: number[];
  source: number;
  sink: number;
  kinds?: string[];
}

export type CompileRequest = CombinationsRequest | ActivityRequest;

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    // default wraps the global so browser fetch keeps its window binding
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    let response: Response;
    try {
      response = await this.fetchFn(this.baseUrl + path, init);
    } catch (err) {
      throw new ApiFailure(0, {
        code: "NetworkError",
        message: String(err),
        param: null,
      });
    }
    if (!response.ok) {
      let error: ApiError = {
        code: "HttpError",
        message: `unexpected status ${response.status}`,
        param: null,
      };
      try {
        const payload = (await response.json()) as Partial<ApiError>;
        if (typeof payload.code === "string" && typeof payload.message === "string") {
          error = { code: payload.code, message: payload.message, param: payload.param ?? null };
        }
      } catch {
        // non-JSON error body, keep the fallback
      }
      throw new ApiFailure(response.status, error);
    }
    return (await response.json()) as T;
  }

  namespaces(): Promise<NamespaceInfo[]> {
    return this.request("GET", "/namespaces");
  }

  entities(query: { ns?: string; label?: string; page?: number; pageSize?: number } = {}): Promise<EntityPage> {
    const params = new URLSearchParams();
    if (query.ns !== undefined) params.set("ns", query.ns);
    if (query.label !== undefined) params.set("label", query.label);
    if (query.page !== undefined) params.set("page", String(query.page));
    if (query.pageSize !== undefined) params.set("page_size", String(query.pageSize));
    const qs = params.toString();
    return this.request("GET", qs ? `/entities?${qs}` : "/entities");
  }

  extendedSubgraph(vertices: number[], mode?: string): Promise<Subgraph> {
    const body: Record<string, unknown> = { vertices };
    if (mode !== undefined) {
      body.mode = mode;
    }
    return this.request("POST", "/subgraph/extended", body);
  }

  compile(request: CompileRequest): Promise<CompileResult> {
    return this.request("POST", "/mdd/compile", request);
  }

  startRoute(mddId: string): Promise<RouteSummary> {
    return this.request("POST", `/mdd/${encodeURIComponent(mddId)}/route`);
  }

  choose(sessionId: string, layer: string, value: LayerValue): Promise<RouteSummary> {
    return this.request("POST", `/route/${encodeURIComponent(sessionId)}/choose`, { layer, value });
  }

  undo(sessionId: string): Promise<RouteSummary> {
    return this.request("POST", `/route/${encodeURIComponent(sessionId)}/undo`);
  }

  paths(mddId: string, limit?: number): Promise<PathsResult> {
    const suffix = limit !== undefined ? `?limit=${limit}` : "";
    return this.request("GET", `/mdd/${encodeURIComponent(mddId)}/paths${suffix}`);
  }

  dotUrl(mddId: string): string {
    return `${this.baseUrl}/mdd/${encodeURIComponent(mddId)}/dot`;
  }
}
