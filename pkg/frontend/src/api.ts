import type {
  DemoResponse,
  PathDoc,
  PlanResponse,
  PointXY,
  ScenarioDoc,
  ScenarioSummary,
  TrainJobDoc,
} from "./types";

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;

  constructor(status: number, code: string, detail: string) {
    super(detail);
    this.status = status;
    this.code = code;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Thin typed client over the workbench endpoints; every number shown in the
 * UI comes from here, never from client-side computation. */
export class ApiClient {
  private readonly fetchFn: FetchLike;
  private readonly base: string;

  constructor(base = "", fetchFn: FetchLike = (input, init) => fetch(input, init)) {
    this.base = base.replace(/\/$/, "");
    this.fetchFn = fetchFn;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
      init.headers = { "Content-Type": "application/json" };
    }
    const resp = await this.fetchFn(this.base + path, init);
    const doc = (await resp.json()) as Record<string, unknown>;
    if (!resp.ok) {
      throw new ApiError(resp.status, String(doc.error ?? "error"), String(doc.detail ?? resp.statusText));
    }
    return doc as T;
  }

  listScenarios(): Promise<{ scenarios: ScenarioSummary[] }> {
    return this.request("GET", "/api/scenarios");
  }

  getScenario(id: string): Promise<ScenarioDoc> {
    return this.request("GET", `/api/scenarios/${encodeURIComponent(id)}`);
  }

  createScenario(doc: ScenarioDoc): Promise<{ id: string }> {
    return this.request("POST", "/api/scenarios", doc);
  }

  listPaths(id: string): Promise<{ paths: PathDoc[] }> {
    return this.request("GET", `/api/scenarios/${encodeURIComponent(id)}/paths`);
  }

  submitDemo(id: string, points: PointXY[]): Promise<DemoResponse> {
    return this.request("POST", `/api/scenarios/${encodeURIComponent(id)}/demos`, { points });
  }

  plan(id: string, planner: string, options: { model?: string; seed?: number } = {}): Promise<PlanResponse> {
    return this.request("POST", `/api/scenarios/${encodeURIComponent(id)}/plan`, {
      planner,
      ...options,
    });
  }

  listModels(): Promise<{ models: string[] }> {
    return this.request("GET", "/api/models");
  }

  startTraining(overrides: Record<string, unknown> = {}): Promise<{ id: string; state: string }> {
    return this.request("POST", "/api/train", overrides);
  }

  trainStatus(jobId: string): Promise<TrainJobDoc> {
    return this.request("GET", `/api/train/${encodeURIComponent(jobId)}`);
  }

  cancelTraining(jobId: string): Promise<TrainJobDoc> {
    return this.request("DELETE", `/api/train/${encodeURIComponent(jobId)}`);
  }
}
