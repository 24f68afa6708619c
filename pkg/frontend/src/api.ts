// Typed bindings for the /v1 JSON API. Every view talks to the server
// through this client only, so tests can swap the fetch implementation.

export interface Prediction {
  id: string;
  score: number;
  at_risk: boolean;
}

export interface PredictResponse {
  version_id: number;
  threshold: number;
  predictions: Prediction[];
}

export interface Contribution {
  feature: string;
  value: string | number | null;
  phi: number;
}

export interface ExplainResponse {
  version_id: number;
  id: string;
  base_value: number;
  prediction: number;
  contributions: Contribution[];
}

export interface MetricsEntry {
  rmse: number;
  mae: number;
  r2: number;
  mape_percent: number;
  explained_variance: number;
  n: number;
  phase_label: string;
  timestamp: number;
}

export interface HistoryResponse {
  history: MetricsEntry[];
  versions: number[];
}

export interface FeedbackResponse {
  accepted: number;
  ids: string[];
  store_size: number;
  retrain_triggered: boolean;
}

export interface RetrainRow {
  id: string;
  initial_score: number;
  post_retrain_score: number;
  diff: number;
  trend: "up" | "down" | "flat";
}

export interface RetrainResponse {
  version_id: number;
  parent_version: number;
  before: MetricsEntry;
  after: MetricsEntry;
  rows: RetrainRow[];
}

export interface HealthResponse {
  status: "ok" | "untrained";
  version_id: number | null;
}

export interface ApiError {
  code: string;
  message: string;
  details: string[];
}

export type StudentRecord = Record<string, string | number>;

export class RequestFailed extends Error {
  constructor(
    public status: number,
    public body: ApiError,
  ) {
    super(`${body.code}: ${body.message}`);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private base = "",
    private fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchFn(this.base + path, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
    const body = await resp.json();
    if (!resp.ok) throw new RequestFailed(resp.status, body as ApiError);
    return body as T;
  }

  health(): Promise<HealthResponse> {
    return this.request("/v1/health");
  }

  predict(records: StudentRecord[]): Promise<PredictResponse> {
    return this.request("/v1/predict", {
      method: "POST",
      body: JSON.stringify({ records }),
    });
  }

  explainRecord(record: StudentRecord): Promise<ExplainResponse> {
    return this.request("/v1/explain", {
      method: "POST",
      body: JSON.stringify(record),
    });
  }

  explainStored(recordId: string): Promise<ExplainResponse> {
    return this.request(`/v1/explain?record_id=${encodeURIComponent(recordId)}`);
  }

  feedback(records: StudentRecord[], note: string): Promise<FeedbackResponse> {
    return this.request("/v1/feedback", {
      method: "POST",
      body: JSON.stringify({ note, records }),
    });
  }

  retrain(force = false): Promise<RetrainResponse> {
    return this.request(`/v1/retrain?force=${force}`, { method: "POST" });
  }

  history(): Promise<HistoryResponse> {
    return this.request("/v1/metrics/history");
  }
}
