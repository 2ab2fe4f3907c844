// Thin fetch client for the verification service. Every mutation returns
// the server's response; callers re-render from server truth afterwards.

import type {
  CaseDetail,
  CaseList,
  ClassifyRequest,
  ClassifyResponse,
  CorrectionResponse,
  DecisionRequest,
  Report,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly payload: unknown;

  constructor(status: number, message: string, payload: unknown) {
    super(message);
    this.status = status;
    this.payload = payload;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl: string, fetchFn?: FetchLike) {
    this.base = baseUrl.replace(/\/+$/, "");
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.base}${path}`, init);
    const text = await response.text();
    let payload: unknown = null;
    try {
      payload = text ? JSON.parse(text) : null;
    } catch {
      payload = text;
    }
    if (!response.ok) {
      const message =
        payload && typeof payload === "object" && "error" in (payload as object)
          ? String((payload as { error: unknown }).error)
          : `HTTP ${response.status}`;
      throw new ApiError(response.status, message, payload);
    }
    return payload as T;
  }

  listCases(state?: string): Promise<CaseList> {
    const query = state ? `?case_state=${encodeURIComponent(state)}` : "";
    return this.request<CaseList>(`/v1/cases${query}`);
  }

  getCase(appId: string): Promise<CaseDetail> {
    return this.request<CaseDetail>(`/v1/cases/${encodeURIComponent(appId)}`);
  }

  submitApplication(document: string): Promise<{ app_id: string; revision: number }> {
    return this.request(`/v1/applications`, {
      method: "POST",
      headers: { "content-type": "text/plain" },
      body: document,
    });
  }

  verify(appId: string): Promise<Report> {
    return this.request<Report>(`/v1/applications/${encodeURIComponent(appId)}/verify`, {
      method: "POST",
    });
  }

  decide(appId: string, decision: DecisionRequest): Promise<unknown> {
    return this.request(`/v1/cases/${encodeURIComponent(appId)}/decisions`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(decision),
    });
  }

  requestCorrection(appId: string): Promise<CorrectionResponse> {
    return this.request(`/v1/cases/${encodeURIComponent(appId)}/request-correction`, {
      method: "POST",
    });
  }

  approve(appId: string, officerId: string): Promise<unknown> {
    return this.request(`/v1/cases/${encodeURIComponent(appId)}/approve`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ officer_id: officerId }),
    });
  }

  reject(appId: string, officerId: string): Promise<unknown> {
    return this.request(`/v1/cases/${encodeURIComponent(appId)}/reject`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ officer_id: officerId }),
    });
  }

  closeCase(appId: string): Promise<unknown> {
    return this.request(`/v1/cases/${encodeURIComponent(appId)}/close`, { method: "POST" });
  }

  classify(body: ClassifyRequest): Promise<ClassifyResponse> {
    return this.request(`/v1/classify`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }
}
