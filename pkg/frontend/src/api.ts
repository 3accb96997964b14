// Typed client for the plref service. The UI never mutates files except
// through POST /api/apply.

export interface Span {
  file: string;
  start: number;
  end: number;
}

export interface Suggestion {
  id: string;
  kind: string;
  module: string;
  target: string;
  span: Span;
  explanation: string;
  payload: Record<string, unknown>;
}

export interface SuggestionsResponse {
  version: number;
  suggestions: Suggestion[];
}

export interface ProjectInfo {
  version: number;
  modules: { name: string; file: string; exports: string[] }[];
  predicates: string[];
  roots: string[];
  warnings: string[];
  files: string[];
}

export interface PreviewResponse {
  preview_id: string;
  version: number;
  diff: string;
  semantics_flag: "preserving" | "changing" | "conditional";
  annotations: string[];
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly errorName: string,
    message: string,
  ) {
    super(message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  let response: Response;
  try {
    response = await fetch(url, init);
  } catch (err) {
    throw new ApiError(0, "ConnectionLost", String(err));
  }
  const text = await response.text();
  let body: Record<string, unknown> = {};
  try {
    body = JSON.parse(text);
  } catch {
    // non-JSON payloads fall through with the raw text as message
  }
  if (!response.ok) {
    throw new ApiError(
      response.status,
      String(body["error"] ?? "HttpError"),
      String(body["message"] ?? text),
    );
  }
  return body as T;
}

export class ApiClient {
  constructor(readonly base: string = "") {}

  project(): Promise<ProjectInfo> {
    return request(`${this.base}/api/project`);
  }

  suggestions(): Promise<SuggestionsResponse> {
    return request(`${this.base}/api/suggestions`);
  }

  async source(file: string): Promise<string> {
    const response = await fetch(
      `${this.base}/api/source?file=${encodeURIComponent(file)}`,
    );
    if (!response.ok) {
      throw new ApiError(response.status, "SourceUnavailable", file);
    }
    return response.text();
  }

  previewSuggestion(
    suggestionId: string,
    params: Record<string, unknown> = {},
  ): Promise<PreviewResponse> {
    return request(`${this.base}/api/preview`, {
      method: "POST",
      body: JSON.stringify({ suggestion_id: suggestionId, params }),
    });
  }

  apply(
    previewId: string,
    acceptSemanticsChange: boolean,
  ): Promise<{ new_version: number }> {
    return request(`${this.base}/api/apply`, {
      method: "POST",
      body: JSON.stringify({
        preview_id: previewId,
        accept_semantics_change: acceptSemanticsChange,
      }),
    });
  }

  reject(suggestionId: string): Promise<{ rejected: string }> {
    return request(`${this.base}/api/reject`, {
      method: "POST",
      body: JSON.stringify({ suggestion_id: suggestionId }),
    });
  }
}
