// Typed client for the grading service.  The fetch implementation is
// injectable so tests can run without a server.

import type {
  AttemptSummary,
  CheckResponse,
  QuestionView,
  ReportDoc,
} from './models.js';

export class ApiError extends Error {
  constructor(
    readonly kind: string,
    readonly detail: string,
    readonly status: number,
  ) {
    super(`${kind}: ${detail}`);
  }

  /** The server turns away concurrent submissions; the caller should
   * simply try again in a moment. */
  get retryable(): boolean {
    return this.kind === 'busy';
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly base: string,
    private readonly token: string | null = null,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  question(id: string): Promise<QuestionView> {
    return this.request('GET', `/questions/${encodeURIComponent(id)}`);
  }

  createAttempt(
    questionId: string,
    studentId: string,
  ): Promise<{ attempt_id: string; preload: string }> {
    return this.request('POST', '/attempts', {
      question_id: questionId,
      student_id: studentId,
    });
  }

  precheck(attemptId: string, code: string): Promise<ReportDoc> {
    return this.request('POST', `/attempts/${attemptId}/precheck`, { code });
  }

  check(attemptId: string, code: string): Promise<CheckResponse> {
    return this.request('POST', `/attempts/${attemptId}/check`, { code });
  }

  reset(attemptId: string): Promise<{ code: string }> {
    return this.request('POST', `/attempts/${attemptId}/reset`);
  }

  close(attemptId: string): Promise<{ final_mark: number }> {
    return this.request('POST', `/attempts/${attemptId}/close`);
  }

  summary(attemptId: string): Promise<AttemptSummary> {
    return this.request('GET', `/attempts/${attemptId}`);
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const headers: Record<string, string> = {};
    if (body !== undefined) headers['Content-Type'] = 'application/json';
    if (this.token !== null) headers['Authorization'] = `Bearer ${this.token}`;
    const res = await this.fetchFn(this.base + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!res.ok) {
      let kind = 'http_error';
      let detail = `status ${res.status}`;
      try {
        const doc = (await res.json()) as { error?: string; detail?: string };
        kind = doc.error ?? kind;
        detail = doc.detail ?? detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(kind, detail, res.status);
    }
    return (await res.json()) as T;
  }
}
