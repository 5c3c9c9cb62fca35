// Thin typed client over fetch. The fetch implementation is injectable so
// component tests intercept every request.

import type {
  ApiError,
  Intent,
  Line,
  Project,
  Thread,
  ThreadSummary,
} from './types';

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiRequestError extends Error {
  constructor(
    public readonly status: number,
    public readonly body: ApiError,
  ) {
    super(body.message || `HTTP ${status}`);
  }
}

async function parseOrThrow<T>(response: Response): Promise<T> {
  if (response.ok) {
    return (await response.json()) as T;
  }
  let body: ApiError;
  try {
    body = (await response.json()) as ApiError;
  } catch {
    body = { code: 'unknown', message: `HTTP ${response.status}`, details: null };
  }
  throw new ApiRequestError(response.status, body);
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = '',
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private get(path: string) {
    return this.fetchImpl(this.baseUrl + path);
  }

  private send(path: string, method: string, body: unknown) {
    return this.fetchImpl(this.baseUrl + path, {
      method,
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    });
  }

  async getProject(projectId: string): Promise<Project> {
    return parseOrThrow(await this.get(`/projects/${projectId}`));
  }

  async getLines(projectId: string): Promise<{ project_id: string; lines: Line[] }> {
    return parseOrThrow(await this.get(`/projects/${projectId}/lines`));
  }

  async putGloss(
    projectId: string,
    lineIndex: number,
    raw: string,
    expectedVersion: number,
  ): Promise<{ line_index: number; raw: string; version: number }> {
    return parseOrThrow(
      await this.send(`/projects/${projectId}/lines/${lineIndex}/gloss`, 'PUT', {
        raw,
        expected_version: expectedVersion,
      }),
    );
  }

  async getSuggestions(
    projectId: string,
    lineIndex: number,
    partial: string,
  ): Promise<{ suggestions: string[] }> {
    const query = partial ? `?partial=${encodeURIComponent(partial)}` : '';
    return parseOrThrow(
      await this.get(`/projects/${projectId}/lines/${lineIndex}/suggestions${query}`),
    );
  }

  async openThread(
    projectId: string,
    lineIndex: number,
    proactive: boolean,
  ): Promise<Thread> {
    return parseOrThrow(
      await this.send(`/projects/${projectId}/lines/${lineIndex}/thread`, 'POST', {
        proactive,
      }),
    );
  }

  async getThread(threadId: string): Promise<Thread> {
    return parseOrThrow(await this.get(`/threads/${threadId}`));
  }

  async listThreads(projectId: string): Promise<{ threads: ThreadSummary[] }> {
    return parseOrThrow(await this.get(`/projects/${projectId}/threads`));
  }

  async postMessage(
    threadId: string,
    body: { text: string } | { shortcut_intent: Intent },
  ): Promise<{ message: Thread['messages'][number]; intent: Intent; retryable: boolean }> {
    return parseOrThrow(await this.send(`/threads/${threadId}/messages`, 'POST', body));
  }
}
