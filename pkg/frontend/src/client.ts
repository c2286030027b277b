import type { ApiErrorBody } from './types.js';

// The whole dashboard is configured by one base URL; everything else comes
// from the service.
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: ApiErrorBody,
  ) {
    super(body.message);
    this.name = 'ApiError';
  }
}

export class HttpClient {
  constructor(private baseUrl: string) {
    // Trailing slash would double up with the /api/... paths.
    this.baseUrl = baseUrl.replace(/\/+$/, '');
  }

  async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? undefined : { 'content-type': 'application/json' },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = (await response.json()) as { error?: ApiErrorBody };
    if (!response.ok) {
      // Error bodies are {"error": {code, message, ...}}; anything else is a
      // proxy or crash page and gets a generic wrapper.
      const detail = payload?.error ?? { code: 'error', message: `HTTP ${response.status}` };
      throw new ApiError(response.status, detail);
    }
    return payload as T;
  }

  get<T>(path: string): Promise<T> {
    return this.request<T>('GET', path);
  }

  post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>('POST', path, body);
  }
}
