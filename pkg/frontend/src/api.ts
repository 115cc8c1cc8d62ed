/** Thin client for the gesture authentication HTTP service. */

export interface EnrollSession {
  sessionId: string;
  mode: 'enroll';
  gestureId: string;
  roundsRequired: number;
}

export interface VerifySession {
  sessionId: string;
  mode: 'verify';
  prompt: {
    attemptsAllowed: number;
    gestureName?: string;
  };
}

export interface RoundResponse {
  roundsDone: number;
  roundsRequired: number;
  complete: boolean;
  gestureId?: string;
}

export interface AttemptResponse {
  decision: boolean;
  attemptsRemaining: number;
  fallbackRequired: boolean;
}

export interface GestureListing {
  user: string;
  gestures: { gestureId: string; name?: string }[];
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

type FetchLike = typeof fetch;

export class SmaugClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private async requestJson<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchImpl(this.baseUrl + path, init);
    const body = await resp.json().catch(() => ({}));
    if (!resp.ok) {
      const detail =
        typeof body === 'object' && body !== null && 'error' in body
          ? String((body as { error: unknown }).error)
          : resp.statusText;
      throw new ApiError(resp.status, detail);
    }
    return body as T;
  }

  startEnrollment(
    user: string,
    gestureName: string,
    options: { secretMode?: boolean; backgroundImageMode?: boolean } = {},
  ): Promise<EnrollSession> {
    return this.requestJson('/sessions', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ user, mode: 'enroll', gestureName, ...options }),
    });
  }

  startVerification(user: string, gestureId?: string): Promise<VerifySession> {
    return this.requestJson('/sessions', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ user, mode: 'verify', ...(gestureId ? { gestureId } : {}) }),
    });
  }

  postRound(sessionId: string, traceDocument: string): Promise<RoundResponse> {
    return this.requestJson(`/sessions/${sessionId}/rounds`, {
      method: 'POST',
      headers: { 'content-type': 'text/plain' },
      body: traceDocument,
    });
  }

  postAttempt(sessionId: string, traceDocument: string): Promise<AttemptResponse> {
    return this.requestJson(`/sessions/${sessionId}/attempts`, {
      method: 'POST',
      headers: { 'content-type': 'text/plain' },
      body: traceDocument,
    });
  }

  listGestures(user: string): Promise<GestureListing> {
    return this.requestJson(`/users/${encodeURIComponent(user)}/gestures`);
  }
}
