/** Typed client for the gateway; the only network access in the app. */

import type {
  ApiErrorBody,
  EmotionLabel,
  FrameResponse,
  RegistrationState,
  SessionState,
  StatsResponse,
} from "./types.js";

export class ApiError extends Error {
  readonly code: ApiErrorBody["code"];
  readonly retryable: boolean;
  readonly body: ApiErrorBody;

  constructor(body: ApiErrorBody) {
    super(body.message);
    this.code = body.code;
    this.retryable = body.retryable;
    this.body = body;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class GatewayClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    const payload = (await response.json()) as T | ApiErrorBody;
    if (!response.ok) {
      throw new ApiError(payload as ApiErrorBody);
    }
    return payload as T;
  }

  private post<T>(path: string, body?: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
  }

  createSession(
    mode: "general" | "customized",
    playerId?: string,
  ): Promise<SessionState> {
    const body: Record<string, unknown> = { mode };
    if (playerId) body.player_id = playerId;
    return this.post<SessionState>("/api/sessions", body);
  }

  getSession(sessionId: string): Promise<SessionState> {
    return this.request<SessionState>(`/api/sessions/${sessionId}`);
  }

  submitFrame(sessionId: string, imageBase64: string): Promise<FrameResponse> {
    return this.post<FrameResponse>(`/api/sessions/${sessionId}/frames`, {
      image: imageBase64,
      client_timestamp: Date.now() / 1000,
    });
  }

  registerTemplate(
    playerId: string,
    emotion: EmotionLabel,
    imageBase64: string,
  ): Promise<RegistrationState> {
    return this.post<RegistrationState>(
      `/api/players/${playerId}/templates/${emotion}`,
      { image: imageBase64 },
    );
  }

  completeRegistration(playerId: string): Promise<RegistrationState> {
    return this.post<RegistrationState>(
      `/api/players/${playerId}/templates/complete`,
    );
  }

  stats(): Promise<StatsResponse> {
    return this.request<StatsResponse>("/api/stats");
  }
}
