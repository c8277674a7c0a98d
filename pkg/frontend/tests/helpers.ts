import type {
  EmotionLabel,
  FrameResponse,
  SessionState,
  TargetInfo,
} from "../src/types.js";

export function target(
  emotion: EmotionLabel = "happy",
  spawn = 100,
  deadline = 110,
): TargetInfo {
  return { emotion, spawn_time: spawn, deadline };
}

export function session(overrides: Partial<SessionState> = {}): SessionState {
  return {
    session_id: "s1",
    mode: "general",
    state: "running",
    lives: 5,
    score: 0,
    player_id: null,
    target: target(),
    ...overrides,
  };
}

export function frame(overrides: Partial<FrameResponse> = {}): FrameResponse {
  return {
    status: "no_match",
    matched: false,
    target_emotion: "happy",
    scores: null,
    matched_emotion: null,
    threshold_used: null,
    target_score: null,
    saved_record_id: null,
    score: 0,
    lives: 5,
    state: "running",
    target: target(),
    events: [],
    ...overrides,
  };
}

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}
