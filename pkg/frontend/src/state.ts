/** Client-side mirror of server-adjudicated game state.
 *
 * The client never computes score or lives itself: every number shown
 * on screen is copied from the latest server response.
 */

import type {
  EmotionLabel,
  FrameResponse,
  GameEvent,
  SessionState,
  TargetInfo,
} from "./types.js";

export interface ClientGameState {
  sessionId: string | null;
  mode: "general" | "customized";
  state: "running" | "over";
  lives: number;
  score: number;
  target: TargetInfo | null;
  /** last probability vector received, for per-emotion bars */
  bars: Record<EmotionLabel, number> | null;
  lastMatched: EmotionLabel | null;
  finalScore: number | null;
}

export function initialState(): ClientGameState {
  return {
    sessionId: null,
    mode: "general",
    state: "running",
    lives: 0,
    score: 0,
    target: null,
    bars: null,
    lastMatched: null,
    finalScore: null,
  };
}

export function applySession(
  state: ClientGameState,
  session: SessionState,
): ClientGameState {
  return {
    ...state,
    sessionId: session.session_id,
    mode: session.mode,
    state: session.state,
    lives: session.lives,
    score: session.score,
    target: session.target,
    finalScore: session.state === "over" ? session.score : state.finalScore,
  };
}

export function applyFrame(
  state: ClientGameState,
  frame: FrameResponse,
): ClientGameState {
  const gameOver = frame.events.find((e: GameEvent) => e.type === "game_over");
  return {
    ...state,
    state: frame.state,
    lives: frame.lives,
    score: frame.score,
    target: frame.target,
    bars: frame.scores ?? state.bars,
    lastMatched: frame.matched_emotion ?? state.lastMatched,
    finalScore:
      frame.state === "over"
        ? (gameOver?.final_score ?? frame.score)
        : state.finalScore,
  };
}
