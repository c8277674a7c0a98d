/** Wire types mirroring the gateway's JSON bodies. */

export const EMOTION_LABELS = [
  "angry",
  "disgust",
  "fear",
  "happy",
  "neutral",
  "sad",
  "surprise",
] as const;

export type EmotionLabel = (typeof EMOTION_LABELS)[number];

export interface TargetInfo {
  emotion: EmotionLabel;
  spawn_time: number; // server epoch seconds
  deadline: number;
}

export interface SessionState {
  session_id: string;
  mode: "general" | "customized";
  state: "running" | "over";
  lives: number;
  score: number;
  player_id: string | null;
  target: TargetInfo | null;
}

export interface GameEvent {
  type: "life_lost" | "game_over";
  at: number;
  lives_remaining?: number | null;
  final_score?: number | null;
}

export interface FrameResponse {
  status: "match" | "no_match" | "game_over";
  matched: boolean;
  target_emotion: EmotionLabel | null;
  scores: Record<EmotionLabel, number> | null;
  matched_emotion: EmotionLabel | null;
  threshold_used: number | null;
  target_score: number | null;
  saved_record_id: string | null;
  score: number;
  lives: number;
  state: "running" | "over";
  target: TargetInfo | null;
  events: GameEvent[];
}

export interface RegistrationState {
  player_id: string;
  registered: EmotionLabel[];
  missing: EmotionLabel[];
  complete: boolean;
}

export interface StatsResponse {
  counts: Record<EmotionLabel, number>;
  total: number;
}

export interface ApiErrorBody {
  code:
    | "invalid_image"
    | "no_face"
    | "rate_limited"
    | "session_over"
    | "unregistered_player"
    | "incomplete_registration"
    | "backend_error";
  message: string;
  retryable: boolean;
  emotion?: EmotionLabel;
  missing?: EmotionLabel[];
}
