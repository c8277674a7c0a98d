"""Pydantic request/response models for the HTTP gateway.

Every endpoint returns either its documented success model or the
ApiError shape; there is no third response form.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field


class TargetInfo(BaseModel):
    emotion: str
    spawn_time: float
    deadline: float


class CreateSessionRequest(BaseModel):
    mode: Literal["general", "customized"] = "general"
    player_id: str | None = None
    seed: int | None = None
    scheduler_policy: Literal["uniform", "balance_aware"] | None = None


class SessionState(BaseModel):
    session_id: str
    mode: str
    state: Literal["running", "over"]
    lives: int
    score: int
    player_id: str | None = None
    target: TargetInfo | None = None


class FrameRequest(BaseModel):
    image: str = Field(description="base64-encoded PNG or JPEG bytes")
    client_timestamp: float | None = None


class GameEventOut(BaseModel):
    type: Literal["life_lost", "game_over"]
    at: float
    lives_remaining: int | None = None
    final_score: int | None = None


class FrameResponse(BaseModel):
    status: Literal["match", "no_match", "game_over"]
    matched: bool
    target_emotion: str | None = None
    scores: dict[str, float] | None = None
    matched_emotion: str | None = None
    threshold_used: float | None = None
    target_score: float | None = None
    saved_record_id: str | None = None
    score: int
    lives: int
    state: Literal["running", "over"]
    target: TargetInfo | None = None
    events: list[GameEventOut] = []


class RegisterTemplateRequest(BaseModel):
    image: str = Field(description="base64-encoded PNG or JPEG bytes")


class RegistrationState(BaseModel):
    player_id: str
    registered: list[str]
    missing: list[str]
    complete: bool


class StatsResponse(BaseModel):
    counts: dict[str, int]
    total: int


class ApiErrorBody(BaseModel):
    code: Literal[
        "invalid_image",
        "no_face",
        "rate_limited",
        "session_over",
        "unregistered_player",
        "incomplete_registration",
        "backend_error",
    ]
    message: str
    retryable: bool
    emotion: str | None = None
    missing: list[str] | None = None
