"""Thin HTTP client for the gateway; used by the CLI and scripted players."""

from __future__ import annotations

import base64
import time
from dataclasses import dataclass
from typing import Any

import httpx

from .errors import EmodropError
from .faces import FaceImage


class ApiError(EmodropError):
    """Server-reported error, decoded from the ApiError wire shape."""

    def __init__(self, status_code: int, payload: dict[str, Any]):
        super().__init__(payload.get("message", "request failed"))
        self.status_code = status_code
        self.code = payload.get("code", "backend_error")
        self.retryable = bool(payload.get("retryable", False))
        self.payload = payload


@dataclass
class FrameResult:
    status: str
    matched: bool
    score: int
    lives: int
    state: str
    raw: dict[str, Any]


class GameClient:
    def __init__(self, base_url: str, timeout: float = 10.0):
        self.http = httpx.Client(base_url=base_url, timeout=timeout)

    def close(self) -> None:
        self.http.close()

    def __enter__(self) -> "GameClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _unwrap(self, response: httpx.Response) -> dict[str, Any]:
        payload = response.json()
        if response.status_code >= 400:
            raise ApiError(response.status_code, payload)
        return payload

    def create_session(self, mode: str = "general", player_id: str | None = None,
                       seed: int | None = None,
                       scheduler_policy: str | None = None) -> dict[str, Any]:
        body: dict[str, Any] = {"mode": mode}
        if player_id is not None:
            body["player_id"] = player_id
        if seed is not None:
            body["seed"] = seed
        if scheduler_policy is not None:
            body["scheduler_policy"] = scheduler_policy
        return self._unwrap(self.http.post("/api/sessions", json=body))

    def get_session(self, session_id: str) -> dict[str, Any]:
        return self._unwrap(self.http.get(f"/api/sessions/{session_id}"))

    def submit_frame(self, session_id: str, image: FaceImage,
                     client_timestamp: float | None = None) -> dict[str, Any]:
        body = {
            "image": base64.b64encode(image.to_png_bytes()).decode("ascii"),
            "client_timestamp": client_timestamp if client_timestamp is not None else time.time(),
        }
        return self._unwrap(self.http.post(f"/api/sessions/{session_id}/frames", json=body))

    def register_template(self, player_id: str, emotion: str,
                          image: FaceImage) -> dict[str, Any]:
        body = {"image": base64.b64encode(image.to_png_bytes()).decode("ascii")}
        return self._unwrap(
            self.http.post(f"/api/players/{player_id}/templates/{emotion}", json=body))

    def complete_registration(self, player_id: str) -> dict[str, Any]:
        return self._unwrap(self.http.post(f"/api/players/{player_id}/templates/complete"))

    def stats(self) -> dict[str, Any]:
        return self._unwrap(self.http.get("/api/stats"))
