"""HTTP gateway between browser clients and the game engine.

Endpoints:

    POST /api/sessions                                create a session
    GET  /api/sessions/{session_id}                   session snapshot
    POST /api/sessions/{session_id}/frames            submit one frame
    POST /api/players/{player_id}/templates/{emotion} register a template
    POST /api/players/{player_id}/templates/complete  finish registration
    GET  /api/stats                                   dataset distribution

Adjudication is server-side: clients receive the probability vector (or
the matched emotion in customized mode) for display, but score, lives,
and saved labels are computed here so a tampered client cannot corrupt
the dataset. Errors are the ApiError shape; ``rate_limited`` and
``no_face`` are the retryable codes.
"""

from __future__ import annotations

import base64
import binascii
import time
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import schemas
from .backend import ReferenceBackend, load_backend_file
from .emotions import EMOTIONS, Emotion, ThresholdTable, load_thresholds
from .engine import (
    ActiveTarget,
    CUSTOMIZED,
    CustomizedAdjudicator,
    EngineConfig,
    Event,
    FrameOutcome,
    GameEngine,
    GameOver,
    GameSession,
    GeneralAdjudicator,
    LifeLost,
)
from .errors import (
    ConfigError,
    EmodropError,
    InvalidImageError,
    NoFaceError,
    RateLimitedError,
    UnknownSessionError,
    UnregisteredPlayerError,
)
from .faces import FaceImage
from .store import CollectionStore
from .templates import TemplateRegistry

DEFAULT_MAX_IMAGE_BYTES = 2 * 1024 * 1024

_STATUS_CODES = {
    "invalid_image": 400,
    "no_face": 422,
    "rate_limited": 429,
    "session_over": 409,
    "unregistered_player": 404,
    "incomplete_registration": 409,
    "backend_error": 500,
}


@dataclass
class ServiceSettings:
    dataset_root: Path
    backend_path: Path
    thresholds_path: Path | None = None
    engine_config: EngineConfig = field(default_factory=EngineConfig)
    max_image_bytes: int = DEFAULT_MAX_IMAGE_BYTES
    ui_dir: Path | None = None


class GameService:
    """Wires the backend, registry, store, and engine behind the endpoints."""

    def __init__(self, settings: ServiceSettings):
        self.settings = settings
        self.backend: ReferenceBackend = load_backend_file(settings.backend_path)
        if settings.thresholds_path is not None:
            self.thresholds = load_thresholds(settings.thresholds_path)
        else:
            self.thresholds = ThresholdTable.uniform()
        self.store = CollectionStore(settings.dataset_root)
        self.registry = TemplateRegistry(self.backend,
                                         Path(settings.dataset_root) / "templates")
        self.engine = GameEngine(
            store=self.store,
            config=settings.engine_config,
            adjudicator_factory=self._make_adjudicator,
        )

    def _make_adjudicator(self, mode: str, player_id: str | None):
        if mode == CUSTOMIZED:
            if player_id is None:
                raise UnregisteredPlayerError("customized mode requires player_id")
            return CustomizedAdjudicator(self.registry, player_id)
        return GeneralAdjudicator(self.backend, self.thresholds)

    def decode_image(self, payload: str) -> FaceImage:
        try:
            raw = base64.b64decode(payload, validate=True)
        except (binascii.Error, ValueError):
            raise InvalidImageError("image payload is not valid base64") from None
        if len(raw) > self.settings.max_image_bytes:
            raise InvalidImageError(
                f"image payload {len(raw)} bytes exceeds the "
                f"{self.settings.max_image_bytes} byte limit")
        return FaceImage.from_image_bytes(raw)


def _target_info(target: ActiveTarget | None) -> schemas.TargetInfo | None:
    if target is None:
        return None
    return schemas.TargetInfo(emotion=target.emotion.label,
                              spawn_time=target.spawn_time, deadline=target.deadline)


def _events_out(events: tuple[Event, ...]) -> list[schemas.GameEventOut]:
    out = []
    for event in events:
        if isinstance(event, LifeLost):
            out.append(schemas.GameEventOut(type="life_lost", at=event.at,
                                            lives_remaining=event.lives_remaining))
        elif isinstance(event, GameOver):
            out.append(schemas.GameEventOut(type="game_over", at=event.at,
                                            final_score=event.final_score))
    return out


def _session_state(session: GameSession) -> schemas.SessionState:
    return schemas.SessionState(
        session_id=session.session_id,
        mode=session.mode,
        state=session.state,
        lives=session.lives,
        score=session.score,
        player_id=session.player_id,
        target=_target_info(session.target),
    )


def _frame_response(outcome: FrameOutcome) -> schemas.FrameResponse:
    # `is not None` matters: the angry emotion is index 0 and falsy as an int
    target_emotion = outcome.target_emotion
    matched_emotion = outcome.matched_emotion
    return schemas.FrameResponse(
        status=outcome.status,
        matched=outcome.matched,
        target_emotion=target_emotion.label if target_emotion is not None else None,
        scores=outcome.scores.as_dict() if outcome.scores else None,
        matched_emotion=matched_emotion.label if matched_emotion is not None else None,
        threshold_used=outcome.decision.threshold_used if outcome.decision else None,
        target_score=outcome.decision.target_score if outcome.decision else None,
        saved_record_id=outcome.saved_record_id,
        score=outcome.score,
        lives=outcome.lives,
        state=outcome.state,
        target=_target_info(outcome.target),
        events=_events_out(outcome.events),
    )


def _registration_state(service: GameService, player_id: str) -> schemas.RegistrationState:
    template_set = service.registry.get(player_id)
    registered = template_set.registered if template_set else []
    missing = template_set.missing if template_set else list(EMOTIONS)
    return schemas.RegistrationState(
        player_id=player_id,
        registered=[e.label for e in registered],
        missing=[e.label for e in missing],
        complete=bool(template_set and template_set.complete),
    )


def _error_response(exc: EmodropError) -> JSONResponse:
    code = exc.code
    if isinstance(exc, ConfigError):
        code = "invalid_image"  # client sent an unparseable label or id
    status = _STATUS_CODES[code]
    if isinstance(exc, UnknownSessionError):
        status = 404
    body = schemas.ApiErrorBody(
        code=code,
        message=str(exc) or code,
        retryable=exc.retryable,
        emotion=getattr(exc, "emotion", None),
        missing=getattr(exc, "missing", None),
    )
    return JSONResponse(status_code=status, content=body.model_dump(exclude_none=True))


def create_app(settings: ServiceSettings) -> FastAPI:
    service = GameService(settings)
    app = FastAPI(title="emodrop", version="0.1.0")
    app.state.service = service

    @app.exception_handler(EmodropError)
    async def handle_emodrop_error(request: Request, exc: EmodropError):
        return _error_response(exc)

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(request: Request, exc: RequestValidationError):
        return _error_response(InvalidImageError(f"malformed request: {exc.errors()[:1]}"))

    @app.post("/api/sessions", response_model=schemas.SessionState)
    def create_session(body: schemas.CreateSessionRequest) -> schemas.SessionState:
        session = service.engine.start_session(
            mode=body.mode,
            player_id=body.player_id,
            seed=body.seed,
            now=time.time(),
            scheduler_policy=body.scheduler_policy,
        )
        return _session_state(session)

    @app.get("/api/sessions/{session_id}", response_model=schemas.SessionState)
    def get_session(session_id: str) -> schemas.SessionState:
        session = service.engine.get_session(session_id)
        service.engine.tick(session, time.time())
        return _session_state(session)

    @app.post("/api/sessions/{session_id}/frames", response_model=schemas.FrameResponse)
    def submit_frame(session_id: str, body: schemas.FrameRequest) -> schemas.FrameResponse:
        # body.client_timestamp is advisory; rate limiting and deadlines
        # run on the server clock so a tampered client gains nothing
        session = service.engine.get_session(session_id)
        image = service.decode_image(body.image)
        outcome = service.engine.submit_frame(session, image, now=time.time())
        if outcome.status == "rate_limited":
            raise RateLimitedError("frame arrived inside the minimum frame interval")
        if outcome.status == "no_face":
            raise NoFaceError()
        return _frame_response(outcome)

    # the literal "complete" segment must be routed before the
    # {emotion} capture or it would parse as an emotion label
    @app.post("/api/players/{player_id}/templates/complete",
              response_model=schemas.RegistrationState)
    def complete_registration(player_id: str) -> schemas.RegistrationState:
        service.registry.complete_registration(player_id)
        return _registration_state(service, player_id)

    @app.post("/api/players/{player_id}/templates/{emotion}",
              response_model=schemas.RegistrationState)
    def register_template(player_id: str, emotion: str,
                          body: schemas.RegisterTemplateRequest) -> schemas.RegistrationState:
        target = Emotion.from_label(emotion)
        image = service.decode_image(body.image)
        service.registry.register_template(player_id, target, image)
        return _registration_state(service, player_id)

    @app.get("/api/stats", response_model=schemas.StatsResponse)
    def stats() -> schemas.StatsResponse:
        distribution = service.store.distribution()
        return schemas.StatsResponse(counts=distribution.as_dict(),
                                     total=distribution.total)

    if settings.ui_dir is not None and Path(settings.ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=settings.ui_dir, html=True), name="ui")

    return app
