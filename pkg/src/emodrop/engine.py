"""Game session state machine: targets, frame adjudication, lives, score.

One session is single-writer: frame submissions and ticks for the same
session serialize on the session lock; distinct sessions run in parallel.
All timestamps are seconds as floats on whatever clock the caller uses,
wall clock in the HTTP gateway and synthetic time in simulations.

Target scheduling draws from a per-session SplitMix64 stream: one float
per spawn, converted to an emotion by walking cumulative weights in
canonical order. The ``uniform`` policy weights every emotion 1; the
``balance_aware`` policy weights emotion e as (1 + max_count - count_e)
over the current dataset counts, so under-collected classes are scheduled
more often and the stored dataset is pushed toward balance.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Protocol, Sequence

import numpy as np

from .backend import ReferenceBackend
from .emotions import (
    EMOTIONS,
    Emotion,
    EmotionScores,
    ThresholdTable,
    VerificationDecision,
    verify,
)
from .errors import (
    ConfigError,
    IllegalStateError,
    NoFaceError,
    SessionOverError,
    UnknownSessionError,
)
from .faces import FaceImage
from .rng import SplitMix64
from .store import InMemoryStore
from .templates import TemplateRegistry

GENERAL = "general"
CUSTOMIZED = "customized"
MODES = (GENERAL, CUSTOMIZED)

UNIFORM = "uniform"
BALANCE_AWARE = "balance_aware"
POLICIES = (UNIFORM, BALANCE_AWARE)

SAVE_ON_MATCH = "save_on_match"
SAVE_ALL = "save_all"
SAVE_POLICIES = (SAVE_ON_MATCH, SAVE_ALL)

RUNNING = "running"
OVER = "over"

# XOR'd into the session seed to derive the simulated player's stream.
PLAYER_SEED_SALT = 0x504C4159


@dataclass
class EngineConfig:
    initial_lives: int = 5
    bomb_ttl_ms: int = 10_000
    min_frame_interval_ms: int = 500
    scheduler_policy: str = UNIFORM
    save_policy: str = SAVE_ON_MATCH
    thresholds_path: str | None = None
    backend_path: str | None = None

    def __post_init__(self):
        if self.initial_lives < 1:
            raise ConfigError(f"initial_lives must be >= 1, got {self.initial_lives}")
        if self.bomb_ttl_ms <= 0:
            raise ConfigError(f"bomb_ttl_ms must be > 0, got {self.bomb_ttl_ms}")
        if self.min_frame_interval_ms < 0:
            raise ConfigError(f"min_frame_interval_ms must be >= 0")
        if self.scheduler_policy not in POLICIES:
            raise ConfigError(f"scheduler_policy must be one of {POLICIES}")
        if self.save_policy not in SAVE_POLICIES:
            raise ConfigError(f"save_policy must be one of {SAVE_POLICIES}")

    @property
    def bomb_ttl(self) -> float:
        return self.bomb_ttl_ms / 1000.0

    @property
    def min_frame_interval(self) -> float:
        return self.min_frame_interval_ms / 1000.0

    @classmethod
    def parse(cls, text: str) -> "EngineConfig":
        """Parse ``key = value`` lines; unknown keys are rejected."""
        int_keys = {"initial_lives", "bomb_ttl_ms", "min_frame_interval_ms"}
        str_keys = {"scheduler_policy", "save_policy", "thresholds_path", "backend_path"}
        kwargs: dict = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"engine config line {lineno}: expected key=value")
            key, _, value = (part.strip() for part in line.partition("="))
            if key in int_keys:
                try:
                    kwargs[key] = int(value)
                except ValueError:
                    raise ConfigError(f"engine config line {lineno}: bad integer {value!r}")
            elif key in str_keys:
                kwargs[key] = value
            else:
                raise ConfigError(f"engine config line {lineno}: unknown key {key!r}")
        return cls(**kwargs)

    @classmethod
    def load(cls, path: str | Path) -> "EngineConfig":
        return cls.parse(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class ActiveTarget:
    emotion: Emotion
    spawn_time: float
    deadline: float


@dataclass(frozen=True)
class LifeLost:
    at: float
    lives_remaining: int


@dataclass(frozen=True)
class GameOver:
    at: float
    final_score: int


Event = LifeLost | GameOver


@dataclass
class GameSession:
    session_id: str
    mode: str
    player_id: str | None
    lives: int
    initial_lives: int
    score: int
    target: ActiveTarget | None
    state: str
    scheduler_policy: str
    rng_seed: int
    rng: SplitMix64
    bomb_ttl: float
    min_frame_interval: float
    last_accepted: float | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)


@dataclass(frozen=True)
class Adjudication:
    """What the mode-specific judge said about one frame."""

    matched: bool
    target_score: float
    scores: EmotionScores | None = None
    matched_emotion: Emotion | None = None
    decision: VerificationDecision | None = None


class Adjudicator(Protocol):
    def adjudicate(self, target: Emotion, image: FaceImage) -> Adjudication: ...


class GeneralAdjudicator:
    """Shared classifier + per-emotion thresholds (verification)."""

    def __init__(self, backend: ReferenceBackend, thresholds: ThresholdTable):
        self.backend = backend
        self.thresholds = thresholds

    def adjudicate(self, target: Emotion, image: FaceImage) -> Adjudication:
        region = self.backend.detect_face(image)
        if region is None:
            raise NoFaceError()
        scores = self.backend.classify(image, region)
        decision = verify(target, scores, self.thresholds)
        return Adjudication(
            matched=decision.matched,
            target_score=decision.target_score,
            scores=scores,
            decision=decision,
        )


class CustomizedAdjudicator:
    """Nearest-neighbor match against the player's own templates."""

    def __init__(self, registry: TemplateRegistry, player_id: str):
        registry.require_complete(player_id)
        self.registry = registry
        self.player_id = player_id

    def adjudicate(self, target: Emotion, image: FaceImage) -> Adjudication:
        matched_emotion = self.registry.match_template(self.player_id, image)
        matched = matched_emotion == target
        return Adjudication(
            matched=matched,
            target_score=1.0 if matched else 0.0,
            matched_emotion=matched_emotion,
        )


@dataclass(frozen=True)
class FrameOutcome:
    """Result of one submitted frame, with the session snapshot after it."""

    status: str  # "match" | "no_match" | "no_face" | "rate_limited" | "game_over"
    matched: bool
    scored: bool
    target_emotion: Emotion | None
    decision: VerificationDecision | None
    matched_emotion: Emotion | None
    scores: EmotionScores | None
    saved_record_id: str | None
    lives: int
    score: int
    state: str
    target: ActiveTarget | None
    events: tuple[Event, ...]


def draw_target(rng: SplitMix64, policy: str, counts: Sequence[int]) -> Emotion:
    """One scheduling draw; pure in (generator state, policy, counts)."""
    if policy == UNIFORM:
        weights = [1] * len(EMOTIONS)
    elif policy == BALANCE_AWARE:
        top = max(counts)
        weights = [1 + top - counts[int(e)] for e in EMOTIONS]
    else:
        raise ConfigError(f"unknown scheduler policy {policy!r}")
    u = rng.next_float() * sum(weights)
    cumulative = 0
    for e in EMOTIONS:
        cumulative += weights[int(e)]
        if u < cumulative:
            return e
    return EMOTIONS[-1]


AdjudicatorFactory = Callable[[str, str | None], Adjudicator]


class GameEngine:
    """Owns live sessions and adjudicates their frames against a store."""

    def __init__(self, store, config: EngineConfig | None = None,
                 adjudicator_factory: AdjudicatorFactory | None = None):
        self.store = store
        self.config = config or EngineConfig()
        self._factory = adjudicator_factory
        self._sessions: dict[str, GameSession] = {}
        self._adjudicators: dict[str, Adjudicator] = {}
        self._registry_lock = threading.Lock()

    def start_session(self, mode: str = GENERAL, player_id: str | None = None,
                      seed: int | None = None, now: float = 0.0,
                      scheduler_policy: str | None = None) -> GameSession:
        """Create a running session with its first target spawned."""
        if mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")
        if self._factory is None:
            raise IllegalStateError("engine has no adjudicator factory")
        adjudicator = self._factory(mode, player_id)  # may raise UnregisteredPlayerError
        if seed is None:
            seed = uuid.uuid4().int & ((1 << 64) - 1)
        policy = scheduler_policy or self.config.scheduler_policy
        if policy not in POLICIES:
            raise ConfigError(f"scheduler_policy must be one of {POLICIES}")
        session = GameSession(
            session_id=uuid.uuid4().hex,
            mode=mode,
            player_id=player_id,
            lives=self.config.initial_lives,
            initial_lives=self.config.initial_lives,
            score=0,
            target=None,
            state=RUNNING,
            scheduler_policy=policy,
            rng_seed=seed,
            rng=SplitMix64(seed),
            bomb_ttl=self.config.bomb_ttl,
            min_frame_interval=self.config.min_frame_interval,
        )
        self.spawn_target(session, now)
        with self._registry_lock:
            self._sessions[session.session_id] = session
            self._adjudicators[session.session_id] = adjudicator
        return session

    def get_session(self, session_id: str) -> GameSession:
        with self._registry_lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise UnknownSessionError(f"no session {session_id!r}")
        return session

    def spawn_target(self, session: GameSession, now: float) -> ActiveTarget:
        """Draw and install the next target; exactly one is active at a time."""
        if session.target is not None:
            raise IllegalStateError("session already has an active target")
        if session.state != RUNNING:
            raise SessionOverError("cannot spawn a target on a finished session")
        emotion = draw_target(session.rng, session.scheduler_policy, self.store.counts())
        target = ActiveTarget(emotion=emotion, spawn_time=now,
                              deadline=now + session.bomb_ttl)
        session.target = target
        return target

    def _expire_targets(self, session: GameSession, now: float) -> list[Event]:
        """Apply every deadline that has passed by ``now``."""
        events: list[Event] = []
        while (session.state == RUNNING and session.target is not None
               and now >= session.target.deadline):
            expired_at = session.target.deadline
            session.target = None
            session.lives -= 1
            events.append(LifeLost(at=expired_at, lives_remaining=session.lives))
            if session.lives == 0:
                session.state = OVER
                events.append(GameOver(at=expired_at, final_score=session.score))
            else:
                self.spawn_target(session, expired_at)
        return events

    def tick(self, session: GameSession, now: float) -> list[Event]:
        """Advance session time; emits life-loss and game-over events."""
        with session.lock:
            if session.state != RUNNING:
                return []
            return self._expire_targets(session, now)

    def submit_frame(self, session: GameSession, image: FaceImage,
                     now: float) -> FrameOutcome:
        """Adjudicate one frame against the active target.

        Expired deadlines are applied first, so a late frame observes the
        same session a standalone tick would produce. Frames arriving
        sooner than min_frame_interval after the previous accepted frame
        are rejected without adjudication.
        """
        adjudicator = self._adjudicators.get(session.session_id)
        if adjudicator is None:
            raise UnknownSessionError(f"no session {session.session_id!r}")
        with session.lock:
            if session.state != RUNNING:
                raise SessionOverError("session is over")
            events = self._expire_targets(session, now)
            if session.state != RUNNING:
                return self._outcome("game_over", session, events=tuple(events))
            if (session.last_accepted is not None
                    and now - session.last_accepted < session.min_frame_interval):
                return self._outcome("rate_limited", session, events=tuple(events))
            session.last_accepted = now
            target = session.target
            assert target is not None
            try:
                adjudication = adjudicator.adjudicate(target.emotion, image)
            except NoFaceError:
                return self._outcome("no_face", session, events=tuple(events),
                                     target_emotion=target.emotion)
            saved_record_id = None
            if adjudication.matched:
                session.score += 1
                saved_record_id = self._save(session, image, target, adjudication, now)
                session.target = None
                self.spawn_target(session, now)
                status = "match"
            else:
                if self.config.save_policy == SAVE_ALL:
                    saved_record_id = self._save(session, image, target, adjudication, now)
                status = "no_match"
            return self._outcome(
                status, session,
                events=tuple(events),
                target_emotion=target.emotion,
                adjudication=adjudication,
                saved_record_id=saved_record_id,
                scored=adjudication.matched,
            )

    def _save(self, session: GameSession, image: FaceImage, target: ActiveTarget,
              adjudication: Adjudication, now: float) -> str:
        return self.store.save_sample(
            image,
            target.emotion,
            session_id=session.session_id,
            player_id=session.player_id,
            mode=session.mode,
            verified=adjudication.matched,
            target_score=adjudication.target_score,
            timestamp=now,
        )

    @staticmethod
    def _outcome(status: str, session: GameSession, events: tuple[Event, ...] = (),
                 target_emotion: Emotion | None = None,
                 adjudication: Adjudication | None = None,
                 saved_record_id: str | None = None, scored: bool = False) -> FrameOutcome:
        return FrameOutcome(
            status=status,
            matched=bool(adjudication and adjudication.matched),
            scored=scored,
            target_emotion=target_emotion,
            decision=adjudication.decision if adjudication else None,
            matched_emotion=adjudication.matched_emotion if adjudication else None,
            scores=adjudication.scores if adjudication else None,
            saved_record_id=saved_record_id,
            lives=session.lives,
            score=session.score,
            state=session.state,
            target=session.target,
            events=events,
        )


class StochasticAdjudicator:
    """Simulated player: matches the target with probability p[target]."""

    def __init__(self, match_probability: Sequence[float], rng: SplitMix64):
        self.p = tuple(float(v) for v in match_probability)
        if len(self.p) != len(EMOTIONS) or any(not 0.0 <= v <= 1.0 for v in self.p):
            raise ConfigError("match probabilities must be 7 values in [0, 1]")
        self.rng = rng

    def adjudicate(self, target: Emotion, image: FaceImage) -> Adjudication:
        matched = self.rng.next_float() < self.p[int(target)]
        return Adjudication(
            matched=matched,
            target_score=1.0 if matched else 0.0,
            matched_emotion=target if matched else None,
        )


@dataclass(frozen=True)
class SimulationResult:
    final_score: int
    save_counts: tuple[int, ...]
    life_losses: int
    rounds: int
    target_history: tuple[Emotion, ...]


def _dummy_frame() -> FaceImage:
    arr = np.zeros((16, 16, 3), dtype=np.uint8)
    arr[::2, :, :] = 200  # stripes, so the variance gate passes
    return FaceImage.from_array(arr)


def coerce_probabilities(p: float | Sequence[float]) -> tuple[float, ...]:
    if isinstance(p, (int, float)):
        return (float(p),) * len(EMOTIONS)
    return tuple(float(v) for v in p)


def simulate_session(match_probability: float | Sequence[float], seed: int,
                     config: EngineConfig | None = None,
                     max_rounds: int | None = None,
                     store=None) -> SimulationResult:
    """Headless full game: one frame per target, matched with probability p.

    The player draws from a second SplitMix64 stream seeded with
    seed XOR PLAYER_SEED_SALT; frames land halfway through each target's
    lifetime, so keep min_frame_interval below half the bomb ttl.
    """
    cfg = config or EngineConfig()
    probabilities = coerce_probabilities(match_probability)
    sink = store if store is not None else InMemoryStore()
    player = StochasticAdjudicator(probabilities, SplitMix64(seed ^ PLAYER_SEED_SALT))
    engine = GameEngine(store=sink, config=cfg,
                        adjudicator_factory=lambda mode, player_id: player)
    session = engine.start_session(mode=GENERAL, seed=seed, now=0.0)
    frame = _dummy_frame()
    history: list[Emotion] = []
    save_counts = [0] * len(EMOTIONS)
    life_losses = 0
    rounds = 0
    while session.state == RUNNING and (max_rounds is None or rounds < max_rounds):
        rounds += 1
        target = session.target
        assert target is not None
        history.append(target.emotion)
        outcome = engine.submit_frame(session, frame, target.spawn_time + cfg.bomb_ttl / 2)
        life_losses += sum(1 for e in outcome.events if isinstance(e, LifeLost))
        if outcome.saved_record_id is not None:
            save_counts[int(target.emotion)] += 1
        if not outcome.matched and session.state == RUNNING:
            events = engine.tick(session, target.deadline)
            life_losses += sum(1 for e in events if isinstance(e, LifeLost))
    return SimulationResult(
        final_score=session.score,
        save_counts=tuple(save_counts),
        life_losses=life_losses,
        rounds=rounds,
        target_history=tuple(history),
    )
