"""Emotion-matching game server that collects a labeled face dataset.

Players imitate on-screen emotion targets; the server verifies each
webcam frame against the active target and stores verified frames as an
auto-labeled, balance-steered dataset. Ships a deterministic reference
classifier backend, per-player template matching for the customized game
mode, an HTTP gateway, and an evaluation harness for comparing trained
backends across datasets.
"""

__version__ = "0.1.0"

from .backend import (
    BackendDescriptor,
    FeatureVector,
    ReferenceBackend,
    load_backend,
    load_backend_file,
    make_backend,
)
from .emotions import (
    EMOTIONS,
    Emotion,
    EmotionScores,
    ThresholdTable,
    VerificationDecision,
    normalize_scores,
    top_emotion,
    verify,
)
from .engine import EngineConfig, GameEngine, simulate_session
from .evaluation import EvaluationReport, aggregate_scores, evaluate, format_report
from .faces import FaceImage, FaceRegion, detect_face
from .store import CollectionStore, Distribution, read_distribution
from .templates import TemplateRegistry, TemplateSet
