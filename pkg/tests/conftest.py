from __future__ import annotations

import numpy as np
import pytest

from emodrop.backend import ReferenceBackend, make_backend
from emodrop.faces import FaceImage


def random_image(seed: int, width: int = 32, height: int = 32) -> FaceImage:
    rng = np.random.default_rng(seed)
    return FaceImage.from_array(
        rng.integers(0, 256, size=(height, width, 3), dtype=np.uint8))


def constant_image(value: int, width: int = 32, height: int = 32) -> FaceImage:
    return FaceImage.from_array(
        np.full((height, width, 3), value, dtype=np.uint8))


def patterned_image(seed: int, width: int = 32, height: int = 32) -> FaceImage:
    """Distinct, deterministic, high-variance frame keyed by seed."""
    rng = np.random.default_rng(1000 + seed)
    base = rng.integers(0, 256, size=(height, width, 3), dtype=np.uint8)
    base[: height // 2] = (seed * 37) % 256  # strong seed-specific block
    return FaceImage.from_array(base)


@pytest.fixture(scope="session")
def tiny_backend() -> ReferenceBackend:
    return make_backend(input_side=16, feature_dimension=8, seed=7)


@pytest.fixture()
def store_root(tmp_path):
    return tmp_path / "dataset"
