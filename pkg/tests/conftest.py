import numpy as np
import pytest

from imagecore.color_funcs import luma
from imagecore.image_types import RgbImage
from preprocessing.degradation_funcs import degrade
from preprocessing.scene_funcs import make_scene

NOISE_SIGMA = 25.0 / 255.0


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def clean_scene() -> RgbImage:
    """64x64 natural-structure ground truth."""
    return make_scene("shapes", size=64)


@pytest.fixture(scope="session")
def dark_noisy_scene(clean_scene) -> RgbImage:
    """The ground truth at a quarter of its exposure with seeded noise of 15/255."""
    return degrade(clean_scene, exposure=0.25, noise_sigma=15.0 / 255.0, seed=0)


@pytest.fixture(scope="session")
def test_pattern() -> np.ndarray:
    """Clean 64x64 luma plane of flat regions and sharp edges."""
    return np.asarray(luma(make_scene("shapes", size=64)))


@pytest.fixture(scope="session")
def noisy_pattern(test_pattern) -> np.ndarray:
    return test_pattern + np.random.default_rng(0).normal(0.0, NOISE_SIGMA, test_pattern.shape)
