import numpy as np
import numpy.typing as npt

from imagecore.image_types import RgbImage

SCENE_KINDS = ["gradient", "shapes", "textured"]


def _coordinates(size: int) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    axis = np.linspace(0.0, 1.0, size)
    return np.meshgrid(axis, axis)


def gradient_scene(size: int) -> RgbImage:
    """Smooth diagonal shading with a bright top-right corner and gently varying hue."""
    x, y = _coordinates(size)
    base = 0.15 + 0.7 * (x + (1.0 - y)) / 2.0
    return RgbImage.from_array(np.clip(np.stack([base, base * 0.9 + 0.05 * x, base * 0.8 + 0.1 * y], -1), 0, 1))


def shapes_scene(size: int) -> RgbImage:
    """A shaded background with a bright disc, a dark square and a mid-gray bar: flat regions and sharp edges."""
    x, y = _coordinates(size)
    img = np.stack([0.35 + 0.2 * x, 0.4 + 0.1 * y, 0.3 + 0.15 * (1 - x)], -1)
    disc = (x - 0.65) ** 2 + (y - 0.35) ** 2 < 0.2 ** 2
    img[disc] = [0.95, 0.9, 0.8]
    square = (np.abs(x - 0.25) < 0.15) & (np.abs(y - 0.7) < 0.15)
    img[square] = [0.1, 0.15, 0.25]
    bar = np.abs(y - 0.9) < 0.04
    img[bar] = [0.55, 0.55, 0.55]
    return RgbImage.from_array(np.clip(img, 0, 1))


def textured_scene(size: int, seed: int = 0) -> RgbImage:
    """Shapes scene overlaid with a smooth sinusoidal texture whose phase depends on the seed."""
    x, y = _coordinates(size)
    phase = np.random.default_rng(seed).uniform(0, 2 * np.pi, 2)
    texture = 0.08 * np.sin(12 * np.pi * x + phase[0]) * np.cos(9 * np.pi * y + phase[1])
    base = shapes_scene(size).stack()
    return RgbImage.from_array(np.clip(base + texture[..., None], 0, 1))


def make_scene(kind: str, size: int = 64, seed: int = 0) -> RgbImage:
    """
    Builds a synthetic natural-structure ground truth.
    Args:
        kind (str): Scene type ('gradient', 'shapes', 'textured').
        size (int, optional): Width and height in pixels. Default is 64.
        seed (int, optional): Seed for randomised scenes. Default is 0.
    Returns:
        RgbImage: The scene.
    Raises:
        ValueError: If an invalid scene type is specified.
    """
    if size < 2:
        raise ValueError("Scene size must be at least 2.")
    if kind == "gradient":
        return gradient_scene(size)
    elif kind == "shapes":
        return shapes_scene(size)
    elif kind == "textured":
        return textured_scene(size, seed)
    else:
        raise ValueError(f"Invalid scene type specified: {kind}.")
