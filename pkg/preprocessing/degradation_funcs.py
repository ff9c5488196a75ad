import numpy as np

from imagecore.image_types import RgbImage


def degradation_func(img: RgbImage, kind: str, intensity: float, rng: np.random.Generator | None = None) -> RgbImage:
    """
    Applies a single degradation to an image.
    Args:
        img (RgbImage): The clean image.
        kind (str): The degradation to apply ('exposure', 'noise').
        intensity (float): Exposure factor in (0, 1] or noise standard deviation in [0, 1].
        rng (np.random.Generator, optional): Random generator for the noise degradation.
    Returns:
        RgbImage: The degraded image.
    Raises:
        ValueError: If an invalid degradation is specified.
    """
    if kind == "exposure":
        return underexpose(img, intensity)
    elif kind == "noise":
        return add_gaussian_noise(img, intensity, rng if rng is not None else np.random.default_rng(0))
    else:
        raise ValueError(f"Invalid degradation specified: {kind}.")


def underexpose(img: RgbImage, factor: float) -> RgbImage:
    """Scales every sample by the exposure factor in (0, 1]."""
    if not 0 < factor <= 1:
        raise ValueError(f"Exposure factor must be in (0, 1], got {factor}.")
    return RgbImage.from_array(img.stack() * factor)


def add_gaussian_noise(img: RgbImage, sigma: float, rng: np.random.Generator) -> RgbImage:
    """Adds white Gaussian noise of standard deviation sigma to every sample and clips to [0, 1]."""
    if not 0 <= sigma <= 1:
        raise ValueError(f"Noise sigma must be in [0, 1], got {sigma}.")
    if sigma == 0:
        return img
    arr = img.stack()
    return RgbImage.from_array(np.clip(arr + rng.normal(0.0, sigma, arr.shape), 0.0, 1.0))


def degrade(img: RgbImage, exposure: float = 0.25, noise_sigma: float = 15.0 / 255.0, seed: int = 0) -> RgbImage:
    """
    Simulates an underexposed, noisy capture of a clean image: exposure scaling, then seeded Gaussian noise.
    Args:
        img (RgbImage): The clean image.
        exposure (float, optional): Exposure factor. Default is 0.25.
        noise_sigma (float, optional): Noise standard deviation. Default is 15/255.
        seed (int, optional): Seed of the noise realization. Default is 0.
    Returns:
        RgbImage: The degraded image.
    """
    rng = np.random.default_rng(seed)
    return degradation_func(degradation_func(img, "exposure", exposure), "noise", noise_sigma, rng)
