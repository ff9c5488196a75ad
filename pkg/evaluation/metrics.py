import json
import math
from dataclasses import asdict, dataclass

import numpy as np
import numpy.typing as npt
from skimage.metrics import structural_similarity

from enhancement.denoise_funcs import estimate_sigma
from imagecore.color_funcs import luma
from imagecore.image_types import PlaneF, RgbImage

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03
REPORT_METRICS = ["psnr_db", "ssim", "mean_luma", "std_luma", "sigma_estimate"]


@dataclass(frozen=True)
class MetricReport:
    psnr_db: float | None
    ssim: float | None
    mean_luma: float
    std_luma: float
    sigma_estimate: float

    def to_line(self, **extra) -> str:
        """Formats the report as one JSON line with a stable key order; infinite values (PSNR of identical
        images) are written as null."""
        values = {**extra, **asdict(self)}
        for key, value in values.items():
            if isinstance(value, float) and math.isinf(value):
                values[key] = None
        return json.dumps(values, allow_nan=False)


def _samples(img: PlaneF | RgbImage) -> npt.NDArray[np.float64]:
    return img.stack() if isinstance(img, RgbImage) else np.asarray(img, dtype=np.float64)


def psnr(a: PlaneF | RgbImage, b: PlaneF | RgbImage) -> float:
    """
    Computes the peak signal-to-noise ratio 10 * log10(1 / MSE) for samples in [0, 1].
    Args:
        a (PlaneF | RgbImage): First plane or image.
        b (PlaneF | RgbImage): Second plane or image of the same kind and dimensions.
    Returns:
        float: PSNR in dB; math.inf for identical inputs.
    Raises:
        ValueError: If the inputs differ in dimensions.
    """
    x, y = _samples(a), _samples(b)
    if x.shape != y.shape:
        raise ValueError(f"Dimension mismatch: {x.shape} vs {y.shape}.")
    mse = float(np.mean((x - y) ** 2))
    if mse == 0:
        return math.inf
    return 10.0 * math.log10(1.0 / mse)


def ssim(a: PlaneF, b: PlaneF) -> float:
    """
    Computes the single-scale structural similarity of two planes with an 11x11 Gaussian window
    (sigma 1.5), k1 = 0.01, k2 = 0.03 and dynamic range 1, averaged over all valid window positions.
    Args:
        a (PlaneF): First plane.
        b (PlaneF): Second plane.
    Returns:
        float: SSIM in [-1, 1].
    Raises:
        ValueError: If the planes differ in dimensions or are smaller than the window.
    """
    x, y = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"Dimension mismatch: {x.shape} vs {y.shape}.")
    if min(x.shape) < SSIM_WINDOW:
        raise ValueError(f"Planes of shape {x.shape} are smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} window.")
    # the Gaussian window truncates at 3.5 sigma, which is 11x11 for sigma 1.5
    value = structural_similarity(x, y, data_range=1.0, gaussian_weights=True, sigma=SSIM_SIGMA,
                                  use_sample_covariance=False, K1=SSIM_K1, K2=SSIM_K2)
    return float(np.clip(value, -1.0, 1.0))


def luma_stats(img: RgbImage) -> tuple[float, float, float]:
    """
    Computes mean and standard deviation of the BT.601 luma and its estimated noise level.
    Args:
        img (RgbImage): The image.
    Returns:
        tuple: (mean_luma, std_luma, sigma_estimate); the noise level is 0 for images below 3x3.
    """
    return (compute_metric(img, None, "mean_luma"), compute_metric(img, None, "std_luma"),
            compute_metric(img, None, "sigma_estimate"))


def compute_metric(img: RgbImage, reference: RgbImage | None, metric: str) -> float | None:
    """
    Computes the specified metric of an image, against the reference for full-reference metrics.
    Args:
        img (RgbImage): The evaluated image.
        reference (RgbImage | None): Ground truth; full-reference metrics are None without it.
        metric (str): Metric to compute, one of REPORT_METRICS.
    Returns:
        float | None: Computed metric score; SSIM is None for images smaller than its window.
    Raises:
        ValueError: If an invalid metric type is specified.
    """
    if metric == "psnr_db":
        return psnr(img, reference) if reference is not None else None
    elif metric == "ssim":
        if reference is None or min(img.shape) < SSIM_WINDOW:
            return None
        return ssim(luma(img), luma(reference))
    elif metric == "mean_luma":
        return float(luma(img).mean())
    elif metric == "std_luma":
        return float(luma(img).std())
    elif metric == "sigma_estimate":
        y = luma(img)
        return estimate_sigma(y) if min(y.shape) >= 3 else 0.0
    else:
        raise ValueError(f"Invalid metric specified: {metric}.")


def metric_report(img: RgbImage, reference: RgbImage | None = None) -> MetricReport:
    """
    Builds the full report of an image.
    Args:
        img (RgbImage): The evaluated image.
        reference (RgbImage, optional): Ground truth for PSNR and SSIM.
    Returns:
        MetricReport: The report.
    """
    return MetricReport(**{metric: compute_metric(img, reference, metric) for metric in REPORT_METRICS})
