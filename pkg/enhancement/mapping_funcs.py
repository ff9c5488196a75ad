import logging
import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
import pandas as pd

from imagecore.image_types import PlaneF, as_plane

LEVELS = 256
MAX_LEVEL = LEVELS - 1


class DegenerateHistogramError(ValueError):
    """Raised when a plane's histogram carries too little structure to build a curve from."""


@dataclass(frozen=True)
class EnhanceParams:
    percentile: float = 75.0
    alpha: float = 0.5  # AGCWD weighting exponent
    histogram_bins: int = LEVELS

    def __post_init__(self) -> None:
        if not 0 < self.percentile < 100:
            raise ValueError(f"percentile must be in (0, 100), got {self.percentile}.")
        if not 0 <= self.alpha <= 1:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}.")
        if self.histogram_bins != LEVELS:
            raise ValueError(f"Only {LEVELS} histogram bins are supported.")


@dataclass(frozen=True)
class MappingCurve:
    """A 256-entry transfer function on the [0, 255] scale, with the threshold it was spliced at."""
    lut: npt.NDArray[np.float64]
    threshold: float

    def __post_init__(self) -> None:
        lut = np.asarray(self.lut, dtype=np.float64).copy()
        if lut.shape != (LEVELS,):
            raise ValueError(f"lut must have {LEVELS} entries, got shape {lut.shape}.")
        if lut.min() < 0 or lut.max() > MAX_LEVEL:
            raise ValueError("lut entries must lie in [0, 255].")
        if np.any(np.diff(lut) < 0):
            raise ValueError("lut must be monotonically non-decreasing.")
        if not 0 <= self.threshold <= MAX_LEVEL:
            raise ValueError(f"threshold must lie in [0, 255], got {self.threshold}.")
        lut.flags.writeable = False
        object.__setattr__(self, "lut", lut)

    @classmethod
    def identity(cls) -> "MappingCurve":
        return cls(lut=np.arange(LEVELS, dtype=np.float64), threshold=0.0)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"index": np.arange(LEVELS), "value": self.lut})

    def save_csv(self, path: str) -> None:
        """Writes the curve as 256 lines of (index, value) for plotting."""
        self.to_frame().to_csv(path, index=False, float_format="%.6f")


def compute_threshold(i: PlaneF, percentile: float) -> float:
    """
    Computes the adaptive threshold I_th on the [0, 255] scale.
    With P the nearest-rank percentile of the plane and I_max its maximum, I_th is 255 minus the
    mean of all samples strictly between P and I_max; brighter planes therefore get smaller thresholds.
    Args:
        i (PlaneF): Illumination plane with samples in [0, 1].
        percentile (float): Percentile in (0, 100).
    Returns:
        float: The threshold in [0, 255].
    Raises:
        DegenerateHistogramError: If no sample lies strictly between the percentile and the maximum.
    """
    if not 0 < percentile < 100:
        raise ValueError(f"percentile must be in (0, 100), got {percentile}.")
    levels = np.sort(as_plane(i, "illumination").ravel() * MAX_LEVEL)
    rank = math.ceil(percentile / 100.0 * levels.size)
    p = levels[max(rank, 1) - 1]
    i_max = levels[-1]
    between = levels[(levels > p) & (levels < i_max)]
    if between.size == 0:
        raise DegenerateHistogramError(f"No samples strictly between the {percentile}th percentile and the maximum.")
    # fsum keeps the mean independent of summation order
    return MAX_LEVEL - math.fsum(between.tolist()) / between.size


def build_agcwd_curve(i: PlaneF, alpha: float, l_max: float = MAX_LEVEL) -> npt.NDArray[np.float64]:
    """
    Builds the adaptive gamma correction curve with weighting distribution.
        pdf_w(l) = pdf_max * ((pdf(l) - pdf_min) / (pdf_max - pdf_min)) ** alpha
        cdf_w(l) = sum_{k <= l} pdf_w(k) / sum_k pdf_w(k)
        lut[l]   = l_max * (l / l_max) ** (1 - cdf_w(l)),  lut[0] = 0
    A flat histogram is left unweighted. With the default l_max of 255 this is the full-range curve.
    Args:
        i (PlaneF): Illumination plane with samples in [0, 1].
        alpha (float): Weighting exponent in [0, 1].
        l_max (float, optional): Maximum intensity on the [0, 255] scale the curve saturates at. Default is 255.
    Returns:
        ndarray: The 256-entry curve on the [0, 255] scale.
    Raises:
        DegenerateHistogramError: If the plane is constant.
    """
    if not 0 < l_max <= MAX_LEVEL:
        raise ValueError(f"l_max must be in (0, 255], got {l_max}.")
    levels = np.rint(as_plane(i, "illumination").ravel() * MAX_LEVEL).astype(np.int64)
    hist = np.bincount(np.clip(levels, 0, MAX_LEVEL), minlength=LEVELS).astype(np.float64)
    if np.count_nonzero(hist) < 2:
        raise DegenerateHistogramError("Histogram of a constant plane.")
    pdf = hist / hist.sum()
    pdf_max, pdf_min = pdf.max(), pdf.min()
    if pdf_max > pdf_min:
        pdf_w = pdf_max * ((pdf - pdf_min) / (pdf_max - pdf_min)) ** alpha
    else:
        pdf_w = pdf
    cdf_w = np.cumsum(pdf_w) / pdf_w.sum()

    l = np.arange(LEVELS, dtype=np.float64)
    lut = l_max * (l / l_max) ** (1.0 - cdf_w)
    lut[0] = 0.0
    return np.clip(lut, 0.0, MAX_LEVEL)


def splice_curve(agcwd: npt.NDArray[np.float64], threshold: float) -> npt.NDArray[np.float64]:
    """
    Splices a curve with the identity at the threshold (shadow-up function).
    Levels below the threshold take the curve, rescaled so that it meets the identity at the
    threshold and floored at the identity; levels at or above it are left unchanged.
    Args:
        agcwd (ndarray): Monotone curve on the [0, 255] scale.
        threshold (float): Splice point in [0, 255].
    Returns:
        ndarray: The spliced, non-decreasing curve.
    """
    l = np.arange(LEVELS, dtype=np.float64)
    below = l < threshold
    lower = agcwd.astype(np.float64).copy()
    anchor = lower[min(int(math.floor(threshold)), MAX_LEVEL)]
    if anchor > 0:
        lower *= threshold / anchor
    lut = np.where(below, np.maximum(lower, l), l)
    return np.clip(np.maximum.accumulate(lut), 0.0, MAX_LEVEL)


def build_mapping_curve(i: PlaneF, params: EnhanceParams) -> MappingCurve:
    """
    Builds the shadow-up mapping curve of an illumination plane: AGCWD below the adaptive threshold,
    identity at and above it. The AGCWD part saturates at the brightest illumination level, so after the
    splice the brightest sub-threshold pixels are lifted up to the threshold.
    Args:
        i (PlaneF): Illumination plane with samples in [0, 1].
        params (EnhanceParams): Enhancement parameters.
    Returns:
        MappingCurve: The curve; the identity curve with threshold 0 for degenerate histograms.
    """
    try:
        threshold = compute_threshold(i, params.percentile)
        i_max = min(float(np.max(as_plane(i, "illumination"))) * MAX_LEVEL, MAX_LEVEL)
        agcwd = build_agcwd_curve(i, params.alpha, l_max=i_max)
    except DegenerateHistogramError as e:
        logging.warning(f"Enhance: {e} Falling back to the identity curve.")
        return MappingCurve.identity()
    return MappingCurve(lut=splice_curve(agcwd, threshold), threshold=threshold)


def apply_curve(i: PlaneF, curve: MappingCurve) -> PlaneF:
    """
    Applies a mapping curve to a plane by linear interpolation between the 256 entries.
    Args:
        i (PlaneF): Plane with samples in [0, 1].
        curve (MappingCurve): The curve to apply.
    Returns:
        PlaneF: The mapped plane in [0, 1].
    """
    levels = as_plane(i).clip(0.0, 1.0) * MAX_LEVEL
    mapped = np.interp(levels, np.arange(LEVELS, dtype=np.float64), curve.lut) / MAX_LEVEL
    return as_plane(np.clip(mapped, 0.0, 1.0))
