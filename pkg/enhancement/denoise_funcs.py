import logging
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
import numpy.typing as npt
from numpy.lib.stride_tricks import sliding_window_view
from scipy.fft import dctn, idctn
from scipy.signal import convolve2d

from imagecore.image_types import PlaneF, as_plane, check_same_shape

# second-difference kernel; annihilates constant and linear ramps
LAPLACIAN_DIFF_KERNEL = np.array([[1.0, -2.0, 1.0],
                                  [-2.0, 4.0, -2.0],
                                  [1.0, -2.0, 1.0]])
KERNEL_NORM = 6.0  # sqrt(sum(k^2)) = sqrt(36)
MAD_TO_STD = 0.6745

AUTO = "auto"


@dataclass(frozen=True)
class Bm3dParams:
    """
    BM3D profile. Distances are mean squared differences of [0, 1] samples; the defaults
    correspond to 2500 and 400 on the [0, 255] scale.
    """
    block_size: int = 8
    search_window: int = 39
    max_matches: int = 16
    step: int = 3
    match_threshold_ht: float = 2500.0 / 255.0 ** 2
    match_threshold_wie: float = 400.0 / 255.0 ** 2
    lambda3d: float = 2.7
    sigma: float | str = AUTO

    def __post_init__(self) -> None:
        if self.block_size < 4:
            raise ValueError("block_size must be at least 4.")
        if self.max_matches < 1 or self.max_matches & (self.max_matches - 1):
            raise ValueError("max_matches must be a power of two.")
        if self.search_window % 2 == 0 or self.search_window <= self.block_size:
            raise ValueError("search_window must be odd and larger than block_size.")
        if self.step < 1:
            raise ValueError("step must be at least 1.")
        if self.sigma != AUTO and not (isinstance(self.sigma, (int, float)) and 0 <= self.sigma <= 1):
            raise ValueError(f"sigma must be '{AUTO}' or a value in [0, 1], got {self.sigma!r}.")

    @property
    def resolved_sigma(self) -> float:
        if self.sigma == AUTO:
            raise ValueError("sigma has not been resolved; call estimate_sigma first.")
        return float(self.sigma)


@dataclass
class BlockGroup:
    """Blocks matched to a reference block, nearest first; the reference is its own first member."""
    reference: tuple[int, int]
    members: list[tuple[int, int]]
    distances: npt.NDArray[np.float64]
    blocks: npt.NDArray[np.float64] = field(repr=False)


def estimate_sigma(y: PlaneF) -> float:
    """
    Estimates the standard deviation of additive white Gaussian noise with a robust MAD estimator
    on the response of a second-difference kernel.
    Args:
        y (PlaneF): Plane with samples in [0, 1], at least 3x3.
    Returns:
        float: The noise estimate in [0, 1].
    Raises:
        ValueError: If the plane is smaller than 3x3.
    """
    y = as_plane(y, "y")
    if min(y.shape) < 3:
        raise ValueError(f"Plane of shape {y.shape} is too small for noise estimation (3x3 minimum).")
    response = convolve2d(y, LAPLACIAN_DIFF_KERNEL, mode="valid")
    sigma = float(np.median(np.abs(response))) / (MAD_TO_STD * KERNEL_NORM)
    return min(max(sigma, 0.0), 1.0)


@lru_cache(maxsize=None)
def haar_matrix(n: int) -> npt.NDArray[np.float64]:
    """Orthonormal Haar transform matrix of size n (a power of two); row 0 is the DC."""
    if n == 1:
        return np.ones((1, 1))
    half = haar_matrix(n // 2)
    top = np.kron(half, [1.0, 1.0])
    bottom = np.kron(np.identity(n // 2), [1.0, -1.0])
    h = np.vstack([top, bottom]) / math.sqrt(2.0)
    h.flags.writeable = False
    return h


def _grid(length: int, block_size: int, step: int) -> list[int]:
    last = length - block_size
    positions = list(range(0, last + 1, step))
    if positions[-1] != last:
        positions.append(last)
    return positions


def _check_size(y: PlaneF, params: Bm3dParams) -> None:
    if min(y.shape) < params.block_size:
        raise ValueError(f"Plane of shape {y.shape} is smaller than the block size {params.block_size}.")


def match_blocks(blocks: npt.NDArray[np.float64], reference: tuple[int, int], params: Bm3dParams,
                 threshold: float) -> BlockGroup:
    """
    Finds the blocks similar to a reference block within the search window.
    Args:
        blocks (ndarray): All blocks of the plane, shape (rows, cols, block_size, block_size).
        reference (tuple): Top-left corner of the reference block.
        params (Bm3dParams): BM3D parameters.
        threshold (float): Maximum mean squared distance of a match.
    Returns:
        BlockGroup: Up to max_matches members (a power of two), sorted by distance.
    """
    rows, cols = blocks.shape[:2]
    r, c = reference
    half = params.search_window // 2
    r0, r1 = max(0, r - half), min(rows, r + half + 1)
    c0, c1 = max(0, c - half), min(cols, c + half + 1)

    window = blocks[r0:r1, c0:c1]
    distances = np.mean((window - blocks[r, c]) ** 2, axis=(2, 3)).ravel()
    ref_index = (r - r0) * (c1 - c0) + (c - c0)
    distances[ref_index] = -1.0  # the reference always sorts first

    candidates = np.flatnonzero(distances <= threshold)
    order = candidates[np.argsort(distances[candidates], kind="stable")]
    count = min(len(order), params.max_matches)
    count = 1 << (count.bit_length() - 1)  # Haar needs a power-of-two group
    order = order[:count]

    members = [(r0 + int(k) // (c1 - c0), c0 + int(k) % (c1 - c0)) for k in order]
    group_distances = np.maximum(distances[order], 0.0)
    return BlockGroup(reference=reference, members=members, distances=group_distances,
                      blocks=np.stack([blocks[m] for m in members]))


def _transform_3d(group: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    spectrum = dctn(group, axes=(1, 2), norm="ortho")
    return np.tensordot(haar_matrix(len(group)), spectrum, axes=(1, 0))


def _inverse_3d(spectrum: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    blocks = np.tensordot(haar_matrix(len(spectrum)).T, spectrum, axes=(1, 0))
    return idctn(blocks, axes=(1, 2), norm="ortho")


def _aggregate(numerator: np.ndarray, denominator: np.ndarray, members: list[tuple[int, int]],
               estimates: np.ndarray, weight: float | np.ndarray, block_size: int) -> None:
    for (r, c), block in zip(members, estimates):
        numerator[r:r + block_size, c:c + block_size] += weight * block
        denominator[r:r + block_size, c:c + block_size] += weight


def bm3d_hard(y: PlaneF, params: Bm3dParams) -> PlaneF:
    """
    First BM3D stage: collaborative hard thresholding of grouped blocks.
    Each group is transformed by a 2D DCT per block and a Haar transform across the group, coefficients
    below lambda3d * sigma are zeroed (the 3D DC is always kept) and the inverse estimates are averaged
    with weights 1 / (number of retained coefficients).
    Args:
        y (PlaneF): Noisy plane with samples in [0, 1], at least block_size in each dimension.
        params (Bm3dParams): Parameters with a resolved sigma.
    Returns:
        PlaneF: The basic estimate in [0, 1]; the input itself when sigma <= 0.
    """
    y = as_plane(y, "y")
    sigma = params.resolved_sigma
    if sigma <= 0:
        return y
    _check_size(y, params)
    bs = params.block_size
    blocks = sliding_window_view(y, (bs, bs))
    numerator = np.zeros(y.shape)
    denominator = np.zeros(y.shape)
    threshold = params.lambda3d * sigma

    for r in _grid(y.shape[0], bs, params.step):
        for c in _grid(y.shape[1], bs, params.step):
            group = match_blocks(blocks, (r, c), params, params.match_threshold_ht)
            spectrum = _transform_3d(group.blocks)
            keep = np.abs(spectrum) >= threshold
            keep[0, 0, 0] = True
            spectrum = np.where(keep, spectrum, 0.0)
            weight = 1.0 / max(np.count_nonzero(spectrum), 1)
            _aggregate(numerator, denominator, group.members, _inverse_3d(spectrum), weight, bs)

    return as_plane(np.clip(numerator / denominator, 0.0, 1.0), "basic estimate")


def bm3d_wiener(y_noisy: PlaneF, y_basic: PlaneF, params: Bm3dParams) -> PlaneF:
    """
    Second BM3D stage: collaborative empirical Wiener filtering.
    Blocks are matched on the basic estimate, groups are taken from both planes and the noisy group's
    3D coefficients are shrunk by w = |C_basic|^2 / (|C_basic|^2 + sigma^2), the 3D DC passing unchanged;
    estimates are averaged with weights 1 / sum(w^2).
    Args:
        y_noisy (PlaneF): Noisy plane.
        y_basic (PlaneF): Basic estimate of the same dimensions.
        params (Bm3dParams): Parameters with a resolved sigma.
    Returns:
        PlaneF: The final estimate in [0, 1]; the basic estimate when sigma <= 0.
    Raises:
        ValueError: If the planes differ in dimensions.
    """
    y_noisy, y_basic = as_plane(y_noisy, "y_noisy"), as_plane(y_basic, "y_basic")
    check_same_shape(y_noisy, y_basic)
    sigma = params.resolved_sigma
    if sigma <= 0:
        return y_basic
    _check_size(y_noisy, params)
    bs = params.block_size
    noisy_blocks = sliding_window_view(y_noisy, (bs, bs))
    basic_blocks = sliding_window_view(y_basic, (bs, bs))
    numerator = np.zeros(y_noisy.shape)
    denominator = np.zeros(y_noisy.shape)

    for r in _grid(y_noisy.shape[0], bs, params.step):
        for c in _grid(y_noisy.shape[1], bs, params.step):
            group = match_blocks(basic_blocks, (r, c), params, params.match_threshold_wie)
            basic_power = _transform_3d(group.blocks) ** 2
            shrinkage = basic_power / (basic_power + sigma ** 2)
            shrinkage[0, 0, 0] = 1.0
            noisy_group = np.stack([noisy_blocks[m] for m in group.members])
            estimates = _inverse_3d(shrinkage * _transform_3d(noisy_group))
            weight = 1.0 / max(float(np.sum(shrinkage ** 2)), 1e-12)
            _aggregate(numerator, denominator, group.members, estimates, weight, bs)

    return as_plane(np.clip(numerator / denominator, 0.0, 1.0), "final estimate")


def resolve_sigma(y: PlaneF, params: Bm3dParams) -> Bm3dParams:
    """Returns the parameters with sigma estimated from the plane when it is 'auto'."""
    if params.sigma != AUTO:
        return params
    sigma = estimate_sigma(y)
    logging.info(f"Denoise: estimated sigma={sigma:.5f}.")
    return replace(params, sigma=sigma)


def denoise_luma(y: PlaneF, params: Bm3dParams) -> PlaneF:
    """
    Denoises a luma plane with both BM3D stages, estimating sigma first when it is 'auto'.
    Args:
        y (PlaneF): Luma plane with samples in [0, 1].
        params (Bm3dParams): BM3D parameters.
    Returns:
        PlaneF: The denoised plane.
    """
    params = resolve_sigma(y, params)
    basic = bm3d_hard(y, params)
    return bm3d_wiener(y, basic, params)
