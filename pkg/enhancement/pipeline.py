import logging
import os
from dataclasses import dataclass, field

import numpy as np

from enhancement.denoise_funcs import Bm3dParams, denoise_luma, resolve_sigma
from enhancement.mapping_funcs import DegenerateHistogramError, EnhanceParams, MappingCurve, apply_curve, \
    build_agcwd_curve, build_mapping_curve
from enhancement.retinex_funcs import DecompParams, decompose
from imagecore.color_funcs import hsv_to_rgb, rgb_to_hsv, rgb_to_yuv, yuv_to_rgb
from imagecore.image_io import save_image
from imagecore.image_types import HsvImage, PlaneF, RgbImage, YuvImage, as_plane, check_same_shape


@dataclass(frozen=True)
class PipelineParams:
    decomp: DecompParams = field(default_factory=DecompParams)
    enhance: EnhanceParams = field(default_factory=EnhanceParams)
    bm3d: Bm3dParams = field(default_factory=Bm3dParams)
    denoise_enabled: bool = True
    curve_enabled: bool = True
    keep_intermediates: bool = False


@dataclass(frozen=True)
class EnhanceResult:
    """The enhanced image together with every layer computed on the way."""
    output: RgbImage
    illumination: PlaneF
    reflectance: PlaneF
    illumination_enhanced: PlaneF
    v_enhanced: PlaneF
    intermediate: RgbImage  # RGB of (H, S, V') before luma denoising
    curve: MappingCurve
    sigma_used: float
    threshold_used: float
    curve_fallback: bool = False


def recompose_v(i_enh: PlaneF, r: PlaneF) -> PlaneF:
    """
    Recomposes the brightness plane V' = I' * R, clamped to [0, 1].
    Raises:
        ValueError: If the planes differ in dimensions.
    """
    i_enh, r = as_plane(i_enh, "enhanced illumination"), as_plane(r, "reflectance")
    check_same_shape(i_enh, r)
    return as_plane(np.clip(i_enh * r, 0.0, 1.0), "v_enhanced")


class Pipeline:
    """
    Noise-aware contrast enhancement of underexposed images. The brightness of the HSV image is split
    into illumination and reflectance, the illumination is brightened by a shadow-up curve, the
    brightness is recomposed and the luma of the result is denoised.
    """

    def __init__(self, params: PipelineParams | None = None) -> None:
        self.params = params or PipelineParams()

    def enhance_image(self, img: RgbImage) -> EnhanceResult:
        """
        Runs the full enhancement on an RGB image.
        Args:
            img (RgbImage): Input image with samples in [0, 1].
        Returns:
            EnhanceResult: The output image and all intermediate layers.
        Raises:
            ValueError: If denoising is enabled and the image is smaller than the BM3D block size.
        """
        params = self.params
        if params.denoise_enabled and min(img.shape) < params.bm3d.block_size:
            raise ValueError(f"Image of shape {img.shape} is smaller than the block size {params.bm3d.block_size}.")

        hsv = rgb_to_hsv(img)
        layers = decompose(hsv.v, params.decomp)
        if params.curve_enabled:
            curve = build_mapping_curve(layers.illumination, params.enhance)
        else:
            curve = MappingCurve.identity()
        # a spliced threshold lies strictly inside (0, 255); zero marks the identity fallback
        fallback = params.curve_enabled and curve.threshold == 0.0

        illumination_enhanced = apply_curve(layers.illumination, curve)
        v_enhanced = recompose_v(illumination_enhanced, layers.reflectance)
        intermediate = hsv_to_rgb(HsvImage(hsv.h, hsv.s, v_enhanced))

        yuv = rgb_to_yuv(intermediate)
        sigma_used = 0.0
        y = yuv.y
        if params.denoise_enabled:
            bm3d = resolve_sigma(yuv.y, params.bm3d)
            sigma_used = bm3d.resolved_sigma
            y = denoise_luma(yuv.y, bm3d)
        output = yuv_to_rgb(YuvImage(y, yuv.u, yuv.v))

        return EnhanceResult(output=output, illumination=layers.illumination, reflectance=layers.reflectance,
                             illumination_enhanced=illumination_enhanced, v_enhanced=v_enhanced,
                             intermediate=intermediate, curve=curve, sigma_used=sigma_used,
                             threshold_used=curve.threshold, curve_fallback=fallback)


def agcwd_baseline(img: RgbImage, params: EnhanceParams | None = None) -> RgbImage:
    """
    Enhances an image with plain AGCWD: the full-range curve is built from and applied to the HSV
    brightness directly, without decomposition, threshold or denoising.
    Args:
        img (RgbImage): Input image.
        params (EnhanceParams, optional): Supplies alpha.
    Returns:
        RgbImage: The enhanced image; the input for a constant brightness plane.
    """
    params = params or EnhanceParams()
    hsv = rgb_to_hsv(img)
    try:
        lut = build_agcwd_curve(hsv.v, params.alpha)
    except DegenerateHistogramError as e:
        logging.warning(f"Pipeline: {e} AGCWD baseline returns the input.")
        return img
    v_enhanced = apply_curve(hsv.v, MappingCurve(lut=lut, threshold=255.0))
    return hsv_to_rgb(HsvImage(hsv.h, hsv.s, v_enhanced))


def retinex_agcwd(img: RgbImage, params: PipelineParams | None = None) -> RgbImage:
    """
    Enhances the illumination layer with the full-range AGCWD curve, without threshold or denoising.
    The decomposition and recomposition are those of the full pipeline, so this variant differs from it
    only by the missing shadow-up splice and the missing denoising.
    Args:
        img (RgbImage): Input image.
        params (PipelineParams, optional): Supplies the decomposition parameters and alpha.
    Returns:
        RgbImage: The enhanced image; the input brightness is kept for a constant illumination plane.
    """
    params = params or PipelineParams()
    hsv = rgb_to_hsv(img)
    layers = decompose(hsv.v, params.decomp)
    try:
        curve = MappingCurve(lut=build_agcwd_curve(layers.illumination, params.enhance.alpha), threshold=255.0)
    except DegenerateHistogramError as e:
        logging.warning(f"Pipeline: {e} Retinex AGCWD keeps the illumination.")
        curve = MappingCurve.identity()
    v_enhanced = recompose_v(apply_curve(layers.illumination, curve), layers.reflectance)
    return hsv_to_rgb(HsvImage(hsv.h, hsv.s, v_enhanced))


def write_intermediates(result: EnhanceResult, output_dir: str, stem: str) -> list[str]:
    """
    Writes the illumination, reflectance and enhanced illumination layers as gray PNGs and the curve as CSV.
    Args:
        result (EnhanceResult): The pipeline result.
        output_dir (str): Destination directory.
        stem (str): File name stem of the input image.
    Returns:
        list[str]: The written paths.
    """
    paths = {
        "illum.png": result.illumination,
        "refl.png": result.reflectance,
        "illum-enh.png": result.illumination_enhanced,
    }
    written = []
    for suffix, plane in paths.items():
        path = os.path.join(output_dir, f"{stem}.{suffix}")
        save_image(RgbImage.from_gray(np.clip(plane, 0.0, 1.0)), path)
        written.append(path)
    curve_path = os.path.join(output_dir, f"{stem}.curve.csv")
    result.curve.save_csv(curve_path)
    written.append(curve_path)
    return written
