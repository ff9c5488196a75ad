import numpy as np

from imagecore.image_types import HsvImage, PlaneF, RgbImage, YuvImage

# BT.601 luma weights (full range)
KR = 0.299
KB = 0.114
KG = 1.0 - KR - KB

RGB_TO_YUV = np.array([
    [KR, KG, KB],
    [-0.5 * KR / (1.0 - KB), -0.5 * KG / (1.0 - KB), 0.5],
    [0.5, -0.5 * KG / (1.0 - KR), -0.5 * KB / (1.0 - KR)],
])
YUV_TO_RGB = np.linalg.inv(RGB_TO_YUV)


def rgb_to_hsv(img: RgbImage) -> HsvImage:
    """
    Converts an RGB image into the hexcone HSV model.
    Hue is expressed as a fraction of a turn in [0, 1) and is 0 wherever saturation is 0.
    Args:
        img (RgbImage): The input image.
    Returns:
        HsvImage: The converted image, with v equal to the per-pixel maximum of r, g and b.
    """
    r, g, b = img.r, img.g, img.b
    v = np.maximum(np.maximum(r, g), b)
    delta = v - np.minimum(np.minimum(r, g), b)
    s = np.divide(delta, v, out=np.zeros_like(v), where=v > 0)

    chromatic = delta > 0
    safe_delta = np.where(chromatic, delta, 1.0)
    h6 = np.where(r == v, np.mod((g - b) / safe_delta, 6.0),
                  np.where(g == v, (b - r) / safe_delta + 2.0, (r - g) / safe_delta + 4.0))
    h = np.where(chromatic, h6 / 6.0, 0.0)
    h = np.where(h >= 1.0, h - 1.0, h)  # mod() may round up to exactly one turn
    return HsvImage(h, s, v)


def hsv_to_rgb(img: HsvImage) -> RgbImage:
    """
    Converts an HSV image back to RGB; the exact inverse of rgb_to_hsv on its range.
    Args:
        img (HsvImage): The input image.
    Returns:
        RgbImage: The converted image, clipped to [0, 1].
    """
    h6 = img.h * 6.0
    sector = np.floor(h6)
    f = h6 - sector
    sector = sector.astype(np.int64) % 6
    v, s = img.v, img.s
    p = v * (1.0 - s)
    q = v * (1.0 - s * f)
    t = v * (1.0 - s * (1.0 - f))

    r = np.choose(sector, [v, q, p, p, t, v])
    g = np.choose(sector, [t, v, v, q, p, p])
    b = np.choose(sector, [p, p, t, v, v, q])
    return RgbImage(np.clip(r, 0.0, 1.0), np.clip(g, 0.0, 1.0), np.clip(b, 0.0, 1.0))


def rgb_to_yuv(img: RgbImage) -> YuvImage:
    """
    Converts an RGB image to full-range BT.601 YUV.
    Args:
        img (RgbImage): The input image.
    Returns:
        YuvImage: Luma in [0, 1], chroma in [-0.5, 0.5].
    """
    yuv = img.stack() @ RGB_TO_YUV.T
    return YuvImage(np.clip(yuv[..., 0], 0.0, 1.0),
                    np.clip(yuv[..., 1], -0.5, 0.5),
                    np.clip(yuv[..., 2], -0.5, 0.5))


def yuv_to_rgb(img: YuvImage) -> RgbImage:
    """
    Converts a full-range BT.601 YUV image back to RGB, clamping out-of-gamut results to [0, 1].
    Args:
        img (YuvImage): The input image.
    Returns:
        RgbImage: The converted image.
    """
    yuv = np.stack([img.y, img.u, img.v], axis=-1)
    return RgbImage.from_array(np.clip(yuv @ YUV_TO_RGB.T, 0.0, 1.0))


def luma(img: RgbImage) -> PlaneF:
    """Returns the BT.601 luma plane of an RGB image."""
    return KR * img.r + KG * img.g + KB * img.b
