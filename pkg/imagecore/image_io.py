import os
import re

import cv2
import numpy as np

from imagecore.image_types import RgbImage

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
PPM_MAGIC = b"P6"
# header fields are separated by whitespace and may be interleaved with comments
_PPM_FIELD = re.compile(rb"(?:\s|#[^\n]*\n)+(\d+)")


class UnsupportedFormatError(ValueError):
    """Raised when a file is neither a PNG nor a binary (P6) PPM."""


class CorruptImageError(ValueError):
    """Raised when a PNG or PPM file has a damaged header or truncated sample data."""


def load_image(path: str) -> RgbImage:
    """
    Loads an 8- or 16-bit PNG or a binary PPM file and scales its samples to [0, 1].
    An 8-bit sample k maps to k/255, a 16-bit sample to k/65535 and a PPM sample to k/maxval.
    Gray PNGs are expanded to three equal planes and alpha channels are dropped.
    Args:
        path (str): Path to the image file.
    Returns:
        RgbImage: The decoded image.
    Raises:
        FileNotFoundError: If the file does not exist.
        PermissionError: If the file cannot be read.
        UnsupportedFormatError: If the file is neither PNG nor P6 PPM.
        CorruptImageError: If the header or the sample data is damaged.
    """
    if not os.path.isfile(path):
        raise FileNotFoundError(f"Image not found: {path}")
    with open(path, "rb") as f:
        raw = f.read()

    if raw.startswith(PNG_SIGNATURE):
        return _decode_png(raw, path)
    if raw.startswith(PPM_MAGIC):
        return _decode_ppm(raw, path)
    raise UnsupportedFormatError(f"Unsupported image format (only PNG and binary PPM): {path}")


def _decode_png(raw: bytes, path: str) -> RgbImage:
    buffer = np.frombuffer(raw, dtype=np.uint8)
    bgr = cv2.imdecode(buffer, cv2.IMREAD_COLOR | cv2.IMREAD_ANYDEPTH)
    if bgr is None:
        raise CorruptImageError(f"Could not decode PNG data: {path}")
    max_value = 65535.0 if bgr.dtype == np.uint16 else 255.0
    rgb = bgr[..., ::-1].astype(np.float64) / max_value
    return RgbImage.from_array(rgb)


def _decode_ppm(raw: bytes, path: str) -> RgbImage:
    fields = []
    pos = len(PPM_MAGIC)
    for _ in range(3):
        match = _PPM_FIELD.match(raw, pos)
        if match is None:
            raise CorruptImageError(f"Corrupt PPM header: {path}")
        fields.append(int(match.group(1)))
        pos = match.end()
    width, height, max_value = fields
    if width < 1 or height < 1 or not 0 < max_value < 65536:
        raise CorruptImageError(f"Invalid PPM header values {fields}: {path}")
    if pos >= len(raw) or not raw[pos:pos + 1].isspace():
        raise CorruptImageError(f"Corrupt PPM header: {path}")
    pos += 1

    dtype = np.dtype(">u2") if max_value > 255 else np.dtype(np.uint8)
    expected = width * height * 3 * dtype.itemsize
    data = raw[pos:pos + expected]
    if len(data) < expected:
        raise CorruptImageError(f"Truncated PPM data ({len(data)} of {expected} bytes): {path}")
    samples = np.frombuffer(data, dtype=dtype).reshape(height, width, 3)
    if samples.max() > max_value:
        raise CorruptImageError(f"PPM samples exceed maxval {max_value}: {path}")
    return RgbImage.from_array(samples.astype(np.float64) / max_value)


def to_bytes(img: RgbImage) -> np.ndarray:
    """Quantises an image to 8-bit samples: round(clamp(k, 0, 1) * 255)."""
    return np.rint(np.clip(img.stack(), 0.0, 1.0) * 255.0).astype(np.uint8)


def save_image(img: RgbImage, path: str) -> None:
    """
    Writes an image as an 8-bit PNG.
    Args:
        img (RgbImage): The image to save.
        path (str): Destination path (should end with .png).
    Raises:
        OSError: If the file cannot be written.
    """
    bgr = np.ascontiguousarray(to_bytes(img)[..., ::-1])
    ok, encoded = cv2.imencode(".png", bgr)
    if not ok:
        raise OSError(f"Could not encode PNG for: {path}")
    with open(path, "wb") as f:
        f.write(encoded.tobytes())
