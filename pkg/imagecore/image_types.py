from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

# Single-channel floating-point plane, shape (height, width), row-major.
PlaneF = npt.NDArray[np.float64]


def as_plane(data: npt.ArrayLike, name: str = "plane") -> PlaneF:
    """
    Converts array-like data into a read-only float64 plane and validates it.
    Args:
        data (ArrayLike): Two-dimensional samples.
        name (str, optional): Name used in error messages. Default is "plane".
    Returns:
        PlaneF: A read-only view of the samples as float64.
    Raises:
        ValueError: If the data is not two-dimensional, is empty or contains non-finite samples.
    """
    plane = np.asarray(data, dtype=np.float64)
    if plane.ndim != 2:
        raise ValueError(f"{name} must be two-dimensional, got shape {plane.shape}.")
    if plane.size == 0:
        raise ValueError(f"{name} must not be empty.")
    if not np.all(np.isfinite(plane)):
        raise ValueError(f"{name} contains non-finite samples.")
    view = plane.view()
    view.flags.writeable = False
    return view


def check_same_shape(*planes: PlaneF) -> None:
    """
    Checks that all given planes share the same dimensions.
    Raises:
        ValueError: If any two planes differ in shape.
    """
    shapes = {p.shape for p in planes}
    if len(shapes) > 1:
        raise ValueError(f"Dimension mismatch between planes: {sorted(shapes)}.")


def _check_range(plane: PlaneF, low: float, high: float, name: str, tol: float = 1e-9) -> None:
    if plane.min() < low - tol or plane.max() > high + tol:
        raise ValueError(f"{name} samples must lie in [{low}, {high}], got [{plane.min()}, {plane.max()}].")


@dataclass(frozen=True)
class RgbImage:
    """Three RGB planes of identical dimensions with samples in [0, 1]."""
    r: PlaneF
    g: PlaneF
    b: PlaneF

    def __post_init__(self) -> None:
        for name in ("r", "g", "b"):
            object.__setattr__(self, name, as_plane(getattr(self, name), name))
            _check_range(getattr(self, name), 0.0, 1.0, name)
        check_same_shape(self.r, self.g, self.b)

    @property
    def shape(self) -> tuple[int, int]:
        return self.r.shape

    def stack(self) -> npt.NDArray[np.float64]:
        """Returns the planes as an array of shape (height, width, 3)."""
        return np.stack([self.r, self.g, self.b], axis=-1)

    @classmethod
    def from_array(cls, array: npt.ArrayLike) -> "RgbImage":
        """Builds an image from an array of shape (height, width, 3)."""
        arr = np.asarray(array, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValueError(f"Expected an array of shape (height, width, 3), got {arr.shape}.")
        return cls(arr[..., 0], arr[..., 1], arr[..., 2])

    @classmethod
    def from_gray(cls, plane: npt.ArrayLike) -> "RgbImage":
        """Builds a gray image with r = g = b = plane."""
        p = as_plane(plane)
        return cls(p, p, p)


@dataclass(frozen=True)
class HsvImage:
    """Hue as a fraction of a turn in [0, 1), saturation and value in [0, 1]."""
    h: PlaneF
    s: PlaneF
    v: PlaneF

    def __post_init__(self) -> None:
        for name in ("h", "s", "v"):
            object.__setattr__(self, name, as_plane(getattr(self, name), name))
        _check_range(self.h, 0.0, 1.0, "h")
        _check_range(self.s, 0.0, 1.0, "s")
        _check_range(self.v, 0.0, 1.0, "v")
        check_same_shape(self.h, self.s, self.v)

    @property
    def shape(self) -> tuple[int, int]:
        return self.v.shape


@dataclass(frozen=True)
class YuvImage:
    """Full-range luma in [0, 1] and chroma planes in [-0.5, 0.5]."""
    y: PlaneF
    u: PlaneF
    v: PlaneF

    def __post_init__(self) -> None:
        for name in ("y", "u", "v"):
            object.__setattr__(self, name, as_plane(getattr(self, name), name))
        _check_range(self.y, 0.0, 1.0, "y")
        _check_range(self.u, -0.5, 0.5, "u")
        _check_range(self.v, -0.5, 0.5, "v")
        check_same_shape(self.y, self.u, self.v)

    @property
    def shape(self) -> tuple[int, int]:
        return self.y.shape
