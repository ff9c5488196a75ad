import logging
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import cg

from imagecore.image_types import PlaneF, as_plane, check_same_shape


@dataclass(frozen=True)
class DecompParams:
    """Tunables of the illumination/reflectance decomposition."""
    lam: float = 0.15  # smoothness weight
    eps_grad: float = 0.01  # floor of the gradient magnitude in the edge weights
    max_iters: int = 500
    tol: float = 1e-5  # relative residual of the CG solve
    eps_div: float = 1.0 / 255.0  # floor of the illumination when dividing

    def __post_init__(self) -> None:
        if self.lam <= 0:
            raise ValueError("lam must be positive.")
        if self.eps_grad <= 0:
            raise ValueError("eps_grad must be positive.")
        if self.eps_div <= 0:
            raise ValueError("eps_div must be positive.")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1.")
        if self.tol <= 0:
            raise ValueError("tol must be positive.")


@dataclass(frozen=True)
class Decomposition:
    illumination: PlaneF
    reflectance: PlaneF


def _forward_difference(n: int) -> sparse.csr_matrix:
    """(n-1) x n forward-difference operator; the replicated boundary difference is zero and dropped."""
    return sparse.diags([-np.ones(n - 1), np.ones(n - 1)], [0, 1], shape=(n - 1, n), format="csr")


def difference_operators(height: int, width: int) -> list[sparse.csr_matrix]:
    """
    Builds the horizontal and vertical forward-difference operators for a row-major plane.
    Operators for an axis of length one are omitted, as no differences exist along it.
    Args:
        height (int): Plane height.
        width (int): Plane width.
    Returns:
        list[sparse.csr_matrix]: The operators, each mapping a flattened plane to its differences.
    """
    ops = []
    if width > 1:
        ops.append(sparse.kron(sparse.identity(height), _forward_difference(width), format="csr"))
    if height > 1:
        ops.append(sparse.kron(_forward_difference(height), sparse.identity(width), format="csr"))
    return ops


def build_system(v: PlaneF, params: DecompParams) -> tuple[sparse.csr_matrix, np.ndarray]:
    """
    Builds the normal equations A x = b of the weighted smoothness energy
        E(I) = sum (I - v)^2 + lam * sum_d w_d * (D_d I)^2,   w_d = 1 / (|D_d v| + eps_grad)
    which are A = Id + lam * sum_d D_d^T W_d D_d and b = v.
    Args:
        v (PlaneF): Brightness plane.
        params (DecompParams): Decomposition parameters.
    Returns:
        tuple: The sparse symmetric positive-definite matrix A and the flattened right-hand side b.
    """
    height, width = v.shape
    b = v.ravel().astype(np.float64)
    a = sparse.identity(height * width, format="csr")
    for d in difference_operators(height, width):
        weights = 1.0 / (np.abs(d @ b) + params.eps_grad)
        a = a + params.lam * (d.T @ sparse.diags(weights) @ d)
    return a.tocsr(), b


def energy(i: PlaneF, v: PlaneF, params: DecompParams) -> float:
    """Evaluates the weighted smoothness energy E(I) for the brightness plane v."""
    x = np.asarray(i, dtype=np.float64).ravel()
    b = v.ravel()
    total = float(np.sum((x - b) ** 2))
    for d in difference_operators(*v.shape):
        weights = 1.0 / (np.abs(d @ b) + params.eps_grad)
        total += params.lam * float(np.sum(weights * (d @ x) ** 2))
    return total


def estimate_illumination(v: PlaneF, params: DecompParams,
                          callback: Callable[[np.ndarray], None] | None = None) -> PlaneF:
    """
    Estimates a spatially smooth, edge-aware illumination layer for the brightness plane.
    The energy is minimised by conjugate gradients started from v, until the relative residual is
    below params.tol or params.max_iters is reached; the result is then clamped to max(v, eps_div).
    Args:
        v (PlaneF): Brightness plane with samples in [0, 1].
        params (DecompParams): Decomposition parameters.
        callback (Callable, optional): Called with the flattened iterate after every CG iteration.
    Returns:
        PlaneF: The illumination plane, an upper bound of v.
    Raises:
        ValueError: If v contains non-finite samples.
    """
    v = as_plane(v, "v")
    a, b = build_system(v, params)
    x, info = cg(a, b, x0=b.copy(), rtol=params.tol, atol=0.0, maxiter=params.max_iters, callback=callback)
    if info > 0:
        logging.info(f"Retinex: CG stopped after {info} iterations without reaching tol={params.tol}.")
    illumination = np.maximum(x.reshape(v.shape), np.maximum(v, params.eps_div))
    return as_plane(illumination, "illumination")


def compute_reflectance(v: PlaneF, i: PlaneF, params: DecompParams) -> PlaneF:
    """
    Computes the reflectance R = v / max(i, eps_div), clamped to [0, 1].
    Args:
        v (PlaneF): Brightness plane.
        i (PlaneF): Illumination plane of the same dimensions.
        params (DecompParams): Decomposition parameters.
    Returns:
        PlaneF: The reflectance plane.
    Raises:
        ValueError: If the planes differ in dimensions.
    """
    v, i = as_plane(v, "v"), as_plane(i, "illumination")
    check_same_shape(v, i)
    return as_plane(np.clip(v / np.maximum(i, params.eps_div), 0.0, 1.0), "reflectance")


def decompose(v: PlaneF, params: DecompParams) -> Decomposition:
    """
    Decomposes the brightness plane into illumination and reflectance with v = I * R.
    Args:
        v (PlaneF): Brightness plane with samples in [0, 1].
        params (DecompParams): Decomposition parameters.
    Returns:
        Decomposition: The illumination and reflectance layers.
    """
    illumination = estimate_illumination(v, params)
    return Decomposition(illumination=illumination, reflectance=compute_reflectance(v, illumination, params))


def total_variation(plane: PlaneF) -> float:
    """Anisotropic total variation: sum of absolute horizontal and vertical forward differences."""
    p = np.asarray(plane, dtype=np.float64)
    return float(np.abs(np.diff(p, axis=1)).sum() + np.abs(np.diff(p, axis=0)).sum())
