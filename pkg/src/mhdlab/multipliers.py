"""Fourier multiplier calculus: fractional Laplacians, partial Laplacian
roots, Riesz transform, derivatives, and the Leray projection.

Every scalar symbol is defined to be 0 at k = 0 (the Leray symbol is the
zero matrix there); the solver keeps states mean-zero so this choice is
never load-bearing.
"""

from dataclasses import dataclass, field

import numpy as np

from .fields import SpectralField
from .grid import Grid


@dataclass(frozen=True)
class MultiplierSpec:
    """One of: fractional_laplacian(s), partial_laplacian_root(axes),
    riesz_vertical, derivative(axis), leray."""

    kind: str
    s: float = 0.0
    axes: tuple = field(default_factory=tuple)
    axis: int = 0

    KINDS = ("fractional_laplacian", "partial_laplacian_root",
             "riesz_vertical", "derivative", "leray")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown multiplier kind {self.kind!r}")


def fractional_symbol(grid: Grid, s: float) -> np.ndarray:
    """|k|^s with the value 0 at k = 0."""
    sym = np.zeros(grid.shape)
    nz = grid.k2 > 0
    sym[nz] = grid.k2[nz] ** (s / 2.0)
    return sym


def partial_root_symbol(grid: Grid, axes) -> np.ndarray:
    """(sum_{i in axes} k_i^2)^{1/2}."""
    axes = tuple(axes)
    if not axes or any(a < 0 or a >= grid.n for a in axes):
        raise ValueError(f"index set {axes} not within 0..{grid.n - 1}")
    return np.sqrt(
        np.sum(grid.wavenumbers[list(axes)].astype(np.float64) ** 2, axis=0)
    )


def riesz_vertical_symbol(grid: Grid) -> np.ndarray:
    """i k_n / |k|, zero at k = 0."""
    sym = np.zeros(grid.shape, dtype=np.complex128)
    nz = grid.k2 > 0
    sym[nz] = 1j * grid.k_vertical[nz] / np.sqrt(grid.k2[nz])
    return sym


def derivative_symbol(grid: Grid, axis: int) -> np.ndarray:
    if axis < 0 or axis >= grid.n:
        raise ValueError(f"derivative axis {axis} not within 0..{grid.n - 1}")
    return 1j * grid.wavenumbers[axis].astype(np.float64)


def apply_scalar_symbol(f: SpectralField, symbol: np.ndarray) -> SpectralField:
    return SpectralField(f.grid, f.coeffs * symbol)


def fractional_laplacian(f: SpectralField, s: float) -> SpectralField:
    if s < 0 and not f.is_mean_zero():
        raise ValueError(
            "fractional_laplacian with negative exponent requires a mean-zero "
            f"field; mean coefficient is {f.mean_coefficient()}"
        )
    return apply_scalar_symbol(f, fractional_symbol(f.grid, s))


def derivative(f: SpectralField, axis: int) -> SpectralField:
    return apply_scalar_symbol(f, derivative_symbol(f.grid, axis))


def gradient_component(f: SpectralField, axis: int) -> SpectralField:
    return derivative(f, axis)


def riesz_vertical(f: SpectralField) -> SpectralField:
    return apply_scalar_symbol(f, riesz_vertical_symbol(f.grid))


def leray_project(f: SpectralField) -> SpectralField:
    """P(k) = I - |k|^{-2} k (x) k applied per mode; vector fields only."""
    if not f.is_vector:
        raise ValueError(
            f"Leray projection requires a vector field with {f.grid.n} "
            f"components, got {f.ncomp}"
        )
    return SpectralField(f.grid, leray_project_coeffs(f.grid, f.coeffs))


def leray_project_coeffs(grid: Grid, coeffs: np.ndarray) -> np.ndarray:
    k = grid.wavenumbers.astype(np.float64)
    k2 = grid.k2
    kdotc = np.sum(k * coeffs, axis=0)
    inv_k2 = np.zeros_like(k2)
    nz = k2 > 0
    inv_k2[nz] = 1.0 / k2[nz]
    return coeffs - k * (kdotc * inv_k2)


def divergence_max(f: SpectralField) -> float:
    """max_k |k . fhat(k)| for a vector field."""
    if not f.is_vector:
        raise ValueError("divergence is defined for vector fields only")
    k = f.grid.wavenumbers.astype(np.float64)
    return float(np.max(np.abs(np.sum(k * f.coeffs, axis=0))))


def apply_multiplier(f: SpectralField, spec: MultiplierSpec) -> SpectralField:
    """Dispatch a MultiplierSpec; preserves Hermitian symmetry."""
    if spec.kind == "fractional_laplacian":
        return fractional_laplacian(f, spec.s)
    if spec.kind == "partial_laplacian_root":
        return apply_scalar_symbol(f, partial_root_symbol(f.grid, spec.axes))
    if spec.kind == "riesz_vertical":
        return riesz_vertical(f)
    if spec.kind == "derivative":
        return derivative(f, spec.axis)
    if spec.kind == "leray":
        return leray_project(f)
    raise ValueError(f"unknown multiplier kind {spec.kind!r}")
