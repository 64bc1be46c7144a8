"""Transforms and alias-free quadratic products.

Products go through a zero-padded grid of size M = 3N/2 per axis.  Two
factors supported on the retained lattice (|k_i| <= N/2 - 1) produce modes
up to N - 2 per axis; on the padded grid those alias onto |k| >= N/2 + 2,
outside the retained lattice, so every retained coefficient of the product
is exact.  This subsumes the 2/3 rule for N/3-band-limited inputs.
"""

import numpy as np

from .fields import SpectralField, enforce_lattice
from .grid import Grid


def to_physical(f: SpectralField) -> np.ndarray:
    """Real grid samples, shape (ncomp, N, ..., N)."""
    g = f.grid
    axes = tuple(range(1, g.n + 1))
    vals = np.fft.ifftn(f.coeffs, axes=axes) * (g.N ** g.n)
    return np.real(vals)


def from_physical(grid: Grid, values: np.ndarray) -> SpectralField:
    """Forward transform of real samples; Nyquist entries are zeroed."""
    if values.ndim == grid.n:
        values = values[np.newaxis]
    axes = tuple(range(1, grid.n + 1))
    coeffs = np.fft.fftn(values, axes=axes) / (grid.N ** grid.n)
    return enforce_lattice(SpectralField(grid, coeffs))


def transform_roundtrip(f: SpectralField) -> SpectralField:
    return from_physical(f.grid, to_physical(f))


def padded_size(grid: Grid) -> int:
    return (3 * grid.N) // 2


def _pad_map(grid: Grid) -> np.ndarray:
    """Index of each source frequency slot on the padded grid."""
    M = padded_size(grid)
    return np.where(grid.freq >= 0, grid.freq, M + grid.freq)


def pad_coeffs(grid: Grid, coeffs: np.ndarray) -> np.ndarray:
    M = padded_size(grid)
    idx = _pad_map(grid)
    out = np.zeros(coeffs.shape[: -grid.n] + (M,) * grid.n, dtype=np.complex128)
    out[(...,) + np.ix_(*([idx] * grid.n))] = coeffs
    return out


def unpad_coeffs(grid: Grid, padded: np.ndarray) -> np.ndarray:
    idx = _pad_map(grid)
    return padded[(...,) + np.ix_(*([idx] * grid.n))]


def padded_to_physical(grid: Grid, coeffs: np.ndarray, real: bool = False) -> np.ndarray:
    """Samples on the padded grid; ``real=True`` casts for Hermitian input."""
    M = padded_size(grid)
    axes = tuple(range(coeffs.ndim - grid.n, coeffs.ndim))
    vals = np.fft.ifftn(pad_coeffs(grid, coeffs), axes=axes) * (M ** grid.n)
    return np.real(vals) if real else vals


def physical_to_unpadded(grid: Grid, values: np.ndarray) -> np.ndarray:
    M = padded_size(grid)
    axes = tuple(range(values.ndim - grid.n, values.ndim))
    coeffs = unpad_coeffs(grid, np.fft.fftn(values, axes=axes) / (M ** grid.n))
    coeffs = coeffs.copy()
    coeffs[..., grid.nyquist_mask] = 0.0
    return coeffs


def dealiased_product(f: SpectralField, g: SpectralField) -> SpectralField:
    """Pointwise product fg with exact retained coefficients.

    Component counts must match, or one factor must be scalar (it then
    multiplies every component of the other).
    """
    if not f.grid.compatible_with(g.grid):
        raise ValueError(
            f"resolution mismatch: ({f.grid.n}, {f.grid.N}) vs "
            f"({g.grid.n}, {g.grid.N})"
        )
    if f.ncomp != g.ncomp and 1 not in (f.ncomp, g.ncomp):
        raise ValueError(
            f"component mismatch: {f.ncomp} vs {g.ncomp} (one must be scalar)"
        )
    grid = f.grid
    pf = padded_to_physical(grid, f.coeffs)
    pg = padded_to_physical(grid, g.coeffs)
    return SpectralField(grid, physical_to_unpadded(grid, pf * pg))


def convolution_product(f: SpectralField, g: SpectralField) -> SpectralField:
    """Direct O(N^{2n}) lattice convolution truncated to the retained
    lattice.  Brute-force oracle for dealiased_product; scalar inputs.

    Works on a centered integer lattice so shifts never wrap: aliasing is
    structurally impossible here, unlike a same-grid cyclic convolution.
    """
    if f.ncomp != 1 or g.ncomp != 1:
        raise ValueError("convolution oracle handles scalar fields only")
    grid = f.grid
    N, n = grid.N, grid.n
    K = grid.max_mode
    span = 2 * K + 1

    def centered(c):
        out = np.zeros((span,) * n, dtype=np.complex128)
        for idx in np.argwhere(np.abs(c) > 0):
            k = grid.freq[idx]
            out[tuple(k + K)] = c[tuple(idx)]
        return out

    fc = centered(f.coeffs[0])
    gc = g.coeffs[0]
    big = np.zeros((2 * span - 1,) * n, dtype=np.complex128)
    for idx in np.argwhere(np.abs(gc) > 0):
        alpha = grid.freq[idx]
        sl = tuple(slice(a + 2 * K, a + 2 * K + span) for a in alpha - K)
        big[sl] += fc * gc[tuple(idx)]
    out = np.zeros(grid.shape, dtype=np.complex128)
    for idx in np.ndindex(*grid.shape):
        k = grid.freq[list(idx)]
        if np.max(np.abs(k)) <= K:
            out[idx] = big[tuple(k + 2 * K)]
    return SpectralField(grid, out[np.newaxis])
