"""Spectral representation of real scalar/vector fields on the torus.

Coefficient convention: f(x) = sum_k fhat(k) e^{i k.x}, i.e.
fhat(k) = (2pi)^{-n} int f(x) e^{-i k.x} dx.  All norm sums over
coefficients therefore match the analytic definitions verbatim; the
physical-space L^2 integral is (2pi)^n times the coefficient sum.
"""

from dataclasses import dataclass

import numpy as np

from .grid import Grid


@dataclass
class SpectralField:
    """Complex Fourier coefficients of a real field.

    ``coeffs`` has shape (component_count, N, ..., N) in FFT frequency
    ordering; component_count is 1 for scalars and n for vector fields.
    """

    grid: Grid
    coeffs: np.ndarray

    def __post_init__(self):
        expected = self.grid.shape
        if self.coeffs.ndim != self.grid.n + 1 or self.coeffs.shape[1:] != expected:
            raise ValueError(
                f"coefficient array shape {self.coeffs.shape} does not match "
                f"(ncomp,) + {expected}"
            )
        if self.coeffs.dtype != np.complex128:
            self.coeffs = self.coeffs.astype(np.complex128)

    @property
    def ncomp(self) -> int:
        return self.coeffs.shape[0]

    @property
    def is_vector(self) -> bool:
        return self.ncomp == self.grid.n

    def copy(self) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs.copy())

    def mean_coefficient(self) -> np.ndarray:
        return self.coeffs[(slice(None),) + (0,) * self.grid.n]

    def is_mean_zero(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.mean_coefficient()) <= tol))

    def scale(self) -> float:
        """Largest coefficient magnitude, used to normalize defect checks."""
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0

    def hermitian_defect(self) -> float:
        """max_k |c(-k) - conj(c(k))| over retained modes."""
        reflected = reflect(self.coeffs, axes=range(self.grid.n))
        defect = np.abs(reflected - np.conj(self.coeffs))
        return float(np.max(defect[:, self.grid.active_mask], initial=0.0))


def reflect(coeffs: np.ndarray, axes) -> np.ndarray:
    """Coefficient array of x_i -> -x_i reflections, i.e. c(k) -> c(R k).

    ``axes`` are field axes (0-based); array axis is offset by the leading
    component axis.  Exact index permutation, no interpolation.
    """
    out = coeffs
    for ax in axes:
        a = ax + 1
        out = np.roll(np.flip(out, axis=a), 1, axis=a)
    return out


def hermitian_symmetrize(coeffs: np.ndarray, grid: Grid) -> np.ndarray:
    full = reflect(coeffs, axes=range(grid.n))
    return 0.5 * (coeffs + np.conj(full))


def enforce_lattice(field: SpectralField) -> SpectralField:
    """Zero out Nyquist entries in place; returns the field."""
    field.coeffs[:, grid_nyquist(field.grid)] = 0.0
    return field


def grid_nyquist(grid: Grid) -> np.ndarray:
    return grid.nyquist_mask


def zero_field(grid: Grid, ncomp: int = 1) -> SpectralField:
    return SpectralField(grid, np.zeros((ncomp,) + grid.shape, dtype=np.complex128))


def single_mode(grid: Grid, k, amplitude, ncomp: int = 1, component: int = 0,
                real: bool = False) -> SpectralField:
    """Field amplitude * e^{i k.x} on one component.

    With ``real=True`` the Hermitian partner is added so the field equals
    2*Re(amplitude e^{i k.x}).
    """
    f = zero_field(grid, ncomp)
    idx = tuple(int(ki) % grid.N for ki in k)
    f.coeffs[(component,) + idx] = amplitude
    if real:
        idx_m = tuple((-int(ki)) % grid.N for ki in k)
        f.coeffs[(component,) + idx_m] += np.conj(amplitude)
    return f


def random_field(grid: Grid, rng: np.random.Generator, ncomp: int = 1,
                 band_limit: int | None = None, slope: float = 0.0) -> SpectralField:
    """Random mean-zero real field, band-limited to |k_i| <= band_limit.

    Coefficient magnitudes follow |k|^{-slope} with Gaussian complex noise;
    output is Hermitian-symmetrized so the field is real in physical space.
    """
    if band_limit is None:
        band_limit = grid.max_mode
    if band_limit > grid.max_mode:
        raise ValueError(
            f"band_limit {band_limit} exceeds max retained mode {grid.max_mode}"
        )
    shape = (ncomp,) + grid.shape
    raw = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    band = np.all(np.abs(grid.wavenumbers) <= band_limit, axis=0)
    keep = band & grid.nonzero_mask
    envelope = np.zeros(grid.shape)
    envelope[keep] = grid.k2[keep] ** (-slope / 2.0)
    raw *= envelope
    coeffs = hermitian_symmetrize(raw, grid)
    coeffs[:, ~keep] = 0.0
    return SpectralField(grid, coeffs)
