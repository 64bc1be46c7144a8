"""Truncated symmetric Fourier lattice on the periodic box [-pi, pi]^n.

Coefficient arrays use numpy's FFT frequency ordering on each axis.  The
retained lattice is {-N/2+1, ..., N/2-1}^n: the Nyquist frequency -N/2 is
always excluded (its entries are kept at zero) so that every retained mode
has a retained partner -k and Hermitian symmetry is unambiguous.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Lattice geometry for dimension ``n`` and resolution ``N`` per axis."""

    n: int
    N: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"dimension must be >= 2, got {self.n}")
        if self.N < 4 or self.N % 2 != 0:
            raise ValueError(f"resolution must be even and >= 4, got {self.N}")

    @property
    def shape(self) -> tuple:
        return (self.N,) * self.n

    @property
    def max_mode(self) -> int:
        """Largest retained |k_i| per axis."""
        return self.N // 2 - 1

    @cached_property
    def freq(self) -> np.ndarray:
        """Integer frequencies along one axis in FFT ordering."""
        return np.fft.fftfreq(self.N, 1.0 / self.N).astype(np.int64)

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Integer wavevector components, shape (n, N, ..., N)."""
        axes = np.meshgrid(*([self.freq] * self.n), indexing="ij")
        return np.stack(axes)

    @cached_property
    def k2(self) -> np.ndarray:
        """|k|^2 as float, shape (N, ..., N)."""
        return np.sum(self.wavenumbers.astype(np.float64) ** 2, axis=0)

    @cached_property
    def k_vertical(self) -> np.ndarray:
        """Last (vertical) wavevector component k_n."""
        return self.wavenumbers[-1]

    @cached_property
    def nyquist_mask(self) -> np.ndarray:
        """True where any component sits on the excluded Nyquist frequency."""
        return np.any(self.wavenumbers == -(self.N // 2), axis=0)

    @cached_property
    def active_mask(self) -> np.ndarray:
        return ~self.nyquist_mask

    @cached_property
    def nonzero_mask(self) -> np.ndarray:
        """Retained modes with k != 0."""
        return self.active_mask & (self.k2 > 0)

    @cached_property
    def s_neq_mask(self) -> np.ndarray:
        """S_neq: retained nonzero modes with k_n != 0."""
        return self.nonzero_mask & (self.k_vertical != 0)

    @cached_property
    def s_eq_mask(self) -> np.ndarray:
        """S_eq: retained nonzero modes with k_n == 0."""
        return self.nonzero_mask & (self.k_vertical == 0)

    def compatible_with(self, other: "Grid") -> bool:
        return self.n == other.n and self.N == other.N


def is_nonzero(k) -> bool:
    return any(ki != 0 for ki in k)


def is_vertical_zero(k) -> bool:
    return is_nonzero(k) and k[-1] == 0


def is_vertical_nonzero(k) -> bool:
    return is_nonzero(k) and k[-1] != 0
