"""Sobolev norms, frequency-restricted seminorms, and the vertical mode
split.

All sums run over the truncated lattice and equal the analytic coefficient
sums verbatim under this artifact's convention (see fields module docs).
Vector fields sum component contributions before the square root.
"""

import numpy as np

from .fields import SpectralField, zero_field

SEMINORM_KINDS = ("neq", "eq", "full_homogeneous", "full_inhomogeneous", "abs_sum")


def mode_split(f: SpectralField) -> tuple[SpectralField, SpectralField]:
    """Split into (f_neq, f_eq): vertical-nonzero and vertical-zero parts.

    The mean mode k = 0 is dropped from both parts, so
    f = f_neq + f_eq + mean holds bit-exactly.
    """
    g = f.grid
    f_neq = zero_field(g, f.ncomp)
    f_eq = zero_field(g, f.ncomp)
    f_neq.coeffs[:, g.s_neq_mask] = f.coeffs[:, g.s_neq_mask]
    f_eq.coeffs[:, g.s_eq_mask] = f.coeffs[:, g.s_eq_mask]
    return f_neq, f_eq


def _sq_mag(f: SpectralField) -> np.ndarray:
    """Per-mode squared magnitude summed over components."""
    return np.sum(np.abs(f.coeffs) ** 2, axis=0)


def seminorm(f: SpectralField, l: float, which: str) -> float:
    """Frequency-restricted and full Sobolev (semi)norms.

    which: "neq" -> [f_neq]_l, "eq" -> [f_eq]_l, "full_homogeneous" ->
    ||f||_{\\dot H^l}, "full_inhomogeneous" -> ||f||_{H^l}, "abs_sum" ->
    {f}_l = sum_{k != 0} |k|^l |fhat(k)|.
    """
    if which not in SEMINORM_KINDS:
        raise ValueError(f"unknown seminorm kind {which!r}")
    g = f.grid
    if which == "full_inhomogeneous":
        w = (1.0 + g.k2) ** l
        return float(np.sqrt(np.sum(_sq_mag(f)[g.active_mask] * w[g.active_mask])))
    if which == "full_homogeneous" and l < 0 and not f.is_mean_zero():
        raise ValueError(
            "negative-order homogeneous norms require a mean-zero field"
        )
    mask = {"neq": g.s_neq_mask, "eq": g.s_eq_mask}.get(which, g.nonzero_mask)
    k2 = g.k2[mask]
    if which == "abs_sum":
        mags = np.sqrt(_sq_mag(f)[mask])
        return float(np.sum(k2 ** (l / 2.0) * mags))
    return float(np.sqrt(np.sum(k2 ** l * _sq_mag(f)[mask])))


def sobolev(f: SpectralField, l: float) -> float:
    return seminorm(f, l, "full_inhomogeneous")


def homogeneous(f: SpectralField, l: float) -> float:
    return seminorm(f, l, "full_homogeneous")


def l2_norm(f: SpectralField) -> float:
    """Coefficient-sum L^2 norm including the mean mode."""
    return float(np.sqrt(np.sum(_sq_mag(f)[f.grid.active_mask])))


def vertical_derivative_seminorm(f: SpectralField, l: float, which: str) -> float:
    """[d_n f_neq]_l (which="neq") or the analogous S_eq sum, computed as
    sum |k|^{2l} |k_n|^2 |fhat|^2 without materializing the derivative."""
    g = f.grid
    mask = g.s_neq_mask if which == "neq" else g.s_eq_mask
    kn2 = g.k_vertical[mask].astype(np.float64) ** 2
    return float(np.sqrt(np.sum(g.k2[mask] ** l * kn2 * _sq_mag(f)[mask])))
