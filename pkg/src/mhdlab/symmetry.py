"""Parity symmetry classes of the velocity/magnetic pair and the derived
spectral constraints.

Sym1 (non-resistive regime): u_h and b_n even in x_n; u_n and b_h odd in
x_n.  Sym2 (non-viscous regime): every u component odd in each coordinate;
every b component even in each coordinate.  Projections are realized in
coefficient space by exact index reflections, never by physical-space
mirroring.
"""

import numpy as np

from .fields import SpectralField, reflect

SYMMETRY_CLASSES = ("Sym1", "Sym2", "Unconstrained")


def _sym1_reflected(field: SpectralField, parities: np.ndarray) -> np.ndarray:
    """parity * c(k_h, -k_n) per component."""
    refl = reflect(field.coeffs, axes=[field.grid.n - 1])
    return parities.reshape((-1,) + (1,) * field.grid.n) * refl


def _sym1_parities(grid_n: int, which: str) -> np.ndarray:
    # even components keep sign +1 under x_n -> -x_n, odd get -1
    if which == "u":
        return np.array([1.0] * (grid_n - 1) + [-1.0])
    return np.array([-1.0] * (grid_n - 1) + [1.0])


def _project_sym1(field: SpectralField, which: str) -> SpectralField:
    parities = _sym1_parities(field.grid.n, which)
    return SpectralField(field.grid, 0.5 * (field.coeffs + _sym1_reflected(field, parities)))


def _project_all_axes(field: SpectralField, sign: float) -> SpectralField:
    """Per-axis parity projection: sign=-1 odd, sign=+1 even, every axis."""
    coeffs = field.coeffs
    for ax in range(field.grid.n):
        coeffs = 0.5 * (coeffs + sign * reflect(coeffs, axes=[ax]))
    return SpectralField(field.grid, coeffs)


def symmetrize_pair(u: SpectralField, b: SpectralField, sym_class: str):
    """Orthogonal projection of (u, b) onto a symmetry class."""
    if sym_class not in SYMMETRY_CLASSES:
        raise ValueError(f"unknown symmetry class {sym_class!r}")
    if sym_class == "Unconstrained":
        return u, b
    if sym_class == "Sym1":
        return _project_sym1(u, "u"), _project_sym1(b, "b")
    return _project_all_axes(u, -1.0), _project_all_axes(b, +1.0)


def check_symmetry_pair(u: SpectralField, b: SpectralField, sym_class: str) -> float:
    """max over modes/components of |c(Rk) - parity * c(k)|; 0 = exact."""
    if sym_class not in SYMMETRY_CLASSES:
        raise ValueError(f"unknown symmetry class {sym_class!r}")
    if sym_class == "Unconstrained":
        return 0.0
    worst = 0.0
    if sym_class == "Sym1":
        for field, which in ((u, "u"), (b, "b")):
            target = _sym1_reflected(field, _sym1_parities(field.grid.n, which))
            worst = max(worst, float(np.max(np.abs(target - field.coeffs))))
        return worst
    for field, sign in ((u, -1.0), (b, +1.0)):
        for ax in range(field.grid.n):
            target = sign * reflect(field.coeffs, axes=[ax])
            worst = max(worst, float(np.max(np.abs(target - field.coeffs))))
    return worst


def check_spectral_constraint(u: SpectralField, b: SpectralField, regime: str,
                              sym_class: str = "Unconstrained") -> float:
    """Residual of the vanishing-mode constraints on the k_n = 0 plane.

    Non-resistive: max |bhat_h(k_h, 0)|.  Non-viscous: max |uhat_h(k_h, 0)|,
    and under Sym2 additionally max over all S_eq modes of |uhat(k)|.
    """
    grid = u.grid
    plane = grid.k_vertical == 0
    if regime == "non_resistive":
        return float(np.max(np.abs(b.coeffs[: grid.n - 1, plane]), initial=0.0))
    if regime == "non_viscous":
        worst = float(np.max(np.abs(u.coeffs[: grid.n - 1, plane]), initial=0.0))
        if sym_class == "Sym2":
            worst = max(worst, float(
                np.max(np.abs(u.coeffs[:, grid.s_eq_mask]), initial=0.0)))
        return worst
    raise ValueError(f"spectral constraint undefined for regime {regime!r}")
