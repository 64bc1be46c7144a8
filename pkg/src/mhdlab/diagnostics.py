"""Per-sample norms, time-weighted energy functionals, and decay-rate
checks.

The functional families differ by regime: the non-resistive one weights
the dissipated velocity (homogeneous m-norms, integral of u), the
non-viscous one exchanges the roles of u and b (inhomogeneous m-norms,
integral of the magnetic field's vertical seminorms).
"""

from dataclasses import dataclass, asdict

import numpy as np

from .fields import SpectralField
from .multipliers import fractional_symbol
from .norms import (homogeneous, l2_norm, seminorm, sobolev,
                    vertical_derivative_seminorm)
from .products import to_physical
from .solver import MhdState, RunConfig

# Exact column order of timeseries.csv; every name is a DiagnosticsRecord
# attribute.
CSV_COLUMNS = [
    "t", "l2_u", "l2_b", "hm_u", "hm_b", "hs_u", "hs_b", "hsp1_diss",
    "semi_dnu_neq_m2", "semi_dnu_neq_m1", "semi_dnu_neq_0",
    "semi_dnb_neq_m2", "semi_dnb_neq_m1", "semi_dnb_neq_0",
    "semi_ueq_m1", "semi_ueq_0", "semi_beq_m1", "semi_beq_0",
    "energy", "enstrophy",
]


@dataclass
class DiagnosticsRecord:
    """All norms needed to assemble the weighted functionals at one time."""

    t: float
    l2_u: float
    l2_b: float
    hm_u: float            # homogeneous H^m
    hm_b: float
    hs_u: float            # inhomogeneous H^s
    hs_b: float
    hsp1_diss: float       # H^{s+1} of the dissipated field
    semi_dnu_neq_m2: float
    semi_dnu_neq_m1: float
    semi_dnu_neq_0: float
    semi_dnb_neq_m2: float
    semi_dnb_neq_m1: float
    semi_dnb_neq_0: float
    semi_ueq_m1: float
    semi_ueq_0: float
    semi_beq_m1: float
    semi_beq_0: float
    energy: float
    enstrophy: float
    # extra fields used by the functionals but not part of the CSV contract
    hm1_u: float = 0.0     # homogeneous H^{-1}
    hm1_b: float = 0.0
    hmp1_u: float = 0.0    # homogeneous H^{m+1}
    hmp1_b: float = 0.0
    hm_inh_u: float = 0.0  # inhomogeneous H^m
    hm_inh_b: float = 0.0
    hmp1_inh_u: float = 0.0
    hmp1_inh_b: float = 0.0

    def csv_values(self) -> list[float]:
        return [getattr(self, name) for name in CSV_COLUMNS]


def compute_record(state: MhdState, config: RunConfig) -> DiagnosticsRecord:
    u, b = state.u, state.b
    m = config.m
    dissipated = u if config.resolved_mu_nu()[0] > 0 else b
    l2u = l2_norm(u)
    l2b = l2_norm(b)
    return DiagnosticsRecord(
        t=state.t,
        l2_u=l2u,
        l2_b=l2b,
        hm_u=homogeneous(u, m),
        hm_b=homogeneous(b, m),
        hs_u=sobolev(u, config.s),
        hs_b=sobolev(b, config.s),
        hsp1_diss=sobolev(dissipated, config.s + 1.0),
        semi_dnu_neq_m2=vertical_derivative_seminorm(u, -2.0, "neq"),
        semi_dnu_neq_m1=vertical_derivative_seminorm(u, -1.0, "neq"),
        semi_dnu_neq_0=vertical_derivative_seminorm(u, 0.0, "neq"),
        semi_dnb_neq_m2=vertical_derivative_seminorm(b, -2.0, "neq"),
        semi_dnb_neq_m1=vertical_derivative_seminorm(b, -1.0, "neq"),
        semi_dnb_neq_0=vertical_derivative_seminorm(b, 0.0, "neq"),
        semi_ueq_m1=seminorm(u, -1.0, "eq"),
        semi_ueq_0=seminorm(u, 0.0, "eq"),
        semi_beq_m1=seminorm(b, -1.0, "eq"),
        semi_beq_0=seminorm(b, 0.0, "eq"),
        energy=0.5 * (l2u ** 2 + l2b ** 2),
        enstrophy=homogeneous(dissipated, 1.0) ** 2,
        hm1_u=homogeneous(u, -1.0),
        hm1_b=homogeneous(b, -1.0),
        hmp1_u=homogeneous(u, m + 1.0),
        hmp1_b=homogeneous(b, m + 1.0),
        hm_inh_u=sobolev(u, m),
        hm_inh_b=sobolev(b, m),
        hmp1_inh_u=sobolev(u, m + 1.0),
        hmp1_inh_b=sobolev(b, m + 1.0),
    )


@dataclass
class FunctionalReport:
    """Weighted energy functionals and where their sups are attained."""

    regime: str
    components: dict
    sup_witness_times: dict
    total: float

    def to_dict(self) -> dict:
        return asdict(self)


def _trapz(y: np.ndarray, t: np.ndarray) -> float:
    if len(t) < 2:
        return 0.0
    return float(np.trapezoid(y, t))


def assemble_functionals(history, s: float, delta: float, regime: str) -> FunctionalReport:
    """Gamma_1..Gamma_4 (non-resistive) or Psi_1..Psi_4 (non-viscous).

    Sups are taken over the emitted samples; integrals use the trapezoidal
    rule on the sample grid.
    """
    if not history:
        raise ValueError("cannot assemble functionals from an empty history")
    t = np.array([r.t for r in history])
    if np.any(np.diff(t) <= 0):
        raise ValueError("history times must be strictly increasing")
    m = s - 2.0 * delta - 1.0
    w_heavy = (1.0 + t) ** (1.0 + m + delta)
    w_light = (1.0 + t) ** (-delta)
    w_light1 = (1.0 + t) ** (-delta - 1.0)

    def arr(name):
        return np.array([getattr(r, name) for r in history])

    def sup_with_witness(values):
        i = int(np.argmax(values))
        return float(values[i]), float(t[i])

    dn_pair = (arr("semi_dnu_neq_m1") + arr("semi_dnb_neq_m1")) ** 2
    hs_pair = (arr("hs_u") + arr("hs_b")) ** 2

    if regime == "non_resistive":
        names = ("gamma1", "gamma2", "gamma3", "gamma4")
        m_pair = (arr("hm_u") + arr("hm_b")) ** 2
        g1_sup, g1_t = sup_with_witness(m_pair)
        g1 = g1_sup + _trapz(arr("hmp1_u") ** 2, t)
        g2_sup, g2_t = sup_with_witness(w_heavy * dn_pair)
        g2 = g2_sup + _trapz(
            w_heavy * (arr("semi_dnu_neq_0") ** 2 + arr("semi_dnb_neq_m2") ** 2), t)
        g3_sup, g3_t = sup_with_witness(w_heavy * arr("semi_ueq_m1") ** 2)
        g3 = g3_sup + _trapz(w_heavy * arr("semi_ueq_0") ** 2, t)
    elif regime == "non_viscous":
        names = ("psi1", "psi2", "psi3", "psi4")
        m_pair = (arr("hm_inh_u") + arr("hm_inh_b")) ** 2
        g1_sup, g1_t = sup_with_witness(m_pair)
        g1 = g1_sup + _trapz(arr("hmp1_inh_u") ** 2, t)
        g2_sup, g2_t = sup_with_witness(w_heavy * dn_pair)
        g2 = g2_sup + _trapz(
            w_heavy * (arr("semi_dnb_neq_0") ** 2 + arr("semi_dnu_neq_m2") ** 2), t)
        g3_sup, g3_t = sup_with_witness(w_heavy * arr("semi_beq_m1") ** 2)
        g3 = g3_sup + _trapz(w_heavy * arr("semi_beq_0") ** 2, t)
    else:
        raise ValueError(f"functionals undefined for regime {regime!r}")

    g4_sup, g4_t = sup_with_witness(w_light * hs_pair)
    g4 = g4_sup + _trapz(
        w_light * arr("hsp1_diss") ** 2 + w_light1 * hs_pair, t)

    components = dict(zip(names, (g1, g2, g3, g4)))
    witnesses = dict(zip(names, (g1_t, g2_t, g3_t, g4_t)))
    return FunctionalReport(
        regime=regime,
        components=components,
        sup_witness_times=witnesses,
        total=float(sum(components.values())),
    )


def theorem_rate(s: float, delta: float, index: str, order: float = 0.0) -> float:
    """Exponent of (1+t) in the theorem bounds.

    index "growth": delta/2.  index "u_decay" with order l in [-1, s]:
    -s(s-l)/(2(s+1)) + delta/2.  index "vertical_decay" with order k in
    [-1, s-1]: -s(s-1-k)/(2s) + delta/2.
    """
    if index == "growth":
        return delta / 2.0
    if index == "u_decay":
        if not -1.0 <= order <= s:
            raise ValueError(f"u_decay order must lie in [-1, {s}], got {order}")
        return -s * (s - order) / (2.0 * (s + 1.0)) + delta / 2.0
    if index == "vertical_decay":
        if not -1.0 <= order <= s - 1.0:
            raise ValueError(
                f"vertical_decay order must lie in [-1, {s - 1}], got {order}")
        return -s * (s - 1.0 - order) / (2.0 * s) + delta / 2.0
    raise ValueError(f"unknown rate index {index!r}")


@dataclass
class RateFit:
    """Log-log least-squares fit of one quantity against (1+t)."""

    quantity: str
    t_a: float
    t_b: float
    slope: float
    theorem_exponent: float | None
    prefactor: float
    max_quotient: float | None

    def to_dict(self) -> dict:
        return asdict(self)


FLOOR = 1e-14

# derived series assembled from record fields; usable wherever a record
# attribute name is accepted
DERIVED_SERIES = {
    "l2_pair": lambda r: r.l2_u + r.l2_b,
    "hs_pair": lambda r: r.hs_u + r.hs_b,
    "hm_pair": lambda r: r.hm_u + r.hm_b,
    "semi_dn_pair_m1": lambda r: r.semi_dnu_neq_m1 + r.semi_dnb_neq_m1,
}


def quantity_series(history, quantity: str) -> np.ndarray:
    if quantity in DERIVED_SERIES:
        fn = DERIVED_SERIES[quantity]
        return np.array([fn(r) for r in history])
    return np.array([getattr(r, quantity) for r in history])


def fit_decay(history, quantity: str, window: tuple,
              theorem_exponent: float | None = None) -> RateFit:
    """Least-squares slope of log(value) vs log(1+t) over the window, plus
    the uniform quotient max value/(1+t)^theorem_exponent (the directly
    testable form of a one-sided bound)."""
    t_a, t_b = window
    if not t_a < t_b:
        raise ValueError(f"fit window must satisfy t_a < t_b, got {window}")
    t = np.array([r.t for r in history])
    v = quantity_series(history, quantity)
    keep = (t >= t_a) & (t <= t_b) & (v > FLOOR)
    if np.count_nonzero(keep) < 10:
        raise ValueError(
            f"fit window [{t_a}, {t_b}] holds only "
            f"{np.count_nonzero(keep)} usable samples of {quantity!r} "
            "(need >= 10)")
    x = np.log1p(t[keep])
    y = np.log(v[keep])
    slope, intercept = np.polyfit(x, y, 1)
    quotient = None
    if theorem_exponent is not None:
        quotient = float(np.max(v[keep] / (1.0 + t[keep]) ** theorem_exponent))
    return RateFit(
        quantity=quantity,
        t_a=float(t_a),
        t_b=float(t_b),
        slope=float(slope),
        theorem_exponent=theorem_exponent,
        prefactor=float(np.exp(intercept)),
        max_quotient=quotient,
    )


@dataclass
class EnergyLawTerms:
    """Quantities entering the lambda-weighted energy identity."""

    dissipation_u: float   # ||Lambda^{lambda+1} u||^2
    dissipation_b: float
    grad_u_inf: float
    grad_b_inf: float
    norm_u: float          # ||Lambda^lambda u||
    norm_b: float
    skew_u: float          # <Lambda^lam d_n b, Lambda^lam u>
    skew_b: float          # <Lambda^lam d_n u, Lambda^lam b>

    def to_dict(self) -> dict:
        return asdict(self)


def _grad_inf(f: SpectralField) -> float:
    g = f.grid
    k = g.wavenumbers.astype(np.float64)
    grads = to_physical(SpectralField(
        g, (1j * k[:, np.newaxis] * f.coeffs[np.newaxis]).reshape(
            (-1,) + g.shape)))
    return float(np.max(np.sqrt(np.sum(grads ** 2, axis=0))))


def lemma_energy_terms(state: MhdState, lam: float) -> EnergyLawTerms:
    """Each term of the standard lambda-energy identity, with the two
    background-coupling (skew) terms computed in coefficient space; their
    sum vanishes identically."""
    u, b = state.u, state.b
    grid = u.grid
    w = fractional_symbol(grid, lam) ** 2
    kn = grid.k_vertical.astype(np.float64)
    inner_bu = np.sum(1j * kn * w * np.sum(b.coeffs * np.conj(u.coeffs), axis=0))
    inner_ub = np.sum(1j * kn * w * np.sum(u.coeffs * np.conj(b.coeffs), axis=0))
    return EnergyLawTerms(
        dissipation_u=homogeneous(u, lam + 1.0) ** 2,
        dissipation_b=homogeneous(b, lam + 1.0) ** 2,
        grad_u_inf=_grad_inf(u),
        grad_b_inf=_grad_inf(b),
        norm_u=homogeneous(u, lam),
        norm_b=homogeneous(b, lam),
        skew_u=float(np.real(inner_bu)),
        skew_b=float(np.real(inner_ub)),
    )
