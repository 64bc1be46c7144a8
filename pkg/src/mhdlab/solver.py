"""Spectral time integration of the perturbed MHD system near the vertical
background field.

Per mode, each Cartesian component pair (uhat_j, bhat_j) obeys the linear
block d/dt (uhat, bhat) = A(k) (uhat, bhat) with
A(k) = [[-mu |k|^2, i k_n], [i k_n, -nu |k|^2]], driven by the dealiased
quadratic terms.  One step is a Strang composition: exact half-step matrix
exponential, Heun (explicit trapezoid) on the nonlinearity, exact
half-step exponential.  The stiff diffusive part is therefore handled
without any step-size restriction.
"""

from dataclasses import dataclass, field, replace, fields as dc_fields

import numpy as np

from .fields import SpectralField, hermitian_symmetrize, random_field, zero_field
from .grid import Grid
from .multipliers import divergence_max, leray_project_coeffs
from .norms import sobolev
from .products import padded_to_physical, physical_to_unpadded
from .symmetry import SYMMETRY_CLASSES, check_symmetry_pair, symmetrize_pair

REGIMES = ("non_resistive", "non_viscous", "general")


class BlowUpError(RuntimeError):
    """Raised when the integration leaves the stable regime."""

    def __init__(self, t, message, norm_history=None):
        super().__init__(f"blow-up detected at t={t:.6g}: {message}")
        self.t = t
        self.norm_history = norm_history or []


@dataclass
class MhdState:
    """Divergence-free spectral (u, b) pair at one time instant."""

    u: SpectralField
    b: SpectralField
    t: float
    mu: float
    nu: float

    @property
    def grid(self) -> Grid:
        return self.u.grid

    def copy(self) -> "MhdState":
        return MhdState(self.u.copy(), self.b.copy(), self.t, self.mu, self.nu)

    def divergence(self) -> float:
        return max(divergence_max(self.u), divergence_max(self.b))

    def scale(self) -> float:
        return max(self.u.scale(), self.b.scale())


def symmetrize(state: MhdState, sym_class: str) -> MhdState:
    u, b = symmetrize_pair(state.u, state.b, sym_class)
    return MhdState(u, b, state.t, state.mu, state.nu)


def check_symmetry(state: MhdState, sym_class: str) -> float:
    return check_symmetry_pair(state.u, state.b, sym_class)


@dataclass
class RunConfig:
    """Full experiment description for one integration."""

    n: int = 2
    N: int = 32
    regime: str = "non_resistive"
    symmetry: str = "Sym1"
    s: float = 5.0
    delta: float = 0.1
    epsilon: float = 1e-3
    dt: float | None = None
    T: float = 10.0
    band_limit: int | None = None
    seed: int = 0
    output_every: int = 1
    mu: float | None = None
    nu: float | None = None
    nonlinear: bool = True
    resymmetrize: bool = False
    spectral_slope: float = 1.0

    @property
    def m(self) -> float:
        return self.s - 2.0 * self.delta - 1.0

    def resolved_mu_nu(self) -> tuple[float, float]:
        if self.regime == "non_resistive":
            return 1.0, 0.0
        if self.regime == "non_viscous":
            return 0.0, 1.0
        if self.mu is None or self.nu is None:
            raise ValueError("general regime requires explicit mu and nu")
        return float(self.mu), float(self.nu)

    def resolved_band_limit(self) -> int:
        if self.band_limit is not None:
            return self.band_limit
        return max(1, self.N // 4)

    def resolved_dt(self, state_scale: float = 0.0) -> float:
        if self.dt is not None:
            return self.dt
        # advective CFL; +1 accounts for the unit background field
        return 0.5 / (self.N * max(state_scale, state_scale + 1.0))

    def validate(self) -> list[str]:
        """All constraint violations, with the bound each value breaks."""
        errors = []
        if self.n < 2:
            errors.append(f"n must be >= 2, got {self.n}")
        if self.N < 4 or self.N % 2:
            errors.append(f"N must be even and >= 4, got {self.N}")
        if self.regime not in REGIMES:
            errors.append(f"regime must be one of {REGIMES}, got {self.regime!r}")
        if self.symmetry not in SYMMETRY_CLASSES:
            errors.append(
                f"symmetry must be one of {SYMMETRY_CLASSES}, got {self.symmetry!r}")
        half_n = self.n / 2.0
        if self.regime == "non_resistive":
            s_min = half_n + 3.0
            if self.s <= s_min:
                errors.append(
                    f"non-resistive regime requires s > n/2 + 3 = {s_min}, "
                    f"got s = {self.s}")
            else:
                d_max = (self.s - s_min) / 2.0
                if not 0.0 < self.delta < d_max:
                    errors.append(
                        f"non-resistive regime requires 0 < delta < "
                        f"(s - n/2 - 3)/2 = {d_max}, got delta = {self.delta}")
        elif self.regime == "non_viscous":
            s_min = half_n + 6.0
            if self.s <= s_min:
                errors.append(
                    f"non-viscous regime requires s > n/2 + 6 = {s_min}, "
                    f"got s = {self.s}")
            else:
                d_max = (self.s - s_min) / 2.0
                if not 0.0 < self.delta < d_max:
                    errors.append(
                        f"non-viscous regime requires 0 < delta < "
                        f"(s - n/2 - 6)/2 = {d_max}, got delta = {self.delta}")
        if self.dt is not None and self.dt <= 0:
            errors.append(f"dt must be positive, got {self.dt}")
        if self.T < 0:
            errors.append(f"T must be nonnegative, got {self.T}")
        if self.epsilon < 0:
            errors.append(f"epsilon must be nonnegative, got {self.epsilon}")
        if self.band_limit is not None and self.N >= 4:
            if self.band_limit > self.N // 3:
                errors.append(
                    f"band_limit must be <= N/3 = {self.N // 3}, "
                    f"got {self.band_limit}")
            if self.band_limit < 1:
                errors.append(f"band_limit must be >= 1, got {self.band_limit}")
        if self.output_every < 1:
            errors.append(f"output_every must be >= 1, got {self.output_every}")
        return errors

    def require_valid(self) -> "RunConfig":
        errors = self.validate()
        if errors:
            raise ValueError("invalid configuration:\n  " + "\n  ".join(errors))
        return self

    @classmethod
    def field_names(cls) -> set:
        return {f.name for f in dc_fields(cls)}


def linear_propagator(k, dt: float, mu: float, nu: float) -> np.ndarray:
    """exp(dt A(k)) for one wavevector, from the closed 2x2 form.

    A = alpha I + B with B = [[-beta, i gamma], [i gamma, beta]], B^2 = D^2 I,
    so exp(dt A) = e^{alpha dt} (cosh(D dt) I + sinh(D dt)/D B); the
    defective case D = 0 degenerates smoothly to I + dt B.
    """
    k = np.asarray(k, dtype=np.float64)
    if not np.any(k):
        raise ValueError("linear propagator is undefined at k = 0")
    k2 = float(np.sum(k * k))
    gamma = float(k[-1])
    alpha = -(mu + nu) * k2 / 2.0
    beta = (mu - nu) * k2 / 2.0
    d = np.sqrt(complex(beta * beta - gamma * gamma))
    z = d * dt
    cosh = np.cosh(z)
    sinhc = dt * _sinhc(z)
    env = np.exp(alpha * dt)
    return env * np.array([
        [cosh - beta * sinhc, 1j * gamma * sinhc],
        [1j * gamma * sinhc, cosh + beta * sinhc],
    ])


def _sinhc(z):
    """sinh(z)/z, stable at z = 0."""
    z = np.asarray(z, dtype=np.complex128)
    out = np.ones_like(z)
    small = np.abs(z) < 1e-6
    zs = np.where(small, 0.0, z)
    out = np.where(small, 1.0 + z * z / 6.0, np.sinh(zs) / np.where(small, 1.0, zs))
    return out


def _propagator_arrays(grid: Grid, dt: float, mu: float, nu: float):
    """Entrywise exp(dt A(k)) over the whole lattice: (e11, e12, e22).

    The off-diagonal entries coincide (A is symmetric); k = 0 gets the
    identity, which is irrelevant since the mean is pinned to zero.
    """
    k2 = grid.k2
    gamma = grid.k_vertical.astype(np.float64)
    alpha = -(mu + nu) * k2 / 2.0
    beta = (mu - nu) * k2 / 2.0
    d = np.sqrt((beta * beta - gamma * gamma).astype(np.complex128))
    z = d * dt
    cosh = np.cosh(z)
    sinhc = dt * _sinhc(z)
    env = np.exp(alpha * dt)
    e11 = env * (cosh - beta * sinhc)
    e12 = env * (1j * gamma * sinhc)
    e22 = env * (cosh + beta * sinhc)
    zero = k2 == 0
    e11[zero] = 1.0
    e12[zero] = 0.0
    e22[zero] = 1.0
    return e11, e12, e22


def make_initial_data(config: RunConfig) -> MhdState:
    """Random band-limited, mean-zero, divergence-free, symmetry-projected
    state with ||u||_{H^s} + ||b||_{H^s} = epsilon, deterministic in seed."""
    config.require_valid()
    grid = Grid(config.n, config.N)
    band = config.resolved_band_limit()
    if band > config.N // 3:
        raise ValueError(
            f"band_limit {band} exceeds the alias-free bound N/3 = {config.N // 3}")
    mu, nu = config.resolved_mu_nu()
    if config.epsilon == 0.0:
        return MhdState(zero_field(grid, grid.n), zero_field(grid, grid.n),
                        0.0, mu, nu)
    rng = np.random.default_rng(config.seed)
    u = random_field(grid, rng, ncomp=grid.n, band_limit=band,
                     slope=config.spectral_slope)
    b = random_field(grid, rng, ncomp=grid.n, band_limit=band,
                     slope=config.spectral_slope)
    u.coeffs = leray_project_coeffs(grid, u.coeffs)
    b.coeffs = leray_project_coeffs(grid, b.coeffs)
    u, b = symmetrize_pair(u, b, config.symmetry)
    total = sobolev(u, config.s) + sobolev(b, config.s)
    if total == 0.0:
        raise ValueError(
            "symmetry projection annihilated the random draw; change seed")
    factor = config.epsilon / total
    u.coeffs *= factor
    b.coeffs *= factor
    return MhdState(u, b, 0.0, mu, nu)


class Stepper:
    """Owns the per-dt cached propagators and advances a state."""

    def __init__(self, grid: Grid, dt: float, mu: float, nu: float,
                 nonlinear: bool = True):
        self.grid = grid
        self.dt = dt
        self.mu = mu
        self.nu = nu
        self.nonlinear = nonlinear
        self.half = _propagator_arrays(grid, dt / 2.0, mu, nu)

    def _apply_linear(self, u: np.ndarray, b: np.ndarray, prop):
        e11, e12, e22 = prop
        return e11 * u + e12 * b, e12 * u + e22 * b

    def nonlinear_rhs(self, u: np.ndarray, b: np.ndarray):
        """(Nu, Nb) = (P(b.grad b - u.grad u), b.grad u - u.grad b).

        Products are alias-free on the retained lattice; Nu is Leray
        projected, Nb's mean mode is pinned to zero.
        """
        grid = self.grid
        k = grid.wavenumbers.astype(np.float64)
        up = padded_to_physical(grid, u, real=True)
        bp = padded_to_physical(grid, b, real=True)
        # grad_w[j, i] = d_j w_i on the padded grid
        gu = padded_to_physical(grid, 1j * k[:, np.newaxis] * u[np.newaxis], real=True)
        gb = padded_to_physical(grid, 1j * k[:, np.newaxis] * b[np.newaxis], real=True)
        adv_uu = np.einsum("j...,ji...->i...", up, gu)
        adv_bb = np.einsum("j...,ji...->i...", bp, gb)
        adv_bu = np.einsum("j...,ji...->i...", bp, gu)
        adv_ub = np.einsum("j...,ji...->i...", up, gb)
        nu_c = physical_to_unpadded(grid, adv_bb - adv_uu)
        nb_c = physical_to_unpadded(grid, adv_bu - adv_ub)
        nu_c = leray_project_coeffs(grid, nu_c)
        zero_idx = (slice(None),) + (0,) * grid.n
        nu_c[zero_idx] = 0.0
        nb_c[zero_idx] = 0.0
        return nu_c, nb_c

    def step(self, state: MhdState) -> MhdState:
        grid = self.grid
        u, b = self._apply_linear(state.u.coeffs, state.b.coeffs, self.half)
        if self.nonlinear:
            dt = self.dt
            nu1, nb1 = self.nonlinear_rhs(u, b)
            u_pred = u + dt * nu1
            b_pred = b + dt * nb1
            nu2, nb2 = self.nonlinear_rhs(u_pred, b_pred)
            u = u + 0.5 * dt * (nu1 + nu2)
            b = b + 0.5 * dt * (nb1 + nb2)
        u, b = self._apply_linear(u, b, self.half)
        u = leray_project_coeffs(grid, u)
        b = leray_project_coeffs(grid, b)
        u = hermitian_symmetrize(u, grid)
        b = hermitian_symmetrize(b, grid)
        zero_idx = (slice(None),) + (0,) * grid.n
        u[zero_idx] = 0.0
        b[zero_idx] = 0.0
        u[:, grid.nyquist_mask] = 0.0
        b[:, grid.nyquist_mask] = 0.0
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(b))):
            raise BlowUpError(state.t + self.dt, "non-finite coefficients")
        return MhdState(SpectralField(grid, u), SpectralField(grid, b),
                        state.t + self.dt, state.mu, state.nu)


def step(state: MhdState, dt: float, nonlinear: bool = True) -> MhdState:
    """One Strang-composed step; convenience wrapper around Stepper."""
    stepper = Stepper(state.grid, dt, state.mu, state.nu, nonlinear=nonlinear)
    return stepper.step(state)


def run(config: RunConfig, initial: MhdState | None = None):
    """Integrate to T, returning (records, final state).

    Emits one DiagnosticsRecord at t=0 and then every output_every steps
    (plus the final step if it is off-cadence).
    """
    from .diagnostics import compute_record

    config.require_valid()
    state = initial if initial is not None else make_initial_data(config)
    dt = config.resolved_dt(state.scale())
    stepper = Stepper(state.grid, dt, state.mu, state.nu,
                      nonlinear=config.nonlinear)
    records = [compute_record(state, config)]
    initial_scale = state.scale()
    norm_history = [(state.t, initial_scale)]
    n_steps = int(round(config.T / dt)) if config.T > 0 else 0
    for i in range(1, n_steps + 1):
        state = stepper.step(state)
        if config.resymmetrize:
            state = symmetrize(state, config.symmetry)
        scale = state.scale()
        norm_history.append((state.t, scale))
        if initial_scale > 0 and scale > 1e6 * initial_scale:
            raise BlowUpError(
                state.t, f"coefficient scale grew by {scale / initial_scale:.3g}x",
                norm_history)
        if i % config.output_every == 0 or i == n_steps:
            records.append(compute_record(state, config))
    return records, state
