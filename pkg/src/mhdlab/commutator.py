"""Numerical evaluation of the negative-order Riesz commutator and the
four case-specific right-hand sides, plus a randomized ratio campaign.

The commutator is L = ||Lam^{-s} Op(fg) - f Lam^{-s} Op(g)||_{Hdot^{-l}}
where Op is either a partial Laplacian root (symbol (sum_{i in J} k_i^2)^{1/2})
or a first-order derivative.  The estimate is asymmetric in f and g;
swapping them is a distinct sample.
"""

from dataclasses import dataclass, asdict, field

import numpy as np

from .fields import SpectralField, random_field
from .grid import Grid
from .multipliers import (apply_scalar_symbol, derivative_symbol,
                          fractional_symbol, partial_root_symbol)
from .norms import homogeneous
from .products import dealiased_product


@dataclass(frozen=True)
class CommutatorOp:
    """Op in the commutator: partial_laplacian_root(axes) or derivative(axis)."""

    kind: str
    axes: tuple = field(default_factory=tuple)
    axis: int = 0

    def symbol(self, grid: Grid) -> np.ndarray:
        if self.kind == "partial_laplacian_root":
            return partial_root_symbol(grid, self.axes)
        if self.kind == "derivative":
            return derivative_symbol(grid, self.axis)
        raise ValueError(f"unknown commutator operator kind {self.kind!r}")


@dataclass
class CommutatorSample:
    n: int
    resolution: int
    case: int
    s: float
    l: float
    eta: float
    op_kind: str
    lhs: float
    rhs: float
    ratio: float
    seed: int

    def to_dict(self) -> dict:
        return asdict(self)


def classify_case(n: int, s: float, l: float) -> int:
    """Which of the four estimates applies to (n, s, l); l >= 0, s > 0."""
    if s <= 0 or l < 0:
        raise ValueError(f"require s > 0 and l >= 0, got s={s}, l={l}")
    half = n / 2.0
    if 1.0 <= s <= half and 0.0 < s + l <= half:
        return 1
    if s >= 1.0 and s + l > half:
        return 2
    if 0.0 < s < 1.0 and 0.0 < s + l <= half:
        return 3
    if 0.0 < s < 1.0 and s + l > half:
        return 4
    raise ValueError(f"no case covers n={n}, s={s}, l={l}")


def check_case(n: int, s: float, l: float, case: int) -> None:
    half = n / 2.0
    conditions = {
        1: (1.0 <= s <= half, f"case 1 needs 1 <= s <= n/2 = {half}",
            0.0 < s + l <= half, f"case 1 needs 0 < s+l <= n/2 = {half}"),
        2: (s >= 1.0, "case 2 needs s >= 1",
            s + l > half, f"case 2 needs s+l > n/2 = {half}"),
        3: (0.0 < s < 1.0, "case 3 needs 0 < s < 1",
            0.0 < s + l <= half, f"case 3 needs 0 < s+l <= n/2 = {half}"),
        4: (0.0 < s < 1.0, "case 4 needs 0 < s < 1",
            s + l > half, f"case 4 needs s+l > n/2 = {half}"),
    }
    if case not in conditions:
        raise ValueError(f"case must be 1..4, got {case}")
    ok1, msg1, ok2, msg2 = conditions[case]
    violated = [m for ok, m in ((ok1, msg1), (ok2, msg2)) if not ok]
    if violated:
        raise ValueError(
            f"(s={s}, l={l}) violates: " + "; ".join(violated))


def commutator_lhs(f: SpectralField, g: SpectralField, s: float, l: float,
                   op: CommutatorOp) -> float:
    """||Lam^{-s} Op(fg) - f Lam^{-s} Op(g)||_{Hdot^{-l}} on the lattice."""
    if not f.is_mean_zero() or not g.is_mean_zero():
        raise ValueError("commutator requires mean-zero f and g")
    grid = f.grid
    sym = op.symbol(grid) * fractional_symbol(grid, -s)
    term1 = apply_scalar_symbol(dealiased_product(f, g), sym)
    term2 = dealiased_product(f, apply_scalar_symbol(g, sym))
    diff = SpectralField(grid, term1.coeffs - term2.coeffs)
    # project onto nonzero modes: negative-order norm sums exclude k = 0
    diff.coeffs[(slice(None),) + (0,) * grid.n] = 0.0
    return homogeneous(diff, -l)


def commutator_rhs(f: SpectralField, g: SpectralField, s: float, l: float,
                   eta: float, case: int, op: CommutatorOp) -> float:
    """Case-specific right-hand side of the commutator estimate."""
    if not 0.0 < eta < 1.0:
        raise ValueError(f"eta must lie in (0, 1), got {eta}")
    check_case(f.grid.n, s, l, case)
    grid = f.grid
    n = grid.n
    sym = op.symbol(grid)
    op_f = apply_scalar_symbol(f, sym)
    op_g = apply_scalar_symbol(g, sym)
    eta_fac = eta ** -0.5
    if case in (1, 3):
        main = eta_fac * (
            homogeneous(op_g, -s - l - 1.0) * homogeneous(f, (n + eta) / 2.0 + 1.0)
            + homogeneous(op_f, -s - l) * homogeneous(g, (n + eta) / 2.0))
    else:
        main = (homogeneous(op_g, -s - l - 1.0) * homogeneous(f, s + l + 1.0)
                + homogeneous(op_f, -s - l) * homogeneous(g, s + l))
    if case in (3, 4):
        main += eta_fac * (homogeneous(op_g, -2.0 * s - l)
                           * homogeneous(f, (n + eta) / 2.0 + s))
    return main


@dataclass
class CampaignCell:
    """Statistics for one (s, l, eta, slope) cell of a campaign."""

    case: int
    s: float
    l: float
    eta: float
    slope: float
    per_resolution_max: dict
    max_ratio: float
    mean_ratio: float
    samples: int

    def to_dict(self) -> dict:
        return asdict(self)


def sample_ratio(grid: Grid, rng: np.random.Generator, s: float, l: float,
                 eta: float, case: int, op: CommutatorOp, slope: float,
                 seed: int = -1) -> CommutatorSample:
    band = grid.N // 3
    f = random_field(grid, rng, band_limit=band, slope=slope)
    g = random_field(grid, rng, band_limit=band, slope=slope)
    lhs = commutator_lhs(f, g, s, l, op)
    rhs = commutator_rhs(f, g, s, l, eta, case, op)
    ratio = lhs / rhs if rhs > 0 else 0.0
    return CommutatorSample(
        n=grid.n, resolution=grid.N, case=case, s=s, l=l, eta=eta,
        op_kind=op.kind, lhs=lhs, rhs=rhs, ratio=ratio, seed=seed)


def ratio_campaign(n: int, case: int, cells, trials: int, resolutions,
                   op: CommutatorOp | None = None, seed: int = 0,
                   collect_samples: bool = False):
    """Randomized falsification harness for one case.

    ``cells`` is an iterable of (s, l, eta, slope) tuples; every cell is
    validated against the case preconditions up front.  Returns
    (cell_stats, samples).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    resolutions = list(resolutions)
    if not resolutions:
        raise ValueError("at least one resolution is required")
    if op is None:
        op = CommutatorOp("partial_laplacian_root", axes=(0,))
    for s, l, eta, slope in cells:
        check_case(n, s, l, case)
    stats = []
    all_samples = []
    for s, l, eta, slope in cells:
        per_res = {}
        ratios = []
        for N in resolutions:
            grid = Grid(n, N)
            rng = np.random.default_rng(
                abs(hash((seed, case, s, l, eta, slope, N))) % (2 ** 32))
            best = 0.0
            for trial in range(trials):
                samp = sample_ratio(grid, rng, s, l, eta, case, op, slope,
                                    seed=seed)
                best = max(best, samp.ratio)
                ratios.append(samp.ratio)
                if collect_samples:
                    all_samples.append(samp)
            per_res[N] = best
        stats.append(CampaignCell(
            case=case, s=s, l=l, eta=eta, slope=slope,
            per_resolution_max=per_res,
            max_ratio=float(np.max(ratios)),
            mean_ratio=float(np.mean(ratios)),
            samples=len(ratios)))
    return stats, all_samples


def default_cells(n: int, case: int, etas=(0.5,), slopes=(0.0, 1.0)):
    """Valid (s, l, eta, slope) cells per case for dimension n."""
    half = n / 2.0
    if case == 1:
        base = [(1.0, l) for l in (0.0, half - 1.0) if 0.0 < 1.0 + l <= half]
        if not base:
            base = [(1.0, 0.0)]
    elif case == 2:
        base = [(1.0, half), (1.0, half + 0.5), (2.0, 1.0)]
    elif case == 3:
        base = [(0.5, l) for l in (0.25, half - 0.5) if 0.0 < 0.5 + l <= half]
    elif case == 4:
        base = [(0.5, half), (0.75, half + 0.5)]
    else:
        raise ValueError(f"case must be 1..4, got {case}")
    seen = sorted(set(base))
    return [(s, l, eta, slope) for (s, l) in seen for eta in etas
            for slope in slopes]
