"""Experiment driver: twist sweeps, empirical moments and distributions,
vanishing statistics, and their comparisons against the predictions.

Conventions follow the source material for zero central values: a twist with
c(|d|) = 0 is excluded from every log-based statistic and from the value
density, but is counted in all vanishing statistics.  Vanishing is decided
on the integer coefficient, never on a float.  Real accumulations go through
math.fsum (exact compensated summation), so results do not depend on
chunking or summation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import family_array, kronecker, primes_up_to
from .curves import EllipticCurveRecord
from .errors import DataError
from .predict import arithmetic_factor, rq_main, rq_refined
from .theta import CoefficientTable

__all__ = [
    "TwistSample",
    "SweepResult",
    "sweep",
    "empirical_moment",
    "raw_moment_sum",
    "HistogramResult",
    "value_histogram",
    "small_value_slope",
    "clt_transform",
    "clt_transform_coefficient",
    "distribution_transform",
    "distribution_transform_coefficient",
    "ks_statistic",
    "ks_to_gaussian",
    "ks_to_lognormal",
    "vanishing_report",
    "rq_report",
]


@dataclass(frozen=True)
class TwistSample:
    """One family member: discriminant, integer coefficient, central value."""

    d: int
    c: int
    lvalue: float


@dataclass
class SweepResult:
    """All samples of one family sweep, ordered by increasing |d|.

    lvalue[i] is exactly 0.0 iff c[i] == 0; vanishing statistics consult the
    integer column only.
    """

    curve: str
    sign: str
    bound: int
    d: np.ndarray       # int64, signed
    c: np.ndarray       # int64
    lvalue: np.ndarray  # float64

    @property
    def sample_count(self) -> int:
        return int(len(self.d))

    @property
    def vanishing_count(self) -> int:
        return int(np.count_nonzero(self.c == 0))

    def samples(self):
        for d, c, lv in zip(self.d.tolist(), self.c.tolist(), self.lvalue.tolist()):
            yield TwistSample(d, c, lv)

    def unit_disc_count(self) -> int:
        """How many samples have |d| in {3, 4} (extra units in the quadratic
        field); they are included everywhere but flagged in reports."""
        return int(np.count_nonzero((np.abs(self.d) == 3) | (np.abs(self.d) == 4)))


def sweep(curve: EllipticCurveRecord, x_bound: int, table: CoefficientTable) -> SweepResult:
    """Iterate S(X), look up c(|d|), map to L-values; deterministic.

    The coefficient table must cover X (a shorter cache is an error).
    """
    if table.curve and table.curve != curve.name:
        raise DataError(f"table belongs to {table.curve!r}, not {curve.name!r}")
    if table.bound < x_bound:
        raise DataError(f"coefficient table bound {table.bound} < sweep bound {x_bound}")
    spec = curve.family_spec(x_bound)
    d = family_array(spec)
    absd = np.abs(d)
    c = table.values[absd]
    lvalue = curve.kappa * c.astype(float) ** 2 / np.sqrt(absd.astype(float))
    return SweepResult(
        curve=curve.name, sign=curve.sign, bound=x_bound, d=d, c=c, lvalue=lvalue
    )


def raw_moment_sum(result: SweepResult, k: int) -> float:
    """Compensated sum of L^k over the family (zeros included)."""
    return math.fsum((result.lvalue ** k).tolist())


def empirical_moment(result: SweepResult, s) -> float:
    """Mean of L^s over the family.

    Integer s >= 0 keeps zero values (0^0 counts as 1 only at s = 0, where
    the moment is exactly 1); non-integer s drops them, matching the
    convention for logarithmic statistics.
    """
    n = result.sample_count
    if n == 0:
        raise DataError("empty sweep")
    if float(s).is_integer():
        k = int(round(float(s)))
        if k == 0:
            return 1.0
        return raw_moment_sum(result, k) / n
    lv = result.lvalue[result.c != 0]
    return math.fsum((lv ** float(s)).tolist()) / n


@dataclass
class HistogramResult:
    """Normalised density histogram of the nonzero central values."""

    edges: np.ndarray
    counts: np.ndarray  # int64 per bin
    density: np.ndarray
    zero_count: int
    total_count: int

    @property
    def mass(self) -> float:
        return float(np.sum(self.density * np.diff(self.edges)))


def value_histogram(result: SweepResult, bins=200, log_bins: bool = False) -> HistogramResult:
    """Histogram of nonzero L-values, normalised to unit mass.

    Zero values are excluded from the density and reported separately.
    """
    nz = result.lvalue[result.c != 0]
    if len(nz) == 0:
        raise DataError("no nonzero values to bin")
    if log_bins:
        lo, hi = np.log10(nz.min()), np.log10(nz.max())
        edges = np.logspace(lo, hi, int(bins) + 1) if np.isscalar(bins) else np.asarray(bins, float)
    else:
        edges = (
            np.linspace(0.0, float(nz.max()), int(bins) + 1)
            if np.isscalar(bins)
            else np.asarray(bins, dtype=float)
        )
    counts, edges = np.histogram(nz, bins=edges)
    widths = np.diff(edges)
    density = counts / (len(nz) * widths)
    return HistogramResult(
        edges=edges,
        counts=counts.astype(np.int64),
        density=density,
        zero_count=result.vanishing_count,
        total_count=result.sample_count,
    )


def small_value_slope(result: SweepResult, decades: float = 2.0,
                      bins_per_decade: int = 8) -> float:
    """Log-log slope of the density over the lowest value decades.

    The small-value law predicts slope -1/2.  Least-squares fit on
    log10(density) against log10(bin center), bins spanning `decades`
    upward from the smallest nonzero value.
    """
    nz = result.lvalue[result.c != 0]
    lo = float(nz.min())
    edges = np.logspace(
        math.log10(lo), math.log10(lo) + decades, int(decades * bins_per_decade) + 1
    )
    counts, _ = np.histogram(nz, bins=edges)
    widths = np.diff(edges)
    centers = np.sqrt(edges[:-1] * edges[1:])
    dens = counts / (len(nz) * widths)
    keep = counts > 0
    if keep.sum() < 4:
        raise DataError("too few populated bins for a slope fit")
    xs = np.log10(centers[keep])
    ys = np.log10(dens[keep])
    slope = np.polyfit(xs, ys, 1)[0]
    return float(slope)


# ---------------------------------------------------------------------------
# distribution transforms
# ---------------------------------------------------------------------------

def _loglog_absd(result: SweepResult, mask: np.ndarray) -> np.ndarray:
    return np.log(np.log(np.abs(result.d[mask]).astype(float)))


def clt_transform(result: SweepResult) -> np.ndarray:
    """(log L + (1/2) log log |d|) / sqrt(log log |d|), zero values excluded."""
    mask = result.c != 0
    ll = _loglog_absd(result, mask)
    return (np.log(result.lvalue[mask]) + 0.5 * ll) / np.sqrt(ll)


def clt_transform_coefficient(result: SweepResult) -> np.ndarray:
    """Coefficient-space form (2 log|c| - (1/2) log|d| + (1/2) log log|d|) /
    sqrt(log log|d|); equals clt_transform minus log(kappa)/sqrt(log log|d|)."""
    mask = result.c != 0
    ll = _loglog_absd(result, mask)
    absd = np.abs(result.d[mask]).astype(float)
    num = 2.0 * np.log(np.abs(result.c[mask]).astype(float)) - 0.5 * np.log(absd) + 0.5 * ll
    return num / np.sqrt(ll)


def distribution_transform(result: SweepResult) -> np.ndarray:
    """(sqrt(log|d|) L)^(1/sqrt(log log |d|)) over nonzero values."""
    mask = result.c != 0
    absd = np.abs(result.d[mask]).astype(float)
    base = np.sqrt(np.log(absd)) * result.lvalue[mask]
    return base ** (1.0 / np.sqrt(np.log(np.log(absd))))


def distribution_transform_coefficient(result: SweepResult, kappa: float) -> np.ndarray:
    """(kappa sqrt(log|d|)/sqrt(|d|) c^2)^(1/sqrt(log log|d|)): identical to
    distribution_transform by the L = kappa c^2/sqrt|d| substitution."""
    mask = result.c != 0
    absd = np.abs(result.d[mask]).astype(float)
    base = kappa * np.sqrt(np.log(absd)) / np.sqrt(absd) * result.c[mask].astype(float) ** 2
    return base ** (1.0 / np.sqrt(np.log(np.log(absd))))


def ks_statistic(samples: np.ndarray, cdf_at_samples: np.ndarray) -> float:
    """Kolmogorov-Smirnov distance given model CDF values at the sorted samples."""
    n = len(samples)
    order = np.argsort(samples)
    f = np.asarray(cdf_at_samples)[order]
    up = np.max(np.arange(1, n + 1) / n - f)
    down = np.max(f - np.arange(0, n) / n)
    return float(max(up, down))


def ks_to_gaussian(samples: np.ndarray) -> float:
    from scipy.stats import norm

    s = np.sort(samples)
    return ks_statistic(s, norm.cdf(s))


def ks_to_lognormal(samples: np.ndarray) -> float:
    """KS distance to the density (1/t) exp(-(log t)^2/2)/sqrt(2 pi), whose
    CDF is Phi(log t)."""
    from scipy.stats import norm

    s = np.sort(samples)
    return ks_statistic(s, norm.cdf(np.log(s)))


def ks_to_grid_cdf(samples: np.ndarray, grid: np.ndarray, cdf_values: np.ndarray) -> float:
    """KS distance against a model CDF tabulated on a grid (interpolated)."""
    s = np.sort(samples)
    f = np.interp(s, grid, cdf_values)
    return ks_statistic(s, f)


# ---------------------------------------------------------------------------
# vanishing statistics
# ---------------------------------------------------------------------------

@dataclass
class VanishingReport:
    """Vanishing counts on a grid of bounds, with the flat-curve normalisation.

    normalized[i] = fraction[i] / (A(-1/2) sqrt(kappa) X^(-1/4) (log X)^(3/8));
    slope is the difference quotient of `normalized` between the last two
    grid points.  no_vanishing flags a c_E = 0 candidate.
    """

    curve: str
    prime_only: bool
    grid: np.ndarray
    totals: np.ndarray
    vanishing: np.ndarray
    fraction: np.ndarray
    normalized: np.ndarray
    slope: float | None
    no_vanishing: bool
    unit_disc_count: int


def vanishing_report(
    result: SweepResult,
    curve: EllipticCurveRecord,
    prime_only: bool = True,
    x_step: int | None = None,
    p_max: int = 10_000,
    a_minus_half: float | None = None,
    cache_dir=None,
) -> VanishingReport:
    """Vanishing frequency versus X with the conjectured normalisation."""
    if a_minus_half is None:
        a_minus_half = arithmetic_factor(curve, None, -0.5, p_max, cache_dir=cache_dir)
    absd = np.abs(result.d)
    vanish = result.c == 0
    if prime_only:
        sieve = np.zeros(result.bound + 1, dtype=bool)
        sieve[primes_up_to(result.bound)] = True
        keep = sieve[absd]
    else:
        keep = np.ones(len(absd), dtype=bool)
    if x_step is None:
        x_step = max(result.bound // 10, 1)
    grid = np.arange(x_step, result.bound + 1, x_step, dtype=np.int64)
    totals = np.searchsorted(absd[keep], grid, side="right")
    vsorted = absd[keep & vanish]
    vcounts = np.searchsorted(vsorted, grid, side="right")
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = np.where(totals > 0, vcounts / np.maximum(totals, 1), np.nan)
        norm = frac / (
            a_minus_half
            * math.sqrt(curve.kappa)
            * grid.astype(float) ** -0.25
            * np.log(grid.astype(float)) ** 0.375
        )
    slope = None
    if len(grid) >= 2 and np.isfinite(norm[-1]) and np.isfinite(norm[-2]):
        slope = float((norm[-1] - norm[-2]) / (grid[-1] - grid[-2]))
    return VanishingReport(
        curve=result.curve,
        prime_only=prime_only,
        grid=grid,
        totals=totals.astype(np.int64),
        vanishing=vcounts.astype(np.int64),
        fraction=frac,
        normalized=norm,
        slope=slope,
        no_vanishing=bool(vcounts[-1] == 0),
        unit_disc_count=result.unit_disc_count(),
    )


@dataclass
class RqRow:
    """Empirical vanishing-ratio split for one prime q (None when undefined)."""

    q: int
    a_q: int
    n_plus: int
    n_minus: int
    r_empirical: float | None
    r_main: float
    r_refined: float
    delta_main: float | None
    delta_refined: float | None


def rq_report(
    result: SweepResult,
    curve: EllipticCurveRecord,
    q_max: int = 100,
    p_max: int = 10_000,
    cache_dir=None,
) -> list[RqRow]:
    """Per-q empirical R_q against the main and refined predictions.

    Splits vanishing twists by chi_d(q) = +-1 (d with q | d fall in neither
    class); a zero denominator leaves the empirical ratio absent.
    """
    dv = result.d[result.c == 0].tolist()
    rows = []
    for q in primes_up_to(q_max).tolist():
        if curve.conductor % q == 0:
            continue
        n_plus = n_minus = 0
        for d in dv:
            chi = kronecker(d, q)
            if chi == 1:
                n_plus += 1
            elif chi == -1:
                n_minus += 1
        r_main = rq_main(curve, q, cache_dir)
        r_ref = rq_refined(curve, None, q, result.bound, p_max, cache_dir)
        if n_minus > 0:
            r_emp = n_plus / n_minus
            rows.append(
                RqRow(q, _aq(curve, q, cache_dir), n_plus, n_minus, r_emp,
                      r_main, r_ref, r_emp - r_main, r_emp - r_ref)
            )
        else:
            rows.append(
                RqRow(q, _aq(curve, q, cache_dir), n_plus, n_minus, None,
                      r_main, r_ref, None, None)
            )
    return rows


def _aq(curve, q, cache_dir):
    from .curves import ap_table

    return int(ap_table(curve, max(q, 5), cache_dir)[q])
