"""Conjecture-side quantities for a twist family: the arithmetic factor
A(s), the multivariate Euler products behind the full moment polynomials,
the moment polynomials themselves by k-fold contour residues, leading-order
asymptotics, the small-value constant, and vanishing-ratio predictions.

Euler products here converge only conditionally (their 1/p fluctuations
cancel on Sato-Tate average), so a sharp cutoff at p <= P carries an
oscillating bias.  All product evaluators therefore use a tapered cutoff:
the geometric mean of sharp partial products over a ladder of cutoffs
spanning the top octave [P/2, P] (equivalently, log-weights decaying
linearly in log p).  The taper is deterministic in P, uses no data beyond
p <= P, and is what lets the doubling-stability targets hold at s >= 3.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import loggamma

from .arith import family_array
from .curves import EllipticCurveRecord, ap_table
from .errors import ConvergenceError, DataError, PoleError
from .rmt import _zeta_vec, barnes_g, g_analytic, zeta_near_one

__all__ = [
    "PredictionConfig",
    "MomentPolynomial",
    "arithmetic_factor",
    "arithmetic_factor_report",
    "fk_integrand",
    "upsilon",
    "moment_prediction",
    "leading_asymptotic",
    "small_value_constant",
    "rq_main",
    "beta_p",
    "lambda_nu",
    "lambda_nu_report",
    "rq_refined",
]

_EULER_GAMMA = 0.5772156649015328606


@dataclass(frozen=True)
class PredictionConfig:
    """Truncation and quadrature parameters for the conjecture evaluators."""

    p_max: int = 10_000
    nodes: int = 64
    r0: float = 0.08
    taper_steps: int = 16
    eps: float = 1e-4
    verify: bool = False
    cache_dir: object = None

    def radii(self, k: int) -> np.ndarray:
        r = self.r0 * (1.0 + np.arange(k) / (8.0 * k))
        if r.sum() >= 0.5:
            raise ValueError("radii sum must stay below 1/2 (A_k convergence domain)")
        return r


@dataclass
class MomentPolynomial:
    """Polynomial for the k-th moment: sum_r f[r] * x^(deg - r), deg = k(k-1)/2."""

    k: int
    sign: str
    f: list[float]  # f[0] leading .. f[deg] constant
    p_max: int
    nodes: int

    def __post_init__(self):
        deg = self.k * (self.k - 1) // 2
        if len(self.f) != deg + 1:
            raise DataError("coefficient count does not match degree")
        if self.f[0] <= 0:
            raise DataError("leading coefficient must be positive")

    @property
    def degree(self) -> int:
        return self.k * (self.k - 1) // 2

    def __call__(self, x):
        acc = np.zeros_like(np.asarray(x, dtype=float))
        for c in self.f:
            acc = acc * x + c
        return acc if np.ndim(x) else float(acc)

    def dumps(self) -> str:
        return json.dumps(
            {
                "k": self.k,
                "sign": self.sign,
                "coefficients": [repr(c) for c in self.f],
                "p_max": self.p_max,
                "nodes": self.nodes,
            }
        )

    @classmethod
    def loads(cls, text: str) -> "MomentPolynomial":
        raw = json.loads(text)
        return cls(
            k=int(raw["k"]),
            sign=str(raw["sign"]),
            f=[float(c) for c in raw["coefficients"]],
            p_max=int(raw["p_max"]),
            nodes=int(raw["nodes"]),
        )


# ---------------------------------------------------------------------------
# tapered Euler products
# ---------------------------------------------------------------------------

def _taper_cutoffs(p_max: int, steps: int):
    """Ascending octave ladder [P/2 .. P] and its trapezoid weights."""
    cuts = p_max * 2.0 ** (-(steps - np.arange(steps + 1)) / steps)
    wts = np.full(steps + 1, 1.0 / steps)
    wts[0] = wts[-1] = 0.5 / steps
    return cuts, wts


def _taper_weights(primes: np.ndarray, p_max: int, steps: int) -> np.ndarray:
    """Per-prime staircase weights: 1 below P/2, decaying to ~0 at P."""
    cuts, wts = _taper_cutoffs(p_max, steps)
    w = np.zeros(len(primes))
    for c, om in zip(cuts, wts):
        w += om * (primes <= c)
    return w


def _sign_value(curve: EllipticCurveRecord, sign) -> int:
    s = curve.sign if sign is None else sign
    if s in ("imaginary", "-", -1):
        return -1
    if s in ("real", "+", 1):
        return 1
    raise ValueError(f"bad sign {sign!r}")


def _local_log_a(s: float, p: int, a: int, bad: bool, eps_sign: int) -> float:
    """log of one local factor of the arithmetic factor A(s)."""
    base = (s * (s - 1.0) / 2.0) * math.log1p(-1.0 / p)
    if bad:
        den = 1.0 - a * (eps_sign * a / p)
        if den <= 0.0:
            raise PoleError(f"bad local factor pole at p={p}")
        return base - s * math.log(den)
    dp = 1.0 - a / p + 1.0 / p
    dm = 1.0 + a / p + 1.0 / p
    if dp <= 0.0 or dm <= 0.0:
        raise PoleError(f"local factor pole at p={p}")
    val = (p / (p + 1.0)) * (1.0 / p + 0.5 * (dp ** (-s) + dm ** (-s)))
    if val <= 0.0:
        raise PoleError(f"negative local factor base at p={p}, s={s}")
    return base + math.log(val)


def arithmetic_factor(
    curve: EllipticCurveRecord,
    sign=None,
    s: float = 1.0,
    p_max: int = 10_000,
    taper_steps: int = 16,
    cache_dir=None,
) -> float:
    """Arithmetic factor A(s) of the moment conjecture, tapered truncation.

    Good p: (1-1/p)^(s(s-1)/2) (p/(p+1)) (1/p + (L_p(1/p)^s + L_p(-1/p)^s)/2);
    bad p: (1-1/p)^(s(s-1)/2) L_p(+-a_p/p)^s, sign by family.  Exactly 1 at
    s = 0.  The octave taper supplies most of a doubling of effective depth.
    """
    if s <= -1.0:
        raise ValueError("s > -1 required")
    if p_max < 100:
        raise ValueError("p_max >= 100 required")
    eps_sign = _sign_value(curve, sign)
    apt = ap_table(curve, p_max, cache_dir)
    primes = np.array(sorted(apt), dtype=np.int64)
    wts = _taper_weights(primes, p_max, taper_steps)
    q = curve.conductor
    tot = 0.0
    for p, w in zip(primes.tolist(), wts.tolist()):
        if w == 0.0:
            continue
        tot += w * _local_log_a(s, p, apt[p], q % p == 0, eps_sign)
    return math.exp(tot)


def arithmetic_factor_report(curve, sign=None, s=1.0, p_max=10_000, **kw):
    """(A(P_max), |A(P_max) - A(P_max/2)|) as value and error estimate."""
    a_full = arithmetic_factor(curve, sign, s, p_max, **kw)
    a_half = arithmetic_factor(curve, sign, s, p_max // 2, **kw)
    return a_full, abs(a_full - a_half)


# ---------------------------------------------------------------------------
# multivariate integrand and moment polynomials
# ---------------------------------------------------------------------------

def fk_integrand(
    curve: EllipticCurveRecord,
    sign=None,
    k: int = 1,
    z=(0.0,),
    p_max: int = 10_000,
    taper_steps: int = 16,
    cache_dir=None,
) -> complex:
    """The moment-conjecture integrand F_k(z_1..z_k) at one point.

    F_k = A_k(z) prod_j (Gamma(1+z_j)/Gamma(1-z_j) (Q/4pi^2)^{z_j})^(1/2)
          prod_{i<j} zeta(1+z_i+z_j),
    with A_k the (tapered) prime product of F_{k,p} prod_{i<j}(1-p^{-1-zi-zj}).
    """
    z = np.asarray(z, dtype=complex)
    if len(z) != k:
        raise ValueError("len(z) != k")
    if float(np.sum(np.abs(z))) >= 0.5:
        raise ValueError("sum |z_j| < 1/2 required (absolute-convergence domain)")
    eps_sign = _sign_value(curve, sign)
    apt = ap_table(curve, p_max, cache_dir)
    primes = np.array(sorted(apt), dtype=np.int64)
    wts = _taper_weights(primes, p_max, taper_steps)
    q = curve.conductor

    inner = np.exp(loggamma(1.0 + z) - loggamma(1.0 - z) + z * math.log(q / (4.0 * math.pi ** 2)))
    if np.any(inner.real <= 0.0):
        raise ConvergenceError("gamma/conductor factor crossed the branch cut")
    out = complex(np.prod(np.exp(0.5 * np.log(inner))))
    for i in range(k):
        for j in range(i + 1, k):
            w = z[i] + z[j]
            if abs(w) < 1e-12:
                raise PoleError("zeta pole: z_i + z_j = 0")
            out *= zeta_near_one(1.0 + w)
    lf = 0.0 + 0.0j
    for p, wt in zip(primes.tolist(), wts.tolist()):
        if wt == 0.0:
            continue
        a = apt[p]
        x = np.exp(-(1.0 + z) * math.log(p))
        if q % p == 0:
            loc = complex(np.prod(1.0 / (1.0 - a * eps_sign * x)))
        else:
            u = np.prod(1.0 / (1.0 - a * x + p * x * x))
            v = np.prod(1.0 / (1.0 + a * x + p * x * x))
            loc = (1.0 / (1.0 + 1.0 / p)) * (1.0 / p + 0.5 * (u + v))
        for i in range(k):
            for j in range(i + 1, k):
                loc *= 1.0 - np.exp(-(1.0 + z[i] + z[j]) * math.log(p))
        lf += wt * np.log(loc)
    return out * complex(np.exp(lf))


def _upsilon_tables(curve, eps_sign, k, config):
    """Quadrature node tables for the k-fold residue of F_k."""
    M = config.nodes
    radii = config.radii(k)
    theta = 2.0 * np.pi * np.arange(M) / M
    nodes = radii[:, None] * np.exp(1j * theta)[None, :]  # (k, M)

    apt = ap_table(curve, config.p_max, config.cache_dir)
    primes = np.array(sorted(apt), dtype=np.int64)
    wts = _taper_weights(primes, config.p_max, config.taper_steps)
    keep = wts > 0.0
    primes, wts = primes[keep], wts[keep]
    traces = np.array([apt[int(p)] for p in primes], dtype=np.int64)
    q = curve.conductor
    bad = np.array([q % int(p) == 0 for p in primes])
    logp = np.log(primes.astype(float))

    # per-axis: sqrt(Gamma-ratio * conductor power) * tapered bad-prime
    # factors * z^(2-2k), the last being the z^-(2k-1) pole and the measure z
    per_axis = np.empty((k, M), dtype=complex)
    for j in range(k):
        zrow = nodes[j]
        inner = np.exp(
            loggamma(1.0 + zrow) - loggamma(1.0 - zrow)
            + zrow * math.log(q / (4.0 * math.pi ** 2))
        )
        if np.any(inner.real <= 0.0):
            raise ConvergenceError("gamma/conductor factor crossed the branch cut")
        g = np.exp(0.5 * np.log(inner))
        for p, w, a in zip(primes[bad].tolist(), wts[bad].tolist(), traces[bad].tolist()):
            x = np.exp(-(1.0 + zrow) * math.log(p))
            g = g * np.exp(-w * np.log(1.0 - a * eps_sign * x))
        per_axis[j] = g * zrow ** (2 - 2 * k)

    # pairwise: zeta(1+w) * prod_p (1-p^{-1-w})^{w_p} * (z_j^2 - z_i^2)^2
    pair = np.ones((k, k, M, M), dtype=complex)
    for i in range(k):
        for j in range(i + 1, k):
            w = nodes[i][:, None] + nodes[j][None, :]
            if np.abs(w).min() < 1e-8:
                raise PoleError("radii collision: z_i + z_j ~ 0 on the grid")
            t = _zeta_vec(1.0 + w)
            lg = np.zeros((M, M), dtype=complex)
            for p, wt, lgp in zip(primes.tolist(), wts.tolist(), logp.tolist()):
                lg += wt * np.log1p(-np.exp(-(1.0 + w) * lgp))
            pair[i, j] = t * np.exp(lg) * (nodes[j][None, :] ** 2 - nodes[i][:, None] ** 2) ** 2

    # per-good-prime node tables and the taper ladder over good primes
    goodmask = ~bad
    gp = primes[goodmask]
    ga = traces[goodmask]
    n_good = len(gp)
    u_tab = np.empty((k, M, n_good), dtype=complex)
    v_tab = np.empty((k, M, n_good), dtype=complex)
    for j in range(k):
        x = np.exp(-np.outer(1.0 + nodes[j], np.log(gp.astype(float))))  # (M, G)
        u_tab[j] = 1.0 / (1.0 - ga * x + gp * x * x)
        v_tab[j] = 1.0 / (1.0 + ga * x + gp * x * x)
    c_add = (1.0 / (1.0 + 1.0 / gp)) * (1.0 / gp)
    c_mul = (1.0 / (1.0 + 1.0 / gp)) * 0.5
    cuts, omega = _taper_cutoffs(config.p_max, config.taper_steps)
    snap_pos = np.searchsorted(gp, cuts, side="right").astype(np.int64)
    # bad primes inside the octave already carry their own taper weights in
    # per_axis/pair; the ladder here weights good primes only
    return nodes, per_axis, pair, u_tab, v_tab, c_add.astype(complex), c_mul.astype(complex), snap_pos, omega


def _upsilon_coeffs(curve, eps_sign, k, config) -> list[float]:
    from ._kernels import tensor_contour_euler

    nodes, per_axis, pair, u_tab, v_tab, c_add, c_mul, snap_pos, omega = _upsilon_tables(
        curve, eps_sign, k, config
    )
    n_mom = k * (k - 1) // 2
    acc = tensor_contour_euler(
        per_axis, pair, nodes, u_tab, v_tab, c_add, c_mul, snap_pos, omega,
        k, config.nodes, n_mom,
    )
    pref = (-1) ** (k * (k - 1) // 2) * 2 ** k / math.factorial(k)
    coeffs = []
    for m in range(n_mom + 1):
        val = pref * acc[m] / (math.factorial(m) * config.nodes ** k)
        if abs(val.imag) > 1e-6 * max(abs(val.real), 1e-300):
            raise ConvergenceError(
                f"upsilon coefficient x^{m} has imaginary part {val.imag:.3e}"
            )
        coeffs.append(float(val.real))
    return coeffs  # coeffs[m] multiplies x^m


def upsilon(
    curve: EllipticCurveRecord,
    sign=None,
    k: int = 1,
    config: PredictionConfig | None = None,
) -> MomentPolynomial:
    """Moment polynomial by the k-fold contour residue of F_k.

    Coefficient of x^m is extracted as the integral against (sum z_j)^m / m!
    on distinct-radius circles; the imaginary residue must vanish to 1e-6
    relative.  With config.verify the run is repeated at half the nodes and
    coefficients must agree to config.eps relative.
    """
    if not 1 <= k <= 4:
        raise ValueError("k in 1..4 supported")
    config = config or PredictionConfig()
    if config.nodes < 16:
        raise ValueError("at least 16 nodes per circle")
    eps_sign = _sign_value(curve, sign)
    coeffs = _upsilon_coeffs(curve, eps_sign, k, config)
    if config.verify:
        half = PredictionConfig(
            p_max=config.p_max, nodes=max(16, config.nodes // 2), r0=config.r0,
            taper_steps=config.taper_steps, eps=config.eps, cache_dir=config.cache_dir,
        )
        other = _upsilon_coeffs(curve, eps_sign, k, half)
        for a, b in zip(coeffs, other):
            if abs(a - b) > config.eps * max(abs(a), 1e-12):
                raise ConvergenceError(
                    f"upsilon coefficients not node-stable: {a} vs {b}"
                )
    f = list(reversed(coeffs))  # f[0] = leading
    return MomentPolynomial(
        k=k,
        sign="real" if eps_sign > 0 else "imaginary",
        f=f,
        p_max=config.p_max,
        nodes=config.nodes,
    )


def moment_prediction(
    curve: EllipticCurveRecord,
    sign=None,
    k: int = 1,
    x_bound: int = 1_000_000,
    mode: str = "integral",
    poly: MomentPolynomial | None = None,
    config: PredictionConfig | None = None,
) -> float:
    """Predicted k-th moment: (1/X) int_0^X Upsilon(log t) dt, or the per-d
    sum over the family of Upsilon(log |d|) for direct data comparison."""
    if x_bound < 10:
        raise ValueError("X >= 10 required")
    if poly is None:
        poly = upsilon(curve, sign, k, config)
    if mode == "integral":
        # int_0^X (log t)^m dt = X sum_{i<=m} (-1)^(m-i) (m!/i!) (log X)^i
        lx = math.log(x_bound)
        deg = poly.degree
        total = 0.0
        for r, c in enumerate(poly.f):
            m = deg - r
            s = 0.0
            for i in range(m + 1):
                s += (-1) ** (m - i) * (math.factorial(m) / math.factorial(i)) * lx ** i
            total += c * s
        return total
    if mode == "per_d":
        spec = curve.family_spec(x_bound)
        absd = np.abs(family_array(spec)).astype(float)
        return float(np.sum(poly(np.log(absd))))
    raise ValueError(f"unknown mode {mode!r}")


def leading_asymptotic(curve, sign=None, s: float = 1.0, x_bound: int = 1_000_000,
                       p_max: int = 10_000, cache_dir=None) -> float:
    """A(s) g_s(O+) (log X)^(s(s-1)/2), the leading moment asymptotic."""
    if s <= -0.5:
        raise ValueError("s > -1/2 required")
    a_val = arithmetic_factor(curve, sign, s, p_max, cache_dir=cache_dir)
    g_val = float(g_analytic(s).real)
    return a_val * g_val * math.log(x_bound) ** (s * (s - 1.0) / 2.0)


def small_value_constant(curve, sign=None, p_max: int = 10_000, cache_dir=None) -> float:
    """B = 2^(-7/8) G(1/2) pi^(-1/4) A(-1/2), the t^(-1/2) small-value weight."""
    if p_max < 100:
        raise ValueError("p_max >= 100 required")
    g_half = float(barnes_g(0.5).real)
    a_val = arithmetic_factor(curve, sign, -0.5, p_max, cache_dir=cache_dir)
    return 2.0 ** (-7.0 / 8.0) * g_half * math.pi ** (-0.25) * a_val


# ---------------------------------------------------------------------------
# vanishing-ratio predictions
# ---------------------------------------------------------------------------

def rq_main(curve: EllipticCurveRecord, q: int, cache_dir=None) -> float:
    """sqrt((q+1-a_q)/(q+1+a_q)) for prime q not dividing Q."""
    if curve.conductor % q == 0:
        raise ValueError("q | Q not allowed")
    a = ap_table(curve, max(q, 5), cache_dir).get(q)
    if a is None:
        raise ValueError(f"{q} is not prime")
    den = q + 1 + a
    assert den > 0, "q+1+a_q <= 0 impossible under Hasse"
    return math.sqrt((q + 1 - a) / den)


def beta_p(curve: EllipticCurveRecord, sign=None, p: int = 2, cache_dir=None) -> float:
    """Per-prime weight in the secondary vanishing-ratio term.

    Bad p: log(p)/(1+p) in the real case, log(p)/(1-p) in the imaginary
    case.  Good p: log(p) [(2-a)f1^(-1/2) + (2+a)f2^(-1/2)] /
    [2 + p(f1^(1/2)+f2^(1/2))] with f1 = 1 - a/p + 1/p, f2 = 1 + a/p + 1/p.
    """
    eps_sign = _sign_value(curve, sign)
    lp = math.log(p)
    if curve.conductor % p == 0:
        return lp / (1 + p) if eps_sign > 0 else lp / (1 - p)
    a = ap_table(curve, max(p, 5), cache_dir)[p]
    f1 = 1.0 - a / p + 1.0 / p
    f2 = 1.0 + a / p + 1.0 / p
    num = (2.0 - a) * f1 ** -0.5 + (2.0 + a) * f2 ** -0.5
    den = 2.0 + p * (f1 ** 0.5 + f2 ** 0.5)
    return lp * num / den


def lambda_nu(curve, sign=None, q: int = 2, nu: int = 1, p_max: int = 10_000,
              cache_dir=None) -> float:
    """lambda_nu(q): the q-local secondary term plus the tail sum over p != q
    of beta(p) - 3 log p / (2(p-1)), sharply truncated at p_max in
    increasing-p order (the sum converges only on Sato-Tate cancellation)."""
    if nu not in (-1, 1):
        raise ValueError("nu must be +-1")
    if curve.conductor % q == 0:
        raise ValueError("q | Q not allowed")
    apt = ap_table(curve, max(p_max, q), cache_dir)
    aq = apt[q]
    lq = math.log(q)
    out = lq * (nu * aq - 2.0) / (nu * aq - q - 1.0) - 3.0 * lq / (2.0 * (q - 1.0))
    out -= 2.5 * _EULER_GAMMA
    for p in sorted(apt):
        if p == q or p > p_max:
            continue
        out += beta_p(curve, sign, p, cache_dir) - 3.0 * math.log(p) / (2.0 * (p - 1.0))
    return out


def lambda_nu_report(curve, sign=None, q: int = 2, nu: int = 1, p_max: int = 10_000,
                     cache_dir=None):
    """(lambda at p_max, lambda at p_max/2): both partial sums, as the
    truncation-sensitivity report."""
    full = lambda_nu(curve, sign, q, nu, p_max, cache_dir)
    half = lambda_nu(curve, sign, q, nu, p_max // 2, cache_dir)
    return full, half


def rq_refined(curve, sign=None, q: int = 2, x_bound: int = 100_000_000,
               p_max: int = 10_000, cache_dir=None) -> float:
    """Secondary-term ratio prediction R_q (g + lambda_1)/(g + lambda_-1),
    g = (8/3) log(X sqrt(Q)/(2 pi)) - 1."""
    g = (8.0 / 3.0) * math.log(x_bound * math.sqrt(curve.conductor) / (2.0 * math.pi)) - 1.0
    lam1 = lambda_nu(curve, sign, q, 1, p_max, cache_dir)
    lam_m1 = lambda_nu(curve, sign, q, -1, p_max, cache_dir)
    return rq_main(curve, q, cache_dir) * (g + lam1) / (g + lam_m1)
