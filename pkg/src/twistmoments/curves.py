"""Elliptic-curve data model and L-series building blocks.

Point counts a_p come from exhaustive enumeration of the long Weierstrass
equation for p in {2, 3} and from a quadratic-character sum on the completed
short form for p > 3 (O(p) per prime; ample for p up to 1e5 here).  For
multiplicative p | Q the same character sum yields a_p in {-1, +1}.

`direct_lvalue` is the independent oracle for central twisted values: the
exponentially weighted Dirichlet series from the even functional equation,

    L(1, chi_d) = 2 sum_{n>=1} (a_n chi_d(n) / n) exp(-2 pi n / (sqrt(Q) |d|)).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .arith import TwistFamilySpec, kronecker, primes_up_to
from .errors import ConvergenceError, DataError, PoleError
from .theta import HalfIntegralForm, TernaryForm

__all__ = [
    "EllipticCurveRecord",
    "ap",
    "ap_table",
    "dirichlet_coefficients",
    "local_euler_factor",
    "direct_lvalue",
    "load_curves",
    "load_curve",
    "builtin_database_path",
]


@dataclass(frozen=True)
class EllipticCurveRecord:
    """One twist-family entry: curve model, family data, and theta data."""

    name: str
    a_invariants: tuple[int, int, int, int, int]
    conductor: int
    sign: str
    kappa: float
    kappa_str: str
    modulus: int
    residue_classes: frozenset[int]
    half_form: HalfIntegralForm
    torsion_order: int | None = None
    root_number: int | None = None

    def __post_init__(self):
        if self.kappa <= 0:
            raise DataError(f"{self.name}: kappa must be positive")
        if self.discriminant() == 0:
            raise DataError(f"{self.name}: singular curve equation")
        if self.root_number not in (None, -1, 1):
            raise DataError(f"{self.name}: bad root number")
        if self.torsion_order is not None and self.torsion_order < 1:
            raise DataError(f"{self.name}: bad torsion order")

    def b_invariants(self):
        a1, a2, a3, a4, a6 = self.a_invariants
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return b2, b4, b6, b8

    def discriminant(self) -> int:
        b2, b4, b6, b8 = self.b_invariants()
        return -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    def short_form(self) -> tuple[int, int]:
        """(A, B) with y^2 = x^3 + A x + B isomorphic to E away from p | 6."""
        b2, b4, b6, _ = self.b_invariants()
        c4 = b2 * b2 - 24 * b4
        c6 = -(b2 ** 3) + 36 * b2 * b4 - 216 * b6
        return -27 * c4, -54 * c6

    def bad_ap(self) -> dict[int, int]:
        out = {}
        q = self.conductor
        p = 2
        while q > 1:
            if q % p == 0:
                out[p] = ap(self, p)
                while q % p == 0:
                    q //= p
            p += 1
        return out

    def family_spec(self, bound: int) -> TwistFamilySpec:
        return TwistFamilySpec(
            sign=self.sign,
            conductor=self.conductor,
            bad_ap=self.bad_ap(),
            modulus=self.modulus,
            residue_classes=self.residue_classes,
            bound=bound,
        )

    def coefficient_table(self, bound: int):
        """Theta coefficients c(0..bound) with integrality asserted on the
        family-consumable indices."""
        from .theta import combine

        return combine(
            self.half_form, bound, curve=self.name, sign=self.sign,
            modulus=self.modulus, classes=self.residue_classes,
        )


def _ap_small(curve: EllipticCurveRecord, p: int) -> int:
    """Exhaustive count over the long form for p in {2, 3}, bad p handled."""
    a1, a2, a3, a4, a6 = curve.a_invariants
    pts = 0
    singular = False
    for x in range(p):
        for y in range(p):
            if (y * y + a1 * x * y + a3 * y - (x ** 3 + a2 * x * x + a4 * x + a6)) % p:
                continue
            pts += 1
            fy = (2 * y + a1 * x + a3) % p
            fx = (a1 * y - 3 * x * x - 2 * a2 * x - a4) % p
            if fy == 0 and fx == 0:
                singular = True
    if not singular:
        return p + 1 - (pts + 1)
    # multiplicative reduction: #E_ns(F_p) = p - a_p, infinity included
    return p - ((pts - 1) + 1)


def ap(curve: EllipticCurveRecord, p: int) -> int:
    """Trace of Frobenius a_p (a_p in {-1,+1} for multiplicative p | Q)."""
    if p < 2 or any(p % d == 0 for d in range(2, min(p, 1 + math.isqrt(p)))):
        raise ValueError(f"{p} is not prime")
    if p <= 3:
        return _ap_small(curve, p)
    a_coef, b_coef = curve.short_form()
    x = np.arange(p, dtype=np.int64)
    chi = np.full(p, -1, dtype=np.int64)
    chi[(x * x) % p] = 1
    chi[0] = 0
    fx = (x * x % p * x + (a_coef % p) * x + b_coef % p) % p
    return int(-np.sum(chi[fx]))


_AP_CACHE: dict = {}


def ap_table(curve: EllipticCurveRecord, pmax: int, cache_dir=None) -> dict[int, int]:
    """{p: a_p} for all primes p <= pmax, memoised and optionally persisted.

    The disk layout (npz with primes and traces) sits alongside the theta
    coefficient caches; it is validated against the curve name and bound.
    """
    from ._kernels import quadratic_char_sums

    key = (curve.name, tuple(curve.a_invariants))
    have = _AP_CACHE.get(key)
    if have is not None and have[0] >= pmax:
        ps, tab = have[1], have[2]
        keep = ps <= pmax
        return dict(zip(ps[keep].tolist(), tab[keep].tolist()))

    path = None
    if cache_dir is not None:
        path = Path(cache_dir) / f"{curve.name}_ap.npz"
        if path.exists():
            try:
                dat = np.load(path)
                if str(dat["name"]) == curve.name and int(dat["pmax"]) >= pmax:
                    ps, tab = dat["primes"], dat["ap"]
                    _AP_CACHE[key] = (int(dat["pmax"]), ps, tab)
                    keep = ps <= pmax
                    return dict(zip(ps[keep].tolist(), tab[keep].tolist()))
            except Exception:
                pass  # unreadable cache: recompute below

    ps = primes_up_to(pmax)
    tab = np.empty(len(ps), dtype=np.int64)
    a_coef, b_coef = curve.short_form()
    big = ps[ps > 3]
    small = ps[ps <= 3]
    for i, p in enumerate(small):
        tab[i] = _ap_small(curve, int(p))
    if len(big):
        tab[len(small):] = quadratic_char_sums(big, a_coef, b_coef)
    _AP_CACHE[key] = (pmax, ps, tab)
    if path is not None:
        np.savez(path, name=curve.name, pmax=pmax, primes=ps, ap=tab)
    return dict(zip(ps.tolist(), tab.tolist()))


def dirichlet_coefficients(curve: EllipticCurveRecord, n_max: int, cache_dir=None) -> np.ndarray:
    """a_1..a_n as int64 (index 0 unused), multiplicative sieve.

    Good prime powers follow a_{p^(k+1)} = a_p a_{p^k} - p a_{p^(k-1)};
    multiplicative p | Q have a_{p^k} = a_p^k.
    """
    if n_max < 1:
        raise ValueError("n_max >= 1")
    apt = ap_table(curve, n_max, cache_dir) if n_max >= 2 else {}
    a = np.zeros(n_max + 1, dtype=np.int64)
    a[1] = 1
    q = curve.conductor
    spf = np.zeros(n_max + 1, dtype=np.int64)  # smallest prime factor
    for p in sorted(apt):
        spf[p::p][spf[p::p] == 0] = p
    for n in range(2, n_max + 1):
        p = int(spf[n])
        pk, m = p, n // p
        while m % p == 0:
            pk *= p
            m //= p
        if m > 1:
            a[n] = a[pk] * a[m]
            continue
        # n = p^k
        if pk == p:
            a[n] = apt[p]
        else:
            if q % p == 0:
                a[n] = a[n // p] * apt[p]
            else:
                a[n] = apt[p] * a[n // p] - p * a[n // (p * p)]
    return a


def local_euler_factor(curve: EllipticCurveRecord, p: int, x: complex) -> complex:
    """1/(1 - a_p x + p x^2) for good p, 1/(1 - a_p x) for p | Q."""
    a = ap(curve, p)
    if curve.conductor % p == 0:
        den = 1.0 - a * x
    else:
        den = 1.0 - a * x + p * x * x
    if abs(den) < 1e-14:
        raise PoleError(f"local factor pole at p={p}, x={x}")
    return 1.0 / den


def direct_lvalue(
    curve: EllipticCurveRecord,
    d: int,
    eps: float = 1e-8,
    max_terms: int = 5_000_000,
    cache_dir=None,
) -> float:
    """Central twisted value by the smoothed series (independent of theta).

    Truncation: with A = sqrt(Q)|d|/(2 pi), the tail beyond N is below
    2 (A+1) e^(-N/A) once |a_n| <= n holds (true for n > 1300, so N is
    floored there).  Valid for d in the curve's family (even functional
    equation); gcd(d, Q) must be 1.
    """
    if math.gcd(abs(d), curve.conductor) != 1:
        raise DataError(f"gcd(d, Q) > 1 for d={d}")
    scale = math.sqrt(curve.conductor) * abs(d) / (2.0 * math.pi)
    n_terms = max(1400, int(math.ceil(scale * math.log(2.0 * (scale + 1.0) / eps))) + 8)
    if n_terms > max_terms:
        raise ConvergenceError(
            f"direct series needs {n_terms} coefficients (> budget {max_terms})"
        )
    a = dirichlet_coefficients(curve, n_terms, cache_dir)
    n = np.arange(1, n_terms + 1, dtype=float)
    chi = np.empty(n_terms + 1, dtype=np.int64)
    chi[0] = 0
    for m in range(1, n_terms + 1):
        chi[m] = kronecker(d, m)
    total = 2.0 * float(np.sum(a[1:] * chi[1:] / n * np.exp(-n / scale)))
    return total


# ---------------------------------------------------------------------------
# database ingestion
# ---------------------------------------------------------------------------

def builtin_database_path() -> Path:
    """The curve/theta fixture shipped with the package."""
    return Path(__file__).parent / "data" / "curves.jsonl"


def _parse_rational(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise DataError(f"bad rational {s!r}") from exc


def load_curves(path=None) -> list[EllipticCurveRecord]:
    """Parse the one-record-per-line curve database and validate every record.

    Validation: curve nonsingular, kappa > 0, conductor squarefree (prime for
    real sign), modulus = Q or 4Q, forms positive definite, combination and
    form counts consistent, and residue classes equal to the set recomputed
    from the bad-reduction a_p (a hard error, catching corrupt data early).
    """
    path = Path(path) if path is not None else builtin_database_path()
    records: list[EllipticCurveRecord] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: bad record: {exc}") from exc
            try:
                rec = _record_from_json(raw)
            except DataError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from exc
            # family-spec construction re-derives residue classes from bad a_p
            rec.family_spec(bound=3)
            records.append(rec)
    return records


def load_curve(name: str, path=None) -> EllipticCurveRecord:
    for rec in load_curves(path):
        if rec.name == name:
            return rec
    raise DataError(f"curve {name!r} not in database")


def _record_from_json(raw: dict) -> EllipticCurveRecord:
    required = {
        "name", "sign", "a_invariants", "conductor", "kappa",
        "modulus", "residue_classes", "alphas", "forms",
    }
    missing = required - raw.keys()
    if missing:
        raise DataError(f"missing fields {sorted(missing)}")
    ainv = tuple(int(v) for v in raw["a_invariants"])
    if len(ainv) != 5:
        raise DataError("a_invariants must have 5 entries")
    forms = tuple(TernaryForm(tuple(int(b) for b in f)) for f in raw["forms"])
    alphas = tuple(_parse_rational(str(a)) for a in raw["alphas"])
    half = HalfIntegralForm(forms=forms, alphas=alphas)
    kappa_str = str(raw["kappa"])
    return EllipticCurveRecord(
        name=str(raw["name"]),
        a_invariants=ainv,
        conductor=int(raw["conductor"]),
        sign=str(raw["sign"]),
        kappa=float(kappa_str),
        kappa_str=kappa_str,
        modulus=int(raw["modulus"]),
        residue_classes=frozenset(int(r) for r in raw["residue_classes"]),
        half_form=half,
        torsion_order=(int(raw["torsion_order"]) if raw.get("torsion_order") else None),
        root_number=(int(raw["root_number"]) if raw.get("root_number") else None),
    )
