"""Integer and multiplicative primitives: primes, squarefree sieves, the
Kronecker symbol, fundamental discriminants, and enumeration of the
restricted twist families S^-(X) (imaginary) and S^+(X) (real).

Family membership is defined by a character condition at the bad primes of
the conductor; it is equivalent to a residue-class condition on |d| modulo
Qtilde (= Q for odd Q, 4Q for even Q).  Enumeration uses the residue-class
form, which vectorises; `membership` evaluates the character form directly so
the two can be cross-checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import DataError

__all__ = [
    "kronecker",
    "is_fundamental",
    "squarefree",
    "primes_up_to",
    "squarefree_sieve",
    "TwistFamilySpec",
    "residue_classes_from_bad_ap",
    "membership",
    "enumerate_family",
    "family_array",
    "family_count",
]


def primes_up_to(n: int) -> np.ndarray:
    """All primes <= n, as an int64 array (empty for n < 2)."""
    if n < 2:
        return np.empty(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.nonzero(sieve)[0].astype(np.int64)


def squarefree_sieve(n: int) -> np.ndarray:
    """Boolean array sf of length n+1 with sf[m] true iff m is squarefree.

    sf[0] is false by convention.
    """
    return _squarefree_range(0, n)


def _squarefree_range(lo: int, hi: int) -> np.ndarray:
    """Squarefree flags for the integers lo..hi inclusive."""
    sf = np.ones(hi - lo + 1, dtype=bool)
    p = 2
    while p * p <= hi:
        q = p * p
        sf[(-lo) % q :: q] = False
        p += 1
    if lo == 0 and hi >= 0:
        sf[0] = False
    return sf


def squarefree(n: int) -> bool:
    """True iff n has no repeated prime factor (n=0 -> False, |n|=1 -> True)."""
    n = abs(n)
    if n == 0:
        return False
    d = 2
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        while n % d == 0:
            n //= d
        d += 1
    return True


def kronecker(d: int, n: int) -> int:
    """Kronecker symbol (d/n), totally multiplicative extension of Legendre.

    Total on Z x Z with the usual conventions: (d/0) = 1 if |d| = 1 else 0,
    (d/-1) = -1 for d < 0 and +1 otherwise, and (d/2) = 0 for even d,
    +1 for d = +-1 mod 8, -1 for d = +-3 mod 8.
    """
    if n == 0:
        return 1 if d in (1, -1) else 0
    res = 1
    if n < 0:
        n = -n
        if d < 0:
            res = -1
    if n % 2 == 0:
        if d % 2 == 0:
            return 0
        tab = (0, 1, 0, -1, 0, -1, 0, 1)  # (d/2) by d mod 8
        while n % 2 == 0:
            n //= 2
            res *= tab[d % 8]
    # n odd positive: binary reciprocity (Jacobi with sign bookkeeping)
    d %= n
    while d != 0:
        while d % 2 == 0:
            d //= 2
            if n % 8 in (3, 5):
                res = -res
        d, n = n, d
        if d % 4 == 3 and n % 4 == 3:
            res = -res
        d %= n
    return res if n == 1 else 0


def is_fundamental(d: int) -> bool:
    """True iff d is a fundamental discriminant.

    Either d = 1 mod 4 and squarefree, or d = 4m with m = 2 or 3 mod 4
    and m squarefree.  (d = 1 qualifies; family membership separately
    requires |d| >= 3.)
    """
    if d == 0:
        return False
    if d % 4 == 1:
        return squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and squarefree(m)
    return False


@dataclass(frozen=True)
class TwistFamilySpec:
    """Restricted family of fundamental discriminants for one twist sign.

    sign:            "imaginary" (d < 0) or "real" (d > 1)
    conductor:       Q (squarefree; prime when sign = "real")
    bad_ap:          {p: a_p in {-1, +1}} for p | Q
    modulus:         Qtilde = Q for odd Q, 4Q for even Q
    residue_classes: admissible values of |d| mod Qtilde
    bound:           X; the family holds 3 <= |d| <= X
    """

    sign: str
    conductor: int
    bad_ap: dict[int, int]
    modulus: int
    residue_classes: frozenset[int]
    bound: int

    def __post_init__(self):
        if self.sign not in ("imaginary", "real"):
            raise DataError(f"bad sign {self.sign!r}")
        q = self.conductor
        if q < 1 or not squarefree(q):
            raise DataError(f"conductor {q} must be positive and squarefree")
        if self.sign == "real" and not _is_prime(q):
            raise DataError(f"real-twist families require prime conductor, got {q}")
        want = q if q % 2 == 1 else 4 * q
        if self.modulus != want:
            raise DataError(f"modulus {self.modulus} != expected {want}")
        for p, a in self.bad_ap.items():
            if q % p != 0 or a not in (-1, 1):
                raise DataError(f"bad_ap entry {p}: {a} inconsistent with Q={q}")
        expect = residue_classes_from_bad_ap(self.sign, q, self.bad_ap)
        if frozenset(r % self.modulus for r in self.residue_classes) != expect:
            raise DataError(
                f"residue classes {sorted(self.residue_classes)} do not match "
                f"classes recomputed from bad a_p {sorted(expect)}"
            )


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def residue_classes_from_bad_ap(sign: str, conductor: int, bad_ap: dict[int, int]) -> frozenset[int]:
    """Admissible classes of |d| mod Qtilde implied by the character condition.

    Imaginary: chi_d(p) = -a_p for all p | Q, d < 0.  Real: chi_d(Q) = a_Q,
    d > 1.  For even Q only odd d are coprime to Q, and an odd fundamental
    discriminant is 1 mod 4; that parity constraint is folded into the
    classes mod 4Q.
    """
    q = conductor
    qt = q if q % 2 == 1 else 4 * q
    out = set()
    for r in range(1, qt):
        if math.gcd(r, q) != 1:
            continue
        if sign == "imaginary":
            d = -r
            if q % 2 == 0 and (r % 2 == 0 or d % 4 != 1):
                continue
            ok = all(kronecker(d, p) == -a for p, a in bad_ap.items())
        else:
            ok = kronecker(r, q) == bad_ap[q]
        if ok:
            out.add(r)
    return frozenset(out)


def membership(spec: TwistFamilySpec, d: int) -> bool:
    """Character-condition membership test for one discriminant.

    Raises DataError when gcd(d, Q) > 1; returns False for wrong sign,
    |d| > X, non-fundamental d, or a failed character condition.
    """
    if d == 0:
        return False
    if math.gcd(abs(d), spec.conductor) != 1:
        raise DataError(f"gcd(d={d}, Q={spec.conductor}) > 1")
    if spec.sign == "imaginary":
        if d >= 0:
            return False
    elif d <= 1:
        return False
    if abs(d) > spec.bound or not is_fundamental(d):
        return False
    if spec.sign == "imaginary":
        return all(kronecker(d, p) == -a for p, a in spec.bad_ap.items())
    return kronecker(d, spec.conductor) == spec.bad_ap[spec.conductor]


def family_array(spec: TwistFamilySpec, chunk: int = 10_000_000) -> np.ndarray:
    """All family discriminants with |d| <= X, increasing |d|, signed int64.

    Chunked so peak memory is O(chunk) regardless of X.
    """
    x = spec.bound
    if x < 3:
        return np.empty(0, dtype=np.int64)
    qt = spec.modulus
    class_tab = np.zeros(qt, dtype=bool)
    class_tab[np.array(sorted(spec.residue_classes), dtype=np.int64) % qt] = True
    sgn = -1 if spec.sign == "imaginary" else 1
    parts = []
    lo = 3
    while lo <= x:
        hi = min(lo + chunk - 1, x)
        m = np.arange(lo, hi + 1, dtype=np.int64)
        sf = _squarefree_range(lo, hi)
        if spec.sign == "imaginary":
            mask = (m % 4 == 3) & sf
        else:
            mask = (m % 4 == 1) & sf
        # |d| = 4k with k squarefree in the sign-dependent classes mod 4
        klo, khi = (lo + 3) // 4, hi // 4
        if khi >= klo >= 1:
            kf = _squarefree_range(klo, khi)
            k = np.arange(klo, khi + 1, dtype=np.int64)
            if spec.sign == "imaginary":
                kf &= (k % 4 == 1) | (k % 4 == 2)
            else:
                kf &= (k % 4 == 2) | (k % 4 == 3)
            mask[4 * k[kf] - lo] = True
        mask &= class_tab[m % qt]
        parts.append(sgn * m[mask])
        lo = hi + 1
    return np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)


def enumerate_family(spec: TwistFamilySpec) -> Iterator[int]:
    """Stream the family in increasing |d| (each d a Python int)."""
    for d in family_array(spec):
        yield int(d)


def family_count(spec: TwistFamilySpec) -> int:
    """|S(X)| for the family."""
    return int(family_array(spec).size)
