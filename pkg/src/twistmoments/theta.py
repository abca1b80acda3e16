"""Ternary quadratic forms, their theta-series representation numbers, and
the combined half-integral-weight coefficient table c(n).

The table maps to central twisted L-values through
L(1, chi_d) = kappa * c(|d|)^2 / sqrt(|d|); vanishing is decided on the
integer c alone, never on a float.  c(1) is ignored throughout: the database
normalisation fixes gcd_{n>=2} |c(n)| = 1 and absorbs square factors into
kappa.
"""

from __future__ import annotations

import hashlib
import math
import struct
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DataError

__all__ = [
    "TernaryForm",
    "HalfIntegralForm",
    "CoefficientTable",
    "representation_numbers",
    "combine",
    "lvalue_from_coefficient",
    "cache_store",
    "cache_load",
]

# ingestion guard: with |beta| <= 2^16 and X <= 2^40 every intermediate in the
# enumeration kernel stays far below 2^62
_MAX_BETA = 1 << 16
_MAX_X = 1 << 40


@dataclass(frozen=True)
class TernaryForm:
    """Positive-definite f(x,y,z) = b1 x^2 + b2 y^2 + b3 z^2 + b4 yz + b5 xz + b6 xy."""

    beta: tuple[int, int, int, int, int, int]

    def __post_init__(self):
        if len(self.beta) != 6:
            raise DataError("ternary form needs 6 coefficients")
        if any(abs(b) > _MAX_BETA for b in self.beta):
            raise DataError(f"form coefficients too large: {self.beta}")
        if not self.is_positive_definite():
            raise DataError(f"form {self.beta} is not positive definite")

    def gram(self) -> np.ndarray:
        """Symmetric matrix Q with f(v) = v^T Q v (half-integer off-diagonal)."""
        b1, b2, b3, b4, b5, b6 = self.beta
        return np.array(
            [[b1, b6 / 2, b5 / 2], [b6 / 2, b2, b4 / 2], [b5 / 2, b4 / 2, b3]]
        )

    def is_positive_definite(self) -> bool:
        b1, b2, b3, b4, b5, b6 = self.beta
        # leading minors of 2*Q (integer arithmetic)
        m1 = 2 * b1
        m2 = 4 * b1 * b2 - b6 * b6
        a = np.array(
            [[2 * b1, b6, b5], [b6, 2 * b2, b4], [b5, b4, 2 * b3]], dtype=object
        )
        m3 = (
            a[0, 0] * (a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1])
            - a[0, 1] * (a[1, 0] * a[2, 2] - a[1, 2] * a[2, 0])
            + a[0, 2] * (a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0])
        )
        return m1 > 0 and m2 > 0 and m3 > 0

    def __call__(self, x: int, y: int, z: int) -> int:
        b1, b2, b3, b4, b5, b6 = self.beta
        return b1 * x * x + b2 * y * y + b3 * z * z + b4 * y * z + b5 * x * z + b6 * x * y


@dataclass(frozen=True)
class HalfIntegralForm:
    """Rational linear combination sum_j alpha_j * theta_{form_j}."""

    forms: tuple[TernaryForm, ...]
    alphas: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.forms) != len(self.alphas):
            raise DataError("forms and alphas length mismatch")
        if not self.forms:
            raise DataError("empty combination")

    @property
    def denominator(self) -> int:
        d = 1
        for a in self.alphas:
            d = d * a.denominator // math.gcd(d, a.denominator)
        return d


@dataclass(frozen=True)
class CoefficientTable:
    """Exact integer coefficients c(0..X) for one curve; consumers index c[n]."""

    curve: str
    bound: int
    values: np.ndarray  # int64, length bound+1

    def __post_init__(self):
        if self.values.dtype != np.int64 or len(self.values) != self.bound + 1:
            raise DataError("coefficient table shape/dtype mismatch")

    def coefficient(self, n: int) -> int:
        if not 0 <= n <= self.bound:
            raise DataError(f"coefficient index {n} outside table bound {self.bound}")
        return int(self.values[n])


def representation_numbers(form: TernaryForm, bound: int) -> np.ndarray:
    """r(n) = #{(x,y,z) in Z^3 : f(x,y,z) = n} for n = 0..bound, exact int64."""
    from ._kernels import representation_counts

    if bound < 1 or bound > _MAX_X:
        raise DataError(f"bound {bound} out of range")
    q = form.gram()
    qinv = np.linalg.inv(q)
    xbound = int(math.floor(math.sqrt(bound * qinv[0, 0]))) + 1
    out = np.zeros(bound + 1, dtype=np.int64)
    b1, b2, b3, b4, b5, b6 = (int(b) for b in form.beta)
    representation_counts(b1, b2, b3, b4, b5, b6, xbound, bound, out)
    return out


def _consumable_mask(bound: int, sign, modulus=None, classes=None) -> np.ndarray:
    """Indices n that can occur as |d| for a family member: fundamental
    discriminant of the given sign, restricted to the residue classes when
    they are supplied (None sign means every n >= 2)."""
    from .arith import squarefree_sieve

    mask = np.zeros(bound + 1, dtype=bool)
    mask[2:] = True
    if sign is None:
        return mask
    sf = squarefree_sieve(bound)
    n = np.arange(bound + 1)
    if sign == "imaginary":
        odd = (n % 4 == 3) & sf
    elif sign == "real":
        odd = (n % 4 == 1) & sf
    else:
        raise DataError(f"bad sign {sign!r}")
    mask &= odd
    k = np.arange(bound // 4 + 1)
    kf = sf[: len(k)]
    if sign == "imaginary":
        kf = kf & ((k % 4 == 1) | (k % 4 == 2))
    else:
        kf = kf & ((k % 4 == 2) | (k % 4 == 3))
    mask[4 * k[kf]] = True
    mask[:2] = False
    if modulus is not None and classes is not None:
        tab = np.zeros(modulus, dtype=bool)
        tab[np.array(sorted(classes), dtype=np.int64) % modulus] = True
        mask &= tab[n % modulus]
    return mask


def combine(half: HalfIntegralForm, bound: int, curve: str = "", sign=None,
            modulus=None, classes=None) -> CoefficientTable:
    """Coefficient table c(n) = sum_j alpha_j r_j(n) in exact arithmetic.

    c(n) must be an integer at every index a family can consume (all n >= 2
    when sign is None; fundamental |d| of that sign inside the residue
    classes otherwise) -- a failure there means corrupt data.  Outside that
    set the combination is legitimately non-integral in places (perfect
    squares for real-sign records, indices sharing a factor with the
    conductor): those never-consumed entries are stored as 0.
    """
    den = half.denominator
    acc = np.zeros(bound + 1, dtype=np.int64)
    for alpha, form in zip(half.alphas, half.forms):
        num = int(alpha * den)
        if num != 0:
            acc += num * representation_numbers(form, bound)
    rem = (acc % den) != 0
    bad = rem & _consumable_mask(bound, sign, modulus, classes)
    if np.any(bad):
        raise DataError(
            f"non-integral coefficient at n={int(np.nonzero(bad)[0][0])} (curve {curve!r})"
        )
    vals = np.where(rem, 0, acc // den)
    return CoefficientTable(curve=curve, bound=bound, values=vals)


def lvalue_from_coefficient(kappa: float, c: int, d: int) -> float:
    """kappa * c^2 / sqrt(|d|); exactly 0.0 iff the integer c is zero."""
    if c == 0:
        return 0.0
    return kappa * (c * c) / math.sqrt(abs(d))


# ---------------------------------------------------------------------------
# coefficient cache: versioned little-endian binary
# ---------------------------------------------------------------------------

_MAGIC = b"TMTHETA1"
_VERSION = 1


def cache_store(table: CoefficientTable, path) -> None:
    """Write magic/version/name-digest/bound, the int64 array, and a sha256."""
    arr = np.ascontiguousarray(table.values, dtype="<i8")
    payload = arr.tobytes()
    digest = hashlib.sha256(table.curve.encode()).digest()
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<II", _VERSION, 0))
        fh.write(digest)
        fh.write(struct.pack("<Q", table.bound))
        fh.write(payload)
        fh.write(hashlib.sha256(payload).digest())


def cache_load(curve: str, bound: int, path) -> CoefficientTable:
    """Load and validate a coefficient cache written by cache_store."""
    with open(path, "rb") as fh:
        blob = fh.read()
    head = 8 + 8 + 32 + 8
    if len(blob) < head + 32:
        raise DataError(f"cache {path}: truncated")
    if blob[:8] != _MAGIC:
        raise DataError(f"cache {path}: bad magic")
    version, _ = struct.unpack("<II", blob[8:16])
    if version != _VERSION:
        raise DataError(f"cache {path}: unsupported version {version}")
    if blob[16:48] != hashlib.sha256(curve.encode()).digest():
        raise DataError(f"cache {path}: curve name mismatch")
    (stored_bound,) = struct.unpack("<Q", blob[48:56])
    if stored_bound != bound:
        raise DataError(f"cache {path}: bound {stored_bound} != requested {bound}")
    payload = blob[head:-32]
    if len(payload) != 8 * (bound + 1):
        raise DataError(f"cache {path}: truncated payload")
    if hashlib.sha256(payload).digest() != blob[-32:]:
        raise DataError(f"cache {path}: checksum mismatch")
    values = np.frombuffer(payload, dtype="<i8").astype(np.int64)
    return CoefficientTable(curve=curve, bound=bound, values=values)
