"""Table-driven arithmetic over GF(q) for prime-power q <= 256.

Elements are integer labels.  For an extension field GF(p^k) the label is the
base-p encoding of the polynomial coefficients (lowest degree in the least
significant digit), so for p = 2 the label is the polynomial bit pattern and
addition is XOR.  In GF(4) built on x^2 + x + 1, label 2 is alpha and label 3
is alpha + 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

MAX_ORDER = 256

# Fixed primitive polynomials for binary extension fields, bit-encoded.
BINARY_PRIMITIVE_POLYS = {
    2: 0b111,  # x^2 + x + 1
    3: 0b1011,  # x^3 + x + 1
    4: 0b10011,  # x^4 + x + 1
    5: 0b100101,  # x^5 + x^2 + 1
    6: 0b1000011,  # x^6 + x + 1
    7: 0b10000011,  # x^7 + x + 1
    8: 0b100011101,  # x^8 + x^4 + x^3 + x^2 + 1
}


class FieldError(ValueError):
    """Invalid field order, mismatched fields, or a domain violation."""


def _prime_power(q: int) -> tuple[int, int] | None:
    if q < 2:
        return None
    p = next(d for d in range(2, q + 1) if q % d == 0)
    k, rest = 0, q
    while rest % p == 0:
        rest //= p
        k += 1
    return (p, k) if rest == 1 else None


def _digits(label: int, p: int, k: int) -> list[int]:
    out = []
    for _ in range(k):
        out.append(label % p)
        label //= p
    return out


def _undigits(coeffs, p: int) -> int:
    label = 0
    for c in reversed(coeffs):
        label = label * p + int(c)
    return label


def _times_x(coeffs: list[int], poly: list[int], p: int) -> list[int]:
    """Multiply by x modulo a monic polynomial (poly holds k+1 coefficients)."""
    k = len(coeffs)
    top = coeffs[-1]
    shifted = [0] + coeffs[:-1]
    # x^k = -(poly[0] + ... + poly[k-1] x^(k-1))
    return [(shifted[i] - top * poly[i]) % p for i in range(k)]


def _power_cycle(poly: list[int], p: int, k: int) -> list[int] | None:
    """Labels of x^0, x^1, ... if x has order p^k - 1 modulo poly, else None."""
    order = p**k - 1
    cur = [1] + [0] * (k - 1)
    labels = []
    for _ in range(order):
        labels.append(_undigits(cur, p))
        cur = _times_x(cur, poly, p)
    if _undigits(cur, p) != 1 or len(set(labels)) != order:
        return None
    return labels


def _find_primitive(p: int, k: int) -> tuple[list[int], list[int]]:
    if p == 2 and k in BINARY_PRIMITIVE_POLYS:
        poly = _digits(BINARY_PRIMITIVE_POLYS[k], 2, k + 1)
        cycle = _power_cycle(poly, p, k)
        assert cycle is not None
        return poly, cycle
    # smallest monic primitive polynomial in base-p label order
    for low in range(1, p**k):
        poly = _digits(low, p, k) + [1]
        cycle = _power_cycle(poly, p, k)
        if cycle is not None:
            return poly, cycle
    raise FieldError(f"no primitive polynomial found for GF({p}^{k})")


@dataclass(frozen=True, eq=False)
class GaloisField:
    """GF(q) with precomputed q x q addition, subtraction and multiplication tables.

    Instances are immutable and cached per order; compare fields with ``is``.
    """

    q: int
    p: int
    k: int
    prim_poly: int | None
    add_table: np.ndarray = field(repr=False)
    sub_table: np.ndarray = field(repr=False)
    mul_table: np.ndarray = field(repr=False)
    inv_table: np.ndarray = field(repr=False)
    neg_table: np.ndarray = field(repr=False)

    def add(self, a: int, b: int) -> int:
        return int(self.add_table[a, b])

    def sub(self, a: int, b: int) -> int:
        return int(self.sub_table[a, b])

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[a, b])

    def inv(self, a: int) -> int:
        if a == 0:
            raise FieldError("zero has no multiplicative inverse")
        return int(self.inv_table[a])

    def element(self, label: int) -> GfElement:
        return GfElement(int(label), self)

    def __contains__(self, label) -> bool:
        return 0 <= int(label) < self.q

    def __repr__(self) -> str:
        return f"GaloisField(q={self.q})"


def _build(q: int) -> GaloisField:
    pk = _prime_power(q)
    if pk is None:
        raise FieldError(f"q={q} is not a prime power")
    if q > MAX_ORDER:
        raise FieldError(f"q={q} exceeds the supported maximum {MAX_ORDER}")
    p, k = pk
    labels = np.arange(q)
    digits = np.array([_digits(a, p, k) for a in labels])  # (q, k)
    weights = p ** np.arange(k)
    add = ((digits[:, None, :] + digits[None, :, :]) % p) @ weights
    sub = ((digits[:, None, :] - digits[None, :, :]) % p) @ weights

    if k == 1:
        prim_poly = None
        mul = np.outer(labels, labels) % p
    else:
        poly, cycle = _find_primitive(p, k)
        prim_poly = _undigits(poly, p)
        exp = np.array(cycle)
        log = np.zeros(q, dtype=np.int64)
        log[exp] = np.arange(q - 1)
        la = log[labels[1:]]
        mul = np.zeros((q, q), dtype=np.int64)
        mul[1:, 1:] = exp[(la[:, None] + la[None, :]) % (q - 1)]

    mul = mul.astype(np.int64)
    inv = np.zeros(q, dtype=np.int64)
    rows, cols = np.nonzero(mul == 1)
    inv[rows] = cols
    neg = sub[0].astype(np.int64)
    tables = [add.astype(np.int64), sub.astype(np.int64), mul, inv, neg]
    for t in tables:
        t.setflags(write=False)
    return GaloisField(q, p, k, prim_poly, *tables)


@lru_cache(maxsize=None)
def field_new(q: int) -> GaloisField:
    """Return the (cached) field of order q.

    >>> field_new(4).mul(2, 2)
    3
    """
    return _build(int(q))


@dataclass(frozen=True, eq=False)
class GfElement:
    label: int
    field: GaloisField = field(repr=False, compare=False)

    def __post_init__(self):
        if not 0 <= self.label < self.field.q:
            raise FieldError(f"label {self.label} outside GF({self.field.q})")

    def __eq__(self, other):
        if isinstance(other, GfElement):
            return self.field is other.field and self.label == other.label
        return NotImplemented

    def __hash__(self):
        return hash((self.field.q, self.label))

    def __int__(self):
        return self.label

    def __add__(self, other):
        return gf_add(self, other)

    def __sub__(self, other):
        _check_same(self, other)
        return GfElement(self.field.sub(self.label, other.label), self.field)

    def __mul__(self, other):
        return gf_mul(self, other)


def _check_same(a: GfElement, b: GfElement) -> None:
    if a.field is not b.field:
        raise FieldError(f"field mismatch: GF({a.field.q}) vs GF({b.field.q})")


def gf_add(a: GfElement, b: GfElement) -> GfElement:
    _check_same(a, b)
    return GfElement(a.field.add(a.label, b.label), a.field)


def gf_mul(a: GfElement, b: GfElement) -> GfElement:
    _check_same(a, b)
    return GfElement(a.field.mul(a.label, b.label), a.field)


def gf_inv(a: GfElement) -> GfElement:
    return GfElement(a.field.inv(a.label), a.field)
