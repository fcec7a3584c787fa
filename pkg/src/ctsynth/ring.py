"""Exact arithmetic in Z[omega, 1/sqrt(2)] where omega = e^{i*pi/4}.

Every amplitude reachable by a Clifford+T circuit lives in this ring, so
states and unitaries can be represented and compared with no rounding at
all.  A scalar is stored as four integer coefficients (a, b, c, d) for the
basis (1, omega, omega^2, omega^3) together with a power k of sqrt(2) in
the denominator:

    value = (a + b*omega + c*omega^2 + d*omega^3) / sqrt(2)^k

The defining reduction is omega^4 = -1.  Values are kept canonical: either
k == 0 or the numerator is not divisible by sqrt(2).  Divisibility uses
sqrt(2) = omega - omega^3, so (a, b, c, d) is divisible iff a + c and
b + d are both even.
"""

from __future__ import annotations

import math


class RingScalar:
    """An element of Z[omega, 1/sqrt(2)], kept in canonical form."""

    __slots__ = ("a", "b", "c", "d", "k")

    def __init__(self, a: int, b: int, c: int, d: int, k: int = 0):
        if k < 0:
            raise ValueError("sqrt(2) exponent must be non-negative")
        # Canonicalize: divide numerator by sqrt(2) while possible and k > 0.
        while k > 0 and (a + c) % 2 == 0 and (b + d) % 2 == 0:
            a, b, c, d = (b - d) // 2, (a + c) // 2, (b + d) // 2, (c - a) // 2
            k -= 1
        if a == b == c == d == 0:
            k = 0
        self.a, self.b, self.c, self.d, self.k = a, b, c, d, k

    # -- ring operations ---------------------------------------------------

    def __add__(self, other: "RingScalar") -> "RingScalar":
        x, y = self, other
        if x.k < y.k:
            x, y = y, x
        # Bring y to denominator sqrt(2)^x.k by scaling its numerator.
        diff = x.k - y.k
        a, b, c, d = y.a, y.b, y.c, y.d
        if diff % 2 == 1:
            # multiply numerator by sqrt(2) = omega - omega^3
            a, b, c, d = b - d, a + c, b + d, c - a
        m = 2 ** (diff // 2)
        return RingScalar(x.a + a * m, x.b + b * m, x.c + c * m, x.d + d * m, x.k)

    def __neg__(self) -> "RingScalar":
        return RingScalar(-self.a, -self.b, -self.c, -self.d, self.k)

    def __sub__(self, other: "RingScalar") -> "RingScalar":
        return self + (-other)

    def __mul__(self, other: "RingScalar") -> "RingScalar":
        a1, b1, c1, d1 = self.a, self.b, self.c, self.d
        a2, b2, c2, d2 = other.a, other.b, other.c, other.d
        # (a1 + b1 w + c1 w^2 + d1 w^3)(a2 + ...) with w^4 = -1.
        a = a1 * a2 - b1 * d2 - c1 * c2 - d1 * b2
        b = a1 * b2 + b1 * a2 - c1 * d2 - d1 * c2
        c = a1 * c2 + b1 * b2 + c1 * a2 - d1 * d2
        d = a1 * d2 + b1 * c2 + c1 * b2 + d1 * a2
        return RingScalar(a, b, c, d, self.k + other.k)

    def conj(self) -> "RingScalar":
        """Complex conjugate; omega-bar = omega^7 = -omega^3."""
        return RingScalar(self.a, -self.d, -self.c, -self.b, self.k)

    # -- predicates and views ----------------------------------------------

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0 and self.c == 0 and self.d == 0

    def as_omega_power(self) -> int | None:
        """Return j in 0..7 if the value equals omega^j exactly, else None."""
        if self.k != 0:
            return None
        coeffs = (self.a, self.b, self.c, self.d)
        for j in range(4):
            unit = [0, 0, 0, 0]
            unit[j] = 1
            if coeffs == tuple(unit):
                return j
            unit[j] = -1
            if coeffs == tuple(unit):
                return j + 4
        return None

    def is_unit_phase_over_rt2(self) -> tuple[int, int] | None:
        """Return (j, m) if the value is omega^j / sqrt(2)^m, else None.

        Used by channel checks: measurement branch scalars must have this
        shape in exact mode.
        """
        coeffs = (self.a, self.b, self.c, self.d)
        for j in range(4):
            unit = [0, 0, 0, 0]
            unit[j] = 1
            if coeffs == tuple(unit):
                return (j, self.k)
            unit[j] = -1
            if coeffs == tuple(unit):
                return (j + 4, self.k)
        return None

    def to_complex(self) -> complex:
        w = complex(math.sqrt(0.5), math.sqrt(0.5))
        num = self.a + self.b * w + self.c * w * w + self.d * w * w * w
        return num / math.sqrt(2.0) ** self.k

    # -- dunder plumbing ----------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RingScalar):
            return NotImplemented
        return (self.a, self.b, self.c, self.d, self.k) == (
            other.a, other.b, other.c, other.d, other.k)

    def __hash__(self) -> int:
        return hash((self.a, self.b, self.c, self.d, self.k))

    def __repr__(self) -> str:
        return f"RingScalar({self.a},{self.b},{self.c},{self.d},k={self.k})"

    def __str__(self) -> str:
        return f"({self.a},{self.b},{self.c},{self.d})/rt2^{self.k}"


def parse_scalar(text: str) -> RingScalar:
    """Parse the textual form "(a,b,c,d)/rt2^k"."""
    head, _, tail = text.partition("/rt2^")
    if not head.startswith("(") or not head.endswith(")") or not tail:
        raise ValueError(f"malformed ring scalar: {text!r}")
    parts = head[1:-1].split(",")
    if len(parts) != 4:
        raise ValueError(f"malformed ring scalar: {text!r}")
    a, b, c, d = (int(p) for p in parts)
    return RingScalar(a, b, c, d, int(tail))


ZERO = RingScalar(0, 0, 0, 0)
ONE = RingScalar(1, 0, 0, 0)
OMEGA = RingScalar(0, 1, 0, 0)
INV_RT2 = RingScalar(1, 0, 0, 0, 1)


def omega_power(j: int) -> RingScalar:
    """omega^j for any integer j (reduced mod 8)."""
    j %= 8
    sign = -1 if j >= 4 else 1
    coeffs = [0, 0, 0, 0]
    coeffs[j % 4] = sign
    return RingScalar(*coeffs)
