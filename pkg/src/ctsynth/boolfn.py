"""Boolean functions in algebraic normal form and Z8 phase polynomials.

A PhasePoly assigns a coefficient mod 8 to parities (XORs) of variables;
it denotes the phase omega^{sum_S c_S * (xor_{i in S} x_i)}.  The Fourier
expansion turns w * (product of variables) into such a parity sum using
the inclusion-exclusion identity whose degree-2 instance is
2*x1*x2 = x1 + x2 - (x1 xor x2).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce


class WeightError(Exception):
    """Raised when a monomial is too fine-grained for a Z8 expansion."""


@dataclass(frozen=True)
class BooleanFn:
    """ANF over F2: a set of monomials, each a frozenset of variable indices.

    The empty monomial is the constant 1.
    """
    n_vars: int
    monomials: frozenset[frozenset[int]]

    def __post_init__(self):
        for m in self.monomials:
            if any(not 0 <= v < self.n_vars for v in m):
                raise ValueError("monomial variable out of range")

    @staticmethod
    def zero(n_vars: int) -> "BooleanFn":
        return BooleanFn(n_vars, frozenset())

    @staticmethod
    def var(i: int, n_vars: int) -> "BooleanFn":
        return BooleanFn(n_vars, frozenset({frozenset({i})}))

    @staticmethod
    def product_of(vars_: list[int], n_vars: int) -> "BooleanFn":
        return BooleanFn(n_vars, frozenset({frozenset(vars_)}))

    def eval(self, x: int) -> int:
        """Evaluate on a bit-vector packed with variable 0 as the MSB."""
        acc = 0
        for m in self.monomials:
            if all((x >> (self.n_vars - 1 - v)) & 1 for v in m):
                acc ^= 1
        return acc

    def xor(self, other: "BooleanFn") -> "BooleanFn":
        if self.n_vars != other.n_vars:
            raise ValueError("variable count mismatch")
        return BooleanFn(self.n_vars, self.monomials ^ other.monomials)

    def multiply(self, other: "BooleanFn") -> "BooleanFn":
        """Pointwise product: monomial unions with F2 cancellation."""
        if self.n_vars != other.n_vars:
            raise ValueError("variable count mismatch")
        acc: set[frozenset[int]] = set()
        for m1 in self.monomials:
            for m2 in other.monomials:
                u = m1 | m2
                if u in acc:
                    acc.remove(u)
                else:
                    acc.add(u)
        return BooleanFn(self.n_vars, frozenset(acc))

    def shift(self, by: int, n_vars: int) -> "BooleanFn":
        """Rename every variable i to i + by inside a register of n_vars."""
        return BooleanFn(n_vars, frozenset(
            frozenset(v + by for v in m) for m in self.monomials))

    def degree(self) -> int:
        return max((len(m) for m in self.monomials), default=0)

    def __str__(self) -> str:
        if not self.monomials:
            return "0"
        parts = []
        for m in sorted(self.monomials, key=lambda s: (len(s), sorted(s))):
            parts.append("1" if not m else "*".join(f"x{v + 1}" for v in sorted(m)))
        return " + ".join(parts)


def parse_anf(text: str, n_vars: int) -> BooleanFn:
    """Parse "x1*x2 + x3" (1-based variables, '+' means XOR)."""
    text = text.strip()
    if text == "0":
        return BooleanFn.zero(n_vars)
    monomials: set[frozenset[int]] = set()
    for term in text.split("+"):
        term = term.strip()
        if term == "1":
            mono: frozenset[int] = frozenset()
        else:
            idxs = []
            for factor in term.split("*"):
                factor = factor.strip()
                if not factor.startswith("x"):
                    raise ValueError(f"bad ANF term {term!r}")
                idxs.append(int(factor[1:]) - 1)
            mono = frozenset(idxs)
        monomials ^= {mono}
    return BooleanFn(n_vars, frozenset(monomials))


@dataclass(frozen=True)
class PhasePoly:
    """Map from non-empty parity sets to coefficients mod 8."""
    n_vars: int
    coeffs: dict[frozenset[int], int] = field(default_factory=dict)

    def __post_init__(self):
        clean = {s: c % 8 for s, c in self.coeffs.items() if c % 8 and s}
        object.__setattr__(self, "coeffs", clean)

    def eval_phase(self, x: int) -> int:
        total = 0
        for s, coeff in self.coeffs.items():
            parity = 0
            for v in s:
                parity ^= (x >> (self.n_vars - 1 - v)) & 1
            total += coeff * parity
        return total % 8

    def add(self, other: "PhasePoly") -> "PhasePoly":
        if self.n_vars != other.n_vars:
            raise ValueError("variable count mismatch")
        merged = dict(self.coeffs)
        for s, c in other.coeffs.items():
            merged[s] = merged.get(s, 0) + c
        return PhasePoly(self.n_vars, merged)


def _subsets(items: tuple[int, ...]):
    n = len(items)
    for mask in range(1, 1 << n):
        yield frozenset(items[i] for i in range(n) if (mask >> i) & 1)


def fourier(f: BooleanFn, w: int) -> PhasePoly:
    """PhasePoly p with eval_phase(p, x) == w * f(x) mod 8 for all x.

    The XOR of monomials is first linearized into an integer multilinear
    polynomial mod 8 (a Moebius transform of the pointwise values); each
    surviving degree-d term with coefficient a then expands through the
    inclusion-exclusion identity whose leading weight is a / 2^(d-1).
    2^(d-1) * x1...xd = sum over non-empty subsets S of (-1)^(|S|+1) times
    the parity of S, so a term is expressible over Z8 only when 2^(d-1)
    divides its coefficient; otherwise WeightError is raised.
    """
    w %= 8
    if any(len(m) == 0 for m in f.monomials):
        # a constant monomial is a global phase, not a parity
        raise WeightError("constant monomial has no parity expansion")
    vars_ = sorted(set().union(*f.monomials)) if f.monomials else []
    m = len(vars_)
    vals = []
    for assign in range(1 << m):
        x = 0
        for pos, v in enumerate(vars_):
            if (assign >> (m - 1 - pos)) & 1:
                x |= 1 << (f.n_vars - 1 - v)
        vals.append((w * f.eval(x)) % 8)
    # subset Moebius transform: coefficient of the monomial over variable
    # set T is sum over subsets S of T of (-1)^(|T|-|S|) * value(S)
    coeff = list(vals)
    for pos in range(m):
        bitmask = 1 << (m - 1 - pos)
        for s in range(1 << m):
            if s & bitmask:
                coeff[s] = (coeff[s] - coeff[s ^ bitmask]) % 8
    coeffs: dict[frozenset[int], int] = {}
    for mask in range(1, 1 << m):
        a = coeff[mask]
        if a == 0:
            continue
        d = bin(mask).count("1")
        if d > 1 and a % (1 << min(d - 1, 3)):
            raise WeightError(f"degree-{d} term inexpressible at weight {w}")
        lead = a // (1 << (d - 1))
        items = tuple(vars_[pos] for pos in range(m)
                      if (mask >> (m - 1 - pos)) & 1)
        for s in _subsets(items):
            sign = 1 if (len(s) % 2 == 1) else -1
            coeffs[s] = coeffs.get(s, 0) + sign * lead
    return PhasePoly(f.n_vars, coeffs)


def truncate_to_target(p: PhasePoly, target: int) -> tuple[PhasePoly, PhasePoly]:
    """Split into the parities containing `target` and the rest."""
    kept = {s: c for s, c in p.coeffs.items() if target in s}
    dropped = {s: c for s, c in p.coeffs.items() if target not in s}
    return PhasePoly(p.n_vars, kept), PhasePoly(p.n_vars, dropped)


# ---------------------------------------------------------------------------
# The f_k family
# ---------------------------------------------------------------------------

def fk(k: int, variant: str = "plain") -> BooleanFn:
    """Degree-k functions from the two-term multiply-in-a-control recurrence.

    Each step multiplies a fresh leading variable onto the previous
    function and XORs in the one before that, shifted past the two new
    leading slots:

        f_k(x1..xk) = x1 * f_{k-1}(x2..xk) xor f_{k-2}(x3..xk)

    plain:  f0 = 0, f1 = x1.
    maslov: f0 = 0, f1 = x1, f2 = x1*x2, f3 = x1*x2*x3 (the variant whose
            degree-3 member is the 8-T relative-phase Toffoli-4).
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if variant == "plain":
        bases = {0: BooleanFn.zero(0), 1: BooleanFn.var(0, 1)}
    elif variant == "maslov":
        bases = {0: BooleanFn.zero(0), 1: BooleanFn.var(0, 1),
                 2: BooleanFn.product_of([0, 1], 2),
                 3: BooleanFn.product_of([0, 1, 2], 3)}
    else:
        raise ValueError(f"unknown variant {variant!r}")
    if k in bases:
        return bases[k]
    prev2 = bases[max(bases) - 1]
    prev1 = bases[max(bases)]
    for m in range(max(bases) + 1, k + 1):
        x1 = BooleanFn.var(0, m)
        lifted1 = prev1.shift(1, m)
        lifted2 = prev2.shift(2, m)
        cur = x1.multiply(lifted1).xor(lifted2)
        prev2, prev1 = prev1, cur
    return prev1
