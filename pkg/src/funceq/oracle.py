"""Exact Taylor coefficients of Phi.

Two independent routes:

* truncated composition of Phi = P + P(Q) + P(Q_2) + ... in exact integer
  (or rational) arithmetic, valid whenever Q(z) = O(z^2);
* the 2,3-tree recurrence phi_n = sum_{2k+3m=n} binom(k+m, k) phi_{k+m}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .errors import UnsupportedSpec, WrongSpec
from .problem import ProblemSpec

NORMALIZE_DPS = 40


@dataclass
class CoefficientTable:
    coeffs: list  # coeffs[n-1] = phi_n
    normalized: np.ndarray = field(default=None, repr=False)  # n q^n phi_n

    @property
    def N(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, n: int):
        """phi_n, 1-based."""
        if n < 1:
            raise IndexError(n)
        return self.coeffs[n - 1]

    def to_csv(self) -> str:
        rows = ["n,phi_n,normalized"]
        for n, (c, v) in enumerate(zip(self.coeffs, self.normalized), start=1):
            rows.append(f"{n},{c},{v:.12g}")
        return "\n".join(rows) + "\n"


# -- truncated series in exact arithmetic ------------------------------------

def _pack(a: Sequence[int], bits: int) -> int:
    out = 0
    for c in reversed(a):
        out = (out << bits) + c
    return out


def _unpack(x: int, bits: int, count: int) -> list[int]:
    mask = (1 << bits) - 1
    half = 1 << (bits - 1)
    out = []
    for _ in range(count):
        c = x & mask
        if c >= half:
            c -= 1 << bits
        out.append(c)
        x = (x - c) >> bits
    return out


def _mul_trunc(a: list[int], b: list[int], N: int) -> list[int]:
    """Product of integer series mod z^(N+1) by Kronecker substitution."""
    la = next((i for i, c in enumerate(a) if c), None)
    lb = next((i for i, c in enumerate(b) if c), None)
    if la is None or lb is None or la + lb > N:
        return [0] * (N + 1)
    a, b = a[la:N + 1 - lb], b[lb:N + 1 - la]
    bound = max(abs(c) for c in a) * max(abs(c) for c in b) * min(len(a), len(b))
    bits = bound.bit_length() + 2
    prod = _unpack(_pack(a, bits) * _pack(b, bits), bits, N + 1 - la - lb)
    return [0] * (la + lb) + prod


def _reduce(nums: list[int], den: int) -> tuple[list[int], int]:
    g = den
    for c in nums:
        if g == 1:
            break
        g = math.gcd(g, c)
    return ([c // g for c in nums], den // g) if g > 1 else (nums, den)


def _compose_trunc(outer: Sequence, inner: tuple[list[int], int], N: int) -> tuple[list[int], int]:
    """outer(inner(z)) mod z^(N+1), Horner.

    Series are (integer numerators, common denominator); ``inner`` has no
    constant term and ``outer`` holds ints or Fractions.
    """
    inum, iden = inner
    top = Fraction(outer[-1])
    nums, den = [top.numerator] + [0] * N, top.denominator
    for c in outer[-2::-1]:
        nums, den = _mul_trunc(nums, inum, N), den * iden
        c = Fraction(c)
        if c:
            lcm = den * c.denominator // math.gcd(den, c.denominator)
            nums = [x * (lcm // den) for x in nums]
            nums[0] += c.numerator * (lcm // c.denominator)
            den = lcm
        nums, den = _reduce(nums, den)
    return nums, den


def _check_exact(poly) -> None:
    for c in poly.coeffs:
        if not isinstance(c, (int, Fraction)):
            raise UnsupportedSpec(f"coefficient {c!r} is not exact; give P and Q as integers or fractions")


def coeffs_by_composition(spec: ProblemSpec, N: int) -> CoefficientTable:
    """phi_1..phi_N from sum_k P(Q_k(z)) truncated at degree N.

    Needs Q(0) = Q'(0) = 0, so Q_k = O(z^(2^k)) and only finitely many
    iterates reach degree N.
    """
    P, Q = spec.P, spec.Q
    if Q[0] != 0 or Q[1] != 0:
        raise UnsupportedSpec("composition oracle needs Q(0) = Q'(0) = 0")
    if P[0] != 0:
        raise UnsupportedSpec("composition oracle needs P(0) = 0")
    _check_exact(P)
    _check_exact(Q)
    total = [Fraction(0)] * (N + 1)
    it = ([0, 1] + [0] * (N - 1), 1)  # Q_0(z) = z
    while any(it[0]):
        nums, den = _compose_trunc(P.coeffs, it, N)
        for n in range(1, N + 1):
            if nums[n]:
                total[n] += Fraction(nums[n], den)
        it = _compose_trunc(Q.coeffs, it, N)
    coeffs = [v.numerator if v.denominator == 1 else v for v in total[1:]]
    return CoefficientTable(coeffs)


def coeffs_by_recurrence_23(N: int, spec: ProblemSpec | None = None) -> CoefficientTable:
    """phi_1..phi_N for Phi(z) = z + Phi(z^2 + z^3) in big integers.

    phi_n = [n == 1] + sum_j binom(j, n - 2j) phi_j, the j-th term being the
    z^n coefficient of phi_j (z^2 (1 + z))^j. Runs over j and spreads
    phi_j binom(j, m) into n = 2j + m; the products are built by
    t <- t (j - m) / (m + 1), so only small-integer multiplies and exact
    divisions touch the big integers.
    """
    if spec is not None and not spec.is_two_three_tree():
        raise WrongSpec("recurrence is specific to P(z) = z, Q(z) = z^2 + z^3")
    phi = [0] * (N + 1)
    if N >= 1:
        phi[1] = 1
    for j in range(1, N // 2 + 1):
        pj = phi[j]
        base = 2 * j
        top = min(j, N - base)
        t = pj
        phi[base] += t
        for m in range(top):
            t = t * (j - m) // (m + 1)
            phi[base + m + 1] += t
    return CoefficientTable(phi[1:])


def exact_coefficients(spec: ProblemSpec, N: int) -> CoefficientTable:
    if spec.is_two_three_tree():
        table = coeffs_by_recurrence_23(N, spec)
    else:
        table = coeffs_by_composition(spec, N)
    table.normalized = normalize(table, spec)
    return table


def _refined_q(spec: ProblemSpec):
    coeffs = [mpmath.mpf(Fraction(c).numerator) / Fraction(c).denominator for c in spec.Q.coeffs]

    def g(x):
        return mpmath.polyval(coeffs[::-1], x) - x

    return mpmath.findroot(g, mpmath.mpf(spec.q))


def normalize(table: CoefficientTable, spec: ProblemSpec) -> np.ndarray:
    """n q^n phi_n for every entry, formed at 40 digits then rounded to double.

    q is re-solved at that precision from the exact coefficients of Q.
    """
    with mpmath.workdps(NORMALIZE_DPS):
        q = _refined_q(spec)
        out = np.empty(table.N)
        qn = mpmath.mpf(1)
        for n, c in enumerate(table.coeffs, start=1):
            qn *= q
            if isinstance(c, Fraction):
                val = mpmath.mpf(c.numerator) / c.denominator
            else:
                val = mpmath.mpf(c)
            out[n - 1] = float(n * qn * val)
    return out
