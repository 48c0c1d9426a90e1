"""Dense univariate polynomials, lowest degree first.

Coefficients keep whatever exact type they were built from (int, Fraction)
so the oracle and the rational tables stay exact; numeric evaluation goes
through a cached float/complex copy and a fixed Horner order.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Number
from typing import Iterable

import numpy as np


def _trim(coeffs: list) -> list:
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


class Polynomial:
    """p(z) = c[0] + c[1] z + ... + c[d] z^d."""

    __slots__ = ("coeffs", "_numeric")

    def __init__(self, coeffs: Iterable[Number]):
        cs = _trim(list(coeffs))
        if not cs:
            cs = [0]
        self.coeffs: tuple = tuple(cs)
        self._numeric = None

    @classmethod
    def parse(cls, text: str) -> "Polynomial":
        """Build from a comma separated list such as ``"0, 0, 1, 1"``.

        Entries are read as exact fractions (``"1/3"`` and ``"0.25"`` both
        work), so the exact coefficient oracle sees the intended values.
        """
        items = [s.strip() for s in text.split(",") if s.strip()]
        if not items:
            raise ValueError(f"no coefficients in {text!r}")
        cs = []
        for s in items:
            f = Fraction(s)
            cs.append(f.numerator if f.denominator == 1 else f)
        return cls(cs)

    # -- structure ---------------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, i: int):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"Polynomial({list(self.coeffs)!r})"

    @property
    def numeric(self) -> np.ndarray:
        if self._numeric is None:
            arr = np.array([complex(c) for c in self.coeffs])
            if not np.any(arr.imag):
                arr = arr.real.copy()
            self._numeric = arr
        return self._numeric

    def is_integral(self) -> bool:
        return all(isinstance(c, int) or (isinstance(c, Fraction) and c.denominator == 1)
                   for c in self.coeffs)

    # -- evaluation --------------------------------------------------------

    def __call__(self, z):
        """Horner evaluation at a scalar or numpy array."""
        c = self.numeric
        acc = np.zeros(np.shape(z), dtype=np.result_type(c, z, float)) + c[-1]
        for a in c[-2::-1]:
            acc = acc * z + a
        return acc if np.ndim(acc) else acc[()]

    def exact(self, z):
        """Horner evaluation keeping the coefficient type (Fraction in, Fraction out)."""
        acc = self.coeffs[-1]
        for a in self.coeffs[-2::-1]:
            acc = acc * z + a
        return acc

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self), len(other))
        return Polynomial(self[i] + other[i] for i in range(n))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return Polynomial(c * other for c in self.coeffs)
        out = [0] * (len(self) + len(other) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return Polynomial(c / scalar for c in self.coeffs)

    def __pow__(self, k: int):
        out = Polynomial([1])
        for _ in range(k):
            out = out * self
        return out

    def derivative(self, order: int = 1) -> "Polynomial":
        cs = list(self.coeffs)
        for _ in range(order):
            cs = [i * cs[i] for i in range(1, len(cs))] or [0]
        return Polynomial(cs)

    def compose(self, inner: "Polynomial") -> "Polynomial":
        """self(inner(z)), Horner in polynomial arithmetic."""
        acc = Polynomial([self.coeffs[-1]])
        for a in self.coeffs[-2::-1]:
            acc = acc * inner + a
        return acc

    def deflate(self, root) -> tuple["Polynomial", object]:
        """Synthetic division by (z - root); returns (quotient, remainder)."""
        if self.degree == 0:
            return Polynomial([0]), self.coeffs[0]
        out = [0] * self.degree
        acc = self.coeffs[-1]
        for i in range(self.degree - 1, -1, -1):
            out[i] = acc
            acc = self.coeffs[i] + acc * root
        return Polynomial(out), acc


def _as_poly(x) -> Polynomial:
    return x if isinstance(x, Polynomial) else Polynomial([x])


def monomial(k: int, coeff=1) -> Polynomial:
    return Polynomial([0] * k + [coeff])


def linear(a, b) -> Polynomial:
    """a + b z"""
    return Polynomial([a, b])


def binomial_poly(p: Polynomial, k: int) -> Polynomial:
    """binom(p(z), k) = p (p - 1) ... (p - k + 1) / k! as a polynomial in z."""
    out = Polynomial([1])
    for t in range(k):
        out = out * (p - t)
    fact = 1
    for t in range(2, k + 1):
        fact *= t
    exact = all(isinstance(c, (int, Fraction)) for c in out.coeffs)
    return out / (Fraction(fact) if exact else float(fact))


def falling_factorial_poly(k: int) -> Polynomial:
    """r (r - 1) ... (r - k + 1) in the variable r, integer coefficients."""
    out = Polynomial([1])
    for t in range(k):
        out = out * Polynomial([-t, 1])
    return out
