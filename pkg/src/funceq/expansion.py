"""Universal correction polynomials and the periodic functions K_r.

    phi_n ~ q^-n [ K_1(x_n)/n + K_2(x_n)/n^2 + ... ],   x_n = (ln q - ln n) / beta

    K_1(x) = -1/alpha + 2 Re sum_m c_m e^{2 pi i m x}
    K_r(x) = 2 Re sum_m c_m e^{2 pi i m x} A_{r-1}(2 pi i m),    r >= 2

with c_m = lambda_m / Gamma(-2 pi i m / beta) and

    A_r(z) = sum_{j+k=r} q^j psi_j(z/beta) binom((-beta - z)/beta, j) S_{2k}((j beta + z)/beta).

S_{2k}(r) are the coefficients of the large-n expansion

    (-1)^n binom(r, n) ~ 1/(Gamma(-r) n^{r+1}) sum_k S_{2k}(r) / n^k.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .conjugacy import SchroderData, build_schroder
from .polynomial import Polynomial, binomial_poly, linear
from .problem import ProblemSpec
from .spectrum import FourierSpectrum

DEFAULT_TERMS = 3


# -- S polynomials -----------------------------------------------------------

@dataclass(frozen=True)
class SPolyTable:
    polys: tuple  # S_0, S_2, ..., S_2K as Polynomial with Fraction coefficients

    def __getitem__(self, k: int) -> Polynomial:
        """S_{2k}."""
        return self.polys[k]

    def __len__(self) -> int:
        return len(self.polys)


def s_polynomials(K: int) -> SPolyTable:
    """S_0, ..., S_{2K} from the ratio identity binom(r, n+1) = (r-n)/(n+1) binom(r, n):

        (k-1) S_{2(k-1)} = sum_{i=2}^{k} S_{2(k-i)} [binom(-(k-i)-r-1, i) + (-1)^(i-1) (r+1)]
    """
    r = Polynomial([0, 1])
    S = [Polynomial([Fraction(1)])]
    for k in range(2, K + 2):
        acc = Polynomial([Fraction(0)])
        for i in range(2, k + 1):
            arg = linear(Fraction(-(k - i) - 1), Fraction(-1))  # -(k-i) - r - 1
            bracket = binomial_poly(arg, i) + (r + 1) * ((-1) ** (i - 1))
            acc = acc + S[k - i] * bracket
        S.append(acc / Fraction(k - 1))
    return SPolyTable(tuple(S[: K + 1]))


def binom_general(r, n: int):
    """binom(r, n) = r (r-1) ... (r-n+1) / n! for complex r, nonnegative integer n.

    Small n use the exact product; large n sum logs of the factors to stay
    clear of overflow.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n <= 150:
        out = 1
        for t in range(n):
            out = out * (r - t) / (t + 1)
        return out
    t = np.arange(n)
    factors = (complex(r) - t) / (t + 1)
    if np.any(factors == 0):
        return 0.0
    return complex(np.exp(np.sum(np.log(factors))))


# -- A polynomials and K functions ------------------------------------------

def a_polynomial(r_index: int, spec: ProblemSpec, schroder: SchroderData, s_table: SPolyTable) -> Polynomial:
    """A_r(z) as a real polynomial in z."""
    beta, q = spec.beta, spec.q
    out = Polynomial([0.0])
    for j in range(r_index + 1):
        k = r_index - j
        psi_j = schroder.psi(j).compose(linear(0.0, 1.0 / beta))
        binom_j = binomial_poly(linear(-1.0, -1.0 / beta), j)
        s_2k = Polynomial([float(c) for c in s_table[k].coeffs]).compose(linear(float(j), 1.0 / beta))
        out = out + psi_j * binom_j * s_2k * q ** j
    return out


def a1_closed_form(spec: ProblemSpec, z):
    """z (z + beta) (q Q'' + Q' - Q'^2) / (2 beta^2 (Q' - Q'^2)), all at q."""
    d1, d2, beta, q = spec.multiplier, spec.dQ(2), spec.beta, spec.q
    return z * (z + beta) * (q * d2 + d1 - d1 ** 2) / (2 * beta ** 2 * (d1 - d1 ** 2))


@dataclass
class ExpansionTable:
    spec: ProblemSpec
    spectrum: FourierSpectrum
    s_table: SPolyTable
    schroder: SchroderData
    a_polys: tuple  # A_0, ..., A_{R-1}
    _weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        m = np.arange(1, self.spectrum.modes + 1)
        z = 2j * np.pi * m
        # weights[r-1, m-1] = c_m A_{r-1}(2 pi i m)
        self._weights = np.array([self.spectrum.ratios * a(z) for a in self.a_polys])

    @property
    def terms(self) -> int:
        return len(self.a_polys)


def build_expansion(spec: ProblemSpec, spectrum: FourierSpectrum, R: int = DEFAULT_TERMS) -> ExpansionTable:
    """Tables for K_1..K_R (needs psi_j, S_2k for j, k <= R - 1)."""
    if R < 1:
        raise ValueError("R must be >= 1")
    schroder = build_schroder(spec, max(R + 1, 3))
    s_table = s_polynomials(max(R - 1, 1))
    a_polys = tuple(a_polynomial(r, spec, schroder, s_table) for r in range(R))
    return ExpansionTable(spec=spec, spectrum=spectrum, s_table=s_table, schroder=schroder, a_polys=a_polys)


def K_eval(r_index: int, x, table: ExpansionTable, M: int | None = None):
    """K_r(x), real and 1-periodic; vectorized in x."""
    if not 1 <= r_index <= table.terms:
        raise ValueError(f"K_{r_index} not available (table has {table.terms} terms)")
    w = table._weights[r_index - 1]
    if M is not None:
        w = w[:M]
    x = np.asarray(x, dtype=float)
    m = np.arange(1, len(w) + 1)
    phase = np.exp(2j * np.pi * np.multiply.outer(x, m))
    out = 2 * (phase @ w).real
    if r_index == 1:
        out = out - 1.0 / table.spec.alpha
    return out if np.ndim(out) else float(out)


def x_of_n(spec: ProblemSpec, n):
    return (math.log(spec.q) - np.log(np.asarray(n, dtype=float))) / spec.beta


@dataclass
class AsymptoticEstimate:
    n: np.ndarray
    x: np.ndarray
    terms: np.ndarray  # terms[r-1] = K_r(x_n) / n^(r-1)

    @property
    def partial_sums(self) -> np.ndarray:
        return np.cumsum(self.terms, axis=0)


def asymptotic_terms(n, R: int, table: ExpansionTable) -> AsymptoticEstimate:
    n = np.asarray(n, dtype=float)
    x = x_of_n(table.spec, n)
    terms = np.array([K_eval(r, x, table) / n ** (r - 1) for r in range(1, R + 1)]).reshape((R,) + n.shape)
    return AsymptoticEstimate(n=n, x=x, terms=terms)


def asymptotic_coeff(n, R: int, table: ExpansionTable):
    """Estimate of n q^n phi_n: sum_{r=1}^{R} K_r(x_n) / n^(r-1)."""
    if R == 0:
        return np.zeros(np.shape(n)) if np.ndim(n) else 0.0
    out = asymptotic_terms(n, R, table).partial_sums[-1]
    return out if np.ndim(out) else float(out)
