"""Schroeder and Poincare maps at the repelling fixed point q.

    Psi(Q(z)) = Q'(q) Psi(z),     Psi(q) = 0, Psi'(q) = -1
    Pi(Q'(q) z) = Q(Pi(z)),       Pi(0) = q,  Pi'(0) = -1

Psi = Pi^{-1}. Both are evaluated from their limit definitions; Psi also
gets its Taylor data at q (Faa di Bruno recurrence), which feeds the
correction polynomials psi_m(r) of Psi(z)^r.

Orbits near q are carried as offsets delta = q - z. The limits multiply
these offsets by Q'(q)^N, so forming q - z explicitly would lose all
relative precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .errors import BadArity, DepthExceeded, NewtonDiverged, NoConvergence, SignConventionMismatch
from .polynomial import Polynomial, binomial_poly
from .problem import ProblemSpec

NEWTON_MAXITER = 100
LIMIT_TOL = 1e-13
MAX_DEPTH = 200
# backward iteration is trusted within R0_FRACTION * q of the fixed point
R0_FRACTION = 0.25


# -- Bell polynomials --------------------------------------------------------

def _partitions(m: int, k: int, n: int) -> Iterator[tuple[int, ...]]:
    """Sequences (j_1..j_n) >= 0 with sum j_i = k and sum i j_i = m."""

    def rec(i: int, parts_left: int, weight_left: int):
        if i > n:
            if parts_left == 0 and weight_left == 0:
                yield ()
            return
        for j in range(min(parts_left, weight_left // i) + 1):
            for rest in rec(i + 1, parts_left - j, weight_left - i * j):
                yield (j,) + rest

    yield from rec(1, k, m)


def bell_polynomial(m: int, k: int, xs: Sequence):
    """Partial Bell polynomial B_{m,k}(x_1, ..., x_{m-k+1}) by direct enumeration."""
    if not 1 <= k <= m:
        raise BadArity(f"need 1 <= k <= m, got m={m}, k={k}")
    n = m - k + 1
    if len(xs) != n:
        raise BadArity(f"B_{{{m},{k}}} takes {n} arguments, got {len(xs)}")
    total = 0
    for js in _partitions(m, k, n):
        term = math.factorial(m)
        for i, j in enumerate(js, start=1):
            if j:
                term = term / math.factorial(j) * (xs[i - 1] / math.factorial(i)) ** j
        total += term
    return total


# -- the removable-singularity ratio ----------------------------------------

@lru_cache(maxsize=32)
def _ratio_poly(spec: ProblemSpec) -> Polynomial:
    quot, _ = (spec.Q - spec.q).deflate(spec.q)
    return quot


def ratio_R(spec: ProblemSpec, z):
    """R(z) = (Q(z) - q) / (z - q), with R(q) = Q'(q).

    Q is a polynomial, so R is the quotient of Q(z) - q by (z - q) (the
    remainder is Q(q) - q ~ 1e-16 and is dropped). No special case near q.
    """
    return _ratio_poly(spec)(z)


# -- inverse branch and Psi --------------------------------------------------

def _inverse_offset(spec: ProblemSpec, delta, seed=None):
    """Offset e with Q(q - e) = q - delta on the branch through q.

    Newton on f(e) = e R(q - e) - delta; f'(e) = Q'(q - e).
    """
    delta = np.asarray(delta, dtype=complex)
    e = delta / spec.multiplier if seed is None else np.asarray(seed, dtype=complex).copy()
    R = _ratio_poly(spec)
    dQ = spec.Q.derivative()
    for _ in range(NEWTON_MAXITER):
        zeta = spec.q - e
        step = (e * R(zeta) - delta) / dQ(zeta)
        e = e - step
        if np.all(np.abs(step) <= 1e-16 * np.maximum(np.abs(e), 1e-300)):
            break
        if not np.all(np.isfinite(e)):
            raise NewtonDiverged("inverse branch Newton produced non-finite values")
    else:
        resid = np.abs(e * R(spec.q - e) - delta)
        if np.any(resid > 1e-13 * np.maximum(np.abs(delta), 1e-300)):
            raise NewtonDiverged(f"inverse branch Newton did not converge in {NEWTON_MAXITER} steps")
    return e


def inverse_Q(spec: ProblemSpec, w, seed=None):
    """Solve Q(zeta) = w for zeta on the branch of Q^{-1} fixing q.

    ``seed`` is a starting guess for zeta; by default q + (w - q)/Q'(q).
    """
    w = np.asarray(w, dtype=complex)
    e0 = None if seed is None else spec.q - np.asarray(seed, dtype=complex)
    e = _inverse_offset(spec, spec.q - w, e0)
    out = spec.q - e
    return out if np.ndim(out) else out[()]


def backward_offsets(spec: ProblemSpec, delta0) -> Iterator[np.ndarray]:
    """Yield delta_m = q - Q_{-m}(z) for m = 1, 2, ... where delta_0 = q - z."""
    d = np.asarray(delta0, dtype=complex)
    while True:
        d = _inverse_offset(spec, d)
        yield d


def _check_neighborhood(spec: ProblemSpec, delta) -> None:
    r0 = R0_FRACTION * spec.q
    if np.any(np.abs(delta) >= 2 * r0):
        raise NoConvergence(f"|z - q| >= {2 * r0:.3g}: outside the backward-iteration neighborhood")


def psi_eval(spec: ProblemSpec, z):
    """Psi(z) = lim Q'(q)^N (q - Q_{-N}(z))."""
    delta = spec.q - np.asarray(z, dtype=complex)
    _check_neighborhood(spec, delta)
    lam = spec.multiplier
    prev = delta.copy()
    scale = 1.0
    for d in backward_offsets(spec, delta):
        scale *= lam
        cur = scale * d
        if np.all(np.abs(cur - prev) < LIMIT_TOL * np.maximum(1.0, np.abs(cur))):
            return cur if np.ndim(cur) else cur[()]
        if not np.all(np.abs(d) < 2 * R0_FRACTION * spec.q):
            raise NoConvergence("backward iterates left the neighborhood of q")
        prev = cur
        if scale > lam ** MAX_DEPTH:
            break
    raise NoConvergence(f"Psi limit not settled after {MAX_DEPTH} backward steps")


def poincare_eval(spec: ProblemSpec, z):
    """Pi(z) = lim Q_N(q - z / Q'(q)^N).

    Uses Q(q - e) = q - e R(q - e): starting from the scaled offset z at
    depth N, each level replaces z <- z R(q - z / Q'^N) / Q' and lowers N,
    until Pi(z) = q - z at depth 0.
    """
    z = np.asarray(z, dtype=complex)
    lam = spec.multiplier
    beta = math.log(lam)
    zmax = float(np.max(np.abs(z))) if z.size else 0.0
    # depth where |z| / lam^N < e^-40
    n = 1 if zmax == 0.0 else max(1, math.ceil((math.log(zmax) + 40.0) / beta))
    if n > MAX_DEPTH:
        raise DepthExceeded(f"|z| = {zmax:.3g} needs depth {n} > {MAX_DEPTH}")
    R = _ratio_poly(spec)
    scale = lam ** n
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(n):
            z = z * R(spec.q - z / scale) / lam
            scale /= lam
    out = spec.q - z
    return out if np.ndim(out) else out[()]


# -- Taylor data of Psi at q -------------------------------------------------

def schroder_derivatives(spec: ProblemSpec, M: int) -> list[float]:
    """[Psi''(q), ..., Psi^(M)(q)] from the Faa di Bruno recurrence

        Psi^(m)(q) (Q' - Q'^m) = sum_{k=1}^{m-1} Psi^(k)(q) B_{m,k}(Q', Q'', ...)
    """
    if M < 2:
        raise ValueError("M must be >= 2")
    lam = spec.multiplier
    qd = [spec.dQ(i) for i in range(1, M + 1)]  # Q'(q), Q''(q), ...
    psi = {1: -1.0}
    for m in range(2, M + 1):
        acc = 0.0
        for k in range(1, m):
            acc += psi[k] * bell_polynomial(m, k, qd[: m - k + 1])
        psi[m] = acc / (lam - lam ** m)
    return [psi[m] for m in range(2, M + 1)]


def _psi_series_args(derivs: Sequence[float], m: int) -> list[float]:
    """x_i = i! c_i where Psi(z) = u (1 + sum c_i u^i), u = q - z."""
    # Psi^(i+1)(q) (z - q)^(i+1) / (i+1)!  contributes  (-1)^(i+1) Psi^(i+1)/(i+1)! u^(i+1)
    return [(-1) ** (i + 1) * derivs[i - 1] / (i + 1) for i in range(1, m + 1)]


def _series_power(coeffs: Sequence[float], r: int, order: int) -> list[float]:
    """Coefficients of (1 + sum_{i>=1} coeffs[i-1] u^i)^r up to u^order."""
    base = [1.0] + list(coeffs[:order])
    base += [0.0] * (order + 1 - len(base))
    out = [1.0] + [0.0] * order
    for _ in range(r):
        out = [sum(out[j] * base[i - j] for j in range(i + 1)) for i in range(order + 1)]
    return out


def psi_polys(derivs: Sequence[float], M: int) -> list[Polynomial]:
    """[psi_1(r), ..., psi_M(r)] with Psi(z)^r = sum_m psi_m(r)/m! (q - z)^(r+m).

    psi_m(r) = sum_k r(r-1)...(r-k+1) B_{m,k}(x_1, ..., x_{m-k+1}),
    x_i = (-1)^(i+1) Psi^(i+1)(q) / (i+1). Needs derivatives through M+1.
    """
    if len(derivs) < M:
        raise ValueError(f"need Psi derivatives through order {M + 1}")
    xs = _psi_series_args(derivs, M)
    r = Polynomial([0, 1])
    out = []
    for m in range(1, M + 1):
        p = Polynomial([0.0])
        for k in range(1, m + 1):
            p = p + binomial_poly(r, k) * (math.factorial(k) * bell_polynomial(m, k, xs[: m - k + 1]))
        out.append(p)
    _check_against_series(xs, out)
    return out


def _check_against_series(xs: Sequence[float], polys: Sequence[Polynomial]) -> None:
    M = len(polys)
    cs = [x / math.factorial(i) for i, x in enumerate(xs, start=1)]
    for r in (1, 2, 3):
        ref = _series_power(cs, r, M)
        for m, p in enumerate(polys, start=1):
            got = p(float(r)) / math.factorial(m)
            if abs(got - ref[m]) > 1e-9 * max(1.0, abs(ref[m])):
                raise SignConventionMismatch(
                    f"psi_{m}({r})/{m}! = {got!r} but Psi^{r} expansion gives {ref[m]!r}")


@dataclass(frozen=True)
class SchroderData:
    derivs: tuple  # Psi''(q), Psi'''(q), ...
    psi_polys: tuple  # psi_1(r), ..., psi_{M-1}(r)

    def psi(self, j: int) -> Polynomial:
        return Polynomial([1]) if j == 0 else self.psi_polys[j - 1]


def build_schroder(spec: ProblemSpec, M: int = 8) -> SchroderData:
    derivs = schroder_derivatives(spec, M)
    return SchroderData(derivs=tuple(derivs), psi_polys=tuple(psi_polys(derivs, M - 1)))


def psi_taylor(spec: ProblemSpec, data: SchroderData, z):
    """Truncated Taylor series of Psi at q from the derivative table."""
    h = np.asarray(z, dtype=complex) - spec.q
    out = -h
    for m, d in enumerate(data.derivs, start=2):
        out = out + d / math.factorial(m) * h ** m
    return out if np.ndim(out) else out[()]
