"""Problem instance for Phi(z) = P(z) + Phi(Q(z)).

Holds P and Q, the repelling fixed point q of Q, and the two constants the
rest of the pipeline is written in terms of:

    beta  = ln Q'(q)
    alpha = -ln Q'(q) / P(q)
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateSpec, NoFixedPoint, NotRepelling
from .polynomial import Polynomial

BISECT_WIDTH = 1e-6
NEWTON_MAXITER = 60

# sampled assumption check
ORBIT_SAMPLES = 64
ORBIT_STEPS = 200
ORBIT_THRESHOLD = 1e-8
ORBIT_SHRINK = 1e-3


def _as_polynomial(p) -> Polynomial:
    if isinstance(p, Polynomial):
        poly = p
    elif isinstance(p, str):
        poly = Polynomial.parse(p)
    else:
        poly = Polynomial(p)
    if poly.is_zero():
        raise ValueError("polynomial must have at least one nonzero coefficient")
    return poly


def _default_bracket(Q: Polynomial) -> tuple[float, float]:
    # first sign change of Q(x) - x on a log grid over (0, 100]
    xs = np.geomspace(1e-4, 100.0, 2000)
    g = Q(xs) - xs
    idx = np.nonzero(np.sign(g[:-1]) * np.sign(g[1:]) <= 0)[0]
    if len(idx) == 0:
        raise NoFixedPoint("Q(x) - x has no sign change on (0, 100]")
    i = idx[0]
    return float(xs[i]), float(xs[i + 1])


def find_fixed_point(Q, bracket: Optional[Sequence[float]] = None, *, require_repelling: bool = True) -> float:
    """Positive fixed point of Q inside ``bracket``.

    Bisection down to a bracket of width 1e-6, then Newton to full double
    precision. Without a sign change the Newton step starts from the
    bracket midpoint.
    """
    Q = _as_polynomial(Q)
    dQ = Q.derivative()
    if bracket is None:
        bracket = _default_bracket(Q)
    a, b = float(bracket[0]), float(bracket[1])
    if a > b:
        a, b = b, a
    if a <= 0.0 <= b:
        raise ValueError(f"bracket {bracket!r} must exclude 0")

    def g(x):
        return float(Q(x)) - x

    ga, gb = g(a), g(b)
    if ga == 0.0:
        x = a
    elif gb == 0.0:
        x = b
    elif ga * gb < 0:
        while b - a > BISECT_WIDTH:
            mid = 0.5 * (a + b)
            gm = g(mid)
            if gm == 0.0:
                a = b = mid
                break
            if (gm < 0) == (ga < 0):
                a, ga = mid, gm
            else:
                b = mid
        x = 0.5 * (a + b)
    else:
        x = 0.5 * (a + b)

    converged = False
    for _ in range(NEWTON_MAXITER):
        d = float(dQ(x)) - 1.0
        if d == 0.0 or not math.isfinite(d):
            break
        step = g(x) / d
        x -= step
        if not math.isfinite(x):
            break
        if abs(step) <= 4e-16 * max(1.0, abs(x)):
            converged = True
            break
    if not math.isfinite(x) or x <= 0 or abs(g(x)) > 1e-14 * max(1.0, abs(x)):
        raise NoFixedPoint(f"no positive fixed point found from bracket [{bracket[0]}, {bracket[1]}]")
    if not converged and abs(g(x)) > 1e-15 * max(1.0, abs(x)):
        raise NoFixedPoint("Newton refinement did not settle")
    if require_repelling and float(dQ(x)) <= 1.0:
        raise NotRepelling(f"Q'(q) = {float(dQ(x)):.6g} <= 1 at q = {x:.16g}")
    return x


def derive_constants(P, Q, q: float) -> tuple[float, float]:
    """(alpha, beta) with beta = ln Q'(q) and alpha = -beta / P(q)."""
    P = _as_polynomial(P)
    Q = _as_polynomial(Q)
    Pq = float(P(q))
    if Pq == 0.0:
        raise DegenerateSpec(f"P(q) = 0 at q = {q!r}")
    dq = float(Q.derivative()(q))
    if dq <= 1.0:
        raise NotRepelling(f"Q'(q) = {dq:.6g} <= 1")
    beta = math.log(dq)
    return -beta / Pq, beta


@dataclass(frozen=True)
class ProblemSpec:
    P: Polynomial
    Q: Polynomial
    q: float
    alpha: float
    beta: float
    # derivatives of Q at q, index k holds Q^(k)(q)
    Q_derivs: tuple = field(repr=False, compare=False, default=())

    @classmethod
    def build(cls, P, Q, bracket: Optional[Sequence[float]] = None, *, strict: bool = True) -> "ProblemSpec":
        """Locate q and derive alpha, beta.

        With ``strict=False`` the constructor tolerates a non-repelling or
        degenerate fixed point (constants become NaN) so that
        :func:`validate_spec` can report what is wrong.
        """
        P = _as_polynomial(P)
        Q = _as_polynomial(Q)
        q = find_fixed_point(Q, bracket, require_repelling=strict)
        if strict:
            alpha, beta = derive_constants(P, Q, q)
        else:
            try:
                alpha, beta = derive_constants(P, Q, q)
            except (DegenerateSpec, NotRepelling):
                alpha = beta = math.nan
        derivs = tuple(float(Q.derivative(k)(q)) for k in range(Q.degree + 1))
        return cls(P=P, Q=Q, q=q, alpha=alpha, beta=beta, Q_derivs=derivs)

    def dQ(self, k: int = 1) -> float:
        """Q^(k)(q); zero beyond the degree of Q."""
        return self.Q_derivs[k] if k < len(self.Q_derivs) else 0.0

    @property
    def multiplier(self) -> float:
        return self.dQ(1)

    @property
    def P_at_q(self) -> float:
        return float(self.P(self.q))

    def is_two_three_tree(self) -> bool:
        return self.P.coeffs == (0, 1) and self.Q.coeffs == (0, 0, 1, 1)


def two_three_tree_spec() -> ProblemSpec:
    """P(z) = z, Q(z) = z^2 + z^3: generating function of 2,3-trees by leaves."""
    return ProblemSpec.build([0, 1], [0, 0, 1, 1], bracket=(0.1, 0.9))


@dataclass(frozen=True)
class Diagnostic:
    name: str
    message: str

    def __str__(self) -> str:
        return f"{self.name}: {self.message}"


def _orbits_to_zero(Q: Polynomial, radius: float) -> np.ndarray:
    theta = 2 * np.pi * np.arange(ORBIT_SAMPLES) / ORBIT_SAMPLES
    z = radius * np.exp(1j * theta)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(ORBIT_STEPS):
            z = Q(z)
            z = np.where(np.isfinite(z), z, np.inf)
    return np.abs(z) < ORBIT_THRESHOLD


def validate_spec(spec: ProblemSpec) -> list[Diagnostic]:
    """Check the testable standing assumptions; empty list means all hold.

    The global filled-Julia-set condition is replaced by a sampled check:
    forward orbits from 64 points on the circle of radius q (1 - 1e-3) must
    reach |z| < 1e-8 within 200 steps.
    """
    out: list[Diagnostic] = []
    P, Q, q = spec.P, spec.Q, spec.q
    d0 = float(Q.derivative()(0.0))
    if not 0.0 <= d0 < 1.0:
        out.append(Diagnostic("AttractingOriginViolated", f"Q'(0) = {d0:.6g} not in [0, 1)"))
    if float(Q(0.0)) != 0.0:
        out.append(Diagnostic("OriginNotFixed", f"Q(0) = {float(Q(0.0)):.6g} != 0"))
    dq = float(Q.derivative()(q))
    if not dq > 1.0:
        out.append(Diagnostic("RepellingPointViolated", f"Q'(q) = {dq:.6g} <= 1"))
    if float(P(0.0)) != 0.0:
        out.append(Diagnostic("POriginNonzero", f"P(0) = {float(P(0.0)):.6g} != 0"))
    if float(P(q)) == 0.0:
        out.append(Diagnostic("PVanishesAtFixedPoint", "P(q) = 0"))
    ok = _orbits_to_zero(Q, q * (1 - ORBIT_SHRINK))
    if not ok.all():
        out.append(Diagnostic("OrbitNotConverging",
                              f"{int((~ok).sum())} of {ORBIT_SAMPLES} sampled orbits on |z| = q(1-1e-3) do not reach 0"))
    return out
