"""ln T near q, where T(z) = exp(alpha P(z)) T(Q(z)), T(q) = 0, T'(q) = -1.

The backward orbit Q_{-m}(z) -> q geometrically, so

    ln T(z) = ln(q - z) + sum_m [beta P(Q_{-m}(z)) / P(q) - ln R(Q_{-m}(z))]

converges like Q'(q)^-m. :func:`ln_T_telescoped` sums the equivalent
telescoped form and exists as a cross-check.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .conjugacy import MAX_DEPTH, backward_offsets, ratio_R
from .errors import AtSingularity, NoConvergence
from .problem import ProblemSpec

INCREMENT_TOL = 1e-16


@dataclass
class LogTResult:
    value: np.ndarray | complex
    terms_used: int
    tail_bound: float


def _start(spec: ProblemSpec, z):
    z = np.asarray(z, dtype=complex)
    delta = spec.q - z
    if np.any(delta == 0):
        raise AtSingularity("ln T is singular at z = q")
    return z, delta


def _sum_series(spec: ProblemSpec, delta, term) -> LogTResult:
    acc = np.log(delta)
    lam = spec.multiplier
    prev = delta
    for m, d in enumerate(backward_offsets(spec, delta), start=1):
        t = term(prev, d)
        acc = acc + t
        size = float(np.max(np.abs(t)))
        if size <= INCREMENT_TOL * max(1.0, float(np.max(np.abs(acc)))):
            # geometric tail with ratio 1/Q'(q)
            tail = size / (lam - 1.0)
            value = acc if np.ndim(acc) else acc[()]
            return LogTResult(value=value, terms_used=m, tail_bound=tail)
        if m >= MAX_DEPTH:
            break
        prev = d
    raise NoConvergence(f"ln T series not converged after {MAX_DEPTH} terms")


def ln_T(spec: ProblemSpec, z) -> LogTResult:
    """ln T(z) for z near q (scalar or array), principal branch of ln(q - z)."""
    _, delta = _start(spec, z)
    scale = spec.beta / spec.P_at_q

    def term(_prev, d):
        zeta = spec.q - d
        return scale * spec.P(zeta) - np.log(ratio_R(spec, zeta))

    return _sum_series(spec, delta, term)


def ln_T_telescoped(spec: ProblemSpec, z) -> LogTResult:
    """Same quantity from sum_m [ln(delta_m / delta_{m-1}) - alpha P(Q_{-m}(z))]."""
    _, delta = _start(spec, z)

    def term(prev, d):
        return np.log(d / prev) - spec.alpha * spec.P(spec.q - d)

    return _sum_series(spec, delta, term)
