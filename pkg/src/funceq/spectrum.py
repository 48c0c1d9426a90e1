"""Fourier spectrum of the periodic factor.

    Lambda~(z) = Phi(z) - ln T(z) / alpha            (Q-invariant)
    Lambda(x)  = Lambda~(Pi(Q'(q)^x))                (1-periodic)
    Lambda(x - i y) = sum_m lambda_hat_m e^{2 pi i m x},  lambda_hat_m = e^{2 pi m y} lambda_m

Sampling on the shifted line Im x = -y boosts the positive modes by
e^{2 pi m y}, which is what lets their ratio with Gamma(-2 pi i m / beta)
(also exponentially small) be formed accurately.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .boundary import ln_T
from .conjugacy import R0_FRACTION, poincare_eval
from .errors import BadShift, NoConvergence, NumericalError, PoleOfGamma, ZeroCoefficient
from .problem import ProblemSpec

DEFAULT_Y = 2.0
DEFAULT_GRID = 4096
DEFAULT_MODES = 10
SHIFT_CANDIDATES = (1.0, 1.5, 2.0, 2.5, 3.0)

PHI_TOL = 1e-15
PHI_QUIET_STEPS = 3
PHI_MAX_STEPS = 500


def phi_eval(spec: ProblemSpec, z):
    """Phi(z) = sum_N P(Q_N(z)) along the forward orbit."""
    z = np.asarray(z, dtype=complex)
    acc = np.zeros_like(z)
    quiet = 0
    entered = np.zeros(z.shape, dtype=bool)
    with np.errstate(over="ignore", invalid="ignore"):
        for step in range(PHI_MAX_STEPS):
            t = spec.P(z)
            acc = acc + t
            entered |= np.abs(z) < 0.5 * spec.q
            if not np.all(np.isfinite(acc)):
                raise NoConvergence("forward orbit escaped to infinity")
            quiet = quiet + 1 if np.all(np.abs(t) < PHI_TOL) else 0
            if quiet >= PHI_QUIET_STEPS:
                return acc if np.ndim(acc) else acc[()]
            z = spec.Q(z)
    if not entered.all():
        raise NoConvergence(f"forward orbit did not enter |z| < q/2 within {PHI_MAX_STEPS} steps")
    raise NoConvergence(f"Phi series not converged after {PHI_MAX_STEPS} steps")


def lambda_tilde(spec: ProblemSpec, z):
    """Phi(z) - ln T(z) / alpha, for z near q."""
    return phi_eval(spec, z) - ln_T(spec, z).value / spec.alpha


@dataclass
class GridSample:
    x: np.ndarray  # -n, -n + 1/N, ..., -n + (N-1)/N
    y: float
    values: np.ndarray  # Lambda(x - i y)

    @property
    def size(self) -> int:
        return len(self.values)


def default_offset(spec: ProblemSpec, y: float, N: int = 64) -> int:
    """Smallest n >= 1 with |Pi(Q'^(x - i y)) - q| < r0/2 for x in [-n, -n + 1)."""
    x = np.arange(N) / N
    for n in range(1, 200):
        w = np.exp(spec.beta * (x - n - 1j * y))
        if np.max(np.abs(poincare_eval(spec, w) - spec.q)) < 0.5 * R0_FRACTION * spec.q:
            return n
    raise BadShift(f"no usable offset for y = {y}")


def lambda_line(spec: ProblemSpec, y: float = DEFAULT_Y, N: int = DEFAULT_GRID, n_offset: int | None = None) -> GridSample:
    """Sample Lambda(x - i y) at x = -n + j/N, j = 0..N-1."""
    if N <= 0 or N & (N - 1):
        raise ValueError(f"grid size must be a power of two, got {N}")
    if n_offset is None:
        n_offset = default_offset(spec, y)
    x = -n_offset + np.arange(N) / N
    w = np.exp(spec.beta * (x - 1j * y))
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            z = poincare_eval(spec, w)
            values = lambda_tilde(spec, z)
    except NumericalError as exc:
        raise BadShift(f"Lambda not computable on Im x = -{y}: {exc}") from exc
    if not np.all(np.isfinite(values)):
        raise BadShift(f"non-finite Lambda values on Im x = -{y}")
    return GridSample(x=x, y=float(y), values=values)


# -- Gamma -------------------------------------------------------------------

def log_gamma(z):
    """Principal branch of ln Gamma(z)."""
    z = np.asarray(z, dtype=complex)
    bad = (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))
    if np.any(bad):
        raise PoleOfGamma(f"Gamma has a pole at {z[bad].ravel()[0].real:g}")
    out = special.loggamma(z)
    return out if np.ndim(out) else out[()]


def gamma_ratio(m: int, lam_hat: complex, y: float, beta: float) -> complex:
    """lambda_m / Gamma(-2 pi i m / beta) from lambda_hat_m = e^{2 pi m y} lambda_m.

    exp(ln lambda_hat - ln Gamma(-2 pi i m / beta) - 2 pi m y): both lambda_m
    and the Gamma value are exponentially small, so only their logs meet.
    """
    if lam_hat == 0 or not np.isfinite(lam_hat):
        raise ZeroCoefficient(f"lambda_hat_{m} = {lam_hat!r}")
    s = -2j * math.pi * m / beta
    return complex(np.exp(np.log(complex(lam_hat)) - log_gamma(s) - 2 * math.pi * m * y))


# -- spectrum ----------------------------------------------------------------

@dataclass
class FourierSpectrum:
    y: float
    beta: float
    lambda0: float
    lambda_hat: np.ndarray  # m = 1..M
    ratios: np.ndarray  # lambda_m / Gamma(-2 pi i m / beta), m = 1..M
    grid_size: int
    lambda0_imag: float = 0.0

    @property
    def modes(self) -> int:
        return len(self.lambda_hat)

    def to_csv(self) -> str:
        rows = ["m,re_lambda_hat,im_lambda_hat,re_ratio,im_ratio"]
        for m, (lh, r) in enumerate(zip(self.lambda_hat, self.ratios), start=1):
            rows.append(",".join([str(m)] + [f"{v:.12g}" for v in (lh.real, lh.imag, r.real, r.imag)]))
        return "\n".join(rows) + "\n"


def fourier_extract(grid: GridSample, M: int = DEFAULT_MODES) -> tuple[complex, np.ndarray]:
    """(c_0, [c_1..c_M]) with c_m the m-th Fourier coefficient of the grid.

    The grid starts at an integer x, so e^{-2 pi i m x_0} = 1 and no phase
    correction is needed.
    """
    N = grid.size
    if M > N // 2:
        raise ValueError(f"M = {M} exceeds the Nyquist limit for N = {N}")
    c = np.fft.fft(grid.values) / N
    return complex(c[0]), c[1:M + 1].copy()


def compute_spectrum(spec: ProblemSpec, y: float = DEFAULT_Y, N: int = DEFAULT_GRID, M: int = DEFAULT_MODES,
                     n_offset: int | None = None) -> FourierSpectrum:
    grid = lambda_line(spec, y, N, n_offset)
    c0, lam_hat = fourier_extract(grid, M)
    ratios = np.array([gamma_ratio(m, lam_hat[m - 1], y, spec.beta) for m in range(1, M + 1)])
    return FourierSpectrum(y=float(y), beta=spec.beta, lambda0=c0.real, lambda_hat=lam_hat,
                           ratios=ratios, grid_size=N, lambda0_imag=c0.imag)


def scan_shift(spec: ProblemSpec, candidates=SHIFT_CANDIDATES, N: int = DEFAULT_GRID, M: int = DEFAULT_MODES,
               rtol: float = 1e-6) -> FourierSpectrum:
    """Spectrum at the largest shift y that still gives finite, resolution-stable values.

    Stability: the first min(M, 5) modes at N and N/2 agree to ``rtol``.
    Only shifts above pi / (2 beta) are tried, as the Gamma factor would
    otherwise dominate the ratio.
    """
    floor = math.pi / (2 * spec.beta)
    best = None
    for y in sorted(candidates):
        if y <= floor:
            continue
        try:
            full = compute_spectrum(spec, y, N, M)
            half = compute_spectrum(spec, y, N // 2, M)
        except (BadShift, ZeroCoefficient):
            continue
        k = min(M, 5)
        a, b = full.lambda_hat[:k], half.lambda_hat[:k]
        if np.all(np.abs(a - b) <= rtol * np.maximum(np.abs(a), 1e-300)):
            best = full
    if best is None:
        raise BadShift(f"no stable shift among {tuple(candidates)}")
    return best
