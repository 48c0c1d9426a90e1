"""Command line front end.

    funceq --spec tree23.txt --command analyze
    funceq --spec tree23.txt --command spectrum --out spectrum.csv
    funceq --spec tree23.txt --command compare --n-max 10000 --out fig2.csv

Spec files are ``key = value`` lines: ``P`` and ``Q`` as comma separated
coefficients lowest degree first, optional ``bracket = lo, hi`` for the
fixed point search. ``#`` starts a comment.

Exit codes: 0 success, 2 invalid spec or arguments, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .conjugacy import schroder_derivatives
from .errors import NumericalError, SpecError
from .expansion import DEFAULT_TERMS, K_eval, asymptotic_terms, build_expansion
from .oracle import exact_coefficients
from .polynomial import Polynomial
from .problem import ProblemSpec, validate_spec
from .spectrum import DEFAULT_GRID, DEFAULT_MODES, DEFAULT_Y, compute_spectrum

COMMANDS = ("analyze", "spectrum", "kfuncs", "exact", "compare")
KFUNC_SAMPLES = 512

EXIT_OK = 0
EXIT_SPEC = 2
EXIT_NUMERIC = 3


class StageError(Exception):
    def __init__(self, stage: str, exc: Exception):
        super().__init__(f"{stage}: {exc}")
        self.stage = stage
        self.exc = exc


@dataclass
class RunConfig:
    spec_path: Path
    command: str
    y: float = DEFAULT_Y
    grid_N: int = DEFAULT_GRID
    modes_M: int = DEFAULT_MODES
    terms_R: int = DEFAULT_TERMS
    n_max: int = 10000
    out_path: Path | None = None

    def check(self) -> None:
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}; choose from {', '.join(COMMANDS)}")
        if self.grid_N <= 0 or self.grid_N & (self.grid_N - 1):
            raise ValueError(f"--grid-n must be a power of two, got {self.grid_N}")
        if not 1 <= self.modes_M <= self.grid_N // 4:
            raise ValueError(f"--modes must be in [1, grid_n/4], got {self.modes_M}")
        if self.terms_R < 1:
            raise ValueError("--terms must be >= 1")
        if self.n_max < 1:
            raise ValueError("--n-max must be >= 1")


def parse_spec_text(text: str) -> ProblemSpec:
    fields: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        fields[key.lower()] = value
    missing = {"p", "q"} - fields.keys()
    if missing:
        raise ValueError(f"spec file lacks {', '.join(sorted(k.upper() for k in missing))}")
    bracket = None
    if "bracket" in fields:
        lo, hi = (float(s) for s in fields["bracket"].split(","))
        bracket = (lo, hi)
    return ProblemSpec.build(Polynomial.parse(fields["p"]), Polynomial.parse(fields["q"]), bracket, strict=False)


def load_spec(path: Path) -> ProblemSpec:
    return parse_spec_text(Path(path).read_text())


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def _csv(header: list[str], rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(r if isinstance(r, str) else _fmt(r) for r in row))
    return "\n".join(lines) + "\n"


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (SpecError, NumericalError, ValueError) as exc:
        raise StageError(name, exc) from exc


def _require_valid(spec: ProblemSpec) -> None:
    diags = validate_spec(spec)
    if diags:
        raise StageError("validate", SpecError("; ".join(str(d) for d in diags)))


def cmd_analyze(spec: ProblemSpec, cfg: RunConfig) -> str:
    _require_valid(spec)
    psi2 = _stage("conjugacy", schroder_derivatives, spec, 2)[0]
    rows = [
        ("q", spec.q),
        ("alpha", spec.alpha),
        ("beta", spec.beta),
        ("Q'(q)", spec.multiplier),
        ("Psi''(q)", psi2),
    ]
    return "".join(f"{k} = {v:.16g}\n" for k, v in rows)


def cmd_spectrum(spec: ProblemSpec, cfg: RunConfig) -> str:
    _require_valid(spec)
    sp = _stage("spectrum", compute_spectrum, spec, cfg.y, cfg.grid_N, cfg.modes_M)
    return sp.to_csv()


def _expansion(spec: ProblemSpec, cfg: RunConfig):
    sp = _stage("spectrum", compute_spectrum, spec, cfg.y, cfg.grid_N, cfg.modes_M)
    return _stage("expansion", build_expansion, spec, sp, cfg.terms_R)


def cmd_kfuncs(spec: ProblemSpec, cfg: RunConfig) -> str:
    _require_valid(spec)
    table = _expansion(spec, cfg)
    x = np.arange(KFUNC_SAMPLES) / KFUNC_SAMPLES
    cols = [K_eval(r, x, table) for r in range(1, cfg.terms_R + 1)]
    header = ["x"] + [f"K{r}" for r in range(1, cfg.terms_R + 1)]
    return _csv(header, zip(x, *cols))


def cmd_exact(spec: ProblemSpec, cfg: RunConfig) -> str:
    table = _stage("oracle", exact_coefficients, spec, cfg.n_max)
    return table.to_csv()


def cmd_compare(spec: ProblemSpec, cfg: RunConfig) -> str:
    _require_valid(spec)
    table = _expansion(spec, cfg)
    exact = _stage("oracle", exact_coefficients, spec, cfg.n_max).normalized
    R = cfg.terms_R
    n = np.arange(1, cfg.n_max + 1)
    est = asymptotic_terms(n, R, table).partial_sums
    # residual of the R-term estimate scaled by n^R
    resid = np.array([(exact - est[r]) * n.astype(float) ** (r + 1) for r in range(R)])
    header = (["n", "exact"] + [f"est_R{r}" for r in range(1, R + 1)]
              + [f"scaled_resid_R{r}" for r in range(1, R + 1)])
    rows = ([str(k), exact[k - 1]] + list(est[:, k - 1]) + list(resid[:, k - 1]) for k in n)
    return _csv(header, rows)


HANDLERS = {
    "analyze": cmd_analyze,
    "spectrum": cmd_spectrum,
    "kfuncs": cmd_kfuncs,
    "exact": cmd_exact,
    "compare": cmd_compare,
}


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        cfg.check()
        spec = _stage("parse", load_spec, cfg.spec_path)
        text = HANDLERS[cfg.command](spec, cfg)
    except StageError as err:
        print(f"error [{err.stage}]: {err.exc}", file=stderr)
        return EXIT_NUMERIC if isinstance(err.exc, NumericalError) else EXIT_SPEC
    except (ValueError, OSError) as exc:
        print(f"error [config]: {exc}", file=stderr)
        return EXIT_SPEC
    if cfg.out_path is not None:
        Path(cfg.out_path).write_text(text)
    if cfg.out_path is None or cfg.command == "analyze":
        stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="funceq", description=__doc__.split("\n\n")[0])
    p.add_argument("--spec", required=True, type=Path, help="spec file (P = ..., Q = ..., optional bracket = ...)")
    p.add_argument("--command", required=True, choices=COMMANDS)
    p.add_argument("--y", type=float, default=DEFAULT_Y, help="line shift for the Fourier sampling")
    p.add_argument("--grid-n", type=int, default=DEFAULT_GRID, help="FFT grid size (power of two)")
    p.add_argument("--modes", type=int, default=DEFAULT_MODES, help="Fourier modes kept")
    p.add_argument("--terms", type=int, default=DEFAULT_TERMS, help="asymptotic terms K_1..K_R")
    p.add_argument("--n-max", type=int, default=10000, help="largest n for exact/compare")
    p.add_argument("--out", type=Path, default=None, help="output file (default stdout)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(spec_path=args.spec, command=args.command, y=args.y, grid_N=args.grid_n,
                    modes_M=args.modes, terms_R=args.terms, n_max=args.n_max, out_path=args.out)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
