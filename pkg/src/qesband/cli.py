"""Command-line front end: ``qesband {solve,verify,classify,sample}``.

Exit status is 0 on success, 1 on a usage error and 2 when a validation
step fails (critical point, root-count mismatch, failed verification...).
JSON output has sorted keys, floats with 17 significant digits and exact
rationals as "p/q" strings, so identical runs give identical bytes.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from qesband import bdpoly
from qesband import eigenfunctions as ef
from qesband import oracle
from qesband.elliptic import Modulus, as_number
from qesband.errors import QESError, ValidationError
from qesband.potentials import (AssociatedLame, CotFamily, PotentialSpec, TanFamily,
                                classify, eval_potential)
from qesband.spectra import BandEdgeSpectrum, solve_spec

DEFAULT_GRID_N = 2048
GRID_ENV = "QES_SEED_GRID_N"
FAMILIES = ("associated-lame", "tan", "cot")


# ------------------------------------------------------------- formatting


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return json.dumps(str(x))
    return format(x, ".17g")


def dumps(obj, indent: int = 0) -> str:
    """Deterministic JSON text."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, Fraction):
        return json.dumps(f"{obj.numerator}/{obj.denominator}" if obj.denominator != 1
                          else str(obj.numerator))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(obj[k], indent + 1)}"
                 for k in sorted(obj, key=str)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        return "[\n" + ",\n".join(pad + dumps(v, indent + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _num(value):
    """Exact values as Fractions, everything else as float."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, complex):
        return float(value.real) if value.imag == 0 else [float(value.real), float(value.imag)]
    return float(value)


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".qesband-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ----------------------------------------------------------------- config


@dataclass
class RunConfig:
    command: str
    family: Optional[str] = None
    m: object = None
    l: object = None
    n: Optional[int] = None
    k2: object = None
    root_tol: float = 1e-12
    residual_tol: float = 1e-3
    oracle_tol: float = 1e-3
    grid_n: int = DEFAULT_GRID_N
    points: int = 401
    fmt: str = "json"
    out: Optional[str] = None
    verify: bool = True
    warnings: list = field(default_factory=list)

    def spec(self) -> PotentialSpec:
        modulus = Modulus(self.k2)
        if self.family == "associated-lame":
            return PotentialSpec(AssociatedLame(self.m, self.l), modulus)
        if self.family == "tan":
            return PotentialSpec(TanFamily(self.n), modulus)
        return PotentialSpec(CotFamily(self.n), modulus)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qesband", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def family_args(p, need_k2=True):
        p.add_argument("--family", choices=FAMILIES, required=True)
        p.add_argument("--m", help="first associated Lame parameter (p/q or decimal)")
        p.add_argument("--l", help="second associated Lame parameter")
        p.add_argument("--n", type=int, help="spin of the tan and cot families")
        p.add_argument("--k2", required=need_k2, help="elliptic parameter k^2 in (0, 1)")
        p.add_argument("--grid-n", type=int, default=None,
                       help=f"oracle grid per period (default ${GRID_ENV} or {DEFAULT_GRID_N})")
        p.add_argument("--residual-tol", type=_positive, default=1e-3)
        p.add_argument("--oracle-tol", type=_positive, default=1e-3)
        p.add_argument("--root-tol", type=_positive, default=1e-12)
        p.add_argument("--out", help="output file (default: standard output)")

    solve = sub.add_parser("solve", help="band-edge energies and recursion data")
    family_args(solve)
    solve.add_argument("--no-verify", action="store_true", help="skip the embedded verify stage")
    verify = sub.add_parser("verify", help="residual and Hill-oracle comparison")
    family_args(verify)
    cls = sub.add_parser("classify", help="algebraic lines through (m, l)")
    cls.add_argument("--m", required=True)
    cls.add_argument("--l", required=True)
    cls.add_argument("--out")
    sample = sub.add_parser("sample", help="potential and eigenfunctions on a grid")
    family_args(sample)
    sample.add_argument("--points", type=int, default=401)
    sample.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
    return parser


def _config(args, parser) -> RunConfig:
    cfg = RunConfig(args.command, out=getattr(args, "out", None))
    try:
        if args.command == "classify":
            cfg.m, cfg.l = as_number(args.m), as_number(args.l)
            return cfg
        cfg.family = args.family
        if args.family == "associated-lame":
            if args.m is None or args.l is None:
                parser.error("associated-lame needs --m and --l")
            cfg.m, cfg.l = as_number(args.m), as_number(args.l)
        else:
            if args.n is None:
                parser.error(f"{args.family} needs --n")
            cfg.n = args.n
        cfg.k2 = as_number(args.k2)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        parser.error(str(exc))
    if not isinstance(cfg.k2, Fraction) or any(isinstance(v, float) for v in (cfg.m, cfg.l)):
        cfg.warnings.append("decimal input: exact rational arithmetic disabled, results are floating point")
    grid = args.grid_n if args.grid_n is not None else int(os.environ.get(GRID_ENV, DEFAULT_GRID_N))
    if grid < oracle.MIN_POINTS:
        parser.error(f"grid size must be at least {oracle.MIN_POINTS}")
    cfg.grid_n = grid
    cfg.residual_tol, cfg.oracle_tol, cfg.root_tol = args.residual_tol, args.oracle_tol, args.root_tol
    cfg.verify = not getattr(args, "no_verify", False)
    cfg.points = getattr(args, "points", cfg.points)
    cfg.fmt = getattr(args, "fmt", "json")
    return cfg


# ---------------------------------------------------------------- reports


def _spec_json(cfg: RunConfig) -> dict:
    out = {"family": cfg.family, "k2": _num(cfg.k2)}
    if cfg.family == "associated-lame":
        out.update(m=_num(cfg.m), l=_num(cfg.l))
    else:
        out["n"] = cfg.n
    return out


def _cases_json(spectrum: BandEdgeSpectrum) -> list:
    cases = []
    for cr in spectrum.cases:
        b = cr.bundle
        cases.append({
            "case_id": cr.case.case_id,
            "n": cr.case.n,
            "lambda": [_num(v) for v in b.lam[: b.n + 1]],
            "rho": [_num(v) for v in b.rho[: b.n + 2]],
            "critical_poly": [_num(v) for v in b.monic_coeffs],
        })
    return cases


def _energies_json(spectrum: BandEdgeSpectrum) -> list:
    out = []
    for e in spectrum.entries:
        item = {"value": e.energy, "degeneracy": e.degeneracy, "sources": list(e.source_cases)}
        if e.exact is not None:
            item["exact"] = e.exact
        out.append(item)
    return out


def _natural_grid(spec: PotentialSpec, desc) -> tuple[float, float]:
    if spec.singular:
        return spec.domain()
    return -spec.K, spec.K


def verification(spec: PotentialSpec, spectrum: BandEdgeSpectrum, cfg: RunConfig) -> tuple[dict, bool, BandEdgeSpectrum]:
    """Residuals, independence demotion and Hill-oracle matching."""
    ok = True
    cases = [cr.case for cr in spectrum.cases]
    if any(e.degeneracy == 2 for e in spectrum.entries):
        spectrum = solve_spec(spec, demote=ef.independence_hook(cases))
    newton_steps = []
    for cr in spectrum.cases:
        for root in cr.roots:
            p, dp = bdpoly.monic_value_and_derivative(cr.bundle, float(root))
            step = abs(p / dp) if dp else math.inf
            newton_steps.append(step / max(1.0, abs(float(root))))
    root_step = max(newton_steps, default=0.0)
    ok &= root_step <= cfg.root_tol
    residuals = []
    descs = ef.primary_descriptors(spectrum)
    for desc in descs:
        a, b = _natural_grid(spec, desc)
        r1 = oracle.residual_norm(spec, desc.energy, oracle.sample(desc, a, b, cfg.grid_n))
        r2 = oracle.residual_norm(spec, desc.energy, oracle.sample(desc, a, b, 2 * cfg.grid_n))
        order = oracle.observed_order(r1, r2)
        passed = r2 <= cfg.residual_tol and (order >= 1.9 or r2 <= 1e-12)
        ok &= passed
        residuals.append({"energy": desc.energy, "case_id": desc.case_id, "residual": r2,
                          "residual_coarse": r1, "order": order if math.isfinite(order) else "inf",
                          "passed": passed})
    upper = float(max(spectrum.energies)) + 1.0
    levels: dict = {}
    targets = []
    if spec.singular:
        problem = oracle.hill_problem(spec, N=cfg.grid_n)
        levels["dirichlet"] = oracle.band_edges_numeric(problem, upper=upper)
        targets = [(e.energy, e.degeneracy, "dirichlet") for e in spectrum.entries]
    else:
        for entry, desc in zip(spectrum.entries, descs):
            bc = oracle.classify_multiplier(ef.floquet_multiplier(desc))
            targets.append((entry.energy, entry.degeneracy, bc))
        for bc in sorted({t[2] for t in targets}):
            problem = oracle.hill_problem(spec, bc, N=cfg.grid_n)
            levels[bc] = oracle.band_edges_numeric(problem, upper=upper)
    matches = oracle.match_levels(targets, levels, cfg.oracle_tol)
    mismatch = max((m.error for m in matches), default=0.0)
    ok &= mismatch <= cfg.oracle_tol
    report = {
        "residuals": residuals,
        "oracle_levels": [{"energy": m.energy, "degeneracy": m.degeneracy, "condition": m.condition,
                           "levels": list(m.levels), "error": m.error} for m in matches],
        "max_mismatch": mismatch,
        "max_newton_step": root_step,
        "grid_n": cfg.grid_n,
        "passed": ok,
    }
    return report, ok, spectrum


def run_solve(cfg: RunConfig) -> tuple[dict, int]:
    spec = cfg.spec()
    spectrum = solve_spec(spec)
    status = 0
    result = {"spec": _spec_json(cfg), "cases": _cases_json(spectrum)}
    if cfg.verify:
        report, ok, spectrum = verification(spec, spectrum, cfg)
        result["verification"] = report
        status = 0 if ok else 2
    result["energies"] = _energies_json(spectrum)
    if spectrum.notes:
        result["notes"] = list(spectrum.notes)
    if cfg.warnings:
        result["warnings"] = cfg.warnings
    return result, status


def run_verify(cfg: RunConfig) -> tuple[dict, int]:
    cfg.verify = True
    result, status = run_solve(cfg)
    return {"spec": result["spec"], "energies": result["energies"],
            "verification": result["verification"],
            **({"warnings": cfg.warnings} if cfg.warnings else {})}, status


def run_classify(cfg: RunConfig) -> tuple[dict, int]:
    info = classify(cfg.m, cfg.l)
    result = {
        "input": {"m": _num(cfg.m), "l": _num(cfg.l)},
        "canonical_point": {"m": _num(info.canonical_point[0]), "l": _num(info.canonical_point[1])},
        "lines": [{"system": ln.system, "n": ln.n, "case_ids": list(ln.case_ids)} for ln in info.lines],
        "is_critical": info.is_critical,
    }
    if info.is_critical:
        result["report"] = "critical point: no algebraic line passes through (m, l)"
        return result, 2
    return result, 0


def sample_table(cfg: RunConfig) -> tuple[list, list]:
    spec = cfg.spec()
    spectrum = solve_spec(spec)
    descs = ef.primary_descriptors(spectrum)
    a, b = spec.domain()
    if spec.singular:
        g = oracle.GUARD * spec.K
        x = np.linspace(a + g, b - g, cfg.points)
    else:
        x = np.linspace(a, b, cfg.points)
    header = ["x", "V(x)"]
    columns = [x, eval_potential(spec, x)]
    for entry, desc in zip(spectrum.entries, descs):
        vals = ef.assemble(desc, x)
        label = f"E={_fmt_float(entry.energy)}"
        header.append(label)
        columns.append(vals.real)
        if entry.degeneracy == 2:
            header.append(label + ":im")
            columns.append(vals.imag)
    return header, columns


def run_sample(cfg: RunConfig) -> tuple[str, int]:
    header, columns = sample_table(cfg)
    if cfg.fmt == "json":
        return dumps({"columns": header, "rows": np.column_stack(columns).tolist()}) + "\n", 0
    lines = [",".join(header)]
    for row in np.column_stack(columns):
        lines.append(",".join(_fmt_float(float(v)) for v in row))
    return "\n".join(lines) + "\n", 0


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


_VALUE_FLAGS = ("--m", "--l", "--k2", "--n")


def _join_negative_values(argv: Sequence[str]) -> list:
    """Rewrite ``--m -1/2`` as ``--m=-1/2`` so argparse does not read a flag."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1][:1] == "-" \
                and argv[i + 1][1:2].isdigit():
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(_join_negative_values(argv))
    cfg = _config(args, parser)
    try:
        if cfg.command == "sample":
            text, status = run_sample(cfg)
            _emit(text, cfg.out)
            return status
        handler = {"solve": run_solve, "verify": run_verify, "classify": run_classify}[cfg.command]
        result, status = handler(cfg)
    except ValidationError as exc:
        sys.stderr.write(f"qesband: {type(exc).__name__}: {exc}\n")
        return 2
    except QESError as exc:
        sys.stderr.write(f"qesband: {type(exc).__name__}: {exc}\n")
        return 1
    _emit(dumps(result) + "\n", cfg.out)
    if cfg.command == "classify" and status == 2:
        sys.stderr.write("qesband: critical point\n")
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
