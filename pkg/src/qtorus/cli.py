"""Command-line driver.

Exit codes: 0 success, 1 check failure, 2 input validation, 3 numeric or
truncation failure.  Default tolerances can be overridden through the
environment variables QTORUS_TOL, QTORUS_TAIL_TOL, QTORUS_ORDER and
QTORUS_FIX_TOL.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time

import numpy as np

from . import algebra as alg
from .siegel import NotSiegelError, SiegelPoint
from .symplectic import DimensionError, SymplecticMatrix, element_order, stabilizer_search
from .theta import (
    ThetaNearZeroError,
    TruncationError,
    TruncationParams,
    invariant_theta_sum,
    modular_ratio,
    theta_sum,
)
from .verify import SuiteConfig, run_suite

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


class InputError(ValueError):
    pass


def _env_float(name: str, default: float | None) -> float | None:
    raw = os.environ.get(name)
    return default if raw is None else float(raw)


def _parse_T(raw: str | None, n: int | None) -> SiegelPoint:
    if raw is None:
        return SiegelPoint(1j * np.eye(n or 1))
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InputError(f"--T is not valid JSON: {raw!r}") from exc
    try:
        T = SiegelPoint.from_json(data)
    except (ValueError, TypeError) as exc:
        raise InputError(str(exc)) from exc
    if n is not None and T.n != n:
        raise InputError(f"--T has size {T.n} but --n is {n}")
    return T


def _parse_complex_vector(raw: str, n: int) -> np.ndarray:
    parts = [p.strip() for p in raw.split(",") if p.strip()]
    try:
        if len(parts) == 2 * n:
            vals = [float(p) for p in parts]
            return np.array(vals[0::2]) + 1j * np.array(vals[1::2])
        if len(parts) == n:
            return np.array([complex(p.replace(" ", "")) for p in parts])
    except ValueError as exc:
        raise InputError(f"cannot parse complex vector {raw!r}") from exc
    raise InputError(f"expected {n} complex numbers or {2 * n} re,im values, got {raw!r}")


def _parse_real_pair(raw: str, n: int) -> tuple[np.ndarray, np.ndarray]:
    try:
        vals = [float(p) for p in raw.split(",") if p.strip()]
    except ValueError as exc:
        raise InputError(f"cannot parse coordinates {raw!r}") from exc
    if len(vals) != 2 * n:
        raise InputError(f"expected 2n = {2 * n} reals x1..., x2..., got {len(vals)}")
    return np.array(vals[:n]), np.array(vals[n:])


def _trunc(args) -> TruncationParams:
    return TruncationParams(radius=args.radius, tail_tolerance=args.tail_tol)


def _emit(obj: dict, fmt: str, out, human_extra: dict | None = None) -> None:
    if fmt == "json":
        out.write(json.dumps(obj, sort_keys=True) + "\n")
    elif fmt == "csv":
        flat = {k: (json.dumps(v) if isinstance(v, (list, dict)) else v) for k, v in obj.items()}
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=sorted(flat), lineterminator="\n")
        writer.writeheader()
        writer.writerow(flat)
        out.write(buf.getvalue())
    else:
        for k, v in {**obj, **(human_extra or {})}.items():
            out.write(f"{k}: {v}\n")


def _cx(v: complex) -> list[float]:
    return [float(v.real), float(v.imag)]


# --- verbs ---------------------------------------------------------------------


def cmd_theta(args, out) -> int:
    T = _parse_T(args.T, args.n)
    z = _parse_complex_vector(args.z, T.n) if args.z else np.zeros(T.n, dtype=complex)
    t0 = time.perf_counter()
    res = theta_sum(z, T, _trunc(args))
    elapsed = time.perf_counter() - t0
    obj = {"value": _cx(res.value), "truncation_bound": res.bound, "radius": res.radius, "terms": res.terms}
    _emit(obj, args.format, out, {"elapsed_s": f"{elapsed:.4f}"})
    return EXIT_OK


def cmd_invariant_theta(args, out) -> int:
    T = _parse_T(args.T, args.n)
    x1, x2 = _parse_real_pair(args.x, T.n) if args.x else (np.zeros(T.n), np.zeros(T.n))
    t0 = time.perf_counter()
    res = invariant_theta_sum(x1, x2, T, _trunc(args))
    elapsed = time.perf_counter() - t0
    obj = {"value": _cx(res.value), "truncation_bound": res.bound, "radius": res.radius, "terms": res.terms}
    _emit(obj, args.format, out, {"elapsed_s": f"{elapsed:.4f}"})
    return EXIT_OK


def cmd_modular_ratio(args, out) -> int:
    T = _parse_T(args.T, args.n)
    try:
        g = SymplecticMatrix(json.loads(args.g)) if args.g else SymplecticMatrix.J(T.n)
    except (ValueError, TypeError, json.JSONDecodeError) as exc:
        raise InputError(f"--g is not a symplectic integer matrix: {exc}") from exc
    if g.n != T.n:
        raise InputError("--g and --T have different n")
    z = _parse_complex_vector(args.z, T.n) if args.z else np.full(T.n, 0.3 + 0.1j)
    xi = modular_ratio(g, z, T, _trunc(args))
    obj = {"xi": _cx(xi), "abs_minus_1": abs(abs(xi) - 1), "xi8_minus_1": abs(xi**8 - 1), "g": g.to_json()}
    _emit(obj, args.format, out)
    return EXIT_OK


def cmd_qtheta(args, out) -> int:
    T = _parse_T(args.T, args.n)
    trunc = _trunc(args)
    r, bound = alg.quantum_theta_radius(T, trunc)
    qt = alg.quantum_theta(T, trunc)
    obj = {"T": T.to_json(), "radius": r, "truncation_bound": bound, "support": len(qt), "element": qt.to_json()}
    if args.format == "human":
        out.write(f"radius: {r}\ntruncation_bound: {bound}\nsupport: {len(qt)}\n")
        largest = sorted(qt.coeffs.items(), key=lambda wc: (-abs(wc[1]), wc[0]))
        for w, c in largest[: args.show]:
            out.write(f"  e({w.w1}, {w.w2}): {c.real:.12g}\n")
        return EXIT_OK
    _emit(obj, args.format, out)
    return EXIT_OK


def cmd_stabilizer(args, out) -> int:
    T = _parse_T(args.T, args.n)
    G = stabilizer_search(T, args.max_length, tol=args.fix_tol)
    qt = alg.quantum_theta(T, _trunc(args))
    elements = []
    for g in G:
        elements.append(
            {
                "g": g.to_json(),
                "order": element_order(g),
                "quantum_theta_invariant": alg.eps_action(g, qt).distance(qt) < 1e-12,
            }
        )
    orders = [e["order"] for e in elements]
    abelian = all(a @ b == b @ a for a in G for b in G)
    cyclic = len(G) in orders
    obj = {"T": T.to_json(), "group_order": len(G), "abelian": abelian, "cyclic": cyclic, "elements": elements}
    if args.format == "human":
        kind = f"cyclic Z/{len(G)}Z" if cyclic else ("abelian" if abelian else "nonabelian")
        out.write(f"stabilizer order {len(G)} ({kind})\n")
        for e in elements:
            out.write(f"  {e['g']} order={e['order']} qtheta_invariant={e['quantum_theta_invariant']}\n")
        return EXIT_OK
    _emit(obj, args.format, out)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    T = _parse_T(args.T, args.n) if args.T else None
    cfg = SuiteConfig(seed=args.seed, n=args.n, T=T, trunc=_trunc(args), order=args.order, tol=args.tol)
    failed = []
    rows = []
    for res in run_suite(args.suite, cfg):
        row = res.to_json()
        rows.append(row)
        if not res.passed:
            failed.append(res.check)
        if args.format == "json":
            out.write(json.dumps(row, sort_keys=True) + "\n")
            out.flush()
        elif args.format == "human":
            mark = "PASS" if res.passed else "FAIL"
            out.write(f"{mark} {res.check:<34} residual={res.residual:.3e} tol={res.tolerance:.1e}\n")
            out.flush()
    if args.format == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["check", "parameters", "residual", "tolerance", "pass"])
        for row in rows:
            writer.writerow([row["check"], json.dumps(row["parameters"], sort_keys=True), row["residual"], row["tolerance"], row["pass"]])
    summary = {"suite": args.suite, "checks": len(rows), "failed": failed}
    if args.format == "json":
        out.write(json.dumps({"summary": summary}, sort_keys=True) + "\n")
    elif args.format == "human":
        out.write(f"{len(rows) - len(failed)}/{len(rows)} checks passed\n")
    if failed:
        sys.stderr.write("failing checks: " + ", ".join(failed) + "\n")
        return EXIT_FAIL
    return EXIT_OK


# --- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    tail = _env_float("QTORUS_TAIL_TOL", 1e-14)
    tol = _env_float("QTORUS_TOL", None)
    order = os.environ.get("QTORUS_ORDER")
    fix_tol = _env_float("QTORUS_FIX_TOL", 1e-10)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=None, help="block size n")
    common.add_argument("--T", default=None, help="Siegel point as JSON rows of [re, im] pairs")
    common.add_argument("--radius", type=float, default=None, help="lattice-ball radius (default: automatic)")
    common.add_argument("--tail-tol", type=float, default=tail, help="truncation tail tolerance")
    common.add_argument("--format", choices=["json", "csv", "human"], default="human")

    parser = argparse.ArgumentParser(prog="qtorus", description="Theta functions and crossed products on quantum tori.")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("theta", parents=[common], help="classical theta function")
    p.add_argument("--z", default=None, help="z as re,im pairs or complex literals")
    p.set_defaults(func=cmd_theta)

    p = sub.add_parser("invariant-theta", parents=[common], help="symplectically invariant theta")
    p.add_argument("--x", default=None, help="x1..., x2... as 2n reals")
    p.set_defaults(func=cmd_invariant_theta)

    p = sub.add_parser("modular-ratio", parents=[common], help="eighth-root factor of the modular law")
    p.add_argument("--g", default=None, help="symplectic matrix as JSON integer rows (default J)")
    p.add_argument("--z", default=None)
    p.set_defaults(func=cmd_modular_ratio)

    p = sub.add_parser("qtheta", parents=[common], help="quantum theta coefficients")
    p.add_argument("--show", type=int, default=10, help="largest coefficients listed in human format")
    p.set_defaults(func=cmd_qtheta)

    p = sub.add_parser("stabilizer", parents=[common], help="stabilizer subgroup of T")
    p.add_argument("--max-length", type=int, default=4)
    p.add_argument("--fix-tol", type=float, default=fix_tol)
    p.set_defaults(func=cmd_stabilizer)

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("--suite", choices=["classical", "quantum", "crossed", "all"], default="all")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=tol, help="override every residual tolerance")
    p.add_argument("--order", type=int, default=None if order is None else int(order), help="quadrature points per axis")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    for name in ("tail_tol", "tol", "fix_tol"):
        val = getattr(args, name, None)
        if val is not None and val <= 0:
            sys.stderr.write(f"error: --{name.replace('_', '-')} must be positive\n")
            return EXIT_INPUT
    try:
        return args.func(args, out)
    except (InputError, NotSiegelError, DimensionError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except (TruncationError, ThetaNearZeroError, np.linalg.LinAlgError) as exc:
        sys.stderr.write(f"numeric error: {exc}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
