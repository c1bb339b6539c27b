"""Command-line interface: every computation as a deterministic JSON report.

Exit status is 0 on success, 2 for invalid parameters (message on stderr, no
report) and 3 for numerical failures (overflow, non-convergence).
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import fock, matrix_elements, polynomials, spectra, su2, xrep
from .core import derive_frame, energy_level, q_number
from .errors import ConvergenceError, DomainError

SCHEMA_VERSION = "1.0"
COMMANDS = ("frame", "spectrum", "operators", "selfadjoint", "polys",
            "matelem", "su2", "xrep", "sweep")


class UsageError(DomainError):
    pass


# -- serialization -------------------------------------------------------------

def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def _escape(s: str) -> str:
    out = ['"']
    for ch in s:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def to_json(obj) -> str:
    """Compact JSON with key order preserved and floats at 17 significant digits."""
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return to_json({"re": obj.real, "im": obj.imag})
    if isinstance(obj, str):
        return _escape(obj)
    if isinstance(obj, dict):
        return "{" + ",".join(f"{_escape(str(k))}:{to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, np.ndarray):
        return to_json(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(to_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def envelope(command: str, parameters: dict, results, warnings: list[str]) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "parameters": parameters,
        "results": results,
        "warnings": warnings,
    }


def _matrix_payload(a: np.ndarray) -> dict:
    return {"re": a.real.tolist(), "im": a.imag.tolist()}


# -- parameter handling --------------------------------------------------------

def _frame_from(args):
    if args.alpha is None or args.beta is None:
        raise UsageError(f"{args.command} needs --alpha and --beta")
    return derive_frame(args.alpha, args.beta)


def _q_from(args):
    """``(q, frame_or_None)`` for commands that accept ``--q``."""
    if args.q is not None:
        if args.alpha is not None or args.beta is not None:
            raise UsageError("--q is mutually exclusive with --alpha/--beta")
        if not args.q >= 1.0:
            raise DomainError("q must be >= 1")
        return args.q, None
    frame = _frame_from(args)
    return frame.q, frame


def _deformation_params(args, q, frame) -> dict:
    if frame is None:
        return {"q": q}
    return {"alpha": frame.alpha, "beta": frame.beta}


# -- subcommands ---------------------------------------------------------------

def cmd_frame(args):
    f = _frame_from(args)
    params = {"alpha": f.alpha, "beta": f.beta}
    results = {
        "q": f.q,
        "m_alpha": f.m_alpha,
        "m_beta": f.m_beta,
        "sqrt_alpha_beta": f.sqrt_ab,
        "product_identity_residual": f.m_alpha * f.m_beta / (1 - f.sqrt_ab) - 2.0,
    }
    return params, results, []


def cmd_spectrum(args):
    q, frame = _q_from(args)
    levels = args.levels
    if levels < 0:
        raise DomainError("--levels must be >= 0")
    dim = args.dim if args.dim is not None else 2 * levels + 4
    if dim < 2:
        raise DomainError("--dim must be >= 2")
    warnings = []
    energies = [energy_level(n, q) for n in range(levels + 1)]
    h = fock.build_hamiltonian(q, dim).entries.real
    diag = np.sort(np.linalg.eigvalsh(h))
    half = [0.5 * v for v in diag[: levels + 1]]
    if len(half) < levels + 1 or q_number(dim - 1, q) <= 2 * energies[-1]:
        warnings.append("truncation too small: cutoff eigenvalue mixes with requested levels")
    deltas = [hv - e for hv, e in zip(half, energies)]
    params = _deformation_params(args, q, frame) | {"levels": levels, "dim": dim}
    results = {
        "q": q,
        "energies": energies,
        "truncated_half_eigenvalues": half,
        "cross_check_deltas": deltas,
    }
    if frame is not None:
        quad = spectra.quadrature_spectrum(frame, dim)[: levels + 1]
        results["quadrature_eigenvalues"] = quad
        warnings.append("quadrature_eigenvalues are spectra of (m_a^2 x^2 + m_b^2 p^2)/2 "
                        "= b b+ + b+ b, i.e. 2 E_n")
    return params, results, warnings


_MATRIX_NAMES = ("annihilator", "creator", "position", "momentum", "hamiltonian")


def cmd_operators(args):
    frame = _frame_from(args)
    n = args.dim
    if n < 4:
        raise DomainError("--dim must be >= 4")
    names = args.matrix or ["position", "momentum"]
    b, bd = fock.build_ladder(n, frame.q)
    built = {
        "annihilator": lambda: b,
        "creator": lambda: bd,
        "position": lambda: fock.build_position(frame, n),
        "momentum": lambda: fock.build_momentum(frame, n),
        "hamiltonian": lambda: fock.build_hamiltonian(frame.q, n),
    }
    matrices = {name: _matrix_payload(built[name]().entries) for name in names}
    comm = fock.commutator_residual(frame.q, n)
    theta = fock.theta_identity_residual(frame, n)
    params = {"alpha": frame.alpha, "beta": frame.beta, "dim": n, "matrices": names}
    results = {
        "q": frame.q,
        "matrices": matrices,
        "commutator_interior_max": fock.interior_max(comm, n - 2),
        "commutator_cutoff_entry": comm.entries[n - 1, n - 1].real,
        "theta_identity_interior_max": fock.interior_max(theta, n - 3),
    }
    return params, results, []


def cmd_selfadjoint(args):
    frame = _frame_from(args)
    z = complex(args.probe_re, args.probe_im)
    rep = spectra.deficiency_diagnostics(frame, args.terms, z)
    params = {"alpha": frame.alpha, "beta": frame.beta, "terms": args.terms,
              "probe_re": args.probe_re, "probe_im": args.probe_im}
    results = {
        "q": rep.q,
        "partial_sums": rep.partial_sums,
        "ratio_estimates": rep.ratio_estimates,
        "ratio_limit_target": rep.ratio_limit_target,
        "log_concavity_ok": rep.log_concavity_ok,
        "concavity_log_margin_max": float(np.max(rep.concavity_log_margin)),
        "deficiency_vector_norms": rep.deficiency_vector_norms,
        "increment_ratio_fit": rep.increment_ratio_fit,
        "two_step_increment_ratio": rep.two_step_increment_ratio,
        "unbounded_index": rep.unbounded_index,
    }
    return params, results, []


def _parse_points(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"bad --at list {text!r}") from exc


def cmd_polys(args):
    q, frame = _q_from(args)
    family = polynomials.Family(args.family)
    n = args.degree
    if n < 0:
        raise DomainError("--degree must be >= 0")
    poly = polynomials.RecurrencePolynomial(family, n, q, frame)
    points = _parse_points(args.at)
    warnings = []
    results = {
        "q": q,
        "evaluations": [{"arg": x, "value": complex(poly(x))} for x in points],
        "coefficients": poly.coefficients().astype(complex),
    }
    if family is polynomials.Family.P and n >= 1:
        results["zeros"] = poly.zeros()
    else:
        results["zeros"] = None
        if family is not polynomials.Family.P:
            warnings.append("zeros are reported for the P family only")
    if family is polynomials.Family.HERMITE_X and frame is not None:
        results["bridge"] = [
            dict(zip(("x", "lhs", "rhs"), (x, *polynomials.relate_P_to_H(n, x, frame))))
            for x in points
        ]
    params = _deformation_params(args, q, frame) | {
        "family": family.value, "degree": n, "at": points}
    return params, results, warnings


_KINDS = {"normal": "normal_word", "antinormal": "antinormal_word", "xp": "normal_ordered_xp"}


def cmd_matelem(args):
    kind = _KINDS[args.kind]
    if kind == "normal_ordered_xp":
        frame = _frame_from(args)
        q = frame.q
    else:
        q, frame = _q_from(args)
    l, r, n = args.l, args.r, args.n
    if kind == "normal_word":
        m = n - r + l if args.m is None else args.m
    elif kind == "antinormal_word":
        m = n + l - r if args.m is None else args.m
    else:
        if args.m is None:
            raise UsageError("--kind xp needs --m")
        m = args.m
    if min(l, r, n, m) < 0:
        raise DomainError("l, r, m, n must be >= 0")
    res = matrix_elements.evaluate(matrix_elements.MatrixElementQuery(kind, l, r, m, n), q, frame)
    params = _deformation_params(args, q, frame) | {
        "kind": args.kind, "l": l, "r": r, "m": m, "n": n}
    results = {
        "q": q,
        "closed_form": res.closed_form,
        "oracle": res.oracle,
        "abs_delta": res.abs_delta,
    }
    return params, results, []


def cmd_su2(args):
    if args.alpha is None:
        raise UsageError("su2 needs --alpha (grid step)")
    rep = su2.build_representation(args.j, args.alpha)
    rows = []
    for m in rep.m_values:
        c_plus, c_minus = su2.ladder_coefficients(args.j, m, args.alpha)
        formula, route = su2.hamiltonian_eigenvalue_formula(args.j, m, args.alpha)
        rows.append({
            "m": m, "c_plus": c_plus, "c_minus": c_minus,
            "energy_formula": formula, "energy_casimir_route": route,
            "j2_formula": su2.j2_eigenvalue_formula(args.j, m, args.alpha),
        })
    results = {
        "m_values": rep.m_values,
        "residuals": rep.residuals,
        "commutator_diagonal": np.diag(rep.commutator),
        "formulas": rows,
    }
    warnings = [
        "residual jplus_jminus tests [J+,J-] = 2 alpha^-2 Theta, which the ladder "
        "coefficients do not satisfy; [J+,J-] = 2 alpha Theta holds instead",
    ]
    return {"j": args.j, "alpha": args.alpha}, results, warnings


_KERNEL_ALPHAS = (1e-2, 1e-3, 1e-4)
_KERNEL_POINTS = tuple(itertools.product((-1.0, 0.5, 1.0, 2.0), (-2.0, 0.5, 1.0, 1.5)))


def cmd_xrep(args):
    if args.alpha is None or args.alpha < 0:
        raise DomainError("xrep needs --alpha >= 0")
    if args.points < 8 or args.refinements < 0:
        raise DomainError("--points must be >= 8 and --refinements >= 0")
    study = xrep.refinement_study(args.alpha, args.extent, args.points, args.refinements)
    table = []
    for k, (npts, res) in enumerate(study):
        prev = study[k - 1][1] if k else None
        ratio = prev / res if prev is not None and res > 0 else None
        table.append({"points": npts, "h": 2 * args.extent / (npts - 1),
                      "residual": res, "ratio_to_previous": ratio})
    kernel = [{"alpha": a, "max_error": e, "error_over_alpha": e / a}
              for a, e in xrep.fourier_limit_errors(_KERNEL_ALPHAS, _KERNEL_POINTS)]
    params = {"alpha": args.alpha, "extent": args.extent, "points": args.points,
              "refinements": args.refinements}
    warnings = ["the p-space mirror (x = i theta d/dp) is the same construction "
                "with x and p exchanged"]
    return params, {"hermiticity": table, "kernel_limit": kernel}, warnings


HANDLERS = {
    "frame": cmd_frame,
    "spectrum": cmd_spectrum,
    "operators": cmd_operators,
    "selfadjoint": cmd_selfadjoint,
    "polys": cmd_polys,
    "matelem": cmd_matelem,
    "su2": cmd_su2,
    "xrep": cmd_xrep,
}


# -- parser --------------------------------------------------------------------

def _add_deformation(p, with_q=False):
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    if with_q:
        p.add_argument("--q", type=float, help="use q directly (excludes --alpha/--beta)")
    else:
        p.set_defaults(q=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qdeform", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("frame", help="derived q-realization parameters")
    _add_deformation(p)

    p = sub.add_parser("spectrum", help="energy levels with truncated-matrix cross-check")
    _add_deformation(p, with_q=True)
    p.add_argument("--levels", type=int, default=5)
    p.add_argument("--dim", type=int)

    p = sub.add_parser("operators", help="truncated matrices and identity residuals")
    _add_deformation(p)
    p.add_argument("--dim", type=int, default=6)
    p.add_argument("--matrix", action="append", choices=_MATRIX_NAMES)

    p = sub.add_parser("selfadjoint", help="deficiency diagnostics")
    _add_deformation(p)
    p.add_argument("--terms", type=int, default=200)
    p.add_argument("--probe-re", type=float, default=0.0)
    p.add_argument("--probe-im", type=float, default=1.0)

    p = sub.add_parser("polys", help="deformed polynomial families")
    _add_deformation(p, with_q=True)
    p.add_argument("--family", choices=[f.value for f in polynomials.Family], default="P")
    p.add_argument("--degree", type=int, default=4)
    p.add_argument("--at", default="0.5", help="comma-separated evaluation points")

    p = sub.add_parser("matelem", help="closed-form matrix elements with oracle deltas")
    _add_deformation(p, with_q=True)
    p.add_argument("--kind", choices=tuple(_KINDS), default="normal")
    p.add_argument("--l", type=int, default=1)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--m", type=int)

    p = sub.add_parser("su2", help="m-grid representation and residual report")
    p.add_argument("--j", type=float, default=1.0)
    p.add_argument("--alpha", type=float)

    p = sub.add_parser("xrep", help="x-space Hermiticity and kernel-limit tables")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--extent", type=float, default=10.0)
    p.add_argument("--points", type=int, default=401)
    p.add_argument("--refinements", type=int, default=3)

    p = sub.add_parser("sweep", help="map a subcommand over a parameter grid")
    p.add_argument("target", choices=tuple(HANDLERS))
    p.add_argument("--grid", action="append", required=True, metavar="NAME=MIN:MAX:POINTS")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--workers", type=int, default=1)
    return parser


# -- execution -----------------------------------------------------------------

def _parse_grid(text: str) -> tuple[str, list[float]]:
    try:
        name, rng = text.split("=", 1)
        lo, hi, pts = rng.split(":")
        lo, hi, pts = float(lo), float(hi), int(pts)
    except ValueError as exc:
        raise UsageError(f"bad --grid {text!r}; expected NAME=MIN:MAX:POINTS") from exc
    if pts < 1:
        raise UsageError("grid needs at least one point")
    values = [lo] if pts == 1 else [float(v) for v in np.linspace(lo, hi, pts)]
    return name.strip().replace("_", "-"), values


def _run_point(parser, argv: list[str]) -> dict:
    args = parser.parse_args(argv)
    try:
        params, results, warnings = HANDLERS[args.command](args)
    except (DomainError, OverflowError, ConvergenceError) as exc:
        params = {a: getattr(args, a) for a in sorted(vars(args)) if a != "command"}
        return envelope(args.command, params, None, [f"error: {exc}"])
    return envelope(args.command, params, results, warnings)


def _flatten(prefix: str, obj, out: dict) -> None:
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, out)
    elif obj is None or isinstance(obj, (bool, int, float, str, np.floating, np.integer)):
        out[prefix] = obj
    elif isinstance(obj, complex):
        out[prefix + ".re"] = obj.real
        out[prefix + ".im"] = obj.imag


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def run_sweep(parser, args, rest: list[str], out) -> None:
    grids = sorted(_parse_grid(g) for g in args.grid)
    names = [name for name, _ in grids]
    if len(set(names)) != len(names):
        raise UsageError("each grid parameter may appear once")
    points = list(itertools.product(*(values for _, values in grids)))
    argvs = []
    for combo in points:
        argv = [args.target, *rest]
        for name, value in zip(names, combo):
            argv += [f"--{name}", repr(value)]
        argvs.append(argv)
    # validate flags once so usage errors surface before any work
    parser.parse_args(argvs[0])
    with ThreadPoolExecutor(max_workers=max(1, args.workers)) as pool:
        envelopes = list(pool.map(lambda a: _run_point(parser, a), argvs))
    if args.format == "json":
        for env in envelopes:
            out.write(to_json(env) + "\n")
        return
    rows = []
    for env in envelopes:
        flat: dict = {}
        _flatten("parameters", env["parameters"], flat)
        _flatten("results", env["results"], flat)
        flat["warnings"] = " | ".join(env["warnings"])
        rows.append(flat)
    columns = list(dict.fromkeys(k for row in rows for k in row))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_cell(row.get(c)) for c in columns])
    out.write(buf.getvalue())


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        if argv and argv[0] == "sweep":
            args, rest = parser.parse_known_args(argv)
            run_sweep(parser, args, rest, out)
            return 0
        args = parser.parse_args(argv)
        params, results, warnings = HANDLERS[args.command](args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except DomainError as exc:
        err.write(f"qdeform: error: {exc}\n")
        return 2
    except (OverflowError, ConvergenceError) as exc:
        err.write(f"qdeform: numerical failure: {exc}\n")
        return 3
    out.write(to_json(envelope(args.command, params, results, warnings)) + "\n")
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
