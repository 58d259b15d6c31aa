"""Command line: strings, zeta constructions, poles, tube traces, spectra.

Exit codes: 0 success, 2 invalid input, 3 analysis not supported for the input.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
from fractions import Fraction

from . import analysis, engine, measures, partition, strings
from .analysis import UnsupportedAnalysis
from .exact import format_rational

EXIT_OK, EXIT_INVALID, EXIT_UNSUPPORTED = 0, 2, 3
SIG_DIGITS = 12


class UsageError(ValueError):
    pass


def _num(x):
    """Stable rendering: rationals as p/q, floats at 12 significant digits."""
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, Fraction):
        return format_rational(x)
    if isinstance(x, complex):
        return [_num(x.real), _num(x.imag)]
    if isinstance(x, float):
        if math.isinf(x) or math.isnan(x):
            return str(x)
        return float(f"{x:.{SIG_DIGITS}g}")
    if isinstance(x, dict):
        return {k: _num(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_num(v) for v in x]
    return x


def _fmt_cell(x) -> str:
    if isinstance(x, Fraction):
        return format_rational(x)
    if isinstance(x, float):
        return f"{x:.{SIG_DIGITS}g}"
    return str(x)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt_cell(v) for v in r])
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(_num(obj), indent=2, sort_keys=True) + "\n"


# -- inputs --------------------------------------------------------------------

def _load_string(args) -> strings.FractalString:
    if getattr(args, "from_file", None):
        with open(args.from_file) as fh:
            return strings.FractalString.from_json(json.load(fh))
    params = (args.a,) if args.gen in ("a-string",) else ()
    if args.gen == "a-string" and args.a is None:
        raise UsageError("--gen a-string needs --a")
    return strings.make_string(args.gen, args.depth, *params)


def _parse_alpha(text: str) -> measures.Regularity:
    try:
        return measures.Regularity.parse(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad --alpha {text!r}: use +inf, -inf or k@eta") from exc


def parse_eps_grid(text: str) -> list[Fraction]:
    """``"3^-k:k=2..9"`` or a comma-separated list of rationals."""
    t = text.replace(" ", "")
    m = re.fullmatch(r"(?:(\d+(?:/\d+)?)\*)?(\d+)\^-k:k=(-?\d+)\.\.(-?\d+)", t)
    if m:
        c = Fraction(m.group(1)) if m.group(1) else Fraction(1)
        b = int(m.group(2))
        return [c / Fraction(b) ** k for k in range(int(m.group(3)), int(m.group(4)) + 1)]
    try:
        return [Fraction(x) for x in t.split(",") if x]
    except ValueError as exc:
        raise UsageError(f"bad --eps-grid {text!r}") from exc


def _scales(args, n: int) -> engine.ScaleSequence:
    try:
        return engine.ScaleSequence.parse(args.scales, n)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad --scales {args.scales!r}: {exc}") from exc


# -- commands ------------------------------------------------------------------

def _gap_system(s: strings.FractalString) -> list[dict]:
    rows = []
    for piece in s.boundary_model.perfect_pieces:
        gap = piece.host.length * (1 - piece.ratio * piece.copies)
        for n in range(1, s.depth + 1):
            rows.append({"n": n, "length": gap * piece.ratio ** (n - 1),
                         "multiplicity": piece.copies ** (n - 1)})
    return rows


def cmd_string(args):
    s = _load_string(args)
    out = s.to_json()
    out["gap_system"] = _gap_system(s)
    out["gaps"] = strings.gap_lengths(s).to_json() if (
        s.boundary_model.pieces or s.boundary_model.runs) else []
    return "json", out


def _build(args):
    s = _load_string(args)
    n = args.n_stages or s.depth
    sc = _scales(args, n)
    alpha = _parse_alpha(args.alpha)
    if args.require_full_recovery:
        smallest = s.length_system.entries[-1][0]
        if sc.etas[-1] >= smallest:
            raise UsageError(f"last scale {sc.etas[-1]} is not below the smallest length "
                             f"{smallest}; raise --depth or use more stages")
    if alpha.is_finite:
        m = measures.boundary_measure(s, min_eta=sc.etas[-1])
        return engine.finite_alpha_mzf(m, sc, alpha)
    m = measures.boundary_measure(s, min_eta=sc.etas[-1]) if alpha.kind == "+inf" \
        else measures.boundary_measure(s)
    return engine.build_mzf(m, sc, alpha)


def cmd_zeta(args):
    res = _build(args)
    if args.format == "csv":
        rows = [(st.n, st.eta, _set_text(st.R), _set_text(st.J), _set_text(st.K),
                 " ".join(format_rational(l) for l in st.k_lengths)) for st in res.stages]
        return "csv", _csv(["n", "eta", "R", "J", "K", "k_lengths"], rows)
    out = res.to_json()
    if not args.stages:
        out.pop("stages")
    return "json", out


def _set_text(s) -> str:
    return " U ".join(str(c) for c in s) if s else "{}"


def cmd_zeta_geometric(args):
    s = _load_string(args)
    form = analysis.geometric_form(s)
    return "json", {"generator": s.generator, "length_system": s.length_system.to_json(),
                    "closed_form": form.to_json(),
                    "abscissa": analysis.abscissa_of_convergence(form).value}


def _form_for(args):
    if args.alpha in (None, "geometric"):
        return analysis.geometric_form(_load_string(args))
    res = _build(args)
    if res.closed_form is None:
        raise UnsupportedAnalysis("no closed form was recognized for this construction")
    return res.closed_form


def cmd_dims(args):
    form = _form_for(args)
    lines, poles = analysis.complex_dimensions(
        form, analysis.Window(args.sigma_min, args.tmax))
    if args.format == "csv":
        rows = [(p.s.real, p.s.imag, p.residue.real, p.residue.imag) for p in poles]
        return "csv", _csv(["re", "im", "residue_re", "residue_im"], rows)
    return "json", {
        "form": form.to_json(),
        "abscissa": analysis.abscissa_of_convergence(form).value,
        "lines": [{"sigma": l.sigma, "spacing": l.spacing, "base": l.base_b,
                   "phase": l.phase, "simple": l.simple} for l in lines],
        "poles": [p.to_json() for p in poles]}


def cmd_tube(args):
    s = _load_string(args)
    grid = parse_eps_grid(args.eps_grid)
    if s.lattice:
        form = analysis.geometric_form(s)
        D = analysis.abscissa_of_convergence(form).value
    elif s.generator == "a-string":
        form, D = None, 1.0 / (1 + s.params[0])
    else:
        raise UnsupportedAnalysis("tube traces need a lattice string or an a-string")
    if args.explicit and form is None:
        raise UnsupportedAnalysis("explicit tube formula needs a self-similar lattice string")
    rows = []
    for e, v, scaled in analysis.tube_trace(s, grid, D):
        row = [e, float(v), scaled]
        if args.explicit:
            row.append(analysis.tube_explicit_formula(form, e, args.mmax)[0])
        rows.append(row)
    header = ["eps", "V", "V_eps_pow_D_minus_1"] + (["V_explicit"] if args.explicit else [])
    if args.format == "json":
        return "json", {"D": D, "rows": [dict(zip(header, r)) for r in rows]}
    return "csv", _csv(header, rows)


def cmd_spectrum(args):
    if args.measure != "binomial":
        raise UsageError(f"unknown measure {args.measure!r}")
    rows = partition.spectrum_from_partition(args.kmax)
    if args.format == "json":
        qs = [-2, -1, 0, 0.5, 1, 2, 5]
        return "json", {
            "rows": [{"alpha": a, "f_alpha": f, "k1": k1, "k2": k2} for a, f, k1, k2 in rows],
            "sigma_q": [{"q": q, "sigma": partition.sigma_of_q(partition.BINOMIAL, q)} for q in qs],
            "legendre_gap": partition.legendre_gap(rows, partition.BINOMIAL, qs)}
    return "csv", _csv(["alpha", "f_alpha", "k1", "k2"], rows)


# -- parser ---------------------------------------------------------------------

def _add_string_args(p, depth=8):
    p.add_argument("--gen", default="cantor",
                   help="cantor|omega1, omega2|cantor-reordered, omega3|cantor-paired, a-string")
    p.add_argument("--depth", type=int, default=depth)
    p.add_argument("--a", type=int, help="exponent of the a-string")
    p.add_argument("--from-file", help="read a string JSON written by the string command")


def _add_zeta_args(p):
    p.add_argument("--scales", default="3^-(n+1)",
                   help="rule such as 3^-(n+1) or an explicit list 1/4,1/10,...")
    p.add_argument("--alpha", default="-inf", help="+inf, -inf or k@eta")
    p.add_argument("--n-stages", type=int, help="number of scales (default: depth)")
    p.add_argument("--require-full-recovery", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fraczeta", description=__doc__)
    ap.add_argument("--format", choices=("json", "csv"), default=None)
    ap.add_argument("--out", help="output file (relative paths go under $FRACZETA_OUTPUT_DIR)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("string", help="generate a fractal string")
    _add_string_args(p)
    p.set_defaults(func=cmd_string)

    p = sub.add_parser("zeta", help="multifractal zeta construction")
    _add_string_args(p)
    _add_zeta_args(p)
    p.add_argument("--stages", action="store_true", help="include per-stage R/J/K")
    p.set_defaults(func=cmd_zeta)

    p = sub.add_parser("zeta-geometric", help="geometric zeta closed form")
    _add_string_args(p)
    p.set_defaults(func=cmd_zeta_geometric)

    p = sub.add_parser("dims", help="complex dimensions in a window")
    _add_string_args(p)
    _add_zeta_args(p)
    p.set_defaults(alpha=None)
    p.add_argument("--tmax", type=float, default=20.0)
    p.add_argument("--sigma-min", type=float, default=-math.inf)
    p.set_defaults(func=cmd_dims)

    p = sub.add_parser("tube", help="tube volume trace")
    _add_string_args(p)
    p.add_argument("--eps-grid", default="3^-k:k=2..9")
    p.add_argument("--explicit", action="store_true", help="add the residue-sum column")
    p.add_argument("--mmax", type=int, default=50)
    p.set_defaults(func=cmd_tube)

    p = sub.add_parser("spectrum", help="multifractal spectrum table")
    p.add_argument("--measure", default="binomial")
    p.add_argument("--kmax", type=int, default=12)
    p.set_defaults(func=cmd_spectrum)

    # allow --format/--out after the subcommand too
    for sp in sub.choices.values():
        sp.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS)
        sp.add_argument("--out", default=argparse.SUPPRESS)
    return ap


def _destination(path):
    if path is None:
        return None
    base = os.environ.get("FRACZETA_OUTPUT_DIR")
    if base and not os.path.isabs(path):
        os.makedirs(base, exist_ok=True)
        return os.path.join(base, path)
    return path


def _join_negative_values(argv):
    # "--alpha -inf" would otherwise be read as an unknown option
    out = []
    it = iter(argv)
    for a in it:
        if a in ("--alpha", "--sigma-min"):
            nxt = next(it, None)
            out.append(a if nxt is None else f"{a}={nxt}")
        else:
            out.append(a)
    return out


def main(argv=None) -> int:
    ap = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = ap.parse_args(_join_negative_values(argv))
    try:
        if getattr(args, "depth", 1) is not None and getattr(args, "depth", 1) < 1:
            raise UsageError("--depth must be positive")
        kind, payload = args.func(args)
    except UnsupportedAnalysis as exc:
        print(f"fraczeta: unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (ValueError, TypeError, OSError, KeyError) as exc:
        print(f"fraczeta: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    text = _json(payload) if kind == "json" else payload
    dest = _destination(args.out)
    if dest:
        with open(dest, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
