"""Command line interface.

Exit codes: 0 success, 1 validation failure, 2 input error, 3 unsupported
computation.  Every command echoes its resolved configuration on stderr
(suppress with ``--quiet``) so that runs can be reproduced.
"""

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys

import mpmath

from . import __version__
from . import exact as ex
from . import fixtures as fx
from .asym import (build_expansion, dumps as expansion_dumps, phi_at, render_text,
                   residual_report)
from .dilation import cascade_solve, fixed_point_residual
from .errors import (InputError, NotZeroInsensitiveError, RadixAsymError, UnsupportedError,
                     ValidationError)
from .fourier import FourierEngine, fourier_trapezoid
from .linrep import (eval_range, is_zero_insensitive, load, partial_sum_via_series,
                     q_matrix, sigma_direct, sigma_recursive, to_dict)
from .spectral import best_bounds, decompose_C, jordan_decompose, jordan_from_basis, jsr_bounds

ORACLES = {
    "dichopile": lambda n_max: fx.dichopile_oracle(n_max),
    "rudin_shapiro": lambda n_max: [fx.rudin_shapiro(n) for n in range(n_max + 1)],
    "rudin_shapiro4": lambda n_max: [fx.rudin_shapiro(n) for n in range(n_max + 1)],
    "sum_of_digits": lambda n_max: [fx.sum_of_digits(n) for n in range(n_max + 1)],
    "zero": lambda n_max: [0] * (n_max + 1),
}


# -- helpers ------------------------------------------------------------------------

def load_rep(source, transpose=False):
    """A JSON path, or the name of a shipped fixture."""
    if os.path.exists(source):
        return load(source, transpose=transpose)
    name = source[len("fixture:"):] if source.startswith("fixture:") else source
    if name in fx.FIXTURES:
        rep = fx.load_fixture(name)
        if transpose:
            from .linrep import transposed
            rep = transposed(rep)
        return rep
    raise InputError(f"no such file or fixture: {source!r}")


def read_oracle_csv(path):
    """``n,value`` rows (a header line is allowed); returns a dict."""
    out = {}
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or row[0].startswith("#"):
                continue
            if lineno == 1 and not row[0].strip().lstrip("-").isdigit():
                continue
            if len(row) < 2:
                raise InputError(f"{path}:{lineno}: expected two columns")
            try:
                out[int(row[0])] = ex.to_rational(row[1].strip())
            except (ValueError, TypeError, InputError) as exc:
                raise InputError(f"{path}:{lineno}: {exc}") from None
    return out


def resolve_oracle(args, rep, n_max):
    src = getattr(args, "oracle", None)
    if src is None:
        if rep.name in ORACLES:
            return rep.name, dict(enumerate(ORACLES[rep.name](n_max)))
        return None, None
    if src in ORACLES:
        return src, dict(enumerate(ORACLES[src](n_max)))
    return src, read_oracle_csv(src)


def fmt(v):
    """Exact values as ``p/q`` strings, floats with ``repr``."""
    if ex.is_exact(v):
        return ex.format_rational(v)
    if isinstance(v, complex):
        return repr(v.real) if not v.imag else f"{v.real!r}{v.imag:+r}j"
    return repr(float(v))


def emit(text, path=None):
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def config_of(args):
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "quiet")}
    cfg["version"] = __version__
    return cfg


def echo_config(args):
    if not args.quiet:
        print("# config: " + json.dumps(config_of(args), sort_keys=True), file=sys.stderr)


def _decomposition(rep, numeric=False):
    Q = q_matrix(rep)
    basis = rep.meta.get("jordan_basis")
    if basis is not None and rep.exact:
        return jordan_from_basis(Q, basis)
    return jordan_decompose(Q, numeric=numeric or not rep.exact)


def _bounds(rep, args):
    norms = ("1", "inf") if args.norm == "auto" else (args.norm,)
    if not rep.exact and args.norm == "auto":
        norms = ("1", "inf", "2")
    T = args.T
    if T is None:
        T = 1
        while rep.radix ** (T + 1) <= 2 ** 10:
            T += 1
    if len(norms) == 1:
        return jsr_bounds(rep, T, norms[0])
    return best_bounds(rep, T, norms)


def _expansion(rep, args):
    if not is_zero_insensitive(rep):
        raise NotZeroInsensitiveError(
            "the expansion needs a zero-insensitive representation (L A_0 = L); "
            "leading zeros must not change the value")
    norm = None if args.norm == "auto" else args.norm
    return build_expansion(rep, r=args.r, norm_id=norm, T=args.T, depth=args.depth,
                           numeric=args.numeric)


# -- subcommands ----------------------------------------------------------------------

def cmd_eval(args):
    rep = load_rep(args.rep, args.transpose)
    u = eval_range(rep, args.nmax)
    rows = []
    s = rep.zero()
    for n, v in enumerate(u):
        s = s + v
        rows.append([n, fmt(v)] + ([fmt(s)] if args.sums else []))
    header = ["n", "u_n"] + (["s_n"] if args.sums else [])
    emit(csv_text(header, rows), args.output)
    return 0


def cmd_check(args):
    rep = load_rep(args.rep, args.transpose)
    name, oracle = resolve_oracle(args, rep, args.nmax)
    report = {"radix": rep.radix, "dim": rep.dim, "exact": rep.exact,
              "zero_insensitive": is_zero_insensitive(rep), "oracle": name}
    ok = True
    if oracle is not None:
        n_max = min(args.nmax, max(oracle) if oracle else 0)
        u = eval_range(rep, n_max)
        bad = next((n for n in range(n_max + 1) if n in oracle and u[n] != oracle[n]), None)
        report["checked"] = n_max + 1
        report["first_mismatch"] = None if bad is None else {
            "n": bad, "representation": fmt(u[bad]), "oracle": fmt(oracle[bad])}
        ok = bad is None
    report["passed"] = ok
    emit(json.dumps(report, indent=1, sort_keys=True) + "\n", args.output)
    return 0 if ok else 1


def _jsr_json(b):
    w = b.finiteness_witness
    return {
        "T": b.T, "norm": b.norm_id, "max_norm": fmt(b.max_norm),
        "upper": b.upper, "lower": b.lower, "lower_word": list(b.lower_word),
        "witness": None if w is None else {"T": w.T, "norm": w.norm_id, "word": list(w.word),
                                            "rho": w.rho, "certified": w.exact},
    }


def cmd_jsr(args):
    rep = load_rep(args.rep, args.transpose)
    out = _jsr_json(_bounds(rep, args))
    if args.growth:
        out["growth"] = [{"T": T, "max_norm": fmt(jsr_bounds(rep, T, "1" if args.norm == "auto"
                                                             else args.norm).max_norm)}
                         for T in range(1, (args.T or 8) + 1)]
    emit(json.dumps(out, indent=1, sort_keys=True) + "\n", args.output)
    return 0


def cmd_jordan(args):
    rep = load_rep(args.rep, args.transpose)
    jd = _decomposition(rep, args.numeric)
    gamma = decompose_C(jd, rep.C)
    out = {
        "exact": jd.exact,
        "eigenvalues": [fmt(e.value) for e in jd.eigenvalues],
        "chains": [{"eigenvalue": fmt(c.eigenvalue.value), "size": c.size,
                    "vectors": [[fmt(a) for a in v] for v in c.vectors]} for c in jd.chains],
        "gamma": [fmt(g) for g in gamma],
        "residual": jd.residual,
    }
    emit(json.dumps(out, indent=1, sort_keys=True) + "\n", args.output)
    return 0


def _cascade_csv(sol, depth, digits=None):
    B = sol.rep.radix
    d, nu = sol.rep.dim, sol.size
    header = ["x"] + [f"F{i}_{j}" for i in range(d) for j in range(nu)]
    if digits:
        header.append("digits")
    rows = []
    for i in range(B ** depth + 1):
        cols = sol.columns_at(i, depth)
        cells = [cols[j][c] for c in range(d) for j in range(nu)]
        if digits:
            cells = [mpmath.nstr(_mp(v), digits) for v in cells] + [digits]
        else:
            cells = [fmt(v) for v in cells]
        rows.append([f"{i}/{B}^{depth}"] + cells)
    return csv_text(header, rows)


def _mp(v):
    if ex.is_exact(v):
        v = ex.to_rational(v)
        return mpmath.mpf(int(v.numerator)) / int(v.denominator)
    return mpmath.mpf(float(v))


def cmd_cascade(args):
    rep = load_rep(args.rep, args.transpose)
    jd = _decomposition(rep, args.numeric)
    if not 0 <= args.chain < len(jd.chains):
        raise InputError(f"chain index {args.chain} out of range (0..{len(jd.chains) - 1})")
    sol = cascade_solve(rep, jd.chains[args.chain], args.depth, allow_numeric=args.numeric or not rep.exact)
    emit(_cascade_csv(sol, args.depth, args.digits), args.output)
    return 0


def cmd_expand(args):
    rep = load_rep(args.rep, args.transpose)
    exp = _expansion(rep, args)
    if args.json:
        emit(expansion_dumps(exp) + "\n", args.json)
    emit(render_text(exp) + "\n", args.output)
    return 0


def _phi_csv(exp, depth, which=None):
    terms = [t for t in exp.terms if t.constant is None and (which is None or t.phi_index == which)]
    B = exp.radix
    header = ["t", "x"] + [f"Phi_{t.phi_index}" + ("_re" if t.theta else "") for t in terms]
    header += [f"Phi_{t.phi_index}_im" for t in terms if t.theta] + ["digits"]
    rows = []
    for j in range(B ** (depth - 1), B ** depth + 1):
        x = ex.mpq(j, B ** depth)
        u = 1.0 + math.log(float(x)) / math.log(B)
        vals = [phi_at(t, x) for t in terms]
        cells = [repr(v.real) for v in vals] + [repr(v.imag) for t, v in zip(terms, vals) if t.theta]
        rows.append([repr(u), f"{j}/{B}^{depth}"] + cells + [15])
    return csv_text(header, rows)


def cmd_phi(args):
    rep = load_rep(args.rep, args.transpose)
    exp = _expansion(rep, args)
    emit(_phi_csv(exp, args.grid, args.term), args.output)
    return 0


def _fourier_rows(exp, kmax, digits, method, K, closed_forms=None, term_index=None):
    terms = [t for t in exp.terms if t.constant is None and (term_index is None or t.phi_index == term_index)]
    if not terms:
        return ["term", "k", "re", "im", "digits", "method", "est_error"], []
    engine = FourierEngine(exp, closed_forms)
    rows = []
    for t in terms:
        for k in range(kmax + 1):
            if method in ("newton", "both"):
                c = engine.coefficient(t, k, digits)
                rows.append([t.phi_index, k, mpmath.nstr(c.value.real, digits, strip_zeros=False),
                             mpmath.nstr(c.value.imag, digits, strip_zeros=False), digits, c.method,
                             f"{c.est_error:.3g}"])
            if method in ("trapezoid", "both"):
                c = fourier_trapezoid(t, k, K)
                rows.append([t.phi_index, k, mpmath.nstr(c.value.real, 12), mpmath.nstr(c.value.imag, 12),
                             10, "trapezoid", f"{c.est_error:.3g}"])
    return ["term", "k", "re", "im", "digits", "method", "est_error"], rows


def _comparison(rows):
    by = {}
    for r in rows:
        by.setdefault((r[0], r[1]), {})["trapezoid" if r[5] == "trapezoid" else "newton"] = r
    lines = [f"{'term':>4} {'k':>3} {'newton re':>21} {'newton im':>21} "
             f"{'trapezoid re':>17} {'trapezoid im':>17} {'gap':>10}"]
    for (t, k), d in sorted(by.items()):
        n, tr = d.get("newton"), d.get("trapezoid")
        if not (n and tr):
            continue
        gap = abs(complex(float(n[2]), float(n[3])) - complex(float(tr[2]), float(tr[3])))
        lines.append(f"{t:>4} {k:>3} {float(n[2]):>21.15g} {float(n[3]):>21.15g} "
                     f"{float(tr[2]):>17.10g} {float(tr[3]):>17.10g} {gap:>10.3g}")
    return "\n".join(lines) + "\n"


def _closed_forms_arg(path):
    if not path:
        return None
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}:{exc.lineno}: {exc.msg}") from None
    from .fourier import _parse_key, _parse_pieces
    return {_parse_key(k): _parse_pieces(v) for k, v in data.items()}


def cmd_fourier(args):
    rep = load_rep(args.rep, args.transpose)
    exp = _expansion(rep, args)
    header, rows = _fourier_rows(exp, args.kmax, args.digits, args.method, args.K,
                                 _closed_forms_arg(args.closed_forms), args.term)
    emit(csv_text(header, rows), args.output)
    if args.method == "both":
        sys.stderr.write(_comparison(rows))
    return 0


def _sample_N(B, n_max):
    Ns = set(range(0, min(n_max, 300) + 1))
    k = 1
    while B ** k <= n_max:
        Ns.update({B ** k - 1, B ** k, B ** k + 1, (3 * B ** k) // 2})
        k += 1
    return sorted(N for N in Ns if N <= n_max)


def validate_suites(rep, args):
    """Run the invariant suites; returns an ordered list of (name, passed, detail)."""
    out = []
    n_max = args.nmax
    name, oracle = resolve_oracle(args, rep, n_max)
    u = eval_range(rep, n_max)
    if oracle is not None:
        bad = next((n for n in range(n_max + 1) if n in oracle and u[n] != oracle[n]), None)
        out.append(("oracle", bad is None,
                    f"{name}: {n_max + 1} terms agree" if bad is None else
                    f"{name}: u_{bad} = {fmt(u[bad])} but the oracle gives {fmt(oracle[bad])}"))
    prefix = []
    s = rep.zero()
    for v in u:
        s = s + v
        prefix.append(s)
    tol = 0 if rep.exact else 1e-8
    bad = None
    for N in _sample_N(rep.radix, n_max):
        if abs(partial_sum_via_series(rep, N) - prefix[N]) > tol * max(1.0, abs(float(prefix[N]))):
            bad = N
            break
    out.append(("partial_sums", bad is None,
                "series evaluation matches direct summation" if bad is None else
                f"partial sum at N = {bad} differs from direct summation"))
    bad = None
    B = rep.radix
    for K in range(1, 6):
        for i in range(0, B ** K + 1, max(1, B ** K // 7)):
            x = ex.mpq(i, B ** K) if rep.exact else i / B ** K
            if i == 0:
                continue
            a = sigma_recursive(rep, None, K, x)
            b = sigma_direct(rep, None, K, x)
            if any(abs(p - q) > tol * max(1.0, abs(float(q))) for p, q in zip(a, b)):
                bad = (K, i)
                break
        if bad:
            break
    out.append(("sigma", bad is None, "recursive and direct forms agree" if bad is None
                else f"Sigma_{bad[0]}({bad[1]}/{B}^{bad[0]}) recursive != direct"))
    try:
        jd = _decomposition(rep, args.numeric)
    except UnsupportedError as exc:
        out.append(("jordan", True, f"skipped: {exc}"))
        return out
    out.append(("jordan", True, f"Q P = P Lambda ({'exact' if jd.exact else f'residual {jd.residual:.2e}'})"))
    worst_all = 0
    for idx, chain in enumerate(jd.chains):
        if chain.eigenvalue.value == 0:
            continue
        sol = cascade_solve(rep, chain, min(args.depth, 8), allow_numeric=not jd.exact)
        worst, _ = fixed_point_residual(sol)
        worst_all = max(worst_all, float(abs(worst)))
    ok = worst_all <= (0 if jd.exact else 1e-8)
    out.append(("cascade", ok, f"dilation residual {worst_all:.3g}"))
    if args.expand:
        exp = _expansion(rep, args)
        Ns = [B ** k for k in range(4, 4 + args.levels)]
        rows = residual_report(rep, exp, Ns)
        vals = [r.normalized for r in rows]
        half = len(vals) // 2
        grow = max(vals[half:]) > 1.5 * max(vals[:half]) + 1e-12
        out.append(("expansion", not grow,
                    "normalized residuals " + ", ".join(f"{v:.3g}" for v in vals)))
    return out


def cmd_validate(args):
    rep = load_rep(args.rep, args.transpose)
    if args.expand and not is_zero_insensitive(rep):
        raise NotZeroInsensitiveError(
            "expansion validation refused: the representation is not zero-insensitive (L A_0 != L)")
    suites = validate_suites(rep, args)
    failed = [s for s in suites if not s[1]]
    report = {
        "passed": not failed,
        "first_failure": failed[0][0] if failed else None,
        "suites": [{"name": n, "passed": p, "detail": d} for n, p, d in suites],
    }
    emit(json.dumps(report, indent=1) + "\n", args.output)
    return 1 if failed else 0


def cmd_pipeline(args):
    rep = load_rep(args.rep, args.transpose)
    os.makedirs(args.out, exist_ok=True)
    files = {}
    skipped = {}

    def write(name, text):
        with open(os.path.join(args.out, name), "w", newline="") as fh:
            fh.write(text)
        files[name] = hashlib.sha256(text.encode()).hexdigest()

    cfg = config_of(args)
    cfg.pop("out")  # the bundle does not depend on where it is written
    write("config.json", json.dumps(cfg, indent=1, sort_keys=True) + "\n")
    write("representation.json", json.dumps(to_dict(rep), indent=1) + "\n")
    stage = "spectral"
    try:
        jd = _decomposition(rep, args.numeric)
        gamma = decompose_C(jd, rep.C)
        write("jordan.json", json.dumps({
            "eigenvalues": [fmt(e.value) for e in jd.eigenvalues],
            "chain_sizes": [c.size for c in jd.chains],
            "gamma": [fmt(g) for g in gamma]}, indent=1) + "\n")
        write("jsr.json", json.dumps(_jsr_json(_bounds(rep, args)), indent=1, sort_keys=True) + "\n")
        stage = "dilation"
        for idx, chain in enumerate(jd.chains):
            if chain.eigenvalue.value == 0 or chain.eigenvalue.modulus < 1:
                continue
            sol = cascade_solve(rep, chain, args.depth, allow_numeric=not jd.exact)
            write(f"cascade_chain{idx}.csv", _cascade_csv(sol, args.depth))
        stage = "asym"
        exp = _expansion(rep, args)
        write("expansion.txt", render_text(exp) + "\n")
        write("expansion.json", expansion_dumps(exp) + "\n")
        if any(t.constant is None for t in exp.terms):
            write("phi.csv", _phi_csv(exp, args.grid))
        Ns = [rep.radix ** k for k in range(4, 4 + args.levels)]
        rows = residual_report(rep, exp, Ns)
        write("residuals.csv", csv_text(["N", "s_N", "predicted", "residual", "normalized"],
                                        [[r.N, fmt(r.s_N), repr(r.predicted), repr(r.residual),
                                          repr(r.normalized)] for r in rows]))
        stage = "fourier"
        if args.kmax >= 0 and any(t.constant is None for t in exp.terms):
            header, rows = _fourier_rows(exp, args.kmax, args.digits, "newton", args.K)
            write("fourier.csv", csv_text(header, rows))
    except (UnsupportedError, NotZeroInsensitiveError) as exc:
        skipped[stage] = f"{type(exc).__name__}: {exc}"
    manifest = {"version": __version__, "files": dict(sorted(files.items())), "skipped": skipped}
    with open(os.path.join(args.out, "manifest.json"), "w") as fh:
        fh.write(json.dumps(manifest, indent=1, sort_keys=True) + "\n")
    if not args.quiet:
        print(f"wrote {len(files) + 1} files to {args.out}", file=sys.stderr)
        for stage, why in skipped.items():
            print(f"skipped {stage}: {why}", file=sys.stderr)
    return 0


# -- parser -------------------------------------------------------------------------

def _rational(text):
    try:
        return float(ex.to_rational(text))
    except (InputError, ValueError, TypeError):
        return float(text)


def build_parser():
    p = argparse.ArgumentParser(prog="radixasym",
                                description="Asymptotic expansions of radix-rational sequences.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-q", "--quiet", action="store_true", help="do not echo the configuration")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("rep", help="representation JSON file or shipped fixture name")
        sp.add_argument("--transpose", action="store_true",
                        help="input uses the least-significant-digit-first convention")
        sp.add_argument("-o", "--output", help="output file (default: stdout)")
        sp.add_argument("--jobs", type=int, default=1,
                        help="worker count (results do not depend on it; default 1)")

    def analysis(sp):
        sp.add_argument("--T", type=int, default=None, help="word length for the JSR bounds (default: B^T <= 1024)")
        sp.add_argument("--norm", default="auto", choices=["auto", "1", "inf", "2"],
                        help="matrix norm for the JSR bounds (default: tightest of 1/inf)")
        sp.add_argument("--r", type=_rational, default=None, help="threshold r of the error term")
        sp.add_argument("--depth", type=int, default=10, help="cascade depth (default 10)")
        sp.add_argument("--numeric", action="store_true", help="allow the floating-point Jordan path")

    sp = sub.add_parser("eval", help="sequence values u_n as CSV")
    common(sp)
    sp.add_argument("--nmax", type=int, default=15)
    sp.add_argument("--sums", action="store_true", help="add the partial sums s_n")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("check", help="compare with an oracle (fixture name or n,value CSV)")
    common(sp)
    sp.add_argument("--oracle", default=None)
    sp.add_argument("--nmax", type=int, default=4096)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("jsr", help="joint spectral radius bounds as JSON")
    common(sp)
    analysis(sp)
    sp.add_argument("--growth", action="store_true", help="list max ||A_w|| for every T up to --T")
    sp.set_defaults(func=cmd_jsr)

    sp = sub.add_parser("jordan", help="Jordan decomposition of Q and coordinates of C as JSON")
    common(sp)
    sp.add_argument("--numeric", action="store_true")
    sp.set_defaults(func=cmd_jordan)

    sp = sub.add_parser("cascade", help="dilation solution on a B-adic grid as CSV")
    common(sp)
    sp.add_argument("--chain", type=int, default=0, help="Jordan chain index (default 0)")
    sp.add_argument("--depth", type=int, default=8)
    sp.add_argument("--digits", type=int, default=None, help="decimal output with this many digits")
    sp.add_argument("--numeric", action="store_true")
    sp.set_defaults(func=cmd_cascade)

    sp = sub.add_parser("expand", help="asymptotic expansion (text; --json for the JSON form)")
    common(sp)
    analysis(sp)
    sp.add_argument("--json", default=None, help="also write the JSON form to this file")
    sp.set_defaults(func=cmd_expand)

    sp = sub.add_parser("phi", help="periodic fluctuations on a B-adic grid as CSV")
    common(sp)
    analysis(sp)
    sp.add_argument("--grid", type=int, default=10, help="grid depth (default 10)")
    sp.add_argument("--term", type=int, default=None, help="only this Phi index")
    sp.set_defaults(func=cmd_phi)

    sp = sub.add_parser("fourier", help="Fourier coefficients of the fluctuations as CSV")
    common(sp)
    analysis(sp)
    sp.add_argument("--kmax", type=int, default=10)
    sp.add_argument("--digits", type=int, default=50)
    sp.add_argument("--method", choices=["newton", "trapezoid", "both"], default="newton")
    sp.add_argument("--K", type=int, default=10, help="trapezoid grid depth (default 10)")
    sp.add_argument("--term", type=int, default=None, help="only this Phi index")
    sp.add_argument("--closed-forms", default=None,
                    help="JSON file of piecewise polynomials keyed by 'chain:column'")
    sp.set_defaults(func=cmd_fourier)

    sp = sub.add_parser("validate", help="run the invariant suites; nonzero exit on failure")
    common(sp)
    analysis(sp)
    sp.add_argument("--oracle", default=None)
    sp.add_argument("--nmax", type=int, default=4096)
    sp.add_argument("--expand", action="store_true", help="also check the expansion residuals")
    sp.add_argument("--levels", type=int, default=8, help="N = B^4 .. B^(3+levels) for residuals")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("pipeline", help="write the full artifact bundle into a directory")
    common(sp)
    analysis(sp)
    sp.add_argument("--out", required=True, help="output directory")
    sp.add_argument("--grid", type=int, default=10)
    sp.add_argument("--kmax", type=int, default=10)
    sp.add_argument("--digits", type=int, default=50)
    sp.add_argument("--K", type=int, default=10)
    sp.add_argument("--levels", type=int, default=8)
    sp.set_defaults(func=cmd_pipeline)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    echo_config(args)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(f"validation failed: {exc}", file=sys.stderr)
        return 1
    except UnsupportedError as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return 3
    except RadixAsymError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
