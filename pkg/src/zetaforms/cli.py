"""Command-line front end: parse, validate, dispatch, emit.

Every subcommand builds a plain report dict and hands it to one emitter.
JSON is the canonical shape with every number serialized as a string, so
exact rationals and high-precision values survive a round trip; csv and
text are flat projections of the same dict.  Identical configurations
produce byte-identical output: no timestamps, no environment leakage, a
fixed key order everywhere.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp, workprec

from zetaforms.bigmath import DomainError, PrecisionContext, SeriesError
from zetaforms.rfunc import CertificationError, Parameters, partial_fractions, verify_reconstruction

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VERIFICATION = 3
EXIT_NONCONVERGENCE = 4

_DEFAULT_PREC = 256


@dataclass(frozen=True)
class RunConfig:
    """One validated invocation: subcommand plus everything it may need."""

    command: str
    n: int | None = None
    A: int = 68
    m: int | None = None
    prec_bits: int = _DEFAULT_PREC
    nmax: int | None = None
    which: str = "plain"
    verify: bool = False
    integerize: bool = False
    check_routes: bool = False
    fmt: str = "json"
    output: str | None = None

    def context(self) -> PrecisionContext:
        return PrecisionContext(self.prec_bits, 64)


# ---------------------------------------------------------------------------
# subcommand implementations; each returns (exit_code, report_dict)


def cmd_pfrac(cfg: RunConfig) -> tuple[int, dict]:
    params = Parameters(cfg.n, cfg.A)
    table = partial_fractions(params)
    report = table.to_json_dict()
    if cfg.verify:
        checks = {}
        verify_reconstruction(table)
        checks["reconstruction"] = "ok"
        table.check_residue_sum()
        checks["residue_sum"] = "ok"
        if params.n % 2 == 0 and params.A % 2 == 0 and params.n >= 0 and params.A >= 16:
            table.check_even_rows()
            checks["even_rows"] = "ok"
            table.check_symmetry()
            checks["symmetry"] = "ok"
        report["verified"] = checks
    return EXIT_OK, report


def cmd_forms(cfg: RunConfig) -> tuple[int, dict]:
    from zetaforms import forms

    params = Parameters(cfg.n, cfg.A)
    table = partial_fractions(params)
    form = forms.q_coefficients(table)
    report: dict = {"form": form.to_json_dict()}
    if cfg.m is not None:
        elim = forms.eliminate(form, cfg.m)
        report["elimination"] = elim.to_json_dict()
        if cfg.integerize:
            report["integerized"] = forms.integerize(elim).to_json_dict()
    elif cfg.integerize:
        raise DomainError("--integerize needs an elimination target --m")
    if cfg.check_routes:
        ctx = cfg.context()
        agreement = {}
        for which in ("plain", "hat"):
            direct = forms.S_direct(params, ctx, which=which)
            via = forms.S_via_zeta(form, ctx, which=which)
            with ctx.workprec():
                diff = abs(direct - via)
                if diff == 0:
                    bits = ctx.working_bits
                else:
                    bits = int(-mp.log(diff / abs(direct), 2))
            agreement[which] = {
                "value": mp.nstr(direct, 30),
                "agreement_bits": bits,
            }
        report["route_agreement"] = agreement
    return EXIT_OK, report


def cmd_asympt(cfg: RunConfig) -> tuple[int, dict]:
    from zetaforms.saddle import asymptotic_report

    top = cfg.nmax if cfg.nmax is not None else 12
    ns = tuple(range(8, top + 1, 2))
    if not ns:
        raise DomainError(f"comparison range is empty: nmax {top} < 8")
    return EXIT_OK, asymptotic_report(A=cfg.A, ns=ns, ctx=cfg.context())


def cmd_contour(cfg: RunConfig) -> tuple[int, dict]:
    from zetaforms.contour import verification_report

    params = Parameters(cfg.n, cfg.A)
    ctx = cfg.context()
    whichs = ("plain", "hat") if cfg.which == "both" else (cfg.which,)
    reports = []
    worst_ok = True
    for which in whichs:
        rep = verification_report(params, ctx=ctx, which=which)
        with ctx.workprec():
            diff = mp.mpf(rep["abs_diff"])
            series = abs(mp.mpf(rep["series_value"]))
            tol = series * mp.mpf(2) ** -(cfg.prec_bits - 48)
            rep["tolerance"] = mp.nstr(tol, 10)
            rep["passed"] = bool(diff <= tol)
        worst_ok = worst_ok and rep["passed"]
        reports.append(rep)
    report = reports[0] if len(reports) == 1 else {"reports": reports}
    return (EXIT_OK if worst_ok else EXIT_VERIFICATION), report


def cmd_certify(cfg: RunConfig) -> tuple[int, dict]:
    from zetaforms import forms

    if cfg.nmax is None:
        raise DomainError("certify needs --nmax")
    if cfg.A % 2 != 0 or cfg.A < 16:
        raise DomainError(f"certification covers even A >= 16, got {cfg.A}")
    m = cfg.m if cfg.m is not None else 5
    rows = []
    all_ok = True
    for n in range(0, cfg.nmax + 1, 2):
        row: dict = {"n": n}
        try:
            table = partial_fractions(Parameters(n, cfg.A))
            forms.check_p_integrality(table, refined=False)
            row["p_integrality"] = "ok"
            forms.check_p_integrality(table, refined=True)
            row["p_integrality_refined"] = "ok"
            form = forms.q_coefficients(table)
            forms.check_q_integrality(form)
            row["q_integrality"] = "ok"
            # n=0 scales by d_0 = phi_0 = 1, so this degenerates gracefully
            forms.integerize(forms.eliminate(form, m))
            row["integerized"] = "ok"
        except CertificationError as exc:
            row["failed"] = str(exc)
            all_ok = False
        rows.append(row)
    report = {"A": cfg.A, "m": m, "nmax": cfg.nmax, "rows": rows, "all_passed": all_ok}
    return (EXIT_OK if all_ok else EXIT_VERIFICATION), report


def cmd_delta(cfg: RunConfig) -> tuple[int, dict]:
    from zetaforms.arith import delta_empirical, delta_integral

    ctx = cfg.context()
    with ctx.workprec():
        report: dict = {"integral": mp.nstr(delta_integral(ctx), 30)}
    if cfg.nmax is not None:
        samples = 48 if cfg.nmax > 2000 else None
        trend = delta_empirical(cfg.nmax, samples=samples)
        report["empirical"] = [{"n": k, "value": f"{v:.12f}"} for k, v in trend]
    return EXIT_OK, report


def cmd_phi(cfg: RunConfig) -> tuple[int, dict]:
    from zetaforms.arith import phi

    data = phi(cfg.n)
    return EXIT_OK, {
        "n": data.n,
        "d_n": str(data.d_n),
        "phi_n": str(data.phi_n),
        "factorization": {str(p): e for p, e in data.phi_factorization},
    }


_DISPATCH = {
    "pfrac": cmd_pfrac,
    "forms": cmd_forms,
    "asympt": cmd_asympt,
    "contour": cmd_contour,
    "certify": cmd_certify,
    "delta": cmd_delta,
    "phi": cmd_phi,
}


# ---------------------------------------------------------------------------
# emission: canonical json, with csv/text as projections


def _stringify(obj):
    """Numbers become strings recursively; exactness survives the dump."""
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return repr(obj)
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, dict):
        return {str(k): _stringify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_stringify(v) for v in obj]
    return str(obj)


def _flatten(obj, prefix: str = ""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def render(report: dict, fmt: str) -> str:
    import json

    canonical = _stringify(report)
    if fmt == "json":
        return json.dumps(canonical, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["key", "value"])
        for key, value in _flatten(canonical):
            writer.writerow([key, value])
        return buf.getvalue()
    lines = [f"{key} = {value}" for key, value in _flatten(canonical)]
    return "\n".join(lines) + "\n"


def emit(report: dict, cfg: RunConfig) -> None:
    text = render(report, cfg.fmt)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# argument parsing


def _default_prec() -> int:
    raw = os.environ.get("ZETAFORMS_PREC")
    if raw is None:
        return _DEFAULT_PREC
    try:
        return int(raw)
    except ValueError as exc:
        raise DomainError(f"ZETAFORMS_PREC must be an integer, got {raw!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zetaforms",
        description="Exact linear forms in odd zeta values: tables, forms, "
        "asymptotics, and cross-checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, n_required: bool = False, n_used: bool = True):
        if n_used:
            p.add_argument("--n", type=int, required=n_required, help="family index")
        p.add_argument("--A", type=int, default=68, help="pole order (default 68)")
        p.add_argument("--prec", type=int, default=None, help="precision in bits")
        p.add_argument(
            "--format", choices=("json", "csv", "text"), default="json", dest="fmt"
        )
        p.add_argument("--output", default=None, help="write the report here instead of stdout")

    p = sub.add_parser("pfrac", help="exact partial-fraction table")
    common(p, n_required=True)
    p.add_argument("--verify", action="store_true", help="run the exact certifications")

    p = sub.add_parser("forms", help="zeta-value coefficients, elimination, integerization")
    common(p, n_required=True)
    p.add_argument("--m", type=int, default=None, help="odd zeta index to eliminate")
    p.add_argument("--integerize", action="store_true")
    p.add_argument("--check-routes", action="store_true", dest="check_routes")

    p = sub.add_parser("asympt", help="saddle constants and exact-vs-predicted table")
    common(p, n_used=False)
    p.add_argument("--nmax", type=int, default=None, help="top comparison index (even, >= 8)")

    p = sub.add_parser("contour", help="line-integral cross-check of the series values")
    common(p, n_required=True)
    p.add_argument("--which", choices=("plain", "hat", "both"), default="plain")

    p = sub.add_parser("certify", help="batch integrality certification")
    common(p, n_used=False)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--m", type=int, default=None, help="elimination target (default 5)")

    p = sub.add_parser("delta", help="denominator-savings exponent, integral and empirical")
    common(p, n_used=False)
    p.add_argument("--nmax", type=int, default=None, help="empirical range endpoint")

    p = sub.add_parser("phi", help="d_n and the prime-product factor")
    common(p, n_required=True)

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    prec = args.prec if args.prec is not None else _default_prec()
    if prec < 64:
        raise DomainError(f"precision must be at least 64 bits, got {prec}")
    return RunConfig(
        command=args.command,
        n=getattr(args, "n", None),
        A=args.A,
        m=getattr(args, "m", None),
        prec_bits=prec,
        nmax=getattr(args, "nmax", None),
        which=getattr(args, "which", "plain"),
        verify=getattr(args, "verify", False),
        integerize=getattr(args, "integerize", False),
        check_routes=getattr(args, "check_routes", False),
        fmt=args.fmt,
        output=args.output,
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        code, report = _DISPATCH[cfg.command](cfg)
        emit(report, cfg)
        return code
    except DomainError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CertificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFICATION
    except (SeriesError, ArithmeticError) as exc:
        print(f"did not converge: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE


if __name__ == "__main__":
    raise SystemExit(main())
