"""Command line front end: run analyses on system files and re-verify reports."""
from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from . import laurent, verdict
from .algebra import MultiPoly, RationalFunction
from .ode1 import EXISTS, commensurable_scaling
from .parser import ParseError, format_system, parse_expression, parse_system_file
from .vectorfield import (EXPONENTIAL, PRIMITIVE, IntegralCandidate, VectorField, clear_denominators,
                          jacobian_independent, verify_candidate)

SCHEMA = 1
MODES = ("auto", "system", "poizat", "lv", "rosenlicht")

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_INVARIANT = 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# shape detection

def _one_var(r: RationalFunction, i: int) -> RationalFunction:
    num = MultiPoly(1, {(e[i],): c for e, c in r.num.terms.items()})
    den = MultiPoly(1, {(e[i],): c for e, c in r.den.terms.items()})
    return RationalFunction(num, den)


def poizat_coefficient(X: VectorField) -> Optional[RationalFunction]:
    """f when the field reads y1' = y2, y2' = y2*f(y1)."""
    if X.k != 2 or X.f[0] != RationalFunction.var(2, 1):
        return None
    r = X.f[1] / RationalFunction.var(2, 1)
    if r.diff(1):
        return None
    return _one_var(r, 0)


def lotka_volterra_parameters(X: VectorField) -> Optional[Tuple[Fraction, ...]]:
    """(a, b, c, d) when the field reads x' = a x + b x y, y' = c y + d x y with nonzero parameters."""
    if X.k != 2 or not all(f.is_polynomial() for f in X.f):
        return None
    p, q = X.f[0].num * (1 / X.f[0].den.leading_coeff()), X.f[1].num * (1 / X.f[1].den.leading_coeff())
    if set(p.terms) != {(1, 0), (1, 1)} or set(q.terms) != {(0, 1), (1, 1)}:
        return None
    return p.terms[(1, 0)], p.terms[(1, 1)], q.terms[(0, 1)], q.terms[(1, 1)]


def dispatch(X: VectorField, mode: str) -> str:
    if mode != "auto":
        return mode
    if X.k == 1:
        return "rosenlicht"
    if poizat_coefficient(X) is not None:
        return "poizat"
    if lotka_volterra_parameters(X) is not None:
        return "lv"
    return "system"


def analyze(X: VectorField, mode: str, degree: int, lambda_scan: int, truncation: int) -> verdict.AnalysisReport:
    if mode == "system":
        return verdict.analyze_system(X, degree, lambda_scan=lambda_scan, truncation=truncation)
    if mode == "rosenlicht":
        if X.k != 1:
            raise UsageError("rosenlicht mode needs a single equation")
        rep = verdict.analyze_rosenlicht(X.f[0])
    elif mode == "poizat":
        f = poizat_coefficient(X)
        if f is None:
            raise UsageError("poizat mode needs y1' = y2, y2' = y2*f(y1)")
        rep = verdict.analyze_poizat(f, lambda_scan=lambda_scan, truncation=truncation)
    elif mode == "lv":
        params = lotka_volterra_parameters(X)
        if params is None:
            raise UsageError("lv mode needs x' = a*x + b*x*y, y' = c*y + d*x*y with nonzero a, b, c, d")
        rep = verdict.analyze_lotka_volterra(*params, lambda_scan=lambda_scan, truncation=truncation)
    else:
        raise UsageError("unknown mode %r" % mode)
    # family analyzers build their own coordinates; report in the user's names
    rep.system = VectorField(rep.system.f, X.names)
    return rep


# ---------------------------------------------------------------------------
# serialization

def _note_value(v):
    if isinstance(v, (bool, int, str)) or v is None:
        return v
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [_note_value(t) for t in v]
    if isinstance(v, dict):
        return {str(k): _note_value(t) for k, t in v.items()}
    return str(v)


def _notes(rep: verdict.AnalysisReport) -> Dict[str, object]:
    names = rep.system.names
    out = {}
    for k, v in sorted(rep.notes.items()):
        if k == "darboux_polynomials":
            v = [{"P": P.to_str(names), "cofactor": K.to_str(names)} for P, K in v]
        elif k == "normalized_candidates":
            v = [{"g": c.g.to_str(["u", "v"]), "kind": c.kind, "lambda": str(c.lam)} for c in v]
        elif isinstance(v, RationalFunction):
            v = v.to_str(names if v.nvars == len(names) else ["x"])
        out[k] = _note_value(v)
    return out


def certificate_json(c: IntegralCandidate, names) -> dict:
    d = {"g": c.g.to_str(names), "kind": c.kind}
    if c.kind == EXPONENTIAL:
        d["lambda"] = str(c.lam)
    return d


def _certified_field(rep: verdict.AnalysisReport, mode: str) -> VectorField:
    """The planar field on which series certificates were computed."""
    if mode == "lv":
        return verdict.normalized_lotka_volterra(rep.notes["mu"])
    return rep.system


def report_json(rep: verdict.AnalysisReport, mode: str, degree: Optional[int], lambda_scan: int,
                truncation: int) -> dict:
    names = rep.system.names
    certified = format_system(_certified_field(rep, mode)) if rep.nonexistence else None
    return {
        "schema": SCHEMA,
        "system": format_system(rep.system),
        "mode": mode,
        "degree": degree,
        "settings": {"lambda_scan": lambda_scan, "truncation": truncation},
        "classification": rep.classification,
        "label": rep.label(),
        "weakly_orthogonal": rep.weakly_orthogonal,
        "certificates": [certificate_json(c, names) for c in rep.certificates],
        "independent": list(rep.independent),
        "nonexistence": [dict(c.to_json(), system=certified) for c in rep.nonexistence],
        "notes": _notes(rep),
        "caveats": list(rep.caveats),
        "timings": {k: round(v, 4) for k, v in sorted(rep.timings.items())},
    }


def report_text(data: dict) -> str:
    lines = ["system:"]
    lines += ["  " + e for e in data["system"]["equations"]]
    lines.append("mode: %s    degree: %s" % (data["mode"], data["degree"] if data["degree"] is not None else "-"))
    lines.append("classification: %s (%s)" % (data["classification"], data["label"]))
    if data["weakly_orthogonal"] is not None:
        lines.append("weakly orthogonal: %s" % ("yes" if data["weakly_orthogonal"] else "no"))
    lines.append("certificates:")
    for i, c in enumerate(data["certificates"]):
        tag = c["kind"] + (" λ=%s" % c["lambda"] if "lambda" in c else "")
        mark = " *" if i in data["independent"] else ""
        lines.append("  %s  [%s]%s" % (c["g"], tag, mark))
    if not data["certificates"]:
        lines.append("  (none)")
    if data["nonexistence"]:
        lines.append("nonexistence:")
        for n in data["nonexistence"]:
            lines.append("  " + n["summary"])
    for k, v in data["notes"].items():
        if k in ("darboux_polynomials", "normalized_candidates"):
            continue
        lines.append("%s: %s" % (k.replace("_", " "), v))
    if data["caveats"]:
        lines.append("caveats:")
        lines += ["  - " + c for c in data["caveats"]]
    lines.append("timings: " + ", ".join("%s %.3fs" % kv for kv in data["timings"].items()))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# verification of reports

def verify_report(data: dict) -> List[str]:
    """Problems found while re-checking a JSON report; empty when it verifies."""
    problems = []
    sysd = data["system"]
    X = parse_system_file("vars %s\n%s\n" % (" ".join(sysd["vars"]), "\n".join(sysd["equations"]))).field()
    names = list(X.names)
    cands = []
    for c in data["certificates"]:
        g = parse_expression(c["g"], names)
        cand = IntegralCandidate(g, c["kind"], Fraction(c.get("lambda", "0")))
        cands.append(cand)
        if not verify_candidate(X, cand):
            problems.append("certificate %s fails its identity" % c["g"])
    if data["classification"] == verdict.ALMOST_INTERNAL:
        if "algebraic_witness" in data["notes"]:
            if X.k != 1 or commensurable_scaling(1 / X.f[0]).status != EXISTS:
                problems.append("algebraic exponential witness does not re-derive")
        else:
            chosen = [cands[i] for i in data["independent"]]
            if len(chosen) != X.k:
                problems.append("independent set has %d members, expected %d" % (len(chosen), X.k))
            elif sum(c.kind == PRIMITIVE for c in chosen) > 1:
                problems.append("more than one primitive in the independent set")
            elif not jacobian_independent([c.g for c in chosen], X.k):
                problems.append("independent set has a vanishing Jacobian minor")
    settings = data.get("settings", {})
    for n in data["nonexistence"]:
        s = n["system"]
        Y = parse_system_file("vars %s\n%s\n" % (" ".join(s["vars"]), "\n".join(s["equations"]))).field()
        out = laurent.certify(clear_denominators(Y), n["target"],
                              lambda_scan=settings.get("lambda_scan", 6),
                              truncation=settings.get("truncation", 8))
        again = out.certificate.to_json() if out.certificate is not None else None
        recorded = {k: v for k, v in n.items() if k != "system"}
        if again != recorded:
            problems.append("nonexistence certificate for target %s does not replay" % n["target"])
    return problems


# ---------------------------------------------------------------------------
# driver

def _corpus_dir() -> Path:
    return Path(str(resources.files("internality") / "corpus"))


def _run_one(path: Path, args, mode: Optional[str] = None, degree: Optional[int] = None) -> Tuple[dict, bool]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError("cannot read %s: %s" % (path, exc))
    sf = parse_system_file(text)
    X = sf.field()
    m = mode or args.mode
    if m == "auto" and sf.mode:
        m = sf.mode
    m = dispatch(X, m)
    d = degree if degree is not None else args.degree
    t0 = time.perf_counter()
    rep = analyze(X, m, d, args.lambda_scan, args.truncation)
    rep.timings.setdefault("total", time.perf_counter() - t0)
    data = report_json(rep, m, d if m == "system" else None, args.lambda_scan, args.truncation)
    return data, rep.check()


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _render(data: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    return report_text(data)


def _corpus(args) -> int:
    root = Path(args.corpus_dir) if args.corpus_dir else _corpus_dir()
    table = json.loads((root / "expectations.json").read_text(encoding="utf-8"))
    outdir = Path(args.out) if args.out else None
    if outdir:
        outdir.mkdir(parents=True, exist_ok=True)
    status = EXIT_OK
    for name in sorted(table):
        exp = table[name]
        data, ok = _run_one(root / name, args, exp.get("mode"), exp.get("degree"))
        match = data["classification"] == exp["classification"]
        line = "%-28s %-28s %s" % (name, data["classification"], "ok" if match else "MISMATCH (expected %s)" % exp["classification"])
        if not ok:
            line += " INVARIANT VIOLATION"
            status = EXIT_INVARIANT
        elif not match and status == EXIT_OK:
            status = EXIT_MISMATCH
        print(line)
        if outdir:
            suffix = ".json" if args.format == "json" else ".txt"
            (outdir / (Path(name).stem + suffix)).write_text(_render(data, args.format), encoding="utf-8")
    return status


def _run(args) -> int:
    if args.corpus:
        return _corpus(args)
    if not args.input:
        raise UsageError("run needs --input FILE or --corpus")
    data, ok = _run_one(Path(args.input), args)
    _emit(_render(data, args.format), args.out)
    return EXIT_OK if ok else EXIT_INVARIANT


def _verify(args) -> int:
    status = EXIT_OK
    for name in args.reports:
        try:
            data = json.loads(Path(name).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise UsageError("cannot read report %s: %s" % (name, exc))
        if data.get("schema") != SCHEMA:
            raise UsageError("%s: unsupported schema %r" % (name, data.get("schema")))
        problems = verify_report(data)
        for p in problems:
            print("%s: %s" % (name, p))
        if problems:
            status = EXIT_INVARIANT
        else:
            print("%s: verified" % name)
    return status


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="internality",
                                description="Decide internality to the constants for rational vector fields.")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="analyze a system file or the bundled corpus")
    r.add_argument("--input", help="system file")
    r.add_argument("--degree", type=int, default=4, help="degree bound for Darboux polynomials")
    r.add_argument("--mode", choices=MODES, default="auto")
    r.add_argument("--lambda-scan", type=int, default=6, dest="lambda_scan")
    r.add_argument("--truncation", type=int, default=8)
    r.add_argument("--format", choices=("text", "json"), default="text")
    r.add_argument("--out", help="output file (a directory with --corpus)")
    r.add_argument("--corpus", action="store_true", help="run every corpus file against the expectations table")
    r.add_argument("--corpus-dir", help="corpus directory (defaults to the bundled one)")
    v = sub.add_parser("verify", help="re-verify JSON reports")
    v.add_argument("reports", nargs="+")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.command == "run":
            if args.degree < 1 or args.lambda_scan < 1 or args.truncation < 0:
                raise UsageError("degree and lambda-scan must be positive, truncation nonnegative")
            return _run(args)
        return _verify(args)
    except (UsageError, ParseError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE


def run(argv) -> int:
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
