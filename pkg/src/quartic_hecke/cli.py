"""Command-line entry point: ``quartic-hecke <subcommand> ...``.

Exit status is 0 on success, 1 when a computation raises, 2 on usage errors.
Reports are deterministic JSON carrying the config echo, a hash of every
module's source and a hash of the cache file, so identical inputs and cache
state give byte-identical output.  ``CACHE_DIR`` and ``THREADS`` in the
environment supply defaults for ``--cache-dir`` and ``--threads``.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .errors import QuarticHeckeError
from .gaussint import GaussInt, format_gaussint, parse_gaussint

SCHEMA = "quartic-hecke-report/1"
CSV_COLUMNS = ("q_re", "q_im", "omega", "L_re", "L_im", "err", "nonzero_flag")
_MODULES = ("gaussint", "quartic", "gauss_sums", "hecke", "analytic", "lvalues", "moments",
            "metaplectic", "cli")
_REPORT_DEFAULT = {"scan", "moment", "census", "psi-check"}


@dataclass
class RunConfig:
    command: str
    params: dict
    tol: float | None = None
    cache_dir: str | None = None
    threads: int = 1
    fmt: str = "text"
    out: str | None = None
    extra: dict = field(default_factory=dict)

    def validate(self):
        if self.tol is not None and not self.tol > 0:
            raise UsageError("--tol must be positive")
        if self.threads < 1:
            raise UsageError("--threads must be at least 1")
        if self.cache_dir is not None:
            p = Path(self.cache_dir)
            try:
                p.mkdir(parents=True, exist_ok=True)
            except OSError:
                self.cache_dir = None
            else:
                if not os.access(p, os.W_OK):
                    self.cache_dir = None

    def echo(self) -> dict:
        return {"command": self.command, "params": self.params, "tol": self.tol,
                "cache_dir": self.cache_dir, "format": self.fmt}


class UsageError(Exception):
    pass


@dataclass
class Outcome:
    text: str
    result: object
    records: list | None = None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# argument types ------------------------------------------------------------------------

def _gint(text: str) -> GaussInt:
    try:
        return parse_gaussint(text)
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"not a Gaussian integer: {text!r}") from exc


def _lamfrac(text: str):
    from .gauss_sums import LamFrac, parse_lamfrac
    try:
        if "lam" in text:
            return parse_lamfrac(text)
        return LamFrac.of(parse_gaussint(text))
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"not a Gaussian integer or lam^-k*gint: {text!r}") from exc


def _positive(text: str) -> float:
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return x


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {text!r}") from exc


def _complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, str):
        return complex(v.replace(" ", "").replace("i", "j"))
    return complex(v)


# serialization ---------------------------------------------------------------------------

def jsonable(obj):
    """Plain JSON structure: complex → [re, im], GaussInt → string, non-finite → null."""
    if isinstance(obj, GaussInt):
        return format_gaussint(obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, complex):
        return [jsonable(obj.real), jsonable(obj.imag)]
    if hasattr(obj, "item") and not hasattr(obj, "__len__"):
        return jsonable(obj.item())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)
                if f.repr}
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if hasattr(obj, "tolist"):
        return jsonable(obj.tolist())
    return str(obj)


def module_hashes() -> dict[str, str]:
    here = Path(__file__).resolve().parent
    out = {}
    for name in _MODULES:
        data = (here / f"{name}.py").read_bytes()
        out[name] = hashlib.sha256(data).hexdigest()[:16]
    return out


def cache_hash(cache_dir: str | None) -> str | None:
    if cache_dir is None:
        return None
    from .lvalues import LValueCache
    path = Path(cache_dir) / LValueCache.FILENAME
    if not path.exists():
        return hashlib.sha256(b"").hexdigest()[:16]
    return hashlib.sha256(path.read_bytes()).hexdigest()[:16]


def build_report(cfg: RunConfig, result) -> dict:
    return {
        "schema": SCHEMA,
        "version": __version__,
        "config": jsonable(cfg.echo()),
        "modules": module_hashes(),
        "cache_state": cache_hash(cfg.cache_dir),
        "result": jsonable(result),
    }


def records_csv(records, threshold: float = 1e-6) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        flag = int(abs(r.value) > max(threshold, 3 * r.err))
        w.writerow([r.q.re, r.q.im, r.omega, repr(r.value.real), repr(r.value.imag), repr(r.err), flag])
    return buf.getvalue()


# subcommands --------------------------------------------------------------------------------

def _cache(cfg: RunConfig):
    from .lvalues import LValueCache
    return LValueCache(cfg.cache_dir) if cfg.cache_dir else None


def cmd_symbol(a, cfg):
    from .quartic import quartic_symbol_euler, quartic_symbol_fast
    out = {}
    if a.method in ("euler", "both"):
        out["euler"] = quartic_symbol_euler(a.a, a.c)
    if a.method in ("fast", "both"):
        out["fast"] = quartic_symbol_fast(a.a, a.c)
    vals = {str(v) for v in out.values()}
    if len(vals) > 1:
        raise QuarticHeckeError(f"method mismatch: euler={out['euler']} fast={out['fast']}")
    return Outcome(vals.pop(), {k: str(v) for k, v in out.items()})


def cmd_gauss_sum(a, cfg):
    from .gauss_sums import gauss4_direct, gauss4_fast
    out = {}
    if a.method in ("direct", "both"):
        out["direct"] = gauss4_direct(a.nu, a.c)
    if a.method in ("fast", "both"):
        out["fast"] = gauss4_fast(a.nu, a.c)
    if a.method == "both":
        d, f = out["direct"], out["fast"]
        if abs(d.value - f.value) > d.err + f.err:
            raise QuarticHeckeError(f"method mismatch: |direct - fast| = {abs(d.value - f.value):.3e}")
    v = next(iter(out.values()))
    return Outcome(f"{_fmt_c(v.value)} ± {v.err:.1e}", out)


def cmd_root_number(a, cfg):
    from .hecke import make_spec, root_number_direct, root_number_formula
    spec = make_spec(a.q, a.omega)
    out = {}
    if a.method in ("formula", "both"):
        out["formula"] = root_number_formula(spec, convention=a.convention)
    if a.method in ("direct", "both"):
        out["direct"] = root_number_direct(spec, convention=a.convention)
    if a.method == "both":
        (f, fe), (d, de) = out["formula"], out["direct"]
        if abs(f - d) > max(1e-8, fe + de):
            raise QuarticHeckeError(f"method mismatch: |formula - direct| = {abs(f - d):.3e}")
    v, e = next(iter(out.values()))
    return Outcome(f"{_fmt_c(v)} ± {e:.1e}", {k: {"value": v, "err": e} for k, (v, e) in out.items()})


def cmd_character(a, cfg):
    from .hecke import make_spec, nu_eval
    v = nu_eval(make_spec(a.q, a.omega), a.n)
    return Outcome(_fmt_c(v), {"value": v})


def cmd_lvalue(a, cfg):
    from .hecke import make_spec
    from .lvalues import central_value
    cache = _cache(cfg)
    rec = cache.get(a.q, a.omega, a.U) if cache is not None else None
    tol = cfg.tol or 1e-10
    if rec is None or rec.err > 10 * tol:
        rec = central_value(make_spec(a.q, a.omega), a.U, tol=tol, interpolate=a.interpolate)
        if cache is not None:
            cache.put(rec)
            cache.flush()
    return Outcome(f"{_fmt_c(rec.value)} ± {rec.err:.1e}", rec, [rec])


def cmd_kernel(a, cfg):
    from .analytic import V_omega, W_omega
    k = (V_omega if a.which == "V" else W_omega)(a.y, a.omega)
    return Outcome(f"{k.value!r} ± {k.err:.1e}", k)


def cmd_poisson(a, cfg):
    from .analytic import poisson_verify
    kw = {"tol": cfg.tol} if cfg.tol else {}
    r = poisson_verify(a.level, a.q, profile=a.profile, M=a.M, c=a.c, **kw)
    return Outcome(f"discrepancy {r.discrepancy:.3e}", r)


def cmd_psi_check(a, cfg):
    from .gauss_sums import LamFrac
    from .metaplectic import verify_corollary62, verify_lemma61
    try:
        p = json.loads(a.params)
    except json.JSONDecodeError as exc:
        raise UsageError(f"--params is not valid JSON: {exc}") from exc
    if not isinstance(p, dict):
        raise UsageError("--params must be a JSON object")
    g = lambda k, d="1": _gint(str(p.get(k, d)))  # noqa: E731
    r = p.get("r", "1")
    r = _lamfrac(str(r)) if not isinstance(r, LamFrac) else r
    common = dict(r=r, s=_complex(p.get("s", 2)), omega=int(p.get("omega", 0)), v=g("v"),
                  cutoff=float(p.get("cutoff", 10**4)), variant=p.get("variant", "corrected"))
    if a.lemma == "cor6.2":
        chk = verify_corollary62(g("a"), g("b"), g("c"), g("d"), **common)
    else:
        chk = verify_lemma61(a.lemma[3:], g("alpha"), g("beta"), **common)
    text = f"{chk.name}: discrepancy {chk.discrepancy:.3e} bound {chk.bound:.3e} {'PASS' if chk.passed else 'FAIL'}"
    return Outcome(text, {"check": chk, "passed": chk.passed})


def cmd_euler_const(a, cfg):
    from .moments import euler_constant
    v, e = euler_constant(a.name, a.omega, int(a.cutoff))
    return Outcome(f"{_fmt_c(v)} ± {e:.1e}", {"value": v, "err": e})


def cmd_moment(a, cfg):
    from .moments import mollified_moments, second_moment_experiment
    tol = cfg.tol or 1e-8
    cache = _cache(cfg)
    if a.kind == "second":
        rep = second_moment_experiment(a.X, a.omega, tol=tol, cache=cache, workers=cfg.threads,
                                       mutual_rate=a.mutual_rate)
        text = f"slope {rep.slope:.4f} intercept {rep.intercept:.4f}"
        return Outcome(text, rep.to_dict())
    if len(a.X) != 1:
        raise UsageError("--kind mollified takes a single --X")
    mm = mollified_moments(a.X[0], a.M, a.Y, a.U, a.omega, a.theta, tol=tol, cache=cache,
                           workers=cfg.threads)
    res = jsonable(mm)
    res["note"] = ("theta is a desk-scale choice; the proportion argument needs theta far "
                   "below what finite X can exhibit")
    return Outcome(f"S1 {_fmt_c(mm.S1)} S2 {mm.S2:.6g} cs_ratio {mm.cs_ratio:.4f}", res)


def cmd_scan(a, cfg):
    from .lvalues import LValueCache
    from .moments import family, second_moment_experiment
    tol = cfg.tol or 1e-8
    cache = _cache(cfg) or LValueCache(None)
    windows = a.windows or [a.X]
    rep = second_moment_experiment(windows, a.omega, tol=tol, cache=cache, workers=cfg.threads,
                                   mutual_rate=a.mutual_rate)
    if a.csv:
        recs = [cache.records[(q.re, q.im, a.omega, 1.0)] for X in sorted(windows) for q in family(X)
                if (q.re, q.im, a.omega, 1.0) in cache.records]
        Path(a.csv).write_text(records_csv(recs))
    d = rep.to_dict()
    d["family_size"] = sum(w.family_size for w in rep.windows)
    return Outcome(f"family {d['family_size']} slope {rep.slope:.4f}", d)


def cmd_census(a, cfg):
    from .moments import nonvanishing_census
    c = nonvanishing_census(a.X, a.omega, threshold=a.threshold, tol=cfg.tol or 1e-10,
                            cache=_cache(cfg), workers=cfg.threads)
    if a.csv:
        Path(a.csv).write_text(records_csv(c.records, a.threshold))
    res = {"X": c.X, "omega": c.omega, "threshold": c.threshold, "total": c.total,
           "nonzero": c.nonzero, "undecidable": c.undecidable, "proportion": c.proportion,
           "band_fraction": c.band_fraction}
    return Outcome(f"nonzero {c.nonzero}/{c.total} ({c.proportion:.3f}), undecidable {c.undecidable}", res,
                   c.records)


def _fmt_c(z) -> str:
    z = complex(z)
    if z.imag == 0:
        return repr(z.real)
    return f"{z.real!r}{'+' if z.imag >= 0 else '-'}{abs(z.imag)!r}i"


# parser ------------------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", dest="fmt", choices=("json", "csv", "text"), default=None)
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("--tol", type=_positive, default=None)
    common.add_argument("--cache-dir", default=os.environ.get("CACHE_DIR") or None)
    common.add_argument("--threads", type=int, default=int(os.environ.get("THREADS", "1") or 1))

    p = _Parser(prog="quartic-hecke", description="Quartic Hecke characters over Z[i]: symbols, "
                "Gauss sums, central L-values and desk-scale moment experiments.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("symbol", parents=[common], help="quartic residue symbol (a/c)_4")
    s.add_argument("--a", type=_gint, required=True)
    s.add_argument("--c", type=_gint, required=True)
    s.add_argument("--method", choices=("euler", "fast", "both"), default="fast")
    s.set_defaults(func=cmd_symbol)

    s = sub.add_parser("gauss-sum", parents=[common], help="quartic Gauss sum g4(nu, c)")
    s.add_argument("--nu", type=_lamfrac, required=True)
    s.add_argument("--c", type=_gint, required=True)
    s.add_argument("--method", choices=("direct", "fast", "both"), default="fast")
    s.set_defaults(func=cmd_gauss_sum)

    s = sub.add_parser("root-number", parents=[common], help="root number W(nu_{q,omega})")
    s.add_argument("--q", type=_gint, required=True)
    s.add_argument("--omega", type=int, required=True)
    s.add_argument("--method", choices=("formula", "direct", "both"), default="formula")
    s.add_argument("--convention", choices=("printed", "afe"), default="printed")
    s.set_defaults(func=cmd_root_number)

    s = sub.add_parser("character", parents=[common], help="evaluate nu_{q,omega}(n)")
    s.add_argument("--q", type=_gint, required=True)
    s.add_argument("--omega", type=int, required=True)
    s.add_argument("--n", type=_gint, required=True)
    s.set_defaults(func=cmd_character)

    s = sub.add_parser("lvalue", parents=[common], help="central value L(1/2, nu_{q,omega})")
    s.add_argument("--q", type=_gint, required=True)
    s.add_argument("--omega", type=int, required=True)
    s.add_argument("--U", type=_positive, default=1.0)
    s.add_argument("--interpolate", action="store_true")
    s.set_defaults(func=cmd_lvalue)

    s = sub.add_parser("kernel", parents=[common], help="AFE kernels V_omega, W_omega")
    s.add_argument("--which", choices=("V", "W"), required=True)
    s.add_argument("--omega", type=int, required=True)
    s.add_argument("--y", type=_positive, required=True)
    s.set_defaults(func=cmd_kernel)

    s = sub.add_parser("poisson-check", parents=[common], help="Poisson summation identities")
    s.add_argument("--level", choices=("plain", "periodic", "congruence"), default="plain")
    s.add_argument("--q", type=_gint, default=GaussInt(1, 0))
    s.add_argument("--c", type=_gint, default=GaussInt(1, 0))
    s.add_argument("--profile", choices=("gaussian", "bump"), default="gaussian")
    s.add_argument("--M", type=_positive, default=None)
    s.set_defaults(func=cmd_poisson)

    s = sub.add_parser("psi-check", parents=[common], help="coprimality-reduction identities for psi")
    s.add_argument("--lemma", choices=("6.1i", "6.1ii", "6.1iii", "6.1iv", "cor6.2"), required=True)
    s.add_argument("--params", default="{}", help="JSON object: alpha, beta (or a, b, c, d), r, s, omega, v, cutoff, variant")
    s.set_defaults(func=cmd_psi_check)

    s = sub.add_parser("euler-const", parents=[common], help="Euler-product constants C_omega, D_omega")
    s.add_argument("--name", choices=("C", "D"), required=True)
    s.add_argument("--omega", type=int, required=True)
    s.add_argument("--cutoff", type=_positive, default=1e5)
    s.set_defaults(func=cmd_euler_const)

    s = sub.add_parser("moment", parents=[common], help="second or mollified moment over the family")
    s.add_argument("--kind", choices=("second", "mollified"), required=True)
    s.add_argument("--X", type=_float_list, required=True, help="window(s), comma-separated")
    s.add_argument("--omega", type=int, default=0)
    s.add_argument("--M", type=float, default=1.0)
    s.add_argument("--Y", type=_positive, default=1.0)
    s.add_argument("--U", type=_positive, default=1.0)
    s.add_argument("--theta", type=_positive, default=0.3)
    s.add_argument("--mutual-rate", type=float, default=0.01)
    s.set_defaults(func=cmd_moment)

    s = sub.add_parser("scan", parents=[common], help="second-moment scan over dyadic windows")
    s.add_argument("--X", type=_positive, required=True)
    s.add_argument("--omega", type=int, default=0)
    s.add_argument("--windows", type=_float_list, default=None)
    s.add_argument("--csv", default=None, help="also write per-q records as CSV")
    s.add_argument("--mutual-rate", type=float, default=0.01)
    s.set_defaults(func=cmd_scan)

    s = sub.add_parser("census", parents=[common], help="non-vanishing census over X < N(q) <= 2X")
    s.add_argument("--X", type=_positive, required=True)
    s.add_argument("--omega", type=int, default=0)
    s.add_argument("--threshold", type=_positive, default=1e-6)
    s.add_argument("--csv", default=None)
    s.set_defaults(func=cmd_census)
    return p


def _params(ns: argparse.Namespace) -> dict:
    skip = {"func", "fmt", "out", "tol", "cache_dir", "threads", "command"}
    return {k: jsonable(v) if not hasattr(v, "num") else str(v) for k, v in sorted(vars(ns).items())
            if k not in skip}


def _attach_negative_values(argv: list[str]) -> list[str]:
    """Rewrite ``--c -1-2i`` as ``--c=-1-2i`` so argparse does not read the value as a flag."""
    out: list[str] = []
    for tok in argv:
        if (out and out[-1].startswith("--") and "=" not in out[-1] and len(tok) > 1
                and tok[0] == "-" and (tok[1].isdigit() or tok[1] in "i.")):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _attach_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        ns = parser.parse_args(argv)
        cfg = RunConfig(ns.command, _params(ns), ns.tol, ns.cache_dir, ns.threads,
                        ns.fmt or ("json" if ns.command in _REPORT_DEFAULT else "text"), ns.out)
        cfg.validate()
    except UsageError as exc:
        print(f"quartic-hecke: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        res = ns.func(ns, cfg)
    except (UsageError, argparse.ArgumentTypeError) as exc:
        print(f"quartic-hecke: error: {exc}", file=sys.stderr)
        return 2
    except (QuarticHeckeError, ArithmeticError, ValueError) as exc:
        print(f"quartic-hecke: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if cfg.fmt == "text":
        payload = res.text + "\n"
    elif cfg.fmt == "csv":
        if res.records is None:
            print("quartic-hecke: error: csv output is only available for per-q records", file=sys.stderr)
            return 2
        payload = records_csv(res.records, ns.threshold if ns.command == "census" else 1e-6)
    else:
        payload = json.dumps(build_report(cfg, res.result), sort_keys=True, indent=1) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(payload)
    else:
        sys.stdout.write(payload)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
