"""Command line front end.

Exit codes: 0 success, 1 a verification failed, 2 usage error (including an
inadmissible pair or an unsupported field size).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .arith import IntPolynomial
from .weights import (LARGEST_PAIR_NOTE, AdmissiblePair, InadmissibleError, curve_correction,
                      enumerate_admissible, singular_strata, vafa_summary)

SCHEMA = 1
EXACT_FLOAT_LIMIT = 2**53
DEFAULT_FIXTURES = [
    ((5, (1, 1, 1, 1, 1)), 11),
    ((8, (1, 1, 2, 2, 2)), 17),
    ((6, (1, 1, 1, 1, 2)), 7),
    ((10, (1, 1, 1, 2, 5)), 11),
]
ALL_ROUTES = ("weil", "dwork", "brute")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# output


def jsonable(x):
    """Exact JSON form: big ints and fractions become decimal strings."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return str(x) if abs(x) > EXACT_FLOAT_LIMIT else x
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else jsonable(x.numerator)
    if isinstance(x, IntPolynomial):
        return [jsonable(c) for c in x.coeffs]
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, float):
        raise TypeError("floats are not allowed in JSON output")
    return str(x)


def cell(x) -> str:
    if isinstance(x, (tuple, list)):
        return "[" + ",".join(cell(v) for v in x) + "]"
    if isinstance(x, IntPolynomial):
        return cell(list(x.coeffs))
    if isinstance(x, bool):
        return "yes" if x else "no"
    if x is None:
        return "-"
    return str(x)


@dataclass
class Output:
    """A result: a header dict, an optional table and notes for stderr."""

    command: str
    data: dict = field(default_factory=dict)
    columns: list = field(default_factory=list)
    rows: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    ok: bool = True

    def render(self, fmt: str) -> str:
        if fmt == "json":
            doc = {"schema": SCHEMA, "command": self.command, "ok": self.ok}
            doc.update(jsonable(self.data))
            if self.columns:
                doc["rows"] = [jsonable(dict(zip(self.columns, r))) for r in self.rows]
            if self.notes:
                doc["notes"] = list(self.notes)
            return json.dumps(doc, indent=2) + "\n"
        if fmt == "csv":
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            if self.columns:
                w.writerow(self.columns)
                w.writerows([[cell(x) for x in r] for r in self.rows])
            else:
                w.writerow(["key", "value"])
                w.writerows([[k, cell(v)] for k, v in self.data.items()])
            return buf.getvalue()
        lines = [f"{k}: {cell(v)}" for k, v in self.data.items()]
        if self.columns:
            table = [self.columns] + [[cell(x) for x in r] for r in self.rows]
            widths = [max(len(r[i]) for r in table) for i in range(len(self.columns))]
            if lines:
                lines.append("")
            for r in table:
                lines.append("  ".join(s.ljust(w) for s, w in zip(r, widths)).rstrip())
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# helpers


def make_pair(values) -> AdmissiblePair:
    m, *Q = values
    return AdmissiblePair(m, tuple(Q))


def open_cache(args):
    directory = getattr(args, "cache", None) or os.environ.get("MOTIVE_FORGE_CACHE")
    if not directory:
        return None
    from .zeta import FactorCache
    return FactorCache(directory)


def parse_routes(text):
    routes = tuple(r.strip() for r in text.split(",") if r.strip())
    bad = [r for r in routes if r not in ALL_ROUTES]
    if bad or not routes:
        raise UsageError(f"unknown route(s) {bad or text!r}; choose from {','.join(ALL_ROUTES)}")
    return routes


def need_q(args):
    if args.q is None:
        raise UsageError("--q is required")
    from .zeta import prime_power
    try:
        prime_power(args.q)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return args.q


def frac(x):
    return None if x is None else str(x)


# ---------------------------------------------------------------------------
# weights


def cmd_weights_list(args):
    out = Output("weights list",
                 columns=["m", "q1", "q2", "q3", "q4", "q5", "h11", "h21", "chi"],
                 notes=[LARGEST_PAIR_NOTE])
    for p in enumerate_admissible():
        s = vafa_summary(p)
        out.rows.append([p.m, *p.Q, s.h11, s.h21, s.chi])
    out.data["count"] = len(out.rows)
    if args.format == "csv":
        out.data = {}
    return out


def cmd_weights_check(args):
    p = make_pair(args.pair)
    return Output("weights check", {"pair": str(p), "m": p.m, "Q": p.Q, "admissible": True})


def cmd_weights_summary(args):
    p = make_pair(args.pair)
    s = vafa_summary(p)
    out = Output("weights summary", {
        "pair": str(p), "m": p.m, "Q": p.Q,
        "B3_Y": s.B3_Y, "B3_X": s.B3_X, "chi": s.chi, "h11": s.h11, "h21": s.h21,
        "curve_correction": curve_correction(p),
    })
    out.columns = ["S", "c_I", "kind", "ells", "m_prime", "Q_prime", "genus", "m_C"]
    for st in singular_strata(p):
        if st.kind != "none":
            out.rows.append([[j + 1 for j in st.S], st.c_I, st.kind, len(st.ells), st.m_prime,
                             st.Q_prime, st.genus, st.m_C])
    if p.Q == (1, 42, 258, 602, 903):
        out.notes.append(LARGEST_PAIR_NOTE)
    return out


# ---------------------------------------------------------------------------
# motives, mirror, monomials


def cmd_motives_table(args):
    from .motives import aggregate, motive_table

    p = make_pair(args.pair)
    a = aggregate(p)
    out = Output("motives table", {"pair": str(p), "h30": a.h30, "h21_Y": a.h21_Y,
                                   "B3_Y": a.B3_Y, "h21_X": a.h21_X, "B3_X": a.B3_X},
                 columns=["motive", "mult", "dim", "h30", "h21", "h21_total", "B3_total"])
    for r in motive_table(p):
        out.rows.append([r.label, r.mult, r.dim, r.h30, r.h21_per_orbit, r.h21_total, r.B3_total])
    return out


def cmd_mirror_invariants(args):
    from .mirror import invariant_motives

    p = make_pair(args.pair)
    inv = invariant_motives(p)
    total = sum(o.dim for o in inv)
    target = 2 * (1 + vafa_summary(p).h11)
    out = Output("mirror invariants", {"pair": str(p), "B3_invariant": total,
                                       "two_plus_two_h11": target},
                 columns=["motive", "representative", "dim", "h30", "h21"])
    for o in inv:
        out.rows.append([o.label, o.representative, o.dim, o.h30, o.h21])
    out.ok = total == target
    return out


def cmd_mirror_group(args):
    from .mirror import build_ghat, gq_order

    p = make_pair(args.pair)
    G = build_ghat(p)
    return Output("mirror group", {"pair": str(p), "order": G.order, "structure": G.structure(),
                                   "order_G_Q": gq_order(p),
                                   "product_is_m_cubed": G.order * gq_order(p) == p.m**3})


def cmd_monomials_classify(args):
    from .monomials import classify

    p = make_pair(args.pair)
    out = Output("monomials classify", {"pair": str(p)},
                 columns=["monomial", "deg_w", "mult", "orbit_length", "deg_R", "conifold_only"])
    for c in classify(p):
        out.rows.append([c.representative, c.weighted_degree, c.mult, c.orbit_length,
                         c.degree_R, c.conifold_only])
    out.data["classes"] = len(out.rows)
    return out


def cmd_monomials_correspond(args):
    from .monomials import correspondence

    p = make_pair(args.pair)
    out = Output("monomials correspond", {"pair": str(p)},
                 columns=["block", "monomial", "deg_R", "lambda", "motive", "dim", "mult"])
    for i, b in enumerate(correspondence(p), 1):
        n = max(len(b.classes), len(b.motives))
        for j in range(n):
            c = b.classes[j] if j < len(b.classes) else None
            r = b.motives[j] if j < len(b.motives) else None
            out.rows.append([
                i,
                c.representative if c else None,
                c.degree_R if c else None,
                c.mult if c else None,
                (r.label if r else ("ConifoldOnly" if not b.motives and j == 0 else None)),
                r.dim if r else None,
                r.mult if r else None,
            ])
    return out


# ---------------------------------------------------------------------------
# polytopes


def cmd_polytope_info(args):
    from .polytopes import polytope_pair

    p = make_pair(args.pair)
    pp = polytope_pair(p)
    out = Output("polytope info", {
        "pair": str(p),
        "delta_vertices": pp.delta.vertices, "dual_vertices": pp.dual.vertices,
        "delta_points": len(pp.delta.lattice_points()),
        "dual_points": len(pp.dual.lattice_points()),
        "delta_reflexive": pp.delta.is_reflexive, "dual_reflexive": pp.dual.is_reflexive,
    }, columns=["dim", "vertices", "l", "l_dual"])
    if pp.delta.is_reflexive:
        for f in pp.delta.faces():
            if f.dim in (1, 2, 3):
                out.rows.append([f.dim, f.vertices, f.n_interior, pp.dual_face(f).n_interior])
    return out


def cmd_polytope_hodge(args):
    from .polytopes import batyrev_hodge, polytope_pair

    p = make_pair(args.pair)
    b = batyrev_hodge(polytope_pair(p))
    s = vafa_summary(p)
    out = Output("polytope hodge", {
        "pair": str(p), "h11": b.h11, "h21": b.h21,
        "codim2_correction_h11": b.codim2_correction_h11,
        "codim2_correction_h21": b.codim2_correction_h21,
        "vafa_h11": s.h11, "vafa_h21": s.h21,
    })
    out.ok = (b.h11, b.h21) == (s.h11, s.h21)
    return out


# ---------------------------------------------------------------------------
# zeta


def cmd_zeta_factors(args):
    from .zeta import factor_table

    p = make_pair(args.pair)
    q = need_q(args)
    cache = open_cache(args)
    out = Output("zeta factors", {"pair": str(p), "q": q},
                 columns=["motive", "mult", "dim", "regime", "P3", "P3_printed", "slopes"])
    ok = True
    for row, lf in factor_table(p, q, cache):
        out.rows.append([row.label, row.mult, row.dim, lf.regime, lf.poly, lf.printed,
                         [str(s) for s in lf.slopes]])
        ok = ok and lf.degree == row.dim
    out.ok = ok
    if cache is not None:
        out.data["cache_hits"] = cache.hits
    return out


def cmd_zeta_count(args):
    from .zeta import count_report

    p = make_pair(args.pair)
    q = need_q(args)
    rep = count_report(p, q, parse_routes(args.routes))
    out = Output("zeta count", {
        "pair": str(p), "q": q, "N_motive": rep.N_motive, "N_mon": frac(rep.N_mon),
        "N_mon_grouped": frac(rep.N_mon_grouped), "N_brute_affine": rep.N_brute,
        "weil_projective": rep.weil,
    }, columns=["check", "equal"])
    out.rows = [[k, v] for k, v in rep.checks.items()]
    out.ok = rep.ok
    return out


def _mirror_records(p, q, cache):
    from .zeta import constant_class_factor, mirror_factor

    t = time.perf_counter()
    mf = mirror_factor(p, q, cache)
    recs = []
    if (q - 1) % p.m == 0:
        r0 = constant_class_factor(p, q)
        recs.append(Record("mirror factor = R([0],t)", mf, r0, time.perf_counter() - t))
    return mf, recs


def cmd_zeta_mirror(args):
    p = make_pair(args.pair)
    q = need_q(args)
    mf, recs = _mirror_records(p, q, open_cache(args))
    out = Output("zeta mirror", {"pair": str(p), "q": q, "mirror_factor": mf,
                                 "degree": mf.degree})
    for r in recs:
        out.data["R0"] = r.b
        out.data["equal"] = r.equal
    out.ok = all(r.equal for r in recs)
    return out


def cmd_zeta_verify(args):
    p = make_pair(args.pair)
    q = need_q(args)
    rep = verify_pair(p, q, open_cache(args), zeta_only=True)
    return rep.output("zeta verify")


# ---------------------------------------------------------------------------
# padic


def cmd_padic_gk(args):
    from .arith import is_prime
    from .padic import gk_table

    if args.p is None or not is_prime(args.p) or args.p < 3:
        raise UsageError("--p must be an odd prime")
    M = args.prec or 20
    rows = gk_table(args.p, M)
    out = Output("padic gk", {"p": args.p, "precision": M,
                              "calibration_unit": rows[0].unit if rows else None},
                 columns=["n", "valuation", "lhs_val_pi", "rhs_val_pi", "ok"])
    for r in rows:
        out.rows.append([r.n, str(r.valuation), r.lhs_valuation, r.rhs_valuation, r.ok])
    out.ok = all(r.ok for r in rows)
    return out


# ---------------------------------------------------------------------------
# cross-route verification


@dataclass
class Record:
    name: str
    a: object
    b: object
    runtime: float = 0.0

    @property
    def equal(self) -> bool:
        return self.a == self.b


@dataclass
class VerificationReport:
    records: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.equal for r in self.records)

    def add(self, name, fn):
        t = time.perf_counter()
        a, b = fn()
        self.records.append(Record(name, a, b, time.perf_counter() - t))

    def output(self, command) -> Output:
        out = Output(command, {"checks": len(self.records),
                               "failed": sum(not r.equal for r in self.records)},
                     columns=["check", "route_a", "route_b", "equal", "runtime_ms"])
        for r in self.records:
            a, b = r.a, r.b
            out.rows.append([r.name, a, b, r.equal, int(r.runtime * 1000)])
        out.ok = self.ok
        return out


def verify_pair(p, q, cache=None, zeta_only=False, report=None) -> VerificationReport:
    from .motives import aggregate
    from .polytopes import batyrev_hodge, polytope_pair
    from .zeta import count_report, factor_table, full_P3, regime

    rep = report or VerificationReport()
    tag = f"{p} "
    if not zeta_only:
        s = vafa_summary(p)
        rep.add(tag + "Vafa B3(X) = motivic", lambda: (s.B3_X, aggregate(p).B3_X))
        rep.add(tag + "Vafa h21(X) = motivic", lambda: (s.h21, aggregate(p).h21_X))
        rep.add(tag + "chi = 2(h11 - h21)", lambda: (s.chi, 2 * (s.h11 - s.h21)))
        b = batyrev_hodge(polytope_pair(p))
        rep.add(tag + "Batyrev (h11,h21) = Vafa", lambda: ((b.h11, b.h21), (s.h11, s.h21)))
    if regime(p.m, q) == "unsupported":
        raise UsageError(f"q={q} is neither 1 mod {p.m} nor supersingular for m={p.m}")
    tag = f"{p} q={q} "
    c = count_report(p, q)
    if c.N_mon is not None and c.N_motive is not None:
        rep.records.append(Record(tag + "N_motive = N_mon", c.N_motive, c.N_mon))
    if c.N_brute is not None:
        rep.records.append(Record(tag + "brute = q^4 - (q-1) N_motive", c.N_brute,
                                  q**4 - (q - 1) * c.N_motive))
    for name, val in c.checks.items():
        if name not in ("N_motive = N_mon", "brute = q^4 - (q-1) N_motive"):
            rep.records.append(Record(tag + name, val, True))
    if regime(p.m, q) == "jacobi":
        rep.add(tag + "deg P3 = B3(Y)", lambda: (full_P3(p, q, cache).degree, aggregate(p).B3_Y))
        rep.add(tag + "Riemann hypothesis |roots| = q^(3/2)",
                lambda: (all(lf.riemann_ok() for _, lf in factor_table(p, q, cache)), True))
        _, recs = _mirror_records(p, q, cache)
        for r in recs:
            r.name = tag + r.name
            rep.records.append(r)
    return rep


def cmd_verify_all(args):
    if args.pair:
        if args.q is None:
            raise UsageError("--pair needs --q")
        fixtures = [(make_pair(args.pair), need_q(args))]
    else:
        fixtures = [(AdmissiblePair(m, Q), q) for (m, Q), q in DEFAULT_FIXTURES]
    cache = open_cache(args)
    rep = VerificationReport()
    for p, q in fixtures:
        verify_pair(p, q, cache, report=rep)
    out = rep.output("verify-all")
    out.data["fixtures"] = [f"{p} q={q}" for p, q in fixtures]
    return out


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    def output_flags(parser, default):
        # subparsers get SUPPRESS defaults so they do not clobber flags given before the verb
        d = (lambda v: v) if default else (lambda v: argparse.SUPPRESS)
        parser.add_argument("--format", choices=["table", "json", "csv"], default=d("table"))
        parser.add_argument("--json", action="store_true", default=d(False),
                            help="shorthand for --format json")
        parser.add_argument("--cache", metavar="DIR", default=d(None),
                            help="factor cache directory (default: $MOTIVE_FORGE_CACHE, else off)")

    common = argparse.ArgumentParser(add_help=False)
    output_flags(common, default=False)
    parser = argparse.ArgumentParser(prog="motive-forge",
                                     description="Weighted Fermat Calabi-Yau threefolds.")
    output_flags(parser, default=True)
    verbs = parser.add_subparsers(dest="verb", required=True)

    def pair_cmd(sub, name, fn, help=None, q=False):
        sp = sub.add_parser(name, parents=[common], help=help)
        sp.add_argument("pair", nargs=6, type=int, metavar="N", help="m q1 q2 q3 q4 q5")
        if q:
            sp.add_argument("--q", type=int, default=None)
        sp.set_defaults(fn=fn)
        return sp

    w = verbs.add_parser("weights", parents=[common]).add_subparsers(dest="action", required=True)
    w.add_parser("list", parents=[common]).set_defaults(fn=cmd_weights_list)
    pair_cmd(w, "check", cmd_weights_check)
    pair_cmd(w, "summary", cmd_weights_summary)

    mo = verbs.add_parser("motives", parents=[common]).add_subparsers(dest="action", required=True)
    pair_cmd(mo, "table", cmd_motives_table)

    mi = verbs.add_parser("mirror", parents=[common]).add_subparsers(dest="action", required=True)
    pair_cmd(mi, "invariants", cmd_mirror_invariants)
    pair_cmd(mi, "group", cmd_mirror_group)

    mn = verbs.add_parser("monomials", parents=[common]).add_subparsers(dest="action",
                                                                         required=True)
    pair_cmd(mn, "classify", cmd_monomials_classify)
    pair_cmd(mn, "correspond", cmd_monomials_correspond)

    po = verbs.add_parser("polytope", parents=[common]).add_subparsers(dest="action",
                                                                        required=True)
    pair_cmd(po, "info", cmd_polytope_info)
    pair_cmd(po, "hodge", cmd_polytope_hodge)

    z = verbs.add_parser("zeta", parents=[common]).add_subparsers(dest="action", required=True)
    pair_cmd(z, "factors", cmd_zeta_factors, q=True)
    pair_cmd(z, "count", cmd_zeta_count, q=True).add_argument(
        "--routes", default=",".join(ALL_ROUTES))
    pair_cmd(z, "mirror", cmd_zeta_mirror, q=True)
    pair_cmd(z, "verify", cmd_zeta_verify, q=True)

    pa = verbs.add_parser("padic", parents=[common]).add_subparsers(dest="action", required=True)
    gk = pa.add_parser("gk", parents=[common])
    gk.add_argument("--p", type=int, default=None)
    gk.add_argument("--prec", type=int, default=None, help="pi-adic precision M (default 20)")
    gk.set_defaults(fn=cmd_padic_gk)

    va = verbs.add_parser("verify-all", parents=[common])
    va.add_argument("--pair", nargs=6, type=int, metavar="N", default=None)
    va.add_argument("--q", type=int, default=None)
    va.set_defaults(fn=cmd_verify_all)
    return parser


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    fmt = "json" if args.json else args.format
    args.format = fmt
    from .zeta import UnsupportedField
    try:
        out = args.fn(args)
    except InadmissibleError as exc:
        print(f"error: inadmissible pair: {exc}", file=stderr)
        return 2
    except (UsageError, UnsupportedField) as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    stdout.write(out.render(fmt))
    if fmt != "json":
        for n in out.notes:
            print(f"note: {n}", file=stderr)
    return 0 if out.ok else 1


if __name__ == "__main__":
    sys.exit(main())
