"""Command-line front end.

Every command produces an envelope ``{schema_version, command, payload,
exit_code}``; the payload is validated against a per-command JSON schema
before it is printed. ``--format csv`` prints the CSV body alone.
Exit codes: 0 ok, 2 usage, 3 domain error, 4 resource cap.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from dataclasses import dataclass
from fractions import Fraction

import jsonschema

from . import clifford, field_algebra, gaussian_free, graphs, renorm, zerodim
from .errors import ConfigurationError, DomainError, PerturbiaError
from .exact import format_qi, frac_str
from .parser import conjugate, format_polynomial, parse_lagrangian, polynomial_to_json

SCHEMA_VERSION = "1.0"

# ----------------------------------------------------------------- schemas

_STR = {"type": "string"}
_INT = {"type": "integer"}
_NUM = {"type": "number"}
_BOOL = {"type": "boolean"}
_RAT = {"type": "string", "pattern": r"^-?\d+/\d+$"}
_POLY = {"type": "object", "required": ["text", "monomials"],
         "properties": {"text": _STR, "monomials": {"type": "array"}}}
_CSV = {"type": "object", "required": ["csv"], "properties": {"csv": _STR}}


def _obj(required: dict, extra: dict | None = None) -> dict:
    props = dict(required)
    props.update(extra or {})
    return {"type": "object", "required": sorted(required), "properties": props}


PAYLOAD_SCHEMAS = {
    "el": _obj({"lagrangian": _POLY, "euler_lagrange": {"type": "object", "additionalProperties": _POLY}}),
    "noether": _obj({"current": {"type": "array", "items": _POLY}, "conservation": _STR},
                    {"witness": {"type": "array"}}),
    "zerodim.series": {"oneOf": [_CSV, _obj({"caps": {"type": "array"}, "coefficients": {"type": "array"}})]},
    "zerodim.truncation": _obj({"lambda": _NUM, "k_opt": _INT, "partial_sums": {"type": "array"},
                                "quad_value": _NUM, "min_error": _NUM}),
    "zerodim.borel": _obj({"lambda": _NUM, "n_terms": _INT, "borel": _NUM, "quad": _NUM}),
    "zerodim.quad": _obj({"lambda": _NUM, "j": _NUM, "value": _NUM}),
    "graphs.enum": _obj({"v4": _INT, "v1": _INT, "filter": _STR, "classes": {"type": "array"},
                         "matching_check": _BOOL}, {"diagnostic": {"type": ["string", "null"]}}),
    "graphs.analyze": _obj({"canonical_code": _STR, "aut_order": _INT, "loop_number": _INT}),
    "free.greens": _obj({"N": _INT, "terms": {"type": "array"}, "count": _INT}),
    "free.propagator": {"oneOf": [_CSV, _obj({"m": _NUM, "points": {"type": "array"}})]},
    "free.gauss": _obj({"closed_form": {"type": "array"}}, {"quadrature": {"type": ["array", "null"]}}),
    "renorm.map": _obj({"values": {"type": "object", "additionalProperties": _RAT},
                        "one_pi_supported": _BOOL}),
    "renorm.check": _obj({"seed": _INT, "graphs": _INT, "results": {"type": "object",
                                                                      "additionalProperties": _BOOL}}),
    "renorm.dyson": _obj({"d": _INT, "max_power": {"type": ["integer", "string"]}}),
    "clifford.classify": _obj({"p": _INT, "q": _INT, "ring": _STR, "matrix_size": _INT, "label": _STR}),
    "clifford.center": _obj({"p": _INT, "q": _INT, "even": _BOOL, "basis": {"type": "array"}, "dimension": _INT}),
    "clifford.spinors": _obj({"p": _INT, "q": _INT, "types": {"type": "array", "items": _STR}}),
    "clifford.gamma": _obj({"matrices": {"type": "object"}}, {"checks": {"type": "object"}}),
    "clifford.cpt": _obj({"operators": {"type": "object"}}),
    "error": _obj({"error": _STR, "type": _STR}),
}

ENVELOPE_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "command", "payload", "exit_code"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "command": {"type": "array", "items": _STR},
        "payload": {"type": ["object", "string"]},
        "exit_code": {"enum": [0, 1, 2, 3, 4]},
    },
}


@dataclass
class Envelope:
    command: list
    payload: object
    exit_code: int = 0
    schema: str = "error"
    fmt: str = "json"

    def to_json(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "command": list(self.command),
                "payload": self.payload, "exit_code": self.exit_code}

    def validate(self) -> None:
        jsonschema.validate(self.to_json(), ENVELOPE_SCHEMA)
        jsonschema.validate(self.payload, PAYLOAD_SCHEMAS[self.schema])

    def render(self) -> str:
        if self.fmt == "csv" and isinstance(self.payload, dict) and "csv" in self.payload:
            return self.payload["csv"]
        if self.fmt == "text" and self.exit_code == 0:
            return _as_text(self.payload)
        return json.dumps(self.to_json(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _as_text(payload, indent: str = "") -> str:
    if isinstance(payload, dict) and "text" in payload and "monomials" in payload:
        return f"{indent}{payload['text']}\n"
    if isinstance(payload, dict):
        out = []
        for k, v in payload.items():
            if isinstance(v, (dict, list)):
                out.append(f"{indent}{k}:\n{_as_text(v, indent + '  ')}")
            else:
                out.append(f"{indent}{k}: {v}\n")
        return "".join(out)
    if isinstance(payload, list) and all(not isinstance(v, (dict, list)) for v in payload):
        return f"{indent}{', '.join(map(str, payload))}\n"
    if isinstance(payload, list):
        return "".join(_as_text(v, indent) if isinstance(v, (dict, list)) else f"{indent}{v}\n" for v in payload)
    return f"{indent}{payload}\n"


# ------------------------------------------------------------------ helpers

def _theory(args) -> field_algebra.Theory:
    metric = field_algebra.Metric.parse(args.metric) if args.metric else None
    real = [f for f in (args.fields or "").split(",") if f]
    cplx = [f for f in (args.complex or "").split(",") if f]
    if not real and not cplx:
        real = ["phi"]
    return field_algebra.Theory.build(args.dim, real=real, complex_=cplx, metric=metric)


def _poly_json(p) -> dict:
    return {"text": format_polynomial(p), "monomials": polynomial_to_json(p)}


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _matrix_json(M) -> list:
    return [[format_qi(x) for x in row] for row in M]


# ----------------------------------------------------------------- commands

def cmd_el(args):
    th = _theory(args)
    L = parse_lagrangian(args.lagrangian, th)
    el = field_algebra.euler_lagrange(th, L)
    return "el", {"lagrangian": _poly_json(L),
                  "euler_lagrange": {name: _poly_json(el[name]) for name in th.field_names}}


def _parse_gen(th, items):
    gen = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigurationError(f"generator {item!r} must look like field=expression")
        name, expr = item.split("=", 1)
        name = name.strip()
        if name.startswith("conj(") and name.endswith(")"):
            name = th.conj(name[5:-1])
        th.symbol(name)
        gen[name] = parse_lagrangian(expr, th)
    return gen


def cmd_noether(args):
    th = _theory(args)
    L = parse_lagrangian(args.lagrangian, th)
    n = th.dim
    if args.translation is not None:
        nu = args.translation
        if not 0 <= nu < n:
            raise ConfigurationError(f"translation index {nu} outside 0..{n - 1}")
        gen = {name: th.f(name).d(nu) for name in th.field_names}
        K = [L if mu == nu else field_algebra.FieldPolynomial.zero(n) for mu in range(n)]
    else:
        gen = _parse_gen(th, args.gen)
        for name in th.field_names:
            gen.setdefault(name, field_algebra.FieldPolynomial.zero(n))
        K = [parse_lagrangian(k, th) for k in args.K] if args.K else None
    j = field_algebra.noether_current(th, L, gen, K)
    el = field_algebra.euler_lagrange(th, L)
    cert = field_algebra.check_conserved(j, el, bound=args.bound)
    witness = [{"multiplier": _poly_json(c), "field": name, "derivative": list(w)} for c, name, w in cert.witness]
    return "noether", {"current": [_poly_json(x) for x in j], "conservation": cert.status, "witness": witness}


def _series_payload(s, args, with_hbar=False):
    if args.format == "csv":
        if with_hbar:
            rows = [(a, b, c, v.numerator, v.denominator) for (a, b, c), v in s.items()]
            return {"csv": _csv(["a", "b", "c", "coeff_num", "coeff_den"], rows)}
        rows = [(a, b, v.numerator, v.denominator) for (a, b, _), v in s.items()]
        return {"csv": _csv(["a", "b", "coeff_num", "coeff_den"], rows)}
    return {"caps": list(s.caps),
            "coefficients": [{"a": a, "b": b, "c": c, "coeff": frac_str(v)} for (a, b, c), v in s.items()]}


def cmd_zerodim(args):
    what = args.what
    if what == "truncation":
        r = zerodim.truncation_report(args.lam)
        d = r.to_json()
        return "zerodim.truncation", d
    if what == "borel":
        return "zerodim.borel", {"lambda": args.lam, "n_terms": args.terms,
                                 "borel": zerodim.borel_sum(args.terms, args.lam), "quad": zerodim.quad_z(args.lam)}
    if what == "quad":
        return "zerodim.quad", {"lambda": args.lam, "j": args.j, "value": zerodim.quad_z(args.lam, args.j)}
    caps = (args.order_lambda, args.order_j, args.order_hbar)
    if what == "z":
        s = zerodim.z_series(caps, args.method)
    elif what == "w":
        s = zerodim.w_series(caps, "log" if args.method == "moments" else "graphs")
    elif what == "phi":
        s = zerodim.phi_cl_series(caps, args.variant)
    elif what == "gamma":
        s = zerodim.effective_action_series(caps)
    else:
        s = zerodim.legendre_residual(caps)
    return "zerodim.series", _series_payload(s, args, with_hbar=(what == "phi" and args.variant == "hbar"))


def _load_graph(path):
    with open(path, encoding="utf-8") as fh:
        return graphs.MultiGraph.from_json(json.load(fh))


def cmd_graphs(args):
    if args.what == "enum":
        E = graphs.enumerate_graphs(args.v4, args.v1, args.filter)
        classes = [{"graph": g.to_json(), "canonical_code": g.code.hex(), "aut_order": a,
                    "loop_number": graphs.loop_number(g)} for g, a in E]
        check = True
        if args.filter == "all":
            total = sum(Fraction(graphs.label_group_order(args.v4, args.v1), a) for _, a in E)
            ends = 4 * args.v4 + args.v1
            check = total == (graphs.double_factorial(ends - 1) if ends % 2 == 0 else 0)
        return "graphs.enum", {"v4": args.v4, "v1": args.v1, "filter": args.filter, "classes": classes,
                               "matching_check": check, "diagnostic": E.diagnostic}
    g = _load_graph(args.graph)
    out = {"canonical_code": g.code.hex(), "aut_order": g.canonical().aut_order,
           "loop_number": graphs.loop_number(g)}
    if g.is_connected():
        d = graphs.one_pi_decompose(g)
        out["pieces"] = d.pieces
        out["bridges"] = [list(e) for e in d.bridges]
    return "graphs.analyze", out


def cmd_free(args):
    if args.what == "greens":
        G = gaussian_free.green_function(args.n)
        d = G.to_json()
        d["text"] = G.to_text()
        return "free.greens", d
    if args.what == "propagator":
        p = gaussian_free.propagator_1d(args.m, args.k_delta)
        x = gaussian_free.uniform_grid(args.half_width, args.grid)
        f = p.profile(x)
        if args.format == "csv":
            return "free.propagator", {"csv": _csv(["x", "f"], [(repr(float(a)), repr(float(b))) for a, b in zip(x, f)])}
        return "free.propagator", {"m": args.m, "points": [[float(a), float(b)] for a, b in zip(x, f)]}
    A = json.loads(args.matrix)
    A = [[complex(str(v).replace("i", "j")) if isinstance(v, str) else v for v in row] for row in A]
    j = json.loads(args.j) if args.j else None
    q = gaussian_free.QuadForm(A)
    cf = gaussian_free.gauss_closed_form(q, j)
    nq = gaussian_free.quad_gauss(q, j) if q.n <= 2 else None
    return "free.gauss", {"closed_form": [cf.real, cf.imag],
                          "quadrature": None if nq is None else [nq.real, nq.imag]}


def _load_map(U, path):
    with open(path, encoding="utf-8") as fh:
        return renorm.CountertermMap.from_json(U, json.load(fh))


def cmd_renorm(args):
    if args.what == "dyson":
        k = renorm.dyson_max_power(args.d)
        return "renorm.dyson", {"d": args.d, "max_power": "unbounded" if k == renorm.UNBOUNDED else k}
    U = renorm.Universe.build(args.bound, args.max_edges)
    if args.what == "compose":
        out = renorm.compose(_load_map(U, args.c1), _load_map(U, args.c2))
        return "renorm.map", out.to_json()
    if args.what == "inverse":
        return "renorm.map", renorm.inverse(_load_map(U, args.c)).to_json()
    rng = random.Random(args.seed)
    a, b, c = (renorm.CountertermMap.random(U, rng) for _ in range(3))
    ident = renorm.CountertermMap.identity(U)
    f = renorm.Prescription.symbolic(U)
    results = {
        "associativity": renorm.compose(renorm.compose(a, b), c) == renorm.compose(a, renorm.compose(b, c)),
        "identity": renorm.compose(ident, a) == a == renorm.compose(a, ident),
        "inverse": renorm.compose(renorm.inverse(a), a) == ident == renorm.compose(a, renorm.inverse(a)),
        "action": renorm.act(a, renorm.act(b, f)) == renorm.act(renorm.compose(a, b), f),
        "connector": renorm.transitive_connector(f, renorm.act(b, f)) == b,
    }
    return "renorm.check", {"seed": args.seed, "graphs": len(U), "results": results}


def cmd_clifford(args):
    if args.what == "gamma":
        rep = clifford.gamma_rep()
        names = ["gamma0", "gamma1", "gamma2", "gamma3"]
        mats = {n: _matrix_json(M) for n, M in zip(names, rep.gammas)}
        mats["gamma5"] = _matrix_json(rep.gamma5)
        out = {"matrices": mats}
        if args.check:
            out["checks"] = {"anticommutation": rep.check(), "span_dimension": rep.span_dimension(),
                             "grade_dimensions": list(rep.grade_dimensions())}
        return "clifford.gamma", out
    if args.what == "cpt":
        ops = {}
        for name, d in clifford.cpt_matrices().items():
            ops[name] = {"matrix": _matrix_json(d["matrix"]), "antilinear": d["antilinear"],
                         "square": None if d["square"] is None else format_qi(d["square"]),
                         "scalar_bilinear_factor": None if d["scalar_bilinear_factor"] is None
                         else format_qi(d["scalar_bilinear_factor"])}
        return "clifford.cpt", {"operators": ops}
    sig = clifford.Signature(args.p, args.q)
    if args.what == "classify":
        t = clifford.even_classify(sig) if args.even else clifford.classify(sig)
        return "clifford.classify", {"p": args.p, "q": args.q, **t.to_json()}
    if args.what == "center":
        basis = clifford.center(sig, args.even)
        return "clifford.center", {"p": args.p, "q": args.q, "even": args.even,
                                   "basis": [repr(b) for b in basis], "dimension": len(basis)}
    return "clifford.spinors", {"p": args.p, "q": args.q,
                                "types": [t for t in clifford.SPINOR_TYPES if t in clifford.spinor_types(sig)]}


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="perturbia", description="Perturbative QFT toolkit")
    sub = top.add_subparsers(dest="cmd", required=True)

    def fmt(p, default="json", choices=("json", "csv", "text")):
        p.add_argument("--format", choices=choices, default=default)

    def theory(p):
        p.add_argument("--dim", type=int, default=4)
        p.add_argument("--metric", help="signature string such as +---")
        p.add_argument("--fields", help="comma-separated real fields (default phi)")
        p.add_argument("--complex", help="comma-separated complex fields; partners are written conj(name)")
        p.add_argument("--lagrangian", required=True)

    p = sub.add_parser("el", help="Euler-Lagrange expressions")
    theory(p)
    fmt(p, choices=("json", "text"))
    p.set_defaults(func=cmd_el)

    p = sub.add_parser("noether", help="Noether current and conservation certificate")
    theory(p)
    p.add_argument("--gen", action="append", help="field=expression, repeatable")
    p.add_argument("--K", action="append", help="K^mu components in order, repeatable")
    p.add_argument("--translation", type=int, help="use the translation d_nu with K^mu = delta^mu_nu L")
    p.add_argument("--bound", type=int, default=2)
    fmt(p, choices=("json", "text"))
    p.set_defaults(func=cmd_noether)

    p = sub.add_parser("zerodim", help="zero-dimensional phi^4 series and numerics")
    p.add_argument("what", choices=("z", "w", "phi", "gamma", "legendre", "truncation", "borel", "quad"))
    p.add_argument("--order-lambda", type=int, default=3)
    p.add_argument("--order-j", type=int, default=4)
    p.add_argument("--order-hbar", type=int, default=0)
    p.add_argument("--method", choices=("moments", "graphs"), default="moments")
    p.add_argument("--variant", choices=("full", "tree", "hbar"), default="full")
    p.add_argument("--lambda", dest="lam", type=float, default=0.1)
    p.add_argument("--j", type=float, default=0.0)
    p.add_argument("--terms", type=int, default=20)
    fmt(p, default="csv")
    p.set_defaults(func=cmd_zerodim)

    p = sub.add_parser("graphs", help="Feynman graph enumeration and analysis")
    p.add_argument("what", choices=("enum", "analyze"))
    p.add_argument("--v4", type=int, default=1)
    p.add_argument("--v1", type=int, default=0)
    p.add_argument("--filter", choices=graphs.FILTERS, default="all")
    p.add_argument("--graph", help="graph JSON file for analyze")
    fmt(p, choices=("json", "text"))
    p.set_defaults(func=cmd_graphs)

    p = sub.add_parser("free", help="Gaussian integrals, Green's functions, propagator")
    p.add_argument("what", choices=("greens", "propagator", "gauss"))
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--m", type=float, default=1.0)
    p.add_argument("--grid", type=int, default=4096)
    p.add_argument("--half-width", type=float, default=10.0)
    p.add_argument("--k-delta", type=float, default=2 * 3.141592653589793)
    p.add_argument("--matrix", default="[[\"1i\"]]", help="JSON matrix; complex entries as strings like \"0.3+1i\"")
    p.add_argument("--j", help="JSON source vector")
    fmt(p)
    p.set_defaults(func=cmd_free)

    p = sub.add_parser("renorm", help="finite renormalisation group")
    p.add_argument("what", choices=("compose", "inverse", "check", "dyson"))
    p.add_argument("--c1")
    p.add_argument("--c2")
    p.add_argument("--c")
    p.add_argument("--bound", type=int, default=3)
    p.add_argument("--max-edges", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--d", type=int, default=4)
    fmt(p, choices=("json", "text"))
    p.set_defaults(func=cmd_renorm)

    p = sub.add_parser("clifford", help="Clifford algebras and gamma matrices")
    p.add_argument("what", choices=("classify", "center", "spinors", "gamma", "cpt"))
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--q", type=int, default=3)
    p.add_argument("--even", action="store_true")
    p.add_argument("--check", action="store_true")
    fmt(p, choices=("json", "text"))
    p.set_defaults(func=cmd_clifford)
    return top


def _required(args):
    needs = {("graphs", "analyze"): ["graph"], ("renorm", "compose"): ["c1", "c2"], ("renorm", "inverse"): ["c"]}
    missing = [f for f in needs.get((args.cmd, getattr(args, "what", None)), []) if not getattr(args, f)]
    return missing


def dispatch(argv) -> Envelope:
    """Parse and run; usage errors raise SystemExit(2) from argparse."""
    argv = list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    missing = _required(args)
    if missing:
        parser.error(f"{args.cmd} {args.what} needs --{' --'.join(m.replace('_', '-') for m in missing)}")
    try:
        schema, payload = args.func(args)
        env = Envelope(argv, payload, 0, schema, args.format)
    except (PerturbiaError, ValueError, OSError) as exc:
        code = getattr(exc, "exit_code", 3)
        env = Envelope(argv, {"error": str(exc), "type": type(exc).__name__}, code, "error", args.format)
    env.validate()
    return env


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        env = dispatch(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out = env.render()
    (sys.stdout if env.exit_code == 0 else sys.stderr).write(out)
    return env.exit_code


if __name__ == "__main__":
    sys.exit(main())
