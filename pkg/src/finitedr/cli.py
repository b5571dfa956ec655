"""Command-line entry point: ``finitedr {flows,trees,kdv,oracle,verify}``.

Options may come from a ``key=value`` file (``--config``); flags given on the
command line win.  Exit codes: 0 success, 1 verification failure,
2 configuration error, 3 unsupported vertex-integral pattern.
"""
import argparse
import json
import sys
from itertools import combinations_with_replacement

from ._rational import as_rational, format_rational
from .diffpoly import TruncationContext, dx
from .drcycle import UnsupportedPattern, VertexIntegralQuery, evaluate
from .fcohft import FamilySpec, check_nilpotent, decorated_trees, figure_families
from .hierarchy import FlowTable, assemble_P, miura_flows, special_miura
from .laxkdv import kdv_P
from .multipoly import NotSymmetric, msym_str
from .params import ParamRational
from .verify import SUITES, passed, run_suite

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_UNSUPPORTED = 0, 1, 2, 3

INT_KEYS = {"rank", "alpha", "beta", "d", "n", "g", "Dmax", "Emax", "nmax"}
STR_KEYS = {"xi", "R1", "G", "format", "q_table", "input", "vectors", "mode"}
BOOL_KEYS = {"miura"}
DEFAULTS = {"rank": 2, "beta": 1, "d": 0, "Dmax": 6, "Emax": 4, "format": "json", "miura": False,
            "mode": "labeled", "nmax": 6}


class ConfigError(ValueError):
    pass


# -- configuration ---------------------------------------------------------------------
def read_config(path):
    """Parse a ``key=value`` file; ``#`` starts a comment."""
    out = {}
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    for lineno, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        out[key] = _convert(key, value)
    return out


def _convert(key, value):
    try:
        if key in INT_KEYS:
            return int(value)
        if key in BOOL_KEYS:
            low = value.lower()
            if low not in ("1", "0", "true", "false", "yes", "no"):
                raise ValueError(value)
            return low in ("1", "true", "yes")
        if key in STR_KEYS:
            return value
    except ValueError:
        raise ConfigError(f"bad value {value!r} for {key}") from None
    raise ConfigError(f"unknown configuration key {key!r}")


def _param_value(text, N):
    """A rational, ``xi`` or ``c*xi``."""
    text = text.strip().replace(" ", "")
    if text.endswith("xi"):
        head = text[:-2].rstrip("*")
        coeff = {"": 1, "+": 1, "-": -1}.get(head)
        coeff = as_rational(head) if coeff is None else coeff
        return ParamRational.xi(N) * coeff
    return ParamRational.const(N, as_rational(text))


def parse_r1(text, N):
    """``"i,j=value;..."`` into a dict."""
    out = {}
    for item in filter(None, (s.strip() for s in text.split(";"))):
        try:
            where, value = item.split("=", 1)
            i, j = (int(x) for x in where.split(","))
            out[(i, j)] = _param_value(value, N)
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"cannot parse R1 entry {item!r}") from None
    return out


def parse_g(text, N):
    """``"symbolic"`` or comma list of rationals, where ``G`` keeps that entry symbolic."""
    if text.strip().lower() == "symbolic":
        return None
    items = [s.strip() for s in text.split(",")]
    if len(items) != N:
        raise ConfigError(f"--G needs {N} entries, got {len(items)}")
    out = []
    for i, s in enumerate(items, start=1):
        try:
            out.append(ParamRational.G(N, i) if s.upper() in ("G", f"G{i}") else ParamRational.const(N, as_rational(s)))
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"cannot parse G entry {s!r}") from None
    return out


def build_spec(cfg):
    N = cfg["rank"]
    if N < 1:
        raise ConfigError("rank must be positive")
    if cfg.get("xi") is not None and cfg.get("R1") is not None:
        raise ConfigError("give either --xi or --R1, not both")
    if cfg.get("R1") is not None:
        R1 = parse_r1(cfg["R1"], N)
    elif cfg.get("xi") is not None:
        if N != 2:
            raise ConfigError("--xi is shorthand for rank 2")
        R1 = {(1, 2): _param_value(cfg["xi"], N)}
    else:
        R1 = {(1, 2): ParamRational.xi(N)} if N == 2 else {}
    G = parse_g(cfg["G"], N) if cfg.get("G") is not None else None
    try:
        spec = FamilySpec.make(N, R1, G)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if not check_nilpotent(spec):
        raise ConfigError("R1 must square to zero")
    return spec


def build_ctx(cfg, N):
    if cfg["Dmax"] < 0 or cfg["Emax"] < 0:
        raise ConfigError("cutoffs must be nonnegative")
    return TruncationContext(N, cfg["Dmax"], cfg["Emax"])


def _load_q_table(path):
    try:
        with open(path) as fh:
            raw = json.load(fh)
        return {tuple(int(x) for x in k.split(",")): as_rational(v) for k, v in raw.items()}
    except (OSError, ValueError, AttributeError, TypeError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad Q table {path}: {exc}") from None


# -- output ------------------------------------------------------------------------------
def _emit(obj, fmt, text_lines=None):
    if fmt == "text" and text_lines is not None:
        print("\n".join(text_lines))
    else:
        print(json.dumps(obj, indent=2))


def _unsupported(exc):
    return {
        "error": "UnsupportedPattern",
        "message": str(exc),
        "query": exc.query.to_json(),
        "context": exc.context,
    }


def _family_json(key):
    genus, label, leg1, leg2, plain, kids = key
    return {"genus": genus, "label": label, "leg1": leg1, "leg2": leg2,
            "plain_vector_legs": plain, "children": [_family_json(k) for k in kids]}


# -- commands ------------------------------------------------------------------------------
def cmd_flows(cfg):
    spec = build_spec(cfg)
    ctx = build_ctx(cfg, spec.N)
    beta, d = cfg["beta"], cfg["d"]
    alphas = range(1, spec.N + 1)
    if cfg["miura"]:
        if spec.N != 2:
            raise ConfigError("--miura is defined for rank 2")
    elif cfg.get("alpha") is not None:
        alphas = [cfg["alpha"]]
    for a in list(alphas) + [beta]:
        if not 1 <= a <= spec.N:
            raise ConfigError(f"index {a} outside 1..{spec.N}")
    P = FlowTable(ctx, {(a, beta, d): assemble_P(a, beta, d, spec, ctx, mode=cfg["mode"]) for a in alphas})
    if cfg["miura"]:
        out = miura_flows(P, special_miura(spec, ctx))
        if cfg.get("alpha") is not None:
            out = {k: v for k, v in out.items() if k[0] == cfg["alpha"]}
        entries = [{"alpha": a, "beta": b, "d": dd, "flow": f.to_json()} for (a, b, dd), f in sorted(out.items())]
        lines = [f"du~{a}/dt{b}_{dd} = {f}" for (a, b, dd), f in sorted(out.items())]
        _emit({"kind": "miura-flow", "entries": entries}, cfg["format"], lines)
        return EXIT_OK
    entries, lines = [], []
    for (a, b, dd), p in sorted(P.items()):
        entries.append({"alpha": a, "beta": b, "d": dd, "P": p.to_json(), "dxP": dx(p).to_json()})
        lines.append(f"P^{a}_{b},{dd} = {p}")
        lines.append(f"dx P^{a}_{b},{dd} = {dx(p)}")
    _emit({"kind": "P", "entries": entries}, cfg["format"], lines)
    return EXIT_OK


def cmd_trees(cfg):
    spec = build_spec(cfg)
    alpha, beta, d = cfg.get("alpha") or 1, cfg["beta"], cfg["d"]
    genera = [cfg["g"]] if cfg.get("g") is not None else list(range(cfg["Emax"] // 2 + 1))
    if cfg.get("n") is None and cfg.get("vectors") is None:
        out, lines = [], []
        for g in genera:
            fams = figure_families(alpha, beta, d, g, spec, nmax=cfg["nmax"])
            out.append({"genus": g, "count": len(fams), "families": [_family_json(k) for k in fams]})
            lines.append(f"genus {g}: {len(fams)} families")
        total = sum(x["count"] for x in out)
        lines.append(f"total: {total}")
        _emit({"alpha": alpha, "beta": beta, "d": d, "genera": out, "total": total}, cfg["format"], lines)
        return EXIT_OK
    if cfg.get("vectors") is not None:
        try:
            vec_sets = [tuple(int(x) for x in cfg["vectors"].split(",") if x.strip())]
        except ValueError:
            raise ConfigError(f"bad --vectors {cfg['vectors']!r}") from None
    else:
        vec_sets = list(combinations_with_replacement(range(1, spec.N + 1), cfg["n"]))
    trees, lines = [], []
    for vectors in vec_sets:
        for g in genera:
            for dt in decorated_trees(alpha, beta, d, vectors, g, spec):
                trees.append({"vectors": list(vectors), "genus": g, "tree": dt.to_json(len(vectors))})
                lines.append(f"vectors={list(vectors)} g={g} vertices={dt.tree.nvertices} weight={dt.weight}")
    _emit({"alpha": alpha, "beta": beta, "d": d, "count": len(trees), "trees": trees}, cfg["format"], lines)
    return EXIT_OK


def cmd_kdv(cfg, explicit):
    d = cfg["d"]
    if d < 0:
        raise ConfigError("d must be nonnegative")
    ctx = None
    if "Dmax" in explicit or "Emax" in explicit:
        ctx = build_ctx(cfg, 1)
    p = kdv_P(d, ctx)
    _emit({"d": d, "P": p.to_json()}, cfg["format"], [f"P_{d} = {p}"])
    return EXIT_OK


def _oracle_answer(data):
    q = VertexIntegralQuery.from_json(data)
    val = evaluate(q)
    try:
        sym = msym_str(val)
    except NotSymmetric:
        sym = None
    terms = [{"exponents": list(e), "coeff": format_rational(c, always_fraction=True)}
             for e, c in sorted(val.terms.items())]
    return {"query": q.to_json(), "value": str(val), "msym": sym, "terms": terms}


def cmd_oracle(cfg):
    try:
        if cfg.get("input") and cfg["input"] != "-":
            with open(cfg["input"]) as fh:
                data = json.load(fh)
        else:
            data = json.load(sys.stdin)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read query JSON: {exc}") from None
    try:
        if isinstance(data, list):
            out = [_oracle_answer(x) for x in data]
        else:
            out = _oracle_answer(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed query: {exc}") from None
    items = out if isinstance(out, list) else [out]
    _emit(out, cfg["format"], [x["value"] for x in items])
    return EXIT_OK


def cmd_verify(cfg):
    q = _load_q_table(cfg["q_table"]) if cfg.get("q_table") else None
    report = run_suite(cfg["suite"], q_coeffs=q)
    lines = [f"{c['status'].upper()} {c['name']}" + (f" (residual {c['residual']})" if "residual" in c else "")
             for c in report["checks"]]
    _emit(report, cfg["format"], lines)
    return EXIT_OK if passed(report) else EXIT_FAIL


# -- parser -----------------------------------------------------------------------------------
def _common():
    p = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    p.add_argument("--config", help="key=value file; flags override it")
    p.add_argument("--rank", type=int)
    p.add_argument("--xi", help="numeric or symbolic R1[1,2] for rank 2")
    p.add_argument("--R1", help='entries "i,j=p/q;..." (values may use xi)')
    p.add_argument("--G", help='"symbolic" or "p/q,..." (G keeps an entry symbolic)')
    p.add_argument("--alpha", type=int)
    p.add_argument("--beta", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--Dmax", type=int)
    p.add_argument("--Emax", type=int)
    p.add_argument("--format", choices=["json", "text"])
    return p


def build_parser():
    common = _common()
    parser = argparse.ArgumentParser(prog="finitedr", description="DR hierarchy of (Id + R1 z) c^{triv,G}")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("flows", parents=[common], argument_default=argparse.SUPPRESS, help="compute P^alpha_{beta,d} and its x-derivative")
    p.add_argument("--miura", action="store_true")
    p.add_argument("--mode", choices=["orbit", "labeled"])
    p = sub.add_parser("trees", parents=[common], argument_default=argparse.SUPPRESS, help="decorated trees or family counts")
    p.add_argument("--n", type=int)
    p.add_argument("--g", type=int)
    p.add_argument("--vectors")
    p.add_argument("--nmax", type=int)
    sub.add_parser("kdv", parents=[common], argument_default=argparse.SUPPRESS, help="KdV density from the Lax operator")
    p = sub.add_parser("oracle", parents=[common], argument_default=argparse.SUPPRESS, help="vertex integral from JSON")
    p.add_argument("--input", help="query file (default stdin)")
    p = sub.add_parser("verify", parents=[common], argument_default=argparse.SUPPRESS, help="run a verification suite")
    p.add_argument("suite", choices=list(SUITES) + ["all"])
    p.add_argument("--q-table", dest="q_table", help="JSON genus-2 coefficient table")
    return parser


def main(argv=None):
    parser = build_parser()
    args = vars(parser.parse_args(argv))
    command = args.pop("command")
    try:
        from_file = read_config(args.pop("config")) if "config" in args else {}
        cfg = {**DEFAULTS, **from_file, **args}
        if command == "kdv":
            return cmd_kdv(cfg, set(from_file) | set(args))
        handler = {"flows": cmd_flows, "trees": cmd_trees, "oracle": cmd_oracle, "verify": cmd_verify}[command]
        return handler(cfg)
    except ConfigError as exc:
        print(json.dumps({"error": "ConfigError", "message": str(exc)}), file=sys.stderr)
        return EXIT_CONFIG
    except UnsupportedPattern as exc:
        print(json.dumps(_unsupported(exc), indent=2))
        return EXIT_UNSUPPORTED


if __name__ == "__main__":
    sys.exit(main())
