"""JSON instance formats.

Rationals are strings ``"p/q"`` (integers and ``"p"`` are accepted on input).
Elements and points may be referenced by name or by index.  Nested objects
(a system's space or monoid, a chain's monoids, a manifest's systems) may be
given inline or as a path relative to the containing file.  Every malformed
input raises :class:`ParseError` with a ``file:field`` locus.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from .almost_iso import AlmostIsoPair
from .errors import ParseError
from .limits import MonoidChain
from .monoid import FiniteMetricMonoid
from .qcms import FiniteQCMS, LipschitzDynamicalSystem, MarkovMap, State
from .rational import Surd, fmt
from .tunnels import CovariantTunnel

__all__ = [
    "load_json",
    "dump_json",
    "parse_rational",
    "monoid_from_json",
    "monoid_to_json",
    "pair_from_json",
    "pair_to_json",
    "space_from_json",
    "space_to_json",
    "state_from_json",
    "system_from_json",
    "system_to_json",
    "tunnel_from_json",
    "tunnel_to_json",
    "chain_from_json",
    "chain_to_json",
    "manifest_from_json",
    "load_monoid",
    "load_pair",
    "load_space",
    "load_state",
    "load_system",
    "load_tunnel",
    "load_chain",
    "load_manifest",
    "jsonable",
]


class _Ctx:
    """Locus tracking: ``file:a.b[2]``."""

    def __init__(self, source: str, base: Path | None, path: str = ""):
        self.source = source
        self.base = base
        self.path = path

    def sub(self, key) -> "_Ctx":
        if isinstance(key, int):
            return _Ctx(self.source, self.base, f"{self.path}[{key}]")
        return _Ctx(self.source, self.base, f"{self.path}.{key}" if self.path else str(key))

    @property
    def locus(self) -> str:
        return f"{self.source}:{self.path or '<root>'}"

    def fail(self, msg: str):
        raise ParseError(msg, locus=self.locus)


def load_json(path) -> Any:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {p}: {exc.strerror or exc}", locus=str(p)) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, locus=f"{p}:{exc.lineno}:{exc.colno}") from None


def jsonable(obj) -> Any:
    """Recursively convert exact values to JSON-friendly ones (``"p/q"`` strings)."""
    if isinstance(obj, (Fraction, Surd)):
        return fmt(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        return obj.item()
    return obj


def dump_json(obj, path=None) -> str:
    text = json.dumps(jsonable(obj), indent=2, sort_keys=True) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def parse_rational(value, ctx: _Ctx | None = None) -> Fraction:
    ctx = ctx or _Ctx("<value>", None)
    if isinstance(value, bool):
        ctx.fail("expected a rational, got a boolean")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            ctx.fail(f"cannot parse {value!r} as p/q")
    ctx.fail(f"expected a \"p/q\" string, got {type(value).__name__}")


def _obj(data, ctx: _Ctx, *required: str) -> dict:
    if not isinstance(data, dict):
        ctx.fail("expected an object")
    for key in required:
        if key not in data:
            ctx.fail(f"missing field {key!r}")
    return data


def _list(data, ctx: _Ctx, length: int | None = None) -> list:
    if not isinstance(data, list):
        ctx.fail("expected a list")
    if length is not None and len(data) != length:
        ctx.fail(f"expected {length} entries, got {len(data)}")
    return data


def _ref(value, names: list[str], ctx: _Ctx) -> int:
    if isinstance(value, bool):
        ctx.fail("expected a name or index")
    if isinstance(value, int):
        if not 0 <= value < len(names):
            ctx.fail(f"index {value} out of range")
        return value
    if isinstance(value, str):
        try:
            return names.index(value)
        except ValueError:
            ctx.fail(f"unknown name {value!r}")
    ctx.fail("expected a name or index")


def _matrix(data, ctx: _Ctx, rows: int, cols: int) -> list[list[Fraction]]:
    out = []
    for i, row in enumerate(_list(data, ctx, rows)):
        rc = ctx.sub(i)
        out.append([parse_rational(v, rc.sub(j)) for j, v in enumerate(_list(row, rc, cols))])
    return out


def _nested(data, ctx: _Ctx, loader):
    """Inline object, or a path string relative to the containing file."""
    if isinstance(data, str):
        base = ctx.base or Path(".")
        path = Path(data) if Path(data).is_absolute() else base / data
        return loader(load_json(path), _Ctx(str(path), path.parent))
    return loader(data, ctx)


def _names(data, ctx: _Ctx) -> list[str]:
    names = []
    for i, v in enumerate(_list(data, ctx)):
        if not isinstance(v, (str, int)) or isinstance(v, bool):
            ctx.sub(i).fail("names must be strings")
        names.append(str(v))
    if len(set(names)) != len(names):
        ctx.fail("duplicate names")
    if not names:
        ctx.fail("empty list")
    return names


# monoids ---------------------------------------------------------------


def _monoid(data, ctx: _Ctx) -> FiniteMetricMonoid:
    _obj(data, ctx, "elements", "identity", "mult", "dist")
    names = _names(data["elements"], ctx.sub("elements"))
    n = len(names)
    ident = _ref(data["identity"], names, ctx.sub("identity"))
    mctx = ctx.sub("mult")
    mult = []
    for i, row in enumerate(_list(data["mult"], mctx, n)):
        rc = mctx.sub(i)
        mult.append([_ref(v, names, rc.sub(j)) for j, v in enumerate(_list(row, rc, n))])
    dist = _matrix(data["dist"], ctx.sub("dist"), n, n)
    inverse = data.get("inverse")
    if inverse is not None:
        ictx = ctx.sub("inverse")
        inverse = [_ref(v, names, ictx.sub(i)) for i, v in enumerate(_list(inverse, ictx, n))]
    return FiniteMetricMonoid(names, ident, mult, dist, inverse)


def monoid_from_json(data, source: str = "<json>", base=None) -> FiniteMetricMonoid:
    return _monoid(data, _Ctx(source, Path(base) if base else None))


def monoid_to_json(G: FiniteMetricMonoid) -> dict:
    names = list(G.elements)
    return {
        "elements": names,
        "identity": names[G.identity],
        "mult": [[names[int(G.mult[i, j])] for j in range(G.n)] for i in range(G.n)],
        "dist": [[fmt(v) for v in row] for row in G.dist],
        "inverse": None if G.inverse is None else [names[i] for i in G.inverse],
    }


# almost isometries -------------------------------------------------------


def _pair(data, ctx: _Ctx, G1: FiniteMetricMonoid | None = None, G2: FiniteMetricMonoid | None = None) -> AlmostIsoPair:
    _obj(data, ctx, "forward", "backward", "epsilon", "radius")

    def refs(key, dst, length):
        c = ctx.sub(key)
        items = _list(data[key], c, length)
        if dst is None:
            out = []
            for i, v in enumerate(items):
                if not isinstance(v, int) or isinstance(v, bool):
                    c.sub(i).fail("names need the monoids; use indices")
                out.append(v)
            return out
        return [_ref(v, list(dst.elements), c.sub(i)) for i, v in enumerate(items)]

    fwd = refs("forward", G2, None if G1 is None else G1.n)
    bwd = refs("backward", G1, None if G2 is None else G2.n)
    return AlmostIsoPair(
        fwd, bwd, parse_rational(data["epsilon"], ctx.sub("epsilon")), parse_rational(data["radius"], ctx.sub("radius"))
    )


def pair_from_json(data, G1=None, G2=None, source: str = "<json>") -> AlmostIsoPair:
    return _pair(data, _Ctx(source, None), G1, G2)


def pair_to_json(pair: AlmostIsoPair, G1: FiniteMetricMonoid | None = None, G2: FiniteMetricMonoid | None = None) -> dict:
    fwd = [G2.elements[i] for i in pair.forward] if G2 is not None else list(pair.forward)
    bwd = [G1.elements[i] for i in pair.backward] if G1 is not None else list(pair.backward)
    return {"forward": fwd, "backward": bwd, "epsilon": fmt(pair.epsilon), "radius": fmt(pair.radius)}


# spaces, states, systems ----------------------------------------------------


def _space(data, ctx: _Ctx) -> FiniteQCMS:
    _obj(data, ctx, "points", "dist")
    names = _names(data["points"], ctx.sub("points"))
    dist = _matrix(data["dist"], ctx.sub("dist"), len(names), len(names))
    return FiniteQCMS(tuple(names), tuple(tuple(r) for r in dist))


def space_from_json(data, source: str = "<json>") -> FiniteQCMS:
    return _space(data, _Ctx(source, None))


def space_to_json(X: FiniteQCMS) -> dict:
    return {"points": list(X.points), "dist": [[fmt(v) for v in row] for row in X.dist]}


def _state(data, ctx: _Ctx, X: FiniteQCMS | None = None) -> State:
    if isinstance(data, dict):
        if "weights" not in data:
            ctx.fail("missing field 'weights'")
        data, ctx = data["weights"], ctx.sub("weights")
    weights = [parse_rational(v, ctx.sub(i)) for i, v in enumerate(_list(data, ctx, None if X is None else X.n))]
    return State(tuple(weights))


def state_from_json(data, X: FiniteQCMS | None = None, source: str = "<json>") -> State:
    return _state(data, _Ctx(source, None), X)


def _kernel(data, ctx: _Ctx, n: int) -> MarkovMap:
    return MarkovMap(tuple(tuple(r) for r in _matrix(data, ctx, n, n)))


def _system(data, ctx: _Ctx) -> LipschitzDynamicalSystem:
    _obj(data, ctx, "space", "monoid", "action")
    X = _nested(data["space"], ctx.sub("space"), _space)
    G = _nested(data["monoid"], ctx.sub("monoid"), _monoid)
    actx = ctx.sub("action")
    action = data["action"]
    kernels: list[MarkovMap | None] = [None] * G.n
    if isinstance(action, dict):
        for key, mat in action.items():
            g = _ref(key, list(G.elements), actx.sub(key))
            kernels[g] = _kernel(mat, actx.sub(key), X.n)
    else:
        for g, mat in enumerate(_list(action, actx, G.n)):
            kernels[g] = _kernel(mat, actx.sub(g), X.n)
    missing = [G.elements[g] for g, k in enumerate(kernels) if k is None]
    if missing:
        actx.fail(f"no kernel for {', '.join(missing)}")
    return LipschitzDynamicalSystem(X, G, tuple(kernels))


def system_from_json(data, source: str = "<json>", base=None) -> LipschitzDynamicalSystem:
    return _system(data, _Ctx(source, Path(base) if base else None))


def system_to_json(sys: LipschitzDynamicalSystem) -> dict:
    return {
        "space": space_to_json(sys.space),
        "monoid": monoid_to_json(sys.monoid),
        "action": {
            sys.monoid.elements[g]: [[fmt(v) for v in row] for row in K.kernel] for g, K in enumerate(sys.action)
        },
    }


# tunnels ------------------------------------------------------------------


def _tunnel(data, ctx: _Ctx) -> CovariantTunnel:
    _obj(data, ctx, "ambient", "embed1", "embed2", "pair", "epsilon")
    Z = _nested(data["ambient"], ctx.sub("ambient"), _space)
    names = list(Z.points)
    embs = []
    for key in ("embed1", "embed2"):
        c = ctx.sub(key)
        embs.append([_ref(v, names, c.sub(i)) for i, v in enumerate(_list(data[key], c))])
    pair = _pair(data["pair"], ctx.sub("pair"))
    return CovariantTunnel(Z, tuple(embs[0]), tuple(embs[1]), pair, parse_rational(data["epsilon"], ctx.sub("epsilon")))


def tunnel_from_json(data, source: str = "<json>") -> CovariantTunnel:
    return _tunnel(data, _Ctx(source, None))


def tunnel_to_json(t: CovariantTunnel) -> dict:
    names = list(t.ambient.points)
    return {
        "ambient": space_to_json(t.ambient),
        "embed1": [names[z] for z in t.embed1],
        "embed2": [names[z] for z in t.embed2],
        "pair": pair_to_json(t.pair),
        "epsilon": fmt(t.epsilon),
    }


# chains and manifests -------------------------------------------------------


def _chain(data, ctx: _Ctx) -> MonoidChain:
    _obj(data, ctx, "monoids", "links", "epsilons")
    mctx = ctx.sub("monoids")
    monoids = [_nested(m, mctx.sub(i), _monoid) for i, m in enumerate(_list(data["monoids"], mctx))]
    k = len(monoids)
    lctx = ctx.sub("links")
    links = [
        _pair(p, lctx.sub(i), monoids[i], monoids[i + 1]) for i, p in enumerate(_list(data["links"], lctx, k - 1))
    ]
    ectx = ctx.sub("epsilons")
    eps = [parse_rational(v, ectx.sub(i)) for i, v in enumerate(_list(data["epsilons"], ectx, k - 1))]
    return MonoidChain(tuple(monoids), tuple(links), tuple(eps))


def chain_from_json(data, source: str = "<json>", base=None) -> MonoidChain:
    return _chain(data, _Ctx(source, Path(base) if base else None))


def chain_to_json(chain: MonoidChain) -> dict:
    return {
        "monoids": [monoid_to_json(G) for G in chain.monoids],
        "links": [
            pair_to_json(p, chain.monoids[i], chain.monoids[i + 1]) for i, p in enumerate(chain.links)
        ],
        "epsilons": [fmt(e) for e in chain.epsilons],
    }


def _manifest(data, ctx: _Ctx) -> dict:
    _obj(data, ctx, "systems")
    sctx = ctx.sub("systems")
    systems = [_nested(s, sctx.sub(i), _system) for i, s in enumerate(_list(data["systems"], sctx))]
    if not systems:
        sctx.fail("empty list")
    out: dict[str, Any] = {"systems": systems, "chain": None, "profile": None, "schedule": None, "tolerance": None}
    if data.get("chain") is not None:
        out["chain"] = _nested(data["chain"], ctx.sub("chain"), _chain)
    if data.get("profile") is not None:
        pctx = ctx.sub("profile")
        steps = []
        for i, row in enumerate(_list(data["profile"], pctx)):
            rc = pctx.sub(i)
            r, b = _list(row, rc, 2)
            steps.append((parse_rational(r, rc.sub(0)), parse_rational(b, rc.sub(1))))
        out["profile"] = steps
    if data.get("schedule") is not None:
        sc = ctx.sub("schedule")
        sched = []
        for i, row in enumerate(_list(data["schedule"], sc)):
            rc = sc.sub(i)
            e, w, N = _list(row, rc, 3)
            if not isinstance(N, int) or isinstance(N, bool) or N < 0:
                rc.sub(2).fail("expected a non-negative index")
            sched.append((parse_rational(e, rc.sub(0)), parse_rational(w, rc.sub(1)), N))
        out["schedule"] = sched
    if data.get("tolerance") is not None:
        out["tolerance"] = parse_rational(data["tolerance"], ctx.sub("tolerance"))
    return out


def manifest_from_json(data, source: str = "<json>", base=None) -> dict:
    return _manifest(data, _Ctx(source, Path(base) if base else None))


def _loader(fn):
    def load(path, *args):
        p = Path(path)
        return fn(load_json(p), _Ctx(str(p), p.parent), *args)

    return load


load_monoid = _loader(_monoid)
load_space = _loader(_space)
load_system = _loader(_system)
load_tunnel = _loader(_tunnel)
load_chain = _loader(_chain)
load_manifest = _loader(_manifest)


def load_pair(path, G1: FiniteMetricMonoid | None = None, G2: FiniteMetricMonoid | None = None) -> AlmostIsoPair:
    return _loader(_pair)(path, G1, G2)


def load_state(path, X: FiniteQCMS | None = None) -> State:
    return _loader(_state)(path, X)
