"""Command line entry point: ``covprop <subcommand> ...``.

Exit codes: 0 on success, 1 on a domain error (its class name goes to
stderr), 2 on malformed input or usage.  Values print as ``"p/q"`` or
``"sqrt2/2"``, never as decimals.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from . import io
from .errors import CovpropError, DomainError, ParseError
from .limits import (
    cauchy_bound,
    check_regular,
    limit_experiment,
    lift_element,
    step_profile,
    validate_chain,
)
from .monoid import validate_monoid
from .qcms import (
    MarkovMap,
    dil_markov,
    induced_length_metric,
    mk_dist_maps,
    validate_kernel,
    validate_space,
    validate_state,
    validate_system,
    w1,
)
from .rational import fmt
from .tunnels import covprop_upper_bound, extent, magnitude, reach, validate_tunnel
from .upsilon import DEFAULT_BUDGET, SolverStats, gh_compact, gh_pointed, upsilon, upsilon_star

__all__ = ["main", "build_parser", "RunReport", "SCHEMA"]

SCHEMA = "v1"
EXPERIMENT_BUDGET = 16


@dataclass
class RunReport:
    command: list[str]
    inputs: dict[str, str] = field(default_factory=dict)
    result: dict[str, Any] = field(default_factory=dict)
    witness: Any = None
    stats: dict[str, int] = field(default_factory=dict)
    wall_time: float | None = None

    def to_json(self) -> dict:
        out = {
            "schema": SCHEMA,
            "command": self.command,
            "inputs": self.inputs,
            "result": self.result,
            "witness": self.witness,
            "stats": self.stats,
        }
        if self.wall_time is not None:
            out["wall_time"] = self.wall_time
        return out


class _Run:
    """Per-invocation state: input digests, printed lines, report fields."""

    def __init__(self, args, argv: list[str]):
        self.args = args
        self.report = RunReport(list(argv))
        self.lines: list[str] = []

    def path(self, p: str) -> Path:
        path = Path(p)
        try:
            self.report.inputs[p] = hashlib.sha256(path.read_bytes()).hexdigest()
        except OSError:
            pass
        return path

    def value(self, key: str, v) -> None:
        self.report.result[key] = fmt(v)

    def say(self, line: str) -> None:
        self.lines.append(line)

    def stats(self, s: SolverStats) -> None:
        self.report.stats = {"nodes": s.nodes, "probes": s.probes, "lps": s.lps}


def _budget(args, default: int = DEFAULT_BUDGET) -> int:
    return default if args.budget is None else args.budget


def _stats_of(*results) -> SolverStats:
    total = SolverStats()
    for r in results:
        s = getattr(r, "stats", None)
        if s is not None:
            total.nodes += s.nodes
            total.probes += s.probes
            total.lps += s.lps
    return total


# commands ----------------------------------------------------------------


def _cmd_validate(run: _Run) -> None:
    G = validate_monoid(io.load_monoid(run.path(run.args.monoid)))
    run.report.result = {"valid": True, "elements": len(G.elements), "diameter": fmt(G.diameter())}
    run.say("ok")


def _upsilon_common(run: _Run, star: bool) -> None:
    a = run.args
    G1 = validate_monoid(io.load_monoid(run.path(a.a)))
    G2 = validate_monoid(io.load_monoid(run.path(a.b)))
    fn = upsilon_star if star else upsilon
    res = fn(G1, G2, budget=_budget(a), jobs=a.jobs)
    run.value("value", res.value)
    run.report.result["attained"] = res.attained
    run.report.result["criticals_tested"] = [fmt(c) for c in res.criticals_tested]
    if res.witness is not None:
        run.report.witness = io.pair_to_json(res.witness, G1, G2)
    run.stats(res.stats)
    run.say(fmt(res.value))
    if a.emit_witness:
        io.dump_json(run.report.witness, a.emit_witness)


def _cmd_upsilon(run: _Run) -> None:
    _upsilon_common(run, run.args.star)


def _cmd_upsilon_star(run: _Run) -> None:
    _upsilon_common(run, True)


def _cmd_gh(run: _Run) -> None:
    a = run.args
    G1 = validate_monoid(io.load_monoid(run.path(a.a)))
    G2 = validate_monoid(io.load_monoid(run.path(a.b)))
    res = (gh_compact if a.compact else gh_pointed)(G1, G2)
    run.value("value", res.value)
    run.report.result["attained"] = res.attained
    if res.correspondence is not None:
        run.report.witness = [[G1.elements[x], G2.elements[y]] for x, y in res.correspondence]
    run.say(fmt(res.value))


def _load_kernel(run: _Run, p: str) -> MarkovMap:
    data = io.load_json(run.path(p))
    if isinstance(data, dict):
        if "kernel" not in data:
            raise ParseError("missing field 'kernel'", locus=f"{p}:<root>")
        data = data["kernel"]
    if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
        raise ParseError("expected a matrix", locus=f"{p}:<root>")
    rows = [[io.parse_rational(v) for v in row] for row in data]
    return MarkovMap(tuple(tuple(r) for r in rows))


def _cmd_w1(run: _Run) -> None:
    a = run.args
    X = validate_space(io.load_space(run.path(a.space)))
    mu = validate_state(X, io.load_state(run.path(a.mu), X))
    nu = validate_state(X, io.load_state(run.path(a.nu), X))
    v = w1(X, mu, nu)
    run.value("value", v)
    run.say(fmt(v))


def _spaces(run: _Run):
    a = run.args
    X = validate_space(io.load_space(run.path(a.space)))
    Y = validate_space(io.load_space(run.path(a.dst))) if a.dst else X
    return X, Y


def _cmd_mkd(run: _Run) -> None:
    a = run.args
    X, Y = _spaces(run)
    alpha = validate_kernel(_load_kernel(run, a.alpha), Y.n, X.n)
    beta = validate_kernel(_load_kernel(run, a.beta), Y.n, X.n)
    v = mk_dist_maps(X, Y, alpha, beta)
    run.value("value", v)
    run.say(fmt(v))


def _cmd_dil(run: _Run) -> None:
    a = run.args
    X, Y = _spaces(run)
    alpha = validate_kernel(_load_kernel(run, a.kernel), Y.n, X.n)
    v = dil_markov(X, alpha, Y)
    run.value("value", v)
    run.say(fmt(v))


def _cmd_validate_system(run: _Run) -> None:
    s = io.load_system(run.path(run.args.system))
    rep = validate_system(s)
    names = s.monoid.elements
    run.report.result = {
        "valid": True,
        "dilations": {names[g]: fmt(d) for g, d in enumerate(rep.dilations)},
        "max_dilation": fmt(rep.max_dilation),
    }
    for g, d in enumerate(rep.dilations):
        run.say(f"{names[g]} {fmt(d)}")


def _cmd_induced_metric(run: _Run) -> None:
    s = io.load_system(run.path(run.args.system))
    G = induced_length_metric(s)
    data = io.monoid_to_json(G)
    run.report.result = {"monoid": data}
    run.say(io.dump_json(data).rstrip("\n"))


def _tunnel_systems(run: _Run):
    a = run.args
    s1 = io.load_system(run.path(a.sys1))
    s2 = io.load_system(run.path(a.sys2))
    validate_system(s1)
    validate_system(s2)
    t = validate_tunnel(io.load_tunnel(run.path(a.tunnel)), s1.space, s2.space, s1, s2)
    eps = io.parse_rational(a.epsilon) if a.epsilon else None
    return s1, s2, t, eps


def _cmd_extent(run: _Run) -> None:
    a = run.args
    t = io.load_tunnel(run.path(a.tunnel))
    validate_space(t.ambient)
    v = extent(t)
    run.value("value", v)
    run.say(fmt(v))


def _cmd_reach(run: _Run) -> None:
    s1, s2, t, eps = _tunnel_systems(run)
    stats = SolverStats()
    v = reach(s1, s2, t, eps, stats=stats)
    run.value("value", v)
    run.stats(stats)
    run.say(fmt(v))


def _cmd_magnitude(run: _Run) -> None:
    s1, s2, t, eps = _tunnel_systems(run)
    stats = SolverStats()
    v = magnitude(s1, s2, t, eps, stats=stats)
    run.value("value", v)
    run.stats(stats)
    run.say(fmt(v))


def _cmd_covprop_bound(run: _Run) -> None:
    a = run.args
    s1 = io.load_system(run.path(a.a))
    s2 = io.load_system(run.path(a.b))
    grid = [io.parse_rational(v) for v in a.eta_grid.split(",") if v.strip()] if a.eta_grid else []
    res = covprop_upper_bound(s1, s2, budget=_budget(a), eta_grid=grid)
    run.value("value", res.value)
    run.report.result["attained"] = res.attained
    if res.eta is not None:
        run.value("eta", res.eta)
    if res.magnitude is not None:
        run.value("magnitude", res.magnitude)
    if res.tunnel is not None:
        run.report.witness = io.tunnel_to_json(res.tunnel)
        if a.emit_witness:
            io.dump_json(run.report.witness, a.emit_witness)
    run.stats(res.stats)
    run.say(fmt(res.value))


def _chain(run: _Run, *indices: str):
    ch = validate_chain(io.load_chain(run.path(run.args.chain)))
    for name in indices:
        if not 0 <= getattr(run.args, name) < len(ch):
            raise ParseError(f"index out of range for a chain of length {len(ch)}", locus=f"argv:{name}")
    for G in ch.monoids:
        validate_monoid(G)
    return ch


def _cmd_chain_verify(run: _Run) -> None:
    ch = _chain(run)
    run.report.result = {"valid": True, "length": len(ch), "epsilons": [fmt(e) for e in ch.epsilons]}
    run.say("ok")


def _cmd_chain_bound(run: _Run) -> None:
    a = run.args
    ch = _chain(run, "n", "m")
    if a.n >= a.m:
        raise ParseError("need n < m", locus="argv:n")
    b = cauchy_bound(ch, a.n, a.m)
    run.value("value", b.value)
    if b.witness is not None:
        run.report.witness = io.pair_to_json(b.witness, ch.monoids[a.n], ch.monoids[a.m])
        if a.emit_witness:
            io.dump_json(run.report.witness, a.emit_witness)
    run.say(fmt(b.value))


def _cmd_regular_check(run: _Run) -> None:
    a = run.args
    ch = _chain(run, "N")
    G = ch.monoids[a.N]
    try:
        g = G.index(a.g)
    except (KeyError, ValueError):
        raise ParseError(f"unknown element {a.g!r}", locus="argv:g") from None
    eps = io.parse_rational(a.epsilon)
    cert = check_regular(ch, a.N, g, eps)
    lifted = lift_element(ch, a.N, g)
    run.report.result = {
        "sequence": [ch.monoids[n].elements[x] for n, x in enumerate(lifted.elements)],
        "omega": fmt(cert.entry.omega),
        "start": cert.entry.start,
        "verified_through": cert.entry.verified_through,
        "per_start": [fmt(e.omega) for e in cert.per_start],
    }
    run.say(f"omega {fmt(cert.entry.omega)} verified through {cert.entry.verified_through}")


def _cmd_limit_experiment(run: _Run) -> None:
    a = run.args
    man = io.load_manifest(run.path(a.manifest))
    tol = io.parse_rational(a.tolerance) if a.tolerance else man["tolerance"]
    if tol is None:
        raise ParseError("no tolerance given", locus="argv:--tolerance")
    profile = step_profile(man["profile"]) if man["profile"] else None
    rep = limit_experiment(
        man["systems"],
        tol,
        chain=man["chain"],
        profile=profile,
        schedule=man["schedule"],
        budget=_budget(a, EXPERIMENT_BUDGET),
        jobs=a.jobs,
    )
    run.report.result = {
        "hypotheses": [{"number": h.number, "passed": h.passed, "detail": h.detail} for h in rep.hypotheses],
        "bounds": [fmt(b) for b in rep.bounds],
        "non_increasing": rep.non_increasing,
        "final_below_tolerance": rep.final_below_tolerance,
        "tolerance": fmt(rep.tolerance),
        "verified_through": rep.verified_through,
        "schedule": [[fmt(e), fmt(w), N] for e, w, N in rep.schedule],
    }
    run.stats(_stats_of(*rep.results))
    for h in rep.hypotheses:
        run.say(f"hypothesis {h.number}: pass")
    run.say("bounds " + " ".join(fmt(b) for b in rep.bounds))
    run.say(f"non-increasing {str(rep.non_increasing).lower()}")
    run.say(f"final below {fmt(tol)} {str(rep.final_below_tolerance).lower()}")


# parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--budget", type=int, default=None, help=f"largest monoid size for exact search (default {DEFAULT_BUDGET}, 16 for limit-experiment)"
    )
    common.add_argument("--tolerance", default=None, help="rational tolerance p/q")
    common.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    common.add_argument("--emit-witness", default=None, metavar="PATH", help="write the witness as JSON")
    common.add_argument("--report", default=None, metavar="PATH", help="write a v1 JSON run report")
    common.add_argument("--timing", action="store_true", help="record wall time in the report")

    p = argparse.ArgumentParser(prog="covprop", description="Exact distances between finite metric monoids and dynamics.")
    sub = p.add_subparsers(dest="command", required=True, metavar="SUBCOMMAND")

    def add(name: str, fn: Callable, help: str, *positional: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, parents=[common], help=help)
        for arg in positional:
            sp.add_argument(arg)
        sp.set_defaults(func=fn)
        return sp

    add("validate", _cmd_validate, "check the monoid axioms", "monoid")
    sp = add("upsilon", _cmd_upsilon, "monoid distance between two monoids", "a", "b")
    sp.add_argument("--star", action="store_true", help="use the dilation-aware variant")
    add("upsilon-star", _cmd_upsilon_star, "dilation-aware monoid distance", "a", "b")
    sp = add("gh", _cmd_gh, "pointed Gromov-Hausdorff lower bound", "a", "b")
    sp.add_argument("--compact", action="store_true", help="global distance of the underlying spaces")
    add("w1", _cmd_w1, "Wasserstein distance of two states", "space", "mu", "nu")
    sp = add("mkd", _cmd_mkd, "distance between two Markov maps", "space", "alpha", "beta")
    sp.add_argument("--dst", default=None, help="target space (default: same as source)")
    sp = add("dil", _cmd_dil, "dilation of a Markov map", "space", "kernel")
    sp.add_argument("--dst", default=None, help="target space (default: same as source)")
    add("validate-system", _cmd_validate_system, "check a dynamical system and print dilations", "system")
    add("induced-metric", _cmd_induced_metric, "monoid metric induced by an isometric action", "system")
    add("extent", _cmd_extent, "extent of a tunnel", "tunnel")
    for name, fn in (("reach", _cmd_reach), ("magnitude", _cmd_magnitude)):
        sp = add(name, fn, f"{name} of a tunnel between two systems", "sys1", "sys2", "tunnel")
        sp.add_argument("--epsilon", default=None, help="ball radius 1/epsilon (default: the tunnel's)")
    sp = add("covprop-bound", _cmd_covprop_bound, "certified upper bound on the covariant distance", "a", "b")
    sp.add_argument("--eta-grid", default=None, help="comma separated extra bridge lengths")
    add("chain-verify", _cmd_chain_verify, "verify every link of a chain", "chain")
    sp = add("chain-bound", _cmd_chain_bound, "upper bound between chain entries n and m", "chain")
    sp.add_argument("n", type=int)
    sp.add_argument("m", type=int)
    sp = add("regular-check", _cmd_regular_check, "regularity modulus of a lifted element", "chain")
    sp.add_argument("N", type=int)
    sp.add_argument("g")
    sp.add_argument("--epsilon", required=True, help="tolerance p/q")
    add("limit-experiment", _cmd_limit_experiment, "check a finite family and bound distances to its last entry", "manifest")
    return p


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    run = _Run(args, argv)
    start = time.perf_counter()
    try:
        args.func(run)
    except ParseError as exc:
        print(f"ParseError: {exc}", file=sys.stderr)
        return 2
    except (DomainError, CovpropError) as exc:
        print(f"{exc.name}: {exc}", file=sys.stderr)
        if getattr(exc, "witness", None) is not None:
            print(f"witness: {exc.witness}", file=sys.stderr)
        return 1
    if args.timing:
        run.report.wall_time = time.perf_counter() - start
    for line in run.lines:
        print(line)
    if args.report:
        io.dump_json(run.report.to_json(), args.report)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
