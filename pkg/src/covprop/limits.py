"""Finite-horizon checks for chains of almost isometries and their limits.

Nothing here builds a limit object.  A finite chain stands in for a
convergent sequence, its last entry plays the limit, and every certificate
states the index range it was verified on.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .almost_iso import AlmostIsoPair, check_almost_iso, compose, identity_pair
from .errors import BudgetExceeded, HypothesisFailed, OutOfBall, PreconditionFailed
from .monoid import FiniteMetricMonoid, group_inverse
from .qcms import FiniteQCMS, LipschitzDynamicalSystem, action_modulus, mk_dist_maps, validate_system
from .rational import Value, below_cap, cap, to_fraction
from .tunnels import CovpropResult, covprop_upper_bound, minimal_correspondences
from .upsilon import upsilon

__all__ = [
    "MonoidChain",
    "LiftedSequence",
    "RegularityEntry",
    "RegularityCertificate",
    "CauchyBound",
    "ExperimentReport",
    "HypothesisCheck",
    "validate_chain",
    "identity_chain",
    "compose_chain",
    "lift_element",
    "check_regular",
    "check_regular_sequence",
    "cauchy_bound",
    "step_profile",
    "gh_spaces",
    "limit_experiment",
    "inverse_certificate",
]

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class MonoidChain:
    """``links[n]`` goes from ``monoids[n]`` to ``monoids[n+1]`` at ``(eps_n, 1/eps_n)``."""

    monoids: tuple[FiniteMetricMonoid, ...]
    links: tuple[AlmostIsoPair, ...]
    epsilons: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "monoids", tuple(self.monoids))
        object.__setattr__(self, "links", tuple(self.links))
        object.__setattr__(self, "epsilons", tuple(to_fraction(e) for e in self.epsilons))

    def __len__(self) -> int:
        return len(self.monoids)

    def tail_sum(self, n: int) -> Fraction:
        return sum(self.epsilons[n:], Fraction(0))

    def segment_sum(self, n: int, k: int) -> Fraction:
        return sum(self.epsilons[n:k], Fraction(0))


def validate_chain(chain: MonoidChain) -> MonoidChain:
    if len(chain.links) != len(chain.monoids) - 1 or len(chain.epsilons) != len(chain.links):
        raise PreconditionFailed("a chain of k monoids needs k-1 links and k-1 epsilons")
    for n, (link, eps) in enumerate(zip(chain.links, chain.epsilons)):
        if eps <= 0 or eps * eps > HALF:
            raise PreconditionFailed(f"epsilon {eps} of link {n} is outside (0, sqrt(2)/2]", witness=(n,))
        res = check_almost_iso(chain.monoids[n], chain.monoids[n + 1], link.retag(eps, 1 / eps))
        if not res:
            raise PreconditionFailed(f"link {n} fails verification", witness=(n, res.witness))
    return chain


def identity_chain(G: FiniteMetricMonoid, epsilons: Sequence) -> MonoidChain:
    eps = [to_fraction(e) for e in epsilons]
    links = [identity_pair(G, e, 1 / e) for e in eps]
    return MonoidChain(tuple([G] * (len(eps) + 1)), tuple(links), tuple(eps))


def compose_chain(chain: MonoidChain, n: int, k: int) -> AlmostIsoPair:
    """Composite of links ``n .. k-1`` certified at the epsilon sum."""
    if not 0 <= n < k < len(chain):
        raise IndexError("need 0 <= n < k < len(chain)")
    total = chain.segment_sum(n, k)
    if total * total > HALF:
        raise BudgetExceeded(
            f"epsilon sum {total} exceeds sqrt(2)/2", witness=(n, k, f"{total.numerator}/{total.denominator}")
        )
    acc = chain.links[n].retag(chain.epsilons[n], 1 / chain.epsilons[n])
    for j in range(n + 1, k):
        nxt = chain.links[j].retag(chain.epsilons[j], 1 / chain.epsilons[j])
        acc = compose(chain.monoids[n], chain.monoids[j], chain.monoids[j + 1], acc, nxt)
    res = check_almost_iso(chain.monoids[n], chain.monoids[k], acc)
    if not res:
        raise PreconditionFailed(f"composite {n}->{k} fails verification", witness=res.witness)
    return acc


@dataclass(frozen=True)
class LiftedSequence:
    start: int
    elements: tuple[int, ...]

    @property
    def tail(self) -> tuple[int, ...]:
        return self.elements[self.start :]


def lift_element(chain: MonoidChain, N: int, g: int) -> LiftedSequence:
    """Identity before ``N``, ``g`` at ``N``, forward images afterwards.

    ``g`` must lie in the ball of radius ``1 / (eps_N + ... )`` (the tail sum
    truncated at the chain end; no constraint when the tail is empty).
    """
    if not 0 <= N < len(chain):
        raise IndexError("N out of range")
    tail = chain.tail_sum(N)
    G = chain.monoids[N]
    if tail > 0 and G.norm(g) > 1 / tail:
        raise OutOfBall(f"{G.elements[g]} is outside the ball of radius 1/{tail}", witness=(N, g))
    seq = [chain.monoids[n].identity for n in range(N)] + [g]
    for n in range(N, len(chain) - 1):
        seq.append(chain.links[n].forward[seq[-1]])
    return LiftedSequence(N, tuple(seq))


def _translation_omega(G: FiniteMetricMonoid, g: int, eps: Fraction) -> Fraction | None:
    """Least distance among pairs whose right translates by ``g`` are ``>= eps`` apart."""
    worst = None
    for h in range(G.n):
        for k in range(h + 1, G.n):
            if G.d(G.mul(h, g), G.mul(k, g)) >= eps:
                d = G.d(h, k)
                if worst is None or d < worst:
                    worst = d
    return worst


@dataclass(frozen=True)
class RegularityEntry:
    epsilon: Fraction
    omega: Fraction
    start: int
    verified_through: int


@dataclass(frozen=True)
class RegularityCertificate:
    """Moduli for one sequence.  ``entry`` is for ``start = 0`` (the whole chain);
    ``per_start[m]`` gives the largest omega valid from index ``m`` to the end."""

    element: tuple[int, int]
    sequence: tuple[int, ...]
    entry: RegularityEntry
    per_start: tuple[RegularityEntry, ...]


def check_regular_sequence(
    monoids: Sequence[FiniteMetricMonoid], seq: Sequence[int], eps, element=(0, 0)
) -> RegularityCertificate:
    """Moduli of ``h -> h g_n`` along ``seq`` for the tolerance ``eps``."""
    eps = to_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    last = len(monoids) - 1
    per_start = []
    for m in range(len(monoids)):
        finite = [w for n in range(m, len(monoids)) if (w := _translation_omega(monoids[n], seq[n], eps)) is not None]
        if finite:
            omega = min(finite)
        else:
            omega = max(monoids[n].diameter() for n in range(m, len(monoids))) + 1
        per_start.append(RegularityEntry(eps, omega, m, last))
    return RegularityCertificate(tuple(element), tuple(seq), per_start[0], tuple(per_start))


def check_regular(chain: MonoidChain, N: int, g: int, eps) -> RegularityCertificate:
    lifted = lift_element(chain, N, g)
    return check_regular_sequence(chain.monoids, lifted.elements, eps, (N, g))


@dataclass(frozen=True)
class CauchyBound:
    value: Value
    witness: AlmostIsoPair | None


def cauchy_bound(chain: MonoidChain, n: int, m: int) -> CauchyBound:
    """``min(sqrt(2)/2, eps_n + ... + eps_{m-1})`` with the composite pair when it is below the cap."""
    if not 0 <= n < m < len(chain):
        raise IndexError("need 0 <= n < m < len(chain)")
    total = chain.segment_sum(n, m)
    if below_cap(total) or total * total == HALF:
        return CauchyBound(total, compose_chain(chain, n, m))
    return CauchyBound(cap(total), None)


def step_profile(steps: Sequence[tuple]) -> Callable[[Fraction], Fraction]:
    """Locally bounded ``D`` from ``[(r_0, b_0), (r_1, b_1), ...]``: ``D(t) = b_i`` for the
    first ``r_i >= t``, and the last bound beyond.  Bounds below 1 are raised to 1."""
    table = sorted((to_fraction(r), max(Fraction(1), to_fraction(b))) for r, b in steps)
    if not table:
        return lambda t: Fraction(1)

    def D(t: Fraction) -> Fraction:
        for r, b in table:
            if t <= r:
                return b
        return table[-1][1]

    return D


def gh_spaces(X: FiniteQCMS, Y: FiniteQCMS) -> Fraction:
    """Gromov-Hausdorff distance of two finite metric spaces (half the least distortion)."""
    return minimal_correspondences(X, Y)[0][0] / 2


@dataclass(frozen=True)
class HypothesisCheck:
    number: int
    passed: bool
    detail: str
    values: tuple = ()


@dataclass(frozen=True)
class ExperimentReport:
    hypotheses: tuple[HypothesisCheck, ...]
    bounds: tuple[Value, ...]
    results: tuple[CovpropResult, ...]
    non_increasing: bool
    final_below_tolerance: bool
    tolerance: Fraction
    verified_through: int
    schedule: tuple[tuple[Fraction, Fraction, int], ...] = field(default=())

    @property
    def ok(self) -> bool:
        return all(h.passed for h in self.hypotheses) and self.non_increasing and self.final_below_tolerance


def _bound_task(args) -> CovpropResult:
    s, proxy, budget = args
    return covprop_upper_bound(s, proxy, budget=budget)


DEFAULT_SCHEDULE_EPS = (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8))


def limit_experiment(
    systems: Sequence[LipschitzDynamicalSystem],
    tolerance,
    *,
    chain: MonoidChain | None = None,
    profile: Callable[[Fraction], Fraction] | None = None,
    schedule: Sequence[tuple] | None = None,
    budget: int = 16,
    jobs: int = 1,
) -> ExperimentReport:
    """Check the four hypotheses on a finite family and bound each system's distance to the last.

    1. ``dil(alpha_n^g) <= D(d_n(e, g))`` for the profile ``D`` (default 1).
    2. Exact monoid distance to the last monoid is non-increasing and ends at 0.
    3. GH distance of the spaces to the last space is non-increasing and ends at 0.
    4. For each ``(eps, omega, N)`` in the schedule, every ``n >= N`` satisfies
       ``d_n(g, h) < omega => mkD(alpha_n^g, alpha_n^h) < eps``.  The default
       schedule takes ``omega`` from the first system at ``eps = 1/2, 1/4, 1/8``
       with ``N = 0``; a modulus chosen after seeing every system would pass
       trivially on a finite family.

    A failed hypothesis raises :class:`HypothesisFailed`.  The bounds and their
    monotonicity are reported, never asserted.
    """
    tolerance = to_fraction(tolerance)
    systems = list(systems)
    if not systems:
        raise PreconditionFailed("need at least one system")
    for s in systems:
        validate_system(s)
    if chain is not None:
        validate_chain(chain)
        if len(chain) != len(systems) or any(a != s.monoid for a, s in zip(chain.monoids, systems)):
            raise PreconditionFailed("chain monoids do not match the systems")
    D = profile or (lambda t: Fraction(1))
    last = len(systems) - 1
    proxy = systems[-1]
    checks = []

    # (1) dilation profile
    for n, s in enumerate(systems):
        report = validate_system(s)
        G = s.monoid
        for g in range(G.n):
            bound = D(G.norm(g))
            if report.dilations[g] > bound:
                raise HypothesisFailed(
                    f"system {n}: dil of {G.elements[g]} is {report.dilations[g]} > D = {bound}",
                    witness=(n, g),
                    hypothesis=1,
                )
    checks.append(HypothesisCheck(1, True, "dilations bounded by the profile"))

    # (2) monoid distances to the proxy
    ups = [upsilon(s.monoid, proxy.monoid, budget=budget).value for s in systems]
    for n in range(last):
        if ups[n + 1] > ups[n]:
            raise HypothesisFailed(f"monoid distance to the last monoid increases at {n + 1}", witness=(n, n + 1), hypothesis=2)
    if ups[-1] != 0:
        raise HypothesisFailed("last monoid is at positive distance from itself", witness=(last,), hypothesis=2)
    checks.append(HypothesisCheck(2, True, "monoid distances non-increasing to 0", tuple(ups)))

    # (3) spaces
    ghs = [gh_spaces(s.space, proxy.space) for s in systems]
    for n in range(last):
        if ghs[n + 1] > ghs[n]:
            raise HypothesisFailed(f"space distance to the last space increases at {n + 1}", witness=(n, n + 1), hypothesis=3)
    checks.append(HypothesisCheck(3, True, "space distances non-increasing to 0", tuple(ghs)))

    # (4) uniform action modulus
    if schedule is None:
        schedule = [(e, action_modulus(systems[0], e), 0) for e in DEFAULT_SCHEDULE_EPS]
    schedule = [(to_fraction(e), to_fraction(w), int(N)) for e, w, N in schedule]
    for eps, omega, N in schedule:
        for n in range(N, len(systems)):
            s = systems[n]
            G, X = s.monoid, s.space
            for g in range(G.n):
                for h in range(g + 1, G.n):
                    if G.d(g, h) < omega and mk_dist_maps(X, X, s.action[g], s.action[h]) >= eps:
                        raise HypothesisFailed(
                            f"system {n}: d({G.elements[g]}, {G.elements[h]}) < {omega} but mkD >= {eps}",
                            witness=(n, g, h),
                            hypothesis=4,
                        )
    checks.append(HypothesisCheck(4, True, "action moduli hold on the schedule", tuple(schedule)))

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_bound_task, [(s, proxy, budget) for s in systems]))
    else:
        results = [_bound_task((s, proxy, budget)) for s in systems]
    bounds = tuple(r.value for r in results)
    non_inc = all(bounds[i + 1] <= bounds[i] for i in range(last))
    return ExperimentReport(
        tuple(checks),
        bounds,
        tuple(results),
        non_inc,
        bounds[-1] < tolerance,
        tolerance,
        last,
        tuple(schedule),
    )


def inverse_certificate(seq_monoids: Sequence[FiniteMetricMonoid], seq: Sequence[int], eps) -> RegularityCertificate:
    """Regularity certificate for the pointwise inverse of ``seq``."""
    inv = [group_inverse(M)[x] for M, x in zip(seq_monoids, seq)]
    return check_regular_sequence(seq_monoids, inv, eps)

