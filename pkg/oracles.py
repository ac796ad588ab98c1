"""
Oracles - combinatorial identities and the acceptance suites
============================================================

Every suite recomputes published values or cross-checks two independent
computations and reports how many checks passed, keeping the first
counterexample. Suites are deterministic: curvature suites draw their
potentials from fixed seeds 0..seeds−1.
"""
from __future__ import annotations

import itertools
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Optional

from digraph_core import MultiDigraph, PointedGraph, canonical_form, disjoint_union, format_compact, weak_components
from graph_enum import enumerate_pointed_semistable_strong, enumerate_stable
from heat_coeff import (
    A1_GRAPH,
    TAU_GRAPHS,
    TAU_TO_SIGMA,
    WEIGHT2_GRAPHS,
    cuttings,
    gamma_of_cutting,
    heat_coefficient,
    tau_to_sigma,
    verify_pairing_cutting_duality,
    z,
)
from jets import GaussianRational, format_gaussian, gaussian
from phi_invariant import PhiCache, count_strong_reductions, phi

log = logging.getLogger(__name__)

SUITES = ("table1", "coefficients", "phi-oracle", "duality", "multiplicativity", "identities", "curvature", "appendix")


class UnknownSuiteError(ValueError):
    pass


# ═══════════════════════════════════════════════════════════════════
# REFERENCE VALUES
# ═══════════════════════════════════════════════════════════════════


def _p(n: int, *edges: tuple[int, int, int]) -> PointedGraph:
    return PointedGraph(MultiDigraph.from_edges(n, list(edges)))


# strongly connected pointed graphs of weight <= 3 with their φ values
TABLE1 = (
    (_p(1, (0, 0, 1)), 1),
    (_p(1, (0, 0, 2)), 2),
    (_p(2, (1, 1, 1), (1, 0, 1), (0, 1, 1)), 1),
    (_p(1, (0, 0, 3)), 6),
    (_p(2, (1, 1, 1), (0, 0, 1), (1, 0, 1), (0, 1, 1)), 3),
    (_p(2, (1, 0, 2), (0, 1, 2)), 8),
    (_p(2, (1, 1, 1), (1, 0, 1), (0, 1, 2)), 4),
    (_p(2, (1, 1, 1), (1, 0, 2), (0, 1, 1)), 4),
    (_p(3, (1, 0, 1), (0, 2, 1), (1, 2, 1), (2, 1, 2)), 4),
    (_p(3, (0, 1, 1), (1, 0, 1), (1, 2, 1), (2, 1, 1), (2, 2, 1)), 1),
    (_p(2, (1, 1, 2), (1, 0, 1), (0, 1, 1)), 2),
    (_p(3, (0, 2, 1), (2, 1, 1), (1, 0, 1), (1, 1, 1), (2, 2, 1)), 2),
)

A1_Z = Fraction(-1, 3)
WEIGHT2_Z = tuple(Fraction(x) for x in ("-2/15", "1/18", "23/90", "7/45"))
TAU_Z = tuple(
    Fraction(x)
    for x in (
        "-1/162", "-23/270", "-7/135", "-17/135", "-332/945", "-307/2835", "-74/405", "2/45",
        "64/315", "26/105", "17/630", "89/315", "1/10", "-1/35", "-206/2835",
    )
)
SIGMA_C = tuple(
    Fraction(x)
    for x in (
        "1/162", "-1/270", "1/135", "8/945", "-4/945", "-26/2835", "32/2835", "2/45",
        "1/315", "2/105", "17/630", "-1/315", "1/70", "1/35", "-2/567",
    )
)

# ═══════════════════════════════════════════════════════════════════
# IDENTITIES
# ═══════════════════════════════════════════════════════════════════


def _weak_compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    for head in range(total + 1):
        for tail in _weak_compositions(total - head, parts - 1):
            yield (head,) + tail


def lemma_pairing_identity(m_parts: list[int], l: int) -> bool:
    """Σ_{a₁+…+a_d=l} ∏ C(m_j+a_j, m_j) = C(l+m+d−1, m+d−1)."""
    d, m = len(m_parts), sum(m_parts)
    lhs = sum(
        math.prod(math.comb(mj + aj, mj) for mj, aj in zip(m_parts, a)) for a in _weak_compositions(l, d)
    )
    return lhs == math.comb(l + m + d - 1, m + d - 1)


def lemma_alternating_sum(m: int, w: int, d: int) -> int:
    """Σ_{j=m}^{w} (−1)^j C(w+d, j+d) C(j+d−1, m+d−1); equals (−1)^m."""
    if not (1 <= m <= w) or d < 0:
        raise ValueError(f"need 1 <= m <= w and d >= 0, got m={m}, w={w}, d={d}")
    return sum((-1) ** j * math.comb(w + d, j + d) * math.comb(j + d - 1, m + d - 1) for j in range(m, w + 1))


# ═══════════════════════════════════════════════════════════════════
# REPORTS
# ═══════════════════════════════════════════════════════════════════


@dataclass
class IdentityReport:
    name: str
    parameters: str
    passed: bool = True
    checked: int = 0
    matched: int = 0
    counterexample: Optional[str] = None
    notes: list[str] = field(default_factory=list)

    def check(self, ok: bool, describe: Callable[[], str]):
        self.checked += 1
        if ok:
            self.matched += 1
            return
        self.passed = False
        if self.counterexample is None:
            self.counterexample = describe()
            log.warning("%s: counterexample %s", self.name, self.counterexample)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        lines = [f"{self.name}: {'PASS' if self.passed else 'FAIL'} {self.matched}/{self.checked}", f"  parameters: {self.parameters}"]
        if self.counterexample:
            lines.append(f"  counterexample: {self.counterexample}")
        lines.extend(f"  {note}" for note in self.notes)
        return "\n".join(lines)


# ═══════════════════════════════════════════════════════════════════
# SUITES
# ═══════════════════════════════════════════════════════════════════


def _suite_table1(report: IdentityReport, cache: PhiCache, **_):
    for g, expected in TABLE1:
        value = phi(g, cache)
        report.check(value == expected, lambda: f"phi({g}) = {value}, expected {expected}")


def _suite_coefficients(report: IdentityReport, cache: PhiCache, **_):
    expected = {canonical_form(A1_GRAPH): A1_Z}
    expected.update({canonical_form(g): c for g, c in zip(WEIGHT2_GRAPHS, WEIGHT2_Z)})
    expected.update({canonical_form(g): c for g, c in zip(TAU_GRAPHS, TAU_Z)})
    sums = {}
    for n in (1, 2, 3):
        sums[n] = heat_coefficient(n, cache)
        for key, graph, coeff in sums[n].terms():
            want = expected.get(key)
            report.check(want == coeff, lambda: f"z({format_compact(graph)}) = {coeff}, expected {want}")
    report.check(sum(len(s) for s in sums.values()) == 20, lambda: "expected 1 + 4 + 15 terms")
    sigma = tau_to_sigma(sums[3])
    for i, want in enumerate(SIGMA_C, 1):
        got = sigma.coefficient(i)
        report.check(got == want, lambda: f"c{i} = {got}, expected {want}")


def _gamma_cs(max_weight: int) -> dict[str, PointedGraph]:
    found: dict[str, PointedGraph] = {}
    for n in range(1, max_weight + 1):
        for g in enumerate_stable(n):
            for c, _ in cuttings(g):
                gamma = gamma_of_cutting(g, c)
                found.setdefault(canonical_form(gamma), gamma)
    return found


def _suite_phi_oracle(report: IdentityReport, cache: PhiCache, max_weight: int = 3, **_):
    graphs: dict[str, PointedGraph] = {}
    for w in range(0, max_weight + 1):
        for g in enumerate_pointed_semistable_strong(w):
            graphs.setdefault(canonical_form(g), g)
    graphs.update(_gamma_cs(max_weight))
    for g in graphs.values():
        a, b = phi(g, cache), count_strong_reductions(g)
        report.check(a == b, lambda: f"{g}: phi = {a}, strong reductions = {b}")
    report.notes.append(f"{len(graphs)} pointed graphs")


def _suite_duality(report: IdentityReport, cache: PhiCache, **_):
    for n in (1, 2):
        stable = enumerate_stable(n)
        gammas = {}
        for g in stable:
            for c, _ in cuttings(g):
                gamma = gamma_of_cutting(g, c)
                gammas.setdefault(canonical_form(gamma), gamma)
        for gamma in gammas.values():
            for g in stable:
                report.check(
                    verify_pairing_cutting_duality(gamma, g),
                    lambda: f"pairings of {gamma} vs cuttings of {format_compact(g)}",
                )


def _connected_low_weight() -> list[MultiDigraph]:
    return [g for g in (A1_GRAPH,) + WEIGHT2_GRAPHS if len(weak_components(g)) == 1]


def _suite_multiplicativity(report: IdentityReport, cache: PhiCache, **_):
    parts = _connected_low_weight()
    for a, b in itertools.combinations_with_replacement(parts, 2):
        sym = 2 if canonical_form(a) == canonical_form(b) else 1
        joined = z(disjoint_union(a, b), cache)
        product = z(a, cache) * z(b, cache) / sym
        report.check(joined == product, lambda: f"z({format_compact(a)} + {format_compact(b)}) = {joined}, product {product}")
    tau1 = z(disjoint_union(A1_GRAPH, A1_GRAPH, A1_GRAPH), cache)
    report.check(tau1 == z(A1_GRAPH, cache) ** 3 / 6 == TAU_Z[0], lambda: f"z(tau1) = {tau1}")


def _suite_identities(report: IdentityReport, **_):
    for d in range(1, 5):
        for m_parts in itertools.product(range(5), repeat=d):
            for l in range(7):
                report.check(lemma_pairing_identity(list(m_parts), l), lambda: f"pairing identity m={m_parts}, l={l}")
    for w in range(1, 9):
        for m in range(1, w + 1):
            for d in range(0, 6):
                value = lemma_alternating_sum(m, w, d)
                report.check(value == (-1) ** m, lambda: f"alternating sum m={m}, w={w}, d={d} is {value}")


def _suite_curvature(report: IdentityReport, cache: PhiCache, d: int = 2, seeds: int = 5, order: int = 8, **_):
    # deferred: the jet stack is only needed for the geometric suites
    from curvature_lab import evaluate_graph, evaluate_sigma, kahler_invariants, random_potential, real_invariants

    for seed in range(seeds):
        pot = random_potential(d, order, seed)
        inv = kahler_invariants(pot)
        real = real_invariants(pot)

        a1 = evaluate_graph(A1_GRAPH, pot) * gaussian(Fraction(-1, 3))
        report.check(
            a1 == inv.rho * gaussian(Fraction(1, 3)) == real.scalar * gaussian(Fraction(1, 6)),
            lambda: f"seed {seed}: a1 = {format_gaussian(a1)}, rho/3 = {format_gaussian(inv.rho * gaussian(Fraction(1, 3)))}",
        )

        graph_a2 = _weighted(WEIGHT2_GRAPHS, WEIGHT2_Z, pot, evaluate_graph)
        kahler_a2 = _combo(
            (Fraction(2, 15), inv.box_rho),
            (Fraction(1, 18), inv.rho * inv.rho),
            (Fraction(-1, 90), inv.ricci_sq),
            (Fraction(1, 45), inv.riemann_sq),
        )
        riemann_a2 = _combo(
            (Fraction(-1, 30), real.laplacian_scalar),
            (Fraction(1, 72), real.scalar * real.scalar),
            (Fraction(-1, 180), real.ricci_sq),
            (Fraction(1, 180), real.riemann_sq),
        )
        report.check(
            graph_a2 == kahler_a2 == riemann_a2,
            lambda: f"seed {seed}: a2 graphs {format_gaussian(graph_a2)}, kahler {format_gaussian(kahler_a2)}, riemann {format_gaussian(riemann_a2)}",
        )

        sigmas = {k: evaluate_sigma(k, pot) for k in range(1, 16)}
        taus = {i: evaluate_graph(g, pot) for i, g in enumerate(TAU_GRAPHS, 1)}
        for i, row in TAU_TO_SIGMA.items():
            expected = _combo(*((Fraction(c), sigmas[j]) for j, c in row.items()))
            report.check(taus[i] == expected, lambda: f"seed {seed}: tau{i} = {format_gaussian(taus[i])}, sigma row {format_gaussian(expected)}")

        lhs = _combo(*((c, taus[i]) for i, c in enumerate(TAU_Z, 1)))
        rhs = _combo(*((c, sigmas[i]) for i, c in enumerate(SIGMA_C, 1)))
        report.check(lhs == rhs, lambda: f"seed {seed}: sum z tau = {format_gaussian(lhs)}, sum c sigma = {format_gaussian(rhs)}")
        log.debug("curvature seed %d done", seed)


def _suite_appendix(report: IdentityReport, d: int = 2, seeds: int = 5, order: int = 8, **_):
    from curvature_lab import kahler_invariants, random_potential, real_invariants

    for seed in range(seeds):
        pot = random_potential(d, order, seed)
        inv = kahler_invariants(pot)
        real = real_invariants(pot)
        two, four = gaussian(2), gaussian(4)
        report.check(real.scalar == two * inv.rho, lambda: f"seed {seed}: P = {format_gaussian(real.scalar)}, rho = {format_gaussian(inv.rho)}")
        report.check(real.ricci_sq == two * inv.ricci_sq, lambda: f"seed {seed}: |Ric_R|^2 = {format_gaussian(real.ricci_sq)}")
        report.check(real.riemann_sq == four * inv.riemann_sq, lambda: f"seed {seed}: |R_R|^2 = {format_gaussian(real.riemann_sq)}")
        report.check(
            real.laplacian_scalar == gaussian(-4) * inv.box_rho,
            lambda: f"seed {seed}: Delta P = {format_gaussian(real.laplacian_scalar)}, box rho = {format_gaussian(inv.box_rho)}",
        )


def _combo(*terms: tuple[Fraction, GaussianRational]) -> GaussianRational:
    total = gaussian(0)
    for c, value in terms:
        total += gaussian(c) * value
    return total


def _weighted(graphs, coefficients, pot, evaluate) -> GaussianRational:
    return _combo(*((c, evaluate(g, pot)) for g, c in zip(graphs, coefficients)))


_RUNNERS = {
    "table1": (_suite_table1, "the 12 strongly connected pointed graphs of weight <= 3"),
    "coefficients": (_suite_coefficients, "z on all stable graphs of weight 1..3, sigma coefficients c1..c15"),
    "phi-oracle": (_suite_phi_oracle, "semistable strongly connected pointed graphs of weight <= 3 and every cutting graph up to weight 3"),
    "duality": (_suite_duality, "every (cutting graph, stable graph) pair of weight <= 2"),
    "multiplicativity": (_suite_multiplicativity, "unordered pairs of connected stable graphs of weight <= 2, and tau1"),
    "identities": (_suite_identities, "pairing identity entries <= 4, d <= 4, l <= 6; alternating sum 1 <= m <= w <= 8, 0 <= d <= 5"),
    "curvature": (_suite_curvature, "random potentials"),
    "appendix": (_suite_appendix, "random potentials"),
}


def run_suite(name: str, cache: Optional[PhiCache] = None, d: int = 2, seeds: int = 5, order: int = 8) -> IdentityReport:
    if name not in _RUNNERS:
        raise UnknownSuiteError(f"unknown suite {name!r}, expected one of {', '.join(SUITES)}")
    runner, parameters = _RUNNERS[name]
    if name in ("curvature", "appendix"):
        parameters = f"{parameters}: d={d}, N={order}, seeds 0..{seeds - 1}"
    report = IdentityReport(name, parameters)
    runner(report, cache=cache if cache is not None else PhiCache(), d=d, seeds=seeds, order=order)
    log.info("suite %s: %s %d/%d", name, "pass" if report.passed else "FAIL", report.matched, report.checked)
    return report
