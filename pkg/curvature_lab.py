"""
Curvature lab - exact Kähler geometry on polynomial potentials
==============================================================

Everything is evaluated at the origin of Kähler normal coordinates: the
potential is φ = Σ z_i z̄_i + (terms of bidegree (p, q) with p, q ≥ 2),
so g_{ij̄}(0) = δ_ij and every purely holomorphic derivative of g vanishes
there. Contracting indices at 0 is therefore index identification.

Two independent routes are provided:

  KahlerGeometry - metric, inverse, Christoffels, R_{ij̄kl̄}, Ricci, ρ and
                   covariant derivatives on the complex side, plus the
                   fifteen weight-3 invariants σ₁..σ₁₅
  RealGeometry   - the same metric written on ℝ^{2d} in x, y coordinates
                   with ordinary Riemannian formulas

Graphs are evaluated straight from the Taylor coefficients of φ: an edge
u→v carries one index, unbarred at u and barred at v, and a vertex with
out-degree p and in-degree q is ∂^p_z ∂^q_z̄ φ(0).
"""
from __future__ import annotations

import itertools
import json
import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Iterator, Optional, Sequence, Union

from sympy.polys.domains import QQ_I

from digraph_core import AnyGraph, MultiDigraph, PointedGraph, canonical_form
from jets import (
    GaussianRational,
    Jet,
    JetMatrix,
    JetSpace,
    TruncationError,
    gaussian,
    imag_part,
    inverse_near_identity,
)

log = logging.getLogger(__name__)

COEFF_NUMERATORS = range(-3, 4)
COEFF_DENOMINATORS = (1, 2)


class SlotSignatureError(ValueError):
    pass


Monomial = tuple[tuple[int, ...], tuple[int, ...]]

# ═══════════════════════════════════════════════════════════════════
# POTENTIALS
# ═══════════════════════════════════════════════════════════════════


def _parse_fraction(text: Union[str, int]) -> Fraction:
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"bad rational {text!r}") from e


@dataclass(frozen=True)
class KahlerPotential:
    """φ = Σ z_i z̄_i + Σ c_{αβ} z^α z̄^β with |α|, |β| ≥ 2 and |α|+|β| ≤ order.

    `terms` holds both c_{αβ} and c_{βα} = conj(c_{αβ}) as (re, im) pairs.
    """

    d: int
    order: int
    terms: tuple[tuple[Monomial, tuple[Fraction, Fraction]], ...] = ()

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"dimension must be >= 1, got {self.d}")
        if self.order < 4:
            raise ValueError(f"truncation order must be >= 4, got {self.order}")
        table = dict(self.terms)
        for (alpha, beta), (re, im) in table.items():
            if len(alpha) != self.d or len(beta) != self.d:
                raise ValueError(f"monomial {alpha},{beta} does not match dimension {self.d}")
            if sum(alpha) < 2 or sum(beta) < 2:
                raise ValueError(f"monomial {alpha},{beta} is not of bidegree (>=2, >=2)")
            if sum(alpha) + sum(beta) > self.order:
                raise ValueError(f"monomial {alpha},{beta} exceeds order {self.order}")
            if table.get((beta, alpha)) != (re, -im):
                raise ValueError(f"coefficients of {alpha},{beta} and {beta},{alpha} are not conjugate")

    @classmethod
    def from_coefficients(cls, d: int, order: int, coefficients: dict[Monomial, tuple]) -> "KahlerPotential":
        """Build from c_{αβ}; missing conjugate partners are filled in."""
        table: dict[Monomial, tuple[Fraction, Fraction]] = {}
        for (alpha, beta), (re, im) in coefficients.items():
            alpha, beta = tuple(alpha), tuple(beta)
            re, im = Fraction(re), Fraction(im)
            if re == 0 and im == 0:
                continue
            partner = coefficients.get((beta, alpha))
            if partner is not None and (Fraction(partner[0]), Fraction(partner[1])) != (re, -im):
                raise ValueError(f"coefficients of {alpha},{beta} and {beta},{alpha} are not conjugate")
            table[(alpha, beta)] = (re, im)
            table[(beta, alpha)] = (re, -im)
        return cls(d, order, tuple(sorted(table.items())))

    @classmethod
    def flat(cls, d: int, order: int = 8) -> "KahlerPotential":
        return cls(d, order)

    @classmethod
    def from_json(cls, data: Union[dict, str]) -> "KahlerPotential":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            d, order = int(data["d"]), int(data["N"])
            coefficients = {
                (tuple(m["alpha"]), tuple(m["beta"])): (_parse_fraction(m.get("re", 0)), _parse_fraction(m.get("im", 0)))
                for m in data.get("monomials", [])
            }
        except (KeyError, TypeError) as e:
            raise ValueError(f"malformed potential: {e}") from e
        return cls.from_coefficients(d, order, coefficients)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "KahlerPotential":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "N": self.order,
            "monomials": [
                {"alpha": list(alpha), "beta": list(beta), "re": str(re), "im": str(im)}
                for (alpha, beta), (re, im) in self.terms
            ],
        }

    @cached_property
    def space(self) -> JetSpace:
        return JetSpace(self.d, self.order)

    @cached_property
    def jet(self) -> Jet:
        space = self.space
        table = {space.monomial(alpha, beta): gaussian(re, im) for (alpha, beta), (re, im) in self.terms}
        for i in range(self.d):
            unit = [0] * self.d
            unit[i] = 1
            table[space.monomial(unit, unit)] = gaussian(1)
        return space.from_terms(table)


def _multi_indices(d: int, degree: int) -> list[tuple[int, ...]]:
    return sorted(a for a in itertools.product(range(degree + 1), repeat=d) if sum(a) == degree)


def random_potential(d: int, order: int, seed: int) -> KahlerPotential:
    """Seeded Hermitian potential with small rational coefficients in every allowed bidegree."""
    if d < 1 or order < 4:
        raise ValueError(f"need d >= 1 and N >= 4, got d={d}, N={order}")
    rng = random.Random(seed)
    coefficients: dict[Monomial, tuple[Fraction, Fraction]] = {}
    for p in range(2, order - 1):
        for q in range(2, order - p + 1):
            for alpha in _multi_indices(d, p):
                for beta in _multi_indices(d, q):
                    if (beta, alpha) < (alpha, beta):
                        continue
                    re = Fraction(rng.choice(COEFF_NUMERATORS), rng.choice(COEFF_DENOMINATORS))
                    im = Fraction(0)
                    if alpha != beta:
                        im = Fraction(rng.choice(COEFF_NUMERATORS), rng.choice(COEFF_DENOMINATORS))
                    coefficients[(alpha, beta)] = (re, im)
    log.debug("random potential d=%d N=%d seed=%s: %d coefficients", d, order, seed, len(coefficients))
    return KahlerPotential.from_coefficients(d, order, coefficients)


def random_test_function(space: JetSpace, seed: int) -> Jet:
    """Real polynomial test function with all monomials up to the space order."""
    rng = random.Random(seed)
    d = space.d
    terms = {}
    for degree in range(space.order + 1):
        for monom in _multi_indices(2 * d, degree):
            alpha, beta = monom[:d], monom[d:]
            if (beta, alpha) < (alpha, beta):
                continue
            re = Fraction(rng.choice(COEFF_NUMERATORS), rng.choice(COEFF_DENOMINATORS))
            im = Fraction(0) if alpha == beta else Fraction(rng.choice(COEFF_NUMERATORS), rng.choice(COEFF_DENOMINATORS))
            terms[monom] = gaussian(re, im)
            terms[beta + alpha] = gaussian(re, -im)
    return space.from_terms(terms)


# ═══════════════════════════════════════════════════════════════════
# TENSORS
# ═══════════════════════════════════════════════════════════════════


@dataclass
class TensorJet:
    """Dense tensor of jets; signature[s] is True when slot s is barred."""

    signature: tuple[bool, ...]
    d: int
    components: dict[tuple[int, ...], Jet]

    def __post_init__(self):
        if not all(isinstance(s, bool) for s in self.signature):
            raise SlotSignatureError(f"slot signature must be booleans, got {self.signature!r}")
        expected = self.d ** len(self.signature)
        if len(self.components) != expected:
            raise SlotSignatureError(f"{len(self.components)} components for {expected} slots")

    @classmethod
    def build(cls, signature: Sequence[bool], d: int, fn) -> "TensorJet":
        signature = tuple(signature)
        return cls(signature, d, {idx: fn(*idx) for idx in itertools.product(range(d), repeat=len(signature))})

    def __getitem__(self, idx: tuple[int, ...]) -> Jet:
        return self.components[idx]

    def indices(self) -> Iterator[tuple[int, ...]]:
        return iter(self.components)

    def truncated(self, order: int) -> "TensorJet":
        return TensorJet(self.signature, self.d, {k: v.truncated(order) for k, v in self.components.items()})

    def at_origin(self) -> dict[tuple[int, ...], GaussianRational]:
        return {k: v.at_origin() for k, v in self.components.items()}

    @property
    def order(self) -> int:
        return min(v.order for v in self.components.values())

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.components.values())


@dataclass
class Connection:
    """Γ^k_{ij} (unbarred[k][i][j]) and its conjugate symbol (barred[k][i][j]).

    Mixed symbols vanish for a Kähler metric.
    """

    unbarred: list[list[list[Jet]]]
    barred: list[list[list[Jet]]]


def metric_jets(potential: KahlerPotential) -> TensorJet:
    phi = potential.jet
    return TensorJet.build((False, True), potential.d, lambda i, j: phi.dz(i).dzb(j))


def _inverse_order(space: JetSpace) -> int:
    # R only needs g⁻¹ to order N−4; small N keeps enough for □ on test functions
    return max(space.order - 4, min(2, space.order - 2))


def inverse_metric_jets(g: TensorJet, order: Optional[int] = None) -> TensorJet:
    """g^{kl̄} as a tensor indexed [k, l], with Σ_l g^{kl̄} g_{ml̄} = δ_km."""
    d = g.d
    space = g[(0, 0)].space
    matrix: JetMatrix = [[g[(i, j)] for j in range(d)] for i in range(d)]
    inverse = inverse_near_identity(matrix, order=_inverse_order(space) if order is None else order)
    return TensorJet.build((False, True), d, lambda k, l: inverse[l][k])


def christoffels(g: TensorJet, ginv: TensorJet) -> Connection:
    d = g.d
    dg = {(j, l, i): g[(j, l)].dz(i) for j in range(d) for l in range(d) for i in range(d)}
    dgb = {(l, j, i): g[(l, j)].dzb(i) for j in range(d) for l in range(d) for i in range(d)}
    rng = range(d)
    unbarred = [[[sum((ginv[(k, l)] * dg[(j, l, i)] for l in rng), g[(0, 0)].space.zero()) for j in rng] for i in rng] for k in rng]
    barred = [[[sum((ginv[(l, k)] * dgb[(l, j, i)] for l in rng), g[(0, 0)].space.zero()) for j in rng] for i in rng] for k in rng]
    return Connection(unbarred, barred)


def curvature(g: TensorJet, ginv: TensorJet) -> TensorJet:
    """R_{ij̄kl̄} = −∂_k∂_l̄ g_{ij̄} + g^{mp̄} ∂_l̄ g_{mj̄} ∂_k g_{ip̄}."""
    d = g.d
    rng = range(d)
    zero = g[(0, 0)].space.zero()
    # a[p, j, l] = Σ_m g^{mp̄} ∂_l̄ g_{mj̄}
    a = {
        (p, j, l): sum((ginv[(m, p)] * g[(m, j)].dzb(l) for m in rng), zero)
        for p in rng
        for j in rng
        for l in rng
    }
    dk = {(i, p, k): g[(i, p)].dz(k) for i in rng for p in rng for k in rng}

    def component(i, j, k, l):
        value = -g[(i, j)].dz(k).dzb(l)
        for p in rng:
            value = value + a[(p, j, l)] * dk[(i, p, k)]
        return value

    return TensorJet.build((False, True, False, True), d, component)


def covariant_derivative(t: TensorJet, barred: bool, connection: Connection) -> TensorJet:
    """T_{β₁…β_p/γ} for every γ, appended as a new last slot of the given type."""
    if not isinstance(barred, bool):
        raise SlotSignatureError(f"direction must be barred (True) or unbarred (False), got {barred!r}")
    d = t.d
    gamma = connection.barred if barred else connection.unbarred
    components = {}
    for idx in t.indices():
        base = t[idx]
        for c in range(d):
            value = base.dzb(c) if barred else base.dz(c)
            for s, slot_barred in enumerate(t.signature):
                if slot_barred != barred:
                    continue
                for delta in range(d):
                    moved = idx[:s] + (delta,) + idx[s + 1:]
                    value = value - gamma[delta][c][idx[s]] * t[moved]
            components[idx + (c,)] = value
    return TensorJet(t.signature + (barred,), d, components)


# ═══════════════════════════════════════════════════════════════════
# KÄHLER GEOMETRY
# ═══════════════════════════════════════════════════════════════════


@dataclass(frozen=True)
class KahlerInvariants:
    rho: GaussianRational
    ricci_sq: GaussianRational
    riemann_sq: GaussianRational
    box_rho: GaussianRational


class KahlerGeometry:
    """Lazily computed curvature data of one potential."""

    def __init__(self, potential: KahlerPotential):
        self.potential = potential
        self.d = potential.d
        self.space = potential.space

    @cached_property
    def metric(self) -> TensorJet:
        return metric_jets(self.potential)

    @cached_property
    def inverse_metric(self) -> TensorJet:
        return inverse_metric_jets(self.metric)

    @cached_property
    def connection(self) -> Connection:
        return christoffels(self.metric, self.inverse_metric)

    @cached_property
    def curvature(self) -> TensorJet:
        return curvature(self.metric, self.inverse_metric)

    @cached_property
    def ricci(self) -> TensorJet:
        d, rng, R, ginv = self.d, range(self.d), self.curvature, self.inverse_metric
        return TensorJet.build(
            (False, True), d, lambda i, j: sum((ginv[(k, l)] * R[(i, j, k, l)] for k in rng for l in rng), self.space.zero())
        )

    @cached_property
    def scalar(self) -> Jet:
        rng = range(self.d)
        return sum((self.inverse_metric[(i, j)] * self.ricci[(i, j)] for i in rng for j in rng), self.space.zero())

    def covariant_derivative(self, t: TensorJet, barred: bool) -> TensorJet:
        return covariant_derivative(t, barred, self.connection)

    def laplacian(self, f: Jet) -> Jet:
        """□f = g^{ij̄} ∂_i ∂_j̄ f."""
        rng = range(self.d)
        return sum((self.inverse_metric[(i, j)] * f.dz(i).dzb(j) for i in rng for j in rng), self.space.zero())

    # values at the origin

    @cached_property
    def r0(self) -> dict:
        return self.curvature.at_origin()

    @cached_property
    def ric0(self) -> dict:
        return self.ricci.at_origin()

    @cached_property
    def rho0(self) -> GaussianRational:
        return self.scalar.at_origin()

    def _sum(self, terms) -> GaussianRational:
        total = QQ_I.zero
        for t in terms:
            total += t
        return total

    def _idx(self, n: int):
        return itertools.product(range(self.d), repeat=n)

    @cached_property
    def box_rho(self) -> GaussianRational:
        rho = self.scalar
        return self._sum(rho.dz(i).dzb(i).at_origin() for i in range(self.d))

    def box_squared_rho(self) -> GaussianRational:
        """□²ρ by applying the jet Laplacian twice."""
        return self.laplacian(self.laplacian(self.scalar)).at_origin()

    def box_squared_rho_covariant(self) -> GaussianRational:
        """□²ρ as Σ ρ_{/iīkk̄} from the fourth covariant derivative."""
        rho = TensorJet((), self.d, {(): self.scalar})
        t = self.covariant_derivative(rho, False)
        t = self.covariant_derivative(t.truncated(3), True)
        t = self.covariant_derivative(t.truncated(2), False)
        t = self.covariant_derivative(t.truncated(1), True)
        return self._sum(t[(i, i, k, k)].at_origin() for i, k in self._idx(2))

    def _second_covariant(self, t: TensorJet) -> dict[tuple[int, ...], GaussianRational]:
        """T_{/m m̄} contracted over m, valid at the origin."""
        first = self.covariant_derivative(t.truncated(2), False)
        second = self.covariant_derivative(first.truncated(1), True)
        slots = len(t.signature)
        return {
            idx: self._sum(second[idx + (m, m)].at_origin() for m in range(self.d))
            for idx in itertools.product(range(self.d), repeat=slots)
        }

    def sigma(self, k: int) -> GaussianRational:
        if not 1 <= k <= 15:
            raise ValueError(f"sigma index must be in 1..15, got {k}")
        return getattr(self, f"_sigma{k}")()

    def _sigma1(self):
        return self.rho0 ** 3

    def _ric_sq(self):
        ric = self.ric0
        return self._sum(ric[(i, j)] * ric[(j, i)] for i, j in self._idx(2))

    def _riem_sq(self):
        R = self.r0
        return self._sum(R[(i, j, k, l)] * R[(j, i, l, k)] for i, j, k, l in self._idx(4))

    def _sigma2(self):
        return self.rho0 * self._ric_sq()

    def _sigma3(self):
        return self.rho0 * self._riem_sq()

    def _sigma4(self):
        ric, R = self.ric0, self.r0
        return self._sum(ric[(i, j)] * ric[(k, l)] * R[(j, i, l, k)] for i, j, k, l in self._idx(4))

    def _sigma5(self):
        ric, R = self.ric0, self.r0
        return self._sum(
            ric[(i, j)] * R[(k, i, l, m)] * R[(j, k, m, l)] for i, j, k, l, m in self._idx(5)
        )

    def _sigma6(self):
        ric = self.ric0
        return self._sum(ric[(i, j)] * ric[(j, k)] * ric[(k, i)] for i, j, k in self._idx(3))

    def _sigma7(self):
        R = self.r0
        return self._sum(
            R[(i, j, k, l)] * R[(j, i, m, n)] * R[(l, k, n, m)] for i, j, k, l, m, n in self._idx(6)
        )

    def _sigma8(self):
        return self.rho0 * self.box_rho

    def _sigma9(self):
        ric = self.ric0
        lap = self._second_covariant(self.ricci)
        return self._sum(ric[(i, j)] * lap[(j, i)] for i, j in self._idx(2))

    def _sigma10(self):
        R = self.r0
        lap = self._second_covariant(self.curvature)
        return self._sum(R[(i, j, k, l)] * lap[(j, i, l, k)] for i, j, k, l in self._idx(4))

    def _sigma11(self):
        rho = self.scalar
        return self._sum(rho.dz(i).at_origin() * rho.dzb(i).at_origin() for i in range(self.d))

    def _first_derivatives(self, t: TensorJet):
        t = t.truncated(1)
        return (
            self.covariant_derivative(t, False).at_origin(),
            self.covariant_derivative(t, True).at_origin(),
        )

    def _sigma12(self):
        du, db = self._first_derivatives(self.ricci)
        return self._sum(du[(i, j, k)] * db[(j, i, k)] for i, j, k in self._idx(3))

    def _sigma13(self):
        du, db = self._first_derivatives(self.curvature)
        return self._sum(
            du[(i, j, k, l, m)] * db[(j, i, l, k, m)] for i, j, k, l, m in self._idx(5)
        )

    def _sigma14(self):
        return self.box_squared_rho()

    def _sigma15(self):
        R = self.r0
        return self._sum(
            R[(i, j, k, l)] * R[(j, m, l, n)] * R[(m, i, n, k)] for i, j, k, l, m, n in self._idx(6)
        )

    def invariants(self) -> KahlerInvariants:
        return KahlerInvariants(self.rho0, self._ric_sq(), self._riem_sq(), self.box_rho)


@lru_cache(maxsize=32)
def geometry(potential: KahlerPotential) -> KahlerGeometry:
    return KahlerGeometry(potential)


def evaluate_sigma(k: int, potential: KahlerPotential) -> GaussianRational:
    return geometry(potential).sigma(k)


def kahler_invariants(potential: KahlerPotential) -> KahlerInvariants:
    return geometry(potential).invariants()


def laplacian_jet(f: Jet, potential: KahlerPotential) -> Jet:
    return geometry(potential).laplacian(f)


# ═══════════════════════════════════════════════════════════════════
# GRAPH EVALUATION
# ═══════════════════════════════════════════════════════════════════


def _contract(g: AnyGraph, sources: Sequence[Jet], d: int) -> GaussianRational:
    edges = [(u, v) for u, v, mult in g.edges() for _ in range(mult)]
    outgoing = [[e for e, (u, _) in enumerate(edges) if u == vertex] for vertex in range(g.vertex_count)]
    incoming = [[e for e, (_, v) in enumerate(edges) if v == vertex] for vertex in range(g.vertex_count)]
    for vertex, source in enumerate(sources):
        degree = len(outgoing[vertex]) + len(incoming[vertex])
        if degree > source.order:
            raise TruncationError(
                source.space.order + degree - source.order,
                f"vertex {vertex} needs derivatives of order {degree}, jets are valid to {source.order}",
            )
    total = QQ_I.zero
    for assignment in itertools.product(range(d), repeat=len(edges)):
        product = QQ_I.one
        for vertex, source in enumerate(sources):
            value = source.taylor(
                [assignment[e] for e in outgoing[vertex]],
                [assignment[e] for e in incoming[vertex]],
            )
            if not value:
                product = QQ_I.zero
                break
            product *= value
        total += product
    return total


def _transpose(g: MultiDigraph) -> MultiDigraph:
    n = g.vertex_count
    return MultiDigraph.from_rows([[g.adjacency[v][u] for v in range(n)] for u in range(n)])


def evaluate_graph(g: MultiDigraph, potential: KahlerPotential) -> GaussianRational:
    """Full contraction of the graph against the Taylor coefficients of φ at 0."""
    value = _contract(g, [potential.jet] * g.vertex_count, potential.d)
    # reversing every edge conjugates the value, so self-reverse graphs are real
    if imag_part(value) != 0 and canonical_form(_transpose(g)) == canonical_form(g):
        raise ArithmeticError(f"graph value {value} of a self-reverse graph is not real")
    return value


def apply_pointed_graph(g: PointedGraph, potential: KahlerPotential, f: Jet) -> GaussianRational:
    """The pointed graph as a differential operator on f, evaluated at 0; • carries f."""
    return _contract(g, [f] + [potential.jet] * (g.vertex_count - 1), potential.d)


# ═══════════════════════════════════════════════════════════════════
# REAL GEOMETRY
# ═══════════════════════════════════════════════════════════════════


@dataclass(frozen=True)
class RealInvariants:
    scalar: GaussianRational
    ricci_sq: GaussianRational
    riemann_sq: GaussianRational
    laplacian_scalar: Optional[GaussianRational]


class RealGeometry:
    """The metric 2 Re Σ g_{ab̄} dz_a dz̄_b on ℝ^{2d}, coordinates x1..xd, y1..yd.

    Riemann sign convention: round spheres have positive scalar curvature.
    Δ = −div grad.
    """

    def __init__(self, potential: KahlerPotential):
        self.potential = potential
        self.d = potential.d
        self.n = 2 * potential.d
        self.order = min(potential.order - 2, 4)
        self.space = JetSpace(self.d, self.order, real=True)
        self._images: dict[tuple[int, ...], object] = {}
        self._powers = self._linear_powers()

    def _linear_powers(self):
        ring, d = self.space.ring, self.d
        i = QQ_I(0, 1)
        plus, minus = [], []
        for j in range(d):
            x, y = self.space.gens[j], self.space.gens[d + j]
            zp, zm = x + y * i, x - y * i
            plus.append([zp ** k if k else ring.one for k in range(self.order + 1)])
            minus.append([zm ** k if k else ring.one for k in range(self.order + 1)])
        return plus, minus

    def realify(self, f: Jet) -> Jet:
        """Substitute z = x + iy, z̄ = x − iy."""
        d = self.d
        plus, minus = self._powers
        ring = self.space.ring
        out = ring.zero
        for monom, coeff in f.poly.items():
            if sum(monom) > self.order:
                continue
            image = self._images.get(monom)
            if image is None:
                image = ring.one
                for j in range(d):
                    image = image * plus[j][monom[j]] * minus[j][monom[d + j]]
                self._images[monom] = image
            out += image * coeff
        return self.space.jet(out, min(f.order, self.order))

    @cached_property
    def metric(self) -> JetMatrix:
        d = self.d
        i = QQ_I(0, 1)
        phi = self.potential.jet
        g = [[phi.dz(a).dzb(b) for b in range(d)] for a in range(d)]
        sym = [[self.realify(g[a][b] + g[b][a]) for b in range(d)] for a in range(d)]
        skew = [[self.realify((g[a][b] - g[b][a]) * (-i)) for b in range(d)] for a in range(d)]
        n = self.n
        G = [[None] * n for _ in range(n)]
        for a in range(d):
            for b in range(d):
                G[a][b] = sym[a][b]
                G[d + a][d + b] = sym[a][b]
                G[a][d + b] = skew[a][b]
                G[d + b][a] = skew[a][b]
        return G

    @cached_property
    def inverse_metric(self) -> JetMatrix:
        return inverse_near_identity(self.metric, scale=2, order=self.order - 1)

    @cached_property
    def christoffel(self) -> list[list[list[Jet]]]:
        """Γ^a_{bc} = ½ G^{ae}(∂_b G_{ec} + ∂_c G_{eb} − ∂_e G_{bc})."""
        n, G, Ginv = self.n, self.metric, self.inverse_metric
        dG = [[[G[e][c].diff(b) for b in range(n)] for c in range(n)] for e in range(n)]
        half = Fraction(1, 2)
        zero = self.space.zero()
        return [
            [
                [
                    sum((Ginv[a][e] * (dG[e][c][b] + dG[e][b][c] - dG[b][c][e]) for e in range(n)), zero) * half
                    for c in range(n)
                ]
                for b in range(n)
            ]
            for a in range(n)
        ]

    @cached_property
    def riemann(self) -> dict[tuple[int, int, int, int], Jet]:
        """R^a_{bcd} = ∂_c Γ^a_{db} − ∂_d Γ^a_{cb} + Γ^a_{ce} Γ^e_{db} − Γ^a_{de} Γ^e_{cb}."""
        n, gam = self.n, self.christoffel
        low = [[[gam[a][b][c].truncated(self.order - 2) for c in range(n)] for b in range(n)] for a in range(n)]
        zero = self.space.zero()
        R = {}
        for a, b in itertools.product(range(n), repeat=2):
            for c in range(n):
                R[(a, b, c, c)] = zero.truncated(self.order - 2)
                for dd in range(c + 1, n):
                    value = gam[a][dd][b].diff(c) - gam[a][c][b].diff(dd)
                    value = value + sum(
                        (low[a][c][e] * low[e][dd][b] - low[a][dd][e] * low[e][c][b] for e in range(n)), zero
                    )
                    R[(a, b, c, dd)] = value
                    R[(a, b, dd, c)] = -value
        return R

    @cached_property
    def ricci(self) -> JetMatrix:
        n, R = self.n, self.riemann
        zero = self.space.zero()
        return [[sum((R[(a, b, a, dd)] for a in range(n)), zero) for dd in range(n)] for b in range(n)]

    @cached_property
    def scalar(self) -> Jet:
        n, Ginv, ric = self.n, self.inverse_metric, self.ricci
        return sum((Ginv[b][dd] * ric[b][dd] for b in range(n) for dd in range(n)), self.space.zero())

    def invariants(self, laplacian: bool = True) -> RealInvariants:
        n = self.n
        G0 = [[self.metric[a][b].at_origin() for b in range(n)] for a in range(n)]
        Gi0 = [[self.inverse_metric[a][b].at_origin() for b in range(n)] for a in range(n)]
        ric0 = [[self.ricci[a][b].at_origin() for b in range(n)] for a in range(n)]
        R0 = {k: v.at_origin() for k, v in self.riemann.items()}
        rng = range(n)

        ricci_sq = QQ_I.zero
        for a, b, c, dd in itertools.product(rng, repeat=4):
            if Gi0[a][c] and Gi0[b][dd]:
                ricci_sq += Gi0[a][c] * Gi0[b][dd] * ric0[a][b] * ric0[c][dd]

        # lower the first index, raise the other three, contract
        lowered = {(a, b, c, dd): sum((G0[a][e] * R0[(e, b, c, dd)] for e in rng), QQ_I.zero)
                   for a, b, c, dd in itertools.product(rng, repeat=4)}
        raised = {}
        for a, b, c, dd in itertools.product(rng, repeat=4):
            total = QQ_I.zero
            for f, g, h in itertools.product(rng, repeat=3):
                w = Gi0[b][f] * Gi0[c][g] * Gi0[dd][h]
                if w:
                    total += w * R0[(a, f, g, h)]
            raised[(a, b, c, dd)] = total
        riemann_sq = sum((lowered[k] * raised[k] for k in lowered), QQ_I.zero)

        lap = None
        if laplacian:
            s = self.scalar
            gam = self.christoffel
            lap = QQ_I.zero
            for a, b in itertools.product(rng, repeat=2):
                if not Gi0[a][b]:
                    continue
                hess = s.diff(a).diff(b).at_origin()
                for c in rng:
                    hess -= gam[c][a][b].at_origin() * s.diff(c).at_origin()
                lap -= Gi0[a][b] * hess
        return RealInvariants(self.scalar.at_origin(), ricci_sq, riemann_sq, lap)


def real_invariants(potential: KahlerPotential, laplacian: bool = True) -> RealInvariants:
    """(𝓟, |𝓡ic|², |𝓡|², Δ𝓟) at 0 from the realified metric alone."""
    return RealGeometry(potential).invariants(laplacian=laplacian)
