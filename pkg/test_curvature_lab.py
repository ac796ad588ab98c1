"""Exact curvature at the origin of polynomial Kähler potentials."""
from fractions import Fraction
from pathlib import Path

import pytest

from curvature_lab import (
    KahlerGeometry,
    KahlerPotential,
    SlotSignatureError,
    TensorJet,
    apply_pointed_graph,
    evaluate_graph,
    evaluate_sigma,
    kahler_invariants,
    laplacian_jet,
    metric_jets,
    random_potential,
    random_test_function,
    real_invariants,
)
from digraph_core import MultiDigraph
from graph_enum import laplacian_power
from heat_coeff import A1_GRAPH, WEIGHT2_GRAPHS
from jets import TruncationError, conjugate, gaussian, imag_part

DATA = Path(__file__).parent / "data"
SEEDS = range(3)


def quartic(order=6):
    """φ = zz̄ + z²z̄² in one dimension."""
    return KahlerPotential.from_coefficients(1, order, {((2,), (2,)): (1, 0)})


@pytest.fixture(scope="module", params=SEEDS)
def potential(request):
    return random_potential(2, 8, request.param)


# ═══════════════════════════════════════════════════════════════════
# POTENTIALS
# ═══════════════════════════════════════════════════════════════════


def test_potential_file():
    pot = KahlerPotential.load(DATA / "quartic1d.json")
    assert pot == quartic(4)
    assert KahlerPotential.from_json(pot.to_json()) == pot


def test_conjugate_partner_is_filled_in():
    pot = KahlerPotential.from_coefficients(2, 6, {((2, 0), (1, 1)): (1, 2)})
    table = dict(pot.terms)
    assert table[((1, 1), (2, 0))] == (1, -2)
    assert pot.jet.is_real()


@pytest.mark.parametrize(
    "d, order, coefficients",
    [
        (1, 3, {}),
        (1, 6, {((1,), (2,)): (1, 0)}),
        (1, 4, {((3,), (2,)): (1, 0)}),
        (2, 6, {((2,), (2,)): (1, 0)}),
        (1, 6, {((2,), (3,)): (1, 1), ((3,), (2,)): (1, 1)}),
    ],
)
def test_invalid_potentials(d, order, coefficients):
    with pytest.raises(ValueError):
        KahlerPotential.from_coefficients(d, order, coefficients)


def test_malformed_potential_json():
    with pytest.raises(ValueError):
        KahlerPotential.from_json({"N": 4})
    with pytest.raises(ValueError):
        KahlerPotential.from_json({"d": 1, "N": 4, "monomials": [{"alpha": [2], "beta": [2], "re": "x"}]})


def test_random_potential_is_seeded_and_hermitian():
    a = random_potential(2, 6, 7)
    assert a == random_potential(2, 6, 7)
    assert a != random_potential(2, 6, 8)
    assert a.jet.is_real()
    with pytest.raises(ValueError):
        random_potential(2, 3, 0)


def test_tensor_slot_signature():
    space = quartic().space
    with pytest.raises(SlotSignatureError):
        TensorJet((0, 1), 1, {(0, 0): space.zero()})
    with pytest.raises(SlotSignatureError):
        TensorJet((False,), 2, {(0,): space.zero()})


# ═══════════════════════════════════════════════════════════════════
# HAND-CHECKED EXAMPLE
# ═══════════════════════════════════════════════════════════════════


def test_quartic_curvature_at_origin():
    geo = KahlerGeometry(quartic())
    assert geo.r0[(0, 0, 0, 0)] == gaussian(-4)
    assert geo.rho0 == gaussian(-4)
    assert geo.box_rho == gaussian(48)
    rho = geo.scalar
    assert rho.coeff((1, 1)) == gaussian(48)


def test_quartic_graph_value_and_real_scalar():
    pot = quartic(4)
    assert evaluate_graph(A1_GRAPH, pot) == gaussian(4)
    assert real_invariants(pot, laplacian=False).scalar == gaussian(-8)


def test_quartic_needs_order_6_for_weight_2():
    with pytest.raises(TruncationError) as info:
        evaluate_graph(WEIGHT2_GRAPHS[0], quartic(4))
    assert info.value.required_order == 6


def test_flat_space_has_no_curvature():
    flat = KahlerPotential.flat(2, 6)
    inv = kahler_invariants(flat)
    assert inv.rho == inv.ricci_sq == inv.riemann_sq == inv.box_rho == gaussian(0)
    assert KahlerGeometry(flat).curvature.is_zero()
    real = real_invariants(flat)
    assert real.scalar == real.riemann_sq == gaussian(0)


# ═══════════════════════════════════════════════════════════════════
# RANDOM POTENTIALS
# ═══════════════════════════════════════════════════════════════════


def test_curvature_symmetries(potential):
    R = KahlerGeometry(potential).r0
    for (i, j, k, l), value in R.items():
        assert R[(k, j, i, l)] == value
        assert R[(i, l, k, j)] == value
        assert R[(j, i, l, k)] == conjugate(value)


def test_metric_is_parallel(potential):
    geo = KahlerGeometry(potential)
    assert geo.covariant_derivative(geo.metric, False).is_zero()
    assert geo.covariant_derivative(geo.metric, True).is_zero()


def test_metric_derivatives_are_symmetric(potential):
    g = metric_jets(potential)
    d = potential.d
    for i in range(d):
        for j in range(d):
            for k in range(d):
                assert g[(j, k)].dz(i) == g[(i, k)].dz(j)
                assert g[(k, j)].dzb(i) == g[(k, i)].dzb(j)


@pytest.mark.parametrize("barred", [False, True])
def test_first_covariant_derivative_at_origin_is_partial(potential, barred):
    # normal coordinates: the symbols vanish at the origin
    geo = KahlerGeometry(potential)
    for t in (geo.curvature, geo.ricci):
        nabla = geo.covariant_derivative(t, barred).at_origin()
        for idx in t.indices():
            for c in range(potential.d):
                partial = t[idx].dzb(c) if barred else t[idx].dz(c)
                assert nabla[idx + (c,)] == partial.at_origin()


def test_scalar_curvature_is_real(potential):
    inv = kahler_invariants(potential)
    for value in (inv.rho, inv.ricci_sq, inv.riemann_sq, inv.box_rho):
        assert imag_part(value) == 0


def test_a1_is_a_third_of_rho(potential):
    a1 = evaluate_graph(A1_GRAPH, potential) * gaussian(Fraction(-1, 3))
    assert a1 == kahler_invariants(potential).rho * gaussian(Fraction(1, 3))


def test_weight_2_dictionary(potential):
    inv = kahler_invariants(potential)
    three_loops, split, looped_cycle, double_cycle = (evaluate_graph(h, potential) for h in WEIGHT2_GRAPHS)
    assert three_loops == -inv.box_rho + inv.riemann_sq + inv.ricci_sq * gaussian(2)
    assert split == inv.rho * inv.rho
    assert looped_cycle == inv.ricci_sq
    assert double_cycle == inv.riemann_sq


def test_box_squared_rho_two_ways(potential):
    geo = KahlerGeometry(potential)
    assert geo.box_squared_rho() == geo.box_squared_rho_covariant()
    assert evaluate_sigma(14, potential) == geo.box_squared_rho()


def test_sigma_products(potential):
    inv = kahler_invariants(potential)
    assert evaluate_sigma(1, potential) == inv.rho ** 3
    assert evaluate_sigma(2, potential) == inv.rho * inv.ricci_sq
    assert evaluate_sigma(3, potential) == inv.rho * inv.riemann_sq
    assert evaluate_sigma(8, potential) == inv.rho * inv.box_rho


def test_sigma_index_bounds(potential):
    with pytest.raises(ValueError):
        evaluate_sigma(16, potential)


def test_self_reverse_graphs_are_real(potential):
    cycle = MultiDigraph.from_edges(3, [(0, 1, 2), (1, 2, 2), (2, 0, 2)])
    assert imag_part(evaluate_graph(cycle, potential)) == 0


@pytest.mark.parametrize("k", [1, 2])
def test_laplacian_power_as_an_operator(potential, k):
    f = random_test_function(potential.space, seed=11)
    expected = f
    for _ in range(k):
        expected = laplacian_jet(expected, potential)
    total = gaussian(0)
    for _, gamma, coeff in laplacian_power(k).terms():
        total += gaussian(coeff) * apply_pointed_graph(gamma, potential, f)
    assert total == expected.at_origin()


def test_real_and_kahler_invariants_agree(potential):
    inv = kahler_invariants(potential)
    real = real_invariants(potential)
    assert real.scalar == inv.rho * gaussian(2)
    assert real.ricci_sq == inv.ricci_sq * gaussian(2)
    assert real.riemann_sq == inv.riemann_sq * gaussian(4)
    assert real.laplacian_scalar == inv.box_rho * gaussian(-4)


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(5))
def test_three_dimensions(seed):
    pot = random_potential(3, 8, seed)
    inv = kahler_invariants(pot)
    real = real_invariants(pot)
    assert real.scalar == inv.rho * gaussian(2)
    assert real.riemann_sq == inv.riemann_sq * gaussian(4)
    assert evaluate_graph(WEIGHT2_GRAPHS[3], pot) == inv.riemann_sq
