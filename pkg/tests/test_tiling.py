"""Fuchsian generators, defining relation, fundamental domain, tile enumeration."""

import math

import numpy as np
import pytest

from hyperband.halfplane import (
    HPoint,
    Sl2Element,
    exp_s,
    exp_u,
    hyperbolic_distance,
    moebius_act,
    psl2_distance,
)
from hyperband.tiling import (
    FuchsianGenerators,
    FundamentalDomain,
    GroupWord,
    TilingParams,
    edge_pairing_defect,
    enumerate_tiles,
    make_fundamental_domain,
    make_generators,
    relation_defect,
    relation_word,
    scaling_parameter,
)


def test_params_reject_low_genus():
    with pytest.raises(ValueError):
        TilingParams(1)
    with pytest.raises(ValueError):
        TilingParams(0)
    TilingParams(2)


def test_scaling_parameter_closed_forms_agree():
    # cot(pi/8) + sqrt(cot^2(pi/8) - 1) and (1+sqrt2)(1+sqrt2*sqrt(sqrt2-1))
    # are the same algebraic number
    e_mu = math.exp(scaling_parameter(2))
    alt = (1 + math.sqrt(2)) * (1 + math.sqrt(2) * math.sqrt(math.sqrt(2) - 1))
    assert abs(e_mu - alt) < 1e-12
    assert abs(e_mu - 4.611581789308715) < 1e-12


def test_generator_count_and_first_is_diagonal():
    gens = make_generators(TilingParams(2))
    assert len(gens.gammas) == 4
    g1 = gens.gammas[0]
    e_mu = math.exp(gens.mu)
    assert abs(g1.a - e_mu) < 1e-12 and abs(g1.d - 1.0 / e_mu) < 1e-12
    assert abs(g1.b) < 1e-12 and abs(g1.c) < 1e-12


def test_generators_symmetric_positive_definite():
    # conjugating a positive diagonal by a rotation keeps R A R^T symmetric
    gens = make_generators(TilingParams(3))
    assert len(gens.gammas) == 6
    for gamma in gens.gammas:
        assert abs(gamma.b - gamma.c) < 1e-12
        assert gamma.a > 0 and gamma.d > 0


def test_generator_trace_is_2cosh_mu():
    for g in (2, 3, 4):
        gens = make_generators(TilingParams(g))
        for gamma in gens.gammas:
            assert abs(gamma.trace - 2.0 * math.cosh(gens.mu)) < 1e-10


def test_generator_matches_rotated_scaling_orbit():
    # gamma_j moves the domain center i the same hyperbolic distance 2mu as
    # the pure scaling does, in the direction rotated by (j-1)pi/4g
    gens = make_generators(TilingParams(2))
    center = HPoint(0.0, 1.0)
    for gamma in gens.gammas:
        d = hyperbolic_distance(center, moebius_act(gamma, center))
        assert abs(d - 2.0 * gens.mu) < 1e-10


def test_generators_invariant_enforced():
    gens = make_generators(TilingParams(2))
    with pytest.raises(ValueError):
        FuchsianGenerators(gens.gammas, gens.mu + 1e-6)
    with pytest.raises(ValueError):
        FuchsianGenerators(gens.gammas[:3], gens.mu)


# ---------------------------------------------------------------- relation


def test_relation_defect_small_for_all_genera():
    for g in (2, 3, 4, 5):
        gens = make_generators(TilingParams(g))
        assert relation_defect(gens) < 1e-9


def test_relation_word_shape():
    w = relation_word(2)
    assert w.letters == (
        (1, 1), (2, -1), (3, 1), (4, -1),
        (1, -1), (2, 1), (3, -1), (4, 1),
    )


def test_relation_defect_sensitive_to_mu():
    # rebuilding the generators with mu + 0.01 must visibly break the relation
    g = 2
    mu = scaling_parameter(g) + 0.01
    mats = []
    for j in range(1, 2 * g + 1):
        rot = exp_s((j - 1) * math.pi / (4 * g))
        mats.append(rot @ exp_u(mu) @ rot.inverse())
    prod = Sl2Element.identity()
    for idx, exp in relation_word(g).letters:
        m = mats[idx - 1]
        prod = prod @ (m if exp == 1 else m.inverse())
    assert psl2_distance(prod, Sl2Element.identity()) > 1e-3


def test_group_word_rejects_unreduced():
    with pytest.raises(ValueError):
        GroupWord(((1, 1), (1, -1)))
    with pytest.raises(ValueError):
        GroupWord(((2, 1), (3, 2)))
    GroupWord(((1, 1), (1, 1), (2, -1)))  # squares are fine


# ---------------------------------------------------------------- domain


def test_domain_frozen_vertex_values():
    dom = make_fundamental_domain(TilingParams(2))
    assert len(dom.vertices) == 8 and len(dom.edges) == 8
    v8 = dom.vertices[7]
    assert abs(v8.x - 4.19736822693562) < 1e-12
    assert abs(v8.y - 1.9101797211244547) < 1e-12
    # v_1 mirrors v_8 across the imaginary axis
    v1 = dom.vertices[0]
    assert abs(v1.x + v8.x) < 1e-9 and abs(v1.y - v8.y) < 1e-9


def test_domain_vertices_equidistant_from_center():
    for g in (2, 3):
        dom = make_fundamental_domain(TilingParams(g))
        center = HPoint(0.0, 1.0)
        dists = [hyperbolic_distance(center, v) for v in dom.vertices]
        assert max(dists) - min(dists) < 1e-9


def test_domain_vertices_are_rotated_copies():
    g = 2
    dom = make_fundamental_domain(TilingParams(g))
    v_last = dom.vertices[-1]
    for j in range(1, 4 * g):
        w = moebius_act(exp_s(j * math.pi / (4 * g)), v_last)
        assert abs(w.x - dom.vertices[j - 1].x) < 1e-9
        assert abs(w.y - dom.vertices[j - 1].y) < 1e-9


def test_domain_edge_wiring_wraps():
    dom = make_fundamental_domain(TilingParams(2))
    assert dom.edges[0] == (7, 0)  # C_1 connects v_8 (as v_0) and v_1
    assert dom.edges[3] == (2, 3)
    assert dom.edges[7] == (6, 7)


# ---------------------------------------------------------------- edge pairing


def test_edge_pairing_defect_small():
    for g in (2, 3):
        p = TilingParams(g)
        assert edge_pairing_defect(make_generators(p), make_fundamental_domain(p)) < 1e-8


def test_edge_pairing_defect_detects_wrong_generator():
    p = TilingParams(2)
    gens = make_generators(p)
    dom = make_fundamental_domain(p)
    # swapping gamma_1 for gamma_2 sends C_5 nowhere near C_1
    broken = FuchsianGenerators((gens.gammas[1],) + gens.gammas[1:], gens.mu)
    assert edge_pairing_defect(broken, dom) > 0.1


def test_edge_pairing_defect_checks_genus_match():
    gens = make_generators(TilingParams(2))
    dom = make_fundamental_domain(TilingParams(3))
    with pytest.raises(ValueError):
        edge_pairing_defect(gens, dom)


# ---------------------------------------------------------------- enumeration


def test_enumerate_depth_zero_and_one():
    gens = make_generators(TilingParams(2))
    tiles0 = enumerate_tiles(gens, 0)
    assert len(tiles0) == 1
    assert psl2_distance(tiles0[0], Sl2Element.identity()) == 0.0
    tiles1 = enumerate_tiles(gens, 1)
    assert len(tiles1) == 9
    for i in range(9):
        for j in range(i + 1, 9):
            assert psl2_distance(tiles1[i], tiles1[j]) > 1e-6


def test_enumerate_depth_two_matches_brute_force():
    gens = make_generators(TilingParams(2))
    tiles = enumerate_tiles(gens, 2)

    atoms = []
    for gamma in gens.gammas:
        atoms.extend([gamma, gamma.inverse()])
    words = [Sl2Element.identity()] + list(atoms)
    for m1 in atoms:
        for m2 in atoms:
            words.append(m1 @ m2)  # includes unreduced pairs on purpose
    distinct: list[Sl2Element] = []
    for w in words:
        if all(psl2_distance(w, seen) > 1e-6 for seen in distinct):
            distinct.append(w)
    assert len(tiles) == len(distinct) == 65


def test_enumerate_images_of_center_well_separated():
    gens = make_generators(TilingParams(2))
    tiles = enumerate_tiles(gens, 2)
    center = HPoint(0.0, 1.0)
    pts = [moebius_act(m, center) for m in tiles]
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            assert hyperbolic_distance(pts[i], pts[j]) > 1e-3


def test_enumerate_deterministic_order():
    gens = make_generators(TilingParams(2))
    a = enumerate_tiles(gens, 3)
    b = enumerate_tiles(gens, 3)
    assert len(a) == len(b)
    for m1, m2 in zip(a, b):
        assert m1.entries() == m2.entries()


def test_enumerate_refuses_explosive_depth():
    gens = make_generators(TilingParams(2))
    with pytest.raises(ValueError):
        enumerate_tiles(gens, 7)  # 8 * sum 7^l crosses 1e6 candidates
    with pytest.raises(ValueError):
        enumerate_tiles(gens, -1)


def test_enumerate_counts_follow_word_growth():
    # the surface group has no relations shorter than 8 letters, so counts up
    # to depth 3 match the free-group formula 1 + sum 4g (4g-1)^(l-1)
    gens = make_generators(TilingParams(2))
    expected = {0: 1, 1: 9, 2: 65, 3: 457}
    for depth, count in expected.items():
        assert len(enumerate_tiles(gens, depth)) == count


def test_enumerate_genus_three():
    gens = make_generators(TilingParams(3))
    tiles = enumerate_tiles(gens, 2)
    assert len(tiles) == 1 + 12 + 12 * 11


def test_tile_membership_is_group_closed():
    # every depth-1 product of depth-1 elements must appear in the depth-2 list
    gens = make_generators(TilingParams(2))
    tiles1 = enumerate_tiles(gens, 1)
    tiles2 = enumerate_tiles(gens, 2)
    rng = np.random.default_rng(71)
    idx = rng.integers(0, len(tiles1), size=(12, 2))
    for i, j in idx:
        prod = tiles1[i] @ tiles1[j]
        assert any(psl2_distance(prod, m) < 1e-6 for m in tiles2)
