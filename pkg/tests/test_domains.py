import math

import numpy as np
import pytest

from conftest import halfplane_stable_affine_product
from stablelab import (Disc, DiscExterior, HalfPlane, MoebiusMap, MoebiusPoleError,
                       MultiPoly, OracleConfig, contains, domain_from_dict, find_zero,
                       is_stable_exact_univariate, moebius_for, sample_interior,
                       stable_class_membership, to_upper_half_plane, transport,
                       transport_between)

UNIT_DISC = Disc(0j, 1.0)
UPPER = HalfPlane(0.0)
RIGHT = HalfPlane(math.pi / 2)

CATALOG = [
    HalfPlane(0.0),
    HalfPlane(math.pi / 2),
    HalfPlane(2.3),
    Disc(0j, 1.0),
    Disc(0.5 - 0.2j, 2.0),
    DiscExterior(0j, 1.0),
    DiscExterior(-1j, 0.5),
]


# ---- membership -------------------------------------------------------------


def test_contains_examples():
    assert contains(UPPER, 1j)
    assert contains(RIGHT, 1.0)  # Im(e^{i pi/2} * 1) = 1 > 0
    assert not contains(UNIT_DISC, 1.0)  # boundary excluded


def test_convexity_flags():
    assert UPPER.convex and UNIT_DISC.convex and not DiscExterior(0j, 1.0).convex


def test_domain_json_round_trip():
    for dom in CATALOG:
        assert domain_from_dict(dom.to_dict()) == dom


# ---- sampling ----------------------------------------------------------------


def test_disc_samples_respect_margin():
    rng = np.random.default_rng(0)
    for _ in range(10_000):
        z = sample_interior(UNIT_DISC, rng, margin=0.01)
        assert abs(z) <= 0.99 + 1e-12


def test_halfplane_samples_interior():
    rng = np.random.default_rng(1)
    for _ in range(10_000):
        z = sample_interior(UPPER, rng)
        assert z.imag > 0


def test_exterior_samples_interior():
    rng = np.random.default_rng(2)
    dom = DiscExterior(1j, 0.5)
    for _ in range(2000):
        z = sample_interior(dom, rng, margin=0.01)
        assert dom.interior_distance(z) >= 0.01 - 1e-12


def test_sampling_deterministic_per_seed():
    a = [sample_interior(UNIT_DISC, np.random.default_rng(7)) for _ in range(1)]
    b = [sample_interior(UNIT_DISC, np.random.default_rng(7)) for _ in range(1)]
    assert a == b
    rng1, rng2 = np.random.default_rng(9), np.random.default_rng(9)
    seq1 = [sample_interior(UPPER, rng1) for _ in range(50)]
    seq2 = [sample_interior(UPPER, rng2) for _ in range(50)]
    assert seq1 == seq2


def test_incompatible_margin_rejected():
    with pytest.raises(ValueError):
        sample_interior(UNIT_DISC, 0, margin=1.0)


# ---- Möbius maps -----------------------------------------------------------------


def test_identity_fixes_points():
    m = MoebiusMap.identity()
    for z in (0j, 1 + 2j, -3.5j):
        assert m.apply(z) == z


def test_normalization_determinant_one():
    m = MoebiusMap(2 + 1j, 0.5j, -1, 3)
    assert abs(m.a * m.d - m.b * m.c - 1) <= 1e-12


def test_normalization_branch_deterministic():
    m = MoebiusMap(0, 1, 1, 0)  # inversion, determinant -1
    assert m.a == 0 and m.b == 1j and m.c == 1j and m.d == 0


def test_cayley_sends_center_to_i():
    m = moebius_for(UNIT_DISC, UPPER)
    # solve (a*0 + b) / (c*0 + d) = i for the normalized catalog map
    assert abs(m.b / m.d - 1j) <= 1e-12
    assert abs(m.apply(0j) - 1j) <= 1e-12


def test_cayley_boundary_behaviour():
    m = moebius_for(UNIT_DISC, UPPER)
    image = m.apply(1 - 1e-6)
    assert contains(UPPER, m.apply(0j))
    assert 0 < image.imag < 1e-5  # 1 - eps lands just above the real axis


def test_compose_with_inverse_is_identity():
    rng = np.random.default_rng(5)
    m = MoebiusMap(1 + 0.3j, -0.2, 0.7j, 1.1)
    both = m.inverse().compose(m)
    for _ in range(20):
        z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        assert abs(both.apply(z) - z) <= 1e-12


def test_halfplane_to_itself_is_identity_up_to_sign():
    m = moebius_for(UPPER, UPPER)
    for z in (1j, 2 + 3j, -1 + 0.5j):
        assert abs(m.apply(z) - z) <= 1e-12


def test_pole_detection():
    m = MoebiusMap(0, 1, 1, 0)
    with pytest.raises(MoebiusPoleError):
        m.apply(0j)


def test_catalog_maps_send_interiors_to_interiors():
    rng = np.random.default_rng(11)
    for src in CATALOG:
        for dst in CATALOG:
            m = moebius_for(src, dst)
            for _ in range(1000 // len(CATALOG)):
                z = sample_interior(src, rng, margin=1e-3)
                assert contains(dst, m.apply(z)), (src, dst, z)


# ---- degree-capped transport ---------------------------------------------------


def test_transport_identity_maps_is_identity():
    f = MultiPoly(2, {(1, 0): 2, (0, 1): 1j, (1, 1): -3})
    out = transport(f, [MoebiusMap.identity()] * 2, (1, 1))
    assert out == f


def test_transport_inversion_example():
    # degree-1 monomial under the inversion-type map (0, 1, -1, 0)
    f = MultiPoly(1, {(1,): 1})
    m = MoebiusMap(0, 1, -1, 0)
    out = transport(f, [m], (1,))
    assert out.terms == {(0,): 1}
    rng = np.random.default_rng(3)
    for _ in range(20):
        z = complex(rng.uniform(-2, 2), rng.uniform(0.1, 2))
        rhs = (m.c * z + m.d) * f.evaluate([m.apply(z)])
        assert abs(out.evaluate([z]) - rhs) <= 1e-10


def test_transport_defining_identity_random():
    rng = np.random.default_rng(17)
    f = MultiPoly(2, {(2, 1): 1 + 1j, (0, 1): -2, (1, 0): 0.5j, (0, 0): 1})
    caps = (2, 1)
    maps = [moebius_for(UNIT_DISC, UPPER), moebius_for(DiscExterior(0j, 1.0), UPPER)]
    out = transport(f, maps, caps)
    scale = max(out.scale(), f.scale())
    for _ in range(20):
        z = [complex(rng.uniform(-2, 2), rng.uniform(-2, 2)) for _ in range(2)]
        prefactor = 1.0 + 0j
        for i, m in enumerate(maps):
            prefactor *= (m.c * z[i] + m.d) ** caps[i]
        rhs = prefactor * f.evaluate([m.apply(w) for m, w in zip(maps, z)])
        assert abs(out.evaluate(z) - rhs) <= 1e-9 * max(scale, abs(rhs), 1.0)


def test_transport_round_trip_is_unimodular_multiple():
    rng = np.random.default_rng(23)
    f = MultiPoly(2, {(1, 1): 1, (0, 1): 2j, (1, 0): -1, (0, 0): 3})
    caps = (1, 1)
    m = moebius_for(Disc(0.2 + 0.1j, 1.5), HalfPlane(1.0))
    there = transport(f, [m, m], caps)
    back = transport(there, [m.inverse(), m.inverse()], caps)
    assert back.support() == f.support()
    ratios = [back.terms[e] / f.terms[e] for e in f.terms]
    assert all(abs(r - ratios[0]) <= 1e-10 for r in ratios)
    assert abs(abs(ratios[0]) - 1.0) <= 1e-10


def test_transport_degree_excess_rejected():
    f = MultiPoly(1, {(2,): 1})
    with pytest.raises(ValueError):
        transport(f, [MoebiusMap.identity()], (1,))


def test_halfplane_stable_affine_transports_to_disc_stable():
    # the transported image of an upper-half-plane zero-free polynomial has no
    # roots in the closed unit disc (it may drop degree if a root pulls back to
    # the image of infinity)
    f = MultiPoly(1, {(1,): 1, (0,): 1j})  # z + i, zero at -i outside H_0
    out = transport_between(f, [UPPER], [UNIT_DISC], (1,))
    assert not out.is_zero
    if out.degree(0) >= 1:
        assert is_stable_exact_univariate(out, UNIT_DISC)


def test_stability_transport_property():
    rng = np.random.default_rng(41)
    cfg = OracleConfig(slices_per_variable=50, seed=5)
    oracle = lambda poly, doms: find_zero(poly, doms, cfg)
    for trial in range(50):
        caps = tuple(int(c) for c in rng.integers(1, 3, size=2))
        f = halfplane_stable_affine_product(rng, 2, caps, UPPER, margin=0.1)
        g = transport_between(f, [UPPER] * 2, [UNIT_DISC] * 2, caps)
        membership = stable_class_membership(g, [UNIT_DISC] * 2, caps, oracle)
        assert membership.member_evidence, (trial, membership.reason)


# ---- capped stable-class membership ------------------------------------------------


def _oracle(cfg=None):
    cfg = cfg or OracleConfig(slices_per_variable=60, seed=2)
    return lambda poly, doms: find_zero(poly, doms, cfg)


def test_membership_positive_example():
    f = MultiPoly(2, {(1, 0): 1, (0, 1): 1})
    got = stable_class_membership(f, [UPPER] * 2, (1, 1), _oracle())
    assert got.member_evidence and got.reason == "no-zero-evidence"


def test_membership_zero_found():
    f = MultiPoly(2, {(1, 0): 1, (0, 1): -1})
    got = stable_class_membership(f, [UPPER] * 2, (1, 1), _oracle())
    assert not got.member_evidence and got.reason == "zero-found"
    witness = got.oracle_verdict.point
    assert abs(f.evaluate(witness)) <= 1e-9 * f.scale()
    assert all(contains(UPPER, z) for z in witness)


def test_membership_degree_condition_on_nonconvex_domain():
    ext = DiscExterior(0j, 1.0)
    one = MultiPoly.constant(2, 1.0)
    got = stable_class_membership(one, [ext, ext], (1, 1), _oracle())
    assert not got.member_evidence
    assert got.reason == "degree-shortfall"
    assert got.degree_shortfall == (0, 1)


def test_to_upper_half_plane_total():
    rng = np.random.default_rng(4)
    for dom in CATALOG:
        m = to_upper_half_plane(dom)
        for _ in range(50):
            z = sample_interior(dom, rng, margin=1e-3)
            assert contains(UPPER, m.apply(z))
