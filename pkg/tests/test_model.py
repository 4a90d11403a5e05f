import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trianneal import (
    Couplings,
    build,
    delta_energy_flip,
    energy,
    make_seams,
    stripe_config,
    triangle_violations,
)
from trianneal.anneal import apply_cut

from conftest import brute_force_energy, random_pm1


def test_stripe_energy_6x6(geom66, paper_couplings66):
    e = energy(stripe_config(geom66), paper_couplings66, geom66)
    assert e == pytest.approx(-39.6, abs=1e-10)


def test_all_up_energy_6x6(geom66, paper_couplings66):
    e = energy(np.ones(36, dtype=np.int8), paper_couplings66, geom66)
    assert e == pytest.approx(36 * 0.9 + 72 * 1.0, abs=1e-10)


def test_energy_after_seam_cut_matches_bond_resum(geom66):
    couplings = Couplings(geom66, 1.0, 0.9)
    seam = make_seams(geom66, 6)[2]
    apply_cut(couplings, seam)
    stripe = stripe_config(geom66)
    assert energy(stripe, couplings, geom66) == pytest.approx(
        brute_force_energy(stripe, couplings, geom66), abs=1e-10
    )
    rng = np.random.default_rng(3)
    for _ in range(10):
        cfg = random_pm1(rng, geom66.n_sites)
        assert energy(cfg, couplings, geom66) == pytest.approx(
            brute_force_energy(cfg, couplings, geom66), abs=1e-10
        )


def test_energy_size_mismatch(geom66, paper_couplings66):
    with pytest.raises(ValueError):
        energy(np.ones(35, dtype=np.int8), paper_couplings66, geom66)


def test_delta_flip_all_up(geom66, paper_couplings66):
    cfg = np.ones(36, dtype=np.int8)
    for site in (0, 17, 35):
        d = delta_energy_flip(cfg, site, paper_couplings66, geom66)
        assert d == pytest.approx(-2 * (2 * 0.9 + 4 * 1.0), abs=1e-12)


def test_delta_flip_matches_full_reevaluation(geom66, paper_couplings66):
    rng = np.random.default_rng(11)
    for _ in range(50):
        cfg = random_pm1(rng, geom66.n_sites)
        site = int(rng.integers(geom66.n_sites))
        d = delta_energy_flip(cfg, site, paper_couplings66, geom66)
        flipped = cfg.copy()
        flipped[site] = -flipped[site]
        full = energy(flipped, paper_couplings66, geom66) - energy(cfg, paper_couplings66, geom66)
        assert d == pytest.approx(full, abs=1e-10)


def test_delta_flip_decoupled_site(geom66):
    couplings = Couplings(geom66, 1.0, 0.9)
    site = 14
    for b in geom66.site_bonds[site]:
        couplings.set_override(int(b), 0.0)
    rng = np.random.default_rng(5)
    cfg = random_pm1(rng, geom66.n_sites)
    assert delta_energy_flip(cfg, site, couplings, geom66) == 0.0


def test_triangle_violations(geom66, paper_couplings66):
    assert triangle_violations(np.ones(36, dtype=np.int8), geom66) == 72
    stripe = stripe_config(geom66)
    assert triangle_violations(stripe, geom66) == 0
    # One flipped spin creates a spinon pair: of the six triangles
    # containing the site, exactly the two whose other spins already
    # match the new value become all-equal (brute-force scan agrees).
    flipped = stripe.copy()
    flipped[8] = -flipped[8]
    expected = 0
    for tri in geom66.triangles:
        s = flipped[tri]
        if abs(int(s.sum())) == 3:
            expected += 1
    assert triangle_violations(flipped, geom66) == expected == 2


def test_stripe_4x4_is_enumerated_ground(geom44, paper_couplings44):
    from trianneal.oracle import enumerate_classical

    stripe = stripe_config(geom44)
    e = energy(stripe, paper_couplings44, geom44)
    assert e == pytest.approx(16 * 0.9 - 32 * 1.0, abs=1e-10)
    report = enumerate_classical(geom44, paper_couplings44, with_sectors=False)
    assert e == pytest.approx(report.ground_energy, abs=1e-7)


def test_stripe_requires_even_rows():
    with pytest.raises(ValueError):
        stripe_config(build(4, 3))


def test_stripe_odd_width_ok():
    g = build(5, 4)
    assert triangle_violations(stripe_config(g), g) == 0


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**31))
def test_z2_symmetry(seed):
    geom = build(6, 6)
    couplings = Couplings(geom, 1.0, 0.9)
    rng = np.random.default_rng(seed)
    cfg = random_pm1(rng, geom.n_sites)
    assert energy(cfg, couplings, geom) == pytest.approx(
        energy(-cfg, couplings, geom), abs=1e-12
    )


def test_translation_invariance(geom66, paper_couplings66):
    rng = np.random.default_rng(7)
    cfg = random_pm1(rng, geom66.n_sites)
    rolled = cfg.reshape(6, 6)
    rolled = np.roll(rolled, 1, axis=1).reshape(-1)
    assert energy(cfg, paper_couplings66, geom66) == pytest.approx(
        energy(rolled, paper_couplings66, geom66), abs=1e-10
    )


def test_couplings_validation(geom66):
    with pytest.raises(ValueError):
        Couplings(geom66, j=-1.0)
    with pytest.raises(ValueError):
        Couplings(geom66, h=-0.5)
    c = Couplings(geom66)
    with pytest.raises(ValueError):
        c.set_override(0, -0.1)
    with pytest.raises(ValueError):
        c.set_field(0, -1.0)


def test_couplings_override_roundtrip(geom66):
    c = Couplings(geom66, 1.0, 0.9)
    assert not c.has_overrides()
    c.set_override(5, 0.3)
    assert c.has_overrides()
    assert c.effective(5) == 0.3
    c.clear_override(5)
    assert not c.has_overrides()
    assert c.effective(5) == c.base_value(5)


def test_couplings_copy_independent(geom66):
    c = Couplings(geom66, 1.0, 0.9, h=2.0)
    d = c.copy()
    d.set_override(0, 0.0)
    d.set_field(3, 7.0)
    assert not c.has_overrides()
    assert c.h[3] == 2.0
    assert c.same_as(Couplings(geom66, 1.0, 0.9, h=2.0))
