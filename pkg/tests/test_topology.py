import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trianneal import (
    build,
    dimer_mapping,
    row_dw_count,
    sector_histogram,
    sector_label,
    spinon_triangles,
    stripe_config,
    triangle_violations,
)
from trianneal.lattice import HORIZONTAL
from trianneal.topology import ROWS_INCONSISTENT, SPINONS_PRESENT, SectorLabel

from conftest import random_pm1


def test_row_counts_stripe(geom66):
    stripe = stripe_config(geom66)
    for row in range(6):
        assert row_dw_count(stripe, row, geom66) == 0


def test_row_count_two_walls(geom66):
    cfg = stripe_config(geom66).copy()
    row = 2
    cfg[row * 6 : row * 6 + 6] = [1, 1, 1, -1, -1, -1]
    assert row_dw_count(cfg, row, geom66) == 2


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31))
def test_row_parity_even(seed, geom66):
    rng = np.random.default_rng(seed)
    cfg = random_pm1(rng, geom66.n_sites)
    for row in range(geom66.ly):
        assert row_dw_count(cfg, row, geom66) % 2 == 0


def test_sector_stripe(geom66):
    label = sector_label(stripe_config(geom66), geom66)
    assert label.defined and label.n_dw == 0


def test_sector_spinons(geom66):
    cfg = stripe_config(geom66).copy()
    cfg[10] = -cfg[10]
    label = sector_label(cfg, geom66)
    assert not label.defined
    assert label.reason == SPINONS_PRESENT


def test_sector_two_domain_walls(geom66):
    # Two vertical halves of opposite stripe phase; the oracle here is
    # the direct constraint check plus per-row counting.
    y = np.arange(36) // 6
    x = np.arange(36) % 6
    cfg = np.where((x < 3) ^ (y % 2 == 1), 1, -1).astype(np.int8)
    assert triangle_violations(cfg, geom66) == 0
    counts = [row_dw_count(cfg, r, geom66) for r in range(6)]
    assert counts == [2] * 6
    label = sector_label(cfg, geom66)
    assert label.defined and label.n_dw == 2


def test_sector_z2(geom66):
    rng = np.random.default_rng(123)
    for _ in range(20):
        cfg = random_pm1(rng, geom66.n_sites)
        assert sector_label(cfg, geom66) == sector_label(-cfg, geom66)


def test_spinon_triangles(geom66):
    stripe = stripe_config(geom66)
    assert spinon_triangles(stripe, geom66) == []
    assert len(spinon_triangles(np.ones(36, dtype=np.int8), geom66)) == 72
    flipped = stripe.copy()
    flipped[21] = -flipped[21]
    got = spinon_triangles(flipped, geom66)
    brute = [t for t in range(geom66.n_triangles)
             if abs(int(flipped[geom66.triangles[t]].sum())) == 3]
    assert got == brute
    assert len(got) == triangle_violations(flipped, geom66)
    for t in got:
        assert 21 in geom66.triangles[t]


def test_dimer_mapping_stripe(geom66):
    stripe = stripe_config(geom66)
    dm = dimer_mapping(stripe, geom66)
    assert dm.perfect_matching
    horizontal = set(np.flatnonzero(geom66.bond_class == HORIZONTAL).tolist())
    assert set(dm.dimer_bonds.tolist()) == horizontal
    assert len(dm.dimer_bonds) == geom66.n_sites


def test_dimer_mapping_all_up(geom66):
    dm = dimer_mapping(np.ones(36, dtype=np.int8), geom66)
    assert not dm.perfect_matching
    assert np.all(dm.cover == 3)


def test_constraint_iff_perfect_matching_sampled(geom44):
    rng = np.random.default_rng(2)
    seen_satisfying = 0
    cfg = stripe_config(geom44)
    for _ in range(200):
        site = int(rng.integers(geom44.n_sites))
        trial = cfg.copy()
        trial[site] = -trial[site]
        ok = triangle_violations(trial, geom44) == 0
        assert dimer_mapping(trial, geom44).perfect_matching == ok
        seen_satisfying += ok
    assert dimer_mapping(cfg, geom44).perfect_matching


def test_histogram_stripes():
    labels = [SectorLabel(n_dw=0)] * 64
    assert sector_histogram(labels) == {"N_D=0": 1.0}


def test_histogram_mixed_and_codes():
    labels = [SectorLabel(n_dw=0)] * 32 + [SectorLabel(n_dw=2)] * 32
    assert sector_histogram(labels) == {"N_D=0": 0.5, "N_D=2": 0.5}
    by_code = sector_histogram([0] * 16 + [2] * 16 + [-1] * 32)
    assert by_code == {"N_D=0": 0.25, "N_D=2": 0.25, "UNDEFINED": 0.5}
    assert sum(by_code.values()) == pytest.approx(1.0)


def test_histogram_empty():
    with pytest.raises(ValueError):
        sector_histogram([])


def test_sector_code_roundtrip():
    for label in (SectorLabel(n_dw=4), SectorLabel(None, SPINONS_PRESENT), SectorLabel(None, ROWS_INCONSISTENT)):
        assert SectorLabel.from_code(label.code) == label
    assert str(SectorLabel(n_dw=2)) == "2"
    assert str(SectorLabel(None, SPINONS_PRESENT)) == "U:SPINONS_PRESENT"
