import numpy as np
import pytest

from trianneal import Couplings, build, stripe_config
from trianneal.oracle import (
    classical_energies,
    enumerate_classical,
    exact_boltzmann,
    exact_quantum_energy,
    exact_quantum_energy_curve,
)


def _stripe_code(geom):
    s = stripe_config(geom)
    return int(np.sum((s > 0).astype(np.int64) << np.arange(geom.n_sites)))


def test_enumerate_6x4_ground_pair():
    geom = build(6, 4)
    report = enumerate_classical(geom, Couplings(geom, 1.0, 0.9))
    assert report.ground_energy == pytest.approx(24 * 0.9 - 48.0, abs=1e-7)
    assert report.ground_degeneracy == 2
    code = _stripe_code(geom)
    mask = (1 << geom.n_sites) - 1
    assert sorted(report.ground_codes.tolist()) == sorted([code, code ^ mask])
    assert sum(report.sector_counts.values()) == 2**24


def test_enumerate_isotropic_degeneracy(geom44):
    report = enumerate_classical(geom44, Couplings(geom44, 1.0, 1.0), with_sectors=False)
    assert report.ground_degeneracy > 2


def test_enumerate_zero_couplings():
    geom = build(3, 3)
    report = enumerate_classical(geom, Couplings(geom, 0.0, 0.0), with_sectors=False)
    assert report.ground_energy == 0.0
    assert report.ground_degeneracy == 2**9


def test_enumerate_size_cap():
    geom = build(6, 6)
    with pytest.raises(ValueError):
        enumerate_classical(geom, Couplings(geom))


def test_ground_configs_decode():
    geom = build(3, 4)
    report = enumerate_classical(geom, Couplings(geom, 1.0, 0.9), with_sectors=False)
    from trianneal.model import energy

    for cfg in report.ground_configs(geom.n_sites):
        assert energy(cfg, Couplings(geom, 1.0, 0.9), geom) == pytest.approx(
            report.ground_energy, abs=1e-7
        )


def test_boltzmann_normalized():
    geom = build(3, 3)
    probs = exact_boltzmann(geom, Couplings(geom, 1.0, 0.9), 1.0)
    assert probs.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(probs >= 0)


def test_boltzmann_infinite_t_uniform():
    geom = build(3, 3)
    probs = exact_boltzmann(geom, Couplings(geom, 1.0, 0.9), 1e6)
    uniform = np.full(probs.shape, 1.0 / probs.shape[0])
    assert 0.5 * np.abs(probs - uniform).sum() < 1e-4


def test_boltzmann_validation(geom44):
    with pytest.raises(ValueError):
        exact_boltzmann(geom44, Couplings(geom44), 0.0)
    probs = exact_boltzmann(geom44, Couplings(geom44), 1.0)  # 16 sites, at the cap
    assert probs.shape == (1 << 16,)
    big = build(5, 4)
    with pytest.raises(ValueError):
        exact_boltzmann(big, Couplings(big), 1.0)


def test_quantum_h0_matches_classical():
    geom = build(3, 3)
    couplings = Couplings(geom, 1.0, 0.9)
    t = 0.8
    e_q = exact_quantum_energy(geom, couplings, 0.0, t)
    probs = exact_boltzmann(geom, couplings, t)
    e_c = float(probs @ classical_energies(geom, couplings))
    assert abs(e_q - e_c) < 1e-10 * max(1.0, abs(e_c))


def test_quantum_low_t_is_ground_state():
    geom = build(3, 4)
    couplings = Couplings(geom, 1.0, 0.9)
    h = 1.5
    e = exact_quantum_energy(geom, couplings, h, 1e-3)
    from trianneal.oracle import _dense_hamiltonian

    evals = np.linalg.eigvalsh(_dense_hamiltonian(geom, couplings, h))
    assert e == pytest.approx(float(evals[0]), abs=1e-6)


def test_quantum_curve_consistent():
    geom = build(3, 3)
    couplings = Couplings(geom, 1.0, 0.9)
    curve = exact_quantum_energy_curve(geom, couplings, 0.7, [0.5, 1.0])
    assert curve[0] == pytest.approx(exact_quantum_energy(geom, couplings, 0.7, 0.5), abs=1e-12)
    assert curve[0] < curve[1]  # energy rises with temperature here


def test_quantum_size_cap():
    geom = build(4, 4)
    with pytest.raises(ValueError):
        exact_quantum_energy(geom, Couplings(geom), 1.0, 1.0)
