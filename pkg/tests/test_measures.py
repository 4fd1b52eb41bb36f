"""Measure functionals: transforms, potentials, disc statistics."""

import cmath
import math

import numpy as np
import pytest

from rmlab import (EnsembleSpec, PotentialComparison, ShiftSpec,
                   circular_potential, esd, log_potential_from_singulars,
                   shifted_singular_values, stieltjes,
                   uniform_integrability_stat)
from rmlab.errors import ParameterError
from rmlab.measures import (EmpiricalMeasure, disc_uniformity, from_points,
                            singular_esd)
from rmlab.spectral import Spectrum


# ------------------------------------------------------------- measures

def test_measure_invariants():
    m = EmpiricalMeasure(positions=np.array([0.0, 1.0]),
                         weights=np.array([0.25, 0.75]), domain="real_line")
    assert m.atom_count == 2
    assert m.atoms == [(0.0, 0.25), (1.0, 0.75)]
    with pytest.raises(ParameterError):
        EmpiricalMeasure(positions=np.array([0.0]), weights=np.array([0.5]),
                         domain="real_line")
    with pytest.raises(ParameterError):
        EmpiricalMeasure(positions=np.array([0.0, 1.0]),
                         weights=np.array([1.0, -0.0]), domain="real_line")
    with pytest.raises(ParameterError):
        EmpiricalMeasure(positions=np.array([1j]), weights=np.array([1.0]),
                         domain="real_line")
    with pytest.raises(ParameterError):
        EmpiricalMeasure(positions=np.array([1j]), weights=np.array([1.0]),
                         domain="half_plane")


def test_from_points_merges_duplicates():
    m = from_points([2.0, 2.0, 5.0, 2.0], "real_line")
    assert m.atoms == [(2.0, 0.75), (5.0, 0.25)]


def test_esd_examples():
    m = esd(Spectrum(eigenvalues=np.array([1.0, 2.0], dtype=complex)),
            scale_by_inv_sqrt_n=False)
    assert sorted(p.real for p, _ in m.atoms) == [1.0, 2.0]
    assert all(w == 0.5 for _, w in m.atoms)

    m = esd(Spectrum(eigenvalues=np.array([2.0 + 0j])))  # sqrt(1) = 1
    assert m.atoms == [((2.0 + 0j), 1.0)]

    m = esd(Spectrum(eigenvalues=np.array([2.0, 2.0, -2.0, -2.0],
                                          dtype=complex)))
    assert sorted(p.real for p, _ in m.atoms) == [-1.0, 1.0]
    assert all(w == 0.5 for _, w in m.atoms)


def test_esd_respects_recorded_normalization():
    sp = Spectrum(eigenvalues=np.array([2.0 + 0j, -2.0 + 0j]), normalized=True)
    assert sorted(p.real for p, _ in esd(sp).atoms) == [-2.0, 2.0]


# ------------------------------------------------------------- stieltjes

def test_stieltjes_point_masses():
    d0 = from_points([0.0], "real_line")
    assert stieltjes(d0, 1j) == pytest.approx(1j, abs=1e-15)
    d1 = from_points([1.0], "real_line")
    assert stieltjes(d1, 1j) == pytest.approx(0.5 + 0.5j, abs=1e-15)
    mix = from_points([0.0, 2.0], "real_line")
    assert stieltjes(mix, 1j) == pytest.approx(0.2 + 0.6j, abs=1e-15)


def test_stieltjes_bounds_on_random_measures():
    rng = np.random.default_rng(2)
    for _ in range(25):
        m = from_points(rng.standard_normal(30), "real_line")
        xi = complex(rng.uniform(-2, 2), rng.uniform(0.1, 3.0))
        val = stieltjes(m, xi)
        assert abs(val) <= 1.0 / xi.imag + 1e-12
        assert val.imag > 0.0


def test_stieltjes_rejects_bad_arguments():
    m = from_points([0.0], "real_line")
    with pytest.raises(ParameterError):
        stieltjes(m, 1.0 - 1j)
    with pytest.raises(ParameterError):
        stieltjes(m, 2.0)
    planar = from_points([1j], "complex_plane")
    with pytest.raises(ParameterError):
        stieltjes(planar, 1j)


# ------------------------------------------------------------ potentials

def _singulars(values):
    from rmlab.spectral import SingularSpectrum
    v = np.sort(np.asarray(values, dtype=float))[::-1]
    return SingularSpectrum(values=v, shift=ShiftSpec(), n=v.size)


def test_log_potential_simple_values():
    assert log_potential_from_singulars(_singulars([1.0, 1.0, 1.0])).value == 0.0
    pot = log_potential_from_singulars(_singulars([math.e, math.e]))
    assert pot.value == pytest.approx(-1.0, abs=1e-12)
    assert pot.mean_log == pytest.approx(1.0, abs=1e-12)
    assert not pot.degenerate


def test_log_potential_degenerate_flagging():
    pot = log_potential_from_singulars(_singulars([1.0, 0.0]))
    assert pot.degenerate
    assert pot.value == math.inf
    assert pot.mean_log == -math.inf
    assert pot.floor_count == 1


def test_log_potential_matches_determinant_oracle():
    rng = np.random.default_rng(9)
    z = 0.3
    for _ in range(20):
        A = rng.standard_normal((3, 3))
        sv = shifted_singular_values(A, ShiftSpec(z=z))
        pot = log_potential_from_singulars(sv)
        det = np.linalg.det(A / math.sqrt(3.0) - z * np.eye(3))
        assert pot.value == pytest.approx(-math.log(abs(det)) / 3.0, abs=1e-8)


def test_circular_potential_branches():
    assert circular_potential(0.0) == 0.5
    assert circular_potential(2.0) == pytest.approx(-math.log(2.0), abs=1e-15)
    assert circular_potential(1.0) == 0.0
    assert circular_potential(0.5) == pytest.approx(0.375, abs=1e-15)


def test_circular_potential_continuous_across_the_circle():
    rng = np.random.default_rng(13)
    for theta in rng.uniform(0.0, 2.0 * math.pi, size=100):
        z = cmath.exp(1j * theta)
        inner = 0.5 * (1.0 - abs(z) ** 2)
        outer = -math.log(abs(z))
        assert abs(inner - outer) <= 1e-15
        assert abs(circular_potential(z)) <= 1e-15


def test_potential_comparison_record():
    ens = EnsembleSpec(family="ginibre", n=8)
    pc = PotentialComparison.from_empirical(0.5, 0.41, 8, ens)
    assert pc.U_theory == pytest.approx(0.375)
    assert pc.abs_error == pytest.approx(0.035)
    with pytest.raises(ParameterError):
        PotentialComparison(z=0.5, U_n=0.4, U_theory=0.0, n=8, ensemble=ens)


# -------------------------------------------------------- disc geometry

def test_disc_uniformity_single_atom_at_origin():
    stats = disc_uniformity(from_points([0.0 + 0.0j], "complex_plane"))
    # F_hat(0.5) = 1 against r^2 = 0.25
    assert stats.radial_discrepancy >= 0.75
    assert stats.in_disc_mass == 1.0


def test_disc_uniformity_on_quantile_grid():
    J, K = 20, 16
    # pull the outermost ring strictly inside the closed disc so that the
    # |z| <= 1 sector restriction keeps every atom
    rs = np.sqrt((np.arange(J) + 1.0) / J) * (1.0 - 1e-9)
    thetas = 2.0 * np.pi * (np.arange(K) + 0.5) / K
    pts = (rs[:, None] * np.exp(1j * thetas[None, :])).ravel()
    stats = disc_uniformity(from_points(pts, "complex_plane"),
                            sector_count=K)
    assert stats.radial_discrepancy <= 1.0 / J
    assert stats.sector_discrepancy <= 1e-12
    assert stats.in_disc_mass == pytest.approx(1.0)


def test_disc_uniformity_counts_mass_outside():
    pts = [0.5 + 0j, 2.0 + 0j]
    stats = disc_uniformity(from_points(pts, "complex_plane"))
    assert stats.in_disc_mass == pytest.approx(0.5)
    # cdf never exceeds the in-sample mass at the grid top
    assert stats.radial_cdf[-1] <= 1.0


def test_disc_uniformity_validates_domain():
    with pytest.raises(ParameterError):
        disc_uniformity(from_points([0.0], "real_line"))


# --------------------------------------------------------- integrability

def test_integrability_stat_values():
    assert uniform_integrability_stat(_singulars([1.0, 1.0]), 1.0) == 2.0
    got = uniform_integrability_stat(_singulars([2.0, 0.5]), 1.0)
    assert got == pytest.approx(2.5, abs=1e-12)


def test_integrability_stat_lower_bound_and_flags():
    rng = np.random.default_rng(20)
    for _ in range(20):
        s = np.exp(rng.standard_normal(10))
        alpha = rng.uniform(0.05, 2.0)
        assert uniform_integrability_stat(_singulars(s), alpha) >= 2.0
    assert uniform_integrability_stat(_singulars([1.0, 0.0]), 0.5) == math.inf
    with pytest.raises(ParameterError):
        uniform_integrability_stat(_singulars([1.0]), 0.0)
    with pytest.raises(ParameterError):
        uniform_integrability_stat(_singulars([1.0]), 2.5)


def test_singular_esd_lives_on_the_line():
    sv = _singulars([2.0, 1.0, 1.0])
    m = singular_esd(sv)
    assert m.domain == "real_line"
    assert m.atoms == [(1.0, 2.0 / 3.0), (2.0, 1.0 / 3.0)]
