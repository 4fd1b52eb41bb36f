"""Empirical spectral measures and logarithmic potentials."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .spectral import NUMERICAL_FLOOR, SingularSpectrum, Spectrum

DOMAINS = ("real_line", "complex_plane")


@dataclass(eq=False)
class EmpiricalMeasure:
    """Finitely supported probability measure on the line or the plane."""

    positions: np.ndarray
    weights: np.ndarray
    domain: str

    def __post_init__(self):
        if self.domain not in DOMAINS:
            raise ParameterError(f"unknown domain {self.domain!r}")
        self.positions = np.atleast_1d(np.asarray(self.positions))
        self.weights = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if self.positions.size == 0:
            raise ParameterError("measure needs at least one atom")
        if self.positions.shape != self.weights.shape:
            raise ParameterError("positions and weights must align")
        if np.any(self.weights <= 0):
            raise ParameterError("weights must be positive")
        if abs(float(np.sum(self.weights)) - 1.0) > 1e-12:
            raise ParameterError("weights must sum to one")
        if self.domain == "real_line":
            if np.iscomplexobj(self.positions) and np.any(self.positions.imag != 0):
                raise ParameterError("real_line measure has real atoms")
            self.positions = self.positions.real.astype(float)
        else:
            self.positions = self.positions.astype(complex)

    @property
    def atom_count(self) -> int:
        return self.positions.size

    @property
    def atoms(self):
        """The measure as a list of (position, weight) pairs."""
        return list(zip(self.positions.tolist(), self.weights.tolist()))


def from_points(points, domain: str) -> EmpiricalMeasure:
    """Uniform measure on a point multiset, coincident atoms merged."""
    points = np.atleast_1d(np.asarray(points))
    if points.size == 0:
        raise ParameterError("need at least one point")
    total = points.size
    unique, counts = np.unique(points, return_counts=True)
    return EmpiricalMeasure(positions=unique, weights=counts / total,
                            domain=domain)


def esd(spectrum: Spectrum, scale_by_inv_sqrt_n=None) -> EmpiricalMeasure:
    """Empirical spectral distribution of 1/sqrt(n)-normalized eigenvalues.

    When the flag is left unset the normalization is applied unless the
    spectrum records that it already happened; passing True or False forces
    the choice.
    """
    if scale_by_inv_sqrt_n is None:
        scale_by_inv_sqrt_n = not spectrum.normalized
    values = spectrum.eigenvalues
    if scale_by_inv_sqrt_n:
        values = values / math.sqrt(spectrum.n)
    return from_points(values, "complex_plane")


def singular_esd(spectrum: SingularSpectrum) -> EmpiricalMeasure:
    """Empirical measure of the shifted singular values, on the line."""
    return from_points(spectrum.values, "real_line")


def stieltjes(measure: EmpiricalMeasure, xi: complex) -> complex:
    """Cauchy transform sum_i w_i / (x_i - xi) at a point above the axis."""
    if measure.domain != "real_line":
        raise ParameterError("Cauchy transform is defined for line measures")
    xi = complex(xi)
    if not (xi.imag > 0):
        raise ParameterError(f"xi must have positive imaginary part (got {xi})")
    return complex(np.sum(measure.weights / (measure.positions - xi)))


@dataclass(frozen=True)
class LogPotential:
    """Value of -(1/n) * sum(log s_i), with degeneracy accounting.

    ``mean_log`` is + (1/n) * sum(log s_i), the same quantity under the
    opposite sign convention; both are carried so reports can print either.
    ``degenerate`` is set when any singular value sits at the numerical
    floor, in which case ``value`` is the +inf marker.
    """

    value: float
    mean_log: float
    degenerate: bool
    floor_count: int


def log_potential_from_singulars(spectrum: SingularSpectrum) -> LogPotential:
    s = spectrum.values
    floor_count = int(np.sum(spectrum.at_floor))
    if floor_count > 0:
        return LogPotential(value=math.inf, mean_log=-math.inf,
                            degenerate=True, floor_count=floor_count)
    mean_log = float(np.mean(np.log(s)))
    return LogPotential(value=-mean_log, mean_log=mean_log,
                        degenerate=False, floor_count=0)


def circular_potential(z: complex) -> float:
    """Logarithmic potential of the uniform law on the unit disc.

    Equals -log|z| outside the closed disc and (1 - |z|^2)/2 inside; the two
    branches agree on the circle.
    """
    r = abs(complex(z))
    if r > 1.0:
        return -math.log(r)
    return 0.5 * (1.0 - r * r)


@dataclass(frozen=True)
class PotentialComparison:
    """Empirical log-potential next to its disc-law prediction at one z."""

    z: complex
    U_n: float
    U_theory: float
    n: int
    ensemble: "object"

    def __post_init__(self):
        expected = circular_potential(self.z)
        if self.U_theory != expected:
            raise ParameterError(
                f"U_theory must be the disc-law value {expected!r} at"
                f" z={self.z} (got {self.U_theory!r})")

    @classmethod
    def from_empirical(cls, z: complex, U_n: float, n: int, ensemble):
        return cls(z=complex(z), U_n=float(U_n),
                   U_theory=circular_potential(z), n=int(n),
                   ensemble=ensemble)

    @property
    def abs_error(self) -> float:
        return abs(self.U_n - self.U_theory)


@dataclass(eq=False)
class DiscUniformity:
    """Radial and angular discrepancies against the uniform disc law."""

    radial_discrepancy: float
    sector_discrepancy: float
    r_grid: np.ndarray
    radial_cdf: np.ndarray
    sector_masses: np.ndarray
    in_disc_mass: float


def disc_uniformity(measure: EmpiricalMeasure, r_grid=None,
                    sector_count: int = 16) -> DiscUniformity:
    """Distance of a planar measure from the uniform law on the unit disc.

    Radial part: sup over the grid of |F_hat(r) - min(r^2, 1)| where F_hat
    is the mass within radius r.  Angular part: atoms inside the closed disc
    are binned into equal sectors and the masses compared with 1/sectors.
    """
    if measure.domain != "complex_plane":
        raise ParameterError("disc comparison needs a planar measure")
    if sector_count < 1:
        raise ParameterError("sector_count must be positive")
    if r_grid is None:
        r_grid = np.linspace(0.0, 1.2, 101)
    r_grid = np.asarray(r_grid, dtype=float)

    radii = np.abs(measure.positions)
    order = np.argsort(radii)
    sorted_radii = radii[order]
    cum = np.cumsum(measure.weights[order])
    idx = np.searchsorted(sorted_radii, r_grid, side="right")
    cdf = np.where(idx > 0, cum[np.maximum(idx - 1, 0)], 0.0)
    target = np.minimum(r_grid ** 2, 1.0)
    radial = float(np.max(np.abs(cdf - target)))

    inside = radii <= 1.0
    total = float(np.sum(measure.weights[inside]))
    if total == 0.0:
        sector = 1.0 / sector_count
        masses = np.zeros(sector_count)
    else:
        angles = np.angle(measure.positions[inside])  # in (-pi, pi]
        bins = np.floor((angles + np.pi) / (2 * np.pi) * sector_count).astype(int)
        bins = np.clip(bins, 0, sector_count - 1)
        masses = np.bincount(bins, weights=measure.weights[inside],
                             minlength=sector_count) / total
        sector = float(np.max(np.abs(masses - 1.0 / sector_count)))
    return DiscUniformity(radial_discrepancy=radial,
                          sector_discrepancy=sector,
                          r_grid=r_grid, radial_cdf=cdf,
                          sector_masses=masses, in_disc_mass=total)


def uniform_integrability_stat(spectrum: SingularSpectrum, alpha: float) -> float:
    """Mean of s^alpha + s^(-alpha); at least 2 whenever finite.

    Values at the numerical floor make the negative power meaningless, so
    the +inf marker is returned in that case.
    """
    alpha = float(alpha)
    if not (0.0 < alpha <= 2.0):
        raise ParameterError(f"alpha must lie in (0, 2] (got {alpha})")
    s = spectrum.values
    if np.any(spectrum.at_floor):
        return math.inf
    return float(np.mean(s ** alpha + s ** (-alpha)))
