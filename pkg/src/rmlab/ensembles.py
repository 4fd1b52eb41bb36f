"""Samplers for isotropic unconditional log-concave matrix ensembles.

Four families are implemented, all normalized so that matrix entries have
unit variance:

* ``ginibre``          - iid standard normal entries.
* ``laplace_iid``      - iid Laplace entries scaled to unit variance.
* ``lp_ball_global``   - one uniform draw from the unit l_p ball in
                         dimension n*n, reshaped row-major and rescaled.
* ``lp_ball_rows``     - n independent uniform draws from the unit l_p ball
                         in dimension n, stacked as rows and rescaled.

The ball families need a per-(p, dim) scale factor to reach unit entry
variance; those factors are produced by ``calibrate_isotropy`` and memoized
in a ``CalibrationCache``.
"""

import json
import math
import threading
from dataclasses import dataclass, replace

import numpy as np

from .errors import ParameterError
from .rng import child_seed, make_generator

FAMILIES = ("ginibre", "laplace_iid", "lp_ball_global", "lp_ball_rows")

_BALL_FAMILIES = ("lp_ball_global", "lp_ball_rows")

# stream tag under which calibration runs derive their seeds
_CALIBRATION_TAG = 0xCA11B8


def _check_p(p) -> float:
    p = float(p)
    if math.isnan(p) or p < 1.0:
        raise ParameterError(
            f"invalid p: log-concavity requires p >= 1 (got {p})")
    return p


@dataclass(frozen=True)
class EnsembleSpec:
    """Which ensemble to draw from, at what size, from which seed.

    ``p`` selects the ball geometry for the two l_p families and is ignored
    by ``ginibre`` and ``laplace_iid``.  ``math.inf`` selects the cube, i.e.
    iid uniform coordinates.
    """

    family: str
    n: int
    p: float = 2.0
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ParameterError(
                f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if int(self.n) != self.n or self.n < 1:
            raise ParameterError(f"n must be a positive integer (got {self.n})")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "p", _check_p(self.p))
        if int(self.seed) != self.seed or self.seed < 0:
            raise ParameterError(f"seed must be a nonnegative integer (got {self.seed})")
        object.__setattr__(self, "seed", int(self.seed))


def trial_spec(spec: EnsembleSpec, trial_index: int) -> EnsembleSpec:
    """Spec for one trial of a suite: same law, child seed ``trial_index``."""
    return replace(spec, seed=child_seed(spec.seed, trial_index))


def _exp_power(rng, p: float, size):
    """Draws with density proportional to exp(-|t|^p); p must be finite."""
    # |T|^p is Gamma(1/p, 1).  The shape 1/p lies in (0, 1], where direct
    # gamma sampling degenerates, so draw shape 1/p + 1 and multiply by U^p:
    # G' * U^p is Gamma(1/p, 1) exactly (the usual shape-boost identity).
    g = rng.standard_gamma(1.0 / p + 1.0, size=size)
    g = g * rng.random(size=size) ** p
    magnitude = g ** (1.0 / p)
    sign = rng.integers(0, 2, size=size) * 2 - 1
    return sign * magnitude


def sample_exp_power(p, count: int, seed: int) -> np.ndarray:
    """``count`` iid draws with density c_p * exp(-|t|^p), finite p >= 1."""
    p = _check_p(p)
    if math.isinf(p):
        raise ParameterError("p must be finite here; the p = inf limit is "
                             "the uniform law, reachable via sample_lp_ball")
    if count < 1:
        raise ParameterError(f"count must be positive (got {count})")
    return _exp_power(make_generator(seed), p, int(count))


def _lp_ball_batch(rng, count: int, dim: int, p: float) -> np.ndarray:
    """``count`` independent uniform draws from the unit l_p ball, as rows."""
    if math.isinf(p):
        return rng.uniform(-1.0, 1.0, size=(count, dim))
    g = _exp_power(rng, p, (count, dim))
    # Appending an independent Exp(1) to the |g_i|^p sum before the 1/p root
    # makes the draw land strictly inside the ball with radius law t^dim.
    e = rng.standard_exponential(size=count)
    denom = (np.sum(np.abs(g) ** p, axis=1) + e) ** (1.0 / p)
    return g / denom[:, None]


def sample_lp_ball(dim: int, p, seed: int) -> np.ndarray:
    """One uniform draw from the unit l_p ball in R^dim.

    The radius in the l_p norm has distribution function t^dim on [0, 1],
    which is the exact uniform-on-the-ball radial law; no normalization of
    the ambient volume is involved.
    """
    p = _check_p(p)
    if dim < 1:
        raise ParameterError(f"dim must be positive (got {dim})")
    return _lp_ball_batch(make_generator(seed), 1, int(dim), p)[0]


def exp_power_second_moment(p) -> float:
    """E T^2 for the exp(-|t|^p) law: Gamma(3/p) / Gamma(1/p)."""
    p = _check_p(p)
    if math.isinf(p):
        return 1.0 / 3.0
    return math.exp(math.lgamma(3.0 / p) - math.lgamma(1.0 / p))


@dataclass(frozen=True)
class IsotropyCalibration:
    """Scale factor bringing a ball family to unit per-coordinate variance.

    ``method`` records how the factor was obtained: ``analytic`` for the
    closed forms at p = 2 and p = inf, ``monte_carlo`` otherwise.
    ``rel_err`` is the relative standard error of the underlying
    second-moment estimate (zero for analytic entries), and ``mc_samples``
    counts scalar coordinates consumed by the estimate.
    """

    p: float
    dim: int
    scale: float
    method: str
    mc_samples: int = 0
    rel_err: float = 0.0


def _calibration_key(p: float, dim: int) -> str:
    return f"{float(p)!r},{int(dim)}"


class CalibrationCache:
    """Thread-safe memo of isotropy calibrations, optionally persisted."""

    def __init__(self):
        self._entries = {}
        self._lock = threading.Lock()

    def get(self, p, dim):
        with self._lock:
            return self._entries.get(_calibration_key(p, dim))

    def entries(self) -> int:
        with self._lock:
            return len(self._entries)

    def put(self, calibration: IsotropyCalibration) -> None:
        with self._lock:
            key = _calibration_key(calibration.p, calibration.dim)
            self._entries[key] = calibration

    def save(self, path) -> None:
        with self._lock:
            payload = {
                key: {
                    "scale": cal.scale,
                    "method": cal.method,
                    "mc_samples": cal.mc_samples,
                    "rel_err": cal.rel_err,
                }
                for key, cal in sorted(self._entries.items())
            }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")

    def load(self, path) -> None:
        with open(path) as fh:
            payload = json.load(fh)
        for key, entry in payload.items():
            p_text, _, dim_text = key.partition(",")
            cal = IsotropyCalibration(
                p=float(p_text),
                dim=int(dim_text),
                scale=float(entry["scale"]),
                method=str(entry["method"]),
                mc_samples=int(entry.get("mc_samples", 0)),
                rel_err=float(entry.get("rel_err", 0.0)),
            )
            self.put(cal)


DEFAULT_CACHE = CalibrationCache()


def _monte_carlo_second_moment(p: float, dim: int, min_scalars: int):
    """Estimate E x_1^2 for the unit l_p ball by batched sampling.

    Returns (estimate, relative standard error, scalars consumed).  The seed
    is a fixed function of (p, dim), so repeated calibrations agree bit for
    bit in one environment.
    """
    p_bits = int(np.float64(p).view(np.uint64))
    seed = child_seed(child_seed(_CALIBRATION_TAG, p_bits), dim)
    rng = make_generator(seed)

    target_rel = 0.0025  # half the contract bound, to leave slack
    per_vector = []
    batch = max(64, -(-int(min_scalars) // dim))
    for _ in range(64):
        draws = _lp_ball_batch(rng, batch, dim, p)
        per_vector.append(np.mean(draws ** 2, axis=1))
        pooled = np.concatenate(per_vector)
        estimate = float(np.mean(pooled))
        stderr = float(np.std(pooled, ddof=1) / math.sqrt(pooled.size))
        rel = stderr / estimate
        if rel <= target_rel and pooled.size * dim >= min_scalars:
            return estimate, rel, pooled.size * dim
        batch = max(batch, pooled.size)  # double the pool each round
    raise ParameterError(
        f"calibration for p={p}, dim={dim} did not reach the error target")


def calibrate_isotropy(p, dim: int, cache: CalibrationCache | None = None,
                       mc_samples: int = 1_000_000) -> IsotropyCalibration:
    """Scale factor making unit-ball coordinates have variance one.

    Closed forms: sqrt(3) for the cube (p = inf) and sqrt(dim + 2) for the
    Euclidean ball.  Any other p is estimated by Monte Carlo with at least
    ``mc_samples`` scalar coordinates and relative error at most 0.005.
    Results are memoized in ``cache`` (the module default when omitted).
    """
    p = _check_p(p)
    if dim < 1:
        raise ParameterError(f"dim must be positive (got {dim})")
    dim = int(dim)
    if cache is None:
        cache = DEFAULT_CACHE
    hit = cache.get(p, dim)
    if hit is not None:
        return hit

    if math.isinf(p):
        cal = IsotropyCalibration(p=p, dim=dim, scale=math.sqrt(3.0),
                                  method="analytic")
    elif p == 2.0:
        cal = IsotropyCalibration(p=p, dim=dim, scale=math.sqrt(dim + 2.0),
                                  method="analytic")
    else:
        estimate, rel, used = _monte_carlo_second_moment(p, dim, mc_samples)
        cal = IsotropyCalibration(p=p, dim=dim,
                                  scale=1.0 / math.sqrt(estimate),
                                  method="monte_carlo",
                                  mc_samples=used, rel_err=rel)
    cache.put(cal)
    return cal


def sample_matrix(spec: EnsembleSpec, cache: CalibrationCache | None = None) -> np.ndarray:
    """One n-by-n draw from the ensemble described by ``spec``.

    All families produce real matrices with unit-variance entries; the 1/sqrt(n)
    spectral normalization is left to the caller.
    """
    rng = make_generator(spec.seed)
    n = spec.n
    if spec.family == "ginibre":
        return rng.standard_normal((n, n))
    if spec.family == "laplace_iid":
        # Laplace(b) has variance 2 b^2, so b = 1/sqrt(2) gives variance one.
        return rng.laplace(0.0, 1.0 / math.sqrt(2.0), size=(n, n))
    if spec.family == "lp_ball_global":
        cal = calibrate_isotropy(spec.p, n * n, cache)
        flat = _lp_ball_batch(rng, 1, n * n, spec.p)[0]
        return (cal.scale * flat).reshape(n, n)
    # lp_ball_rows: n independent ball draws in R^n, one per row
    cal = calibrate_isotropy(spec.p, n, cache)
    return cal.scale * _lp_ball_batch(rng, n, n, spec.p)


def tail_survival(samples, t_grid) -> np.ndarray:
    """Empirical survival table: rows (t, P(|X| >= t)) over ``t_grid``.

    Tail frequencies from fewer than a thousand samples are too noisy to
    report, so smaller inputs are rejected.
    """
    samples = np.asarray(samples, dtype=float).ravel()
    if samples.size < 1000:
        raise ParameterError(
            f"need at least 1000 samples for a tail table (got {samples.size})")
    if not np.all(np.isfinite(samples)):
        raise ParameterError("samples must be finite")
    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if t_grid.size == 0:
        raise ParameterError("t_grid must be nonempty")
    magnitudes = np.sort(np.abs(samples))
    below = np.searchsorted(magnitudes, t_grid, side="left")
    survival = (magnitudes.size - below) / magnitudes.size
    return np.column_stack([t_grid, survival])
