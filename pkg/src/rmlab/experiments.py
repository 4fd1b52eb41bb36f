"""Monte Carlo suites for the spectral limit laws.

Each runner draws per-trial matrices from child seeds of the master seed,
computes one family of statistics, and returns an ``ExperimentReport``
carrying raw records, an aggregate summary with fitted constants, and a
verdict string.  Trials whose decompositions fail are excluded from the
statistics and counted; an exclusion rate above one percent fails a suite
outright.  Reductions over trials are order-independent, so enlarging the
trial budget only appends records.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .ensembles import EnsembleSpec, sample_matrix
from .errors import DecompositionError, ParameterError
from .measures import (circular_potential, disc_uniformity, from_points,
                       log_potential_from_singulars, singular_esd, stieltjes,
                       uniform_integrability_stat)
from .rng import child_seed, make_generator
from .spectral import (ShiftSpec, eigenvalues, operator_norm, shifted_matrix,
                       shifted_singular_values, span_distance_with_rank)

PASS = "pass"
FAIL = "fail"
NOT_APPLICABLE = "not-applicable"

# largest tolerated fraction of trials lost to decomposition failures
MAX_EXCLUSION_RATE = 0.01

# fixed probe point for the Cauchy-transform concentration suite
CONCENTRATION_XI = 2j

# norm-growth budget: max_t ||A + M|| / sqrt(n) - (R + |z|) must stay below
OPERATOR_NORM_BOUND = 6.0

# largest tolerated frequency of s_n(A + M) at or below n^{-6.5}
SMALLEST_SV_FREQ_BOUND = 0.05

# default probe points for the potential comparison, one per disc regime
DEFAULT_Z_PROBES = (0j, 0.5 + 0j, 2.0 + 0j)


@dataclass
class ExperimentConfig:
    """Shared knobs for all suites.

    ``n_list`` defaults to the ensemble's own size.  ``alpha`` is the
    exponent of the integrability statistic s^a + s^(-a), ``gamma`` the
    exponent cutting off the intermediate singular value range, ``delta``
    and ``rho_comp`` the sparsity fraction and distance threshold of the
    compressibility split, and ``k_grid`` the subspace fractions.
    """

    ensemble: EnsembleSpec
    shift: ShiftSpec = field(default_factory=ShiftSpec)
    trials: int = 8
    n_list: tuple = ()
    gamma: float = 0.5
    alpha: float = 0.05
    delta: float = 0.1
    rho_comp: float = 0.1
    k_grid: tuple = (0.25, 0.5, 0.75)
    master_seed: int = 0
    z_probes: tuple = DEFAULT_Z_PROBES
    radial_tol: float = 0.05
    potential_tol: float = 0.05

    def __post_init__(self):
        if int(self.trials) != self.trials or self.trials < 1:
            raise ParameterError(f"trials must be a positive integer (got {self.trials})")
        self.trials = int(self.trials)
        if not self.n_list:
            self.n_list = (self.ensemble.n,)
        n_list = tuple(int(n) for n in self.n_list)
        if any(n < 1 for n in n_list):
            raise ParameterError(f"matrix sizes must be positive (got {self.n_list})")
        self.n_list = tuple(sorted(set(n_list)))
        if not (0.0 < self.gamma < 1.0):
            raise ParameterError(f"gamma must lie in (0, 1) (got {self.gamma})")
        if not (0.0 < self.alpha <= 2.0):
            raise ParameterError(f"alpha must lie in (0, 2] (got {self.alpha})")
        if not (0.0 < self.delta < 1.0):
            raise ParameterError(f"delta must lie in (0, 1) (got {self.delta})")
        if not (0.0 < self.rho_comp <= 1.0):
            raise ParameterError(f"rho_comp must lie in (0, 1] (got {self.rho_comp})")
        k_grid = tuple(float(k) for k in self.k_grid)
        if not k_grid or any(not (0.0 < k < 1.0) for k in k_grid):
            raise ParameterError(f"k_grid fractions must lie in (0, 1) (got {self.k_grid})")
        self.k_grid = tuple(sorted(set(k_grid)))
        if int(self.master_seed) != self.master_seed or self.master_seed < 0:
            raise ParameterError(f"master_seed must be a nonnegative integer (got {self.master_seed})")
        self.master_seed = int(self.master_seed)
        self.z_probes = tuple(complex(z) for z in self.z_probes)
        if self.radial_tol <= 0 or self.potential_tol <= 0:
            raise ParameterError("tolerances must be positive")


@dataclass(eq=False)
class ExperimentReport:
    """Outcome of one suite.

    ``records`` holds one JSON-ready dict per trial (error records carry an
    ``error`` key), ``summary`` the aggregates and fitted constants,
    ``violations`` the number of failed checks behind the verdict, and
    ``arrays`` raw per-trial numeric arrays for delimited dumps (kept out of
    the JSON report).
    """

    name: str
    config: ExperimentConfig
    records: list
    summary: dict
    violations: int
    verdict: str
    excluded: int = 0
    arrays: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict != FAIL


def thread_count() -> int:
    """Worker threads for trial loops, from RMLAB_THREADS (default 1)."""
    raw = os.environ.get("RMLAB_THREADS", "1")
    try:
        k = int(raw)
    except ValueError:
        raise ParameterError(f"RMLAB_THREADS must be an integer (got {raw!r})")
    return max(1, k)


def trial_seed(master_seed: int, n: int, trial: int) -> int:
    """Seed of one trial: child stream ``trial`` of child stream ``n``."""
    return child_seed(child_seed(master_seed, n), trial)


def _make_sampler(config: ExperimentConfig, cache=None):
    def draw(n: int, trial: int) -> np.ndarray:
        spec = replace(config.ensemble, n=n,
                       seed=trial_seed(config.master_seed, n, trial))
        return sample_matrix(spec, cache)
    return draw


def _run_trials(count: int, worker):
    """Run ``worker(t)`` for each trial, capturing decomposition failures.

    Returns (all records in trial order, records without errors).
    """
    def capture(t):
        try:
            return worker(t)
        except DecompositionError as exc:
            return {"trial": t, "error": str(exc)}

    threads = thread_count()
    if threads == 1:
        records = [capture(t) for t in range(count)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(capture, range(count)))
    good = [r for r in records if "error" not in r]
    return records, good


def _exclusion_gate(total: int, good: int) -> bool:
    """True when the failure rate stays within the tolerated one percent."""
    return (total - good) <= MAX_EXCLUSION_RATE * total


def _bootstrap_ci(per_trial, stat, n_boot: int = 200, seed: int = 0xB007):
    """Percentile 90% interval for ``stat`` over trial resamples.

    ``per_trial`` is a list of per-trial values (scalars or arrays); ``stat``
    maps a resampled list to a scalar.  Deterministic given the seed.
    """
    m = len(per_trial)
    point = float(stat(per_trial))
    if m < 2:
        return point, point
    rng = make_generator(seed)
    draws = np.empty(n_boot)
    for b in range(n_boot):
        idx = rng.integers(0, m, size=m)
        draws[b] = stat([per_trial[i] for i in idx])
    lo, hi = np.percentile(draws, [5.0, 95.0])
    return float(lo), float(hi)


def _finalize_verdict(checks, applicable: bool, exclusions_ok: bool):
    """Combine boolean checks into (violations, verdict)."""
    if not applicable:
        return 0, NOT_APPLICABLE
    violations = sum(1 for ok in checks if not ok)
    if not exclusions_ok:
        return violations + 1, FAIL
    return violations, PASS if violations == 0 else FAIL


# ---------------------------------------------------------------------------
# circular law


def run_circular_law(config: ExperimentConfig, cache=None, sampler=None) -> ExperimentReport:
    """Eigenvalue cloud versus the uniform disc law, with potentials.

    Per size: per-trial radial and sector discrepancies of the normalized
    eigenvalue cloud, a pooled-cloud discrepancy, and the log potential
    -(1/n) sum log s_i of the z-shifted matrix at each probe point, compared
    with the disc potential.  Verdict looks at the largest size only.
    """
    sampler = sampler if sampler is not None else _make_sampler(config, cache)
    records, arrays = [], {}
    sizes = {}
    total, good_count = 0, 0
    for n in config.n_list:
        probes = [ShiftSpec(z=z) for z in config.z_probes]

        def worker(t, n=n, probes=probes):
            A = sampler(n, t)
            eigs = eigenvalues(A).eigenvalues / math.sqrt(n)
            du = disc_uniformity(from_points(eigs, "complex_plane"))
            pots = []
            for shift in probes:
                sv = shifted_singular_values(A, shift)
                lp = log_potential_from_singulars(sv)
                pots.append({
                    "z_re": shift.z.real, "z_im": shift.z.imag,
                    "U_n": lp.value, "mean_log": lp.mean_log,
                    "degenerate": lp.degenerate,
                    "integrability": uniform_integrability_stat(sv, config.alpha),
                })
            return {"trial": t, "n": n,
                    "radial": float(du.radial_discrepancy),
                    "sector": float(du.sector_discrepancy),
                    "potentials": pots,
                    "_eigs": eigs}

        rows, good = _run_trials(config.trials, worker)
        total += config.trials
        good_count += len(good)
        eigs_by_trial = [(r["trial"], r.pop("_eigs")) for r in good]
        records.extend(rows)
        if not good:
            sizes[n] = {"trials": config.trials, "excluded": config.trials}
            continue

        dump = np.vstack([
            np.column_stack([np.full(e.size, t, dtype=float),
                             np.arange(e.size, dtype=float),
                             e.real, e.imag])
            for t, e in eigs_by_trial])
        arrays[f"eigenvalues_n{n}"] = dump

        pooled = np.concatenate([e for _, e in eigs_by_trial])
        pooled_du = disc_uniformity(from_points(pooled, "complex_plane"))
        pot_summary = []
        for j, z in enumerate(config.z_probes):
            vals = [r["potentials"][j]["U_n"] for r in good]
            finite = [v for v in vals if math.isfinite(v)]
            degenerate = len(vals) - len(finite)
            u_mean = float(np.mean(finite)) if finite else math.inf
            u_std = float(np.std(finite)) if len(finite) > 1 else 0.0
            theory = circular_potential(z)
            integ = [r["potentials"][j]["integrability"] for r in good
                     if math.isfinite(r["potentials"][j]["integrability"])]
            pot_summary.append({
                "z_re": z.real, "z_im": z.imag,
                "U_theory": theory,
                "U_n_mean": u_mean, "U_n_std": u_std,
                "mean_log_mean": -u_mean if math.isfinite(u_mean) else -math.inf,
                "abs_err": abs(u_mean - theory) if math.isfinite(u_mean) else math.inf,
                "degenerate_trials": degenerate,
                "integrability_mean": float(np.mean(integ)) if integ else math.inf,
            })
        sizes[n] = {
            "trials": config.trials,
            "excluded": config.trials - len(good),
            "radial_pooled": float(pooled_du.radial_discrepancy),
            "sector_pooled": float(pooled_du.sector_discrepancy),
            "radial_trial_max": max(r["radial"] for r in good),
            "sector_trial_max": max(r["sector"] for r in good),
            "potentials": pot_summary,
        }
        arrays[f"radial_cdf_n{n}"] = np.column_stack(
            [pooled_du.r_grid, pooled_du.radial_cdf])
        arrays[f"pooled_eigenvalues_n{n}"] = pooled

    n_big = config.n_list[-1]
    applicable = n_big >= 2 and n_big in sizes and "radial_pooled" in sizes[n_big]
    checks = []
    if applicable:
        top = sizes[n_big]
        checks.append(top["radial_pooled"] <= config.radial_tol)
        checks.extend(p["abs_err"] <= config.potential_tol for p in top["potentials"])
    violations, verdict = _finalize_verdict(
        checks, applicable, _exclusion_gate(total, good_count))
    summary = {"sizes": sizes, "z_probes": [[z.real, z.imag] for z in config.z_probes]}
    return ExperimentReport(name="circular_law", config=config, records=records,
                            summary=summary, violations=violations, verdict=verdict,
                            excluded=total - good_count, arrays=arrays)


# ---------------------------------------------------------------------------
# operator norm growth


def run_operator_norm(config: ExperimentConfig, cache=None, sampler=None) -> ExperimentReport:
    """Norm of the shifted matrix against the linear-growth budget.

    The statistic is ||A + M - z*sqrt(n)*Id|| / sqrt(n), whose excess over
    R + |z| must stay below a universal constant; the fitted constant is the
    worst excess.  Exceedances over the median are also fitted with a
    quadratic in log-survival scale, which must not curve upward (that would
    contradict a subexponential tail).
    """
    sampler = sampler if sampler is not None else _make_sampler(config, cache)
    r_eff = config.shift.effective_radius()
    records, sizes = [], {}
    total, good_count = 0, 0
    checks = []
    for n in config.n_list:

        def worker(t, n=n):
            A = sampler(n, t)
            value = operator_norm(shifted_matrix(A, config.shift))
            return {"trial": t, "n": n, "value": float(value),
                    "excess": float(value - r_eff)}

        rows, good = _run_trials(config.trials, worker)
        total += config.trials
        good_count += len(good)
        records.extend(rows)
        if not good:
            sizes[n] = {"trials": config.trials, "excluded": config.trials}
            continue
        excesses = [r["excess"] for r in good]
        c_hat = max(excesses)
        lo, hi = _bootstrap_ci(excesses, lambda v: max(v))
        entry = {
            "trials": config.trials,
            "excluded": config.trials - len(good),
            "value_median": float(np.median([r["value"] for r in good])),
            "C_hat": float(c_hat), "C_hat_ci90": [lo, hi],
        }
        checks.append(c_hat <= OPERATOR_NORM_BOUND)

        values = np.sort([r["value"] for r in good])
        median = float(np.median(values))
        exceed = values[values > median] - median
        if exceed.size >= 8 and exceed[-1] > 0:
            # survival 1 - (j+1)/m over the sorted exceedances, last point dropped
            m = exceed.size
            log_surv = np.log1p(-(np.arange(1, m) / m))
            coeffs = np.polyfit(exceed[:-1], log_surv, 2)
            curvature = float(coeffs[0] * exceed[-1] ** 2)
            # upward curvature beyond one nat over the observed range is a
            # heavier-than-subexponential signal; concave or linear passes
            entry["tail_curvature"] = curvature
            checks.append(curvature <= 1.0)
        else:
            entry["tail_curvature"] = None
        sizes[n] = entry

    violations, verdict = _finalize_verdict(
        checks, bool(checks), _exclusion_gate(total, good_count))
    summary = {"sizes": sizes, "effective_radius": r_eff,
               "bound": OPERATOR_NORM_BOUND}
    return ExperimentReport(name="operator_norm", config=config, records=records,
                            summary=summary, violations=violations, verdict=verdict,
                            excluded=total - good_count)


# ---------------------------------------------------------------------------
# smallest singular value


def run_smallest_sv(config: ExperimentConfig, cache=None, sampler=None) -> ExperimentReport:
    """Frequency of abnormally small s_n for the shifted matrix.

    Per trial the scan statistic is sqrt(n) * s_n(A + M - z*sqrt(n)*Id); the
    polynomial floor n^{-6.5} must be crossed in at most an alpha fraction
    of trials.  The empirical CDF of the scan statistic over a fixed epsilon
    grid gives the fitted linear-smallness constant.
    """
    sampler = sampler if sampler is not None else _make_sampler(config, cache)
    eps_grid = np.linspace(0.01, 1.0, 100)
    records, sizes = [], {}
    total, good_count = 0, 0
    checks = []
    arrays = {}
    for n in config.n_list:

        def worker(t, n=n):
            A = sampler(n, t)
            sv = shifted_singular_values(A, config.shift)
            s_lemma = math.sqrt(n) * sv.smallest  # s_n of the unnormalized shift
            return {"trial": t, "n": n,
                    "s_min": sv.smallest,
                    "s_min_unnormalized": float(s_lemma),
                    "scan": float(math.sqrt(n) * s_lemma),
                    "at_floor": bool(sv.at_floor[-1]),
                    "violation": bool(s_lemma <= n ** -6.5),
                    "_values": sv.values}

        rows, good = _run_trials(config.trials, worker)
        total += config.trials
        good_count += len(good)
        value_rows = [(r["trial"], r.pop("_values")) for r in good]
        for r in rows:
            r.pop("_values", None)
        records.extend(rows)
        if not good:
            sizes[n] = {"trials": config.trials, "excluded": config.trials}
            continue
        arrays[f"singulars_n{n}"] = np.vstack([
            np.column_stack([np.full(v.size, t, dtype=float),
                             np.arange(v.size, dtype=float), v])
            for t, v in value_rows])

        scans = np.sort([r["scan"] for r in good])
        ecdf = np.searchsorted(scans, eps_grid, side="right") / scans.size
        stable = eps_grid >= 0.05  # below this the counts are too thin to fit
        c_hat = float(np.max(ecdf[stable] / eps_grid[stable]))
        per_trial = [r["scan"] for r in good]

        def c_of(vals, grid=eps_grid[stable]):
            v = np.sort(np.asarray(vals))
            e = np.searchsorted(v, grid, side="right") / v.size
            return float(np.max(e / grid))

        lo, hi = _bootstrap_ci(per_trial, c_of)
        freq = sum(r["violation"] for r in good) / len(good)
        sizes[n] = {
            "trials": config.trials,
            "excluded": config.trials - len(good),
            "violation_freq": float(freq),
            "floor_count": sum(r["at_floor"] for r in good),
            "threshold": float(n ** -6.5),
            "scan_min": float(scans[0]), "scan_median": float(np.median(scans)),
            "C_hat": c_hat, "C_hat_ci90": [lo, hi],
            "ecdf": np.column_stack([eps_grid, ecdf]).tolist(),
        }
        checks.append(freq <= SMALLEST_SV_FREQ_BOUND)
        arrays[f"scan_n{n}"] = scans

    violations, verdict = _finalize_verdict(
        checks, bool(checks), _exclusion_gate(total, good_count))
    summary = {"sizes": sizes}
    return ExperimentReport(name="smallest_singular_value", config=config,
                            records=records, summary=summary,
                            violations=violations, verdict=verdict,
                            excluded=total - good_count, arrays=arrays)


# ---------------------------------------------------------------------------
# intermediate singular values


def intermediate_range(n: int, gamma: float) -> np.ndarray:
    """Indices i with n^gamma <= i <= n - 1 (possibly empty)."""
    lo = int(math.ceil(n ** gamma))
    return np.arange(lo, n)


def ratio_profile(values: np.ndarray, gamma: float) -> tuple:
    """(i, s_{n-i} / (i/n)) over the intermediate range.

    ``values`` are the descending singular values of the normalized shifted
    matrix; s_{n-i} is its (n-i)-th largest entry.
    """
    values = np.asarray(values, dtype=float)
    n = values.size
    i = intermediate_range(n, gamma)
    if i.size == 0:
        return i, np.empty(0)
    ratios = values[n - 1 - i] / (i / n)
    return i, ratios


def run_small_sv_counts(config: ExperimentConfig, cache=None, sampler=None) -> ExperimentReport:
    """Lower linear profile of the intermediate singular values.

    For every trial the ratios s_{n-i} / (i/n) over n^gamma <= i <= n-1 must
    stay positive and bounded away from zero; the fitted constant is the
    first percentile of the pooled ratios, which should be stable in n.
    """
    sampler = sampler if sampler is not None else _make_sampler(config, cache)
    records, sizes = [], {}
    total, good_count = 0, 0
    min_ratios_ok = []
    c_hats = {}
    for n in config.n_list:
        if intermediate_range(n, config.gamma).size == 0:
            sizes[n] = {"skipped": "intermediate range is empty"}
            continue

        def worker(t, n=n):
            A = sampler(n, t)
            sv = shifted_singular_values(A, config.shift)
            i, ratios = ratio_profile(sv.values, config.gamma)
            j = int(np.argmin(ratios))
            return {"trial": t, "n": n,
                    "min_ratio": float(ratios[j]),
                    "argmin_i": int(i[j]),
                    "_ratios": ratios}

        rows, good = _run_trials(config.trials, worker)
        total += config.trials
        good_count += len(good)
        ratio_rows = [r.pop("_ratios") for r in good]
        for r in rows:
            r.pop("_ratios", None)
        records.extend(rows)
        if not good:
            sizes[n] = {"trials": config.trials, "excluded": config.trials}
            continue
        pooled = np.concatenate(ratio_rows)
        c_hat = float(np.percentile(pooled, 1.0))
        lo, hi = _bootstrap_ci(
            ratio_rows, lambda rs: float(np.percentile(np.concatenate(rs), 1.0)))
        min_ratio = min(r["min_ratio"] for r in good)
        sizes[n] = {
            "trials": config.trials,
            "excluded": config.trials - len(good),
            "min_ratio": float(min_ratio),
            "c_hat": c_hat, "c_hat_ci90": [lo, hi],
            "ratio_count": int(pooled.size),
        }
        min_ratios_ok.append(min_ratio > 0.0)
        c_hats[n] = c_hat

    checks = list(min_ratios_ok)
    stability = None
    ns = sorted(c_hats)
    if len(ns) >= 2 and c_hats[ns[-2]] > 0:
        # the constant must be stable between the two largest sizes
        stability = c_hats[ns[-1]] / c_hats[ns[-2]]
        checks.append(0.5 <= stability <= 2.0)
    violations, verdict = _finalize_verdict(
        checks, bool(min_ratios_ok), _exclusion_gate(total, good_count))
    summary = {"sizes": sizes, "stability_ratio": stability, "gamma": config.gamma}
    return ExperimentReport(name="small_sv_counts", config=config, records=records,
                            summary=summary, violations=violations, verdict=verdict,
                            excluded=total - good_count)


# ---------------------------------------------------------------------------
# distance of a row to the span of earlier rows


def run_distance_subspace(config: ExperimentConfig, cache=None, sampler=None) -> ExperimentReport:
    """Row-to-subspace distances of the shifted matrix at several corank levels.

    For each fraction f in ``k_grid``, k = round(f * n) rows span the
    subspace and the distance of the next row is compared with sqrt(n - k).
    The verdict requires the 5th percentile of distance / sqrt(n - k) to
    clear 0.1 wherever n - k >= 16.
    """
    sampler = sampler if sampler is not None else _make_sampler(config, cache)
    records, sizes = [], {}
    arrays = {}
    total, good_count = 0, 0
    checks = []
    applicable = False
    for n in config.n_list:
        ks = sorted({min(max(int(round(f * n)), 1), n - 1)
                     for f in config.k_grid if n >= 2})
        if not ks:
            sizes[n] = {"skipped": "no valid k"}
            continue

        def worker(t, n=n, ks=ks):
            A = sampler(n, t)
            L = shifted_matrix(A, config.shift, normalized=False)
            if np.all(L.imag == 0):
                L = L.real
            out = []
            for k in ks:
                d, rank = span_distance_with_rank(L[k], L[:k])
                out.append({"k": k, "distance": float(d),
                            "ratio": float(d / math.sqrt(n - k)),
                            "span_rank": rank})
            return {"trial": t, "n": n, "distances": out}

        rows, good = _run_trials(config.trials, worker)
        total += config.trials
        good_count += len(good)
        records.extend(rows)
        if not good:
            sizes[n] = {"trials": config.trials, "excluded": config.trials}
            continue
        dump = []
        per_k = {}
        for r in good:
            for d in r["distances"]:
                dump.append((r["trial"], d["k"], d["distance"]))
                per_k.setdefault(d["k"], []).append(d)
        arrays[f"distances_n{n}"] = np.asarray(dump, dtype=float)
        k_summaries = {}
        for k, ds in per_k.items():
            ratios = [d["ratio"] for d in ds]
            p5 = float(np.percentile(ratios, 5.0))
            lo, hi = _bootstrap_ci(ratios, lambda v: float(np.percentile(v, 5.0)))
            deficient = sum(1 for d in ds if d["span_rank"] < k)
            k_summaries[k] = {
                "ratio_p5": p5, "ratio_p5_ci90": [lo, hi],
                "mean_sq_distance": float(np.mean([d["distance"] ** 2 for d in ds])),
                "rank_deficient_trials": deficient,
            }
            if n - k >= 16:
                applicable = True
                checks.append(p5 >= 0.1)
        sizes[n] = {
            "trials": config.trials,
            "excluded": config.trials - len(good),
            "by_k": k_summaries,
        }

    violations, verdict = _finalize_verdict(
        checks, applicable, _exclusion_gate(total, good_count))
    summary = {"sizes": sizes, "k_grid": list(config.k_grid)}
    return ExperimentReport(name="distance_subspace", config=config, records=records,
                            summary=summary, violations=violations, verdict=verdict,
                            excluded=total - good_count, arrays=arrays)


# ---------------------------------------------------------------------------
# compressible / incompressible split


@dataclass(frozen=True)
class CompressibilityRecord:
    """Sparse-approximation profile of one unit vector.

    ``is_compressible`` means the vector sits within the threshold distance
    of the ``sparse_support``-sparse set.  An incompressible vector must
    have at least ``spread_bound`` coordinates of magnitude
    ``spread_threshold`` or larger; ``spread_count`` is the actual number.
    """

    sparse_support: int
    dist_to_sparse: float
    is_compressible: bool
    spread_threshold: float
    spread_count: int
    spread_bound: float


def compressibility(x, delta: float, rho_comp: float) -> CompressibilityRecord:
    """Distance of a unit vector to the delta*n-sparse set, with spread check."""
    x = np.asarray(x)
    if x.ndim != 1 or x.size == 0:
        raise ParameterError("x must be a nonempty vector")
    if not (0.0 < delta < 1.0) or not (0.0 < rho_comp <= 1.0):
        raise ParameterError("need 0 < delta < 1 and 0 < rho_comp <= 1")
    norm = float(np.linalg.norm(x))
    if abs(norm - 1.0) > 1e-8:
        raise ParameterError(f"x must be a unit vector (norm {norm:.6g})")
    n = x.size
    support = int(math.floor(delta * n))
    if support < 1:
        raise ParameterError(f"delta * n must be at least 1 (got {delta * n:.3g})")
    magnitudes = np.sort(np.abs(x))[::-1]
    tail = magnitudes[support:]
    distance = float(np.linalg.norm(tail))
    threshold = rho_comp / math.sqrt(2.0 * n)
    count = int(np.sum(np.abs(x) >= threshold))
    return CompressibilityRecord(
        sparse_support=support,
        dist_to_sparse=distance,
        is_compressible=distance <= rho_comp,
        spread_threshold=threshold,
        spread_count=count,
        spread_bound=0.5 * rho_comp * rho_comp * delta * n,
    )


# ---------------------------------------------------------------------------
# Cauchy transform concentration


def run_stieltjes_concentration(config: ExperimentConfig, cache=None,
                                sampler=None) -> ExperimentReport:
    """Concentration of the Cauchy transform of the shifted singular values.

    The transform is evaluated at the fixed probe 2i for every trial; the
    across-trial standard deviation must shrink by a factor of at most 0.8
    per doubling of n.
    """
    sampler = sampler if sampler is not None else _make_sampler(config, cache)
    records, sizes = [], {}
    total, good_count = 0, 0
    stds = {}
    for n in config.n_list:

        def worker(t, n=n):
            A = sampler(n, t)
            sv = shifted_singular_values(A, config.shift)
            m = stieltjes(singular_esd(sv), CONCENTRATION_XI)
            return {"trial": t, "n": n, "re": m.real, "im": m.imag}

        rows, good = _run_trials(config.trials, worker)
        total += config.trials
        good_count += len(good)
        records.extend(rows)
        if not good:
            sizes[n] = {"trials": config.trials, "excluded": config.trials}
            continue
        values = np.array([complex(r["re"], r["im"]) for r in good])
        center = values.mean()
        std = float(np.sqrt(np.mean(np.abs(values - center) ** 2)))
        sizes[n] = {
            "trials": config.trials,
            "excluded": config.trials - len(good),
            "mean_re": float(center.real), "mean_im": float(center.imag),
            "std": std,
        }
        stds[n] = std

    ns = sorted(stds)
    ratios = []
    for a, b in zip(ns, ns[1:]):
        ratios.append(stds[b] / stds[a] if stds[a] > 0 else math.inf)
    checks = [r <= 0.8 for r in ratios]
    violations, verdict = _finalize_verdict(
        checks, len(ns) >= 2, _exclusion_gate(total, good_count))
    summary = {"sizes": sizes, "decay_ratios": ratios,
               "xi": [CONCENTRATION_XI.real, CONCENTRATION_XI.imag]}
    return ExperimentReport(name="stieltjes_concentration", config=config,
                            records=records, summary=summary,
                            violations=violations, verdict=verdict,
                            excluded=total - good_count)


# ---------------------------------------------------------------------------
# entry-level tail battery


def _pooled_entries(family: str, n: int, p: float, draws: int, seed: int, cache):
    entries = []
    for t in range(draws):
        spec = EnsembleSpec(family=family, n=n, p=p,
                            seed=child_seed(seed, t))
        entries.append(sample_matrix(spec, cache).ravel())
    return np.concatenate(entries)


def run_tail_suite(config: ExperimentConfig, cache=None) -> ExperimentReport:
    """Entry-level checks: exponential tail, small-ball mass, domination.

    Three checks, each on pooled entries drawn from child seeds of the
    master seed: the unit-variance Laplace family must show a straight
    log-survival line of slope sqrt(2) on [1, 5]; every family must satisfy
    P(|entry| <= eps) <= 2 * eps at eps in {0.01, 0.05, 0.1}; and the ball
    families' norm quantiles must not exceed the Laplace ones by more than a
    factor of 10.
    """
    p = config.ensemble.p if config.ensemble.family.startswith("lp_ball") else 1.0
    tag = child_seed(config.master_seed, 0x7A17)
    records, checks = [], []

    # check 1: log-survival slope of the unit-variance Laplace entries
    entries = _pooled_entries("laplace_iid", 256, p, 4, child_seed(tag, 0), cache)
    t_grid = np.linspace(1.0, 5.0, 9)
    table = np.asarray([
        row for row in
        np.column_stack([t_grid, [np.mean(np.abs(entries) >= t) for t in t_grid]])
        if row[1] > 0])
    slope, intercept = np.polyfit(table[:, 0], -np.log(table[:, 1]), 1)
    slope_ok = abs(slope - math.sqrt(2.0)) <= 0.1
    checks.append(slope_ok)
    records.append({"check": "laplace_slope", "slope": float(slope),
                    "intercept": float(intercept),
                    "target": math.sqrt(2.0), "tol": 0.1,
                    "entries": int(entries.size), "ok": bool(slope_ok)})
    slope_table = table

    # check 2: small-ball constant per family
    eps_grid = (0.01, 0.05, 0.1)
    small_ball = {}
    plans = [("ginibre", 64, 25), ("laplace_iid", 64, 25),
             ("lp_ball_global", 32, 100), ("lp_ball_rows", 64, 25)]
    for j, (family, n, draws) in enumerate(plans):
        pool = _pooled_entries(family, n, p, draws, child_seed(tag, 10 + j), cache)
        c_hat = max(float(np.mean(np.abs(pool) <= e)) / e for e in eps_grid)
        ok = c_hat <= 2.0
        checks.append(ok)
        small_ball[family] = c_hat
        records.append({"check": "small_ball", "family": family, "n": n,
                        "C_hat": c_hat, "bound": 2.0,
                        "entries": int(pool.size), "ok": bool(ok)})

    # check 3: norm quantiles of the global ball family against Laplace
    draws = 400
    quantiles = (50.0, 90.0, 99.0)
    rngseed = child_seed(tag, 50)
    ball_sup, ball_fro, lap_sup, lap_fro = [], [], [], []
    for t in range(draws):
        X = sample_matrix(EnsembleSpec("lp_ball_global", 32, p,
                                       child_seed(rngseed, 2 * t)), cache)
        E = sample_matrix(EnsembleSpec("laplace_iid", 32, p,
                                       child_seed(rngseed, 2 * t + 1)), cache)
        ball_sup.append(np.max(np.abs(X)))
        ball_fro.append(np.linalg.norm(X))
        lap_sup.append(np.max(np.abs(E)))
        lap_fro.append(np.linalg.norm(E))
    dom = {}
    quantile_profile = {}
    for name, xs, es in (("sup", ball_sup, lap_sup), ("fro", ball_fro, lap_fro)):
        qx = np.percentile(xs, quantiles)
        qe = np.percentile(es, quantiles)
        quantile_profile[name] = (qx / qe).tolist()
        # the domination bound is pinned at the 99th quantile; the lower
        # quantile ratios are reported as data only
        dom[name] = float(qx[-1] / qe[-1])
    dom_ok = all(v <= 10.0 for v in dom.values())
    checks.append(dom_ok)
    records.append({"check": "domination", "C_sup": dom["sup"],
                    "C_fro": dom["fro"], "bound": 10.0, "draws": draws,
                    "quantiles": list(quantiles),
                    "quantile_ratios": quantile_profile,
                    "ok": bool(dom_ok)})

    violations, verdict = _finalize_verdict(checks, True, True)
    summary = {
        "laplace_slope": float(slope),
        "small_ball": small_ball,
        "domination": dom,
        "p": p,
    }
    arrays = {"laplace_survival": slope_table}
    return ExperimentReport(name="tail_suite", config=config, records=records,
                            summary=summary, violations=violations,
                            verdict=verdict, arrays=arrays)


SUITES = {
    "circular_law": run_circular_law,
    "operator_norm": run_operator_norm,
    "smallest_singular_value": run_smallest_sv,
    "small_sv_counts": run_small_sv_counts,
    "distance_subspace": run_distance_subspace,
    "stieltjes_concentration": run_stieltjes_concentration,
    "tail_suite": run_tail_suite,
}
