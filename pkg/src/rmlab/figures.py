"""Figure rendering for the report paths.

The eigenvalue scatter is written by hand so its bytes are a pure function
of the measure (fixed-precision coordinates, no library metadata).  The
remaining summaries go through matplotlib's SVG backend.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .errors import ParameterError

matplotlib.rcParams["svg.hashsalt"] = "rmlab"

# the scatter view covers [-1.5, 1.5]^2; SVG user units are plane units
_VIEW = 1.5
_SPAN = "3"  # 2 * _VIEW, written without a trailing .0
_ATOM_RADIUS = 0.012


def emit_scatter_svg(measure, path) -> None:
    """Scatter of a planar measure: one marker per atom, axes, unit circle.

    Output bytes depend only on the atom positions; coordinates are fixed to
    six decimals and the y axis is flipped into SVG screen orientation.
    """
    if measure.domain != "complex_plane":
        raise ParameterError("scatter wants a planar measure")
    if len(np.atleast_1d(measure.positions)) == 0:
        raise ParameterError("scatter needs at least one atom")
    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="-{_VIEW} -{_VIEW} {_SPAN} {_SPAN}" '
        'width="640" height="640">',
        f'<rect x="-{_VIEW}" y="-{_VIEW}" width="{_SPAN}" '
        f'height="{_SPAN}" fill="white"/>',
        f'<line x1="-{_VIEW}" y1="0" x2="{_VIEW}" y2="0" '
        'stroke="#999999" stroke-width="0.004"/>',
        f'<line x1="0" y1="-{_VIEW}" x2="0" y2="{_VIEW}" '
        'stroke="#999999" stroke-width="0.004"/>',
        '<circle class="unit-circle" cx="0" cy="0" r="1" fill="none" '
        'stroke="#cc3333" stroke-width="0.006"/>',
    ]
    for z in np.asarray(measure.positions, dtype=complex):
        parts.append(
            f'<circle class="atom" cx="{z.real:.6f}" cy="{-z.imag:.6f}" '
            f'r="{_ATOM_RADIUS}" fill="#1f4e8c" fill-opacity="0.55"/>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")


def _save(fig, path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def radial_cdf_figure(r_grid, cdf, path) -> None:
    """Empirical radial mass against the min(r^2, 1) target."""
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot(r_grid, cdf, drawstyle="steps-post", label="empirical")
    ax.plot(r_grid, np.minimum(np.asarray(r_grid) ** 2, 1.0),
            linestyle="--", label="r^2 target")
    ax.set_xlabel("radius")
    ax.set_ylabel("mass within radius")
    ax.legend(loc="lower right")
    fig.tight_layout()
    _save(fig, path)


def histogram_figure(values, path, xlabel: str) -> None:
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.hist(np.asarray(values, dtype=float), bins=30, color="#1f4e8c")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("count")
    fig.tight_layout()
    _save(fig, path)


def decay_figure(sizes, stds, path) -> None:
    """Across-trial spread of the Cauchy transform, log-log in n."""
    sizes = np.asarray(sizes, dtype=float)
    stds = np.asarray(stds, dtype=float)
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.loglog(sizes, stds, marker="o", label="trial std")
    if stds.size and stds[0] > 0:
        guide = stds[0] * (sizes / sizes[0]) ** np.log2(0.8)
        ax.loglog(sizes, guide, linestyle="--", label="0.8 per doubling")
    ax.set_xlabel("n")
    ax.set_ylabel("std of transform at 2i")
    ax.legend(loc="upper right")
    fig.tight_layout()
    _save(fig, path)


def ratio_figure(ratios_by_k, path) -> None:
    """Distance ratios by subspace size, with the 0.1 floor marked."""
    fig, ax = plt.subplots(figsize=(5, 4))
    ks = sorted(ratios_by_k)
    ax.boxplot([ratios_by_k[k] for k in ks])
    ax.set_xticklabels([str(k) for k in ks])
    ax.axhline(0.1, color="#cc3333", linestyle="--", label="0.1 floor")
    ax.set_xlabel("k (rows spanned)")
    ax.set_ylabel("distance / sqrt(n - k)")
    ax.legend(loc="upper right")
    fig.tight_layout()
    _save(fig, path)


def tail_figure(t_grid, survival, slope, intercept, path) -> None:
    """Entry survival on a log scale with the fitted exponential line."""
    t_grid = np.asarray(t_grid, dtype=float)
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.semilogy(t_grid, survival, marker="o", linestyle="none",
                label="empirical")
    ax.semilogy(t_grid, np.exp(-(slope * t_grid + intercept)),
                label=f"fit slope {slope:.3f}")
    ax.set_xlabel("t")
    ax.set_ylabel("P(|entry| >= t)")
    ax.legend(loc="upper right")
    fig.tight_layout()
    _save(fig, path)
