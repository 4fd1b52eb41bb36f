"""Dense spectral kernels: eigenvalues, shifted singular values, distances.

Everything here is deterministic linear algebra.  Complex singular value
problems are solved through the real 2n-by-2n embedding
``[[X, -Y], [Y, X]]`` of ``X + iY``, whose singular values are those of the
complex matrix, each repeated twice; the pairing is checked and one
representative per pair is returned.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lapack

from .errors import DecompositionError, ParameterError

# Values at or below this are reported as sitting at the numerical floor.
NUMERICAL_FLOOR = 1e-12

# Relative tolerance for the duplicate-pair check in the 2n embedding.
PAIRING_RTOL = 1e-6


def _as_square(A, name="A", allow_complex=False):
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ParameterError(f"{name} must be a square matrix (got shape {A.shape})")
    if A.shape[0] < 1:
        raise ParameterError(f"{name} must be nonempty")
    if np.iscomplexobj(A):
        if not allow_complex:
            raise ParameterError(f"{name} must be real")
        A = A.astype(complex, copy=False)
    else:
        A = A.astype(float, copy=False)
    if not np.all(np.isfinite(A)):
        raise ParameterError(f"{name} must have finite entries")
    return A


def operator_norm(A) -> float:
    """Largest singular value of ``A`` (real or complex)."""
    A = _as_square(A, allow_complex=True)
    return float(np.linalg.svd(A, compute_uv=False)[0])


@dataclass(eq=False)
class ShiftSpec:
    """Deterministic shift applied before a singular value decomposition.

    Describes the map ``A -> (A + M) / sqrt(n) - z * Id`` with ``M`` treated
    as the zero matrix when omitted.  ``R`` is the norm budget for ``M``:
    construction rejects ``M`` with operator norm exceeding ``R * sqrt(n)``
    beyond a 1e-8 relative allowance.
    """

    z: complex = 0j
    M: np.ndarray | None = None
    R: float = 0.0

    def __post_init__(self):
        self.z = complex(self.z)
        if not (math.isfinite(self.z.real) and math.isfinite(self.z.imag)):
            raise ParameterError("z must be finite")
        self.R = float(self.R)
        if not math.isfinite(self.R) or self.R < 0:
            raise ParameterError(f"R must be a finite nonnegative real (got {self.R})")
        if self.M is not None:
            self.M = _as_square(self.M, name="M")
            budget = self.R * math.sqrt(self.M.shape[0])
            norm = operator_norm(self.M)
            if norm > budget * (1.0 + 1e-8):
                raise ParameterError(
                    f"operator norm of M ({norm:.6g}) exceeds the budget "
                    f"R*sqrt(n) = {budget:.6g}")

    def __eq__(self, other):
        if not isinstance(other, ShiftSpec):
            return NotImplemented
        if self.z != other.z or self.R != other.R:
            return False
        if (self.M is None) != (other.M is None):
            return False
        return self.M is None or np.array_equal(self.M, other.M)

    def effective_radius(self) -> float:
        """Norm budget of the total translate in lemma units, (R + |z|)."""
        return self.R + abs(self.z)


def shifted_matrix(A, shift: ShiftSpec, normalized: bool = True) -> np.ndarray:
    """``(A + M)/sqrt(n) - z*Id`` as a complex matrix.

    With ``normalized=False`` the same object in lemma units,
    ``A + M - z*sqrt(n)*Id``, is returned instead.
    """
    A = _as_square(A)
    n = A.shape[0]
    if shift.M is not None:
        if shift.M.shape != A.shape:
            raise ParameterError(
                f"shift matrix shape {shift.M.shape} does not match A {A.shape}")
        A = A + shift.M
    root = math.sqrt(n)
    if normalized:
        C = A / root - shift.z * np.eye(n)
    else:
        C = A.astype(complex) - shift.z * root * np.eye(n)
    return C


@dataclass(eq=False)
class Spectrum:
    """Eigenvalues of one matrix; ``normalized`` records whether the
    1/sqrt(n) scaling has already been applied to them."""

    eigenvalues: np.ndarray
    normalized: bool = False

    @property
    def n(self) -> int:
        return self.eigenvalues.size


def eigenvalues(A) -> Spectrum:
    """All eigenvalues of a real square matrix.

    Uses the dense real nonsymmetric solver (balancing, Hessenberg
    reduction, shifted QR).  If the iteration fails to converge the raised
    error carries the size of the block that did converge.
    """
    A = _as_square(A)
    n = A.shape[0]
    wr, wi, _, _, info = lapack.dgeev(
        np.asfortranarray(A), compute_vl=0, compute_vr=0)
    if info < 0:
        raise ParameterError(f"illegal argument {-info} in the eigenvalue call")
    if info > 0:
        # eigenvalues info..n-1 converged; the leading block did not
        raise DecompositionError(
            f"eigenvalue iteration failed to converge "
            f"({n - info} of {n} eigenvalues converged)",
            converged=n - info)
    return Spectrum(eigenvalues=wr + 1j * wi, normalized=False)


@dataclass(eq=False)
class SingularSpectrum:
    """Singular values of the shifted, normalized matrix, descending order.

    ``at_floor`` flags entries at or below the numerical floor (1e-12);
    such values are reported as computed but should not be inverted.
    """

    values: np.ndarray
    shift: ShiftSpec
    n: int
    at_floor: np.ndarray = field(init=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.size != self.n:
            raise ParameterError("expected one singular value per dimension")
        if np.any(np.diff(self.values) > 0):
            raise ParameterError("singular values must be nonincreasing")
        if np.any(self.values < 0):
            raise ParameterError("singular values must be nonnegative")
        self.at_floor = self.values <= NUMERICAL_FLOOR

    @property
    def smallest(self) -> float:
        return float(self.values[-1])


def real_embedding(C) -> np.ndarray:
    """The 2n-by-2n real matrix [[X, -Y], [Y, X]] for C = X + iY."""
    C = np.asarray(C, dtype=complex)
    X, Y = C.real, C.imag
    return np.block([[X, -Y], [Y, X]])


def shifted_singular_values(A, shift: ShiftSpec) -> SingularSpectrum:
    """Singular values of ``(A + M)/sqrt(n) - z*Id`` via the real embedding.

    The embedding doubles every singular value; consecutive pairs that
    disagree by more than 1e-6 relative to the largest singular value are a
    numerical failure, not a result.
    """
    A = _as_square(A)
    n = A.shape[0]
    C = shifted_matrix(A, shift, normalized=True)
    emb = real_embedding(C)
    try:
        s = np.linalg.svd(emb, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"singular value iteration failed: {exc}") from exc
    top = s[0::2]
    bottom = s[1::2]
    tol = PAIRING_RTOL * max(float(s[0]), NUMERICAL_FLOOR)
    gaps = np.abs(top - bottom)
    if np.any(gaps > tol):
        worst = float(np.max(gaps))
        raise DecompositionError(
            f"embedding pairing mismatch {worst:.3e} exceeds {tol:.3e}")
    return SingularSpectrum(values=top, shift=shift, n=n)


def smallest_singular_value(A, shift: ShiftSpec) -> float:
    """s_n of the shifted, normalized matrix."""
    return shifted_singular_values(A, shift).smallest


def span_distance_with_rank(v, rows):
    """Euclidean distance from ``v`` to the span of ``rows``, plus the rank.

    The span is orthonormalized through an SVD, which tolerates linearly
    dependent rows; the projection is applied twice to scrub the residual of
    any component lost to rounding in the first pass.
    """
    v = np.asarray(v)
    if v.ndim != 1 or v.size == 0:
        raise ParameterError("v must be a nonempty vector")
    v = v.astype(complex, copy=False)
    rows = np.asarray(rows)
    if rows.size == 0:
        return float(np.linalg.norm(v)), 0
    rows = np.atleast_2d(rows).astype(complex, copy=False)
    if rows.shape[1] != v.size:
        raise ParameterError(
            f"row length {rows.shape[1]} does not match v ({v.size})")
    if rows.shape[0] >= v.size:
        raise ParameterError("need fewer spanning rows than the dimension")
    basis, s, _ = np.linalg.svd(rows.T, full_matrices=False)
    if s[0] == 0.0:
        return float(np.linalg.norm(v)), 0
    rank = int(np.sum(s > s[0] * max(rows.shape) * np.finfo(float).eps))
    Q = basis[:, :rank]
    residual = v - Q @ (Q.conj().T @ v)
    residual = residual - Q @ (Q.conj().T @ residual)
    return float(np.linalg.norm(residual)), rank


def distance_to_span(v, rows) -> float:
    """Euclidean distance from ``v`` to the linear span of ``rows``."""
    return span_distance_with_rank(v, rows)[0]


def hoffman_wielandt_gap(C, D):
    """(sum of squared singular value gaps, squared Frobenius distance).

    For equal-shape matrices the first component never exceeds the second;
    both are returned so callers can check the inequality at their own
    tolerance.
    """
    C = _as_square(C, name="C", allow_complex=True)
    D = _as_square(D, name="D", allow_complex=True)
    if C.shape != D.shape:
        raise ParameterError(f"shape mismatch: {C.shape} vs {D.shape}")
    s = np.linalg.svd(C, compute_uv=False)
    t = np.linalg.svd(D, compute_uv=False)
    lhs = float(np.sum((s - t) ** 2))
    rhs = float(np.linalg.norm(C - D) ** 2)
    return lhs, rhs
