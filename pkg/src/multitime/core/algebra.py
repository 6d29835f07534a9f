"""
Multitime - Dense Small-Matrix Numerics

This module provides the matrix and polynomial numerics used throughout the
library: ordered product chains, pivot-checked inversion, eigenvalues through
the Faddeev-LeVerrier characteristic polynomial and Durand-Kerner roots,
principal matrix T-th roots and a numerically stable quadratic solver.

Matrices are numpy arrays; real matrices are accepted wherever complex ones are.
"""

import cmath
import logging
import warnings
from functools import reduce
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from multitime.core.errors import (
    ConvergenceError,
    DefectiveMatrixError,
    DegenerateEquationError,
    DimensionMismatchError,
    SingularMatrixError,
    UnsupportedSizeError,
)

logger = logging.getLogger(__name__)

MAX_EIGEN_SIZE = 8
SINGULARITY_TOLERANCE = 1e-12
DURAND_KERNER_MAX_ITER = 500
DURAND_KERNER_TOL = 1e-13
DURAND_KERNER_SEED = 20140818
CLUSTER_TOLERANCE = 1e-6
CLUSTER_SAFETY = 1e4
MACHINE_EPSILON = float(np.finfo(float).eps)
EIGENVECTOR_CONDITION_LIMIT = 1e10


def as_matrix(value) -> np.ndarray:
    """Coerce nested sequences to a 2-D numpy array."""
    matrix = np.asarray(value)
    if matrix.ndim != 2:
        raise DimensionMismatchError(f"Expected a 2-D matrix, got shape {matrix.shape}")
    if matrix.dtype.kind not in "fc":
        matrix = matrix.astype(float)
    return matrix


def _require_square(matrix: np.ndarray) -> int:
    rows, cols = matrix.shape
    if rows != cols:
        raise DimensionMismatchError(f"Square matrix required, got {rows}x{cols}")
    return rows


def identity(n: int, dtype=float) -> np.ndarray:
    """The n x n identity."""
    return np.eye(n, dtype=dtype)


def mat_product_chain(factors: Sequence[np.ndarray], n: Optional[int] = None) -> np.ndarray:
    """
    Multiply factors left to right; the empty chain is the identity.

    Args:
        factors: Square matrices of a common size
        n: Size of the identity returned for an empty chain

    Returns:
        factors[0] @ factors[1] @ ... @ factors[-1]
    """
    if not factors:
        if n is None:
            raise DimensionMismatchError("Empty product chain needs an explicit size")
        return identity(n)
    matrices = [as_matrix(factor) for factor in factors]
    size = _require_square(matrices[0])
    if n is not None and n != size:
        raise DimensionMismatchError(f"Chain factors are {size}x{size}, expected {n}x{n}")
    for matrix in matrices[1:]:
        if matrix.shape != (size, size):
            raise DimensionMismatchError(f"Chain factor of shape {matrix.shape} in a {size}x{size} chain")
    return reduce(np.matmul, matrices)


def _lu_checked(matrix: np.ndarray):
    size = _require_square(matrix)
    scale = float(np.max(np.abs(matrix))) if matrix.size else 0.0
    if scale == 0.0:
        raise SingularMatrixError(f"Zero {size}x{size} matrix is singular", pivot=0.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        warnings.simplefilter("ignore", RuntimeWarning)
        lu, piv = lu_factor(matrix, check_finite=True)
    pivot = float(np.min(np.abs(np.diag(lu))))
    if pivot < SINGULARITY_TOLERANCE * scale:
        raise SingularMatrixError(
            f"Matrix is singular: smallest pivot {pivot:.3e} below {SINGULARITY_TOLERANCE:.0e} x {scale:.3e}",
            pivot=pivot,
        )
    return lu, piv


def mat_inverse(matrix) -> np.ndarray:
    """
    Invert a square matrix by partial-pivoting LU.

    Raises:
        SingularMatrixError: when the smallest pivot is below 1e-12 times the
            largest entry magnitude; the pivot is attached to the error
    """
    matrix = as_matrix(matrix)
    lu_piv = _lu_checked(matrix)
    return lu_solve(lu_piv, identity(matrix.shape[0], dtype=matrix.dtype))


def is_invertible(matrix) -> bool:
    """True when :func:`mat_inverse` would succeed."""
    try:
        _lu_checked(as_matrix(matrix))
    except SingularMatrixError:
        return False
    return True


def mat_power(matrix, k: int) -> np.ndarray:
    """Integer power by repeated squaring; negative powers invert first."""
    matrix = as_matrix(matrix)
    _require_square(matrix)
    if k < 0:
        return np.linalg.matrix_power(mat_inverse(matrix), -k)
    return np.linalg.matrix_power(matrix, k)


def frobenius_residual(left, right) -> float:
    """Relative Frobenius distance ||L - R|| / max(1, ||R||)."""
    left = np.asarray(left)
    right = np.asarray(right)
    return float(np.linalg.norm(left - right) / max(1.0, np.linalg.norm(right)))


def characteristic_polynomial(matrix) -> np.ndarray:
    """
    Faddeev-LeVerrier recursion.

    Returns:
        Coefficients [1, c1, ..., cn] of det(zI - M) in descending powers
    """
    matrix = as_matrix(matrix).astype(complex)
    n = _require_square(matrix)
    coeffs = [1.0 + 0.0j]
    helper = np.zeros((n, n), dtype=complex)
    eye = identity(n, dtype=complex)
    for k in range(1, n + 1):
        helper = matrix @ helper + coeffs[-1] * eye
        coeffs.append(-np.trace(matrix @ helper) / k)
    return np.array(coeffs, dtype=complex)


def durand_kerner(coeffs: Sequence[complex], seed: int = DURAND_KERNER_SEED) -> np.ndarray:
    """
    Simultaneous Durand-Kerner iteration for all polynomial roots.

    Args:
        coeffs: Descending coefficients; the leading one must be nonzero
        seed: Seed for the perturbation of the initial points

    Returns:
        Array of the n roots
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.size == 0 or coeffs[0] == 0:
        raise DegenerateEquationError("Leading coefficient vanishes")
    monic = coeffs / coeffs[0]
    degree = monic.size - 1
    if degree == 0:
        return np.zeros(0, dtype=complex)
    if degree == 1:
        return np.array([-monic[1]])

    # Cauchy bound on root moduli
    radius = 1.0 + float(np.max(np.abs(monic[1:])))
    rng = np.random.default_rng(seed)
    base = complex(0.4, 0.9)
    roots = np.array([radius * base ** k for k in range(degree)], dtype=complex)
    roots += 1e-3 * radius * (rng.standard_normal(degree) + 1j * rng.standard_normal(degree))

    for iteration in range(DURAND_KERNER_MAX_ITER):
        previous = roots.copy()
        for i in range(degree):
            others = roots[i] - np.delete(roots, i)
            denominator = np.prod(others)
            if denominator == 0:
                denominator = 1e-300
            roots[i] = roots[i] - np.polyval(monic, roots[i]) / denominator
        change = float(np.max(np.abs(roots - previous)))
        if change <= DURAND_KERNER_TOL * max(1.0, float(np.max(np.abs(roots)))):
            logger.debug(f"Durand-Kerner converged after {iteration + 1} iterations")
            return roots
    # Multiple roots converge linearly; accept if residuals are small.
    residual = float(np.max(np.abs(np.polyval(monic, roots))))
    if residual <= 1e-8 * radius ** degree:
        logger.debug(f"Durand-Kerner stopped at max iterations with residual {residual:.2e}")
        return roots
    raise ConvergenceError(f"Durand-Kerner did not converge in {DURAND_KERNER_MAX_ITER} iterations")


def _sort_key(value: complex) -> Tuple[float, float]:
    return (round(value.real, 12), round(value.imag, 12))


class Spectrum:
    """
    Eigenvalues of a square matrix with algebraic multiplicities.

    Attributes:
        eigenvalues: All n eigenvalues, sorted by real then imaginary part
        distinct: (eigenvalue, algebraic multiplicity) pairs
        diagonalizable: Whether geometric and algebraic multiplicities agree
    """

    def __init__(self, distinct: List[Tuple[complex, int]], diagonalizable: bool):
        self.distinct = sorted(distinct, key=lambda pair: _sort_key(pair[0]))
        self.diagonalizable = diagonalizable
        values: List[complex] = []
        for value, multiplicity in self.distinct:
            values.extend([value] * multiplicity)
        self.eigenvalues = tuple(values)

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    @property
    def moduli(self) -> Tuple[float, ...]:
        return tuple(abs(value) for value in self.eigenvalues)

    @property
    def spectral_radius(self) -> float:
        return max(self.moduli) if self.eigenvalues else 0.0

    def product(self) -> complex:
        result = 1.0 + 0.0j
        for value in self.eigenvalues:
            result *= value
        return result

    def total(self) -> complex:
        return complex(sum(self.eigenvalues))

    def is_stable(self, margin: float = 1e-12) -> bool:
        """True when every eigenvalue lies strictly inside the unit circle."""
        return self.spectral_radius < 1.0 - margin

    def matches(self, other: "Spectrum", tol: float = 1e-9) -> bool:
        """Multiset equality after sorting by real then imaginary part."""
        if self.n != other.n:
            return False
        return all(abs(a - b) <= tol * max(1.0, abs(b)) for a, b in zip(self.eigenvalues, other.eigenvalues))

    def to_dict(self) -> Dict[str, object]:
        return {
            "eigenvalues": [
                {"re": value.real, "im": value.imag, "modulus": abs(value), "multiplicity": multiplicity}
                for value, multiplicity in self.distinct
            ],
            "diagonalizable": self.diagonalizable,
        }

    def __repr__(self) -> str:
        return f"Spectrum({list(self.eigenvalues)}, diagonalizable={self.diagonalizable})"


def cluster_radius(multiplicity: int, scale: float) -> float:
    """
    Distance within which computed roots are read as one repeated root.

    A root of multiplicity k moves by about (delta)^(1/k) under a relative
    coefficient perturbation delta, so the radius grows with the cluster size.

    Args:
        multiplicity: Size of the cluster being formed
        scale: Largest entry magnitude of the matrix

    Returns:
        Absolute cluster radius
    """
    spread = (CLUSTER_SAFETY * MACHINE_EPSILON) ** (1.0 / max(1, multiplicity))
    return max(CLUSTER_TOLERANCE, spread) * max(1.0, scale)


def _polish(coeffs: np.ndarray, centre: complex, multiplicity: int, radius: float) -> complex:
    """Newton on the (k-1)-th derivative, where a k-fold root is simple."""
    target = np.polyder(coeffs, multiplicity - 1)
    slope = np.polyder(target)
    value = centre
    for _ in range(20):
        derivative = np.polyval(slope, value)
        if derivative == 0:
            break
        step = np.polyval(target, value) / derivative
        value = value - step
        if abs(step) <= MACHINE_EPSILON * max(1.0, abs(value)):
            break
    if not np.isfinite(value) or abs(value - centre) > radius:
        return centre
    return complex(value)


def _tightest_group(roots: List[complex], size: int, scale: float) -> Optional[Tuple[int, ...]]:
    radius = cluster_radius(size, scale)
    best: Optional[Tuple[float, Tuple[int, ...]]] = None
    for members in combinations(range(len(roots)), size):
        centre = sum(roots[i] for i in members) / size
        spread = max(abs(roots[i] - centre) for i in members)
        if spread <= radius and (best is None or spread < best[0]):
            best = (spread, members)
    return best[1] if best else None


def _cluster(roots: np.ndarray, coeffs: np.ndarray, scale: float) -> List[Tuple[complex, int]]:
    # largest clusters first; n <= 8 keeps the subset search small
    remaining = [complex(root) for root in roots]
    groups: List[List[complex]] = []
    for size in range(len(remaining), 1, -1):
        while len(remaining) >= size:
            members = _tightest_group(remaining, size, scale)
            if members is None:
                break
            groups.append([remaining[i] for i in members])
            remaining = [root for i, root in enumerate(remaining) if i not in members]
    groups.extend([root] for root in remaining)

    result = []
    for group in groups:
        centre = complex(np.mean(group))
        if len(group) > 1:
            centre = _polish(coeffs, centre, len(group), cluster_radius(len(group), scale))
        # snap numerically real eigenvalues onto the real axis
        snap = 1e-13 if len(group) == 1 else 1e-9
        if abs(centre.imag) <= snap * max(1.0, abs(centre)):
            centre = complex(centre.real, 0.0)
        result.append((centre, len(group)))
    return result


def eigenvalues(matrix) -> Spectrum:
    """
    Eigenvalues as roots of the characteristic polynomial.

    Computed roots are grouped with a radius that widens with the group size
    and each repeated root is refined by Newton on the matching derivative of
    the characteristic polynomial. Diagonalizability compares, at each distinct
    eigenvalue, the algebraic multiplicity with the geometric one
    n - rank(M - lambda I).

    Raises:
        UnsupportedSizeError: for n > 8
    """
    matrix = as_matrix(matrix)
    n = _require_square(matrix)
    if n > MAX_EIGEN_SIZE:
        raise UnsupportedSizeError(f"Eigenvalues supported for n <= {MAX_EIGEN_SIZE}, got n={n}")
    scale = float(np.max(np.abs(matrix))) if matrix.size else 0.0
    coeffs = characteristic_polynomial(matrix)
    roots = durand_kerner(coeffs)
    distinct = _cluster(roots, coeffs, scale)

    diagonalizable = True
    eye = identity(n, dtype=complex)
    for value, multiplicity in distinct:
        if multiplicity == 1:
            continue
        shifted = matrix.astype(complex) - value * eye
        rank = np.linalg.matrix_rank(shifted, tol=cluster_radius(multiplicity, scale))
        if n - rank < multiplicity:
            diagonalizable = False
            break
    return Spectrum(distinct, diagonalizable)


def principal_root(value: complex, T: int) -> complex:
    """exp(log|z|/T + i arg(z)/T) with arg in (-pi, pi]."""
    value = complex(value)
    # -0.0 imaginary parts would select arg = -pi
    value = complex(value.real, value.imag + 0.0)
    modulus, angle = cmath.polar(value)
    if angle == -cmath.pi:
        angle = cmath.pi
    return cmath.rect(modulus ** (1.0 / T), angle / T)


def matrix_root(matrix, T: int) -> np.ndarray:
    """
    Principal T-th root of an invertible diagonalizable matrix.

    Args:
        matrix: Square invertible matrix
        T: Root order, T >= 1

    Returns:
        Complex matrix R with R^T = M

    Raises:
        SingularMatrixError: M is singular
        DefectiveMatrixError: M is not diagonalizable
    """
    if T < 1:
        raise DimensionMismatchError(f"Root order must be >= 1, got {T}")
    matrix = as_matrix(matrix)
    _require_square(matrix)
    _lu_checked(matrix)
    if T == 1:
        return matrix.astype(complex)
    spectrum = eigenvalues(matrix)
    if not spectrum.diagonalizable:
        raise DefectiveMatrixError(
            "Matrix is defective; principal roots are only built for diagonalizable matrices"
        )
    values, vectors = np.linalg.eig(matrix.astype(complex))
    condition = float(np.linalg.cond(vectors))
    if not np.isfinite(condition) or condition > EIGENVECTOR_CONDITION_LIMIT:
        raise DefectiveMatrixError(
            f"Eigenvector matrix is numerically degenerate (condition {condition:.3e}); matrix is defective"
        )
    roots = np.array([principal_root(value, T) for value in values])
    return vectors @ np.diag(roots) @ mat_inverse(vectors)


class Quadratic:
    """
    Roots of a2 z^2 + a1 z + a0 = 0.

    Roots are ordered by decreasing modulus, then decreasing imaginary part.
    """

    def __init__(self, a2: complex, a1: complex, a0: complex, roots: Tuple[complex, complex],
                 discriminant: complex):
        self.a2 = a2
        self.a1 = a1
        self.a0 = a0
        self.roots = roots
        self.discriminant = discriminant

    def residual(self) -> float:
        """Max |p(root)| relative to the largest coefficient magnitude."""
        scale = max(abs(self.a2), abs(self.a1), abs(self.a0))
        return max(abs(self.a2 * z * z + self.a1 * z + self.a0) for z in self.roots) / scale

    def vieta_residual(self) -> float:
        total = self.roots[0] + self.roots[1]
        product = self.roots[0] * self.roots[1]
        return max(abs(total + self.a1 / self.a2), abs(product - self.a0 / self.a2))

    @property
    def moduli(self) -> Tuple[float, float]:
        return (abs(self.roots[0]), abs(self.roots[1]))

    def to_dict(self) -> Dict[str, object]:
        return {
            "coefficients": [[complex(c).real, complex(c).imag] for c in (self.a2, self.a1, self.a0)],
            "discriminant": {"re": complex(self.discriminant).real, "im": complex(self.discriminant).imag},
            "roots": [{"re": z.real, "im": z.imag, "modulus": abs(z)} for z in self.roots],
        }

    def __repr__(self) -> str:
        return f"Quadratic(roots={self.roots}, discriminant={self.discriminant})"


def solve_quadratic(a2: complex, a1: complex, a0: complex) -> Quadratic:
    """
    Solve a2 z^2 + a1 z + a0 = 0 without cancellation.

    Raises:
        DegenerateEquationError: when a2 == 0
    """
    a2, a1, a0 = complex(a2), complex(a1), complex(a0)
    if a2 == 0:
        raise DegenerateEquationError("Quadratic leading coefficient is zero")
    discriminant = a1 * a1 - 4.0 * a2 * a0
    root = cmath.sqrt(discriminant)
    plus, minus = a1 + root, a1 - root
    q = -(plus if abs(plus) >= abs(minus) else minus) / 2.0
    if q == 0:
        roots = (0j, 0j)
    else:
        roots = (q / a2, a0 / q)
    if discriminant.imag == 0 and a2.imag == 0 and a1.imag == 0 and a0.imag == 0 and discriminant.real >= 0:
        roots = (complex(roots[0].real, 0.0), complex(roots[1].real, 0.0))
    ordered = tuple(sorted(roots, key=lambda z: (-abs(z), -z.imag)))
    return Quadratic(a2, a1, a0, ordered, discriminant)
