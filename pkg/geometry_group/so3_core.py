#!/usr/bin/env python3
"""
so3_core.py - Exact linear algebra of so(3) and SO(3) (v1.0.0)

Basis of so(3):
    a = e21 - e12,  b = e31 - e13,  c = e32 - e23
with [a,b] = c, [b,c] = a, [c,a] = b. A LieVector stores the coefficients
(x_a, x_b, x_c); under this basis the bracket is the cross product of
coefficient vectors and the coefficient norm equals the rotation angle.

The physical rotation axis of x_a*a + x_b*b + x_c*c is (x_c, -x_b, x_a).

The trace-form product (X,Y) on gl(3) is twice the coefficient dot product;
every computed quantity here uses the coefficient product, in which a, b
are orthonormal.
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Tuple, Union

import numpy as np
from scipy.linalg import polar

from geometry_errors import InvalidRotationError

__version__ = "1.0.0"

logger = logging.getLogger('so3_core')

ArrayLike = Union[np.ndarray, Iterable[float]]

ROTATION_TOL = 1e-12
VALIDATE_TOL = 1e-8
LOG_PI_SWITCH = 1e-6
TAYLOR_SWITCH = 1e-4

_IDENTITY = np.eye(3)


@dataclass(frozen=True)
class LieVector:
    """Element of so(3) in the basis a, b, c"""
    x_a: float = 0.0
    x_b: float = 0.0
    x_c: float = 0.0

    @classmethod
    def from_array(cls, values: ArrayLike) -> "LieVector":
        v = np.asarray(values, dtype=float).reshape(3)
        return cls(float(v[0]), float(v[1]), float(v[2]))

    @classmethod
    def from_matrix(cls, matrix: ArrayLike) -> "LieVector":
        return vee(matrix)

    def as_array(self) -> np.ndarray:
        return np.array([self.x_a, self.x_b, self.x_c])

    def matrix(self) -> np.ndarray:
        return hat(self)

    def norm(self) -> float:
        return math.sqrt(self.x_a ** 2 + self.x_b ** 2 + self.x_c ** 2)

    def axis(self) -> np.ndarray:
        """Physical rotation axis vector (length = coefficient norm)"""
        return np.array([self.x_c, -self.x_b, self.x_a])

    def __add__(self, other: "LieVector") -> "LieVector":
        return LieVector(self.x_a + other.x_a, self.x_b + other.x_b, self.x_c + other.x_c)

    def __sub__(self, other: "LieVector") -> "LieVector":
        return LieVector(self.x_a - other.x_a, self.x_b - other.x_b, self.x_c - other.x_c)

    def __neg__(self) -> "LieVector":
        return LieVector(-self.x_a, -self.x_b, -self.x_c)

    def __mul__(self, scalar: float) -> "LieVector":
        return LieVector(scalar * self.x_a, scalar * self.x_b, scalar * self.x_c)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class Rotation:
    """3x3 orthogonal matrix with determinant 1

    The constructor trusts its input; use Rotation.from_matrix for data that
    has not been produced by this toolkit.
    """
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float).reshape(3, 3)
        m.setflags(write=False)
        object.__setattr__(self, 'matrix', m)

    @classmethod
    def identity(cls) -> "Rotation":
        return cls(_IDENTITY)

    @classmethod
    def from_matrix(cls, matrix: ArrayLike, tol: float = VALIDATE_TOL) -> "Rotation":
        """Validate orthogonality and det = 1 entrywise within tol"""
        m = np.asarray(matrix, dtype=float)
        if m.size != 9:
            raise InvalidRotationError(f"Rotation needs 9 entries, got {m.size}")
        m = m.reshape(3, 3)
        if not np.all(np.isfinite(m)):
            raise InvalidRotationError("Rotation entries must be finite")
        ortho_gap = float(np.max(np.abs(m.T @ m - _IDENTITY)))
        det_gap = float(abs(np.linalg.det(m) - 1.0))
        if ortho_gap > tol or det_gap > tol:
            raise InvalidRotationError(
                f"Not a rotation: |R^T R - I| = {ortho_gap:.3e}, |det R - 1| = {det_gap:.3e} (tol {tol:.1e})",
                orthogonality_gap=ortho_gap, det_gap=det_gap)
        return cls(m)

    @classmethod
    def orthonormalized(cls, matrix: ArrayLike, tol: float = VALIDATE_TOL) -> "Rotation":
        """Validate within tol, then snap to the nearest rotation (polar factor)"""
        checked = cls.from_matrix(matrix, tol)
        return cls(project_to_so3(checked.matrix))

    @classmethod
    def from_entries(cls, entries: Iterable[float], tol: float = VALIDATE_TOL) -> "Rotation":
        """Nine entries, row-major"""
        return cls.orthonormalized(np.asarray(list(entries), dtype=float), tol)

    def entries(self) -> Tuple[float, ...]:
        return tuple(float(v) for v in self.matrix.reshape(9))

    def inverse(self) -> "Rotation":
        return Rotation(self.matrix.T)

    def apply(self, vector: ArrayLike) -> np.ndarray:
        return self.matrix @ np.asarray(vector, dtype=float)

    def is_valid(self, tol: float = ROTATION_TOL) -> bool:
        m = self.matrix
        return bool(np.max(np.abs(m.T @ m - _IDENTITY)) <= tol and abs(np.linalg.det(m) - 1.0) <= tol)

    def __matmul__(self, other: "Rotation") -> "Rotation":
        return Rotation(self.matrix @ other.matrix)

    def __repr__(self) -> str:
        return f"Rotation({np.array2string(self.matrix, precision=6)})"


def _as_coefficients(X: Union[LieVector, ArrayLike]) -> np.ndarray:
    if isinstance(X, LieVector):
        return X.as_array()
    return np.asarray(X, dtype=float).reshape(3)


def _as_matrix(R: Union[Rotation, ArrayLike], tol: float = VALIDATE_TOL) -> np.ndarray:
    if isinstance(R, Rotation):
        return R.matrix
    return Rotation.from_matrix(R, tol).matrix


def basis() -> Tuple[LieVector, LieVector, LieVector]:
    """a, b, c as unit coefficient vectors"""
    return LieVector(1.0, 0.0, 0.0), LieVector(0.0, 1.0, 0.0), LieVector(0.0, 0.0, 1.0)


def hat(X: Union[LieVector, ArrayLike]) -> np.ndarray:
    """Coefficients (x_a, x_b, x_c) -> skew matrix x_a*a + x_b*b + x_c*c"""
    xa, xb, xc = _as_coefficients(X)
    return np.array([[0.0, -xa, -xb],
                     [xa, 0.0, -xc],
                     [xb, xc, 0.0]])


def vee(matrix: ArrayLike) -> LieVector:
    """Skew matrix -> coefficients (reads the lower triangle)"""
    m = np.asarray(matrix, dtype=float).reshape(3, 3)
    return LieVector(float(m[1, 0]), float(m[2, 0]), float(m[2, 1]))


def _hat_batch(coefficients: np.ndarray) -> np.ndarray:
    xa, xb, xc = coefficients[..., 0], coefficients[..., 1], coefficients[..., 2]
    zero = np.zeros_like(xa)
    return np.stack([np.stack([zero, -xa, -xb], axis=-1),
                     np.stack([xa, zero, -xc], axis=-1),
                     np.stack([xb, xc, zero], axis=-1)], axis=-2)


def bracket(X: Union[LieVector, ArrayLike], Y: Union[LieVector, ArrayLike]) -> LieVector:
    """[X, Y] = XY - YX via the structure constants [a,b]=c, [b,c]=a, [c,a]=b"""
    return LieVector.from_array(np.cross(_as_coefficients(X), _as_coefficients(Y)))


def ad_matrix(X: Union[LieVector, ArrayLike]) -> np.ndarray:
    """Matrix of ad(X) = [X, .] acting on coefficients in the ordered basis (a, b, c)"""
    xa, xb, xc = _as_coefficients(X)
    return np.array([[0.0, -xc, xb],
                     [xc, 0.0, -xa],
                     [-xb, xa, 0.0]])


def _rodrigues_factors(theta: np.ndarray, taylor_switch: float = TAYLOR_SWITCH) -> Tuple[np.ndarray, np.ndarray]:
    """sin(theta)/theta and (1 - cos(theta))/theta^2, Taylor below taylor_switch"""
    theta = np.asarray(theta, dtype=float)
    small = theta < taylor_switch
    safe = np.where(small, 1.0, theta)
    t2 = theta * theta
    a = np.where(small, 1.0 - t2 / 6.0 + t2 * t2 / 120.0, np.sin(safe) / safe)
    b = np.where(small, 0.5 - t2 / 24.0 + t2 * t2 / 720.0, 2.0 * np.sin(0.5 * safe) ** 2 / (safe * safe))
    return a, b


def exp_array(coefficients: np.ndarray, taylor_switch: float = TAYLOR_SWITCH) -> np.ndarray:
    """Vectorized Rodrigues formula; (..., 3) coefficients -> (..., 3, 3)"""
    coefficients = np.asarray(coefficients, dtype=float)
    theta = np.linalg.norm(coefficients, axis=-1)
    a, b = _rodrigues_factors(theta, taylor_switch)
    K = _hat_batch(coefficients)
    K2 = K @ K
    return np.eye(3) + a[..., None, None] * K + b[..., None, None] * K2


def exp(X: Union[LieVector, ArrayLike], taylor_switch: float = TAYLOR_SWITCH) -> Rotation:
    """Matrix exponential of x_a*a + x_b*b + x_c*c"""
    return Rotation(exp_array(_as_coefficients(X), taylor_switch))


def _axis_to_coefficients(axis: np.ndarray) -> np.ndarray:
    return np.array([axis[2], -axis[1], axis[0]])


def _coefficients_to_axis(coefficients: np.ndarray) -> np.ndarray:
    return np.array([coefficients[2], -coefficients[1], coefficients[0]])


def _canonical_sign(coefficients: np.ndarray, zero_tol: float = 1e-12) -> np.ndarray:
    """Representative with lexicographically non-negative leading coefficient"""
    for value in coefficients:
        if abs(value) > zero_tol:
            return coefficients if value > 0 else -coefficients
    return coefficients


def log_array(m: np.ndarray, pi_switch: float = LOG_PI_SWITCH) -> np.ndarray:
    """Unchecked logarithm of a 3x3 rotation array; coefficient norm in [0, pi]"""
    antisym = np.array([m[1, 0] - m[0, 1], m[2, 0] - m[0, 2], m[2, 1] - m[1, 2]]) * 0.5
    cos_theta = float(np.clip((np.trace(m) - 1.0) * 0.5, -1.0, 1.0))
    sin_theta = float(np.linalg.norm(antisym))
    theta = math.atan2(sin_theta, cos_theta)

    if np.trace(m) <= -1.0 + pi_switch:
        # Near angle pi: axis from the symmetric part, sign from the antisymmetric part
        outer = (0.5 * (m + m.T) - cos_theta * _IDENTITY) / (1.0 - cos_theta)
        k = int(np.argmax(np.diag(outer)))
        axis = outer[:, k] / math.sqrt(max(outer[k, k], 1e-300))
        axis /= np.linalg.norm(axis)
        coefficients = _axis_to_coefficients(axis)
        if sin_theta > 1e-10:
            if float(np.dot(coefficients, antisym)) < 0.0:
                coefficients = -coefficients
        else:
            coefficients = _canonical_sign(coefficients)
        return theta * coefficients

    if theta < TAYLOR_SWITCH:
        t2 = theta * theta
        scale = 1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0
    else:
        scale = theta / sin_theta
    return scale * antisym


def log_batch(m: np.ndarray, pi_switch: float = LOG_PI_SWITCH) -> np.ndarray:
    """log_array over a stack of rotations (..., 3, 3) -> (..., 3)"""
    m = np.asarray(m, dtype=float)
    flat = m.reshape(-1, 3, 3)
    antisym = 0.5 * np.stack([flat[:, 1, 0] - flat[:, 0, 1],
                              flat[:, 2, 0] - flat[:, 0, 2],
                              flat[:, 2, 1] - flat[:, 1, 2]], axis=-1)
    trace = np.trace(flat, axis1=1, axis2=2)
    sin_theta = np.linalg.norm(antisym, axis=-1)
    theta = np.arctan2(sin_theta, np.clip(0.5 * (trace - 1.0), -1.0, 1.0))
    small = theta < TAYLOR_SWITCH
    t2 = theta * theta
    scale = np.where(small, 1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0,
                     theta / np.where(small, 1.0, np.maximum(sin_theta, 1e-300)))
    out = scale[:, None] * antisym
    for k in np.flatnonzero(trace <= -1.0 + pi_switch):
        out[k] = log_array(flat[k], pi_switch)
    return out.reshape(m.shape[:-2] + (3,))


def log(R: Union[Rotation, ArrayLike], tol: float = VALIDATE_TOL,
        pi_switch: float = LOG_PI_SWITCH) -> LieVector:
    """Principal logarithm; rejects non-rotations beyond tol"""
    m = _as_matrix(R, tol)
    return LieVector.from_array(log_array(m, pi_switch))


def Ad(g: Union[Rotation, ArrayLike], X: Union[LieVector, ArrayLike]) -> LieVector:
    """Coefficients of g X g^-1"""
    m = _as_matrix(g)
    return vee(m @ hat(X) @ m.T)


def exp_conjugated(beta: float, t: float) -> Rotation:
    """exp(t(a + beta c)) as exp(-xi b) exp(t*sqrt(1+beta^2) a) exp(xi b)

    cos(xi) = 1/sqrt(1+beta^2), sin(xi) = beta/sqrt(1+beta^2).
    """
    omega = math.hypot(1.0, beta)
    xi = math.atan2(beta, 1.0)
    left = exp_array(np.array([0.0, -xi, 0.0]))
    planar = exp_array(np.array([t * omega, 0.0, 0.0]))
    right = exp_array(np.array([0.0, xi, 0.0]))
    return Rotation(left @ planar @ right)


def axis_angle_to_rotation(axis: ArrayLike, angle: float, tol: float = VALIDATE_TOL) -> Rotation:
    """Rotation about a unit axis (validated within tol) by angle radians"""
    w = np.asarray(axis, dtype=float).reshape(3)
    length = float(np.linalg.norm(w))
    if not np.all(np.isfinite(w)) or not math.isfinite(angle):
        raise InvalidRotationError("Axis and angle must be finite")
    if abs(length - 1.0) > tol:
        raise InvalidRotationError(f"Axis must be a unit vector (|axis| = {length:.12g})")
    return exp(_axis_to_coefficients(w / length) * angle)


def rotation_to_axis_angle(R: Union[Rotation, ArrayLike]) -> Tuple[np.ndarray, float]:
    coefficients = log(R).as_array()
    angle = float(np.linalg.norm(coefficients))
    if angle == 0.0:
        return np.array([1.0, 0.0, 0.0]), 0.0
    return _coefficients_to_axis(coefficients) / angle, angle


def rotation_distance(R1: Union[Rotation, ArrayLike], R2: Union[Rotation, ArrayLike]) -> float:
    """Bi-invariant gap |log(R1^T R2)|"""
    m1 = R1.matrix if isinstance(R1, Rotation) else np.asarray(R1, dtype=float)
    m2 = R2.matrix if isinstance(R2, Rotation) else np.asarray(R2, dtype=float)
    return float(np.linalg.norm(log_array(m1.T @ m2)))


def project_to_so3(matrix: np.ndarray) -> np.ndarray:
    """Nearest rotation in the Frobenius norm (orthogonal polar factor, reflections flipped)"""
    r, _ = polar(np.asarray(matrix, dtype=float))
    if np.linalg.det(r) < 0:
        u, _, vt = np.linalg.svd(matrix)
        u[:, -1] = -u[:, -1]
        r = u @ vt
    return r


if __name__ == "__main__":
    a, b, c = basis()
    print("=== so3_core self-check ===")
    print(f"[a,b] = {bracket(a, b)}")
    print(f"exp(pi a) =\n{exp(math.pi * a).matrix}")
    print(f"log(exp(0.7 b)) = {log(exp(0.7 * b))}")
