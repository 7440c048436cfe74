"""Quaternion algebra and the fixed spinor/quaternion conversions.

Hamilton convention throughout: i^2 = j^2 = k^2 = ijk = -1, so ij = k.
A spinor (chi+, chi-) is stored as the quaternion chi+ + chi- j, i.e.

    w = Re chi+,  x = Im chi+,  y = Re chi-,  z = Im chi-
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSpinor, NonUnitHiddenQuaternion

UNIT_TOL = 1e-9


@dataclass(frozen=True)
class Quat:
    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_array(cls, a) -> Quat:
        return cls(float(a[0]), float(a[1]), float(a[2]), float(a[3]))

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    def conj(self) -> Quat:
        return Quat(self.w, -self.x, -self.y, -self.z)

    def norm(self) -> float:
        return math.sqrt(self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z)

    def scale(self, c: float) -> Quat:
        return Quat(c * self.w, c * self.x, c * self.y, c * self.z)

    def is_unit(self, tol: float = UNIT_TOL) -> bool:
        return abs(self.norm() - 1.0) <= tol

    def __mul__(self, other):
        if isinstance(other, Quat):
            return qmul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __add__(self, other: Quat) -> Quat:
        return Quat(self.w + other.w, self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: Quat) -> Quat:
        return Quat(self.w - other.w, self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> Quat:
        return Quat(-self.w, -self.x, -self.y, -self.z)


ONE = Quat(1.0, 0.0, 0.0, 0.0)
I = Quat(0.0, 1.0, 0.0, 0.0)
J = Quat(0.0, 0.0, 1.0, 0.0)
K = Quat(0.0, 0.0, 0.0, 1.0)


@dataclass(frozen=True)
class Spinor:
    chi_plus: complex
    chi_minus: complex

    def __post_init__(self):
        object.__setattr__(self, "chi_plus", complex(self.chi_plus))
        object.__setattr__(self, "chi_minus", complex(self.chi_minus))

    @classmethod
    def from_array(cls, a) -> Spinor:
        return cls(complex(a[0]), complex(a[1]))

    def as_array(self) -> np.ndarray:
        return np.array([self.chi_plus, self.chi_minus], dtype=complex)

    def norm2(self) -> float:
        return abs(self.chi_plus) ** 2 + abs(self.chi_minus) ** 2

    def is_normalized(self, tol: float = UNIT_TOL) -> bool:
        return abs(self.norm2() - 1.0) <= tol


def qmul(a: Quat, b: Quat) -> Quat:
    """Hamilton product ``a * b``."""
    return Quat(
        a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
        a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
        a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
        a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
    )


def qmul_array(a, b):
    """Hamilton product over the last axis of (..., 4) arrays."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    aw, ax, ay, az = np.moveaxis(a, -1, 0)
    bw, bx, by, bz = np.moveaxis(b, -1, 0)
    return np.stack(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ],
        axis=-1,
    )


def spinor_to_quat(s: Spinor) -> Quat:
    return Quat(s.chi_plus.real, s.chi_plus.imag, s.chi_minus.real, s.chi_minus.imag)


def _require_unit(u: Quat) -> None:
    if not u.is_unit():
        raise NonUnitHiddenQuaternion(f"|u| = {u.norm()!r}, expected 1 within {UNIT_TOL}")


def quat_to_spinor_u(q: Quat, u: Quat) -> Spinor:
    """Read the spinor encoded by ``q`` under hidden quaternion ``u``.

    Computes s = conj(u) q and returns (s.w + i s.x, s.y + i s.z). With
    u = 1 this is the plain component map chi+ = x1 + i x2,
    chi- = x3 + i x4.
    """
    _require_unit(u)
    s = qmul(u.conj(), q)
    return Spinor(complex(s.w, s.x), complex(s.y, s.z))


def beta_to_quat(beta) -> Quat:
    """Pure quaternion i*bz - j*by + k*bx for the coupling vector (bx, by, bz)."""
    bx, by, bz = (float(c) for c in beta)
    return Quat(0.0, bz, -by, bx)


def fit_hidden_quaternion(q: Quat, s: Spinor) -> Quat:
    """Solve q = u s for u, without normalizing the result."""
    sq = spinor_to_quat(s)
    n2 = sq.w * sq.w + sq.x * sq.x + sq.y * sq.y + sq.z * sq.z
    if math.sqrt(n2) <= 1e-12:
        raise DegenerateSpinor("spinor norm below 1e-12")
    return qmul(q, sq.conj()).scale(1.0 / n2)
