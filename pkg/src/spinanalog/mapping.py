"""Correspondence between oscillator states and spinors.

An oscillator position x is read as the quaternion q = x1 + i x2 + j x3 + k x4
and factored as q = u s, with s the spinor quaternion and u a constant unit
quaternion the spinor cannot see. In terms of two complex numbers A, B,

    u = Re A + i Im A + j Re B - k Im B.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .dynamics import OscState, lagrangian_L2, mode_vectors
from .errors import NonUnitHiddenQuaternion, NotNormalized, SingularModeBasis
from .quaternion import (
    I,
    UNIT_TOL,
    Quat,
    Spinor,
    beta_to_quat,
    qmul,
    qmul_array,
    quat_to_spinor_u,
    spinor_to_quat,
)


class ModeCoefficients(NamedTuple):
    a: complex
    b: complex
    c: complex
    d: complex

    def ad_minus_bc(self) -> complex:
        return self.a * self.d - self.b * self.c

    def weight(self) -> float:
        return sum(abs(z) ** 2 for z in self)


def hidden_from_AB(A: complex, B: complex) -> Quat:
    return Quat(A.real, A.imag, B.real, -B.imag)


def hidden_to_AB(u: Quat) -> tuple[complex, complex]:
    return complex(u.w, u.x), complex(u.y, -u.z)


def _check_unit(u: Quat) -> None:
    if not u.is_unit():
        raise NonUnitHiddenQuaternion(f"|u| = {u.norm()!r}")


def spinor_velocity_quat(s: Spinor, beta, omega0: float) -> Quat:
    """Quaternion form of the spinor's time derivative: -i omega0 s - s b."""
    sq = spinor_to_quat(s)
    return qmul(I.scale(-omega0), sq) - qmul(sq, beta_to_quat(beta))


def spinor_to_oscillator_init(s: Spinor, u: Quat, beta_at_t0, omega0: float) -> OscState:
    """Oscillator state q = u s with velocity u s', which has L2 = 0."""
    _check_unit(u)
    if not s.is_normalized():
        raise NotNormalized(f"|chi|^2 = {s.norm2()!r}")
    q = qmul(u, spinor_to_quat(s))
    qdot = qmul(u, spinor_velocity_quat(s, beta_at_t0, omega0))
    return OscState(q.as_array(), qdot.as_array())


def extract_spinor(state: OscState, u: Quat) -> Spinor:
    """Spinor read off the oscillator positions; not renormalized."""
    return quat_to_spinor_u(Quat.from_array(state.x), u)


def extract_spinor_path(x: np.ndarray, u: Quat) -> np.ndarray:
    """Vectorized :func:`extract_spinor` over an (n, 4) position array; returns (n, 2) complex."""
    _check_unit(u)
    s = qmul_array(u.conj().as_array(), x)
    return s[:, 0::2] + 1j * s[:, 1::2]


def check_quantum_constraint(state: OscState, beta, omega0: float, eps: float = 1e-300):
    """|L2| / (omega0^2 max(x.x, eps)); zero for states that map to a spinor."""
    xx = np.sum(state.x * state.x, axis=-1)
    return np.abs(lagrangian_L2(state, beta, omega0)) / (omega0**2 * np.maximum(xx, eps))


def _mode_matrix(beta, omega0: float) -> np.ndarray:
    X, sign = mode_vectors(beta)
    freqs = omega0 + sign * math.sqrt(float(np.dot(beta, beta)))
    cols = []
    for m in range(4):
        xm = X[m]
        vm = -1j * freqs[m] * xm
        cols.append(np.concatenate([xm.real, vm.real]))
        cols.append(np.concatenate([-xm.imag, -vm.imag]))
    return np.array(cols).T


def decompose_modes(state: OscState, beta, omega0: float, tol: float = 1e-10) -> ModeCoefficients:
    """Mode amplitudes (a, b, c, d) reproducing ``state`` at t = 0."""
    M = _mode_matrix(beta, omega0)
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[-1] <= tol * sv[0]:
        raise SingularModeBasis(f"mode basis singular values span [{sv[-1]:.3g}, {sv[0]:.3g}]")
    sol = np.linalg.solve(M, np.concatenate([state.x, state.v]))
    z = sol[0::2] + 1j * sol[1::2]
    return ModeCoefficients(*(complex(c) for c in z))


def random_unit_quat(rng: np.random.Generator) -> Quat:
    q = rng.normal(size=4)
    return Quat.from_array(q / np.linalg.norm(q))


def random_spinor(rng: np.random.Generator) -> Spinor:
    z = rng.normal(size=2) + 1j * rng.normal(size=2)
    z /= np.linalg.norm(z)
    return Spinor(complex(z[0]), complex(z[1]))


__all__ = [
    "ModeCoefficients",
    "UNIT_TOL",
    "check_quantum_constraint",
    "decompose_modes",
    "extract_spinor",
    "extract_spinor_path",
    "hidden_from_AB",
    "hidden_to_AB",
    "random_spinor",
    "random_unit_quat",
    "spinor_to_oscillator_init",
    "spinor_velocity_quat",
]
