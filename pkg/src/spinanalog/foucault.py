"""Two coupled oscillators with a single (Coriolis-like) coupling.

    x1'' + (omega0^2 - beta^2) x1 =  2 beta x2' + beta' x2
    x2'' + (omega0^2 - beta^2) x2 = -2 beta x1' - beta' x1

The scalar coupling is carried by a y-directed :class:`FieldProfile` with
beta_y = -beta. With that embedding the same profile drives the
four-oscillator system, whose (x1, x3) and (x2, x4) pairs each obey the
equations above, and the spinor equation

    i a' = omega0 a + i beta b,   i b' = -i beta a + omega0 b.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from . import fields
from .dynamics import SpinorSystem, _System, integrate
from .fields import FieldProfile
from .quaternion import Spinor


@dataclass(frozen=True)
class Osc2State:
    x1: float
    x2: float
    v1: float
    v2: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.v1, self.v2], dtype=float)

    @classmethod
    def from_array(cls, a) -> Osc2State:
        return cls(*(float(c) for c in a))


def constant_coupling(beta: float, domain=None) -> FieldProfile:
    return fields.constant([0.0, -beta, 0.0], domain=domain)


def sinusoidal_coupling(offset: float, amplitude: float, rate: float, phase: float = 0.0,
                        domain=None) -> FieldProfile:
    """beta(t) = offset + amplitude * sin(rate*t + phase)."""
    return fields.sinusoidal([0.0, -offset, 0.0], [0.0, -amplitude, 0.0], rate, phase, domain=domain)


def earth_coupling(earth_rate: float, latitude: float) -> FieldProfile:
    """Foucault pendulum coupling Omega sin(latitude), latitude in radians."""
    return constant_coupling(earth_rate * math.sin(latitude))


def coupling(profile: FieldProfile, t: float) -> tuple[float, float]:
    """Scalar (beta, beta') of a y-directed profile at time t."""
    s = profile.sample(t)
    return -float(s.beta[1]), -float(s.beta_dot[1])


def foucault_rhs(state: Osc2State, t: float, profile: FieldProfile, omega0: float) -> Osc2State:
    s = profile.sample(t)
    dy = np.empty(4)
    K.foucault_deriv(state.as_array(), s.beta, s.beta_dot, float(omega0), dy)
    return Osc2State.from_array(dy)


class FoucaultSystem(_System):
    code = K.SYSTEM_FOUCAULT
    name = "foucault"

    def pack(self, state) -> np.ndarray:
        if isinstance(state, Osc2State):
            return state.as_array()
        return np.array(state, dtype=float)

    def __call__(self, state: Osc2State, t: float) -> Osc2State:
        return foucault_rhs(state, t, self.profile, self.omega0)

    def jump(self, y, beta_before, beta_after):
        # the scalar coupling is -beta_y; the delta in its rate kicks v by (db x2, -db x1)
        db = beta_before[1] - beta_after[1]
        out = y.copy()
        out[2] += db * y[1]
        out[3] -= db * y[0]
        return out


def foucault_analytic(a: complex, b: complex, beta: float, omega0: float, t) -> Osc2State | np.ndarray:
    """Real part of a(1, i) e^{-i(omega0-beta)t} + b(1, -i) e^{-i(omega0+beta)t}.

    Scalar ``t`` gives an :class:`Osc2State`; array ``t`` gives an (n, 4)
    array of [x1, x2, v1, v2] rows.
    """
    tt = np.asarray(t, dtype=float)
    w_slow = omega0 - beta
    w_fast = omega0 + beta
    za = a * np.exp(-1j * w_slow * tt)
    zb = b * np.exp(-1j * w_fast * tt)
    x1 = za + zb
    x2 = 1j * za - 1j * zb
    v1 = -1j * w_slow * za - 1j * w_fast * zb
    v2 = w_slow * za - w_fast * zb
    out = np.stack([x1.real, x2.real, v1.real, v2.real], axis=-1)
    if out.ndim == 1:
        return Osc2State.from_array(out)
    return out


def lagrangian_L1(state: Osc2State, beta: float, omega0: float) -> float:
    p1 = state.v1 - beta * state.x2
    p2 = state.v2 + beta * state.x1
    return 0.5 * (p1 * p1 + p2 * p2 - omega0**2 * (state.x1**2 + state.x2**2))


def jones_from_pendulum(state: Osc2State, beta: float, omega0: float) -> Spinor:
    """Recover (a, b) from the real parts and their derivatives: a = x1 + i p1/omega0."""
    p1 = state.v1 - beta * state.x2
    p2 = state.v2 + beta * state.x1
    return Spinor(complex(state.x1, p1 / omega0), complex(state.x2, p2 / omega0))


def pendulum_natural_frequency(beta: float, omega0: float) -> float:
    """Natural frequency of the Foucault pendulum equivalent to constant beta."""
    return math.sqrt(omega0 * omega0 - beta * beta)


def mode_frequencies(beta: float, omega0: float) -> np.ndarray:
    """Positive normal-mode frequencies for constant beta, from the 4x4 first-order system."""
    k = omega0 * omega0 - beta * beta
    A = np.array(
        [
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [-k, 0.0, 0.0, 2.0 * beta],
            [0.0, -k, -2.0 * beta, 0.0],
        ]
    )
    lam = np.linalg.eigvals(A)
    return np.sort(lam.imag[lam.imag > 0])


def solution_matrix(profile: FieldProfile, omega0: float, t_sample: float = 1.0,
                    dt: float = 1e-3) -> np.ndarray:
    """Columns: phase-space points (x1, x2, v1, v2) at ``t_sample`` of Re z1, Re z2, Im z1, Im z2.

    z1 and z2 solve the spinor equation from (1, 0) and (0, 1); derivatives
    come from the equation itself, not from differencing.
    """
    cols = []
    for start in (Spinor(1.0, 0.0), Spinor(0.0, 1.0)):
        traj = integrate(SpinorSystem(profile, omega0), start, 0.0, t_sample, dt)
        chi = traj.chi[-1]
        s = profile.sample(traj.t[-1])
        d = np.empty(4)
        K.spinor_deriv(traj.y[-1], s.beta, float(omega0), d)
        chi_dot = d[0::2] + 1j * d[1::2]
        z = np.concatenate([chi, chi_dot])
        cols.append(z.real)
        cols.append(z.imag)
    return np.array(cols).T[:, [0, 2, 1, 3]]


def numerical_rank(m: np.ndarray, rtol: float = 1e-8) -> int:
    sv = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(sv > rtol * sv[0]))


def span_rank_check(profile: FieldProfile, omega0: float, t_sample: float = 1.0,
                    dt: float = 1e-3) -> int:
    """Rank of the real span of Re/Im parts of two independent spinor solutions."""
    return numerical_rank(solution_matrix(profile, omega0, t_sample, dt))
