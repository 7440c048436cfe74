"""Equations of motion for the four coupled oscillators and the spinor.

The oscillators obey

    x'' + 2 B x' + B' x + B^2 x + omega0^2 x = 0,   p = x' + B x,

and the spinor obeys i chi' = (omega0 + beta . sigma) chi. Both are
integrated by the same fixed-step RK4 kernel (see ``_kernels``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import JumpNotOnGrid, NonFinite, NotNormalized, OutOfDomain, StepTooLarge
from .fields import FieldProfile
from .quaternion import Spinor

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


@dataclass(frozen=True, eq=False)
class OscState:
    """Positions ``x`` and velocities ``v``; shape (4,) or (n, 4)."""

    x: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.x, self.v], axis=-1)

    def __neg__(self) -> OscState:
        return OscState(-self.x, -self.v)


def build_coupling_matrix(beta) -> np.ndarray:
    bx, by, bz = (float(c) for c in beta)
    return np.array(
        [
            [0.0, -bz, by, -bx],
            [bz, 0.0, bx, by],
            [-by, -bx, 0.0, bz],
            [bx, -by, -bz, 0.0],
        ]
    )


def coupling_matrices(betas) -> np.ndarray:
    """Stack of coupling matrices, shape (n, 4, 4), for an (n, 3) array of fields."""
    bx, by, bz = np.asarray(betas, dtype=float).T
    z = np.zeros_like(bx)
    return np.stack(
        [
            np.stack([z, -bz, by, -bx], axis=-1),
            np.stack([bz, z, bx, by], axis=-1),
            np.stack([-by, -bx, z, bz], axis=-1),
            np.stack([bx, -by, -bz, z], axis=-1),
        ],
        axis=-2,
    )


def momentum_series(x: np.ndarray, v: np.ndarray, betas: np.ndarray) -> np.ndarray:
    """Row-wise p = v + B(beta_n) x_n for a time series with a varying field."""
    return v + np.einsum("nij,nj->ni", coupling_matrices(betas), x)


def canonical_momentum(state: OscState, beta) -> np.ndarray:
    """p = v + B(beta) x (works row-wise on stacked states)."""
    B = build_coupling_matrix(beta)
    return state.v + state.x @ B.T


def lagrangian_L2(state: OscState, beta, omega0: float):
    p = canonical_momentum(state, beta)
    return 0.5 * (np.sum(p * p, axis=-1) - omega0**2 * np.sum(state.x * state.x, axis=-1))


def _field_arrays(profile: FieldProfile, t: float):
    sample = profile.sample(t)
    return sample.beta, sample.beta_dot


def oscillator_rhs(state: OscState, t: float, profile: FieldProfile, omega0: float) -> OscState:
    """Time derivative (x', v') of a single oscillator state."""
    beta, beta_dot = _field_arrays(profile, t)
    dy = np.empty(8)
    K.oscillator_deriv(state.as_array(), beta, beta_dot, float(omega0), dy)
    return OscState(dy[:4], dy[4:])


def _spinor_to_real(s: Spinor) -> np.ndarray:
    return np.array([s.chi_plus.real, s.chi_plus.imag, s.chi_minus.real, s.chi_minus.imag], dtype=float)


def spe_rhs(s: Spinor, t: float, profile: FieldProfile, omega0: float) -> Spinor:
    """chi' = -i (omega0 I + beta . sigma) chi."""
    beta, _ = _field_arrays(profile, t)
    dy = np.empty(4)
    K.spinor_deriv(_spinor_to_real(s), beta, float(omega0), dy)
    return Spinor(complex(dy[0], dy[1]), complex(dy[2], dy[3]))


# --------------------------------------------------------------------------
# integration


@dataclass(frozen=True)
class _System:
    profile: FieldProfile
    omega0: float

    code = -1
    name = ""

    def pack(self, state) -> np.ndarray:
        raise NotImplementedError

    def max_rate(self, t0: float, t1: float) -> float:
        return self.omega0 + self.profile.max_norm(t0, t1)

    def jump(self, y: np.ndarray, beta_before: np.ndarray, beta_after: np.ndarray) -> np.ndarray:
        """State just after a step in beta; first-order systems are continuous."""
        return y


class OscillatorSystem(_System):
    code = K.SYSTEM_OSCILLATOR
    name = "oscillator"

    def pack(self, state: OscState) -> np.ndarray:
        return np.concatenate([state.x, state.v]).astype(float)

    def __call__(self, state: OscState, t: float) -> OscState:
        return oscillator_rhs(state, t, self.profile, self.omega0)

    def jump(self, y, beta_before, beta_after):
        # beta_dot is a delta at the step: p = v + Bx stays continuous
        out = y.copy()
        dB = build_coupling_matrix(beta_after) - build_coupling_matrix(beta_before)
        out[4:] -= dB @ y[:4]
        return out


class SpinorSystem(_System):
    code = K.SYSTEM_SPINOR
    name = "spinor"

    def pack(self, state: Spinor) -> np.ndarray:
        return _spinor_to_real(state)

    def __call__(self, state: Spinor, t: float) -> Spinor:
        return spe_rhs(state, t, self.profile, self.omega0)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Uniformly sampled solution; ``y`` rows follow the kernel layouts."""

    t: np.ndarray
    y: np.ndarray
    system: str
    dt: float
    omega0: float | None = None
    profile: FieldProfile | None = None

    def __len__(self) -> int:
        return len(self.t)

    @property
    def x(self) -> np.ndarray:
        half = self.y.shape[1] // 2
        return self.y[:, :half]

    @property
    def v(self) -> np.ndarray:
        half = self.y.shape[1] // 2
        return self.y[:, half:]

    @property
    def chi(self) -> np.ndarray:
        """Complex (n, 2) array of spinor amplitudes."""
        if self.system != "spinor":
            raise AttributeError("chi is only defined for spinor trajectories")
        return self.y[:, 0::2] + 1j * self.y[:, 1::2]

    def state(self, i: int):
        if self.system == "oscillator":
            return OscState(self.y[i, :4], self.y[i, 4:])
        if self.system == "spinor":
            c = self.chi[i]
            return Spinor(complex(c[0]), complex(c[1]))
        if self.system == "foucault":
            from .foucault import Osc2State

            return Osc2State(*self.y[i])
        return self.y[i]


def _n_steps(t0: float, t1: float, dt: float) -> tuple[int, float]:
    if not (math.isfinite(t0) and math.isfinite(t1)) or not t1 > t0:
        raise ValueError(f"need finite t1 > t0, got t0={t0!r}, t1={t1!r}")
    if not dt > 0:
        raise StepTooLarge(f"dt must be positive, got {dt!r}")
    n = max(1, int(math.ceil((t1 - t0) / dt - 1e-9)))
    return n, (t1 - t0) / n


def _jump_steps(profile: FieldProfile, t0: float, h: float, n: int) -> list:
    """(step index, beta before, beta after) for each jump strictly inside the run."""
    if not profile.jump_times:
        return []
    m = len(profile.jump_times)
    values = profile.params[1 + m:].reshape(m + 1, 3)
    out = []
    for i, tj in enumerate(profile.jump_times):
        k = int(round((tj - t0) / h))
        if 0 < k < n:
            out.append((k, values[i], values[i + 1]))
    return out


def max_step(omega0: float, beta_max: float) -> float:
    """Largest dt that still resolves the fastest carrier by 50 steps per period."""
    return 2.0 * math.pi / (50.0 * (omega0 + beta_max))


def integrate(rhs, initial, t0: float, t1: float, dt: float) -> Trajectory:
    """Fixed-step RK4 from ``t0`` to ``t1``.

    ``rhs`` is one of the system objects (:class:`OscillatorSystem`,
    :class:`SpinorSystem`, ``foucault.FoucaultSystem``), which run in the
    compiled kernel, or any callable ``f(y, t) -> dy`` on flat arrays. The
    step actually taken is (t1 - t0)/ceil((t1 - t0)/dt), never above ``dt``.

    Jumps of a piecewise profile must fall on the step grid. The run is
    split there and the system's ``jump`` map is applied: the oscillators
    keep x and the canonical momentum v + Bx, so v takes the kick that the
    delta in beta_dot would give.
    """
    n, h = _n_steps(float(t0), float(t1), float(dt))
    t = t0 + h * np.arange(n + 1)

    if not isinstance(rhs, _System):
        y = np.array(initial, dtype=float)
        out = np.empty((n + 1, y.size))
        out[0] = y
        for step in range(n):
            ts = t0 + step * h
            k1 = np.asarray(rhs(y, ts))
            k2 = np.asarray(rhs(y + 0.5 * h * k1, ts + 0.5 * h))
            k3 = np.asarray(rhs(y + 0.5 * h * k2, ts + 0.5 * h))
            k4 = np.asarray(rhs(y + h * k3, ts + h))
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if not np.all(np.isfinite(y)):
                raise NonFinite(f"state became non-finite at t = {ts + h!r}")
            out[step + 1] = y
        return Trajectory(t, out, "generic", h)

    profile = rhs.profile
    lo, hi = profile.domain
    if t0 < lo or t1 > hi:
        raise OutOfDomain(f"run [{t0}, {t1}] leaves profile domain [{lo}, {hi}]")
    limit = max_step(rhs.omega0, profile.max_norm(t0, t1))
    if dt > limit:
        raise StepTooLarge(f"dt = {dt!r} exceeds 2*pi/(50*(omega0 + |beta|max)) = {limit!r}")
    for tj in profile.jump_times:
        if t0 < tj < t1:
            k = (tj - t0) / h
            if abs(k - round(k)) > 1e-9 * max(1.0, k):
                raise JumpNotOnGrid(f"field jump at t = {tj!r} is not on the step grid (h = {h!r})")

    y = np.ascontiguousarray(rhs.pack(initial), dtype=float)
    out = np.empty((n + 1, y.size))
    out[0] = y
    start = 0
    for stop, before, after in _jump_steps(profile, t0, h, n) + [(n, None, None)]:
        if stop > start:
            seg, bad = K.rk4(rhs.code, y, float(t[start]), h, stop - start,
                             float(rhs.omega0), profile.code, profile.params)
            if bad >= 0:
                raise NonFinite(f"state became non-finite at t = {t[start + bad]!r}")
            out[start + 1:stop + 1] = seg[1:]
            y = seg[-1]
        if before is not None:
            y = np.ascontiguousarray(rhs.jump(y, before, after), dtype=float)
            out[stop] = y
        start = stop
    return Trajectory(t, out, rhs.name, h, float(rhs.omega0), profile)


# --------------------------------------------------------------------------
# constant-field closed forms


def field_angles(beta) -> tuple[float, float, float]:
    """(|beta|, theta, phi); beta = 0 gives theta = phi = 0, the south pole phi = 0."""
    bx, by, bz = (float(c) for c in beta)
    b = math.sqrt(bx * bx + by * by + bz * bz)
    if b == 0.0:
        return 0.0, 0.0, 0.0
    theta = math.acos(max(-1.0, min(1.0, bz / b)))
    phi = math.atan2(by, bx) if (bx != 0.0 or by != 0.0) else 0.0
    return b, theta, phi


def eigenspinors(beta) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvectors of beta_hat . sigma for eigenvalues +1 and -1."""
    _, th, ph = field_angles(beta)
    c, s, e = math.cos(th / 2), math.sin(th / 2), np.exp(1j * ph)
    return np.array([c, s * e]), np.array([s, -c * e])


def mode_vectors(beta) -> tuple[np.ndarray, np.ndarray]:
    """Complex 4-vectors of the a, b, c, d modes and the sign of their shift.

    Mode m oscillates as Re(coeff_m X_m exp(-i (omega0 + sign_m |beta|) t)).
    """
    _, th, ph = field_angles(beta)
    c, s, e = math.cos(th / 2), math.sin(th / 2), np.exp(1j * ph)
    y_minus = np.array([1.0, -1.0j]) / math.sqrt(2.0)
    y_plus = np.array([1.0, 1.0j]) / math.sqrt(2.0)
    X = np.stack(
        [
            np.concatenate([c * y_minus, s * e * y_minus]),
            np.concatenate([s * y_minus, -c * e * y_minus]),
            np.concatenate([-s * e * y_plus, c * y_plus]),
            np.concatenate([c * e * y_plus, s * y_plus]),
        ]
    )
    return X, np.array([1.0, -1.0, 1.0, -1.0])


def analytic_oscillator(coeffs, beta, omega0: float, t) -> OscState:
    """Closed-form constant-field solution for mode amplitudes (a, b, c, d).

    ``t`` may be a scalar or an array; array input gives (n, 4) fields.
    """
    coeffs = np.asarray(tuple(coeffs), dtype=complex)
    b = math.sqrt(float(np.dot(beta, beta)))
    X, sign = mode_vectors(beta)
    freqs = omega0 + sign * b
    tt = np.asarray(t, dtype=float)
    phase = np.exp(-1j * np.multiply.outer(tt, freqs))  # (..., 4 modes)
    z = (phase * coeffs) @ X
    zdot = (phase * coeffs * (-1j * freqs)) @ X
    return OscState(z.real, zdot.real)


def analytic_spinor(f: complex, g: complex, beta, omega0: float, t) -> np.ndarray:
    """Constant-field spinor including the exp(-i omega0 t) rest-mass phase.

    Returns complex amplitudes with shape (2,) or (n, 2).
    """
    if abs(abs(f) ** 2 + abs(g) ** 2 - 1.0) > 1e-9:
        raise NotNormalized(f"|f|^2 + |g|^2 = {abs(f) ** 2 + abs(g) ** 2!r}")
    b = math.sqrt(float(np.dot(beta, beta)))
    e_plus, e_minus = eigenspinors(beta)
    tt = np.asarray(t, dtype=float)
    up = np.exp(-1j * (omega0 + b) * tt)
    down = np.exp(-1j * (omega0 - b) * tt)
    return f * np.multiply.outer(up, e_plus) + g * np.multiply.outer(down, e_minus)


def eigenfrequencies(beta, omega0: float) -> np.ndarray:
    """Positive normal-mode frequencies of the constant-field oscillators, sorted."""
    B = build_coupling_matrix(beta)
    b2 = float(np.dot(beta, beta))
    A = np.zeros((8, 8))
    A[:4, 4:] = np.eye(4)
    A[4:, :4] = -(omega0**2 - b2) * np.eye(4)
    A[4:, 4:] = -2.0 * B
    lam = np.linalg.eigvals(A)
    return np.sort(lam.imag[lam.imag > 0])
