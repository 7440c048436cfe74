"""Time-dependent coupling profiles beta(t) with analytic derivatives.

Units: hbar = 1 and beta is an angular frequency (rad/time). A magnetic
field converts via :func:`from_magnetic_field`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .errors import OutOfDomain

KINDS = {
    "constant": K.FIELD_CONSTANT,
    "rotating": K.FIELD_ROTATING,
    "linear_ramp": K.FIELD_RAMP,
    "sinusoidal": K.FIELD_SINUSOID,
    "piecewise_constant": K.FIELD_PIECEWISE,
}


@dataclass(frozen=True)
class FieldSample:
    beta: np.ndarray
    beta_dot: np.ndarray


@dataclass(frozen=True, eq=False)
class FieldProfile:
    """A coupling profile. Build with the module-level constructors."""

    kind: str
    params: np.ndarray
    spec: dict
    jump_times: tuple = ()
    domain: tuple = (-math.inf, math.inf)
    _bound: float = field(default=0.0, repr=False)

    @property
    def code(self) -> int:
        return KINDS[self.kind]

    @property
    def differentiable(self) -> bool:
        return self.kind != "piecewise_constant"

    def sample(self, t: float) -> FieldSample:
        return sample(self, t)

    def max_norm(self, t0: float, t1: float) -> float:
        """Upper bound on |beta(t)| over [t0, t1]."""
        if self.kind == "linear_ramp":
            b0 = self.params[:3] + self.params[3:6] * t0
            b1 = self.params[:3] + self.params[3:6] * t1
            return float(max(np.linalg.norm(b0), np.linalg.norm(b1)))
        if self.kind == "piecewise_constant":
            n = len(self.jump_times)
            vals = self.params[1 + n:].reshape(n + 1, 3)
            edges = (-math.inf,) + self.jump_times + (math.inf,)
            norms = [
                np.linalg.norm(vals[i])
                for i in range(n + 1)
                if edges[i + 1] > t0 and edges[i] <= t1
            ]
            return float(max(norms))
        return self._bound

    def to_dict(self) -> dict:
        return dict(self.spec)


def _vec3(v, name) -> np.ndarray:
    a = np.asarray(v, dtype=float)
    if a.shape != (3,) or not np.all(np.isfinite(a)):
        raise ValueError(f"{name} must be a finite 3-vector, got {v!r}")
    return a


def _domain(domain):
    if domain is None:
        return (-math.inf, math.inf)
    lo, hi = float(domain[0]), float(domain[1])
    if not lo < hi:
        raise ValueError(f"empty domain {domain!r}")
    return (lo, hi)


def constant(beta, domain=None) -> FieldProfile:
    b = _vec3(beta, "beta")
    return FieldProfile(
        "constant", b.copy(), {"kind": "constant", "beta": b.tolist()},
        domain=_domain(domain), _bound=float(np.linalg.norm(b)),
    )


def _perp_basis(n: np.ndarray):
    ref = np.array([1.0, 0.0, 0.0]) if abs(n[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = ref - np.dot(ref, n) * n
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(n, e1)


def rotating(axis, amplitude, rate, phase=0.0, static=0.0, domain=None) -> FieldProfile:
    """Transverse field of magnitude ``amplitude`` turning about ``axis``.

    beta(t) = static*n + amplitude*(cos(rate*t + phase) e1 + sin(rate*t + phase) e2)
    with (e1, e2, n) right-handed; for n = z, e1 = x and e2 = y.
    """
    n = _vec3(axis, "axis")
    norm = np.linalg.norm(n)
    if norm == 0.0:
        raise ValueError("rotation axis must be non-zero")
    n = n / norm
    e1, e2 = _perp_basis(n)
    params = np.concatenate([static * n, amplitude * e1, amplitude * e2, [rate, phase]])
    spec = {
        "kind": "rotating", "axis": n.tolist(), "amplitude": float(amplitude),
        "rate": float(rate), "phase": float(phase), "static": float(static),
    }
    return FieldProfile(
        "rotating", params, spec, domain=_domain(domain),
        _bound=math.hypot(static, amplitude),
    )


def linear_ramp(start, slope, domain=None) -> FieldProfile:
    """beta(t) = start + slope * t."""
    b0 = _vec3(start, "start")
    k = _vec3(slope, "slope")
    spec = {"kind": "linear_ramp", "start": b0.tolist(), "slope": k.tolist()}
    return FieldProfile("linear_ramp", np.concatenate([b0, k]), spec, domain=_domain(domain))


def sinusoidal(offset, amplitude, rate, phase=0.0, domain=None) -> FieldProfile:
    """beta(t) = offset + amplitude * sin(rate*t + phase), amplitude a 3-vector."""
    off = _vec3(offset, "offset")
    amp = _vec3(amplitude, "amplitude")
    spec = {
        "kind": "sinusoidal", "offset": off.tolist(), "amplitude": amp.tolist(),
        "rate": float(rate), "phase": float(phase),
    }
    return FieldProfile(
        "sinusoidal", np.concatenate([off, amp, [rate, phase]]), spec,
        domain=_domain(domain),
        _bound=float(np.linalg.norm(off) + np.linalg.norm(amp)),
    )


def piecewise_constant(times, values, domain=None) -> FieldProfile:
    """Right-continuous steps: ``values[i]`` holds on [times[i-1], times[i])."""
    ts = tuple(float(t) for t in times)
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise ValueError("jump times must be strictly increasing")
    vals = np.asarray(values, dtype=float)
    if vals.shape != (len(ts) + 1, 3):
        raise ValueError(f"need {len(ts) + 1} 3-vectors for {len(ts)} jumps, got shape {vals.shape}")
    params = np.concatenate([[float(len(ts))], ts, vals.ravel()])
    spec = {"kind": "piecewise_constant", "times": list(ts), "values": vals.tolist()}
    return FieldProfile("piecewise_constant", params, spec, jump_times=ts, domain=_domain(domain))


def from_dict(d: dict) -> FieldProfile:
    """Inverse of :meth:`FieldProfile.to_dict`; optional key ``domain``."""
    d = dict(d)
    kind = d.pop("kind", None)
    domain = d.pop("domain", None)
    builders = {
        "constant": constant,
        "rotating": rotating,
        "linear_ramp": linear_ramp,
        "sinusoidal": sinusoidal,
        "piecewise_constant": piecewise_constant,
    }
    if kind not in builders:
        raise ValueError(f"unknown field kind {kind!r}; expected one of {sorted(builders)}")
    return builders[kind](**d, domain=domain)


def sample(profile: FieldProfile, t: float) -> FieldSample:
    """beta(t) and its time derivative.

    Piecewise profiles report beta_dot = 0 everywhere, including at jumps,
    and take the value after the jump at a jump time.
    """
    t = float(t)
    if not math.isfinite(t):
        raise OutOfDomain(f"t = {t!r} is not finite")
    lo, hi = profile.domain
    if t < lo or t > hi:
        raise OutOfDomain(f"t = {t!r} outside [{lo}, {hi}]")
    beta = np.empty(3)
    beta_dot = np.empty(3)
    K.field_at(profile.code, profile.params, t, t, beta, beta_dot)
    return FieldSample(beta, beta_dot)


def sample_many(profile: FieldProfile, ts) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized :func:`sample`: (n, 3) arrays of beta and beta_dot."""
    ts = np.ascontiguousarray(ts, dtype=float)
    lo, hi = profile.domain
    if ts.size and (ts.min() < lo or ts.max() > hi or not np.all(np.isfinite(ts))):
        raise OutOfDomain(f"times leave [{lo}, {hi}]")
    return K.field_series(profile.code, profile.params, ts)


def from_magnetic_field(B, charge_to_mass: float) -> np.ndarray:
    """beta = B * (e/m) / 2, for a field in tesla and charge-to-mass in C/kg."""
    if not charge_to_mass > 0:
        raise ValueError("charge_to_mass must be positive")
    return np.asarray(B, dtype=float) * (0.5 * charge_to_mass)
