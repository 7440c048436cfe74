"""Physical diagnostics computed from oscillator states and spinors (hbar = 1)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import (
    OscillatorSystem,
    OscState,
    SpinorSystem,
    Trajectory,
    build_coupling_matrix,
    canonical_momentum,
    eigenspinors,
    integrate,
)
from .errors import BadAxis, DegenerateGeometry, DegenerateSpinor, TooShort
from .fields import FieldProfile, _perp_basis
from .mapping import spinor_to_oscillator_init
from .quaternion import ONE, Quat, Spinor


@dataclass(frozen=True)
class SpinVector:
    sx: float
    sy: float
    sz: float

    def as_array(self) -> np.ndarray:
        return np.array([self.sx, self.sy, self.sz])

    def norm(self) -> float:
        return math.sqrt(self.sx**2 + self.sy**2 + self.sz**2)


def _unit_axis(axis) -> np.ndarray:
    e = np.asarray(axis, dtype=float)
    if e.shape != (3,) or abs(np.linalg.norm(e) - 1.0) > 1e-12:
        raise BadAxis(f"axis must be a unit 3-vector, got {axis!r}")
    return e


def spin_expectation(state: OscState, beta_for_p, axis, omega0: float):
    """<S . e> = -p . B(e) x / (2 omega0), with p = v + B(beta) x.

    Works on a single state or row-wise on stacked (n, 4) states.
    """
    e = _unit_axis(axis)
    p = canonical_momentum(state, beta_for_p)
    bex = state.x @ build_coupling_matrix(e).T
    return -np.sum(p * bex, axis=-1) / (2.0 * omega0)


def spin_vector_from_oscillator(state: OscState, beta_for_p, omega0: float) -> np.ndarray:
    """All three components of <S>; shape (3,) or (n, 3)."""
    return np.stack(
        [spin_expectation(state, beta_for_p, e, omega0) for e in np.eye(3)], axis=-1
    )


def bloch_path(chi: np.ndarray) -> np.ndarray:
    """<sigma>/2 for each row of a complex (n, 2) array, after normalizing."""
    chi = np.asarray(chi, dtype=complex)
    n2 = np.sum(np.abs(chi) ** 2, axis=-1)
    cross = np.conj(chi[..., 0]) * chi[..., 1]
    vec = np.stack(
        [2.0 * cross.real, 2.0 * cross.imag, np.abs(chi[..., 0]) ** 2 - np.abs(chi[..., 1]) ** 2],
        axis=-1,
    )
    return 0.5 * vec / n2[..., None]


def bloch_vector(s: Spinor) -> SpinVector:
    if math.sqrt(s.norm2()) <= 1e-12:
        raise DegenerateSpinor("spinor norm below 1e-12")
    return SpinVector(*(float(c) for c in bloch_path(s.as_array())))


# --------------------------------------------------------------------------
# spectra


@dataclass(frozen=True)
class SpectrumEstimate:
    peaks: np.ndarray  # rad/time, ascending
    amplitudes: np.ndarray
    resolution: float  # 2*pi / window length
    window: str


_WINDOWS = {"hann": np.hanning, "boxcar": np.ones}
# highest sidelobe is ~0.027 (hann) and ~0.22 (boxcar) of the mainlobe
_MIN_HEIGHT = {"hann": 0.05, "boxcar": 0.3}


def frequency_split(traj: Trajectory, component: int = 0, window: str = "auto",
                    max_peaks: int = 2, min_relative_height: float | None = None,
                    pad_factor: int = 4) -> SpectrumEstimate:
    """Dominant spectral peaks of one real component of a constant-field run.

    Windowed FFT (zero padded by ``pad_factor``) with a parabola through the
    log-magnitude of each local maximum and its two neighbours. ``"auto"``
    uses a Hann window and falls back to a rectangular one when the Hann
    main lobe (four bins wide) swallows a neighbouring peak.
    """
    if window == "auto":
        est = frequency_split(traj, component, "hann", max_peaks, min_relative_height, pad_factor)
        if len(est.peaks) >= max_peaks:
            return est
        return frequency_split(traj, component, "boxcar", max_peaks, min_relative_height, pad_factor)
    if window not in _WINDOWS:
        raise ValueError(f"window must be 'auto' or one of {sorted(_WINDOWS)}")
    if traj.profile is not None and traj.profile.kind != "constant":
        raise ValueError("frequency_split needs a constant-field trajectory")
    span = float(traj.t[-1] - traj.t[0])
    if traj.omega0:
        need = 20 * 2 * math.pi / traj.omega0
        if span < need:
            raise TooShort(f"run spans {span:.4g}, need at least {need:.4g} (20 carrier periods)")
    sig = np.asarray(traj.y[:, component], dtype=float)
    n = len(sig)
    sig = (sig - sig.mean()) * _WINDOWS[window](n)
    nfft = 1 << int(math.ceil(math.log2(n * pad_factor)))
    mag = np.abs(np.fft.rfft(sig, nfft))
    dw = 2 * math.pi / (nfft * traj.dt)

    thresh = (min_relative_height if min_relative_height is not None else _MIN_HEIGHT[window]) * mag.max()
    inner = mag[1:-1]
    idx = np.nonzero((inner > mag[:-2]) & (inner >= mag[2:]) & (inner >= thresh))[0] + 1
    idx = idx[np.argsort(mag[idx])[::-1]][:max_peaks]

    freqs, amps = [], []
    for k in idx:
        la, lb, lc = np.log(mag[k - 1 : k + 2])
        denom = la - 2 * lb + lc
        delta = 0.5 * (la - lc) / denom if denom != 0 else 0.0
        freqs.append((k + delta) * dw)
        amps.append(math.exp(lb - 0.25 * (la - lc) * delta))
    order = np.argsort(freqs)
    return SpectrumEstimate(
        np.asarray(freqs)[order], np.asarray(amps)[order], 2 * math.pi / (n * traj.dt), window
    )


# --------------------------------------------------------------------------
# geometric phase and precession


@dataclass(frozen=True)
class GeometricPhaseResult:
    phase_residual: float  # max |chi(T) e^{i omega0 T} - (-1)^n chi(0)|
    position_residual: float  # max |x(T) - (-1)^n x(0)|, carrier not removed
    velocity_residual: float
    period: float
    revolutions: int


def _constant_beta(profile: FieldProfile) -> np.ndarray:
    if profile.kind != "constant":
        raise ValueError("a constant field profile is required")
    beta = profile.sample(0.0).beta
    if not np.linalg.norm(beta) > 0:
        raise ValueError("the field must be non-zero")
    return beta


def geometric_phase_check(profile: FieldProfile, s0: Spinor, omega0: float, dt: float = 1e-4,
                          revolutions: int = 1, u: Quat = ONE) -> GeometricPhaseResult:
    """Evolve for ``revolutions`` full turns of the Bloch vector (T = n pi/|beta|).

    Each turn should flip the sign of the spinor once the rest-mass carrier
    is divided out. The oscillators started from q = u s0 are integrated
    alongside; their residual is only small when omega0 T is a multiple of 2 pi.
    """
    beta = _constant_beta(profile)
    b = float(np.linalg.norm(beta))
    T = revolutions * math.pi / b
    sign = (-1.0) ** revolutions

    spin = integrate(SpinorSystem(profile, omega0), s0, 0.0, T, dt)
    chi = spin.chi
    phase_res = float(np.max(np.abs(chi[-1] * np.exp(1j * omega0 * T) - sign * chi[0])))

    osc0 = spinor_to_oscillator_init(s0, u, beta, omega0)
    osc = integrate(OscillatorSystem(profile, omega0), osc0, 0.0, T, dt)
    pos_res = float(np.max(np.abs(osc.x[-1] - sign * osc.x[0])))
    vel_res = float(np.max(np.abs(osc.v[-1] - sign * osc.v[0])))
    return GeometricPhaseResult(phase_res, pos_res, vel_res, T, revolutions)


def _azimuth(vectors: np.ndarray, axis: np.ndarray) -> np.ndarray:
    e1, e2 = _perp_basis(axis)
    return np.unwrap(np.arctan2(vectors @ e2, vectors @ e1))


def precession_rate(traj: Trajectory, axis) -> float:
    """Least-squares rate of the Bloch vector's azimuth about ``axis`` (signed, rad/time)."""
    n = np.asarray(axis, dtype=float)
    n = n / np.linalg.norm(n)
    bloch = bloch_path(traj.chi)
    b0 = bloch[0] / np.linalg.norm(bloch[0])
    tilt = math.acos(max(-1.0, min(1.0, float(np.dot(b0, n)))))
    if tilt < 1e-6 or math.pi - tilt < 1e-6:
        raise DegenerateGeometry("initial Bloch vector lies along the field axis")
    return float(np.polyfit(traj.t, _azimuth(bloch, n), 1)[0])


def eigenphase_rates(traj: Trajectory, axis, omega0: float) -> tuple[float, float]:
    """Phase rates of the two energy-eigenstate amplitudes, carrier removed.

    For a field |beta| along ``axis`` these are (-|beta|, +|beta|).
    """
    e_plus, e_minus = eigenspinors(np.asarray(axis, dtype=float))
    carrier = np.exp(1j * omega0 * traj.t)
    rates = []
    for e in (e_plus, e_minus):
        c = (traj.chi @ np.conj(e)) * carrier
        if np.min(np.abs(c)) < 1e-9:
            raise DegenerateGeometry("state has no weight on one of the eigenstates")
        rates.append(float(np.polyfit(traj.t, np.unwrap(np.angle(c)), 1)[0]))
    return rates[0], rates[1]
