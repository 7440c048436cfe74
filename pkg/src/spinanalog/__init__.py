"""Four coupled classical oscillators and their spin-1/2 quantum counterpart.

A normalized spinor s and a unit quaternion u fix oscillator initial
conditions q = u s; the oscillators then track the spinor equation for any
field beta(t), and s = u* q recovers the spinor.
"""
from ._jit import NUMBA_ENABLED
from .dynamics import (
    OscillatorSystem,
    OscState,
    SpinorSystem,
    Trajectory,
    analytic_oscillator,
    analytic_spinor,
    build_coupling_matrix,
    canonical_momentum,
    integrate,
    lagrangian_L2,
    oscillator_rhs,
    spe_rhs,
)
from .errors import *  # noqa: F401,F403
from .fields import FieldProfile, FieldSample
from .mapping import (
    ModeCoefficients,
    check_quantum_constraint,
    decompose_modes,
    extract_spinor,
    spinor_to_oscillator_init,
)
from .quaternion import ONE, Quat, Spinor, beta_to_quat, quat_to_spinor_u, spinor_to_quat

__version__ = "0.1.0"
