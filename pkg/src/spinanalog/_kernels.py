"""Hot loops: field evaluation, right-hand sides and the fixed-step RK4 driver.

Everything here is written in scalar style so the same source runs under
``numba.njit`` and, with numba disabled, as ordinary Python.

State layouts (all float64):
    oscillator  y = [x1, x2, x3, x4, v1, v2, v3, v4]
    spinor      y = [Re chi+, Im chi+, Re chi-, Im chi-]
    foucault    y = [x1, x2, v1, v2]
"""
import math

import numpy as np

from ._jit import jit

FIELD_CONSTANT = 0
FIELD_ROTATING = 1
FIELD_RAMP = 2
FIELD_SINUSOID = 3
FIELD_PIECEWISE = 4

SYSTEM_OSCILLATOR = 0
SYSTEM_SPINOR = 1
SYSTEM_FOUCAULT = 2


@jit
def field_at(kind, params, t, t_seg, beta, beta_dot):
    """Fill ``beta`` and ``beta_dot`` in place.

    ``t_seg`` only matters for piecewise profiles: it selects the segment,
    so an RK4 step can stay on one side of a jump.
    """
    if kind == FIELD_CONSTANT:
        for i in range(3):
            beta[i] = params[i]
            beta_dot[i] = 0.0
    elif kind == FIELD_ROTATING:
        # params: static(3), amp*e1(3), amp*e2(3), rate, phase
        rate = params[9]
        ph = rate * t + params[10]
        c = math.cos(ph)
        s = math.sin(ph)
        for i in range(3):
            beta[i] = params[i] + c * params[3 + i] + s * params[6 + i]
            beta_dot[i] = rate * (c * params[6 + i] - s * params[3 + i])
    elif kind == FIELD_RAMP:
        # params: start(3), slope(3)
        for i in range(3):
            beta[i] = params[i] + params[3 + i] * t
            beta_dot[i] = params[3 + i]
    elif kind == FIELD_SINUSOID:
        # params: offset(3), amplitude(3), rate, phase
        rate = params[6]
        ph = rate * t + params[7]
        c = math.cos(ph)
        s = math.sin(ph)
        for i in range(3):
            beta[i] = params[i] + params[3 + i] * s
            beta_dot[i] = params[3 + i] * rate * c
    else:
        # params: n_jumps, jump times (n), segment values (n + 1) * 3
        n = int(params[0])
        seg = 0
        while seg < n and t_seg >= params[1 + seg]:
            seg += 1
        base = 1 + n + 3 * seg
        for i in range(3):
            beta[i] = params[base + i]
            beta_dot[i] = 0.0


@jit
def coupling_apply(bx, by, bz, x0, x1, x2, x3):
    """Return B(beta) x as a 4-tuple, B the antisymmetric coupling matrix."""
    return (
        -bz * x1 + by * x2 - bx * x3,
        bz * x0 + bx * x2 + by * x3,
        -by * x0 - bx * x1 + bz * x3,
        bx * x0 - by * x1 - bz * x2,
    )


@jit
def oscillator_deriv(y, beta, beta_dot, omega0, dy):
    bx = beta[0]
    by = beta[1]
    bz = beta[2]
    bv = coupling_apply(bx, by, bz, y[4], y[5], y[6], y[7])
    bdx = coupling_apply(beta_dot[0], beta_dot[1], beta_dot[2], y[0], y[1], y[2], y[3])
    # B^2 = -|beta|^2 I
    k = bx * bx + by * by + bz * bz - omega0 * omega0
    for i in range(4):
        dy[i] = y[4 + i]
        dy[4 + i] = -2.0 * bv[i] - bdx[i] + k * y[i]


@jit
def spinor_deriv(y, beta, omega0, dy):
    bx = beta[0]
    by = beta[1]
    bz = beta[2]
    a = y[0]
    b = y[1]
    c = y[2]
    d = y[3]
    # h = (omega0 + beta . sigma) chi ; chi_dot = -i h
    hp_re = (omega0 + bz) * a + bx * c + by * d
    hp_im = (omega0 + bz) * b + bx * d - by * c
    hm_re = bx * a - by * b + (omega0 - bz) * c
    hm_im = bx * b + by * a + (omega0 - bz) * d
    dy[0] = hp_im
    dy[1] = -hp_re
    dy[2] = hm_im
    dy[3] = -hm_re


@jit
def foucault_deriv(y, beta, beta_dot, omega0, dy):
    # two-oscillator coupling is minus the y component of the 3-vector field
    b = -beta[1]
    bd = -beta_dot[1]
    k = omega0 * omega0 - b * b
    dy[0] = y[2]
    dy[1] = y[3]
    dy[2] = 2.0 * b * y[3] + bd * y[1] - k * y[0]
    dy[3] = -2.0 * b * y[2] - bd * y[0] - k * y[1]


@jit
def deriv(system, y, t, t_seg, omega0, kind, params, beta, beta_dot, dy):
    field_at(kind, params, t, t_seg, beta, beta_dot)
    if system == SYSTEM_OSCILLATOR:
        oscillator_deriv(y, beta, beta_dot, omega0, dy)
    elif system == SYSTEM_SPINOR:
        spinor_deriv(y, beta, omega0, dy)
    else:
        foucault_deriv(y, beta, beta_dot, omega0, dy)


@jit
def rk4(system, y0, t0, h, n_steps, omega0, kind, params):
    """Classical RK4 over ``n_steps`` steps of size ``h``.

    Returns ``(samples, bad)`` where ``samples`` has shape (n_steps + 1, m)
    and ``bad`` is -1, or the index of the first non-finite sample.
    """
    m = y0.shape[0]
    out = np.empty((n_steps + 1, m))
    y = y0.copy()
    tmp = np.empty(m)
    k1 = np.empty(m)
    k2 = np.empty(m)
    k3 = np.empty(m)
    k4 = np.empty(m)
    beta = np.empty(3)
    beta_dot = np.empty(3)
    for i in range(m):
        out[0, i] = y[i]
    half = 0.5 * h
    sixth = h / 6.0
    for step in range(n_steps):
        t = t0 + step * h
        t_mid = t + half
        deriv(system, y, t, t_mid, omega0, kind, params, beta, beta_dot, k1)
        for i in range(m):
            tmp[i] = y[i] + half * k1[i]
        deriv(system, tmp, t_mid, t_mid, omega0, kind, params, beta, beta_dot, k2)
        for i in range(m):
            tmp[i] = y[i] + half * k2[i]
        deriv(system, tmp, t_mid, t_mid, omega0, kind, params, beta, beta_dot, k3)
        for i in range(m):
            tmp[i] = y[i] + h * k3[i]
        deriv(system, tmp, t + h, t_mid, omega0, kind, params, beta, beta_dot, k4)
        finite = True
        for i in range(m):
            y[i] += sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            out[step + 1, i] = y[i]
            if not math.isfinite(y[i]):
                finite = False
        if not finite:
            return out, step + 1
    return out, -1


@jit
def field_series(kind, params, ts):
    """beta and beta_dot at every time in ``ts`` (jumps taken right-continuous)."""
    n = ts.shape[0]
    betas = np.empty((n, 3))
    dots = np.empty((n, 3))
    beta = np.empty(3)
    beta_dot = np.empty(3)
    for j in range(n):
        field_at(kind, params, ts[j], ts[j], beta, beta_dot)
        for i in range(3):
            betas[j, i] = beta[i]
            dots[j, i] = beta_dot[i]
    return betas, dots
