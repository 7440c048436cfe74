"""Compare the compiled RK4 kernels against the pure-numpy fallback.

The fallback runs in a child process with SPINANALOG_DISABLE_NUMBA=1, since
the switch is read at import time. Rates are integrator steps per second.

    python3 benchmarks/bench_kernels.py [--steps N] [--fallback-steps N] [--repeat R]
"""
import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

W0 = 10.0
DT = 1e-3


def _cases():
    from spinanalog import fields, foucault
    from spinanalog import dynamics as D
    from spinanalog.quaternion import Spinor

    rot = fields.rotating([0, 0, 1], 0.3, 1.1, static=0.5)
    x0 = D.OscState([1.0, 0.2, -0.4, 0.3], [0.0, 9.0, 1.0, -2.0])
    return {
        "oscillator/constant": (D.OscillatorSystem(fields.constant([0.1, -0.2, 0.5]), W0), x0),
        "oscillator/rotating": (D.OscillatorSystem(rot, W0), x0),
        "spinor/rotating": (D.SpinorSystem(rot, W0), Spinor(0.6, 0.8j)),
        "foucault/sinusoidal": (foucault.FoucaultSystem(foucault.sinusoidal_coupling(0.3, 0.1, 0.7), W0),
                                [1.0, 0.0, 0.0, 9.7]),
    }


def measure(steps: int, repeat: int) -> dict:
    """Best-of-``repeat`` steps/s per case in the current process."""
    from spinanalog import NUMBA_ENABLED
    from spinanalog.dynamics import integrate

    out = {"numba": NUMBA_ENABLED, "steps": steps, "rates": {}}
    for name, (system, init) in _cases().items():
        integrate(system, init, 0.0, 10 * DT, DT)  # compile / warm caches
        best = np.inf
        for _ in range(repeat):
            t = time.perf_counter()
            integrate(system, init, 0.0, steps * DT, DT)
            best = min(best, time.perf_counter() - t)
        out["rates"][name] = steps / best
    return out


def _child(steps: int, repeat: int) -> dict:
    env = dict(os.environ, SPINANALOG_DISABLE_NUMBA="1")
    cmd = [sys.executable, __file__, "--child", "--steps", str(steps), "--repeat", str(repeat)]
    res = subprocess.run(cmd, env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=200_000, help="steps per compiled run")
    ap.add_argument("--fallback-steps", type=int, default=5_000, help="steps per fallback run")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args(argv)

    if args.child:
        print(json.dumps(measure(args.steps, args.repeat)))
        return 0

    fast = measure(args.steps, args.repeat)
    slow = _child(args.fallback_steps, args.repeat)
    if not fast["numba"]:
        print("numba unavailable or disabled here; both columns are the fallback")
    print(f"{'case':<22}{'numba steps/s':>16}{'numpy steps/s':>16}{'speedup':>10}")
    for name, rate in fast["rates"].items():
        other = slow["rates"][name]
        print(f"{name:<22}{rate:>16.3e}{other:>16.3e}{rate / other:>9.0f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
