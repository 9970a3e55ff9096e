"""Compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Each kernel runs on identical inputs under both backends; the table lists the
best wall time, the speed-up and the largest relative difference in output.
"""

import argparse
import math
import timeit

import numpy as np

from symheun import _pykernels
from symheun.core import CanonicalParams
from symheun.odeint import linear_form
from symheun.series import _rows

try:
    from symheun import _kernels
except ImportError:
    raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation` first") from None


def cases():
    p = CanonicalParams(0.9, (0.4, 1.1 + 0.2j, 0.7, 0.3 - 0.1j), 0.6 - 0.3j)
    N = 20000
    rows = _rows(p, N, "oracle")
    coeffs = _pykernels.recurrence(rows, 1.0 + 0j, 0.3j, 2000)
    z = 0.8 * np.exp(2j * math.pi * np.linspace(0, 1, 500, endpoint=False))
    f = linear_form(p)
    ode = (np.array(f.spts, dtype=complex), np.array(f.A, dtype=complex), np.array(f.num, dtype=complex),
           np.array(f.droots, dtype=complex), complex(f.lead),
           np.array([0, 0.8, 0.8 + 0.9j, -0.5 + 1.6j, -1.8], dtype=complex), 1.0 + 0j, 0.3j, 1e-12, 1e-13, 10**7)
    return {
        f"recurrence (N={N})": ("recurrence", (rows, 1.0 + 0j, 0.3j, N), lambda out: out),
        "horner_d2 (2000 terms x 500 points)": ("horner_d2", (coeffs, z), lambda out: out[0]),
        "integrate_polyline (4 legs, tol 1e-12)": ("integrate_polyline", ode, lambda out: out[0]),
    }


def best(fn, args, repeat):
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"{'kernel':42s} {'python [s]':>11s} {'cython [s]':>11s} {'speed-up':>9s} {'max rel diff':>13s}")
    for label, (name, call, pick) in cases().items():
        py, cy = getattr(_pykernels, name), getattr(_kernels, name)
        a, b = np.asarray(pick(py(*call))), np.asarray(pick(cy(*call)))
        diff = float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(a))))
        tp, tc = best(py, call, args.repeat), best(cy, call, args.repeat)
        print(f"{label:42s} {tp:11.4f} {tc:11.4f} {tp / tc:8.1f}x {diff:13.1e}")


if __name__ == "__main__":
    main()
