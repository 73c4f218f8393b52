"""Brute-force Gittins indices for tests/solver.rs.

Fixed grid of posterior means on [-8, 12], piecewise-linear values, and dense
Gaussian transition weights normalized per row. The horizon is long enough
that the commit-or-retire terminal value does not matter at the printed
precision. Independent of the library's moving-grid, exact-cubic scheme.

Run: python3 gittins_oracle.py > gittins.txt
"""
import math
import sys

import numpy as np


def index(gamma, ratio, forced, h, horizon):
    x = np.arange(-8.0, 12.0 + h / 2, h)
    prec = 1.0 / ratio

    def var(t):
        return 1.0 / (1.0 + t * prec)

    def value(lam):
        c = np.maximum(0.0, (x - lam) / (1 - gamma))
        for t in range(horizon - 1, forced - 1, -1):
            s = math.sqrt(prec * var(t) * var(t + 1))
            if s < h / 50:
                ec = c
            else:
                k = int(math.ceil(9 * s / h))
                offs = np.arange(-k, k + 1) * h
                w = np.exp(-0.5 * (offs / s) ** 2)
                w /= w.sum()
                pad = np.concatenate([np.zeros(k), c, (x[-1] - lam + offs[k + 1:]) / (1 - gamma)])
                ec = np.convolve(pad, w[::-1], mode="valid")
            c = np.maximum(0.0, x - lam + gamma * ec)
        s0 = math.sqrt(forced * prec * var(0) * var(forced))
        z = np.linspace(-9, 9, 4001)
        w = np.exp(-0.5 * z * z)
        w /= w.sum()
        ec = np.dot(w, np.interp(s0 * z, x, c))
        return (0.0 - lam) * (1 - gamma ** forced) / (1 - gamma) + gamma ** forced * ec

    lo, hi = 0.0, 4.0
    while hi - lo > 1e-7:
        mid = 0.5 * (lo + hi)
        if value(mid) >= 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


if __name__ == "__main__":
    h = float(sys.argv[1]) if len(sys.argv) > 1 else 0.0025
    for gamma, ratio, forced, horizon in [
        (0.9, 1.0, 2, 300),
        (0.9, 0.5, 2, 300),
        (0.9, 4.0, 2, 300),
        (0.9, 1.0, 1, 300),
        (0.7, 1.0, 2, 120),
        (0.95, 0.1, 2, 500),
        (0.99, 1.0, 2, 2500),
    ]:
        print("gittins", gamma, ratio, forced, repr(index(gamma, ratio, forced, h, horizon)), flush=True)
