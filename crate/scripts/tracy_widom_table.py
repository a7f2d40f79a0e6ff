#!/usr/bin/env python3
"""Generate the Tracy-Widom GUE (beta = 2) CDF table shipped in data/.

F2(s) = det(I - K_Ai) on L^2(s, inf), with the Airy kernel
K(x, y) = (Ai(x) Ai'(y) - Ai'(x) Ai(y)) / (x - y), evaluated by Gauss-Legendre
Nystrom discretisation (Bornemann, Math. Comp. 79 (2010) 871-915).
The half-line is truncated to [s, s + 16]; the kernel is below 1e-40 beyond.

Usage: python3 scripts/tracy_widom_table.py > data/tracy_widom_gue.txt
"""
import numpy as np
from scipy.special import airy

NODES = 96
S_MIN, S_MAX, STEP = -8.0, 5.0, 0.02
TRUNCATION = 16.0


def f2(s):
    x, w = np.polynomial.legendre.leggauss(NODES)
    x = s + (x + 1.0) * TRUNCATION / 2.0
    w = w * TRUNCATION / 2.0
    ai, aip, _, _ = airy(x)
    dx = x[:, None] - x[None, :]
    np.fill_diagonal(dx, 1.0)
    k = (ai[:, None] * aip[None, :] - aip[:, None] * ai[None, :]) / dx
    np.fill_diagonal(k, aip * aip - x * ai * ai)
    sw = np.sqrt(w)
    m = np.eye(NODES) - sw[:, None] * k * sw[None, :]
    return np.linalg.det(m)


def main():
    grid = np.round(np.arange(S_MIN, S_MAX + STEP / 2, STEP), 10)
    vals = np.array([f2(s) for s in grid])
    vals = np.clip(vals, 0.0, 1.0)
    vals = np.maximum.accumulate(vals)
    dens = np.gradient(vals, grid)
    mean = np.trapezoid(grid * dens, grid)
    var = np.trapezoid(grid * grid * dens, grid) - mean * mean
    print("# Tracy-Widom GUE (beta = 2) cumulative distribution function F2(s).")
    print("# Generated by scripts/tracy_widom_table.py: Gauss-Legendre Nystrom")
    print(f"# discretisation of det(I - K_Airy) on [s, s + {TRUNCATION:g}], {NODES} nodes.")
    print(f"# Grid: s = {S_MIN:g} .. {S_MAX:g}, step {STEP:g}.")
    print(f"# Table moments (trapezoid): mean = {mean:.6f}, variance = {var:.6f}")
    print("# Reference moments: mean = -1.771087, variance = 0.813195")
    print("# columns: s cdf")
    for s, v in zip(grid, vals):
        print(f"{s:.2f} {v:.17e}")


if __name__ == "__main__":
    main()
