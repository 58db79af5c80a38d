#!/usr/bin/env python3
"""Generate an antipodally symmetric spherical t-design by Levenberg-Marquardt.

Half of the points are free (colatitude, longitude); the other half are their
antipodes, so every odd-degree moment vanishes identically.  The residual is
the vector of even-degree moments sum_p Y_{k,l}(x_p), k = 2, 4, ..., t-1,
which is zero exactly when the equal-weight rule is exact to degree t.

Usage: make_symmetric_design.py T N OUT.csv
"""
import sys

import numpy as np
from scipy.optimize import least_squares


def legendre_table(theta, L):
    """Fully normalized associated Legendre functions, complex-step safe."""
    c, s = np.cos(theta), np.sin(theta)
    P = {}
    P[(0, 0)] = np.full_like(theta, np.sqrt(1.0 / (4 * np.pi)))
    for m in range(1, L + 1):
        P[(m, m)] = np.sqrt((2 * m + 1) / (2.0 * m)) * s * P[(m - 1, m - 1)]
    for m in range(0, L):
        P[(m + 1, m)] = np.sqrt(2 * m + 3.0) * c * P[(m, m)]
    for m in range(0, L + 1):
        for k in range(m + 2, L + 1):
            a = np.sqrt((4.0 * k * k - 1) / (k * k - m * m))
            b = np.sqrt(((k - 1.0) ** 2 - m * m) / (4.0 * (k - 1) ** 2 - 1))
            P[(k, m)] = a * (c * P[(k - 1, m)] - b * P[(k - 2, m)])
    return P


def even_moments_rows(theta, phi, t):
    degs = [k for k in range(2, t, 2)]
    P = legendre_table(theta, t)
    rows = []
    for k in degs:
        rows.append(P[(k, 0)])
        for m in range(1, k + 1):
            rows.append(np.sqrt(2.0) * P[(k, m)] * np.cos(m * phi))
            rows.append(np.sqrt(2.0) * P[(k, m)] * np.sin(m * phi))
    return np.array(rows)


def main():
    t, n, out = int(sys.argv[1]), int(sys.argv[2]), sys.argv[3]
    assert n % 2 == 0
    half = n // 2
    golden = (1 + 5 ** 0.5) / 2
    i = np.arange(half)
    z = 1 - (2 * i + 1) / n
    theta0 = np.arccos(z)
    phi0 = 2 * np.pi * i / golden
    x0 = np.concatenate([theta0, phi0])

    def resid(x):
        return even_moments_rows(x[:half], x[half:], t).sum(axis=1)

    def jac(x):
        h = 1e-30
        th, ph = x[:half], x[half:]
        jt = even_moments_rows(th + 1j * h, ph.astype(complex), t).imag / h
        jp = even_moments_rows(th.astype(complex), ph + 1j * h, t).imag / h
        return np.hstack([jt, jp])

    r0 = np.linalg.norm(resid(x0))
    sol = least_squares(resid, x0, jac=jac, method="trf", xtol=1e-15,
                        ftol=1e-15, gtol=1e-15, max_nfev=2000)
    r = np.linalg.norm(sol.fun)
    print(f"residual {r0:.3e} -> {r:.3e} after {sol.nfev} evaluations",
          file=sys.stderr)
    th, ph = sol.x[:half], sol.x[half:]
    pts = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph),
                    np.cos(th)], axis=1)
    pts = np.vstack([pts, -pts])
    with open(out, "w") as f:
        f.write("x0,x1,x2\n")
        for p in pts:
            f.write(f"{p[0]:.17g},{p[1]:.17g},{p[2]:.17g}\n")


if __name__ == "__main__":
    main()
