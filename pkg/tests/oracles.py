"""Independent reference implementations used only by the tests."""

import math

import numpy as np


def log_gamma_product(z, sizes=(10000, 20000, 40000, 80000)):
    """log Gamma(z) from the Gauss product, Richardson-extrapolated in 1/n.

    log Gamma(z) = lim  z log n + log n! - sum_{j=0}^{n} log(z + j).
    Valid for Re z > 0.
    """
    z = complex(z)
    vals = []
    for n in sizes:
        j = np.arange(n + 1)
        s = np.sum(np.log(z + j))
        vals.append(z * math.log(n) + math.lgamma(n + 1) - s)
    # errors are a power series in 1/n and each size doubles
    table = [vals]
    for level in range(1, len(vals)):
        prev = table[-1]
        fac = 2.0 ** level
        table.append([(fac * prev[i + 1] - prev[i]) / (fac - 1.0) for i in range(len(prev) - 1)])
    return table[-1][0]


def solid_angle_vos(a, b, c):
    """Van Oosterom-Strackee signed solid angle of a spherical triangle."""
    a, b, c = (np.asarray(v, float) / np.linalg.norm(v) for v in (a, b, c))
    num = np.dot(a, np.cross(b, c))
    den = 1.0 + np.dot(a, b) + np.dot(b, c) + np.dot(c, a)
    return 2.0 * math.atan2(num, den)
