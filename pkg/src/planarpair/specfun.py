"""Special functions used by the scattering and monopole code.

Complex log-gamma (Lanczos + reflection), integer-order Bessel functions of
the first kind, and Jacobi polynomials with arbitrary real parameters.
Everything here is a pure function of its arguments.
"""

import cmath
import math

import numpy as np

from .errors import DomainError, PoleError

# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_LOG_PI = math.log(math.pi)

POLE_TOL = 1e-14


def _check_pole(z):
    if z.real <= POLE_TOL and abs(z.imag) <= POLE_TOL:
        n = round(z.real)
        if abs(z - n) <= POLE_TOL:
            raise PoleError(f"log_gamma: {z!r} is a pole of the gamma function")


def _log_gamma_right(z):
    # valid for Re z >= 1/2
    z = z - 1.0
    x = _LANCZOS_COEF[0]
    for i in range(1, len(_LANCZOS_COEF)):
        x += _LANCZOS_COEF[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(x)


def log_gamma(z):
    """Principal branch of log Gamma(z).

    The branch cut runs along the negative real axis, so ``log_gamma(z).imag``
    varies continuously along any path that avoids it.  Accurate to roughly
    1e-13 (absolute) for ``|z| <= 50``.
    """
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"log_gamma: non-finite argument {z!r}")
    _check_pole(z)
    if z.real >= 0.5:
        return _log_gamma_right(z)
    # reflection; the floor term puts the result on the principal branch
    shift = math.copysign(2.0 * math.pi, z.imag) * math.floor(0.5 * z.real + 0.25)
    return (complex(_LOG_PI, shift) - cmath.log(cmath.sin(math.pi * z))
            - _log_gamma_right(1.0 - z))


def gamma(z):
    return cmath.exp(log_gamma(z))


def arg_gamma(z):
    """Imaginary part of :func:`log_gamma` (not reduced modulo 2*pi)."""
    return log_gamma(z).imag


# -- Bessel functions -------------------------------------------------------

_ASYMPTOTIC_X = 30.0
_BIG = 1e250


def _bessel_hankel_asymptotic(nu, x):
    mu = 4.0 * nu * nu
    p = 0.0
    q = 0.0
    term = 1.0
    prev = math.inf
    for k in range(0, 200):
        if k > 0:
            term *= (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        if abs(term) > prev:
            break
        prev = abs(term)
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2 == 0:
            p += sign * term
        else:
            q += sign * term
        if abs(term) < 1e-17:
            break
    omega = x - 0.5 * nu * math.pi - 0.25 * math.pi
    return math.sqrt(2.0 / (math.pi * x)) * (p * math.cos(omega) - q * math.sin(omega))


def _bessel_miller(n, x):
    # downward recurrence normalised with J0 + 2 sum J_{2k} = 1
    top = max(n, int(x))
    start = top + 30 + int(math.sqrt(60.0 * top))
    start += start % 2
    j_next = 0.0
    j_cur = 1e-300
    total = 0.0
    result = 0.0
    for m in range(start, 0, -1):
        j_prev = (2.0 * m / x) * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        if abs(j_cur) > _BIG:
            j_cur /= _BIG
            j_next /= _BIG
            total /= _BIG
            result /= _BIG
        if m - 1 == n:
            result = j_cur
        if (m - 1) % 2 == 0 and m - 1 > 0:
            total += 2.0 * j_cur
    total += j_cur
    return result / total


def bessel_j(order, x):
    """Bessel function of the first kind J_order(x), integer order >= 0, x >= 0."""
    if order < 0 or int(order) != order:
        raise DomainError(f"bessel_j: order must be a nonnegative integer, got {order!r}")
    if x < 0:
        raise DomainError(f"bessel_j: negative argument {x!r}")
    n = int(order)
    x = float(x)
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    if x <= _ASYMPTOTIC_X or n > x:
        return _bessel_miller(n, x)
    j0 = _bessel_hankel_asymptotic(0, x)
    if n == 0:
        return j0
    j1 = _bessel_hankel_asymptotic(1, x)
    # upward recurrence is stable while the order stays below x
    for m in range(1, n):
        j0, j1 = j1, (2.0 * m / x) * j1 - j0
    return j1


def bessel_j_array(order, x):
    return np.array([bessel_j(order, xi) for xi in np.ravel(x)]).reshape(np.shape(x))


# -- Jacobi polynomials -----------------------------------------------------

def _gen_binom(a, j):
    out = 1.0
    for i in range(j):
        out *= (a - i) / (i + 1)
    return out


def jacobi_p_sum(n, alpha, beta, x):
    """P_n^(alpha,beta)(x) from the explicit finite sum.

    Valid for every real alpha and beta, including the negative integers
    where the three-term recurrence breaks down.
    """
    lo = 0.5 * (x - 1.0)
    hi = 0.5 * (x + 1.0)
    total = 0.0
    for s in range(n + 1):
        total += (_gen_binom(n + alpha, n - s) * _gen_binom(n + beta, s)
                  * lo ** s * hi ** (n - s))
    return total


def jacobi_p(n, alpha, beta, x):
    """Jacobi polynomial P_n^(alpha,beta)(x) by three-term recurrence."""
    if n < 0 or int(n) != n:
        raise DomainError(f"jacobi_p: degree must be a nonnegative integer, got {n!r}")
    n = int(n)
    if n == 0:
        return 1.0
    ab = alpha + beta
    p_prev = 1.0
    p_cur = (alpha + 1.0) + (ab + 2.0) * 0.5 * (x - 1.0)
    for m in range(2, n + 1):
        c = 2 * m + ab
        denom = 2.0 * m * (m + ab) * (c - 2.0)
        if abs(denom) < 1e-12:
            return jacobi_p_sum(n, alpha, beta, x)
        a1 = (c - 1.0) * (c * (c - 2.0) * x + alpha * alpha - beta * beta)
        a2 = 2.0 * (m + alpha - 1.0) * (m + beta - 1.0) * c
        p_prev, p_cur = p_cur, (a1 * p_cur - a2 * p_prev) / denom
    return p_cur
