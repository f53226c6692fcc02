"""Wu-Yang monopole structure on the momentum sphere.

Sign conventions
----------------
The patch potentials are

    x^N = (L/p) (cos t - 1)/sin t  e_phi      (regular for t < pi)
    x^S = (L/p) (cos t + 1)/sin t  e_phi      (regular for t > 0)

with field strength F = curl x = -L/p^2 p_hat.  Wave functions couple through
the covariant derivative ``grad - i x``, which makes

    l^2 = -1/sin^2 t [sin t d_t(sin t d_t) + (d_phi + i L (1 - cos t))^2] + L^2
    l_z = -i d_phi + L

the angular-momentum operators on the north patch.  The harmonics returned by
:func:`harmonic` are the eigenfunctions of exactly these operators, and the
two patches are related by ``Y^S = exp(2 i L phi) Y^N``.  In this convention the
doublet  {-sin(t/2) e^{i phi}, cos(t/2)}  carries helicity -1/2; its complex
conjugate partners carry +1/2.

The holonomy of a closed loop is ``berry_phase = oint x = -L * Omega`` where
Omega is the solid angle enclosed counter-clockwise as seen from outside.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import (DomainError, OpenLoopError, PatchDomainError,
                     PoleCrossingError, PoleSingularityError)
from .specfun import jacobi_p

OVERLAP_EPS = 0.2
POLE_GUARD = 1e-8


class Patch(enum.Enum):
    NORTH = "north"
    SOUTH = "south"

    def contains(self, theta, eps=OVERLAP_EPS):
        if self is Patch.NORTH:
            return 0.0 <= theta < 0.5 * (math.pi + eps)
        return 0.5 * (math.pi - eps) < theta <= math.pi


def _is_half_integer(x, tol=1e-12):
    return abs(2.0 * x - round(2.0 * x)) < tol


@dataclass(frozen=True)
class MonopoleState:
    l: float
    m: float
    helicity: float

    def __post_init__(self):
        l, m, h = self.l, self.m, self.helicity
        if not (_is_half_integer(l) and _is_half_integer(m) and _is_half_integer(h)):
            raise DomainError(f"quantum numbers must be multiples of 1/2: {self}")
        if l < abs(h) - 1e-12 or abs(m) > l + 1e-12:
            raise DomainError(f"need l >= |helicity| and |m| <= l: {self}")
        if not (_is_integer(l - abs(h)) and _is_integer(l - abs(m))):
            raise DomainError(f"l, m and helicity must share integrality: {self}")


def _is_integer(x, tol=1e-12):
    return abs(x - round(x)) < tol


@dataclass(frozen=True)
class SphericalPoint:
    theta: float
    phi: float
    p: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise DomainError(f"polar angle out of range: {self.theta}")
        if self.p <= 0:
            raise DomainError(f"radius must be positive: {self.p}")

    @classmethod
    def from_cartesian(cls, vec):
        x, y, z = (float(c) for c in vec)
        p = math.sqrt(x * x + y * y + z * z)
        theta = math.acos(max(-1.0, min(1.0, z / p)))
        return cls(theta, math.atan2(y, x) % (2.0 * math.pi), p)

    def unit(self):
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi),
                         math.cos(self.theta)])

    def cartesian(self):
        return self.p * self.unit()


# -- harmonics --------------------------------------------------------------

def _falling(x, n):
    out = 1.0
    for i in range(n):
        out *= x - i
    return out


def normalization(l, m, helicity):
    """Positive constant giving unit L2 norm over the sphere."""
    fact = math.factorial
    num = (2 * l + 1) * fact(round(l - m)) * fact(round(l + m))
    den = 4.0 * math.pi * fact(round(l - helicity)) * fact(round(l + helicity))
    return 2.0 ** m * math.sqrt(num / den)


def _theta_part(l, m, h, theta):
    """(1-z)^{(h-m)/2} (1+z)^{-(h+m)/2} P_{l+m}^{(h-m, -h-m)}(z), z = cos theta.

    Negative powers are cancelled analytically against the polynomial's
    zeros at z = +-1, so the value is finite on both poles.
    """
    n = round(l + m)
    alpha = h - m
    beta = -h - m
    s = math.sin(0.5 * theta)
    c = math.cos(0.5 * theta)
    z = math.cos(theta)
    coef = 1.0
    pow_s = alpha          # exponent of sin(t/2), using 1 - z = 2 sin^2(t/2)
    pow_c = beta           # exponent of cos(t/2), using 1 + z = 2 cos^2(t/2)
    pre = 2.0 ** (0.5 * (alpha + beta))
    if alpha < 0:
        a = round(-alpha)
        # P_n^(-a,b)(x) = (n+b)_a/(n)_a ((x-1)/2)^a P_{n-a}^(a,b)(x), falling factorials;
        # (x-1)/2 = -sin^2(t/2)
        coef *= _falling(n + beta, a) / _falling(n, a) * (-1.0) ** a
        pow_s += 2 * a
        n -= a
        alpha = float(a)
    if beta < 0:
        b = round(-beta)
        coef *= _falling(n + alpha, b) / _falling(n, b)
        pow_c += 2 * b
        n -= b
        beta = float(b)
    poly = jacobi_p(n, alpha, beta, z)
    return pre * coef * s ** pow_s * c ** pow_c * poly


def _theta_part_raw(l, m, h, theta):
    # direct product form; singular on the poles, used only as a cross-check
    z = math.cos(theta)
    n = round(l + m)
    return ((1.0 - z) ** (0.5 * (h - m)) * (1.0 + z) ** (-0.5 * (h + m))
            * jacobi_p(n, h - m, -h - m, z))


def _reference_sign(l, m, h):
    ref = _theta_part(l, m, h, 0.5 * math.pi)
    return -1.0 if ref < -1e-14 else 1.0


def harmonic(state, pt, patch=Patch.NORTH):
    """Monopole harmonic Y_{l m L}(theta, phi) on the requested patch.

    Normalised to unit L2 norm on the sphere, with the phase fixed so that
    the north-patch value at (theta, phi) = (pi/2, 0) is real and >= 0.
    """
    patch = Patch(patch)
    if not patch.contains(pt.theta):
        raise PatchDomainError(f"theta={pt.theta} outside the {patch.value} patch")
    l, m, h = state.l, state.m, state.helicity
    amp = (normalization(l, m, h) * _reference_sign(l, m, h)
           * _theta_part(l, m, h, pt.theta))
    phase = (m - h) * pt.phi
    if patch is Patch.SOUTH:
        phase += 2.0 * h * pt.phi
    return amp * complex(math.cos(phase), math.sin(phase))


def _harmonic_unchecked(state, theta, phi, patch):
    l, m, h = state.l, state.m, state.helicity
    amp = normalization(l, m, h) * _reference_sign(l, m, h) * _theta_part(l, m, h, theta)
    phase = (m - h + (2.0 * h if patch is Patch.SOUTH else 0.0)) * phi
    return amp * complex(math.cos(phase), math.sin(phase))


def _patch_shift(helicity, patch):
    # the covariant phi-derivative is d_phi + i*shift*L
    return helicity if patch is Patch.NORTH else -helicity


def l_squared_fd(state, theta, phi, patch=Patch.NORTH, h=1e-4):
    """Apply the l^2 operator to Y by central differences; returns (l^2 Y, Y)."""
    patch = Patch(patch)
    lam = state.helicity

    def y(t, f):
        return _harmonic_unchecked(state, t, f, patch)

    y0 = y(theta, phi)
    yt = (y(theta + h, phi) - y(theta - h, phi)) / (2 * h)
    ytt = (y(theta + h, phi) - 2 * y0 + y(theta - h, phi)) / (h * h)
    yf = (y(theta, phi + h) - y(theta, phi - h)) / (2 * h)
    yff = (y(theta, phi + h) - 2 * y0 + y(theta, phi - h)) / (h * h)
    s, c = math.sin(theta), math.cos(theta)
    if patch is Patch.NORTH:
        g = lam * (1.0 - c)
    else:
        g = -lam * (1.0 + c)
    cov2 = yff + 2j * g * yf - g * g * y0
    out = -(s * s * ytt + s * c * yt + cov2) / (s * s) + lam * lam * y0
    return out, y0


def lz_fd(state, theta, phi, patch=Patch.NORTH, h=1e-6):
    """Apply l_z = -i d_phi + shift to Y by central differences; returns (l_z Y, Y)."""
    patch = Patch(patch)
    y0 = _harmonic_unchecked(state, theta, phi, patch)
    yf = (_harmonic_unchecked(state, theta, phi + h, patch)
          - _harmonic_unchecked(state, theta, phi - h, patch)) / (2 * h)
    return -1j * yf + _patch_shift(state.helicity, patch) * y0, y0


# -- gauge potential and field ---------------------------------------------

def _azimuthal_unit(phi):
    return np.array([-math.sin(phi), math.cos(phi), 0.0])


def gauge_potential(pt, helicity, patch=Patch.NORTH):
    """Cartesian gauge potential of the given patch at ``pt``."""
    patch = Patch(patch)
    if patch is Patch.NORTH:
        if math.pi - pt.theta < POLE_GUARD:
            raise PoleSingularityError("north potential is singular at the south pole")
        comp = -math.tan(0.5 * pt.theta)          # (cos t - 1)/sin t
    else:
        if pt.theta < POLE_GUARD:
            raise PoleSingularityError("south potential is singular at the north pole")
        comp = 1.0 / math.tan(0.5 * pt.theta)     # (cos t + 1)/sin t
    return (helicity / pt.p) * comp * _azimuthal_unit(pt.phi)


def gauge_potential_cartesian(vec, helicity, patch=Patch.NORTH):
    return gauge_potential(SphericalPoint.from_cartesian(vec), helicity, patch)


def field_strength(pt, helicity):
    """Monopole field -L/p^2 p_hat."""
    if pt.p <= 0:
        raise DomainError("radius must be positive")
    return -(helicity / pt.p ** 2) * pt.unit()


def numerical_curl(func, vec, h=1e-5):
    """Central-difference curl of a vector field R^3 -> R^3."""
    vec = np.asarray(vec, dtype=float)
    jac = np.empty((3, 3))
    for j in range(3):
        dv = np.zeros(3)
        dv[j] = h
        jac[:, j] = (np.asarray(func(vec + dv)) - np.asarray(func(vec - dv))) / (2 * h)
    return np.array([jac[2, 1] - jac[1, 2], jac[0, 2] - jac[2, 0], jac[1, 0] - jac[0, 1]])


def sphere_flux(helicity, p=1.0, n_theta=64, n_phi=64):
    """Flux of the monopole field through a sphere, by Gauss-Legendre x trapezoid."""
    nodes, weights = np.polynomial.legendre.leggauss(n_theta)
    phis = np.linspace(0.0, 2.0 * math.pi, n_phi, endpoint=False)
    total = 0.0
    for z, w in zip(nodes, weights):
        theta = math.acos(z)
        for phi in phis:
            pt = SphericalPoint(theta, phi, p)
            total += w * float(field_strength(pt, helicity) @ pt.unit()) * p * p
    return total * 2.0 * math.pi / n_phi


def helicity_quantization_check(helicity, tol=1e-12):
    """True iff the total flux -4 pi L is an integer multiple of 2 pi."""
    n = -4.0 * math.pi * helicity / (2.0 * math.pi)
    return abs(n - round(n)) < tol


# -- holonomy --------------------------------------------------------------

def _as_unit(point):
    if isinstance(point, SphericalPoint):
        return point.unit()
    v = np.asarray(point, dtype=float)
    return v / np.linalg.norm(v)


def _slerp(a, b):
    omega = math.acos(max(-1.0, min(1.0, float(a @ b))))
    if omega < 1e-15:
        return None
    if math.pi - omega < 1e-12:
        raise DomainError("antipodal vertices do not define a unique geodesic edge")
    so = math.sin(omega)

    def pos_vel(t):
        pa = math.sin((1.0 - t) * omega) / so
        pb = math.sin(t * omega) / so
        va = -omega * math.cos((1.0 - t) * omega) / so
        vb = omega * math.cos(t * omega) / so
        return pa * a + pb * b, va * a + vb * b

    return pos_vel


def _edge_integral(a, b, helicity, patch):
    pos_vel = _slerp(a, b)
    if pos_vel is None:
        return 0.0
    sign = -1.0 if patch is Patch.NORTH else 1.0
    for q in (a, b):
        if (1.0 + q[2] if patch is Patch.NORTH else 1.0 - q[2]) < POLE_GUARD:
            raise PoleCrossingError(f"loop touches the pole excluded by the {patch.value} patch")

    def integrand(t):
        q, dq = pos_vel(t)
        denom = 1.0 + q[2] if patch is Patch.NORTH else 1.0 - q[2]
        if denom < POLE_GUARD:
            raise PoleCrossingError(f"loop passes through the pole excluded by the {patch.value} patch")
        return sign * helicity * (q[0] * dq[1] - q[1] * dq[0]) / denom

    val, _ = integrate.quad(integrand, 0.0, 1.0, epsabs=1e-13, epsrel=1e-12, limit=200)
    return val


def berry_phase(loop, helicity, patch=None):
    """Holonomy oint x of a closed geodesic polygon on the sphere, mod 2 pi.

    ``loop`` is a sequence of points (SphericalPoint or 3-vectors) whose first
    and last entries coincide.  With ``patch=None`` each edge uses the patch
    whose hemisphere holds the edge midpoint and transition terms
    ``+-2 L phi`` are added where the patch changes.
    """
    pts = [_as_unit(p) for p in loop]
    if len(pts) < 2 or np.linalg.norm(pts[0] - pts[-1]) > 1e-10:
        raise OpenLoopError("loop must be closed (first point == last point)")
    edges = list(zip(pts[:-1], pts[1:]))
    if patch is None:
        patches = []
        for a, b in edges:
            mid = a + b
            patches.append(Patch.NORTH if mid[2] >= 0 else Patch.SOUTH)
    else:
        patches = [Patch(patch)] * len(edges)
    total = 0.0
    for (a, b), pch in zip(edges, patches):
        total += _edge_integral(a, b, helicity, pch)
    if patch is None:
        for i in range(len(edges)):
            before, after = patches[i - 1], patches[i]
            if before is after:
                continue
            v = edges[i][0]
            if math.hypot(v[0], v[1]) < POLE_GUARD:
                raise PoleCrossingError("patch change at a pole")
            phi = math.atan2(v[1], v[0])
            # a south run from q1 to q2 overcounts by 2L(phi(q2) - phi(q1))
            total += (2.0 if before is Patch.NORTH else -2.0) * helicity * phi
    return total % (2.0 * math.pi)


def triangle_solid_angle(a, b, c):
    """Signed solid angle of a geodesic triangle via l'Huilier's theorem."""
    a, b, c = _as_unit(a), _as_unit(b), _as_unit(c)

    def arc(u, v):
        return math.atan2(np.linalg.norm(np.cross(u, v)), float(u @ v))

    ta, tb, tc = arc(b, c), arc(c, a), arc(a, b)
    s = 0.5 * (ta + tb + tc)
    prod = (math.tan(0.5 * s) * math.tan(0.5 * (s - ta))
            * math.tan(0.5 * (s - tb)) * math.tan(0.5 * (s - tc)))
    omega = 4.0 * math.atan(math.sqrt(max(prod, 0.0)))
    orient = float(a @ np.cross(b, c))
    return math.copysign(omega, orient) if orient != 0 else 0.0


def polygon_solid_angle(loop):
    """Signed solid angle of a closed geodesic polygon, fanned from its first vertex."""
    pts = [_as_unit(p) for p in loop]
    if np.linalg.norm(pts[0] - pts[-1]) < 1e-12:
        pts = pts[:-1]
    total = 0.0
    for i in range(1, len(pts) - 1):
        total += triangle_solid_angle(pts[0], pts[i], pts[i + 1])
    return total


def boost_triangle(p, v1, v2):
    """Directions of p, p - v1 and p - v1 - v2: the closed boost-composition loop."""
    p, v1, v2 = (np.asarray(x, dtype=float) for x in (p, v1, v2))
    verts = [p, p - v1, p - v1 - v2, p]
    return [v / np.linalg.norm(v) for v in verts]
