"""Planar Coulomb scattering in the reduced two-electron problem.

Closed forms (phase shifts, Jost functions, S-matrix, amplitudes) plus an
independent radial ODE solver used as an oracle.

Conventions.  The radial equation is

    R'' + R'/rho + (k^2 - 1/rho - L^2/rho^2) R = 0,

so u = sqrt(rho) R obeys u'' = -(k^2 - 1/rho + (1/4 - L^2)/rho^2) u.  This is
the 3D Coulomb radial equation with angular momentum l = L - 1/2 and
Sommerfeld parameter eta = 1/(2k).  Hence the asymptotic phase is

    k rho - (1/(2k)) log(2 k rho) - L pi/2 - pi/4 + delta,

measured from the free (Bessel) wave, with delta = arg Gamma(L + 1/2 + i/(2k)).
"""

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, ForwardSingularityError, NonConvergenceError, ParityError
from .specfun import arg_gamma, log_gamma

FORWARD_WINDOW = 0.05
MATCH_RADII = (400.0, 800.0)   # in units of 1/k
ODE_RTOL = 1e-12
ORACLE_TOL = 1e-7
REDUCTION_ORDER = 10
_LOG_MAX = math.log(np.finfo(float).max)


def _check_k(k):
    if not (k > 0 and math.isfinite(k)):
        raise DomainError(f"wavenumber must be positive and finite, got {k!r}")


@dataclass(frozen=True)
class Channel:
    S: int
    helicity: int
    k: float

    def __post_init__(self):
        if self.S not in (0, 1):
            raise DomainError(f"total spin must be 0 or 1, got {self.S!r}")
        if int(self.helicity) != self.helicity:
            raise DomainError(f"helicity must be an integer, got {self.helicity!r}")
        if (int(self.helicity) - self.S) % 2:
            raise ParityError(f"helicity {self.helicity} and spin {self.S} differ in parity")
        _check_k(self.k)

    @property
    def phase_shift(self):
        return phase_shift(self.helicity, self.k)


# -- closed forms -----------------------------------------------------------

def phase_shift(helicity, k):
    """delta = arg Gamma(|L| + 1/2 + i/(2k)), on the branch that vanishes as k -> inf."""
    _check_k(k)
    return arg_gamma(complex(abs(helicity) + 0.5, 0.5 / k))


def phase_shift_sweep(helicity, ks):
    """Phase shifts along a k sweep, unwrapped and pinned to delta -> 0 at large k."""
    ks = np.asarray(ks, dtype=float)
    order = np.argsort(ks)[::-1]
    vals = np.array([phase_shift(helicity, k) for k in ks[order]])
    vals = np.unwrap(vals)
    # the largest k sits closest to the k -> inf limit; put it on the branch nearest 0
    vals -= 2.0 * math.pi * round(vals[0] / (2.0 * math.pi)) if vals.size else 0.0
    out = np.empty_like(vals)
    out[order] = vals
    return out


@dataclass
class PhaseShiftTable:
    helicities: np.ndarray
    ks: np.ndarray
    values: np.ndarray   # shape (len(helicities), len(ks)), radians

    @classmethod
    def compute(cls, helicities, ks):
        helicities = np.asarray(helicities)
        ks = np.asarray(ks, dtype=float)
        values = np.array([phase_shift_sweep(lam, ks) for lam in helicities])
        return cls(helicities, ks, values)

    def rows(self):
        for i, lam in enumerate(self.helicities):
            for j, k in enumerate(self.ks):
                yield int(lam), float(k), float(self.values[i, j])


def log_jost_function(sign, helicity, k):
    _check_k(k)
    if sign not in (1, -1):
        raise DomainError(f"sign must be +1 or -1, got {sign!r}")
    lam = abs(helicity)
    # log(-+ 2ik) on the principal branch
    log_pow = complex(math.log(2.0 * k), -sign * 0.5 * math.pi)
    return (math.pi / (4.0 * k) + (0.5 - lam) * log_pow + log_gamma(2.0 * lam + 1.0)
            - log_gamma(complex(lam + 0.5, sign * 0.5 / k)))


def jost_function(sign, helicity, k):
    """Jost function f^(+-)(k) = W[F^(+-), u] for the regular solution u = rho^(L+1/2)(1 + ...).

    Evaluated in log space; raises OverflowError if the modulus is not representable.
    """
    log_f = log_jost_function(sign, helicity, k)
    if log_f.real > _LOG_MAX:
        raise OverflowError(f"|f^({'+' if sign > 0 else '-'})| overflows for L={helicity}, k={k}")
    return cmath.exp(log_f)


def s_matrix(helicity, k):
    """S = exp(i pi l) f^(-)/f^(+) with l = L - 1/2; equals exp(2i delta)."""
    lam = abs(helicity)
    log_ratio = log_jost_function(-1, lam, k) - log_jost_function(1, lam, k)
    return cmath.exp(log_ratio + 1j * math.pi * (lam - 0.5))


def partial_amplitude(helicity, k, delta=None):
    _check_k(k)
    if delta is None:
        delta = phase_shift(helicity, k)
    return cmath.exp(-0.25j * math.pi) / math.sqrt(2.0 * math.pi * k) * (cmath.exp(2j * delta) - 1.0)


def normalization(helicity, k, coulomb=True):
    """Complex N such that N R equals exp(i delta) times the Bessel-normalised wave."""
    _check_k(k)
    lam = abs(helicity)
    eta = 0.5 / k if coulomb else 0.0
    log_n = (-0.5 * math.pi * eta + lam * math.log(2.0 * k)
             + log_gamma(complex(lam + 0.5, eta))
             - 0.5 * math.log(math.pi) - math.lgamma(2.0 * lam + 1.0))
    return cmath.exp(log_n)


# -- amplitudes -------------------------------------------------------------

@dataclass
class AmplitudeSeries:
    """Bloch series f_S(phi) = exp(iS phi) sum_n c_n exp(2in phi), c_n = f_{|2n+S|}.

    The sum is evaluated in reduced form: multiplying by (1 - w)^m, w = exp(2i phi),
    turns the slowly decaying Coulomb coefficients into m-th differences, which
    fall off like n^-m.  The series is truncated after the reduction and the
    factor divided out again; this is exact away from phi = 0 mod pi.
    ``reduction=0`` gives the plain truncated sum.
    """
    S: int
    k: float
    n_max: int
    reduction: int = REDUCTION_ORDER
    right_handed_only: bool = False
    deltas: dict = field(default=None, repr=False)
    coefficients: np.ndarray = field(init=False, repr=False)
    reduced: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.S not in (0, 1):
            raise DomainError(f"total spin must be 0 or 1, got {self.S!r}")
        if self.n_max < 1:
            raise DomainError(f"n_max must be >= 1, got {self.n_max!r}")
        if self.reduction < 0:
            raise DomainError("reduction order must be nonnegative")
        _check_k(self.k)
        m = self.reduction
        ns = np.arange(-self.n_max - m, self.n_max + 1)
        coef = np.array([self._coef(n) for n in ns])
        self.coefficients = coef[m:]
        # d_n = sum_j (-1)^j C(m, j) c_{n-j} for |n| <= n_max
        red = np.zeros(2 * self.n_max + 1, dtype=complex)
        for j in range(m + 1):
            red += (-1) ** j * math.comb(m, j) * coef[m - j:m - j + 2 * self.n_max + 1]
        self.reduced = red

    def _coef(self, n):
        if self.right_handed_only and n < 0:
            return 0j
        lam = abs(2 * n + self.S)
        delta = None if self.deltas is None else self.deltas.get(lam, 0.0)
        return partial_amplitude(lam, self.k, delta)

    def __call__(self, phi):
        phi = float(phi)
        # reduce modulo pi exactly so that the Bloch phase is applied as an exact sign
        turns = math.floor(phi / math.pi)
        base = phi - turns * math.pi
        if base >= math.pi:
            base -= math.pi
            turns += 1
        if base < FORWARD_WINDOW or base > math.pi - FORWARD_WINDOW:
            raise ForwardSingularityError(
                f"phi={phi} lies within {FORWARD_WINDOW} of the forward/backward direction")
        ns = np.arange(-self.n_max, self.n_max + 1)
        w = cmath.exp(2j * base)
        total = np.sum(self.reduced * np.exp(2j * ns * base)) / (1.0 - w) ** self.reduction
        value = cmath.exp(1j * self.S * base) * total
        return -value if (self.S and turns % 2) else value


def full_amplitude(S, k, phi, n_max=64, reduction=REDUCTION_ORDER, right_handed_only=False):
    series = AmplitudeSeries(S, k, n_max, reduction, right_handed_only)
    if np.ndim(phi) == 0:
        return series(phi)
    return np.array([series(p) for p in np.ravel(phi)]).reshape(np.shape(phi))


def diff_cross_section(S, k, phi, n_max=64, **kw):
    """dsigma/dOmega = |f_S(k, phi)|^4 (fourth power, as in the two-step construction)."""
    return np.abs(full_amplitude(S, k, phi, n_max, **kw)) ** 4


# -- radial ODE oracle --------------------------------------------------------

def coulomb_asymptotic(L, eta, x, tol=1e-17, max_terms=400):
    """Coulomb functions F, G and their x-derivatives from the asymptotic series.

    Phase reference x - eta log 2x - L pi/2, i.e. without the Coulomb phase
    sigma_L.  Accurate to machine precision for x of several hundred.
    """
    f, g, fs, gs = 1.0, 0.0, 0.0, 1.0 - eta / x
    f_sum, g_sum, fs_sum, gs_sum = f, g, fs, gs
    ll = L * (L + 1.0)
    prev = math.inf
    for n in range(max_terms):
        a = (2 * n + 1) * eta / ((2 * n + 2) * x)
        b = (ll - n * (n + 1) + eta * eta) / ((2 * n + 2) * x)
        f1 = a * f - b * g
        g1 = a * g + b * f
        fs1 = a * fs - b * gs - f1 / x
        gs1 = a * gs + b * fs - g1 / x
        size = abs(f1) + abs(g1) + abs(fs1) + abs(gs1)
        if size > prev:   # asymptotic series started to diverge
            break
        f, g, fs, gs = f1, g1, fs1, gs1
        f_sum += f
        g_sum += g
        fs_sum += fs
        gs_sum += gs
        prev = size
        if size < tol:
            break
    theta = x - eta * math.log(2.0 * x) - 0.5 * L * math.pi
    c, s = math.cos(theta), math.sin(theta)
    return (g_sum * c + f_sum * s, f_sum * c - g_sum * s,
            gs_sum * c + fs_sum * s, fs_sum * c - gs_sum * s)


def _rhs(k, helicity, coulomb):
    q = 0.25 - helicity * helicity
    c = 1.0 if coulomb else 0.0

    def rhs(rho, y):
        return [y[1], -(k * k - c / rho + q / (rho * rho)) * y[0]]
    return rhs


def _frobenius(helicity, k, rho, coulomb=True, n_terms=200):
    """R = rho^L sum a_n rho^n with a_0 = 1; returns (u, u') of u = sqrt(rho) R."""
    c = 1.0 if coulomb else 0.0
    lam = helicity
    a_prev2, a_prev = 0.0, 1.0
    s = 1.0
    ds = lam + 0.5
    power = 1.0
    for n in range(1, n_terms):
        a = (c * a_prev - k * k * a_prev2) / (n * (n + 2.0 * lam))
        power *= rho
        term = a * power
        s += term
        ds += (n + lam + 0.5) * term
        a_prev2, a_prev = a_prev, a
        if abs(term) < 1e-18 * abs(s) and abs(a_prev2 * power) < 1e-18 * abs(s):
            break
    else:
        raise NonConvergenceError("regular-solution series did not converge")
    base = rho ** (lam + 0.5)
    return base * s, base * ds / rho


def _start_radius(k):
    return min(0.05, 0.05 / k)


def _solve_regular(helicity, k, rho_eval, coulomb=True, rtol=ODE_RTOL):
    """(u, u') of the regular solution at increasing radii rho_eval >= start radius."""
    lam = abs(helicity)
    rho0 = _start_radius(k)
    u0, du0 = _frobenius(lam, k, rho0, coulomb)
    scale = u0
    sol = solve_ivp(_rhs(k, lam, coulomb), (rho0, float(rho_eval[-1])),
                    [1.0, du0 / scale], method="DOP853", rtol=rtol, atol=1e-30,
                    t_eval=rho_eval)
    if not sol.success:
        raise NonConvergenceError(f"radial integration failed: {sol.message}")
    return sol.y[0] * scale, sol.y[1] * scale


def _match_phase(u, du, helicity, k, rho, coulomb):
    """delta and amplitude A with u = A (cos delta F0 + sin delta G0)."""
    eta = 0.5 / k if coulomb else 0.0
    F, G, dF, dG = coulomb_asymptotic(abs(helicity) - 0.5, eta, k * rho)
    dF *= k
    dG *= k
    a_cos = -(u * dG - du * G) / k      # W[F, G] = -k in rho
    a_sin = (u * dF - du * F) / k
    return math.atan2(a_sin, a_cos), math.hypot(a_sin, a_cos)


def _mod_pi_distance(a, b):
    d = (a - b) % math.pi
    return min(d, math.pi - d)


def radial_oracle(helicity, k, coulomb=True, tol=ORACLE_TOL, return_amplitude=False):
    """Phase shift (mod pi) from direct integration of the radial equation.

    The regular solution is started from its convergent power series, carried
    out to k rho = 800, and matched to Coulomb functions at k rho = 400 and 800.
    """
    _check_k(k)
    if abs(helicity) > 10:
        raise DomainError("radial_oracle supports |L| <= 10")
    radii = np.array(MATCH_RADII) / k
    u, du = _solve_regular(helicity, k, radii, coulomb)
    fits = [_match_phase(u[i], du[i], helicity, k, radii[i], coulomb) for i in range(2)]
    if _mod_pi_distance(fits[0][0], fits[1][0]) > tol:
        raise NonConvergenceError(
            f"phase shift differs between matching radii: {fits[0][0]} vs {fits[1][0]}")
    delta = fits[1][0] % math.pi
    if return_amplitude:
        # sign of A follows the branch chosen for delta
        amp = fits[1][1] if abs(delta - fits[1][0]) < 1e-12 else -fits[1][1]
        return delta, amp
    return delta


def regular_wave(helicity, k, rho, coulomb=True):
    """Physical regular wave |N| R(rho), normalised to sqrt(2/(pi k rho)) asymptotically.

    With the Coulomb term off this is exactly J_L(k rho).
    """
    _check_k(k)
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    if np.any(rho <= 0):
        raise DomainError("regular_wave requires rho > 0")
    lam = abs(helicity)
    norm = abs(normalization(lam, k, coulomb))
    out = np.empty_like(rho)
    rho0 = _start_radius(k)
    inner = rho <= rho0
    for i in np.flatnonzero(inner):
        out[i] = _frobenius(lam, k, rho[i], coulomb)[0] / math.sqrt(rho[i])
    if np.any(~inner):
        outer = np.flatnonzero(~inner)
        order = outer[np.argsort(rho[outer])]
        u, _ = _solve_regular(lam, k, rho[order], coulomb)
        out[order] = u / np.sqrt(rho[order])
    return norm * out


def jost_solutions(helicity, k, rho, coulomb=True, rtol=ODE_RTOL):
    """Numerical Jost solutions F^(+-) and derivatives at radius rho.

    Seeded at k rho = 800 from F^(+-) -> exp(+-i(k rho - eta log 2k rho)) (with
    the asymptotic-series corrections) and integrated inward.
    Returns ((F+, F+'), (F-, F-')).
    """
    _check_k(k)
    lam = abs(helicity)
    eta = 0.5 / k if coulomb else 0.0
    L = lam - 0.5
    rho_far = MATCH_RADII[1] / k
    F, G, dF, dG = coulomb_asymptotic(L, eta, k * rho_far)
    out = []
    for sign in (1, -1):
        shift = cmath.exp(sign * 0.5j * math.pi * L)
        y0 = [shift * (G + sign * 1j * F), shift * k * (dG + sign * 1j * dF)]
        sol = solve_ivp(_rhs(k, lam, coulomb), (rho_far, float(rho)), np.array(y0, dtype=complex),
                        method="DOP853", rtol=rtol, atol=1e-30)
        if not sol.success:
            raise NonConvergenceError(f"Jost integration failed: {sol.message}")
        out.append((sol.y[0, -1], sol.y[1, -1]))
    return tuple(out)


def wronskian(a, b):
    """W[a, b] = a b' - a' b for (value, derivative) pairs."""
    return a[0] * b[1] - a[1] * b[0]


def jost_function_numeric(sign, helicity, k, rho=None, coulomb=True):
    """W[F^(+-), u] from numerically integrated Jost and regular solutions."""
    lam = abs(helicity)
    if rho is None:
        rho = max(_start_radius(k), min(1.0, 1.0 / k))
    plus, minus = jost_solutions(lam, k, rho, coulomb)
    u = _solve_regular(lam, k, np.array([rho]), coulomb)
    reg = (u[0][0], u[1][0])
    return wronskian(plus if sign > 0 else minus, reg)
