"""Quasi-classical planar Kepler scattering for a repulsive 1/rho potential.

The default Hamiltonian is H = p^2/2 + 1/rho.  With it the vector
A = p x l + r_hat is conserved, |A| = e = sqrt(1 + k^2 l^2), and the orbit is
p/rho = -1 + e cos(phi) with p = l^2.  Passing ``kinetic=1.0`` switches to
H = p^2 + 1/rho for comparison; A is then not conserved.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, NonEscapeError, OriginError

KINETIC = 0.5
DEFAULT_TOL = 1e-10
START_FACTOR = 1e3


def _check_k(k):
    if not (k > 0 and math.isfinite(k)):
        raise DomainError(f"wavenumber must be positive, got {k!r}")


@dataclass(frozen=True)
class ConicOrbit:
    p: float
    e: float
    rho_min: float

    @property
    def angular_momentum(self):
        return math.sqrt(self.p)

    @property
    def phi_max(self):
        """Asymptotic polar angle; the orbit exists for |phi| < phi_max."""
        return math.acos(1.0 / self.e)

    def radius(self, phi):
        return self.p / (self.e * np.cos(phi) - 1.0)

    def sample(self, n=101, margin=1e-3):
        """Polar samples (phi, rho) strictly inside the asymptotes."""
        lim = self.phi_max * (1.0 - margin)
        phi = np.linspace(-lim, lim, n)
        return phi, self.radius(phi)

    def state(self, phi):
        """Cartesian position and momentum (H = p^2/2 + 1/rho) at polar angle phi.

        The apse lies on the +x axis and the motion is counterclockwise.
        """
        phi = np.asarray(phi, dtype=float)
        rho = self.radius(phi)
        l = self.angular_momentum
        p_rho = self.e * np.sin(phi) / l
        p_phi = l / rho
        c, s = np.cos(phi), np.sin(phi)
        r = np.stack([rho * c, rho * s], axis=-1)
        mom = np.stack([p_rho * c - p_phi * s, p_rho * s + p_phi * c], axis=-1)
        return r, mom


def orbit_from_channel(helicity, k):
    if not helicity > 0:
        raise DomainError(f"helicity must be positive for a classical orbit, got {helicity!r}")
    _check_k(k)
    p = helicity * helicity
    e = math.sqrt(1.0 + k * k * p)
    return ConicOrbit(p, e, p / (e - 1.0))


def angular_momentum(r, p):
    r = np.asarray(r, dtype=float)
    p = np.asarray(p, dtype=float)
    return r[..., 0] * p[..., 1] - r[..., 1] * p[..., 0]


def lrl_vector(r, p):
    """A = p x l + r_hat in the plane, with l = x p_y - y p_x along z."""
    r = np.asarray(r, dtype=float)
    p = np.asarray(p, dtype=float)
    rho = np.hypot(r[..., 0], r[..., 1])
    if np.any(rho == 0.0):
        raise OriginError("LRL vector undefined at the origin")
    l = angular_momentum(r, p)
    return np.stack([p[..., 1] * l + r[..., 0] / rho, -p[..., 0] * l + r[..., 1] / rho], axis=-1)


def energy(r, p, kinetic=KINETIC):
    r = np.asarray(r, dtype=float)
    p = np.asarray(p, dtype=float)
    return kinetic * np.sum(p * p, axis=-1) + 1.0 / np.hypot(r[..., 0], r[..., 1])


def hj_residual(r, p, k, kinetic=KINETIC):
    """Residual of kinetic (p_rho^2 + p_phi^2/rho^2) + 1/rho = kinetic k^2 for p = grad sigma."""
    r = np.asarray(r, dtype=float)
    p = np.asarray(p, dtype=float)
    rho = np.hypot(r[..., 0], r[..., 1])
    p_rho = np.sum(r * p, axis=-1) / rho
    p_phi = angular_momentum(r, p)
    return kinetic * (p_rho ** 2 + (p_phi / rho) ** 2) + 1.0 / rho - kinetic * k * k


def deflection_angle(p_in, p_out):
    p_in = np.asarray(p_in, dtype=float)
    p_out = np.asarray(p_out, dtype=float)
    cross = p_in[..., 0] * p_out[..., 1] - p_in[..., 1] * p_out[..., 0]
    return np.arctan2(np.abs(cross), np.sum(p_in * p_out, axis=-1))


def impact_from_angle(chi, k):
    """b = 1/(k^2 tan(chi/2))."""
    _check_k(k)
    if not 0.0 < chi < math.pi:
        raise DomainError(f"deflection must lie in (0, pi), got {chi!r}")
    return 1.0 / (k * k * math.tan(0.5 * chi))


def impact_derivative(chi, k):
    """db/dchi = -1/(2 k^2 sin^2(chi/2))."""
    _check_k(k)
    if not 0.0 < chi < math.pi:
        raise DomainError(f"deflection must lie in (0, pi), got {chi!r}")
    return -0.5 / (k * k * math.sin(0.5 * chi) ** 2)


def angle_from_impact(b, k):
    _check_k(k)
    return 2.0 * math.atan2(1.0, k * k * b)


def rutherford(chi, k, symmetrized=False):
    _check_k(k)
    chi = np.asarray(chi, dtype=float)
    if np.any((chi <= 0.0) | (chi >= math.pi)):
        raise DomainError("Rutherford cross section requires 0 < chi < pi")
    k4 = k ** 4
    out = 0.25 / (k4 * np.sin(0.5 * chi) ** 4)
    if symmetrized:
        out = out + 0.25 / (k4 * np.cos(0.5 * chi) ** 4)
    return out if out.ndim else float(out)


def rutherford_bin_average(chi_lo, chi_hi, k):
    """Rutherford cross section averaged over solid angle on [chi_lo, chi_hi].

    Uses sigma_bin = pi (b(chi_lo)^2 - b(chi_hi)^2), which follows from b(chi).
    """
    def b2(chi):
        return 0.0 if chi >= math.pi else impact_from_angle(chi, k) ** 2
    if chi_lo <= 0.0:
        return math.inf
    sigma = math.pi * (b2(chi_lo) - b2(chi_hi))
    return sigma / (2.0 * math.pi * (math.cos(chi_lo) - math.cos(chi_hi)))


# -- trajectories -------------------------------------------------------------

@dataclass
class Trajectory:
    t: np.ndarray
    r: np.ndarray          # (n, 2)
    p: np.ndarray          # (n, 2)
    b: float
    k: float
    chi: float
    kinetic: float = KINETIC

    def energy(self):
        return energy(self.r, self.p, self.kinetic)

    def angular_momentum(self):
        return angular_momentum(self.r, self.p)

    def lrl(self):
        return lrl_vector(self.r, self.p)

    def drifts(self):
        """Max relative drift of energy, angular momentum and |A| over the samples."""
        def rel(x):
            x = np.atleast_2d(np.asarray(x).T).T
            ref = np.linalg.norm(x[0])
            return float(np.max(np.linalg.norm(x - x[0], axis=-1)) / ref) if ref else 0.0
        return rel(self.energy()), rel(self.angular_momentum()), rel(self.lrl())


def start_radius(b, k):
    return START_FACTOR * max(b, 1.0 / (k * k))


def initial_state(b, k, kinetic=KINETIC):
    """Start on the circle |r| = R_start moving along -x with exact energy and l = b k."""
    if b < 0:
        raise DomainError(f"impact parameter must be nonnegative, got {b!r}")
    _check_k(k)
    R = start_radius(b, k)
    p0 = math.sqrt(k * k - 1.0 / (kinetic * R))
    y0 = b * k / p0
    return np.array([math.sqrt(R * R - y0 * y0), y0, -p0, 0.0]), R


def _equations(kinetic):
    def rhs(t, y):
        x, yy, px, py = y
        rho3 = (x * x + yy * yy) ** 1.5
        return [2.0 * kinetic * px, 2.0 * kinetic * py, x / rho3, yy / rho3]
    return rhs


def integrate_trajectory(b, k, tol=DEFAULT_TOL, kinetic=KINETIC, max_steps=200000):
    y0, R = initial_state(b, k, kinetic)

    def escaped(t, y):
        return y[0] * y[0] + y[1] * y[1] - R * R
    escaped.terminal = True
    escaped.direction = 1.0

    speed = 2.0 * kinetic * k
    t_max = 50.0 * R / speed
    scale = np.array([R, R, k, k])
    sol = solve_ivp(_equations(kinetic), (0.0, t_max), y0, method="DOP853",
                    rtol=tol, atol=tol * 1e-3 * scale, events=escaped,
                    max_step=np.inf, first_step=None)
    if sol.status != 1 or sol.t.size > max_steps:
        raise NonEscapeError(f"trajectory with b={b}, k={k} did not return to R_start={R}")
    ys = np.column_stack([sol.y, sol.y_events[0].T])
    ts = np.append(sol.t, sol.t_events[0])
    r, p = ys[:2].T, ys[2:].T
    chi = float(deflection_angle(p[0], p[-1]))
    return Trajectory(ts, r, p, b, k, chi, kinetic)


# -- batched integrator for Monte-Carlo ----------------------------------------

# Dormand-Prince 5(4) tableau
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_DP_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_E = _DP_B - np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640,
                          -92097 / 339200, 187 / 2100, 1 / 40])


def _rhs_batch(y, kinetic):
    x, yy = y[:, 0], y[:, 1]
    inv = (x * x + yy * yy) ** -1.5
    return np.column_stack([2.0 * kinetic * y[:, 2], 2.0 * kinetic * y[:, 3], x * inv, yy * inv])


def batch_deflections(bs, k, tol=1e-9, kinetic=KINETIC, max_steps=20000):
    """Deflection angles for many impact parameters at once.

    Each element carries its own adaptive step size.  Returns (chi, ok) where
    ``ok`` is False for samples that did not escape within ``max_steps``.
    """
    bs = np.asarray(bs, dtype=float)
    n = bs.size
    y = np.empty((n, 4))
    R = np.empty(n)
    for i, b in enumerate(bs):
        y[i], R[i] = initial_state(b, k, kinetic)
    p_in = y[:, 2:].copy()
    scale = np.column_stack([R, R, np.full(n, k), np.full(n, k)])
    atol = tol * 1e-3 * scale
    h = 0.01 * R / (2.0 * kinetic * k)
    chi = np.full(n, np.nan)
    active = np.arange(n)
    steps = np.zeros(n, dtype=int)
    f = _rhs_batch(y, kinetic)
    while active.size:
        ya, fa, ha = y[active], f[active], h[active][:, None]
        ks = [fa]
        for s in range(1, 7):
            yi = ya + ha * sum(a * kk for a, kk in zip(_DP_A[s], ks))
            ks.append(_rhs_batch(yi, kinetic))
        y_new = ya + ha * sum(bb * kk for bb, kk in zip(_DP_B, ks) if bb)
        err = ha * sum(ee * kk for ee, kk in zip(_DP_E, ks) if ee)
        sc = atol[active] + tol * np.maximum(np.abs(ya), np.abs(y_new))
        en = np.sqrt(np.mean((err / sc) ** 2, axis=1))
        accept = en <= 1.0
        factor = np.clip(0.9 * np.where(en > 0, en, 1e-10) ** -0.2, 0.2, 5.0)
        h[active] = ha[:, 0] * factor
        acc = active[accept]
        y[acc] = y_new[accept]
        f[acc] = ks[6][accept]      # FSAL
        steps[active] += 1
        rho2 = y[acc, 0] ** 2 + y[acc, 1] ** 2
        outbound = np.sum(y[acc, :2] * y[acc, 2:], axis=1) > 0
        done = acc[(rho2 > R[acc] ** 2) & outbound]
        chi[done] = deflection_angle(p_in[done], y[done, 2:])
        finished = np.zeros(n, dtype=bool)
        finished[done] = True
        finished[active[steps[active] >= max_steps]] = True
        active = active[~finished[active]]
    return chi, ~np.isnan(chi)


@dataclass
class MCHistogram:
    edges: np.ndarray
    counts: np.ndarray
    dsdo: np.ndarray       # estimated dsigma/dOmega per bin (bohr^2/sr)
    stderr: np.ndarray
    n_samples: int
    n_failed: int
    b_max: float
    k: float

    @property
    def centers(self):
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    def reference(self):
        return np.array([rutherford_bin_average(lo, hi, self.k)
                         for lo, hi in zip(self.edges[:-1], self.edges[1:])])


def _chunk_worker(args):
    bs, k, tol, kinetic = args
    return batch_deflections(bs, k, tol, kinetic)


def mc_cross_section(k, b_max, n_samples, bins=36, seed=0, jobs=1, tol=1e-9,
                     kinetic=KINETIC, chi_range=(0.0, math.pi)):
    """Monte-Carlo dsigma/dOmega from trajectories with b^2 uniform on (0, b_max^2].

    All impact parameters are drawn from ``seed`` up front, so the histogram
    does not depend on ``jobs``.
    """
    _check_k(k)
    if n_samples < 1 or bins < 1 or not b_max > 0:
        raise DomainError("need n_samples >= 1, bins >= 1 and b_max > 0")
    rng = np.random.default_rng(seed)
    bs = b_max * np.sqrt(1.0 - rng.random(n_samples))    # 1 - U lies in (0, 1]
    if jobs > 1:
        chunks = np.array_split(bs, jobs)
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_chunk_worker, [(c, k, tol, kinetic) for c in chunks]))
        chi = np.concatenate([c for c, _ in parts])
        ok = np.concatenate([o for _, o in parts])
    else:
        chi, ok = batch_deflections(bs, k, tol, kinetic)
    edges = np.linspace(chi_range[0], chi_range[1], bins + 1)
    counts, _ = np.histogram(chi[ok], bins=edges)
    n_ok = int(ok.sum())
    d_omega = 2.0 * math.pi * (np.cos(edges[:-1]) - np.cos(edges[1:]))
    area = math.pi * b_max * b_max
    frac = counts / n_ok
    dsdo = frac * area / d_omega
    stderr = np.sqrt(frac * (1.0 - frac) / n_ok) * area / d_omega
    return MCHistogram(edges, counts, dsdo, stderr, n_samples, n_samples - n_ok, b_max, k)
