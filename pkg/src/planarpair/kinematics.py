"""Kinematic reduction of a free identical pair to planar motion.

The pair wave, the propagation frame (e_P, e_Theta, e_Phi), the planar
Bloch modes, and residual checks for the longitudinal constraints.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, GridTooSmallError, ParityError, ZeroPropagationError
from .specfun import bessel_j


@dataclass(frozen=True)
class Frame:
    theta: float
    phi: float
    basis: np.ndarray   # rows e_P, e_Theta, e_Phi

    @property
    def e_p(self):
        return self.basis[0]

    def to_frame(self, vec):
        """(r_P, r_Theta, r_Phi) components of a lab-frame vector (or rows of vectors)."""
        return np.asarray(vec, dtype=float) @ self.basis.T

    def from_frame(self, comps):
        return np.asarray(comps, dtype=float) @ self.basis


def frame_basis(theta, phi):
    st, ct = math.sin(theta), math.cos(theta)
    sp, cp = math.sin(phi), math.cos(phi)
    basis = np.array([
        [st * cp, st * sp, ct],
        [ct * cp, ct * sp, -st],
        [-sp, cp, 0.0],
    ])
    return Frame(theta, phi, basis)


def frame_from_momentum(P):
    P = np.asarray(P, dtype=float)
    norm = np.linalg.norm(P)
    if norm == 0.0:
        raise ZeroPropagationError("centre-of-mass momentum is zero")
    theta = math.acos(max(-1.0, min(1.0, P[2] / norm)))
    return frame_basis(theta, math.atan2(P[1], P[0]))


@dataclass(frozen=True)
class PairConfig:
    r: np.ndarray
    P: np.ndarray
    k: np.ndarray

    def frame(self):
        return frame_from_momentum(self.P)

    def cylindrical(self):
        """(rho, phi, z) of the relative position in the propagation frame."""
        r_p, r_t, r_f = self.frame().to_frame(self.r)
        return math.hypot(r_t, r_f), math.atan2(r_f, r_t) % (2.0 * math.pi), r_p


@dataclass(frozen=True)
class SpinChannel:
    S: int
    M: int = 0
    s: float = 0.5

    def __post_init__(self):
        if abs(self.M) > self.S:
            raise DomainError(f"|M| must not exceed S: {self}")


def pair_wave(r, P, k):
    """exp(i [k.r - (k.P_hat)(r.P_hat)]) for one point or an (N, 3) array of points."""
    P = np.asarray(P, dtype=float)
    norm = np.linalg.norm(P)
    if norm == 0.0:
        raise ZeroPropagationError("centre-of-mass momentum is zero; direction undefined")
    p_hat = P / norm
    k = np.asarray(k, dtype=float)
    r = np.asarray(r, dtype=float)
    phase = r @ k - (k @ p_hat) * (r @ p_hat)
    return np.exp(1j * phase)


def frame_grid(frame, n=21, extent=10.0):
    """Lab-frame points of an n^3 grid aligned with the frame axes, shape (n, n, n, 3)."""
    axis = np.linspace(-0.5 * extent, 0.5 * extent, n)
    comps = np.stack(np.meshgrid(axis, axis, axis, indexing="ij"), axis=-1)
    return frame.from_frame(comps)


class Residuals(NamedTuple):
    screening: float
    longitudinal: float


def constraint_residuals(psi, frame, n=21, extent=10.0, h=1e-4):
    """Max-norm residuals of r_P psi = 0 and d psi / d r_P = 0.

    ``psi`` is either a callable mapping an (..., 3) array of lab positions to
    complex values, or an array already sampled on a frame-aligned grid of
    shape (n_P, n_Theta, n_Phi) with spacing ``extent/(n_P - 1)`` along e_P.
    """
    if callable(psi):
        if n < 3:
            raise GridTooSmallError("need at least 3 grid points along e_P")
        pts = frame_grid(frame, n, extent)
        vals = psi(pts)
        step = h * frame.e_p
        deriv = (psi(pts + step) - psi(pts - step)) / (2.0 * h)
        r_p = frame.to_frame(pts)[..., 0]
    else:
        vals = np.asarray(psi)
        if vals.ndim != 3 or vals.shape[0] < 3:
            raise GridTooSmallError("sampled field needs >= 3 points along e_P")
        spacing = extent / (vals.shape[0] - 1)
        deriv = np.gradient(vals, spacing, axis=0, edge_order=2)
        r_p = np.linspace(-0.5 * extent, 0.5 * extent, vals.shape[0])[:, None, None]
    return Residuals(float(np.max(np.abs(r_p * vals))), float(np.max(np.abs(deriv))))


class ExchangePhase(NamedTuple):
    spatial: int
    full: int


def exchange_phase(S, s=0.5):
    """Phases under interchange: (-1)^S for coordinates alone, (-1)^{2s} for coordinates and spins."""
    two_s = round(2 * s)
    if abs(2 * s - two_s) > 1e-12 or two_s < 0:
        raise DomainError(f"particle spin must be a nonnegative multiple of 1/2, got {s}")
    if S != int(S) or not 0 <= S <= two_s:
        raise DomainError(f"total spin S={S} must be an integer in [0, 2s]")
    return ExchangePhase((-1) ** int(S), (-1) ** two_s)


def free_planar_mode(helicity, k, rho, phi, spin):
    """Free Bloch mode J_L(k rho) exp(i L phi) of the reduced planar problem."""
    if helicity < 0 or int(helicity) != helicity:
        raise DomainError(f"helicity must be a nonnegative integer, got {helicity}")
    S = spin.S if isinstance(spin, SpinChannel) else int(spin)
    if (int(helicity) - S) % 2:
        raise ParityError(f"helicity {helicity} and total spin {S} differ in parity")
    return bessel_j(int(helicity), k * rho) * complex(math.cos(helicity * phi),
                                                      math.sin(helicity * phi))
