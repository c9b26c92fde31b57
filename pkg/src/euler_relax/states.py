"""Pointwise state algebra for the isentropic Euler system and its linear relaxation.

States of the relaxed system are stored as 6-vectors in the fixed order
``(rho, m1, m2, M11, M12, Q)``; the trace-free matrix ``M`` is
``[[M11, M12], [M12, -M11]]``. Every array function broadcasts over leading axes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, FormatError

D = 2
GAMMA = 1.0 + 2.0 / D

#: Names of the relaxed unknowns, in storage order.
COMPONENTS = ("rho", "m1", "m2", "M11", "M12", "Q")

# psi: (rho, m, M, Q) -> (rho, m, S) with S = M + Q*I, stored as (rho, m1, m2, S11, S12, S22).
PSI = np.array(
    [
        [1, 0, 0, 0, 0, 0],
        [0, 1, 0, 0, 0, 0],
        [0, 0, 1, 0, 0, 0],
        [0, 0, 0, 1, 0, 1],
        [0, 0, 0, 0, 1, 0],
        [0, 0, 0, -1, 0, 1],
    ],
    dtype=float,
)
PSI_INV = np.linalg.inv(PSI)


def gamma_for(d):
    """Adiabatic exponent of a monoatomic gas in ``d`` space dimensions."""
    return 1.0 + 2.0 / d


def _check_density(rho):
    rho = np.asarray(rho, dtype=float)
    if not np.all(np.isfinite(rho)) or np.any(rho <= 0):
        raise DomainError(f"density must be positive and finite, got min {np.min(rho)!r}")
    return rho


@dataclass(frozen=True)
class TracefreeSym2:
    """Symmetric trace-free 2x2 matrix ``[[a11, a12], [a12, -a11]]``."""

    a11: float
    a12: float

    def matrix(self):
        return np.array([[self.a11, self.a12], [self.a12, -self.a11]])

    @classmethod
    def from_matrix(cls, mat, atol=1e-12):
        mat = np.asarray(mat, dtype=float)
        if mat.shape != (2, 2):
            raise FormatError(f"expected a 2x2 matrix, got shape {mat.shape}")
        if abs(mat[0, 1] - mat[1, 0]) > atol or abs(np.trace(mat)) > atol:
            raise FormatError("matrix is not symmetric and trace-free")
        return cls(float(mat[0, 0]), float(mat[0, 1]))


@dataclass(frozen=True)
class FluidState:
    rho: float
    m: tuple[float, float]

    def __post_init__(self):
        _check_density(self.rho)
        if not np.all(np.isfinite(self.m)):
            raise DomainError("momentum must be finite")


@dataclass(frozen=True)
class LiftedState:
    """State ``(rho, m, M, Q)`` of the relaxed system.

    ``Q`` is not tied to ``(rho, m)``; only :func:`lift` produces the
    constitutive value.
    """

    rho: float
    m: tuple[float, float]
    M: TracefreeSym2
    Q: float

    def __post_init__(self):
        _check_density(self.rho)
        if self.Q <= 0:
            raise DomainError(f"generalized pressure must be positive, got {self.Q!r}")

    def as_vector(self):
        return np.array([self.rho, self.m[0], self.m[1], self.M.a11, self.M.a12, self.Q])

    @classmethod
    def from_vector(cls, z):
        z = np.asarray(z, dtype=float)
        if z.shape != (6,):
            raise FormatError(f"expected a 6-vector, got shape {z.shape}")
        return cls(float(z[0]), (float(z[1]), float(z[2])), TracefreeSym2(float(z[3]), float(z[4])), float(z[5]))


def pressure(rho, gamma=GAMMA):
    """``p(rho) = rho**gamma``."""
    return _check_density(rho) ** gamma


def total_energy(rho, m, gamma=GAMMA):
    """Total energy density ``rho**gamma/(gamma-1) + |m|^2/(2 rho)``.

    ``m`` has a trailing axis of length ``d``.
    """
    rho = _check_density(rho)
    m = np.asarray(m, dtype=float)
    return rho**gamma / (gamma - 1.0) + np.sum(m * m, axis=-1) / (2.0 * rho)


def lift_array(rho, m):
    """Lifting map on arrays: returns ``(..., 6)`` relaxed states."""
    rho = _check_density(rho)
    m = np.asarray(m, dtype=float)
    m1, m2 = m[..., 0], m[..., 1]
    msq = m1 * m1 + m2 * m2
    out = np.empty(np.broadcast(rho, m1).shape + (6,))
    out[..., 0] = rho
    out[..., 1] = m1
    out[..., 2] = m2
    out[..., 3] = (m1 * m1 - msq / D) / rho
    out[..., 4] = m1 * m2 / rho
    out[..., 5] = rho**GAMMA + msq / (D * rho)
    return out


def lift(s: FluidState) -> LiftedState:
    return LiftedState.from_vector(lift_array(s.rho, np.asarray(s.m)))


def _as_tracefree(M):
    if isinstance(M, TracefreeSym2):
        return np.array([M.a11, M.a12])
    return np.asarray(M, dtype=float)


def kinetic_energy_density(rho, m, M):
    """``(d/2) * lambda_max(m (x) m / rho - M)`` via the closed-form 2x2 eigenvalue.

    ``M`` is a :class:`TracefreeSym2` or an array ``(..., 2)`` of ``(M11, M12)``.
    """
    rho = _check_density(rho)
    m = np.asarray(m, dtype=float)
    M = _as_tracefree(M)
    m1, m2 = m[..., 0], m[..., 1]
    # a = m(x)m/rho - M; trace(a) = |m|^2/rho since M is trace-free
    half_trace = (m1 * m1 + m2 * m2) / (2.0 * rho)
    half_diff = (m1 * m1 - m2 * m2) / (2.0 * rho) - M[..., 0]
    off = m1 * m2 / rho - M[..., 1]
    lam_max = half_trace + np.hypot(half_diff, off)
    return 0.5 * D * lam_max


def kinetic_energy_vec(z):
    """``e_kin`` evaluated on ``(..., 6)`` state arrays."""
    z = np.asarray(z, dtype=float)
    return kinetic_energy_density(z[..., 0], z[..., 1:3], z[..., 3:5])


def subsolution_margin(z):
    """``Q - rho**gamma - (2/d) e_kin``; positive means a strict subsolution point.

    Accepts a :class:`LiftedState` or ``(..., 6)`` arrays.
    """
    if isinstance(z, LiftedState):
        z = z.as_vector()
    z = np.asarray(z, dtype=float)
    rho = _check_density(z[..., 0])
    return z[..., 5] - rho**GAMMA - (2.0 / D) * kinetic_energy_vec(z)


def psi(z):
    """``(rho, m, M, Q) -> (rho, m, M + Q I)`` flattened as ``(rho, m1, m2, S11, S12, S22)``."""
    if isinstance(z, LiftedState):
        z = z.as_vector()
    return np.asarray(z, dtype=float) @ PSI.T


def psi_block(z):
    """Return ``(rho, m, S)`` with ``S = M + Q I`` as an explicit 2x2 block."""
    u = psi(z)
    block = np.array([[u[..., 3], u[..., 4]], [u[..., 4], u[..., 5]]])
    return u[..., 0], u[..., 1:3], np.moveaxis(block, (0, 1), (-2, -1))


def psi_inverse(u, atol=1e-12):
    """Inverse of :func:`psi`.

    ``u`` is either a flat ``(..., 6)`` array or a tuple ``(rho, m, S)`` with a
    2x2 block ``S``; a non-symmetric block raises :class:`FormatError`.
    """
    if isinstance(u, tuple):
        rho, m, block = u
        block = np.asarray(block, dtype=float)
        if block.shape[-2:] != (2, 2):
            raise FormatError(f"block must be 2x2, got {block.shape}")
        if np.max(np.abs(block[..., 0, 1] - block[..., 1, 0])) > atol:
            raise FormatError("symmetric block expected")
        m = np.asarray(m, dtype=float)
        u = np.stack(
            np.broadcast_arrays(rho, m[..., 0], m[..., 1], block[..., 0, 0], block[..., 0, 1], block[..., 1, 1]),
            axis=-1,
        )
    u = np.asarray(u, dtype=float)
    if u.shape[-1] != 6:
        raise FormatError(f"expected trailing axis of length 6, got {u.shape}")
    return u @ PSI_INV.T


@dataclass
class AdmissibilityReport:
    energies: np.ndarray  # integral of e(rho, m) per time slice
    admissible: np.ndarray  # flag per time slice
    tol: float

    @property
    def all_admissible(self):
        return bool(np.all(self.admissible))

    @property
    def max_excess(self):
        """Largest ``E(t) - E(0)``; nonpositive for an admissible field."""
        return float(np.max(self.energies - self.energies[0]))


def admissibility_check(rho, m, tol=0.0, area=1.0):
    """Integral energy inequality per time slice.

    ``rho`` has shape ``(n_t, n_x, n_y)`` and ``m`` shape ``(n_t, n_x, n_y, 2)``;
    slice 0 is the initial datum. The space integral uses the midpoint rule on
    the periodic grid.
    """
    rho = np.asarray(rho, dtype=float)
    if rho.size == 0 or rho.ndim < 2:
        raise ValueError("admissibility_check needs a non-empty time-indexed grid")
    e = total_energy(rho, m)
    energies = e.reshape(e.shape[0], -1).mean(axis=1) * area
    return AdmissibilityReport(energies, energies <= energies[0] + tol, tol)
