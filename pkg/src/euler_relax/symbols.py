"""Fourier symbols of the relaxed Euler operator and its second-order potential (d = 2).

Frequencies are ordered ``(tau, xi1, xi2)`` for ``(t, x, y)``. Symbols are
real: the factor ``i**order`` is dropped, which changes none of the ranks,
kernels or images computed here. Every function accepts a single frequency or
a stack ``(..., 3)`` of them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import minimize

from .states import PSI_INV

RANK_TOL = 1e-10
_AXIS = {"t": 0, "x": 1, "y": 2}

# d/dt rho + div m = 0 ; d/dt m + div M + grad Q = 0, unknowns (rho, m1, m2, M11, M12, Q).
_EULER_TABLE = [
    ["t", "x", "y", "0", "0", "0"],
    ["0", "t", "0", "x", "y", "x"],
    ["0", "0", "t", "-y", "x", "y"],
]


def _parse_linear(table):
    coef = np.zeros((3, len(table), len(table[0])))
    for i, row in enumerate(table):
        for j, entry in enumerate(row):
            if entry != "0":
                coef[_AXIS[entry[-1]], i, j] = -1.0 if entry.startswith("-") else 1.0
    return coef


#: ``A(xi) = sum_a EULER_COEF[a] xi_a``.
EULER_COEF = _parse_linear(_EULER_TABLE)

# Potential in psi coordinates (rho, m1, m2, S11, S12, S22); "c ab" means c * d_a d_b.
_POTENTIAL_TABLE = [
    ["xx", "xy", "0", "0", "0", "0", "xy", "yy", "0"],
    ["-tx", "-1/2 ty", "1/2 xy", "1/2 xy", "1/2 yy", "0", "-1/2 ty", "0", "1/2 yy"],
    ["0", "-1/2 tx", "-1/2 xx", "-1/2 xx", "-1/2 xy", "0", "-1/2 tx", "-ty", "-1/2 xy"],
    ["tt", "0", "-ty", "-ty", "0", "yy", "0", "0", "0"],
    ["0", "1/2 tt", "1/2 tx", "1/2 tx", "-1/2 ty", "-xy", "1/2 tt", "0", "-1/2 ty"],
    ["0", "0", "0", "0", "tx", "xx", "0", "tt", "tx"],
]


def _parse_table(table):
    coef = np.zeros((3, 3, len(table), len(table[0])))
    for i, row in enumerate(table):
        for j, entry in enumerate(row):
            if entry == "0":
                continue
            *scale, mono = entry.replace("-", "-1 ").split()
            c = float(np.prod([Fraction(s) for s in scale])) if scale else 1.0
            a, b = _AXIS[mono[0]], _AXIS[mono[1]]
            # split mixed monomials symmetrically so that coef[a, b] == coef[b, a]
            coef[a, b, i, j] += c / 2.0
            coef[b, a, i, j] += c / 2.0
    return coef


POTENTIAL_COEF_PSI = _parse_table(_POTENTIAL_TABLE)
#: ``B(xi) = sum_ab POTENTIAL_COEF[a, b] xi_a xi_b`` in state coordinates.
POTENTIAL_COEF = np.einsum("ij,abjk->abik", PSI_INV, POTENTIAL_COEF_PSI)


def euler_symbol(xi):
    """3x6 symbol of the relaxed Euler operator."""
    xi = np.asarray(xi, dtype=float)
    return np.einsum("...a,aij->...ij", xi, EULER_COEF)


def potential_symbol(xi):
    """6x9 symbol of the second-order potential, composed with ``psi^{-1}``."""
    xi = np.asarray(xi, dtype=float)
    return np.einsum("...a,...b,abij->...ij", xi, xi, POTENTIAL_COEF)


def _svd(mat):
    return np.linalg.svd(np.asarray(mat, dtype=float), full_matrices=True)


def rank(mat, rel_tol=RANK_TOL):
    """Number of singular values above ``rel_tol`` times the largest one."""
    s = np.linalg.svd(np.asarray(mat, dtype=float), compute_uv=False)
    smax = s[..., :1]
    r = np.sum(s > rel_tol * smax, axis=-1)
    r = np.where(smax[..., 0] > 0, r, 0)
    return int(r) if np.ndim(r) == 0 else r


def pseudoinverse(mat, rel_tol=RANK_TOL):
    """Moore-Penrose pseudoinverse from the SVD; works on stacks of matrices."""
    u, s, vt = np.linalg.svd(np.asarray(mat, dtype=float), full_matrices=False)
    cutoff = rel_tol * s[..., :1]
    s_inv = np.where(s > cutoff, 1.0 / np.where(s > cutoff, s, 1.0), 0.0)
    return np.einsum("...ji,...j,...kj->...ik", vt, s_inv, u)


@dataclass
class SubspaceBasis:
    vectors: np.ndarray  # (n, k), orthonormal columns
    tol: float

    @property
    def dim(self):
        return self.vectors.shape[1]

    def projector(self):
        return self.vectors @ self.vectors.T


def kernel_basis(mat, rel_tol=RANK_TOL):
    mat = np.asarray(mat, dtype=float)
    _, _, vt = _svd(mat)
    r = rank(mat, rel_tol)
    return SubspaceBasis(vt[r:].T.copy(), rel_tol)


def image_basis(mat, rel_tol=RANK_TOL):
    mat = np.asarray(mat, dtype=float)
    u, _, _ = _svd(mat)
    r = rank(mat, rel_tol)
    return SubspaceBasis(u[:, :r].copy(), rel_tol)


def kernel_projector(mat, rel_tol=RANK_TOL):
    """Orthogonal projector ``I - pinv(A) A`` onto ``ker A`` (stack-aware)."""
    mat = np.asarray(mat, dtype=float)
    n = mat.shape[-1]
    return np.eye(n) - pseudoinverse(mat, rel_tol) @ mat


def image_projector(mat, rel_tol=RANK_TOL):
    """Orthogonal projector ``B pinv(B)`` onto ``im B`` (stack-aware)."""
    mat = np.asarray(mat, dtype=float)
    return mat @ pseudoinverse(mat, rel_tol)


@dataclass
class ExactnessResult:
    exact: bool
    projector_gap: float


def projector_gaps(xi, rank_tol=RANK_TOL):
    """Frobenius gap between the projectors onto ``ker A(xi)`` and ``im B(xi)``, batched."""
    xi = np.asarray(xi, dtype=float)
    gap = kernel_projector(euler_symbol(xi), rank_tol) - image_projector(potential_symbol(xi), rank_tol)
    return np.sqrt(np.sum(gap * gap, axis=(-2, -1)))


def exactness_check(xi, rel_tol=1e-8, rank_tol=RANK_TOL):
    """Test ``ker A(xi) == im B(xi)`` through the gap of the orthogonal projectors."""
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (3,):
        raise ValueError(f"expected a single frequency (tau, xi1, xi2), got shape {xi.shape}")
    if not np.any(xi):
        raise ValueError("exactness is only defined for nonzero frequencies")
    gap = float(projector_gaps(xi, rank_tol))
    return ExactnessResult(gap <= rel_tol, gap)


def fibonacci_sphere(n):
    """``n`` nearly uniform deterministic points on the unit sphere S^2."""
    i = np.arange(n) + 0.5
    polar = np.arccos(1.0 - 2.0 * i / n)
    azim = np.pi * (1.0 + np.sqrt(5.0)) * i
    return np.stack([np.cos(polar), np.sin(polar) * np.cos(azim), np.sin(polar) * np.sin(azim)], axis=-1)


@dataclass
class WaveConeResult:
    distance: float  # min over unit omega of |A(omega) z| / |z|
    minimizer: np.ndarray
    member: bool


def _canonical_sign(v):
    return v if v[np.argmax(np.abs(v))] >= 0 else -v


def _direction_matrix(z):
    # A(omega) z = L @ omega, column a is EULER_COEF[a] @ z
    return np.einsum("aij,j->ia", EULER_COEF, z)


def wavecone_distance(z, method="svd", n_grid=10_000, tol=1e-8):
    """Distance of the direction of ``z`` from the wave cone of the relaxed Euler operator.

    ``A(omega) z`` is linear in ``omega``, so with ``method="svd"`` the minimum over
    the sphere is the smallest singular value of a 3x3 matrix. ``method="sweep"``
    searches a spherical Fibonacci grid and polishes the best point with
    Nelder-Mead instead; it serves as an independent cross-check.
    """
    z = np.asarray(z, dtype=float)
    norm = np.linalg.norm(z)
    if norm == 0:
        raise ValueError("zero vector lies trivially in the wave cone")
    lmat = _direction_matrix(z / norm)
    if method == "svd":
        _, s, vt = np.linalg.svd(lmat)
        dist, omega = float(s[-1]), vt[-1]
    elif method == "sweep":
        pts = fibonacci_sphere(n_grid)
        vals = np.linalg.norm(pts @ lmat.T, axis=-1)
        start = pts[np.argmin(vals)]

        def objective(angles):
            p, a = angles
            w = np.array([np.cos(p), np.sin(p) * np.cos(a), np.sin(p) * np.sin(a)])
            return np.linalg.norm(lmat @ w)

        p0 = np.arccos(np.clip(start[0], -1, 1))
        a0 = np.arctan2(start[2], start[1])
        res = minimize(objective, [p0, a0], method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-15})
        p, a = res.x
        omega = np.array([np.cos(p), np.sin(p) * np.cos(a), np.sin(p) * np.sin(a)])
        dist = float(res.fun)
    else:
        raise ValueError(f"unknown method {method!r}")
    return WaveConeResult(dist, _canonical_sign(omega), dist <= tol)


def directional_residual(z, omega):
    """``|A(omega) z| / |z|`` for a fixed direction."""
    z = np.asarray(z, dtype=float)
    omega = np.asarray(omega, dtype=float)
    return float(np.linalg.norm(euler_symbol(omega / np.linalg.norm(omega)) @ z) / np.linalg.norm(z))
