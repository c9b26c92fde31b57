"""Periodic fields on ``(0, T) x T^2`` and spectral application of the relaxed operators.

All per-mode operators work on the real FFT layout. Modes on a Nyquist plane
(any axis index equal to ``n/2``) are not resolved by a real trigonometric
interpolant and are set to zero by every derivative operator, which keeps
outputs exactly real and makes ``A(k) B(k) = 0`` hold mode by mode.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import symbols
from .errors import FormatError, MeanNotZero, PreconditionError
from .states import GAMMA

_AXES = (0, 1, 2)


@dataclass(frozen=True)
class TorusGrid:
    n_t: int
    n_x: int
    n_y: int
    period_t: float = 1.0

    def __post_init__(self):
        for name in ("n_t", "n_x", "n_y"):
            n = getattr(self, name)
            if n < 4 or n % 2:
                raise ValueError(f"{name} must be an even integer >= 4, got {n}")
        if not self.period_t > 0:
            raise ValueError("period_t must be positive")

    @property
    def shape(self):
        return (self.n_t, self.n_x, self.n_y)

    @property
    def periods(self):
        return (self.period_t, 1.0, 1.0)

    @property
    def spacing(self):
        return tuple(p / n for p, n in zip(self.periods, self.shape))

    @property
    def size(self):
        return self.n_t * self.n_x * self.n_y

    def axes(self):
        """1-D node coordinates ``(t, x, y)``; node ``i`` sits at ``i * spacing``."""
        return tuple(np.arange(n) * h for n, h in zip(self.shape, self.spacing))

    def mesh(self):
        return np.meshgrid(*self.axes(), indexing="ij")

    def kappa(self):
        """Angular wave vectors ``2 pi k_phys`` in real-FFT layout, shape ``(n_t, n_x, n_y//2+1, 3)``."""
        kt = 2 * np.pi * np.fft.fftfreq(self.n_t, d=self.period_t / self.n_t)
        kx = 2 * np.pi * np.fft.fftfreq(self.n_x, d=1.0 / self.n_x)
        ky = 2 * np.pi * np.fft.rfftfreq(self.n_y, d=1.0 / self.n_y)
        return np.stack(np.meshgrid(kt, kx, ky, indexing="ij"), axis=-1)

    def nyquist_mask(self):
        """True on modes with any axis index at Nyquist (real-FFT layout)."""
        it = np.arange(self.n_t) == self.n_t // 2
        ix = np.arange(self.n_x) == self.n_x // 2
        iy = np.arange(self.n_y // 2 + 1) == self.n_y // 2
        return it[:, None, None] | ix[None, :, None] | iy[None, None, :]

    def to_dict(self):
        return {"n_t": self.n_t, "n_x": self.n_x, "n_y": self.n_y, "period_t": self.period_t}


@dataclass
class TorusField:
    grid: TorusGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim == 3:
            self.values = self.values[..., None]
        if self.values.shape[:3] != self.grid.shape or self.values.ndim != 4:
            raise FormatError(f"values of shape {self.values.shape} do not match grid {self.grid.shape}")
        if not np.all(np.isfinite(self.values)):
            raise FormatError("field values must be finite")

    @property
    def components(self):
        return self.values.shape[-1]

    def mean(self):
        return self.values.reshape(-1, self.components).mean(axis=0)

    def l2(self):
        """Discrete L2 norm (root mean square of the pointwise Euclidean norm)."""
        return float(np.sqrt(np.mean(np.sum(self.values**2, axis=-1))))

    def __add__(self, other):
        other = other.values if isinstance(other, TorusField) else other
        return TorusField(self.grid, self.values + other)

    def __sub__(self, other):
        other = other.values if isinstance(other, TorusField) else other
        return TorusField(self.grid, self.values - other)

    def __mul__(self, scalar):
        return TorusField(self.grid, self.values * scalar)

    __rmul__ = __mul__

    @classmethod
    def zeros(cls, grid, components):
        return cls(grid, np.zeros(grid.shape + (components,)))

    @classmethod
    def constant(cls, grid, vector):
        vector = np.asarray(vector, dtype=float)
        return cls(grid, np.broadcast_to(vector, grid.shape + vector.shape).copy())


def relative_error(a, b):
    """``|a - b|_2 / |b|_2`` for fields or arrays (absolute error if ``b`` vanishes)."""
    a = a.values if isinstance(a, TorusField) else np.asarray(a)
    b = b.values if isinstance(b, TorusField) else np.asarray(b)
    den = np.linalg.norm(b)
    num = np.linalg.norm(a - b)
    return float(num / den) if den > 0 else float(num)


# ---------------------------------------------------------------- transforms


def forward_transform(f: TorusField):
    """Unitary DFT over ``(t, x, y)`` for each component; shape ``(n_t, n_x, n_y, c)``."""
    return np.fft.fftn(f.values, axes=_AXES, norm="ortho")


def inverse_transform(coeffs, grid: TorusGrid, imag_tol=1e-12):
    """Inverse of :func:`forward_transform`; the imaginary residue must be negligible."""
    vals = np.fft.ifftn(coeffs, axes=_AXES, norm="ortho")
    scale = max(np.max(np.abs(vals.real)), 1.0) if vals.size else 1.0
    residue = float(np.max(np.abs(vals.imag))) if vals.size else 0.0
    if residue > imag_tol * scale:
        raise FormatError(f"spectrum is not conjugate-symmetric (imaginary residue {residue:.3e})")
    return TorusField(grid, vals.real)


def _rfft(values):
    return np.fft.rfftn(values, axes=_AXES)


def _irfft(hat, grid):
    return np.fft.irfftn(hat, s=grid.shape, axes=_AXES)


def _symbols_on_grid(grid, which):
    kap = grid.kappa()
    mat = symbols.euler_symbol(kap) if which == "A" else symbols.potential_symbol(kap)
    mat[grid.nyquist_mask()] = 0.0
    return mat


def apply_euler_operator(z: TorusField) -> TorusField:
    """Residual ``(d_t rho + div m, d_t m + div M + grad Q)`` of a 6-component field."""
    if z.components != 6:
        raise FormatError("relaxed Euler operator acts on 6-component fields")
    amat = _symbols_on_grid(z.grid, "A")
    hat = 1j * np.einsum("...ij,...j->...i", amat, _rfft(z.values))
    return TorusField(z.grid, _irfft(hat, z.grid))


def apply_potential_operator(w: TorusField) -> TorusField:
    """Second-order potential applied to a 9-component field (``d_a d_b -> -kappa_a kappa_b``)."""
    if w.components != 9:
        raise FormatError("the potential acts on 9-component fields")
    bmat = _symbols_on_grid(w.grid, "B")
    hat = -np.einsum("...ij,...j->...i", bmat, _rfft(w.values))
    return TorusField(w.grid, _irfft(hat, w.grid))


@dataclass
class PotentialSolution:
    w: TorusField
    residual: float
    exact: bool


def solve_potential(z: TorusField, rel_tol=1e-8, rank_tol=symbols.RANK_TOL) -> PotentialSolution:
    """Minimum-norm least-squares potential ``w`` with ``B w = z``, mode by mode.

    Raises :class:`MeanNotZero` if ``z`` has a nonzero average. If ``z`` is not
    in the range of the potential (not A-free) the solution is still returned,
    with ``exact=False`` and the measured residual.
    """
    if z.components != 6:
        raise FormatError("solve_potential expects a 6-component field")
    mean = z.mean()
    scale = z.l2()
    if np.linalg.norm(mean) > rel_tol * max(scale, np.finfo(float).tiny):
        raise MeanNotZero(f"field mean {np.linalg.norm(mean):.3e} exceeds tolerance", mean=mean)
    bmat = _symbols_on_grid(z.grid, "B")
    pinv = symbols.pseudoinverse(bmat, rank_tol)
    hat = -np.einsum("...ij,...j->...i", pinv, _rfft(z.values))
    w = TorusField(z.grid, _irfft(hat, z.grid))
    residual = relative_error(apply_potential_operator(w), z) if scale > 0 else 0.0
    return PotentialSolution(w, residual, residual <= rel_tol)


def project_afree(z: TorusField, rank_tol=symbols.RANK_TOL) -> TorusField:
    """Per-mode orthogonal projection onto ``ker A(k)``; the zero mode passes through."""
    if z.components != 6:
        raise FormatError("project_afree expects a 6-component field")
    proj = symbols.kernel_projector(_symbols_on_grid(z.grid, "A"), rank_tol)
    hat = np.einsum("...ij,...j->...i", proj, _rfft(z.values))
    return TorusField(z.grid, _irfft(hat, z.grid))


def mollify(f: TorusField, eps) -> TorusField:
    """Gaussian smoothing: mode ``k`` is damped by ``exp(-eps^2 |2 pi k|^2)``."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    kap = f.grid.kappa()
    damp = np.exp(-(eps**2) * np.sum(kap**2, axis=-1))
    return TorusField(f.grid, _irfft(damp[..., None] * _rfft(f.values), f.grid))


# ---------------------------------------------------------------- derivatives


def derivative(f: TorusField, axes) -> TorusField:
    """Spectral partial derivative along the given sequence of axes (0=t, 1=x, 2=y)."""
    kap = f.grid.kappa()
    mult = np.ones(kap.shape[:-1], dtype=complex)
    for a in axes:
        mult = mult * (1j * kap[..., a])
    mult[f.grid.nyquist_mask()] = 0.0
    return TorusField(f.grid, _irfft(mult[..., None] * _rfft(f.values), f.grid))


def divergence(u: TorusField) -> TorusField:
    """Space-time divergence ``d_t u_0 + d_x u_1 + d_y u_2`` of a 3-component field."""
    kap = u.grid.kappa()
    hat = 1j * np.sum(kap * _rfft(u.values), axis=-1)
    hat[u.grid.nyquist_mask()] = 0.0
    return TorusField(u.grid, _irfft(hat, u.grid))


def curl(w: TorusField) -> TorusField:
    """Space-time curl in the coordinates ``(t, x, y)``."""
    if w.components != 3:
        raise FormatError("curl acts on 3-component fields")
    kap = w.grid.kappa()
    hat = 1j * np.cross(kap, _rfft(w.values))
    hat[w.grid.nyquist_mask()] = 0.0
    return TorusField(w.grid, _irfft(hat, w.grid))


def curl_inverse(u: TorusField, rel_tol=1e-10) -> TorusField:
    """Divergence-free, mean-zero ``w`` with ``curl w = u``.

    Mode by mode ``w_hat = i kappa x u_hat / |kappa|^2`` with the angular wave
    vector ``kappa = 2 pi k``; with this scaling ``curl(curl_inverse(u)) == u``
    holds exactly for every resolved mode.
    """
    if u.components != 3:
        raise FormatError("curl_inverse acts on 3-component fields")
    hat = _rfft(u.values)
    kap = u.grid.kappa()
    nyq = u.grid.nyquist_mask()
    scale = np.linalg.norm(hat)
    if scale == 0:
        return TorusField.zeros(u.grid, 3)
    mean_res = float(np.linalg.norm(hat[0, 0, 0]) / scale)
    knorm = np.linalg.norm(kap, axis=-1)
    resolved = ~nyq
    div_res = float(
        np.linalg.norm(np.sum(kap * hat, axis=-1)[resolved]) / max(np.linalg.norm((knorm[..., None] * hat)[resolved]), 1e-300)
    )
    unresolved = float(np.linalg.norm(hat[nyq]) / scale)
    if mean_res > rel_tol or div_res > rel_tol or unresolved > rel_tol:
        raise PreconditionError(
            "curl_inverse needs a mean-zero, divergence-free, resolved field",
            mean=mean_res,
            divergence=div_res,
            nyquist=unresolved,
        )
    k2 = knorm**2
    k2[0, 0, 0] = 1.0
    out = 1j * np.cross(kap, hat) / k2[..., None]
    out[0, 0, 0] = 0.0
    out[nyq] = 0.0
    return TorusField(u.grid, _irfft(out, u.grid))


def euler_residual(rho: TorusField, m: TorusField, gamma=GAMMA) -> TorusField:
    """Spectral residual of the nonlinear isentropic Euler equations.

    Components: ``d_t rho + div m`` and ``d_t m + div(m (x) m / rho) + grad rho^gamma``.
    """
    r = rho.values[..., 0]
    mv = m.values
    grid = rho.grid
    flux = np.empty(grid.shape + (3, 3))  # flux[..., eq, axis]
    flux[..., 0, 0] = r
    flux[..., 0, 1:] = mv
    p = r**gamma
    for i in range(2):
        flux[..., 1 + i, 0] = mv[..., i]
        for j in range(2):
            flux[..., 1 + i, 1 + j] = mv[..., i] * mv[..., j] / r + (p if i == j else 0.0)
    kap = grid.kappa()
    hat = 1j * np.einsum("...ea,...a->...e", np.fft.rfftn(flux, axes=_AXES), kap)
    hat[grid.nyquist_mask()] = 0.0
    return TorusField(grid, _irfft(hat, grid))


# ---------------------------------------------------------------- diagnostics


def _lp(values, p):
    """Discrete L^p norm of the pointwise Euclidean magnitude (trailing axes flattened)."""
    mag = np.sqrt(np.sum(values.reshape(values.shape[:3] + (-1,)) ** 2, axis=-1))
    return float(np.mean(mag**p) ** (1.0 / p))


@dataclass
class NormReport:
    p: float
    lp_z: float
    w2p_w: float

    @property
    def ratio(self):
        return self.w2p_w / self.lp_z if self.lp_z > 0 else float("inf")


def norm_diagnostics(w: TorusField, z: TorusField, p=2.0) -> NormReport:
    """Empirical Calderon-Zygmund ratio ``|w|_{W^{2,p}} / |z|_{L^p}``.

    The ``W^{2,p}``-type norm combines ``w`` with its full spectral Hessian:
    ``(|w|_p^p + |D^2 w|_p^p)^(1/p)``, pointwise norms Euclidean/Frobenius.
    """
    if not 1 < p < np.inf:
        raise ValueError("p must lie in (1, inf)")
    hat = _rfft(w.values)
    kap = w.grid.kappa()
    nyq = w.grid.nyquist_mask()
    hess_sq = np.zeros(w.grid.shape)
    for a in range(3):
        for b in range(a, 3):
            mult = -kap[..., a] * kap[..., b]
            mult[nyq] = 0.0
            dab = _irfft(mult[..., None] * hat, w.grid)
            hess_sq += (1.0 if a == b else 2.0) * np.sum(dab**2, axis=-1)
    hess_p = float(np.mean(hess_sq ** (p / 2.0)))
    w_p = _lp(w.values, p) ** p
    return NormReport(p, _lp(z.values, p), (w_p + hess_p) ** (1.0 / p))
