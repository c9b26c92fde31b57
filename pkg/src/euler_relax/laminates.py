"""Simple laminates, their potentials, empirical Young measures and Jensen-type witnesses.

A laminate between two states ``z1, z2`` oscillates along a direction ``omega``
with the mean-zero two-valued profile ``chi`` (``1 - lam`` on ``[0, lam)``,
``-lam`` on ``[lam, 1)``). Its potential is a rank-one field built from the
periodic, mean-zero second antiderivative of ``chi``.

Envelope values computed here are upper bounds only: a minimum over finitely
many witnesses cannot certify the infimum over all potentials.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import special

from . import symbols, torus
from .errors import MeanNotZero, PreconditionError, WaveConeError
from .torus import TorusField, TorusGrid

# ---------------------------------------------------------------- 1-D profiles


def _check_lambda(lam):
    if not 0.0 < lam < 1.0:
        raise ValueError(f"lambda must lie in (0, 1), got {lam!r}")


def _frac(t, snap=1e-12):
    t = np.asarray(t, dtype=float)
    f = t - np.floor(t)
    # values a rounding error below an integer belong to the next period
    return np.where(f > 1.0 - snap, 0.0, f)


def chi_profile(lam, t):
    """Periodic two-valued profile: ``1 - lam`` on ``[0, lam)``, ``-lam`` on ``[lam, 1)``."""
    _check_lambda(lam)
    f = _frac(t)
    f = np.where(np.abs(f - lam) < 1e-12, lam, f)
    out = np.where(f < lam, 1.0 - lam, -lam)
    return float(out) if out.ndim == 0 else out


def chi_antiderivative(lam, t, order=1):
    """Closed-form periodic mean-zero antiderivatives of :func:`chi_profile`.

    ``order=1`` gives the piecewise linear first antiderivative, ``order=2`` the
    piecewise quadratic second one.
    """
    _check_lambda(lam)
    s = _frac(t)
    lo = s < lam
    if order == 1:
        out = np.where(lo, (1 - lam) * (2 * s - lam) / 2, lam * (1 + lam - 2 * s) / 2)
    elif order == 2:
        g = np.where(lo, (1 - lam) * s * (s - lam) / 2, lam * (s - lam) * (1 - s) / 2)
        out = g - lam * (lam - 1) * (2 * lam - 1) / 12
    else:
        raise ValueError("order must be 1 or 2")
    return float(out) if np.ndim(out) == 0 else out


def chi_fourier(lam, k):
    """Fourier coefficients ``int_0^1 chi(s) exp(-2 pi i k s) ds`` (zero at ``k = 0``)."""
    _check_lambda(lam)
    k = np.asarray(k)
    safe = np.where(k == 0, 1, k)
    out = (1.0 - np.exp(-2j * np.pi * safe * lam)) / (2j * np.pi * safe)
    return np.where(k == 0, 0.0, out)


def _gauss_step_terms(u):
    """Gaussian-smoothed unit step, ramp and half-parabola minus their sharp versions.

    Returns ``(g0, g1, g2)`` with ``g1' = g0`` and ``g2' = g1``; all three decay
    like Gaussian tails on both sides, and ``g2`` absorbs the constant ``1/2``
    that a smoothed parabola gains over the sharp one.
    """
    a = -np.abs(u)
    phi = special.ndtr(a)
    dens = np.exp(-0.5 * u * u) / np.sqrt(2.0 * np.pi)
    sign = np.where(u < 0, 1.0, -1.0)
    g0 = sign * phi
    g1 = a * phi + dens
    g2 = sign * ((u * u + 1.0) * phi + a * dens) / 2.0
    return g0, g1, g2


def smoothed_chi(lam, t, width):
    """``chi`` and its two periodic antiderivatives convolved with a Gaussian of std ``width``.

    Returns ``(second antiderivative, first antiderivative, chi)``, each evaluated
    in closed form (no truncated Fourier series, so any small ``width`` is
    resolved exactly). ``width`` must be well below ``min(lam, 1 - lam)``.
    """
    _check_lambda(lam)
    if not 0 < width <= min(lam, 1 - lam) / 8:
        raise ValueError("smoothing width must be positive and small compared with lambda")
    s = _frac(t)
    base = [chi_antiderivative(lam, s, 2), chi_antiderivative(lam, s, 1), chi_profile(lam, s)]
    p2 = np.asarray(base[0], dtype=float) + 0.5 * width**2 * np.asarray(base[2], dtype=float)
    p1 = np.array(base[1], dtype=float)
    p0 = np.array(base[2], dtype=float)
    # the sharp profile jumps by +1 at integers and by -1 at lam + integers
    for jump_at, size in ((-1.0, 1.0), (lam - 1.0, -1.0), (0.0, 1.0), (lam, -1.0), (1.0, 1.0), (1.0 + lam, -1.0)):
        g0, g1, g2 = _gauss_step_terms((s - jump_at) / width)
        p0 = p0 + size * g0
        p1 = p1 + size * width * g1
        p2 = p2 + size * width**2 * g2
    return p2, p1, p0


def periodic_antiderivative(a, mean_zero_tol=1e-10, method="spectral", axis=-1, atol=0.0):
    """Unique 1-periodic, mean-zero antiderivative of uniformly sampled ``a`` on ``[0, 1)``.

    ``method="spectral"`` integrates the trigonometric interpolant exactly (the
    Nyquist mode, which has no real antiderivative, is dropped).
    ``method="trapezoid"`` uses the cumulative trapezoid rule minus its own mean,
    which is only second-order accurate. The mean test passes when
    ``|mean| <= max(mean_zero_tol * max|a|, atol)``.
    """
    a = np.moveaxis(np.asarray(a, dtype=float), axis, -1)
    n = a.shape[-1]
    if n < 2:
        raise ValueError("need at least two samples")
    mean = a.mean(axis=-1)
    scale = max(float(np.max(np.abs(a))), np.finfo(float).tiny)
    if np.max(np.abs(mean)) > max(mean_zero_tol * scale, atol):
        raise MeanNotZero(f"input mean {np.max(np.abs(mean)):.3e} is not zero", mean=mean)
    if method == "spectral":
        k = np.fft.rfftfreq(n, d=1.0 / n)
        hat = np.fft.rfft(a, axis=-1)
        mult = np.zeros(k.shape, dtype=complex)
        mult[1:] = 1.0 / (2j * np.pi * k[1:])
        if n % 2 == 0:
            mult[-1] = 0.0
        out = np.fft.irfft(hat * mult, n=n, axis=-1)
    elif method == "trapezoid":
        h = 1.0 / n
        ext = np.concatenate([a, a[..., :1]], axis=-1)
        cum = np.concatenate([np.zeros(a.shape[:-1] + (1,)), np.cumsum((ext[..., 1:] + ext[..., :-1]) * h / 2, axis=-1)], axis=-1)
        out = cum[..., :-1]
        out = out - out.mean(axis=-1, keepdims=True)
    else:
        raise ValueError(f"unknown method {method!r}")
    return np.moveaxis(out, -1, axis)


# ---------------------------------------------------------------- measures and profiles


@dataclass(frozen=True)
class DiatomicMeasure:
    z1: np.ndarray
    z2: np.ndarray
    lam: float

    def __post_init__(self):
        _check_lambda(self.lam)
        z1 = np.asarray(getattr(self.z1, "as_vector", lambda: self.z1)(), dtype=float)
        z2 = np.asarray(getattr(self.z2, "as_vector", lambda: self.z2)(), dtype=float)
        if z1.shape != (6,) or z2.shape != (6,):
            raise ValueError("diatomic atoms must be 6-vectors")
        object.__setattr__(self, "z1", z1)
        object.__setattr__(self, "z2", z2)

    @property
    def barycenter(self):
        return self.lam * self.z1 + (1.0 - self.lam) * self.z2

    @property
    def jump(self):
        return self.z1 - self.z2

    @property
    def degenerate(self):
        return not np.any(self.jump)

    def expectation(self, f):
        """``lam f(z1) + (1 - lam) f(z2)``."""
        return float(self.lam * f(self.z1) + (1.0 - self.lam) * f(self.z2))


@dataclass(frozen=True)
class LaminateProfile:
    lam: float
    direction: np.ndarray
    n: int

    def __post_init__(self):
        _check_lambda(self.lam)
        omega = np.asarray(self.direction, dtype=float)
        if omega.shape != (3,) or abs(np.linalg.norm(omega) - 1.0) > 1e-12:
            raise ValueError("direction must be a unit vector (tau, xi1, xi2)")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("number of oscillations must be a positive integer")
        object.__setattr__(self, "direction", omega)

    def phase(self, grid: TorusGrid):
        """``n x . omega`` on the grid; the profile must be periodic on the torus."""
        steps = self.n * self.direction * np.array(grid.periods)
        if np.max(np.abs(steps - np.round(steps))) > 1e-9:
            raise ValueError(f"n * omega * period = {steps} is not integral; laminate is not periodic")
        idx = [np.arange(s) / s for s in grid.shape]
        cells = np.meshgrid(*idx, indexing="ij")
        return sum(np.round(steps[a]) * cells[a] for a in range(3))


def _check_wavecone(mu, omega, tol):
    if mu.degenerate:
        return
    dist = symbols.directional_residual(mu.jump, omega)
    if dist > tol:
        raise WaveConeError(f"z1 - z2 is not in ker A(omega): residual {dist:.3e}", distance=dist)


def potential_amplitude(mu: DiatomicMeasure, omega, tol=1e-6):
    """``xi = pinv(B(omega)) (z1 - z2)``; raises if the jump is not in the image of ``B(omega)``."""
    omega = np.asarray(omega, dtype=float)
    bmat = symbols.potential_symbol(omega)
    xi = symbols.pseudoinverse(bmat) @ mu.jump
    scale = max(np.linalg.norm(mu.jump), np.finfo(float).tiny)
    res = float(np.linalg.norm(bmat @ xi - mu.jump) / scale)
    if res > tol:
        raise WaveConeError(f"z1 - z2 is not in the image of B(omega): residual {res:.3e}", residual=res)
    return xi


def laminate_field(mu: DiatomicMeasure, prof: LaminateProfile, grid: TorusGrid, wavecone_tol=1e-6) -> TorusField:
    """Sampled laminate ``bar + (z1 - z2) chi(n x . omega)``."""
    _check_wavecone(mu, prof.direction, wavecone_tol)
    chi = chi_profile(prof.lam, prof.phase(grid))
    values = mu.barycenter + chi[..., None] * mu.jump
    return TorusField(grid, values)


def laminate_potential(mu: DiatomicMeasure, prof: LaminateProfile, grid: TorusGrid, image_tol=1e-6) -> TorusField:
    """Rank-one potential ``xi n^-2 psi(n x . omega)`` with ``psi'' = chi``."""
    xi = potential_amplitude(mu, prof.direction, image_tol)
    psi = chi_antiderivative(prof.lam, prof.phase(grid), order=2) / prof.n**2
    return TorusField(grid, psi[..., None] * xi)


# ---------------------------------------------------------------- empirical measures


@dataclass
class EmpiricalMeasure:
    """Uniformly weighted point cloud of grid values."""

    samples: np.ndarray  # (n_points, c)
    weights: np.ndarray = field(default=None)

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        if self.weights is None:
            self.weights = np.full(len(self.samples), 1.0 / len(self.samples))

    def integrate(self, f, weight=None):
        """Weighted mean of ``f`` (``weight`` is a test density with unit mean, one value per sample)."""
        vals = np.asarray(f(self.samples), dtype=float)
        w = self.weights if weight is None else self.weights * np.asarray(weight, dtype=float).ravel()
        return float(np.sum(w * vals))

    def test_against(self, f, target, weight=None):
        """``|integral of f against the measure - target|``."""
        return abs(self.integrate(f, weight) - target)


def empirical_measure(f: TorusField) -> EmpiricalMeasure:
    return EmpiricalMeasure(f.values.reshape(-1, f.components))


def two_point_fraction(f: TorusField, z1, z2, atol=1e-9):
    """Fraction of grid points within ``atol`` of ``z1`` or ``z2``."""
    v = f.values.reshape(-1, f.components)
    near = (np.max(np.abs(v - z1), axis=1) <= atol) | (np.max(np.abs(v - z2), axis=1) <= atol)
    return float(np.mean(near))


# ---------------------------------------------------------------- test functions


@dataclass(frozen=True)
class Polynomial:
    """Polynomial in the six state components, ``sum coef * prod z_i**p_i``."""

    coefs: tuple
    powers: tuple  # one 6-tuple of nonnegative exponents per coefficient

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        out = np.zeros(z.shape[:-1])
        for c, p in zip(self.coefs, self.powers):
            term = np.full(z.shape[:-1], float(c))
            for i, e in enumerate(p):
                if e:
                    term = term * z[..., i] ** e
            out = out + term
        return out if out.ndim else float(out)

    @classmethod
    def from_config(cls, cfg):
        """Build from ``{"terms": [{"coef": c, "powers": [p0, ..., p5]}, ...]}`` or its JSON text."""
        if isinstance(cfg, str):
            cfg = json.loads(cfg)
        coefs, powers = [], []
        for term in cfg["terms"]:
            p = tuple(int(e) for e in term["powers"])
            if len(p) != 6 or min(p) < 0:
                raise ValueError(f"powers must be six nonnegative integers, got {term['powers']}")
            coefs.append(float(term["coef"]))
            powers.append(p)
        return cls(tuple(coefs), tuple(powers))

    @classmethod
    def quadratic_form(cls, matrix, linear=None, constant=0.0):
        """``z^T matrix z + linear . z + constant``."""
        matrix = np.asarray(matrix, dtype=float)
        coefs, powers = [constant], [(0,) * 6]
        for i in range(6):
            for j in range(6):
                if matrix[i, j]:
                    p = [0] * 6
                    p[i] += 1
                    p[j] += 1
                    coefs.append(matrix[i, j])
                    powers.append(tuple(p))
        if linear is not None:
            for i, c in enumerate(linear):
                if c:
                    p = [0] * 6
                    p[i] = 1
                    coefs.append(float(c))
                    powers.append(tuple(p))
        return cls(tuple(coefs), tuple(powers))


# ---------------------------------------------------------------- witnesses


def smoothstep(s):
    """Quintic ``C^2`` step on ``[0, 1]`` with its first two derivatives."""
    s = np.clip(s, 0.0, 1.0)
    v = s**3 * (10 - 15 * s + 6 * s * s)
    d1 = 30 * s**2 * (1 - s) ** 2
    d2 = 60 * s * (1 - s) * (1 - 2 * s)
    return v, d1, d2


def cutoff(x, delta):
    """``C^2`` cutoff on ``[0, 1]``: 0 at the ends, 1 farther than ``delta`` from them.

    Returns the value and the first two derivatives; ``|D^j| <= C delta^-j``.
    """
    x = np.asarray(x, dtype=float)
    left = smoothstep(x / delta)
    right = smoothstep((1.0 - x) / delta)
    v = left[0] * right[0]
    d1 = left[1] * right[0] / delta - left[0] * right[1] / delta
    d2 = left[2] * right[0] / delta**2 - 2 * left[1] * right[1] / delta**2 + left[0] * right[2] / delta**2
    return v, d1, d2


def _gauss_nodes(delta, order):
    """Quadrature on ``[0, 1]`` split at ``delta`` and ``1 - delta``; one node on the flat middle."""
    g, w = np.polynomial.legendre.leggauss(order)
    left = (g + 1) * delta / 2
    nodes = np.concatenate([left, [0.5], 1.0 - left[::-1]])
    weights = np.concatenate([w * delta / 2, [1.0 - 2 * delta], w[::-1] * delta / 2])
    return nodes, weights


class Witness:
    """A potential supported in the unit cell that can be tested against ``f``."""

    def second_derivative_sup(self) -> float:
        raise NotImplementedError

    def mean_value(self, f, z) -> float:
        raise NotImplementedError

    def check_support(self):
        """Raise :class:`PreconditionError` unless the witness vanishes at the cell boundary."""


class RankOneWitness(Witness):
    """Cut-off, mollified laminate potential ``xi s(t, x, y)`` with a separable scalar ``s``.

    Along the oscillation axis ``s`` is ``n^-2 P(n x) phi(x)`` where ``P`` is the
    second antiderivative of ``chi`` smoothed by a Gaussian of standard
    deviation ``smoothing`` (in the fast variable, i.e. ``smoothing/n``
    physically; default ``delta/3``, so the smoothing reaches about ``delta``);
    along the other two axes ``s`` is the cutoff ``phi`` with layers of width
    ``delta``. Averages use Gauss-Legendre nodes on the cutoff layers and a
    uniform periodic grid along the oscillation axis.
    """

    def __init__(self, xi, axis, n, lam, delta=0.01, samples_per_period=128, order=6, sup_nodes=9, smoothing=None):
        _check_lambda(lam)
        if not 0 < delta < min(lam, 1 - lam) / 6:
            raise ValueError("delta must be small compared with lambda")
        self.smoothing = delta / 3.0 if smoothing is None else float(smoothing)
        self.xi = np.asarray(xi, dtype=float)
        self.axis = int(axis)
        self.n = int(n)
        self.lam = lam
        self.delta = delta
        self.samples_per_period = samples_per_period
        self.order = order
        self.sup_nodes = sup_nodes
        pairs = [(a, b) for a in range(3) for b in range(a, 3)]
        # symmetric Hessian: off-diagonal coefficients enter twice
        self._coef = {
            (a, b): (1.0 if a == b else 2.0) * symbols.POTENTIAL_COEF[a, b] @ self.xi for a, b in pairs
        }
        self._build()

    def _profile(self):
        m = self.samples_per_period
        return smoothed_chi(self.lam, np.arange(m) / m, self.smoothing)

    def _build(self):
        n, m = self.n, self.samples_per_period
        self.osc_nodes = np.arange(n * m) / (n * m)
        self.osc_weights = np.full(n * m, 1.0 / (n * m))
        p0, p1, p2 = (np.tile(p, n) for p in self._profile())
        phi, dphi, d2phi = cutoff(self.osc_nodes, self.delta)
        self.osc = (
            p0 * phi / n**2,
            p1 * phi / n + p0 * dphi / n**2,
            p2 * phi + 2 * p1 * dphi / n + p0 * d2phi / n**2,
        )

    def _flat(self, kind):
        if kind == "quad":
            nodes, weights = _gauss_nodes(self.delta, self.order)
        else:
            layer = np.linspace(0.0, self.delta, self.sup_nodes)
            nodes = np.concatenate([layer, [0.5], 1.0 - layer[::-1]])
            weights = np.zeros_like(nodes)
        return cutoff(nodes, self.delta), weights

    def _hessian_chunks(self, kind="quad"):
        """Yield ``(weights, {(a, b): H_ab})`` chunks (``a <= b``), one per node of the first flat axis."""
        first, second = [a for a in range(3) if a != self.axis]
        g1, w1 = self._flat(kind)
        g2, w2 = g1, w1
        g3, w3 = self.osc, self.osc_weights
        for i in range(len(w1)):
            block = {}
            for a, b in self._coef:
                order = [0, 0, 0]
                order[a] += 1
                order[b] += 1
                v1 = g1[order[first]][i]
                v2 = g2[order[second]][:, None]
                v3 = g3[order[self.axis]][None, :]
                block[a, b] = (v1 * v2 * v3).ravel()
            yield (w1[i] * w2[:, None] * w3[None, :]).ravel(), block

    def second_derivative_sup(self):
        """Sampled sup of the pointwise Frobenius norm of the Hessian of ``xi s``."""
        best = 0.0
        for _, h in self._hessian_chunks("sup"):
            fro = np.sqrt(sum((1.0 if a == b else 2.0) * h[a, b] ** 2 for a, b in h))
            best = max(best, float(fro.max()))
        return best * float(np.linalg.norm(self.xi))

    def potential_image(self, h):
        return sum(np.outer(h[key], self._coef[key]) for key in h)

    def mean_value(self, f, z):
        z = np.asarray(z, dtype=float)
        total = 0.0
        for w, h in self._hessian_chunks():
            total += float(np.sum(w * f(z + self.potential_image(h))))
        return total

    def check_support(self):
        # the cutoff vanishes identically on the cell boundary by construction
        return None


class GridWitness(Witness):
    """A potential sampled on a torus grid; derivatives are spectral."""

    def __init__(self, w: TorusField, support_tol=1e-10):
        if w.components != 9:
            raise ValueError("witness potentials have 9 components")
        self.w = w
        self.support_tol = support_tol

    def second_derivative_sup(self):
        hess_sq = np.zeros(self.w.grid.shape)
        for a in range(3):
            for b in range(a, 3):
                dab = torus.derivative(self.w, (a, b)).values
                hess_sq += (1.0 if a == b else 2.0) * np.sum(dab**2, axis=-1)
        return float(np.sqrt(hess_sq.max()))

    def mean_value(self, f, z):
        vals = np.asarray(z, dtype=float) + torus.apply_potential_operator(self.w).values
        return float(np.mean(f(vals.reshape(-1, 6))))

    def check_support(self):
        v = np.abs(self.w.values)
        scale = max(float(v.max()), np.finfo(float).tiny)
        edge = max(float(v[0].max()), float(v[:, 0].max()), float(v[:, :, 0].max()))
        if edge > self.support_tol * scale:
            raise PreconditionError("witness does not vanish on the cell boundary", boundary_max=edge)


def envelope_upper_bound(f: Callable, z, q, witnesses: Sequence[Witness] = (), mode="strict", rel_tol=1e-12):
    """Upper bound on the truncated envelope at ``z`` from a finite witness family.

    The zero potential is always admissible, so the result never exceeds
    ``f(z)``. In ``mode="strict"`` a witness whose second-derivative bound
    exceeds ``q`` raises :class:`PreconditionError`; ``mode="filter"`` skips it.
    """
    if mode not in ("strict", "filter"):
        raise ValueError(f"unknown mode {mode!r}")
    z = np.asarray(z, dtype=float)
    best = float(f(z))
    for wit in witnesses:
        wit.check_support()
        bound = wit.second_derivative_sup()
        if bound > q * (1 + rel_tol):
            if mode == "strict":
                raise PreconditionError(f"witness second derivatives {bound:.6g} exceed q = {q:.6g}", bound=bound, q=q)
            continue
        best = min(best, wit.mean_value(f, z))
    return best


def inverse_constant(n_samples=10_000):
    """``max |pinv B(omega)|_2`` over a deterministic sphere sample."""
    pinv = symbols.pseudoinverse(symbols.potential_symbol(symbols.fibonacci_sphere(n_samples)))
    return float(np.max(np.linalg.norm(pinv, ord=2, axis=(-2, -1))))


@dataclass
class JensenReport:
    lhs: float  # mean of f(bar + B u)
    rhs: float  # lam f(z1) + (1 - lam) f(z2)
    eps: float
    d2_sup: float
    jump: float
    n: int
    c_bound: float

    @property
    def c_measured(self):
        """``|D^2 u|_inf / (|z1 - z2| (1 + 1/sqrt(n)))``."""
        if self.jump == 0:
            return 0.0
        return self.d2_sup / (self.jump * (1.0 + 1.0 / np.sqrt(self.n)))

    @property
    def margin_a(self):
        return self.rhs + self.eps - self.lhs

    @property
    def margin_b(self):
        return self.c_bound * self.jump * (1.0 + 1.0 / np.sqrt(self.n)) - self.d2_sup

    @property
    def passed(self):
        return self.margin_a >= 0 and self.margin_b >= 0


_C_INV = None


def jensen_witness_check(mu: DiatomicMeasure, f, n, eps=0.05, delta=0.01, omega=None, c_bound=None, **witness_opts):
    """Build the cut-off laminate witness for ``mu`` and test both Jensen-type bounds.

    ``omega`` defaults to the wave-cone minimizer of ``z1 - z2`` and must be a
    coordinate axis. ``c_bound`` defaults to ``2 max |pinv B(omega)|``, the
    interior value of the bound (``|chi| <= 1``) with a factor two for the
    cutoff layers.
    """
    global _C_INV
    if c_bound is None:
        if _C_INV is None:
            _C_INV = inverse_constant()
        c_bound = 2.0 * _C_INV
    rhs = mu.expectation(f)
    jump = float(np.linalg.norm(mu.jump))
    if mu.degenerate:
        return JensenReport(float(f(mu.barycenter)), rhs, eps, 0.0, 0.0, n, c_bound)
    if omega is None:
        wc = symbols.wavecone_distance(mu.jump)
        if not wc.member:
            raise WaveConeError(f"z1 - z2 is not wave-cone connected: distance {wc.distance:.3e}", distance=wc.distance)
        omega = wc.minimizer
    omega = np.asarray(omega, dtype=float)
    axis = int(np.argmax(np.abs(omega)))
    if abs(abs(omega[axis]) - 1.0) > 1e-9:
        raise ValueError(f"separable witness needs a coordinate direction, got {omega}")
    _check_wavecone(mu, omega, 1e-6)
    xi = potential_amplitude(mu, omega)
    wit = RankOneWitness(xi, axis, n, mu.lam, delta=delta, **witness_opts)
    return JensenReport(wit.mean_value(f, mu.barycenter), rhs, eps, wit.second_derivative_sup(), jump, n, c_bound)
