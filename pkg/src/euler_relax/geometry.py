"""Convex polytopes given by vertices, their hyperplane slices and Hausdorff distances,
plus the Euclidean distance to the constitutive set of the relaxed Euler system.
"""

from __future__ import annotations

import itertools
import json
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.spatial import ConvexHull

from . import states
from .errors import EmptyConstitutiveSet, EmptySlice

# ---------------------------------------------------------------- polytopes


@dataclass(frozen=True)
class Polytope:
    """Convex hull of finitely many points in ``R^n``."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        if v.size == 0 or v.shape[0] < 1:
            raise ValueError("a polytope needs at least one vertex")
        if not np.all(np.isfinite(v)):
            raise ValueError("vertex coordinates must be finite")
        object.__setattr__(self, "vertices", v)

    @property
    def dim(self):
        return self.vertices.shape[1]

    def section(self):
        """Drop the last coordinate (the slicing coordinate)."""
        return Polytope(self.vertices[:, :-1])

    def to_json(self):
        return json.dumps({"vertices": self.vertices.tolist()})

    @classmethod
    def from_json(cls, text):
        data = json.loads(text) if isinstance(text, str) else text
        return cls(np.asarray(data["vertices"], dtype=float))

    @classmethod
    def cube(cls, n=3, lo=0.0, hi=1.0):
        return cls(np.array(list(itertools.product([lo, hi], repeat=n)), dtype=float))

    @classmethod
    def simplex(cls, n=3):
        return cls(np.vstack([np.zeros(n), np.eye(n)]))

    @classmethod
    def cross_polytope(cls, n=3, radius=1.0):
        eye = np.eye(n) * radius
        return cls(np.vstack([eye, -eye]))


def extreme_points(points, tol=1e-12):
    """Reduce a point cloud to the vertices of its convex hull."""
    pts = np.unique(np.round(np.asarray(points, dtype=float), 14), axis=0)
    if len(pts) <= 1:
        return pts
    center = pts.mean(axis=0)
    _, s, vt = np.linalg.svd(pts - center, full_matrices=False)
    scale = max(s[0], 1.0)
    r = int(np.sum(s > tol * scale))
    if r == 0:
        return pts[:1]
    coords = (pts - center) @ vt[:r].T
    if r == 1:
        return pts[[np.argmin(coords[:, 0]), np.argmax(coords[:, 0])]]
    hull = ConvexHull(coords)
    return pts[np.sort(hull.vertices)]


def polytope_slice(K: Polytope, level, tol=1e-12) -> Polytope:
    """``K`` intersected with ``{z_n = level}``; coordinates keep the level as last entry.

    Every segment between two vertices on opposite sides of the level
    contributes its crossing point; vertices on the level are kept. The hull
    of these points is the slice.
    """
    v = K.vertices
    h = v[:, -1] - level
    span = max(float(np.ptp(v[:, -1])), 1.0)
    if h.min() > tol * span or h.max() < -tol * span:
        raise EmptySlice(
            f"level {level} outside [{v[:, -1].min()}, {v[:, -1].max()}]", level=level
        )
    on = np.abs(h) <= tol * span
    pts = [v[on]]
    below, above = np.flatnonzero(h < -tol * span), np.flatnonzero(h > tol * span)
    if below.size and above.size:
        i, j = np.meshgrid(below, above, indexing="ij")
        i, j = i.ravel(), j.ravel()
        t = h[i] / (h[i] - h[j])
        pts.append(v[i] + t[:, None] * (v[j] - v[i]))
    pts = np.vstack(pts)
    pts[:, -1] = level
    return Polytope(extreme_points(pts))


# ---------------------------------------------------------------- distances


def _affine_minimizer(pts):
    """Coefficients (summing to one) of the min-norm point of the affine hull of ``pts``."""
    k = len(pts)
    kkt = np.zeros((k + 1, k + 1))
    kkt[:k, :k] = pts @ pts.T
    kkt[:k, k] = 1.0
    kkt[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
    return sol[:k]


def min_norm_point(points, tol=1e-12, max_iter=1000):
    """Wolfe's algorithm: the point of ``conv(points)`` closest to the origin."""
    P = np.asarray(points, dtype=float)
    scale = max(float(np.max(np.sum(P * P, axis=1))), 1e-300)
    j = int(np.argmin(np.sum(P * P, axis=1)))
    S, lam = [j], np.array([1.0])
    x = P[j].copy()
    for _ in range(max_iter):
        g = P @ x
        j = int(np.argmin(g))
        if x @ x - g[j] <= tol * scale or j in S:
            break
        S.append(j)
        lam = np.append(lam, 0.0)
        while True:
            alpha = _affine_minimizer(P[S])
            if np.all(alpha > tol):
                lam = alpha
                break
            neg = alpha <= tol
            theta = np.min(lam[neg] / (lam[neg] - alpha[neg]))
            lam = lam + theta * (alpha - lam)
            keep = lam > tol
            if not np.any(keep):
                keep[np.argmax(lam)] = True
            S = [s for s, k in zip(S, keep) if k]
            lam = lam[keep] / lam[keep].sum()
        x = lam @ P[S]
    return x


def point_polytope_distance(p, Q: Polytope, method="wolfe"):
    """Euclidean distance from ``p`` to ``conv(Q.vertices)``.

    ``method="enumerate"`` projects onto the affine hull of every affinely
    independent vertex subset and keeps the feasible candidates; it is exact
    and exhaustive, meant as an oracle for small vertex counts.
    """
    p = np.asarray(p, dtype=float)
    V = Q.vertices - p
    if method == "wolfe":
        return float(np.linalg.norm(min_norm_point(V)))
    if method != "enumerate":
        raise ValueError(f"unknown method {method!r}")
    best = float(np.min(np.linalg.norm(V, axis=1)))
    n = V.shape[1]
    for size in range(2, min(len(V), n + 1) + 1):
        for idx in itertools.combinations(range(len(V)), size):
            sub = V[list(idx)]
            diffs = sub[1:] - sub[0]
            if np.linalg.matrix_rank(diffs, tol=1e-12) < size - 1:
                continue
            alpha = _affine_minimizer(sub)
            if np.all(alpha >= -1e-14):
                best = min(best, float(np.linalg.norm(alpha @ sub)))
    return best


def hausdorff_distance(P: Polytope, Q: Polytope, method="wolfe"):
    """Hausdorff distance of two convex polytopes (sup attained at vertices)."""
    if P is None or Q is None:
        raise ValueError("both polytopes must be nonempty")
    if P.dim != Q.dim:
        raise ValueError(f"dimension mismatch: {P.dim} vs {Q.dim}")
    d_pq = max(point_polytope_distance(v, Q, method) for v in P.vertices)
    d_qp = max(point_polytope_distance(v, P, method) for v in Q.vertices)
    return max(d_pq, d_qp)


# ---------------------------------------------------------------- slice continuity


@dataclass
class SliceAudit:
    a_k: float  # max over pairs of d_H / |f(x) - f(y)|
    modulus: dict  # delta -> max d_H over pairs with |x - y| <= delta
    distances: np.ndarray = field(repr=False)
    ratios: np.ndarray = field(repr=False)
    oracle_gap: float  # max |wolfe - enumeration| over pairs, nan if not computed
    compare: str = "section"

    @property
    def consistent(self):
        """The reported constant bounds every sampled ratio (internal consistency)."""
        return bool(np.all(self.ratios <= self.a_k * (1 + 1e-12) + 1e-15))


def slice_continuity_audit(K: Polytope, xs, fs, delta_grid=(), compare="section", oracle=True):
    """Empirical slope ``a_K`` and modulus of continuity of ``x -> K cap {z_n = f(x)}``.

    ``compare="section"`` measures slices in the first ``n-1`` coordinates;
    ``"ambient"`` keeps the level, which adds ``|f(x) - f(y)|`` in the last entry.
    """
    if compare not in ("section", "ambient"):
        raise ValueError(f"unknown compare mode {compare!r}")
    xs = np.asarray(xs, dtype=float)
    xs = xs[:, None] if xs.ndim == 1 else xs
    fs = np.asarray(fs, dtype=float)
    slices = []
    for level in fs:
        s = polytope_slice(K, level)
        slices.append(s.section() if compare == "section" else s)
    m = len(fs)
    pairs = list(itertools.combinations(range(m), 2))
    dist = np.zeros(len(pairs))
    ratios = np.zeros(len(pairs))
    gap = 0.0 if oracle else float("nan")
    for k, (i, j) in enumerate(pairs):
        dist[k] = hausdorff_distance(slices[i], slices[j])
        if oracle:
            gap = max(gap, abs(dist[k] - hausdorff_distance(slices[i], slices[j], method="enumerate")))
        df = abs(fs[i] - fs[j])
        ratios[k] = dist[k] / df if df > 0 else (0.0 if dist[k] == 0 else np.inf)
    sep = np.array([np.linalg.norm(xs[i] - xs[j]) for i, j in pairs])
    modulus = {float(d): float(dist[sep <= d].max()) if np.any(sep <= d) else 0.0 for d in delta_grid}
    a_k = float(ratios.max()) if len(ratios) else 0.0
    return SliceAudit(a_k, modulus, dist, ratios, gap, compare)


# ---------------------------------------------------------------- constitutive set


@dataclass(frozen=True)
class ConstitutiveSpec:
    """``{Q = q_level, rho >= eta/2, rho^gamma + (2/d) e_kin <= Q, |z| <= big_r}``."""

    eta: float
    big_r: float
    q_level: float

    def __post_init__(self):
        if not (self.eta > 0 and self.big_r > 0 and self.q_level > 0):
            raise ValueError("eta, big_r and q_level must be positive")
        if self.eta > self.big_r:
            raise ValueError("eta must not exceed big_r")
        if self.q_level < self.eta**states.GAMMA:
            raise ValueError("q_level must be at least eta**gamma")

    @property
    def rho_floor(self):
        return self.eta / 2.0

    def witness(self, rho):
        """Member ``(rho, 0, 0, 0, 0, q_level)`` for ``rho`` in ``[eta/2, q_level^(1/gamma)]``."""
        return np.array([rho, 0.0, 0.0, 0.0, 0.0, self.q_level])


def constitutive_excess(z, spec: ConstitutiveSpec):
    """Largest violation among the defining constraints (nonpositive for members)."""
    z = np.asarray(z, dtype=float)
    rho = z[0]
    if rho <= 0:
        return max(spec.rho_floor - rho, abs(z[5] - spec.q_level))
    energy = rho**states.GAMMA + (2.0 / states.D) * float(states.kinetic_energy_vec(z))
    return max(
        abs(z[5] - spec.q_level),
        spec.rho_floor - rho,
        energy - spec.q_level,
        float(np.linalg.norm(z)) - spec.big_r,
    )


def _check_nonempty(spec):
    w = spec.witness(spec.rho_floor)
    excess = constitutive_excess(w, spec)
    if excess > 0:
        raise EmptyConstitutiveSet("constitutive set is empty", witness_excess=excess)


def _fiber(rho, m, spec):
    """Admissible ``(M11, M12)`` for fixed ``(rho, m)``: the disk ``|M - c| <= r`` of the
    energy constraint intersected with the disk ``|M| <= r_ball`` left by the ball.

    Returns ``(c, r, r_ball_sq)``; ``r`` and ``r_ball_sq`` may be negative (empty fiber).
    """
    q = spec.q_level
    center = np.array([(m[0] ** 2 - m[1] ** 2) / (2 * rho), m[0] * m[1] / rho])
    radius = q - rho**states.GAMMA - (m @ m) / (2 * rho)
    ball_sq = spec.big_r**2 - q**2 - rho**2 - m @ m
    return center, radius, ball_sq


def project_two_disks(p, c, r, r0):
    """Nearest point to ``p`` in ``{|x - c| <= r} cap {|x| <= r0}`` (assumed nonempty)."""
    p, c = np.asarray(p, dtype=float), np.asarray(c, dtype=float)
    r, r0 = max(r, 0.0), max(r0, 0.0)

    def to_disk(x, center, rad):
        off = x - center
        n = float(np.linalg.norm(off))
        return x if n <= rad else center + off * (rad / n)

    a = to_disk(p, c, r)
    if np.linalg.norm(a) <= r0 * (1 + 1e-14) + 1e-300:
        return a
    b = to_disk(p, np.zeros(2), r0)
    if np.linalg.norm(b - c) <= r * (1 + 1e-14) + 1e-300:
        return b
    d = float(np.linalg.norm(c))
    if d == 0.0:
        return to_disk(p, c, min(r, r0))
    u = c / d
    along = (r0**2 - r**2 + d**2) / (2 * d)
    h = np.sqrt(max(r0**2 - along**2, 0.0))
    perp = np.array([-u[1], u[0]])
    cands = [along * u + h * perp, along * u - h * perp]
    return min(cands, key=lambda x: float(np.linalg.norm(x - p)))


def _solve_reduced(z, spec, objective, feasibility, rho_max):
    """Minimize a convex objective over ``(rho, m)`` with SLSQP from several feasible starts."""
    q, floor = spec.q_level, spec.rho_floor
    mz = z[1:3]
    rho0 = float(np.clip(z[0], floor, rho_max))
    starts = [np.array([rho0, 0.0, 0.0])]
    nm = float(np.linalg.norm(mz))
    for shrink in (0.5, 0.9):
        cap = np.sqrt(max(2 * rho0 * (q - rho0**states.GAMMA), 0.0))
        cap = min(cap, np.sqrt(max(spec.big_r**2 - q**2 - rho0**2, 0.0))) * shrink
        starts.append(np.array([rho0, *(mz * min(1.0, cap / nm))]) if nm > 0 else starts[0])
    best, best_val = starts[0], objective(starts[0])
    for x0 in starts:
        for _ in range(2):  # the second pass restarts from the first result as a polish
            with warnings.catch_warnings():
                # SLSQP clips its own out-of-bounds line-search steps; the result is checked below
                warnings.filterwarnings("ignore", message="Values in x were outside bounds")
                res = minimize(
                    objective,
                    x0,
                    method="SLSQP",
                    bounds=[(floor, rho_max), (None, None), (None, None)],
                    constraints=[{"type": "ineq", "fun": feasibility}],
                    options={"ftol": 1e-16, "maxiter": 500},
                )
            x0 = np.clip(res.x, [floor, -np.inf, -np.inf], [rho_max, np.inf, np.inf])
            if np.min(feasibility(x0)) >= -1e-12 and objective(x0) < best_val:
                best, best_val = x0, objective(x0)
    return best


def project_constitutive(z, spec: ConstitutiveSpec):
    """Euclidean projection onto the constitutive set.

    For fixed ``(rho, m)`` the admissible ``M`` form a disk (intersected with a
    second disk when the outer ball is active), whose projection is closed-form.
    The convex problem thus reduces to three variables ``(rho, m)``. The ball
    is ignored first; if that projection already lies in the ball it is the answer.
    """
    z = np.asarray(z, dtype=float)
    _check_nonempty(spec)
    q = spec.q_level
    Mz = z[3:5]

    def free_objective(x):
        c, r, _ = _fiber(x[0], x[1:3], spec)
        # smooth extension to r < 0 keeps SLSQP steps well defined
        excess = max(0.0, float(np.linalg.norm(Mz - c)) - r)
        return (x[0] - z[0]) ** 2 + float((x[1:3] - z[1:3]) @ (x[1:3] - z[1:3])) + excess**2

    def free_feasibility(x):
        return np.array([_fiber(x[0], x[1:3], spec)[1]])

    def free_point(x):
        c, r, _ = _fiber(x[0], x[1:3], spec)
        return project_two_disks(Mz, c, r, np.inf)

    x = _solve_reduced(z, spec, free_objective, free_feasibility, q ** (1.0 / states.GAMMA))
    M = free_point(x)
    out = np.array([x[0], x[1], x[2], M[0], M[1], q])
    if np.linalg.norm(out) <= spec.big_r:
        return out

    def inner(x):
        c, r, ball_sq = _fiber(x[0], x[1:3], spec)
        return project_two_disks(Mz, c, r, np.sqrt(max(ball_sq, 0.0)))

    def objective(x):
        M = inner(x)
        return (x[0] - z[0]) ** 2 + float((x[1:3] - z[1:3]) @ (x[1:3] - z[1:3])) + float((M - Mz) @ (M - Mz))

    def feasibility(x):
        c, r, ball_sq = _fiber(x[0], x[1:3], spec)
        return np.array([r, ball_sq, r + np.sqrt(max(ball_sq, 0.0)) - np.linalg.norm(c)])

    rho_max = min(q ** (1.0 / states.GAMMA), np.sqrt(spec.big_r**2 - q**2))
    x = _solve_reduced(z, spec, objective, feasibility, rho_max)
    M = inner(x)
    return np.array([x[0], x[1], x[2], M[0], M[1], q])


def constitutive_distance(z, spec: ConstitutiveSpec, member_tol=1e-12):
    """Euclidean distance from ``z`` to the constitutive set; exactly 0 for members."""
    z = np.asarray(z, dtype=float)
    if z.shape != (6,):
        raise ValueError(f"expected a 6-vector, got shape {z.shape}")
    _check_nonempty(spec)
    if constitutive_excess(z, spec) <= member_tol:
        return 0.0
    return float(np.linalg.norm(z - project_constitutive(z, spec)))
