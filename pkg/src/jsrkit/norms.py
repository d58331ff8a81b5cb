"""Candidate norm models and extremal / Barabanov norm machinery.

A norm model is a computable vector norm together with its induced matrix
norm.  Five kinds are supported:

* ``euclidean`` -- the Euclidean norm; induced norm = largest singular value.
* ``max_entry`` -- the sup norm max|v_i|; induced norm = max abs row sum.
* ``weighted_diag`` -- max_i w_i |v_i| with positive weights.
* ``polytope`` -- Minkowski gauge of a symmetric vertex polytope (real, any d).
* ``angular_grid`` -- piecewise-linear-in-angle norm on R^2, stored as the
  norm values h_j on uniformly spaced unit directions.

The Barabanov construction iterates nu_{k+1}(v) = max_i nu_k(A_i v)/rho_k
on an angular grid (d = 2) or by symmetric vertex propagation (d <= 4).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull

from . import _kernels
from .cocycle import prefix_values
from .errors import InputError, NumericalError
from .matrices import MatrixSet, operator_norm

__all__ = [
    "NormModel",
    "BarabanovCertificate",
    "check_extremal",
    "barabanov_iterate",
    "extremal_norm_2d",
    "classify_extremality",
    "kozyakin_extremal_witness",
    "test_directions",
]

_LN = math.log


@dataclass(frozen=True)
class NormModel:
    """A computable vector norm with its induced matrix norm.

    ``params`` holds kind-specific data: nothing (euclidean / max_entry),
    ``weights`` (weighted_diag), ``vertices`` as an (m, d) array (polytope),
    or ``values`` as the length-m array of norm values on the uniform
    angular grid (angular_grid).
    """

    kind: str
    dim: int
    weights: np.ndarray = None
    vertices: np.ndarray = None
    values: np.ndarray = None
    submultiplicative: bool = True

    def __post_init__(self):
        if self.kind not in (
            "euclidean",
            "max_entry",
            "weighted_diag",
            "polytope",
            "angular_grid",
        ):
            raise InputError(f"unknown norm kind {self.kind!r}")
        if self.dim < 1:
            raise InputError("dimension must be >= 1")
        if self.kind == "weighted_diag":
            w = np.asarray(self.weights, dtype=np.float64)
            if w.shape != (self.dim,) or np.any(w <= 0) or not np.all(np.isfinite(w)):
                raise InputError("weights must be positive finite, one per axis")
            object.__setattr__(self, "weights", w)
        if self.kind == "polytope":
            v = np.asarray(self.vertices, dtype=np.float64)
            if v.ndim != 2 or v.shape[1] != self.dim:
                raise InputError("vertices must be an (m, d) array")
            if np.linalg.matrix_rank(v) < self.dim:
                raise InputError("polytope vertices must span R^d")
            # symmetry: each vertex must have its negation in the set
            for row in v:
                if np.min(np.linalg.norm(v + row, axis=1)) > 1e-9 * (
                    1 + np.linalg.norm(row)
                ):
                    raise InputError("polytope vertex set must be symmetric")
            object.__setattr__(self, "vertices", v)
        if self.kind == "angular_grid":
            if self.dim != 2:
                raise InputError("angular_grid norms exist only in dimension 2")
            h = np.asarray(self.values, dtype=np.float64)
            if h.ndim != 1 or h.shape[0] < 8 or h.shape[0] % 2 != 0:
                raise InputError("angular grid needs an even number >= 8 of values")
            if np.any(h <= 0) or not np.all(np.isfinite(h)):
                raise InputError("grid norm values must be positive finite")
            m = h.shape[0]
            if np.max(np.abs(h - np.roll(h, m // 2))) > 1e-9 * np.max(h):
                raise InputError("grid values must be antipodally symmetric")
            object.__setattr__(self, "values", h)

    # ---- vector norm -------------------------------------------------

    def _grid_ball_vertices(self):
        m = self.values.shape[0]
        theta = 2.0 * math.pi * np.arange(m) / m
        return np.cos(theta) / self.values, np.sin(theta) / self.values

    def vector_many(self, points: np.ndarray) -> np.ndarray:
        """Norms of the rows of an (n, d) real or complex array."""
        points = np.asarray(points)
        if points.ndim == 1:
            points = points[None, :]
        if points.shape[1] != self.dim:
            raise InputError("vector dimension mismatch")
        if self.kind == "euclidean":
            return np.linalg.norm(points, axis=1)
        if self.kind == "max_entry":
            return np.max(np.abs(points), axis=1)
        if self.kind == "weighted_diag":
            return np.max(self.weights[None, :] * np.abs(points), axis=1)
        if np.max(np.abs(np.imag(points))) > 0.0:
            raise InputError(f"{self.kind} norms are defined on real vectors only")
        points = np.real(points).astype(np.float64)
        if self.kind == "angular_grid":
            vx, vy = self._grid_ball_vertices()
            return _kernels.polygon_gauge(points[:, 0], points[:, 1], vx, vy)
        return np.array([self._polytope_gauge(p) for p in points])

    def vector(self, v) -> float:
        return float(self.vector_many(np.asarray(v)[None, :])[0])

    def _polytope_gauge(self, p: np.ndarray) -> float:
        if np.max(np.abs(p)) == 0.0:
            return 0.0
        m = self.vertices.shape[0]
        # minimise sum(lambda) s.t. V^T lambda = p, lambda >= 0
        res = linprog(
            c=np.ones(m),
            A_eq=self.vertices.T,
            b_eq=p,
            bounds=[(0, None)] * m,
            method="highs",
        )
        if not res.success:
            raise NumericalError("polytope gauge LP failed", operand=p)
        return float(res.fun)

    # ---- induced matrix norm ------------------------------------------

    def induced(self, a) -> float:
        """Matrix norm induced by this vector norm."""
        a = np.asarray(a, dtype=np.complex128)
        if a.shape != (self.dim, self.dim):
            raise InputError("matrix dimension mismatch")
        if self.kind == "euclidean":
            return operator_norm(a)
        if self.kind == "max_entry":
            return float(np.max(np.sum(np.abs(a), axis=1)))
        if self.kind == "weighted_diag":
            w = self.weights
            scaled = np.abs(a) * (w[:, None] / w[None, :])
            return float(np.max(np.sum(scaled, axis=1)))
        if np.max(np.abs(np.imag(a))) > 0.0:
            raise InputError(f"{self.kind} induced norms need real matrices")
        ar = np.real(a)
        if self.kind == "angular_grid":
            vx, vy = self._grid_ball_vertices()
            ball = np.stack([vx, vy], axis=1)
            return float(np.max(self.vector_many(ball @ ar.T)))
        return float(np.max(self.vector_many(self.vertices @ ar.T)))

    # ---- serialisation -------------------------------------------------

    def to_json(self) -> dict:
        out = {"kind": self.kind, "dim": self.dim}
        if self.weights is not None:
            out["weights"] = self.weights.tolist()
        if self.vertices is not None:
            out["vertices"] = self.vertices.tolist()
        if self.values is not None:
            out["values"] = self.values.tolist()
        return out

    @classmethod
    def from_json(cls, doc: dict) -> "NormModel":
        return cls(
            kind=doc["kind"],
            dim=doc["dim"],
            weights=doc.get("weights"),
            vertices=doc.get("vertices"),
            values=doc.get("values"),
        )

    @classmethod
    def euclidean(cls, dim: int) -> "NormModel":
        return cls(kind="euclidean", dim=dim)

    @classmethod
    def sup(cls, dim: int) -> "NormModel":
        return cls(kind="max_entry", dim=dim)

    @classmethod
    def weighted(cls, weights) -> "NormModel":
        w = np.asarray(weights, dtype=np.float64)
        return cls(kind="weighted_diag", dim=w.shape[0], weights=w)

    @classmethod
    def polytope(cls, vertices) -> "NormModel":
        v = np.asarray(vertices, dtype=np.float64)
        return cls(kind="polytope", dim=v.shape[1], vertices=v)

    @classmethod
    def angular_grid(cls, values) -> "NormModel":
        h = np.asarray(values, dtype=np.float64)
        return cls(kind="angular_grid", dim=2, values=h)


@dataclass(frozen=True)
class BarabanovCertificate:
    """Converged approximate Barabanov norm with its growth rate.

    ``residual`` is the largest observed |max_i nu(A_i v)/(rho_hat nu(v)) - 1|
    over the construction grid and a seeded batch of random directions.
    """

    norm: NormModel
    rho_hat: float
    residual: float
    iterations: int


def check_extremal(norm: NormModel, ms: MatrixSet, rho_hat: float, tol: float):
    """Is the induced norm of every A_i at most rho_hat*(1+tol)?

    Returns ``(ok, max_violation)`` where the violation is
    max_i induced(A_i)/rho_hat - 1 (negative slack allowed), or the raw
    induced norm when rho_hat = 0.
    """
    if rho_hat < 0.0:
        raise InputError("rho_hat must be >= 0")
    worst = -math.inf
    for a in ms.matrices:
        nu = norm.induced(a)
        worst = max(worst, nu / rho_hat - 1.0 if rho_hat > 0.0 else nu)
    return worst <= tol, worst


def residual_on(norm: NormModel, ms: MatrixSet, rho_hat: float, points: np.ndarray):
    """max over rows v of |max_i nu(A_i v)/(rho_hat nu(v)) - 1|."""
    base = norm.vector_many(points)
    best = np.full(points.shape[0], -np.inf)
    for a in ms.matrices:
        best = np.maximum(best, norm.vector_many(points @ np.real(a).T))
    ok = base > 0.0
    return float(np.max(np.abs(best[ok] / (rho_hat * base[ok]) - 1.0)))


def barabanov_iterate(
    ms: MatrixSet,
    resolution: int = 2048,
    max_iters: int = 20000,
    tol: float = 1e-10,
    check_irreducible: bool = True,
    bounds=None,
    seed: int = 20240801,
) -> BarabanovCertificate:
    """Approximate Barabanov norm for a real 2x2 set on an angular grid.

    Iterates h_j <- max_i nu(A_i u_j) followed by renormalising the sup of
    h to 1; the applied normaliser rho_k converges to the growth rate.
    Convergence requires |rho_k - rho_{k-1}| <= tol and a sup-change of
    the grid values <= tol for three consecutive iterations.
    """
    if ms.dim != 2:
        raise InputError("the angular-grid construction needs dimension 2")
    if not ms.is_real():
        raise InputError("the Barabanov construction needs real matrices")
    if resolution % 8 != 0 or resolution < 8:
        raise InputError("resolution must be a positive multiple of 8")
    if check_irreducible:
        from .reducibility import find_common_invariant_subspace

        if find_common_invariant_subspace(ms) is not None:
            raise InputError(
                "matrix set is reducible; a Barabanov norm needs irreducibility"
            )

    m = resolution
    theta = 2.0 * math.pi * np.arange(m) / m
    grid = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    reals = [np.real(a) for a in ms.matrices]
    images = [grid @ a.T for a in reals]

    h = np.ones(m)
    rho_prev = math.nan
    streak = 0
    rho = math.nan
    for it in range(1, max_iters + 1):
        vx = grid[:, 0] / h
        vy = grid[:, 1] / h
        g = np.full(m, -np.inf)
        for q in images:
            g = np.maximum(g, _kernels.polygon_gauge(q[:, 0], q[:, 1], vx, vy))
        rho = float(np.max(g))
        if rho <= 0.0:
            raise NumericalError("norm iteration collapsed to zero", operand=h)
        h_new = g / rho
        change = float(np.max(np.abs(h_new - h)))
        if not math.isnan(rho_prev) and abs(rho - rho_prev) <= tol and change <= tol:
            streak += 1
        else:
            streak = 0
        h = h_new
        rho_prev = rho
        if streak >= 3:
            break
    else:
        raise NumericalError(
            f"Barabanov iteration did not converge in {max_iters} iterations",
            operand=h,
        )

    norm = NormModel.angular_grid(h)
    rng = np.random.default_rng(seed)
    random_dirs = rng.normal(size=(4096, 2))
    random_dirs /= np.linalg.norm(random_dirs, axis=1)[:, None]
    residual = max(
        residual_on(norm, ms, rho, grid),
        residual_on(norm, ms, rho, random_dirs),
    )
    if bounds is not None:
        lo = bounds.lower - residual * max(1.0, rho)
        hi = bounds.upper + residual * max(1.0, rho)
        if not lo <= rho <= hi:
            raise NumericalError(
                f"Barabanov growth rate {rho} escapes the certified interval "
                f"[{bounds.lower}, {bounds.upper}]",
                operand=h,
            )
    return BarabanovCertificate(norm=norm, rho_hat=rho, residual=residual, iterations=it)


def extremal_norm_2d(
    ms: MatrixSet,
    rho: float,
    resolution: int = 512,
    horizon: int = 200,
) -> NormModel:
    """Running-max extremal-norm construction for real 2x2 sets.

    Tracks s_n(v) = max over length-n words of ||L(w) v|| / rho**n on the
    angular grid via s_{n+1}(v) = max_i s_n(A_i v)/rho and returns the
    running maximum over n as a norm model.  Unlike the Barabanov
    fixed-point iteration this never renormalises, so it cannot fall into
    a limit cycle; the price is that the result is only extremal, not
    Barabanov.  ``rho`` should be a lower bound on the growth rate close
    to it (the running max grows without bound otherwise).
    """
    if ms.dim != 2:
        raise InputError("the angular-grid construction needs dimension 2")
    if not ms.is_real():
        raise InputError("the extremal-norm construction needs real matrices")
    if rho <= 0.0:
        raise InputError("rho must be positive")
    if resolution % 8 != 0 or resolution < 8:
        raise InputError("resolution must be a positive multiple of 8")
    m = resolution
    theta = 2.0 * math.pi * np.arange(m) / m
    grid = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    images = [grid @ np.real(a).T for a in ms.matrices]
    s = np.ones(m)
    h = np.ones(m)
    for _ in range(horizon):
        vx = grid[:, 0] / s
        vy = grid[:, 1] / s
        g = np.full(m, -np.inf)
        for q in images:
            g = np.maximum(g, _kernels.polygon_gauge(q[:, 0], q[:, 1], vx, vy))
        s = g / rho
        if np.max(s) > 1e6:
            raise NumericalError(
                "running-max norm diverges; rho is far below the growth rate",
                operand=h,
            )
        h = np.maximum(h, s)
    return NormModel.angular_grid(h / np.max(h))


def barabanov_polytope(
    ms: MatrixSet,
    max_iters: int = 200,
    tol: float = 1e-6,
    vertex_cap: int = 10**4,
) -> BarabanovCertificate:
    """Best-effort symmetric vertex-propagation construction for d <= 4.

    Propagates a symmetric vertex cloud through the set, renormalising so
    the maximal gauge of the images is 1 and pruning points interior to
    the convex hull.  Coarser than the angular grid; intended for real
    sets in dimension 3 or 4.
    """
    d = ms.dim
    if not 2 <= d <= 4:
        raise InputError("vertex propagation supports dimensions 2..4")
    if not ms.is_real():
        raise InputError("the Barabanov construction needs real matrices")
    reals = [np.real(a) for a in ms.matrices]
    verts = np.concatenate([np.eye(d), -np.eye(d)])
    rho_prev = math.nan
    streak = 0
    rho = math.nan
    for it in range(1, max_iters + 1):
        norm = NormModel.polytope(verts)
        images = np.concatenate([verts @ a.T for a in reals])
        gauges = norm.vector_many(images)
        rho = float(np.max(gauges))
        if rho <= 0.0:
            raise NumericalError("vertex propagation collapsed", operand=verts)
        cloud = np.concatenate([verts, images / rho])
        try:
            hull = ConvexHull(cloud, qhull_options="QJ")
            cloud = cloud[sorted(set(hull.vertices))]
        except Exception:
            pass
        if cloud.shape[0] > vertex_cap:
            keep = np.argsort(-np.linalg.norm(cloud, axis=1))[:vertex_cap]
            cloud = cloud[keep]
        cloud = np.concatenate([cloud, -cloud])
        if not math.isnan(rho_prev) and abs(rho - rho_prev) <= tol:
            streak += 1
        else:
            streak = 0
        verts = cloud
        rho_prev = rho
        if streak >= 3:
            break
    else:
        raise NumericalError(
            f"vertex propagation did not converge in {max_iters} iterations",
            operand=verts,
        )
    norm = NormModel.polytope(verts)
    residual = residual_on(norm, ms, rho, verts)
    return BarabanovCertificate(norm=norm, rho_hat=rho, residual=residual, iterations=it)


def classify_extremality(ms: MatrixSet, norm: NormModel, rho_hat: float, w, eps=1e-3):
    """Finite-horizon extremality class of a word with its ratio trace.

    ``StrongCandidate`` when nu(L(w, m)) >= eps * rho_hat**m for every
    prefix length m; ``WeakCandidate`` when only the endpoint rate
    satisfies log nu(L(w))/|w| >= log rho_hat - eps; ``Neither`` otherwise.
    The trace holds nu(L(w, m))/rho_hat**m for m = 1..|w|.
    """
    w = tuple(w)
    if len(w) < 1:
        raise InputError("classification needs a nonempty word")
    if rho_hat <= 0.0:
        raise InputError("rho_hat must be positive")
    logr = _LN(rho_hat)
    trace = []
    strong = True
    for cv in prefix_values(ms, w):
        m = len(cv.word)
        nu = norm.induced(cv.product)
        lognu = _LN(nu) + cv.log_scale if nu > 0.0 else -math.inf
        trace.append(math.exp(lognu - m * logr) if lognu > -math.inf else 0.0)
        if lognu < _LN(eps) + m * logr:
            strong = False
    if strong:
        return "StrongCandidate", trace
    final = trace[-1]
    if final > 0.0 and _LN(final) / len(w) >= -eps:
        return "WeakCandidate", trace
    return "Neither", trace


def test_directions(norm: NormModel, dim: int, count: int = 64, seed: int = 7):
    """Deterministic direction battery: signed axes first, then the norm's
    own ball vertices when it has any, then seeded random directions."""
    dirs = [np.eye(dim)[i] for i in range(dim)]
    dirs += [-np.eye(dim)[i] for i in range(dim)]
    if norm.kind == "angular_grid":
        vx, vy = norm._grid_ball_vertices()
        dirs += [np.array([x, y]) for x, y in zip(vx, vy)]
    elif norm.kind == "polytope":
        dirs += [v for v in norm.vertices]
    rng = np.random.default_rng(seed)
    extra = rng.normal(size=(count, dim))
    dirs += [v for v in extra]
    return dirs


def kozyakin_extremal_witness(
    ms: MatrixSet,
    norm: NormModel,
    rho_hat: float,
    w,
    tol: float = 0.1,
    directions=None,
):
    """Search for a unit vector whose norm image tracks rho_hat**m exactly.

    Looks for v with nu(v) = 1 and nu(L(w, m) v) >= (1 - tol) rho_hat**m
    for every m <= |w|, over a battery of directions; returns the best
    qualifying unit vector or None.
    """
    w = tuple(w)
    if rho_hat <= 0.0:
        raise InputError("rho_hat must be positive")
    if directions is None:
        directions = test_directions(norm, ms.dim)
    prefixes = prefix_values(ms, w)
    logr = _LN(rho_hat)
    floor = _LN(1.0 - tol) if tol < 1.0 else -math.inf
    best_v = None
    best_margin = -math.inf
    for v in directions:
        v = np.asarray(v, dtype=np.float64)
        nv = norm.vector(v)
        if nv == 0.0:
            continue
        v = v / nv
        margin = math.inf
        for cv in prefixes:
            m = len(cv.word)
            img = np.real(cv.product) @ v if ms.is_real() else cv.product @ v
            nu = norm.vector_many(img[None, :])[0]
            lognu = _LN(nu) + cv.log_scale if nu > 0.0 else -math.inf
            margin = min(margin, lognu - m * logr)
            if margin < floor:
                break
        if margin >= floor and margin > best_margin:
            best_margin = margin
            best_v = v
    return best_v
