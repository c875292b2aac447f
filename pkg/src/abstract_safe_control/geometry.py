"""H-polytopes, a small dense LP solver, affine images and inner Lp balls.

Everything here is exact-arithmetic-in-spirit: the LP backend is a
self-contained two-phase dense simplex with Bland's rule (the problems in
this package stay below ~20 variables, where a dense tableau is both fast and
deterministic), and the inner-ball radius of ``{v | A v <= b}`` around the
origin comes from the facet-distance formula ``min_i b_i / ||a_i||_q`` with
``q`` the Hölder conjugate of ``p``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    AssumptionViolation,
    DimensionMismatch,
    InfeasiblePolytope,
    UnboundedDirection,
)

# Absolute tolerance for containment, LP optimality and interior checks.
EPS_GEOM = 1e-9

_MAX_PIVOTS = 20000


# ---------------------------------------------------------------------------
# LP backend
# ---------------------------------------------------------------------------

_OPTIMAL = 0
_INFEASIBLE = 1
_UNBOUNDED = 2


def _pivot(T, basis, row, col):
    T[row] /= T[row, col]
    for i in range(T.shape[0]):
        if i != row and T[i, col] != 0.0:
            T[i] -= T[i, col] * T[row]
    basis[row] = col


def _run_simplex(T, basis, n_cols, tol):
    """Minimize the cost row of tableau ``T`` over its first ``n_cols`` columns.

    Bland's rule on both the entering and leaving choice, which rules out
    cycling on the degenerate vertices that box polytopes produce.
    """
    m = T.shape[0] - 1
    for _ in range(_MAX_PIVOTS):
        col = -1
        for j in range(n_cols):
            if T[m, j] < -tol:
                col = j
                break
        if col < 0:
            return _OPTIMAL
        row = -1
        best = np.inf
        for i in range(m):
            if T[i, col] > tol:
                ratio = T[i, -1] / T[i, col]
                if ratio < best - tol or (
                    ratio < best + tol and (row < 0 or basis[i] < basis[row])
                ):
                    if ratio < best:
                        best = ratio
                    row = i
        if row < 0:
            return _UNBOUNDED
        _pivot(T, basis, row, col)
    raise RuntimeError("simplex did not terminate (pivot limit hit)")


def _solve_lp(c, A_ub, b_ub, A_eq=None, b_eq=None, tol=EPS_GEOM):
    """min c.x over free x subject to A_ub x <= b_ub, A_eq x = b_eq.

    Returns ``(status, x, value)``; ``x`` is None unless status is optimal.
    """
    c = np.asarray(c, dtype=float).ravel()
    A_ub = np.asarray(A_ub, dtype=float).reshape(-1, c.size)
    b_ub = np.asarray(b_ub, dtype=float).ravel()
    if A_eq is None:
        A_eq = np.zeros((0, c.size))
        b_eq = np.zeros(0)
    else:
        A_eq = np.asarray(A_eq, dtype=float).reshape(-1, c.size)
        b_eq = np.asarray(b_eq, dtype=float).ravel()

    n = c.size
    m_ub = A_ub.shape[0]
    m = m_ub + A_eq.shape[0]
    # standard-form variables: [x+, x-, slacks]
    n_real = 2 * n + m_ub
    A = np.zeros((m, n_real))
    A[:m_ub, :n] = A_ub
    A[:m_ub, n : 2 * n] = -A_ub
    A[:m_ub, 2 * n :] = np.eye(m_ub)
    A[m_ub:, :n] = A_eq
    A[m_ub:, n : 2 * n] = -A_eq
    b = np.concatenate([b_ub, b_eq]).astype(float)
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    # phase 1: artificial basis, minimize sum of artificials
    T = np.zeros((m + 1, n_real + m + 1))
    T[:m, :n_real] = A
    T[:m, n_real : n_real + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :n_real] = -A.sum(axis=0)
    T[m, -1] = -b.sum()
    basis = list(range(n_real, n_real + m))
    status = _run_simplex(T, basis, n_real + m, tol)
    if status != _OPTIMAL or -T[m, -1] > 1e3 * tol:
        return _INFEASIBLE, None, np.nan

    # drive leftover artificials out of the basis (degenerate rows)
    drop_rows = []
    for i in range(m):
        if basis[i] >= n_real:
            col = -1
            for j in range(n_real):
                if abs(T[i, j]) > tol:
                    col = j
                    break
            if col >= 0:
                _pivot(T, basis, i, col)
            else:
                drop_rows.append(i)
    if drop_rows:
        keep = [i for i in range(m) if i not in drop_rows]
        T = T[keep + [m]]
        basis = [basis[i] for i in keep]
        m = len(keep)

    # phase 2: real objective over the real columns
    c_full = np.concatenate([c, -c, np.zeros(m_ub)])
    T[m, :] = 0.0
    T[m, :n_real] = c_full
    for i in range(m):
        if c_full[basis[i]] != 0.0:
            T[m, : n_real] -= c_full[basis[i]] * T[i, : n_real]
            T[m, -1] -= c_full[basis[i]] * T[i, -1]
    # artificial columns must not re-enter
    T[:, n_real : n_real + T.shape[1] - 1 - n_real] *= 0.0
    status = _run_simplex(T, basis, n_real, tol)
    if status == _UNBOUNDED:
        return _UNBOUNDED, None, np.nan

    x_std = np.zeros(n_real)
    for i in range(m):
        if basis[i] < n_real:
            x_std[basis[i]] = T[i, -1]
    x = x_std[:n] - x_std[n : 2 * n]
    return _OPTIMAL, x, float(c @ x)


def lp_feasible(A_ub, b_ub, A_eq=None, b_eq=None, tol=EPS_GEOM) -> bool:
    """True iff {x | A_ub x <= b_ub, A_eq x = b_eq} is nonempty."""
    n = np.asarray(A_ub).shape[1] if np.asarray(A_ub).size else np.asarray(A_eq).shape[1]
    status, _, _ = _solve_lp(np.zeros(n), A_ub, b_ub, A_eq, b_eq, tol)
    return status == _OPTIMAL


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Polytope:
    """H-representation {v | A v <= b}; certified nonempty on construction."""

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.asarray(self.b, dtype=float).ravel()
        if not np.all(np.isfinite(A)):
            raise ValueError("polytope A has non-finite entries")
        if not np.all(np.isfinite(b)):
            raise ValueError("polytope b has non-finite entries")
        if A.shape[0] != b.shape[0]:
            raise DimensionMismatch(
                f"A has {A.shape[0]} rows but b has {b.shape[0]} entries"
            )
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        if not lp_feasible(A, b):
            raise InfeasiblePolytope("polytope {v | Av <= b} is empty")

    @classmethod
    def box(cls, lo, hi) -> "Polytope":
        lo = np.asarray(lo, dtype=float).ravel()
        hi = np.asarray(hi, dtype=float).ravel()
        if lo.shape != hi.shape:
            raise DimensionMismatch("box bounds disagree in length")
        n = lo.size
        A = np.vstack([np.eye(n), -np.eye(n)])
        b = np.concatenate([hi, -lo])
        return cls(A, b)

    @property
    def dim(self) -> int:
        return self.A.shape[1]


@dataclass(frozen=True)
class Interval:
    """Closed real interval [lo, hi]."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)):
            raise ValueError("interval endpoints must be finite")
        if self.lo > self.hi + EPS_GEOM:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, x: float, tol: float = EPS_GEOM) -> bool:
        return self.lo - tol <= x <= self.hi + tol


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def contains(P: Polytope, v, tol: float = EPS_GEOM) -> bool:
    """Componentwise A v <= b + tol."""
    v = np.asarray(v, dtype=float).ravel()
    if v.size != P.dim:
        raise DimensionMismatch(f"point has dim {v.size}, polytope has {P.dim}")
    return bool(np.all(P.A @ v <= P.b + tol))


def lp_extreme(P: Polytope, c, sense: str = "max"):
    """Optimal value and optimizer of c.v over P.

    ``sense`` is "min" or "max".  Raises :class:`UnboundedDirection` when P is
    unbounded along the requested direction.
    """
    c = np.asarray(c, dtype=float).ravel()
    if c.size != P.dim:
        raise DimensionMismatch(f"direction has dim {c.size}, polytope has {P.dim}")
    if sense not in ("min", "max"):
        raise ValueError(f"sense must be 'min' or 'max', got {sense!r}")
    obj = c if sense == "min" else -c
    status, x, value = _solve_lp(obj, P.A, P.b)
    if status == _UNBOUNDED:
        raise UnboundedDirection(f"polytope unbounded in {sense} direction {c}")
    if status == _INFEASIBLE:  # cannot happen for a constructed Polytope
        raise InfeasiblePolytope("LP infeasible")
    val = value if sense == "min" else -value
    return val, x


def affine_image_interval(C, off: float, U: Polytope) -> Interval:
    """Exact image {C u + off | u in U} of a polytope under a scalar affine map."""
    C = np.asarray(C, dtype=float).ravel()
    lo, _ = lp_extreme(U, C, "min")
    hi, _ = lp_extreme(U, C, "max")
    return Interval(lo + off, hi + off)


def dual_norm_order(p) -> float:
    """Hölder conjugate q with 1/p + 1/q = 1 (p in [1, inf])."""
    if p == np.inf or p == "inf":
        return 1.0
    p = float(p)
    if p < 1.0:
        raise ValueError(f"norm order must be >= 1, got {p}")
    if p == 1.0:
        return np.inf
    return p / (p - 1.0)


def inner_ball_radius(P: Polytope, p=2) -> float:
    """Radius of the largest zero-centered Lp ball inside P.

    Each facet a_i v <= b_i limits the ball to b_i / ||a_i||_q, so the radius
    is the minimum of the facet distances.  Requires 0 in P.
    """
    q = dual_norm_order(p)
    norms = np.linalg.norm(P.A, ord=q, axis=1)
    if np.any(norms < EPS_GEOM):
        raise ValueError("polytope has a zero row; facet distance undefined")
    if np.any(P.b < -EPS_GEOM):
        raise AssumptionViolation("0 is not inside the polytope")
    return float(max(np.min(P.b / norms), 0.0))


def inner_ball_radius_sampled(P: Polytope, p=2, n_dirs: int = 1000, seed: int = 0) -> float:
    """Over-approximate the zero-centered inner Lp ball radius by sampling.

    Takes the support value of P along unit-q directions (the +-axes first,
    then uniformly random ones); each direction contributes an outer halfspace
    whose inner radius is its support value.  Converges to the exact radius
    from above as ``n_dirs`` grows.  This is the fallback for vector-valued
    abstract controls where no H-form of the image is available.
    """
    n = P.dim
    if n_dirs < 2 * n:
        raise ValueError(f"n_dirs must be at least 2*dim = {2 * n}")
    q = dual_norm_order(p)
    dirs = np.vstack([np.eye(n), -np.eye(n)])
    if n_dirs > 2 * n:
        rng = np.random.default_rng(seed)
        extra = rng.standard_normal((n_dirs - 2 * n, n))
        lens = np.linalg.norm(extra, ord=q, axis=1)
        good = lens > 1e-12
        dirs = np.vstack([dirs, extra[good] / lens[good, None]])
    radius = np.inf
    for c in dirs:
        h, _ = lp_extreme(P, c, "max")
        if h < radius:
            radius = h
    if radius < -EPS_GEOM:
        raise AssumptionViolation("0 is not inside the polytope")
    return float(max(radius, 0.0))
