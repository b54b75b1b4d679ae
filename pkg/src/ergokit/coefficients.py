"""Ergodicity coefficients of Markov operators restricted to projection kernels.

The central quantity is the contraction coefficient of an operator on the
kernel N_P of a Markov projection P: the sup of norm(T x)/norm(x) over
nonzero x with P x = 0.  With P omitted the kernel is { f = 0 }, which is
the kernel shared by every rank-one projection, and the value is the
classical Dobrushin coefficient.  On the polytopal spaces built here the
kernel unit ball is itself a polytope, so the sup is a finite maximum
over its vertices and can be computed exactly.

Three independent routes are provided and cross-checked by the tests:
vertex enumeration of the kernel ball, the half-distance formula over
admissible base-vertex pairs, and a Monte-Carlo lower bound with LP
refinement.  The convention for P = identity (kernel {0}) is value 1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from . import _backend
from .errors import DimensionTooLargeError, PreconditionError, UnsupportedSpaceError
from .operators import MarkovOperator, MarkovProjection, commutes, operator_norm
from .spaces import StateSpace

KERNEL_TOL = 1e-10
ENUMERATION_CAP = 12
# skip sampled directions whose deflected image keeps less than this share
# of their l1 mass: deflection roundoff is absolute, and dividing by a tiny
# image norm would turn it into a relative error above the bound tolerances
MC_DEN_FLOOR = 1e-2


@dataclass(frozen=True, eq=False)
class CoefficientResult:
    """Outcome of a coefficient computation.

    ``value`` is exact when ``certified_exact``; otherwise it is a lower
    bound and ``upper_bound`` completes the bracket.  ``witness`` is a
    maximizing kernel element (None for the identity convention), and
    ``pair`` records base-vertex indices when the pair route produced it.
    """

    value: float
    method: str
    witness: np.ndarray | None
    certified_exact: bool
    upper_bound: float
    pair: tuple[int, int] | None = None

    def __repr__(self) -> str:
        tag = "exact" if self.certified_exact else f"<= {self.upper_bound:.6g}"
        return f"CoefficientResult({self.value:.12g}, {self.method}, {tag})"


def _resolve(T, P: MarkovProjection | None, space: StateSpace | None):
    if isinstance(T, (MarkovOperator, MarkovProjection)):
        return np.asarray(T.matrix, dtype=float), T.space
    A = np.asarray(T, dtype=float)
    if space is None and P is not None:
        space = P.space
    if space is None:
        raise ValueError("raw matrices need an explicit space or a projection")
    if A.shape != (space.dim, space.dim):
        raise ValueError("matrix shape does not match the space dimension")
    return A, space


def _norm_rows(W: np.ndarray, space: StateSpace) -> np.ndarray:
    """Base norm of each row of W, vectorized per space kind."""
    if space.is_lattice:
        return np.abs(W).sum(axis=1)
    inner = np.abs(W[:, 1:])
    inner = inner.sum(axis=1) if space.inner_ball == "l1" else inner.max(axis=1)
    return np.maximum(np.abs(W[:, 0]), inner)


def _lex_rows(V: np.ndarray) -> np.ndarray:
    if len(V) == 0:
        return V
    order = np.lexsort(V.T[::-1])
    return V[order]


def _pair_diff_vertices(space: StateSpace, groups) -> np.ndarray:
    rows = []
    for g in groups:
        for i in g:
            for j in g:
                if i != j:
                    v = 0.5 * (space.base_vertices[i] - space.base_vertices[j])
                    rows.append(v)
    return np.array(rows) if rows else np.zeros((0, space.dim))


def _support_pattern_vertices(P_mat: np.ndarray, n: int) -> np.ndarray:
    # Vertices of {z : P z = 0, l1(z) <= 1}.  At a vertex with support S the
    # column-restricted kernel of P must be one-dimensional: a second kernel
    # direction supported on S gives a sign-preserving perturbation writing
    # the point as a proper convex combination of feasible points.  Then
    # |S| = rank(P[:,S]) + 1 <= rank(P) + 1.  Every candidate below is
    # feasible, so a convex objective maximized over this superset of the
    # vertex set attains exactly the max over the polytope.
    if n > ENUMERATION_CAP:
        raise DimensionTooLargeError(
            f"support-pattern enumeration capped at dim {ENUMERATION_CAP}, got {n}"
        )
    rank = int(round(float(np.trace(P_mat))))
    seen = {}
    for size in range(1, min(n, rank + 1) + 1):
        for S in itertools.combinations(range(n), size):
            cols = P_mat[:, S]
            s = np.linalg.svd(cols, compute_uv=False)
            tol = n * 1e-9 * max(1.0, float(s[0]))
            if int((s <= tol).sum()) != 1:
                continue
            _, _, vt = np.linalg.svd(cols)
            z = np.zeros(n)
            z[list(S)] = vt[-1]
            z /= np.abs(z).sum()
            for cand in (z, -z):
                seen.setdefault(tuple(np.round(cand, 10)), cand)
    if not seen:
        return np.zeros((0, n))
    return np.array(list(seen.values()))


def _rank_one_embedded(P: MarkovProjection) -> bool:
    """Detect an explicit projection that is secretly rank-one.

    Any rank-one Markov projection is x -> f(x) y (Markov forces the
    functional to be f), so comparing against the outer-product form at
    one base vertex settles it.
    """
    space = P.space
    if abs(float(np.trace(P.matrix)) - 1.0) > 1e-8:
        return False
    y = P.matrix @ space.base_vertices[0]
    return bool(np.abs(P.matrix - np.outer(y, space.f_coefficients)).max() <= 1e-8)


def kernel_ball_vertices(
    P: MarkovProjection | None, space: StateSpace | None = None
) -> np.ndarray:
    """Extreme points of the unit ball of the kernel N_P, rows of the result.

    P = None means the kernel of f (shared by all rank-one projections).
    Closed forms cover rank-one and block projections; explicit projections
    on simplex-like spaces go through support-pattern enumeration, capped
    at dim 12 (DimensionTooLargeError beyond, callers fall back to bounds).
    """
    if space is None:
        if P is None:
            raise ValueError("need a space when P is None")
        space = P.space
    n = space.dim

    if P is None or P.variant == "rank_one":
        if space.is_lattice:
            return _lex_rows(_pair_diff_vertices(space, [range(n)]))
        # embedded: ker f = {(0, x)}, and the ball section is {0} x inner ball
        inner = space.base_vertices[:, 1:]  # base vertices are (1, w)
        V = np.zeros((inner.shape[0], n))
        V[:, 1:] = inner
        return _lex_rows(V)

    if P.variant == "block":
        return _lex_rows(_pair_diff_vertices(space, P.blocks))

    # explicit
    if P.is_identity():
        return np.zeros((0, n))
    if not space.is_lattice:
        if _rank_one_embedded(P):
            return kernel_ball_vertices(None, space)
        raise UnsupportedSpaceError(
            "no exact kernel enumeration for unstructured projections on "
            "embedded spaces; use the Monte-Carlo bounds"
        )
    return _lex_rows(_support_pattern_vertices(np.asarray(P.matrix), n))


def _exact_from_vertices(A, V, space, method) -> CoefficientResult:
    if len(V) == 0:
        # trivial kernel and P != identity cannot happen for our projections;
        # treat an empty vertex list as the zero kernel
        return CoefficientResult(0.0, method, None, True, 0.0)
    vals = _norm_rows(V @ A.T, space)
    i = int(np.argmax(vals))
    v = float(vals[i])
    return CoefficientResult(v, method, V[i].copy(), True, v)


def _admissible_pair_groups(P: MarkovProjection | None, space: StateSpace):
    k = len(space.base_vertices)
    if P is None or P.variant == "rank_one" or (
        P.variant == "explicit" and not space.is_lattice and _rank_one_embedded(P)
    ):
        return [list(range(k))]
    if P.variant == "block":
        return [list(b) for b in P.blocks]
    # explicit: test each pair for membership of the difference in ker P
    groups = []
    for i in range(k):
        for j in range(i + 1, k):
            d = P.matrix @ (space.base_vertices[i] - space.base_vertices[j])
            if np.abs(d).max() <= KERNEL_TOL:
                groups.append([i, j])
    return groups


def _pair_route(A, P, space) -> CoefficientResult:
    groups = _admissible_pair_groups(P, space)
    best, bi, bj = -1.0, -1, -1
    if space.is_lattice:
        images = np.ascontiguousarray(A.T)  # row i = image of base vertex e_i
        for g in groups:
            idx = np.asarray(g, dtype=int)
            val, i, j = _backend.max_pair_half_l1(
                np.ascontiguousarray(images[idx])
            )
            if i >= 0 and val > best:
                best, bi, bj = val, int(idx[i]), int(idx[j])
    else:
        B = space.base_vertices
        for g in groups:
            for a, b in itertools.combinations(g, 2):
                val = 0.5 * space.norm(A @ (B[a] - B[b]))
                if val > best:
                    best, bi, bj = val, a, b
    if bi < 0:
        return CoefficientResult(0.0, "pair-formula", None, True, 0.0)
    w = 0.5 * (space.base_vertices[bi] - space.base_vertices[bj])
    return CoefficientResult(best, "pair-formula", w, True, best, pair=(bi, bj))


def ergodicity_coefficient(
    T,
    P: MarkovProjection | None = None,
    *,
    space: StateSpace | None = None,
    method: str = "auto",
    samples: int = 100_000,
    seed: int = 0,
) -> CoefficientResult:
    """Contraction coefficient of T on the kernel of P.

    T may be a MarkovOperator or a raw matrix (the functional extends to
    arbitrary operators, which property checks on differences need).
    method: "auto" (exact when possible, Monte-Carlo bracket otherwise),
    "vertices", "pairs", or "mc".  P = identity returns 1 by convention.
    """
    A, space = _resolve(T, P, space)
    if P is not None and P.is_identity():
        return CoefficientResult(1.0, "identity-convention", None, True, 1.0)

    if method == "pairs":
        return _pair_route(A, P, space)
    if method == "mc":
        return _mc_bracket(A, P, space, samples, seed)
    if method not in ("auto", "vertices"):
        raise ValueError(f"unknown method {method!r}")
    try:
        V = kernel_ball_vertices(P, space)
    except (DimensionTooLargeError, UnsupportedSpaceError):
        if method == "vertices":
            raise
        return _mc_bracket(A, P, space, samples, seed)
    return _exact_from_vertices(A, V, space, "kernel-vertex-enumeration")


def _deflector(P: MarkovProjection | None, space: StateSpace) -> np.ndarray:
    """A surjection onto the kernel: I - P, or an f-annihilator for P = None."""
    n = space.dim
    if P is None:
        return np.eye(n) - np.outer(space.base_vertices[0], space.f_coefficients)
    return np.eye(n) - np.asarray(P.matrix)


def _kernel_equalities(P: MarkovProjection | None, space: StateSpace) -> np.ndarray:
    return (
        space.f_coefficients.reshape(1, -1) if P is None else np.asarray(P.matrix)
    )


def _lp_polish(A, E, D, z0, n_iter: int = 30):
    """Sign-relinearized ascent of z -> l1(A z) over {E z = 0, l1(z) <= 1}.

    Each LP maximizes s.(A z) for the current sign pattern s; the previous
    iterate is feasible and the relinearized objective underestimates
    l1(A z), so the true objective never decreases.  LP solutions satisfy
    E z = 0 only to solver tolerance (enough to let the ratio overshoot the
    kernel sup by ~1e-11), so each iterate is pushed back through the exact
    deflector D before its ratio is taken; that keeps the output a sound
    lower bound.  Simplex-like spaces only (l1 geometry).
    """
    n = A.shape[1]
    z = z0 / np.abs(z0).sum()
    best_val = float(np.abs(A @ z).sum())
    best_z = z
    A_eq = np.hstack([E, -E])
    b_eq = np.zeros(E.shape[0])
    A_ub = np.ones((1, 2 * n))
    for _ in range(n_iter):
        s = np.sign(A @ best_z)
        s[s == 0] = 1.0
        c = -np.concatenate([A.T @ s, -(A.T @ s)])
        res = linprog(c, A_ub=A_ub, b_ub=[1.0], A_eq=A_eq, b_eq=b_eq, method="highs")
        if not res.success:
            break
        z = D @ (res.x[:n] - res.x[n:])
        nz = float(np.abs(z).sum())
        if nz <= 1e-12:
            break
        val = float(np.abs(A @ z).sum()) / nz
        if val <= best_val + 1e-13:
            break
        best_val, best_z = val, z / nz
    return best_val, best_z


def _mc_bracket(A, P, space, samples, seed) -> CoefficientResult:
    lower = coefficient_lower_bound(
        A, P, space=space, samples=samples, seed=seed
    )
    if P is None:
        return lower
    upper = ergodicity_coefficient(A, None, space=space)
    return CoefficientResult(
        lower.value,
        "monte-carlo-lower-bound",
        lower.witness,
        False,
        upper.value,
    )


def coefficient_lower_bound(
    T,
    P: MarkovProjection | None = None,
    *,
    space: StateSpace | None = None,
    samples: int = 100_000,
    seed: int = 0,
    polish: bool = True,
    polish_starts: int = 4,
) -> CoefficientResult:
    """Monte-Carlo lower bound for the coefficient, independent of enumeration.

    Random directions are deflected into the kernel and the best ratio
    norm(T z)/norm(z) is kept.  On simplex-like spaces the top draws seed a
    sign-relinearized LP ascent that sharpens the bound without leaving the
    kernel, so the result stays a certified lower bound throughout.
    """
    A, space = _resolve(T, P, space)
    if P is not None and P.is_identity():
        return CoefficientResult(0.0, "monte-carlo-lower-bound", None, False, 1.0)
    rng = np.random.default_rng(seed)
    D = _deflector(P, space)
    Z = rng.standard_normal((max(1, samples), space.dim))
    # unit l1 rows, so MC_DEN_FLOOR below reads as a relative threshold;
    # direction and magnitude of the deflected image are independent for
    # isotropic draws, so the skipped rows cost no direction coverage
    row_l1 = np.abs(Z).sum(axis=1)
    Z /= np.where(row_l1 > 0, row_l1, 1.0)[:, None]

    if space.is_lattice:
        TD = np.ascontiguousarray(A @ D)
        Dc = np.ascontiguousarray(D)
        Zc = np.ascontiguousarray(Z)
        best, idx = _backend.mc_max_ratio(TD, Dc, Zc, MC_DEN_FLOOR)
        if idx < 0:
            return CoefficientResult(0.0, "monte-carlo-lower-bound", None, False, np.inf)
        best_z = D @ Z[idx]
        best_z /= np.abs(best_z).sum()
        if polish:
            den = np.abs(Z @ Dc.T).sum(axis=1)
            num = np.abs(Z @ TD.T).sum(axis=1)
            ratios = np.where(den > MC_DEN_FLOOR, num / np.maximum(den, MC_DEN_FLOOR), -1.0)
            starts = np.argsort(ratios)[::-1][:polish_starts]
            E = _kernel_equalities(P, space)
            for k in starts:
                val, z = _lp_polish(A, E, D, D @ Z[k])
                if val > best:
                    best, best_z = val, z
    else:
        W = Z @ D.T
        num = _norm_rows(W @ A.T, space)
        den = _norm_rows(W, space)
        good = den > MC_DEN_FLOOR
        if not good.any():
            return CoefficientResult(0.0, "monte-carlo-lower-bound", None, False, np.inf)
        ratios = np.where(good, num / np.maximum(den, MC_DEN_FLOOR), -1.0)
        idx = int(np.argmax(ratios))
        best = float(ratios[idx])
        best_z = W[idx] / den[idx]

    return CoefficientResult(
        float(best), "monte-carlo-lower-bound", best_z, False, np.inf
    )


@dataclass(frozen=True)
class PropertyCheck:
    name: str
    applicable: bool
    holds: bool
    details: dict

    @property
    def ok(self) -> bool:
        return self.holds or not self.applicable


def coefficient_inequalities(
    T: MarkovOperator,
    S: MarkovOperator,
    P: MarkovProjection,
    H: np.ndarray | None = None,
    tol: float = 1e-9,
) -> list[PropertyCheck]:
    """Numerical checks of the five basic coefficient inequalities.

    (range) the coefficient of a Markov operator lies in [0, 1];
    (difference-lipschitz) |c(T) - c(S)| <= c(T-S) <= ||T-S||;
    (commuting-factor) HP = PH implies c(TH) <= c(T) ||H||;
    (annihilated-factor) PH = 0 implies ||TH|| <= c(T) ||H||;
    (submultiplicative) S Markov commuting with P implies
    c(TS) <= c(T) c(S).  H defaults to I - P, which satisfies the
    hypotheses of both factor checks.  Checks whose hypothesis fails are
    reported with applicable=False rather than skipped silently.
    """
    space = T.space
    Pm = np.asarray(P.matrix)
    if H is None:
        H = np.eye(space.dim) - Pm
    H = np.asarray(H, dtype=float)

    dT = ergodicity_coefficient(T, P).value
    dS = ergodicity_coefficient(S, P).value
    out = []

    out.append(
        PropertyCheck(
            "range",
            True,
            -tol <= dT <= 1.0 + tol and -tol <= dS <= 1.0 + tol,
            {"value_T": dT, "value_S": dS},
        )
    )

    diff = T.matrix - S.matrix
    d_diff = ergodicity_coefficient(diff, P, space=space).value
    nrm_diff = operator_norm(diff, space)
    out.append(
        PropertyCheck(
            "difference-lipschitz",
            True,
            abs(dT - dS) <= d_diff + tol and d_diff <= nrm_diff + tol,
            {"lhs": abs(dT - dS), "mid": d_diff, "rhs": nrm_diff},
        )
    )

    nH = operator_norm(H, space)
    commute_defect = operator_norm(H @ Pm - Pm @ H, space)
    applicable = commute_defect <= KERNEL_TOL
    d_TH = ergodicity_coefficient(T.matrix @ H, P, space=space).value
    out.append(
        PropertyCheck(
            "commuting-factor",
            applicable,
            d_TH <= dT * nH + tol,
            {"lhs": d_TH, "rhs": dT * nH, "commute_defect": commute_defect},
        )
    )

    annihilate_defect = operator_norm(Pm @ H, space)
    applicable = annihilate_defect <= KERNEL_TOL
    n_TH = operator_norm(T.matrix @ H, space)
    out.append(
        PropertyCheck(
            "annihilated-factor",
            applicable,
            n_TH <= dT * nH + tol,
            {"lhs": n_TH, "rhs": dT * nH, "annihilate_defect": annihilate_defect},
        )
    )

    s_comm, s_defect = commutes(S, P)
    d_TS = ergodicity_coefficient(T.matrix @ S.matrix, P, space=space).value
    out.append(
        PropertyCheck(
            "submultiplicative",
            s_comm,
            d_TS <= dT * dS + tol,
            {"lhs": d_TS, "rhs": dT * dS, "commute_defect": s_defect},
        )
    )
    return out


@dataclass(frozen=True)
class EigenBoundReport:
    eigenvalues: tuple
    coefficient: float
    n_unit: int
    max_excess: float
    ok: bool


def eigenvalue_bound_check(
    S: MarkovOperator, P: MarkovProjection, tol: float = 1e-9
) -> EigenBoundReport:
    """Every eigenvalue of S on ker P away from 1 is bounded by the coefficient.

    Requires S to commute with P (then ker P = range(I-P) is S-invariant);
    the restriction is compressed with an orthonormal kernel basis from the
    SVD of I - P, so its eigenvalues are exactly those of S on ker P.
    """
    ok_c, defect = commutes(S, P)
    if not ok_c:
        raise PreconditionError(
            f"operator does not commute with the projection (defect {defect:.3e})"
        )
    n = S.space.dim
    comp = np.eye(n) - np.asarray(P.matrix)
    U, sv, _ = np.linalg.svd(comp)
    r = int((sv > 1e-10 * max(1.0, float(sv[0]) if sv.size else 1.0)).sum())
    if r == 0:
        return EigenBoundReport((), ergodicity_coefficient(S, P).value, 0, -np.inf, True)
    B = U[:, :r]
    M = B.T @ S.matrix @ B
    eigs = np.linalg.eigvals(M)
    delta = ergodicity_coefficient(S, P).value
    non_unit = [z for z in eigs if abs(z - 1.0) > 1e-8]
    max_excess = max((abs(z) - delta for z in non_unit), default=-np.inf)
    return EigenBoundReport(
        tuple(sorted(eigs, key=lambda z: (-abs(z), z.real, z.imag))),
        delta,
        len(eigs) - len(non_unit),
        max_excess,
        max_excess <= tol,
    )
