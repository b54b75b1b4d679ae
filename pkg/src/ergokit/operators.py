"""Markov operators and Markov projections as validated dense matrices.

Matrices act on coordinates by left multiplication; column i is the image
of the i-th coordinate basis vector (the classical column-stochastic
convention on the simplex).  A matrix is Markov when it maps the base K
into K, which for a polytopal base reduces to checking every base vertex.
Validation failure is a first-class result (a report of which vertex
escapes and by how much), not an exception, so callers can surface it.

All values are immutable after validation and every function is pure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedSpaceError
from .spaces import StateSpace, same_space, tensor_space

VALIDATION_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class MarkovOperator:
    """A dense matrix certified to map the base K into itself."""

    matrix: np.ndarray
    space: StateSpace

    def apply(self, x: np.ndarray) -> np.ndarray:
        return self.matrix @ x

    def __repr__(self) -> str:
        return f"MarkovOperator(dim={self.space.dim}, kind={self.space.kind!r})"


@dataclass(frozen=True)
class VertexViolation:
    """One base vertex escaping the base under the candidate matrix."""

    vertex_index: int
    cone_defect: float
    f_defect: float


@dataclass(frozen=True)
class ViolationReport:
    """Structured result of a failed Markov validation."""

    violations: tuple[VertexViolation, ...]

    @property
    def ok(self) -> bool:
        return False

    def describe(self) -> str:
        parts = [
            f"vertex {v.vertex_index}: cone defect {v.cone_defect:.3e}, "
            f"f defect {v.f_defect:.3e}"
            for v in self.violations
        ]
        return "base escapes K at " + "; ".join(parts)


def markov_violations(
    matrix: np.ndarray, space: StateSpace, tol: float = VALIDATION_TOL
) -> list[VertexViolation]:
    """Check T(K) <= K at every base vertex; empty list means valid."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.shape != (space.dim, space.dim):
        raise ValueError(
            f"matrix shape {matrix.shape} does not match space dimension {space.dim}"
        )
    out = []
    for i, v in enumerate(space.base_vertices):
        image = matrix @ v
        cone_defect = space.cone_defect(image)
        f_defect = abs(space.f(image) - 1.0)
        if cone_defect > tol or f_defect > tol:
            out.append(VertexViolation(i, cone_defect, f_defect))
    return out


def validate_markov(
    matrix: np.ndarray, space: StateSpace, tol: float = VALIDATION_TOL
) -> MarkovOperator | ViolationReport:
    """Certify a matrix as Markov, or report exactly how it fails."""
    bad = markov_violations(matrix, space, tol)
    if bad:
        return ViolationReport(tuple(bad))
    m = np.ascontiguousarray(matrix, dtype=float).copy()
    m.flags.writeable = False
    return MarkovOperator(m, space)


def as_markov(matrix: np.ndarray, space: StateSpace) -> MarkovOperator:
    """validate_markov for callers that want an exception on failure."""
    result = validate_markov(matrix, space)
    if isinstance(result, ViolationReport):
        raise ValueError(f"matrix is not Markov: {result.describe()}")
    return result


def operator_norm(matrix: np.ndarray, space: StateSpace) -> float:
    """Induced operator norm, exact: the unit ball is conv(ball_vertices)."""
    images = np.asarray(matrix, dtype=float) @ space.ball_vertices.T
    return float(max(space.norm(images[:, j]) for j in range(images.shape[1])))


@dataclass(frozen=True, eq=False)
class MarkovProjection:
    """An idempotent Markov operator.

    Structured variants keep enough data for exact coefficient work:
    ``rank_one`` realizes x -> f(x) y for a base element y, and ``block``
    averages each coordinate block onto a per-block anchor distribution.
    ``explicit`` accepts any idempotent Markov matrix but is flagged
    unstructured; exact kernel enumeration then needs the generic
    polytope routine.
    """

    matrix: np.ndarray
    space: StateSpace
    variant: str  # "rank_one" | "block" | "explicit"
    y: np.ndarray | None = None
    blocks: tuple[tuple[int, ...], ...] | None = None
    anchors: tuple[np.ndarray, ...] | None = None

    @property
    def structured(self) -> bool:
        return self.variant in ("rank_one", "block")

    def apply(self, x: np.ndarray) -> np.ndarray:
        return self.matrix @ x

    def is_identity(self, tol: float = VALIDATION_TOL) -> bool:
        return bool(np.abs(self.matrix - np.eye(self.space.dim)).max() <= tol)

    def rank(self) -> int:
        # trace of an idempotent is its rank
        return int(round(float(np.trace(self.matrix))))

    def __repr__(self) -> str:
        return f"MarkovProjection(variant={self.variant!r}, dim={self.space.dim})"


def _check_projection(matrix: np.ndarray, space: StateSpace, tol: float) -> None:
    if np.abs(matrix @ matrix - matrix).max() > tol:
        raise ValueError("projection matrix is not idempotent")
    bad = markov_violations(matrix, space, tol)
    if bad:
        raise ValueError(
            "projection is not Markov: " + ViolationReport(tuple(bad)).describe()
        )


def rank_one_projection(space: StateSpace, y: np.ndarray) -> MarkovProjection:
    """The projection x -> f(x) y onto the ray of a base element y."""
    y = np.asarray(y, dtype=float)
    if not space.in_base(y, 1e-8):
        raise ValueError("rank-one anchor must lie in the base K")
    matrix = np.outer(y, space.f_coefficients)
    _check_projection(matrix, space, 1e-8)
    m = _frozen(matrix)
    return MarkovProjection(m, space, "rank_one", y=_frozen(y))


def block_projection(
    space: StateSpace,
    blocks: list[list[int]] | tuple[tuple[int, ...], ...],
    anchors: list[np.ndarray] | None = None,
) -> MarkovProjection:
    """Conditional-expectation projection onto per-block anchors.

    ``blocks`` must partition the coordinate set; ``anchors`` gives one
    probability vector per block (in block-local coordinates), defaulting
    to the uniform distribution on each block.
    """
    if not space.is_lattice:
        raise UnsupportedSpaceError("block projections require a simplex-like space")
    blocks = tuple(tuple(int(i) for i in b) for b in blocks)
    flat = [i for b in blocks for i in b]
    if sorted(flat) != list(range(space.dim)):
        raise ValueError("blocks must partition the coordinate indices")
    if anchors is None:
        anchors = [np.full(len(b), 1.0 / len(b)) for b in blocks]
    anchors = [np.asarray(a, dtype=float) for a in anchors]
    if len(anchors) != len(blocks):
        raise ValueError("need exactly one anchor per block")
    matrix = np.zeros((space.dim, space.dim))
    for b, a in zip(blocks, anchors):
        if a.shape != (len(b),):
            raise ValueError("anchor length must match its block")
        if a.min() < -VALIDATION_TOL or abs(a.sum() - 1.0) > 1e-8:
            raise ValueError("anchors must be probability vectors")
        for j in b:
            matrix[list(b), j] = a
    _check_projection(matrix, space, 1e-8)
    return MarkovProjection(
        _frozen(matrix),
        space,
        "block",
        blocks=blocks,
        anchors=tuple(_frozen(a) for a in anchors),
    )


def explicit_projection(
    space: StateSpace, matrix: np.ndarray, tol: float = VALIDATION_TOL
) -> MarkovProjection:
    """Accept an arbitrary idempotent Markov matrix (flagged unstructured)."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.shape != (space.dim, space.dim):
        raise ValueError("projection matrix has the wrong shape")
    _check_projection(matrix, space, max(tol, 1e-9))
    return MarkovProjection(_frozen(matrix), space, "explicit")


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float).copy()
    a.flags.writeable = False
    return a


def power(T: MarkovOperator, n: int) -> MarkovOperator:
    """T^n by repeated squaring; n = 0 gives the identity."""
    if n < 0:
        raise ValueError("power requires n >= 0")
    result = np.linalg.matrix_power(T.matrix, n)
    return MarkovOperator(_frozen(result), T.space)


def kronecker(S: MarkovOperator, T: MarkovOperator) -> MarkovOperator:
    """Kronecker product acting on the product simplex."""
    if not (S.space.is_lattice and T.space.is_lattice):
        raise UnsupportedSpaceError("Kronecker products need simplex-like factors")
    prod = tensor_space(S.space, T.space)
    return MarkovOperator(_frozen(np.kron(S.matrix, T.matrix)), prod)


def kronecker_projection(Q: MarkovProjection, P: MarkovProjection) -> MarkovProjection:
    """Kronecker product of two structured projections.

    rank_one (x) rank_one is again rank_one; any other structured pair is
    a block projection on the product index set (blocks are products of
    factor blocks, anchors are Kronecker products of factor anchors).
    """
    if not (Q.space.is_lattice and P.space.is_lattice):
        raise UnsupportedSpaceError("Kronecker products need simplex-like factors")
    prod = tensor_space(Q.space, P.space)
    if Q.variant == "rank_one" and P.variant == "rank_one":
        return rank_one_projection(prod, np.kron(Q.y, P.y))
    qb, qa = _as_blocks(Q)
    pb, pa = _as_blocks(P)
    nP = P.space.dim
    blocks, anchors = [], []
    for bq, aq in zip(qb, qa):
        for bp, ap in zip(pb, pa):
            blocks.append([i * nP + j for i in bq for j in bp])
            anchors.append(np.kron(aq, ap))
    return block_projection(prod, blocks, anchors)


def _as_blocks(P: MarkovProjection) -> tuple[list[list[int]], list[np.ndarray]]:
    if P.variant == "rank_one":
        return [list(range(P.space.dim))], [np.asarray(P.y)]
    if P.variant == "block":
        return [list(b) for b in P.blocks], [np.asarray(a) for a in P.anchors]
    raise UnsupportedSpaceError("explicit projections have no block form")


def sub_projection(
    Q: MarkovProjection, P: MarkovProjection, tol: float = VALIDATION_TOL
) -> bool:
    """Whether Q <= P in the projection order, i.e. QP = PQ = Q."""
    if not same_space(Q.space, P.space):
        raise ValueError("projections live on different spaces")
    qp = operator_norm(Q.matrix @ P.matrix - Q.matrix, Q.space)
    pq = operator_norm(P.matrix @ Q.matrix - Q.matrix, Q.space)
    return qp <= tol and pq <= tol


def commutes(
    T: MarkovOperator, P: MarkovProjection, tol: float = VALIDATION_TOL
) -> tuple[bool, float]:
    """Commutation test TP = PT with the exact defect norm ||TP - PT||."""
    if not same_space(T.space, P.space):
        raise ValueError("operator and projection live on different spaces")
    defect = operator_norm(T.matrix @ P.matrix - P.matrix @ T.matrix, T.space)
    return defect <= tol, defect


def fixes_projection(
    T: MarkovOperator, P: MarkovProjection, tol: float = VALIDATION_TOL
) -> tuple[bool, float]:
    """Whether TP = P, with the exact defect norm."""
    defect = operator_norm(T.matrix @ P.matrix - P.matrix, T.space)
    return defect <= tol, defect
