"""Finite-dimensional base-norm state spaces.

A space here is an ordered real vector space with a distinguished cone, a
strictly positive functional f, and the base K = {x in cone : f(x) = 1}.
The norm is the gauge of conv(K u -K).  Three polytopal instances are
supported, all of them "strong" (the unit ball is exactly the convex hull
of its listed vertices):

* the probability simplex on n coordinates (cone = nonnegative orthant,
  f = coordinate sum, norm = l1),
* an embedded-ball space R + R^m with coordinates (alpha, x), functional
  f(alpha, x) = alpha, cone {||x||_inner <= alpha} and norm
  max(|alpha|, ||x||_inner) for a polytopal inner norm (l1 or linf),
* Kronecker products of simplices, which are canonically the simplex on
  the product index set.

Only polytopal instances are supported: every exact coefficient
computation in this package reduces to a finite maximum over vertex sets.
All values are immutable after construction and every operation is a pure
function, so spaces can be shared freely across threads.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedSpaceError

CONE_TOL = 1e-10

SIMPLEX = "simplex"
EMBEDDED = "embedded"
TENSOR = "tensor"

_LATTICE_KINDS = (SIMPLEX, TENSOR)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class StateSpace:
    """A finite-dimensional base-norm space with explicit vertex data.

    ``base_vertices`` are the extreme points of the base K (rows), and
    ``ball_vertices`` the extreme points of the unit ball conv(K u -K).
    ``f_coefficients`` represents the strictly positive functional as a
    coordinate functional.
    """

    kind: str
    dim: int
    f_coefficients: np.ndarray
    base_vertices: np.ndarray
    ball_vertices: np.ndarray
    inner_ball: str | None = None
    inner_dim: int | None = None
    factors: tuple[int, ...] | None = None

    @property
    def is_lattice(self) -> bool:
        """True when coordinates form a vector lattice (simplex-like)."""
        return self.kind in _LATTICE_KINDS

    def f(self, x: np.ndarray) -> float:
        return float(np.dot(self.f_coefficients, x))

    def norm(self, x: np.ndarray) -> float:
        """Base norm of an arbitrary coordinate vector (closed form)."""
        x = np.asarray(x, dtype=float)
        if self.kind in _LATTICE_KINDS:
            return float(np.abs(x).sum())
        return max(abs(float(x[0])), self._inner_norm(x[1:]))

    def _inner_norm(self, v: np.ndarray) -> float:
        if self.inner_ball == "l1":
            return float(np.abs(v).sum())
        return float(np.abs(v).max()) if v.size else 0.0

    def in_cone(self, x: np.ndarray, tol: float = CONE_TOL) -> bool:
        return self.cone_defect(x) <= tol

    def cone_defect(self, x: np.ndarray) -> float:
        """How far x is from the cone: 0 for members, positive otherwise."""
        x = np.asarray(x, dtype=float)
        if self.kind in _LATTICE_KINDS:
            return max(0.0, -float(x.min()))
        return max(0.0, self._inner_norm(x[1:]) - float(x[0]))

    def in_base(self, x: np.ndarray, tol: float = CONE_TOL) -> bool:
        return self.in_cone(x, tol) and abs(self.f(x) - 1.0) <= tol

    def positive_part(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Lattice decomposition x = pos - neg with both parts in the cone.

        Only defined for coordinate-lattice (simplex-like) spaces; the
        embedded-ball cone is not a lattice cone in these coordinates.
        """
        if not self.is_lattice:
            raise UnsupportedSpaceError(
                f"positive-part decomposition is undefined on {self.kind!r} spaces"
            )
        x = np.asarray(x, dtype=float)
        return np.maximum(x, 0.0), np.maximum(-x, 0.0)

    def __repr__(self) -> str:  # keep matrices out of reprs
        extra = f", inner_ball={self.inner_ball!r}" if self.kind == EMBEDDED else ""
        return f"StateSpace(kind={self.kind!r}, dim={self.dim}{extra})"


def same_space(a: StateSpace, b: StateSpace) -> bool:
    return (
        a.kind == b.kind
        and a.dim == b.dim
        and a.inner_ball == b.inner_ball
        and a.inner_dim == b.inner_dim
    )


def make_simplex(n: int) -> StateSpace:
    """The probability simplex on n coordinates; base norm is l1."""
    if n < 1:
        raise ValueError(f"simplex dimension must be >= 1, got {n}")
    eye = np.eye(n)
    return StateSpace(
        kind=SIMPLEX,
        dim=n,
        f_coefficients=_frozen(np.ones(n)),
        base_vertices=_frozen(eye),
        ball_vertices=_frozen(np.vstack([eye, -eye])),
    )


def _inner_ball_vertices(m: int, inner_ball: str) -> np.ndarray:
    if inner_ball == "l1":
        eye = np.eye(m)
        return np.vstack([eye, -eye])
    if inner_ball == "linf":
        if m > 16:
            raise ValueError(f"linf inner ball has 2^{m} vertices; m must be <= 16")
        return np.array(list(itertools.product((1.0, -1.0), repeat=m)))
    raise ValueError(f"inner_ball must be 'l1' or 'linf', got {inner_ball!r}")


def make_embedded(m: int, inner_ball: str = "l1") -> StateSpace:
    """The space R + R^m with f(alpha, x) = alpha and a polytopal inner ball.

    The base is K = {(1, x) : ||x||_inner <= 1}.  The unit ball
    conv(K u -K) works out to {(alpha, x) : max(|alpha|, ||x||_inner) <= 1}:
    both K and -K lie inside it, and any such (alpha, x) is the convex
    combination t(1, x) + (1-t)(-1, x) with t = (1+alpha)/2.  Its vertices
    are therefore (s, w) with s = +-1 and w an inner-ball vertex.
    """
    if m < 1:
        raise ValueError(f"inner dimension must be >= 1, got {m}")
    w = _inner_ball_vertices(m, inner_ball)
    base = np.hstack([np.ones((w.shape[0], 1)), w])
    ball = np.vstack([base, -base])
    f = np.zeros(1 + m)
    f[0] = 1.0
    return StateSpace(
        kind=EMBEDDED,
        dim=1 + m,
        f_coefficients=_frozen(f),
        base_vertices=_frozen(base),
        ball_vertices=_frozen(ball),
        inner_ball=inner_ball,
        inner_dim=m,
    )


def tensor_space(a: StateSpace, b: StateSpace) -> StateSpace:
    """Kronecker product of two simplex-like spaces.

    The product of simplices on m and n points is canonically the simplex
    on the m*n product index set, with the l1 norm.  Mixed products are
    not supported: they would force a choice among inequivalent
    cross-norms.
    """
    if not (a.is_lattice and b.is_lattice):
        raise UnsupportedSpaceError(
            "tensor products are only defined for simplex-like factors"
        )
    n = a.dim * b.dim
    eye = np.eye(n)
    fa = a.factors or (a.dim,)
    fb = b.factors or (b.dim,)
    return StateSpace(
        kind=TENSOR,
        dim=n,
        f_coefficients=_frozen(np.ones(n)),
        base_vertices=_frozen(eye),
        ball_vertices=_frozen(np.vstack([eye, -eye])),
        factors=fa + fb,
    )
