"""Spectral side of ergodicity: eigenvalues, rates, and classification.

Uniform ergodicity of a Markov operator T toward a Markov projection P is
characterized three ways, checked independently: the power norms
norm(T^n - P) go to 0; some power has kernel coefficient below 1; the
spectral radius of T - P is below 1.  The subdominant eigenvalue modulus
of T equals that spectral radius for uniformly ergodic instances, which
is what makes eigenvalues usable as convergence-rate predictions.

Eigenvalues come from LAPACK's dense unsymmetric solver (balancing,
Hessenberg reduction, shifted QR); failures surface as EigenSolverError,
never silently.  Everything else is exact polytope-norm arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .coefficients import ergodicity_coefficient
from .errors import EigenSolverError, PreconditionError
from .operators import (
    MarkovOperator,
    MarkovProjection,
    commutes,
    fixes_projection,
    kronecker,
    kronecker_projection,
    operator_norm,
)

UNIT_EIG_TOL = 1e-8  # identification of "this eigenvalue is 1"
RADIUS_THRESHOLD = 1 - 1e-10  # strictly-below-one cutoff for classification
SQUARING_CAP = 48


def eigenvalues(matrix) -> np.ndarray:
    """All complex eigenvalues with multiplicity."""
    try:
        return np.linalg.eigvals(np.asarray(matrix, dtype=float))
    except np.linalg.LinAlgError as exc:  # QR iteration did not converge
        raise EigenSolverError(f"eigenvalue computation failed: {exc}") from exc


def spectral_radius(matrix) -> float:
    e = eigenvalues(matrix)
    return float(np.abs(e).max()) if e.size else 0.0


@dataclass(frozen=True)
class SpectralReport:
    eigenvalues: tuple
    residual_radius: float  # spectral radius of T - P
    subdominant_radius: float  # max |eig| of T excluding eigenvalues at 1
    one_isolated: bool
    isolation_distance: float
    gap_norm: float  # norm of T(I - P)


@dataclass(frozen=True)
class ClauseResult:
    name: str
    applicable: bool
    holds: bool | None
    detail: dict


@dataclass(frozen=True)
class ErgodicityVerdict:
    uniform: bool | None
    weak: bool | None
    witness_n0: int | None
    clauses: tuple[ClauseResult, ...]
    consistent: bool
    fixes_defect: float  # norm of TP - P
    commute_defect: float  # norm of TP - PT


def spectral_report(T: MarkovOperator, P: MarkovProjection) -> SpectralReport:
    A = np.asarray(T.matrix)
    Pm = np.asarray(P.matrix)
    eigs = eigenvalues(A)
    away = eigs[np.abs(eigs - 1.0) > UNIT_EIG_TOL]
    sub = float(np.abs(away).max()) if away.size else 0.0
    iso = float(np.abs(away - 1.0).min()) if away.size else math.inf
    comp = np.eye(T.space.dim) - Pm
    return SpectralReport(
        eigenvalues=tuple(sorted(eigs, key=lambda z: (-abs(z), z.real, z.imag))),
        residual_radius=spectral_radius(A - Pm),
        subdominant_radius=sub,
        one_isolated=iso > UNIT_EIG_TOL,
        isolation_distance=iso,
        gap_norm=operator_norm(A @ comp, T.space),
    )


def classify(
    T: MarkovOperator,
    P: MarkovProjection,
    tolerance: float = 1e-9,
    max_power: int = 64,
) -> tuple[ErgodicityVerdict, SpectralReport]:
    """Evaluate the three equivalent ergodicity clauses independently.

    Clause power-norms follows the trail norm(T^n - P) for n <= max_power;
    when T fixes and commutes with P this extends by repeated squaring of
    T^max_power - P (valid because then (T - P)^n = T^n - P), with norms
    tracked in log scale to survive underflow.  Clause coefficient-dip
    searches for a power whose kernel coefficient drops below 1; clause
    residual-radius tests r(T - P) < 1.  Disagreements beyond tolerance
    are flagged via ``consistent``, never reconciled silently.
    """
    space = T.space
    A = np.asarray(T.matrix)
    Pm = np.asarray(P.matrix)
    report = spectral_report(T, P)

    fixes_ok, fix_defect = fixes_projection(T, P)
    comm_ok, comm_defect = commutes(T, P)
    member = fixes_ok and comm_ok
    identity_P = P.is_identity()
    theta = RADIUS_THRESHOLD

    norms = []
    converged_n = None
    geometric_n = None
    dip_n = None
    Tn = A.copy()
    for n in range(1, max_power + 1):
        nrm = operator_norm(Tn - Pm, space)
        norms.append(nrm)
        if converged_n is None and nrm <= tolerance:
            converged_n = n
        if geometric_n is None and nrm < theta:
            geometric_n = n
        if not identity_P and dip_n is None and fixes_ok:
            if ergodicity_coefficient(Tn, P, space=space).value < theta:
                dip_n = n
        if converged_n is not None and (dip_n is not None or identity_P or not fixes_ok):
            break
        if n < max_power:
            Tn = Tn @ A

    need_extension = member and converged_n is None and (
        geometric_n is None or (dip_n is None and not identity_P)
    )
    extension_floor = None
    if need_extension:
        # T^max_power may not have been reached if we broke early; it cannot
        # happen here because breaking early requires converged_n.
        E = Tn - Pm
        scale = norms[-1]
        if scale > 0:
            log_norm = math.log(scale)
            e = E / scale
            power = max_power
            for _ in range(SQUARING_CAP):
                e2 = e @ e
                m = operator_norm(e2, space)
                power *= 2
                if m == 0.0:
                    converged_n = converged_n or power
                    dip_n = dip_n or power
                    break
                log_norm = 2.0 * log_norm + math.log(m)
                e = e2 / m
                # Squaring compounds rounding multiplicatively: comparing the
                # accumulated log against log(theta) directly would misread a
                # radius-1 instance as decaying once the ~eps deficit has been
                # squared often enough.  The per-power rate estimate keeps
                # that drift at ~eps/max_power per unit power, far inside
                # theta's margin, and rate < theta still implies a genuine
                # norm (or coefficient) value below 1 at this power.
                if geometric_n is None and log_norm / power < math.log(theta):
                    geometric_n = power
                if dip_n is None and not identity_P:
                    d = ergodicity_coefficient(e, P, space=space).value
                    log_total = log_norm + math.log(max(d, 1e-300))
                    if d == 0.0 or log_total / power < math.log(theta):
                        dip_n = power
                if log_norm < math.log(tolerance):
                    converged_n = converged_n or power
                if geometric_n is not None and (dip_n is not None or identity_P):
                    break
            else:
                extension_floor = math.exp(log_norm / power)

    if converged_n is not None or (member and geometric_n is not None):
        clause1_holds = True
    elif member:
        clause1_holds = False
    else:
        clause1_holds = None  # trail inconclusive, no power identity to extend with
    clause1 = ClauseResult(
        "power-norms",
        True,
        clause1_holds,
        {
            "trail_min": min(norms),
            "converged_at": converged_n,
            "below_one_at": geometric_n,
            "extension_radius_floor": extension_floor,
            "at_tolerance": extension_floor is not None
            and abs(extension_floor - 1.0) <= 1e-8,
        },
    )

    clause2_applicable = fixes_ok and not identity_P
    clause2 = ClauseResult(
        "coefficient-dip",
        clause2_applicable,
        (dip_n is not None) if clause2_applicable else None,
        {"witness_n0": dip_n, "fixes_defect": fix_defect},
    )

    r = report.residual_radius
    clause3 = ClauseResult(
        "residual-radius",
        True,
        fixes_ok and r < theta,
        {"residual_radius": r, "fixes_defect": fix_defect,
         "at_tolerance": abs(r - 1.0) <= 1e-8},
    )

    votes = [c.holds for c in (clause1, clause2, clause3) if c.applicable and c.holds is not None]
    consistent = len(set(votes)) <= 1
    uniform = votes[0] if votes and consistent else None
    if uniform is True:
        weak = True
    elif member:
        weak = r < theta
    else:
        weak = uniform
    verdict = ErgodicityVerdict(
        uniform=uniform,
        weak=weak,
        witness_n0=dip_n,
        clauses=(clause1, clause2, clause3),
        consistent=consistent,
        fixes_defect=fix_defect,
        commute_defect=comm_defect,
    )
    return verdict, report


def best_rate(T: MarkovOperator, P: MarkovProjection, tol: float = 1e-8) -> float:
    """Optimal geometric convergence rate of norm(T^n - P).

    Computed twice, as the subdominant eigenvalue modulus of T and as the
    spectral radius of T - P; the two must agree (that identity is what
    licenses reading rates off the spectrum).  Refuses instances that are
    not uniformly ergodic, where the quantity has no rate meaning.
    """
    verdict, report = classify(T, P)
    if verdict.uniform is not True:
        raise PreconditionError(
            "best_rate is only meaningful for uniformly ergodic instances"
        )
    a, b = report.subdominant_radius, report.residual_radius
    if abs(a - b) > tol:
        raise EigenSolverError(
            f"rate mismatch: subdominant modulus {a!r} vs residual radius {b!r}"
        )
    return report.residual_radius


@dataclass(frozen=True)
class GelfandTrail:
    values: tuple         # delta_P(T^n)^(1/n) for n = 1..N
    residual_radius: float
    all_above: bool       # every term >= r - 1e-9 (r is also the infimum)


def gelfand_trail(T: MarkovOperator, P: MarkovProjection, N: int = 30) -> GelfandTrail:
    """Root-coefficient trail delta_P(T^n)^(1/n), which decreases to r(T-P).

    The powers are accumulated as normalized products of T - P with the
    scale carried in logs: raw powers of a fast-mixing chain reach their
    float fixed point (all columns bitwise equal) long before n = 30, and
    the trail would then read an exact 0 far above the true magnitude.
    Membership TP = PT = P makes the normalized product equal T^n - P, so
    it is also the precondition here.
    """
    ok_f, fd = fixes_projection(T, P)
    ok_c, cd = commutes(T, P)
    if not (ok_f and ok_c):
        raise PreconditionError(
            f"gelfand_trail needs TP=P and PT=TP (defects {fd:.2e}, {cd:.2e})"
        )
    A = np.asarray(T.matrix)
    E = A - np.asarray(P.matrix)
    r = spectral_radius(E)
    vals = []
    Y = E.copy()
    log_scale = 0.0
    dead = False
    for n in range(1, N + 1):
        if dead:
            vals.append(0.0)
            continue
        d = ergodicity_coefficient(Y, P, space=T.space).value
        if d <= 0.0:
            # nilpotent restriction: every later power is exactly zero too
            vals.append(0.0)
            dead = True
            continue
        vals.append(math.exp((log_scale + math.log(d)) / n))
        if n < N:
            Y = E @ (Y / d)
            log_scale += math.log(d)
    return GelfandTrail(tuple(vals), r, all(v >= r - 1e-9 for v in vals))


@dataclass(frozen=True)
class SpectrumShiftReport:
    spectrum_T: tuple
    spectrum_T_minus_P: tuple
    excluded: tuple  # (n_excluded_from_T, n_excluded_from_T_minus_P)
    count_match: bool
    max_match_distance: float
    ok: bool
    fixes_defect: float
    commute_defect: float


def spectrum_shift_check(
    T: MarkovOperator, P: MarkovProjection, tol: float = 1e-7
) -> SpectrumShiftReport:
    """Subtracting P only moves spectrum at 0 and 1: multiset equality away.

    The two spectra with eigenvalues within tol of 0 or 1 removed must
    coincide as multisets; matching is a min-cost assignment on pairwise
    distances in the complex plane, judged by the largest matched distance.
    """
    _, fd = fixes_projection(T, P)
    _, cd = commutes(T, P)
    a = eigenvalues(T.matrix)
    b = eigenvalues(np.asarray(T.matrix) - np.asarray(P.matrix))

    def keep(spec):
        return spec[(np.abs(spec) > tol) & (np.abs(spec - 1.0) > tol)]

    ka, kb = keep(a), keep(b)
    if ka.size != kb.size:
        return SpectrumShiftReport(
            tuple(a), tuple(b), (a.size - ka.size, b.size - kb.size),
            False, math.inf, False, fd, cd,
        )
    if ka.size == 0:
        return SpectrumShiftReport(
            tuple(a), tuple(b), (a.size, b.size), True, 0.0, True, fd, cd
        )
    cost = np.abs(ka[:, None] - kb[None, :])
    rows, cols = linear_sum_assignment(cost)
    worst = float(cost[rows, cols].max())
    return SpectrumShiftReport(
        tuple(a), tuple(b), (a.size - ka.size, b.size - kb.size),
        True, worst, worst <= tol, fd, cd,
    )


@dataclass(frozen=True)
class MultiplicativityReport:
    coefficient: float
    residual_radius: float
    coefficient_equals_radius: bool
    powers_multiplicative: bool
    agree: bool
    worst_power_gap: float


def multiplicativity_test(
    T: MarkovOperator, P: MarkovProjection, N: int = 10, tol: float = 1e-8
) -> MultiplicativityReport:
    """The coefficient powers multiply exactly iff the coefficient equals r(T-P).

    Both sides of that equivalence are evaluated independently; ``agree``
    reports whether they match, which the theory says they must.
    """
    A = np.asarray(T.matrix)
    d1 = ergodicity_coefficient(T, P).value
    r = spectral_radius(A - np.asarray(P.matrix))
    left = abs(d1 - r) <= tol
    worst = 0.0
    Tn = A.copy()
    for n in range(1, N + 1):
        dn = ergodicity_coefficient(Tn, P, space=T.space).value
        worst = max(worst, abs(dn - d1**n))
        if n < N:
            Tn = Tn @ A
    right = worst <= tol
    return MultiplicativityReport(d1, r, left, right, left == right, worst)


@dataclass(frozen=True)
class TensorRateReport:
    lhs: float  # r(S x T - Q x P)
    rhs: float  # max of factor rates
    factor_rates: tuple
    ok: bool
    tight: bool


def tensor_rate_bound(
    S: MarkovOperator,
    Q: MarkovProjection,
    T: MarkovOperator,
    P: MarkovProjection,
    tol: float = 1e-9,
) -> TensorRateReport:
    """Product-chain rate never exceeds the worst factor rate.

    Requires both factors uniformly ergodic; the proof's annihilation
    identities ((S-Q)Q = Q(S-Q) = 0 and likewise for T, P) are rechecked
    here since they are exactly the membership conditions SQ=QS=Q and
    TP=PT=P.
    """
    for op, proj, tag in ((S, Q, "left"), (T, P, "right")):
        verdict, _ = classify(op, proj)
        if verdict.uniform is not True:
            raise PreconditionError(f"{tag} factor is not uniformly ergodic")
        ok_f, fd = fixes_projection(op, proj)
        ok_c, cd = commutes(op, proj)
        rev = operator_norm(
            np.asarray(proj.matrix) @ np.asarray(op.matrix) - np.asarray(proj.matrix),
            op.space,
        )
        if not (ok_f and ok_c) or rev > 1e-10:
            raise PreconditionError(
                f"{tag} factor breaks the annihilation identities "
                f"(defects {fd:.2e}, {cd:.2e}, {rev:.2e})"
            )
    rS = spectral_radius(np.asarray(S.matrix) - np.asarray(Q.matrix))
    rT = spectral_radius(np.asarray(T.matrix) - np.asarray(P.matrix))
    big = kronecker(S, T)
    bigP = kronecker_projection(Q, P)
    lhs = spectral_radius(np.asarray(big.matrix) - np.asarray(bigP.matrix))
    rhs = max(rS, rT)
    return TensorRateReport(lhs, rhs, (rS, rT), lhs <= rhs + tol, abs(lhs - rhs) <= tol)


@dataclass(frozen=True)
class RateProfile:
    norms: tuple    # norm(T^n - P) for n = 1..N
    alphas: tuple   # norm(T^n - P)^(1/n) - rate, converging to 0
    rate: float     # r(T - P)
    fitted_C: float  # log-least-squares prefactor over the tail


def rate_profile(T: MarkovOperator, P: MarkovProjection, N: int = 40) -> RateProfile:
    """Empirical power-norm decay against the spectral rate prediction.

    Members (TP = PT = P) get their power norms from normalized products
    of T - P with the scale tracked in logs, so magnitudes far below float
    resolution of the raw powers stay accurate; non-members fall back to
    direct powers of T since the product identity is unavailable.
    """
    A = np.asarray(T.matrix)
    Pm = np.asarray(P.matrix)
    E = A - Pm
    r = spectral_radius(E)
    member = fixes_projection(T, P)[0] and commutes(T, P)[0]
    log_norms: list[float | None] = []  # None encodes an exactly zero power
    if member:
        Y = E.copy()
        log_scale = 0.0
        dead = False
        for n in range(1, N + 1):
            if dead:
                log_norms.append(None)
                continue
            m = operator_norm(Y, T.space)
            if m <= 0.0:
                log_norms.append(None)
                dead = True
                continue
            log_norms.append(log_scale + math.log(m))
            if n < N:
                Y = E @ (Y / m)
                log_scale += math.log(m)
    else:
        Tn = A.copy()
        for n in range(1, N + 1):
            m = operator_norm(Tn - Pm, T.space)
            log_norms.append(math.log(m) if m > 0 else None)
            if n < N:
                Tn = Tn @ A
    norms = tuple(math.exp(v) if v is not None else 0.0 for v in log_norms)
    alphas = tuple(
        math.exp(v / n) - r if v is not None else -r
        for n, v in enumerate(log_norms, start=1)
    )
    tail = [
        v - n * math.log(r)
        for n, v in enumerate(log_norms, start=1)
        if n >= max(1, N // 2) and v is not None and r > 0
    ]
    fitted_C = math.exp(sum(tail) / len(tail)) if tail else 0.0
    return RateProfile(norms, alphas, r, fitted_C)
