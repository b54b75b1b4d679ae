"""Named theorem checks over a seeded corpus, with a fault-injection hook.

Each check validates its hypotheses before trusting any conclusion: the
operator must pass Markov validation, commutation-based results insist on
small membership defects, and kernel vertices are re-tested against the
projection.  That discipline is also what makes the ``corrupt`` hook work:
corrupting a named check appends an instance that silently violates the
generator contract (an unvalidated operator, a mislabeled projection, a
non-mixing chain promised to be ergodic), and a healthy suite must catch
it and report the named check as failing.
"""

from __future__ import annotations

import dataclasses
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .coefficients import (
    coefficient_inequalities,
    coefficient_lower_bound,
    eigenvalue_bound_check,
    ergodicity_coefficient,
    kernel_ball_vertices,
)
from .corpus import (
    Instance,
    block_fixture,
    build_corpus,
    metropolis_matrix,
    permutation_instance,
    recorded_nonmultiplicative_instance,
)
from .doeblin import (
    certificate_from_convergence,
    overlap_certificate,
    search_certificates,
    verify_certificate,
)
from .errors import ErgokitError
from .operators import (
    MarkovOperator,
    MarkovProjection,
    commutes,
    fixes_projection,
    markov_violations,
    operator_norm,
    rank_one_projection,
)
from .spaces import make_simplex
from .spectral import (
    best_rate,
    classify,
    gelfand_trail,
    multiplicativity_test,
    spectrum_shift_check,
    tensor_rate_bound,
)

MAX_MESSAGES = 8


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: int
    failed: int
    messages: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return self.failed == 0 and self.passed > 0


@dataclass(frozen=True)
class VerifyContext:
    samples: int = 20_000
    n0_cap: int = 200
    negative_cap: int = 25
    tol: float = 1e-9


def _result(name, fails: list[str], total: int) -> CheckResult:
    return CheckResult(name, total - len(fails), len(fails), tuple(fails[:MAX_MESSAGES]))


def _parallel_map(fn, items: list) -> list:
    """Ordered map over independent instances on a small thread pool.

    BLAS and the LP solver release the GIL, so this buys real concurrency,
    and merging in submission order keeps reports deterministic.
    """
    if len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(8, os.cpu_count() or 1)) as pool:
        return list(pool.map(fn, items))


def _validated(inst: Instance) -> str | None:
    if markov_violations(np.asarray(inst.T.matrix), inst.T.space):
        return f"{inst.label}: operator fails Markov validation"
    return None


def _membership(inst: Instance) -> str | None:
    ok_f, fd = fixes_projection(inst.T, inst.P)
    ok_c, cd = commutes(inst.T, inst.P)
    if not (ok_f and ok_c):
        return f"{inst.label}: membership defects fix={fd:.2e} commute={cd:.2e}"
    return None


# ---------------------------------------------------------------------------
# individual checks


def _check_coefficient_properties(instances, ctx) -> CheckResult:
    fails = []
    for inst in instances:
        bad = _validated(inst)
        if bad:
            fails.append(bad)
            continue
        S = inst.S if inst.S is not None else inst.T
        for chk in coefficient_inequalities(inst.T, S, inst.P, tol=ctx.tol):
            if not chk.ok:
                fails.append(f"{inst.label}: {chk.name}: {chk.details}")
    return _result("coefficient-properties", fails, len(instances))


def _check_pair_formula(instances, ctx) -> CheckResult:
    fails = []
    total = 0
    for inst in instances:
        if inst.P.variant not in ("rank_one", "block") or not inst.T.space.is_lattice:
            continue
        total += 1
        V = kernel_ball_vertices(inst.P, inst.T.space)
        ann = float(np.abs(V @ np.asarray(inst.P.matrix).T).max()) if len(V) else 0.0
        if ann > 1e-10:
            fails.append(f"{inst.label}: kernel vertex not annihilated ({ann:.2e})")
            continue
        a = ergodicity_coefficient(inst.T, inst.P, method="vertices").value
        b = ergodicity_coefficient(inst.T, inst.P, method="pairs").value
        if abs(a - b) > 1e-12:
            fails.append(f"{inst.label}: vertex {a!r} vs pair {b!r}")
    return _result("pair-formula", fails, total)


def _check_mc_lower_bound(instances, ctx) -> CheckResult:
    def one(pair):
        k, inst = pair
        bad = _validated(inst)
        if bad:
            return bad
        exact = ergodicity_coefficient(inst.T, inst.P).value
        low = coefficient_lower_bound(
            inst.T, inst.P, samples=ctx.samples, seed=1000 + k
        ).value
        if low > exact + 1e-12:
            return f"{inst.label}: lower bound {low} exceeds exact {exact}"
        if exact - low > 1e-4:
            return f"{inst.label}: bound is slack by {exact - low:.2e}"
        return None

    msgs = _parallel_map(one, list(enumerate(instances)))
    return _result("mc-lower-bound", [m for m in msgs if m], len(instances))


def _check_eigenvalue_bound(instances, ctx) -> CheckResult:
    fails = []
    total = 0
    for inst in instances:
        for op in (inst.T, inst.S):
            if op is None:
                continue
            total += 1
            try:
                rep = eigenvalue_bound_check(op, inst.P, tol=ctx.tol)
            except ErgokitError as exc:
                fails.append(f"{inst.label}: {exc}")
                continue
            if not rep.ok:
                fails.append(f"{inst.label}: excess {rep.max_excess:.2e}")
    return _result("eigenvalue-bound", fails, total)


def _check_classification(instances, ctx) -> CheckResult:
    fails = []
    for inst in instances:
        verdict, _ = classify(inst.T, inst.P)
        if not verdict.consistent:
            fails.append(f"{inst.label}: clauses disagree")
        elif verdict.uniform is not inst.expect_uniform:
            fails.append(
                f"{inst.label}: verdict {verdict.uniform} vs expected {inst.expect_uniform}"
            )
    return _result("classification-equivalence", fails, len(instances))


def _check_rate_identity(instances, ctx) -> CheckResult:
    fails = []
    total = 0
    for inst in instances:
        if not inst.expect_uniform:
            continue
        total += 1
        try:
            r = best_rate(inst.T, inst.P)
        except ErgokitError as exc:
            fails.append(f"{inst.label}: {exc}")
            continue
        if not 0.0 <= r < 1.0:
            fails.append(f"{inst.label}: rate {r} outside [0, 1)")
    return _result("rate-identity", fails, total)


def _check_gelfand_trail(instances, ctx) -> CheckResult:
    fails = []
    total = 0
    for inst in instances:
        if not inst.expect_uniform:
            continue
        total += 1
        try:
            trail = gelfand_trail(inst.T, inst.P, N=20)
        except ErgokitError as exc:
            fails.append(f"{inst.label}: {exc}")
            continue
        if not trail.all_above:
            worst = min(v - trail.residual_radius for v in trail.values)
            fails.append(f"{inst.label}: trail dips below the rate by {-worst:.2e}")
    return _result("gelfand-trail", fails, total)


def _check_spectrum_shift(instances, ctx) -> CheckResult:
    fails = []
    for inst in instances:
        bad = _membership(inst)
        if bad:
            fails.append(bad)
            continue
        rep = spectrum_shift_check(inst.T, inst.P)
        if not rep.ok:
            fails.append(
                f"{inst.label}: spectra mismatch (distance {rep.max_match_distance:.2e})"
            )
    return _result("spectrum-shift", fails, len(instances))


def _check_multiplicativity(instances, ctx) -> CheckResult:
    fails = []
    for inst in instances:
        bad = _membership(inst)
        if bad:
            fails.append(bad)
            continue
        rep = multiplicativity_test(inst.T, inst.P)
        if not rep.agree:
            fails.append(
                f"{inst.label}: equality {rep.coefficient_equals_radius} but "
                f"powers multiplicative {rep.powers_multiplicative}"
            )
    return _result("multiplicativity", fails, len(instances))


def _check_power_norm_chain(instances, ctx) -> CheckResult:
    # norm(T^n (I-P)) <= 2 delta_P(T^n) <= 2 norm(T^n - P), power by power
    fails = []
    for inst in instances:
        bad = _validated(inst)
        if bad:
            fails.append(bad)
            continue
        A = np.asarray(inst.T.matrix)
        Pm = np.asarray(inst.P.matrix)
        eye = np.eye(inst.T.space.dim)
        Tn = A.copy()
        for n in range(1, 16):
            gap = operator_norm(Tn @ (eye - Pm), inst.T.space)
            delta = ergodicity_coefficient(Tn, inst.P, space=inst.T.space).value
            resid = operator_norm(Tn - Pm, inst.T.space)
            if gap > 2 * delta + ctx.tol or delta > resid + ctx.tol:
                fails.append(f"{inst.label}: chain broken at n={n}")
                break
            Tn = Tn @ A
    return _result("power-norm-chain", fails, len(instances))


def _check_tensor_bound(instances, ctx) -> CheckResult:
    fails = []
    positives = [i for i in instances if i.expect_uniform and i.T.space.dim <= 6]
    pairs = list(zip(positives[:-1], positives[1:]))
    for left, right in pairs:
        try:
            rep = tensor_rate_bound(left.T, left.P, right.T, right.P, tol=ctx.tol)
        except ErgokitError as exc:
            fails.append(f"{left.label} x {right.label}: {exc}")
            continue
        if not rep.ok:
            fails.append(
                f"{left.label} x {right.label}: product rate {rep.lhs} "
                f"exceeds factor max {rep.rhs}"
            )
    return _result("tensor-bound", fails, len(pairs))


def _check_doeblin_equivalence(instances, ctx) -> CheckResult:
    lattice = [i for i in instances if i.T.space.is_lattice]

    def one(inst):
        if inst.expect_uniform:
            try:
                cert = certificate_from_convergence(inst.T, inst.P, n0_cap=ctx.n0_cap)
            except ErgokitError as exc:
                return f"{inst.label}: {exc}"
            report = verify_certificate(cert, inst.T, inst.P)
            if not report.ok:
                return f"{inst.label}: audit failed: {report.violations}"
            if not report.bound_holds:
                return f"{inst.label}: implied bound fails"
        else:
            out = search_certificates(inst.T, inst.P, n0_cap=ctx.negative_cap)
            if not out.exhausted_minorization:
                return f"{inst.label}: non-ergodic chain got a certificate"
        return None

    msgs = _parallel_map(one, lattice)
    return _result("doeblin-equivalence", [m for m in msgs if m], len(lattice))


def _check_overlap_soundness(instances, ctx) -> CheckResult:
    lattice = [i for i in instances if i.T.space.is_lattice]

    def one(inst):
        if inst.expect_uniform:
            try:
                n0 = certificate_from_convergence(inst.T, inst.P, n0_cap=ctx.n0_cap).n0
                out = overlap_certificate(inst.T, inst.P, inst.P, n0)
            except ErgokitError as exc:
                return f"{inst.label}: {exc}"
            # columns within 1/4 of the projection overlap by >= 7/8
            if not out.feasible or out.overlap < 0.875 - 1e-12:
                return f"{inst.label}: expected overlap at n0={n0}"
            verdict, _ = classify(inst.T, inst.P)
            if verdict.uniform is not True:
                return f"{inst.label}: certificate issued but not ergodic"
        else:
            out = search_certificates(inst.T, inst.P, n0_cap=ctx.negative_cap)
            if not out.exhausted_overlap:
                return f"{inst.label}: overlap certificate on a non-mixing chain"
        return None

    msgs = _parallel_map(one, lattice)
    return _result("overlap-soundness", [m for m in msgs if m], len(lattice))


def _check_certificate_audit(instances, ctx) -> CheckResult:
    fails = []
    total = 0
    for inst in instances:
        if not (inst.expect_uniform and inst.T.space.is_lattice):
            continue
        total += 1
        try:
            cert = certificate_from_convergence(inst.T, inst.P, n0_cap=ctx.n0_cap)
        except ErgokitError as exc:
            fails.append(f"{inst.label}: {exc}")
            continue
        if not verify_certificate(cert, inst.T, inst.P).ok:
            fails.append(f"{inst.label}: honest certificate rejected")
        forged = dataclasses.replace(cert, tau=1.2)
        if verify_certificate(forged, inst.T, inst.P).ok:
            fails.append(f"{inst.label}: forged tau accepted")
        padded = dataclasses.replace(cert, sup_phi_norm=cert.sup_phi_norm + 1.0)
        if verify_certificate(padded, inst.T, inst.P).ok:
            fails.append(f"{inst.label}: padded corrector norm accepted")
    return _result("certificate-audit", fails, total)


def instance_theorems(
    T: MarkovOperator, P: MarkovProjection, tol: float = 1e-9
) -> list[tuple[str, bool, str]]:
    """Per-instance theorem scoreboard for analysis reports.

    Expectation-free: the classification entry judges internal clause
    agreement, not a generator promise, so it applies to arbitrary input.
    """
    out: list[tuple[str, bool, str]] = []
    space = T.space
    for chk in coefficient_inequalities(T, T, P, tol=tol):
        detail = chk.details if chk.applicable else f"not applicable: {chk.details}"
        out.append((f"coefficient-{chk.name}", chk.ok, detail))
    if P.variant in ("rank_one", "block") and space.is_lattice:
        a = ergodicity_coefficient(T, P, method="vertices").value
        b = ergodicity_coefficient(T, P, method="pairs").value
        out.append(("pair-formula", abs(a - b) <= 1e-12, f"gap {abs(a - b):.2e}"))
    try:
        rep = eigenvalue_bound_check(T, P, tol=tol)
        out.append(("eigenvalue-bound", rep.ok, f"max excess {rep.max_excess:.2e}"))
    except ErgokitError as exc:
        out.append(("eigenvalue-bound", False, str(exc)))
    verdict, _ = classify(T, P)
    out.append(
        (
            "classification-consistent",
            verdict.consistent,
            f"clauses {[c.holds for c in verdict.clauses]}",
        )
    )
    ok_f, _ = fixes_projection(T, P)
    ok_c, _ = commutes(T, P)
    if ok_f and ok_c:
        srep = spectrum_shift_check(T, P)
        out.append(
            ("spectrum-shift", srep.ok, f"match distance {srep.max_match_distance:.2e}")
        )
        mrep = multiplicativity_test(T, P)
        out.append(
            (
                "multiplicativity",
                mrep.agree,
                f"equality {mrep.coefficient_equals_radius}, "
                f"powers {mrep.powers_multiplicative}",
            )
        )
    if verdict.uniform is True:
        try:
            r = best_rate(T, P)
            out.append(("rate-identity", 0.0 <= r < 1.0, f"rate {r:.6g}"))
        except ErgokitError as exc:
            out.append(("rate-identity", False, str(exc)))
        trail = gelfand_trail(T, P, N=15)
        out.append(
            ("gelfand-trail", trail.all_above, f"residual radius {trail.residual_radius:.6g}")
        )
    return out


CHECKS = (
    ("coefficient-properties", _check_coefficient_properties),
    ("pair-formula", _check_pair_formula),
    ("mc-lower-bound", _check_mc_lower_bound),
    ("eigenvalue-bound", _check_eigenvalue_bound),
    ("classification-equivalence", _check_classification),
    ("rate-identity", _check_rate_identity),
    ("gelfand-trail", _check_gelfand_trail),
    ("spectrum-shift", _check_spectrum_shift),
    ("multiplicativity", _check_multiplicativity),
    ("power-norm-chain", _check_power_norm_chain),
    ("tensor-bound", _check_tensor_bound),
    ("doeblin-equivalence", _check_doeblin_equivalence),
    ("overlap-soundness", _check_overlap_soundness),
    ("certificate-audit", _check_certificate_audit),
)

CHECK_NAMES = tuple(name for name, _ in CHECKS)


# ---------------------------------------------------------------------------
# fault injection


def _poison_invalid_operator() -> Instance:
    space = make_simplex(3)
    # constructed directly, skipping as_markov: column sums are wrong
    bad = MarkovOperator(np.diag([1.3, 1.0, 1.0]), space)
    P = rank_one_projection(space, np.full(3, 1.0 / 3.0))
    return Instance("poison-invalid-operator", bad, P, S=bad)


def _poison_noncommuting() -> Instance:
    rng = np.random.default_rng(12345)
    space = make_simplex(3)
    T = MarkovOperator(metropolis_matrix(np.array([0.6, 0.3, 0.1]), rng), space)
    # projection onto the wrong target: TP = P fails by a visible margin
    P = rank_one_projection(space, np.full(3, 1.0 / 3.0))
    return Instance("poison-noncommuting", T, P, S=T)


def _poison_false_positive() -> Instance:
    inst = permutation_instance(4)
    return dataclasses.replace(
        inst, label="poison-false-positive", expect_uniform=True
    )


def _poison_lying_projection() -> Instance:
    base = block_fixture()
    lying = MarkovProjection(
        np.asarray(base.P.matrix), base.P.space, "rank_one", y=np.full(4, 0.25)
    )
    return Instance("poison-lying-projection", base.T, lying)


_POISON = {
    "coefficient-properties": _poison_invalid_operator,
    "mc-lower-bound": _poison_invalid_operator,
    "power-norm-chain": _poison_invalid_operator,
    "pair-formula": _poison_lying_projection,
    "eigenvalue-bound": _poison_noncommuting,
    "gelfand-trail": _poison_noncommuting,
    "spectrum-shift": _poison_noncommuting,
    "multiplicativity": _poison_noncommuting,
    "tensor-bound": _poison_noncommuting,
    "classification-equivalence": _poison_false_positive,
    "rate-identity": _poison_false_positive,
    "doeblin-equivalence": _poison_false_positive,
    "overlap-soundness": _poison_false_positive,
    "certificate-audit": _poison_false_positive,
}


def run_verification(
    seed: int = 0,
    dims=(2, 3, 4, 5, 6),
    count: int = 3,
    samples: int = 20_000,
    corrupt: str | None = None,
) -> list[CheckResult]:
    """Run every named check over the seeded corpus.

    ``corrupt`` names a check whose instance stream gets a contract-breaking
    entry appended; the named check must then fail, which is how the test
    hook distinguishes a working harness from one that cannot detect faults.
    """
    if corrupt is not None and corrupt not in _POISON:
        raise ValueError(
            f"unknown check {corrupt!r}; expected one of {', '.join(CHECK_NAMES)}"
        )
    base = build_corpus(seed, dims=dims, chains_per_dim=count)
    base.append(recorded_nonmultiplicative_instance())
    ctx = VerifyContext(samples=samples)
    results = []
    for name, fn in CHECKS:
        instances = list(base)
        if corrupt == name:
            instances.append(_POISON[name]())
        results.append(fn(instances, ctx))
    return results
