"""Per-annotation parameter optimization and proof search.

For a fixed annotation and parameters (alpha, c) the choice of speedup
parameters reduces to a linear program: every exponent produced by a rule is
a variable bounded below by each argument of its max, strict rule
preconditions get a common margin variable that is maximized, constant floors
are dropped (homogeneous form) and the initial d = 1 fixes the scale.  The
annotation is feasible iff the maximal margin is positive; every positive
answer is replayed through the exact rules at a large concrete d.

The float LP (scipy/HiGHS) only steers: a feasible answer is certified by an
exact rational witness check, an infeasible one by an exact rational
weak-duality certificate reconstructed from the float duals; when neither
certifies, an exact rational simplex decides.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from . import simplex
from .analytics import largest_root_cubic, p_alpha
from .kernel import (
    BP_TS,
    BPTS_MODE,
    DET_TS,
    TS_MODE,
    AltClass,
    enumerate_annotations,
    validate_annotation,
)
from .rules import (
    ProofCertificate,
    RuleError,
    RuleStep,
    apply_step,
    expected_assumption,
    verify_proof,
)

_CONST = -1
_MARGIN = 0

_FLOAT_TOL = 1e-9


# --- Shared annotation walk -------------------------------------------------
#
# The LP builder and the exact witness evaluator run the same homogeneous
# rule semantics; only the value algebra differs (linear expressions vs
# tight rational values).


class _BuildAlgebra:
    """Values are linear expressions {var index: coeff, _CONST: coeff}."""

    def __init__(self):
        self.nvars = 1  # var 0 is the margin
        self.rows: list[dict[int, Fraction]] = []  # each row means expr >= 0
        self.xvars: list[int] = []

    def _new_var(self) -> int:
        i = self.nvars
        self.nvars += 1
        return i

    def const(self, v) -> dict:
        v = Fraction(v)
        return {_CONST: v} if v else {}

    def x(self, j: int) -> dict:
        i = self._new_var()
        self.xvars.append(i)
        return {i: Fraction(1)}

    def sub(self, e1: dict, e2: dict) -> dict:
        out = dict(e1)
        for k, v in e2.items():
            out[k] = out.get(k, Fraction(0)) - v
            if not out[k]:
                del out[k]
        return out

    def scale(self, fac: Fraction, e: dict) -> dict:
        fac = Fraction(fac)
        return {k: fac * v for k, v in e.items()} if fac else {}

    def max_of(self, terms: list[dict]) -> dict:
        terms = [t for t in terms if t]
        if not terms:
            return {}
        if len(terms) == 1:
            return terms[0]
        i = self._new_var()
        for t in terms:
            self.rows.append(self.sub({i: Fraction(1)}, t))
        return {i: Fraction(1)}

    def precondition(self, e: dict):
        self.rows.append(self.sub(e, {_MARGIN: Fraction(1)}))

    def final(self, d: dict):
        self.rows.append(self.sub(self.const(1), self.sub(d, {_MARGIN: Fraction(-1)})))


class _EvalAlgebra:
    """Values are exact rationals under the tight (max) semantics."""

    def __init__(self, xs: list[Fraction]):
        self.xs = xs
        self.margin: Fraction | None = None

    def const(self, v) -> Fraction:
        return Fraction(v)

    def x(self, j: int) -> Fraction:
        return self.xs[j]

    def sub(self, e1, e2):
        return e1 - e2

    def scale(self, fac, e):
        return Fraction(fac) * e

    def max_of(self, terms):
        return max(terms) if terms else Fraction(0)

    def precondition(self, e):
        self.margin = e if self.margin is None else min(self.margin, e)

    def final(self, d):
        self.precondition(Fraction(1) - d)


def _walk_annotation(a: str, alpha: Fraction, cc: Fraction, mode: str, use_grover: bool, alg):
    """Run the homogeneous rule semantics of the annotation over an algebra."""
    ts = mode == TS_MODE
    ver_bp = not ts
    two_thirds = Fraction(2, 3)
    zero = alg.const(0)
    blocks: list[tuple] = []  # (a value, b value); constant-1 floors are zero
    d = alg.const(1)
    j = 0
    for sym in a:
        if sym == "1":
            x = alg.x(j)
            j += 1
            alg.precondition(x)
            alg.precondition(alg.sub(d, x))
            if not ver_bp:
                if blocks:  # usual speedup
                    a0, b0 = blocks[-1]
                    blocks[-1] = (alg.max_of([a0, x]), alg.max_of([b0, x]))
                    blocks.append((zero, b0))
                else:  # first speedup: E(x, max(x,1)) A(0, 1)
                    blocks.append((x, x))
                    blocks.append((zero, zero))
            else:  # randomized speedup
                if blocks:
                    a0, b0 = blocks[-1]
                    blocks.append((x, alg.max_of([b0, x])))
                    blocks.append((zero, b0))
                else:  # E(0,1) A(x, max(x,1)) E(0,1)
                    blocks.append((zero, zero))
                    blocks.append((x, x))
                    blocks.append((zero, zero))
            ver_bp = False
            d = alg.sub(d, x)
        elif sym == "0":
            a0, b0 = blocks.pop()
            b_prev = blocks[-1][1] if blocks else zero
            if use_grover and ts:
                lead = alg.scale(cc * two_thirds, d)
            else:
                lead = alg.scale(cc * alpha, d)
            d = alg.max_of([lead, alg.scale(cc, b0), alg.scale(cc, a0), alg.scale(cc, b_prev)])
            ver_bp = not ts
        else:  # '2' squiggle
            a0, b0 = blocks[-1]
            ratio = alpha * cc / (alpha * cc - 1)
            alg.precondition(alg.sub(alg.scale(ratio, a0), d))
            d = alg.max_of([alg.scale(cc, a0), alg.scale(cc, b0)])
    alg.final(d)


def _build_lp(a, alpha, cc, mode, use_grover) -> _BuildAlgebra:
    alg = _BuildAlgebra()
    _walk_annotation(a, alpha, cc, mode, use_grover, alg)
    return alg


def _witness_margin(a, alpha, cc, mode, use_grover, xs) -> Fraction:
    """Exact margin of the witness under tight semantics (may be <= 0)."""
    alg = _EvalAlgebra(xs)
    _walk_annotation(a, alpha, cc, mode, use_grover, alg)
    return alg.margin


# --- Exact certification of the float answer --------------------------------


def _solve_rational(a_rows: list[list[Fraction]], b: list[Fraction]) -> list[Fraction] | None:
    """Any exact solution of A w = b (free unknowns set to 0), else None."""
    m = len(a_rows)
    n = len(a_rows[0]) if m else 0
    rows = [list(r) + [bv] for r, bv in zip(a_rows, b)]
    piv_cols = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, m) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = Fraction(1) / rows[r][col]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(m):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [v - f * p for v, p in zip(rows[i], rows[r])]
        piv_cols.append(col)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if rows[i][-1] != 0:
            return None  # inconsistent
    w = [Fraction(0)] * n
    for i, col in enumerate(piv_cols):
        w[col] = rows[i][-1]
    return w


def _dual_bound(lp: _BuildAlgebra, support: list[int], w: list[Fraction]) -> Fraction | None:
    """Weak-duality bound from any exact multipliers w >= 0 on the rows:
    summing w_r * (row_r >= 0) gives q.v + bound >= 0, so if every variable
    coefficient q_i is <= 0 (and the free margin's is < 0) then
    margin <= bound / (-q_margin); returns that iff it is <= 0."""
    q: dict[int, Fraction] = {}
    bound = Fraction(0)
    for r, wr in zip(support, w):
        if not wr:
            continue
        for i, coeff in lp.rows[r].items():
            if i == _CONST:
                bound += wr * coeff
            else:
                q[i] = q.get(i, Fraction(0)) + wr * coeff
    if q.get(_MARGIN, Fraction(0)) >= 0:
        return None
    if any(v > 0 for i, v in q.items() if i != _MARGIN):
        return None
    bound = bound / -q[_MARGIN]
    return bound if bound <= 0 else None


def _certify_infeasible(lp: _BuildAlgebra, res) -> Fraction | None:
    """Exact weak-duality upper bound on the margin; returns it iff <= 0."""
    w_float = -res.ineqlin.marginals
    support = [r for r, v in enumerate(w_float) if v > 1e-11]
    if not support:
        return None
    # cheap path: rationalize the float multipliers directly
    for limit in (10**6, 10**12):
        w = [Fraction(w_float[r]).limit_denominator(limit) for r in support]
        if all(v >= 0 for v in w):
            bound = _dual_bound(lp, support, w)
            if bound is not None:
                return bound
    # exact path: recover the multipliers from the tight rows and columns
    tight = [_MARGIN] + [i for i in range(1, lp.nvars) if res.x[i] > 1e-9]
    a_rows = [[lp.rows[r].get(i, Fraction(0)) for r in support] for i in tight]
    b = [Fraction(-1)] + [Fraction(0)] * (len(tight) - 1)
    sol = _solve_rational(a_rows, b)
    if sol is None or any(v < 0 for v in sol):
        return None
    return _dual_bound(lp, support, sol)


def _solve_float(lp: _BuildAlgebra):
    n = lp.nvars
    a_ub = np.zeros((len(lp.rows), n))
    b_ub = np.zeros(len(lp.rows))
    for r, row in enumerate(lp.rows):
        for i, coeff in row.items():
            if i == _CONST:
                b_ub[r] = float(coeff)
            else:
                a_ub[r, i] = -float(coeff)
    c = np.zeros(n)
    c[_MARGIN] = -1.0
    bounds = [(None, None)] + [(0, None)] * (n - 1)
    return linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")


def _solve_exact(lp: _BuildAlgebra):
    """Exact simplex on the same LP with the margin clamped to >= 0.

    Returns (margin, xs) with margin the exact optimum (None if the clamped
    system is infeasible, meaning the true optimum is negative)."""
    rows = []
    for row in lp.rows:
        coeffs = [row.get(i, Fraction(0)) for i in range(lp.nvars)]
        rows.append((coeffs, simplex.GE, -row.get(_CONST, Fraction(0))))
    obj = [Fraction(0)] * lp.nvars
    obj[_MARGIN] = Fraction(1)
    res = simplex.solve(obj, rows)
    if res.status != simplex.OPTIMAL:
        return None, None
    xs = [res.x[i] for i in lp.xvars]
    return res.value, xs


def _solve_exact_tight(lp: _BuildAlgebra, margin: Fraction):
    """Exact simplex phase 2: margin fixed, total variable mass minimized."""
    rows = []
    for row in lp.rows:
        coeffs = [row.get(i, Fraction(0)) for i in range(1, lp.nvars)]
        rhs = -row.get(_CONST, Fraction(0)) - row.get(_MARGIN, Fraction(0)) * margin
        rows.append((coeffs, simplex.GE, rhs))
    obj = [Fraction(-1)] * (lp.nvars - 1)
    res = simplex.solve(obj, rows)
    if res.status != simplex.OPTIMAL:
        return None
    return [res.x[i - 1] for i in lp.xvars]


# --- Feasibility ------------------------------------------------------------


@dataclass
class Feasibility:
    annotation: str
    alpha: Fraction
    c: Fraction
    mode: str
    feasible: bool
    margin: Fraction | None
    witness: list[Fraction]
    replay_ok: bool
    certificate: ProofCertificate | None
    method: str


def annotation_certificate(
    a: str,
    alpha: Fraction,
    cc: Fraction,
    mode: str,
    use_grover: bool,
    xs: list[Fraction],
    d0: Fraction,
) -> ProofCertificate:
    """Apply the annotation's rules at concrete scale d0 with the given
    speedup parameters (one per '1')."""
    ver = BP_TS if mode == BPTS_MODE else DET_TS
    cls = AltClass((), ver, d0)
    classes = [cls]
    steps: list[RuleStep] = []
    j = 0
    for sym in a:
        if sym == "1":
            if cls.verifier == BP_TS:
                name = "speedup_rand"
            elif cls.blocks:
                name = "speedup"
            else:
                name = "speedup_first"
            step = RuleStep(name, xs[j])
            j += 1
        elif sym == "0":
            step = RuleStep("grover" if use_grover and mode == TS_MODE else "slowdown")
        else:
            step = RuleStep("squiggle")
        cls, _ = apply_step(cls, step, alpha, cc, mode)
        steps.append(step)
        classes.append(cls)
    assumption = expected_assumption(mode, any(s.rule == "grover" for s in steps))
    return ProofCertificate(alpha, cc, mode, assumption, classes, steps)


def _replay(a, alpha, cc, mode, use_grover, xs, margin):
    """Replay the witness at a large concrete d; doubles d on floor trouble."""
    base = 10**6
    if margin is not None and margin > 0:
        base = max(base, int(2 / (alpha * margin)) + 1)
    d0 = Fraction(base)
    for _ in range(10):
        try:
            cert = annotation_certificate(a, alpha, cc, mode, use_grover, [x * d0 for x in xs], d0)
        except (RuleError, ValueError):
            d0 *= 2
            continue
        report = verify_proof(cert)
        if report.valid and report.contradiction:
            return True, cert
        d0 *= 2
    return False, None


def feasible(
    a: str,
    alpha: Fraction,
    cc: Fraction,
    mode: str = TS_MODE,
    use_grover: bool = False,
    replay: bool = True,
) -> Feasibility:
    """Decide the linear relaxation for (annotation, alpha, c) and replay any
    positive answer through the exact rules (skipped when replay=False)."""
    alpha, cc = Fraction(alpha), Fraction(cc)
    report = validate_annotation(a, mode)
    if not (report.valid and report.complete):
        raise ValueError(f"annotation {a!r} is not a valid complete {mode} annotation")
    if not 0 < alpha <= 1 < cc:
        raise ValueError(f"parameter range 0 < alpha <= 1 < c fails: alpha={alpha}, c={cc}")
    if use_grover and mode != TS_MODE:
        raise ValueError("grover collapse search applies in ts mode only")

    def result(ok, margin, xs, method):
        replay_ok, cert = (False, None)
        if ok and replay:
            replay_ok, cert = _replay(a, alpha, cc, mode, use_grover, xs, margin)
        return Feasibility(a, alpha, cc, mode, ok, margin, xs, replay_ok, cert, method)

    if "2" in a and not (alpha * cc > 1 and cc < (1 + alpha) / alpha):
        return result(False, None, [], "precondition")

    lp = _build_lp(a, alpha, cc, mode, use_grover)
    res = _solve_float(lp)
    if res.status == 0:
        mval = -res.fun
        if mval > _FLOAT_TOL:
            xs = [
                Fraction(float(res.x[i])).limit_denominator(10**12) for i in lp.xvars
            ]
            margin = _witness_margin(a, alpha, cc, mode, use_grover, xs)
            if margin is not None and margin > 0:
                return result(True, margin, xs, "float+primal")
        elif mval < -_FLOAT_TOL:
            bound = _certify_infeasible(lp, res)
            if bound is not None:
                return result(False, bound, [], "float+dual")

    margin, xs = _solve_exact(lp)
    if margin is None or margin <= 0:
        return result(False, margin, [], "exact")
    tight = _witness_margin(a, alpha, cc, mode, use_grover, xs)
    if tight is None or tight <= 0:
        xs2 = _solve_exact_tight(lp, margin)
        if xs2 is not None:
            tight2 = _witness_margin(a, alpha, cc, mode, use_grover, xs2)
            if tight2 is not None and tight2 > 0:
                xs = xs2
    return result(True, margin, xs, "exact")


# --- Bisection over c -------------------------------------------------------


class BracketError(RuntimeError):
    """Feasibility is not monotone over the chosen bracket."""


def _midpoint(lo: Fraction, hi: Fraction) -> Fraction:
    """A simple rational strictly inside (lo, hi), near the midpoint.

    Keeping denominators small keeps all downstream exact arithmetic cheap;
    the exact midpoint would double the denominator every bisection step."""
    mid = (lo + hi) / 2
    limit = 16
    while limit <= 10**18:
        cand = mid.limit_denominator(limit)
        if lo < cand < hi:
            return cand
        limit *= 16
    return mid


def _bisect_c(a, alpha, tol, mode, use_grover, want_cert=True):
    """Returns (c*, certificate at the last feasible c) or (None, None)."""
    alpha = Fraction(alpha)
    tol = Fraction(tol)
    lo_base = max(Fraction(1), 1 / alpha) if "2" in a else Fraction(1)
    hi = (1 + alpha) / alpha
    lo = lo_base + min(Fraction(1, 1000), (hi - lo_base) / 1000)
    f_lo = feasible(a, alpha, lo, mode, use_grover, replay=False)
    if not f_lo.feasible:
        return None, None
    f_hi = feasible(a, alpha, hi, mode, use_grover, replay=False)
    if f_hi.feasible:
        raise BracketError(
            f"feasibility not monotone for {a!r}: feasible at both c={lo} and c={hi}"
        )
    best = f_lo
    while hi - lo > tol:
        mid = _midpoint(lo, hi)
        f_mid = feasible(a, alpha, mid, mode, use_grover, replay=False)
        if f_mid.feasible:
            lo = mid
            best = f_mid
        else:
            hi = mid
    cert = None
    if want_cert:
        _, cert = _replay(a, alpha, best.c, mode, use_grover, best.witness, best.margin)
    return (lo + hi) / 2, cert


def best_exponent(
    a: str,
    alpha: Fraction,
    tol: Fraction = Fraction(1, 10**6),
    mode: str = TS_MODE,
    use_grover: bool = False,
) -> Fraction | None:
    """Largest c (within tol) at which the annotation is feasible, by
    bisection; None if it is infeasible even near c = 1."""
    c_star, _ = _bisect_c(a, alpha, tol, mode, use_grover)
    return c_star


@dataclass
class SearchResult:
    best_c: Fraction
    annotation: str
    certificate: ProofCertificate | None


def search_best(
    max_len: int,
    alpha: Fraction,
    mode: str = TS_MODE,
    tol: Fraction = Fraction(1, 10**6),
    use_grover: bool = False,
    workers: int | None = None,
) -> SearchResult | None:
    """Maximize best_exponent over all annotations up to max_len.

    Ties break deterministically toward the shortest, then lexicographically
    smallest annotation (the enumeration order)."""
    annotations = list(enumerate_annotations(max_len, mode))
    results = _map_jobs(
        _best_exponent_job,
        [(a, alpha, tol, mode, use_grover) for a in annotations],
        workers,
    )
    best = None
    for a, c_star in zip(annotations, results):
        if c_star is not None and (best is None or c_star > best[0]):
            best = (c_star, a)
    if best is None:
        return None
    _, cert = _bisect_c(best[1], alpha, tol, mode, use_grover, want_cert=True)
    return SearchResult(best[0], best[1], cert)


def _best_exponent_job(args):
    a, alpha, tol, mode, use_grover = args
    return _bisect_c(a, alpha, tol, mode, use_grover, want_cert=False)[0]


# --- Named proof constructors ----------------------------------------------


@dataclass(frozen=True)
class GoodProofParams:
    k: int
    epsilon: Fraction
    x: tuple[Fraction, ...]


def good_proof_params(alpha: Fraction, cc: Fraction, k: int, d: Fraction) -> GoodProofParams:
    """Geometric speedup parameters x_i = tau^(i-1) * x_1 with
    tau = (1-eps)/(c(alpha*c-1)), eps = 1/k.

    x_1 is d/(alpha*c^2) when the speedups fit into d; otherwise it is scaled
    down just enough that they do (the contradiction then holds a fortiori)."""
    alpha, cc, d = Fraction(alpha), Fraction(cc), Fraction(d)
    eps = Fraction(1, k)
    tau = (1 - eps) / (cc * (alpha * cc - 1))
    s = sum(tau**i for i in range(k))
    base = alpha * cc * cc
    scale = base if s < base else s + tau ** (k - 1) / (2 * (alpha * cc - 1))
    x1 = d / scale
    return GoodProofParams(k, eps, tuple(x1 * tau**i for i in range(k)))


def _good_proof_min_d(alpha, cc, k) -> Fraction:
    eps = Fraction(1, k)
    tau = (1 - eps) / (cc * (alpha * cc - 1))
    s = sum(tau**i for i in range(k))
    base = alpha * cc * cc
    scale = base if s < base else s + tau ** (k - 1) / (2 * (alpha * cc - 1))
    return 2 * scale / min(Fraction(1), tau) ** (k - 1)


def good_proof(
    alpha: Fraction, cc: Fraction, k: int, d: Fraction | None = None
) -> ProofCertificate:
    """Certificate for the annotation 1^k 0 (20)^k with geometric parameters.

    d is auto-scaled upward so every exponent stays above the constant floors.
    The certificate always verifies; it shows a contradiction exactly when the
    finite-k constraint holds (all squiggles proper)."""
    alpha, cc = Fraction(alpha), Fraction(cc)
    if k < 1:
        raise ValueError("k must be >= 1")
    if not (alpha * cc > 1 and cc < (1 + alpha) / alpha):
        raise ValueError(
            f"need 1/alpha < c < (1+alpha)/alpha for the squiggle rule: alpha={alpha}, c={cc}"
        )
    min_d = _good_proof_min_d(alpha, cc, k)
    if d is None:
        d = max(Fraction(100), min_d)
    else:
        d = max(Fraction(d), min_d)
    params = good_proof_params(alpha, cc, k, d)
    steps = [RuleStep("speedup_first", params.x[0])]
    steps += [RuleStep("speedup", x) for x in params.x[1:]]
    steps.append(RuleStep("slowdown"))
    for _ in range(k):
        steps.append(RuleStep("squiggle"))
        steps.append(RuleStep("slowdown"))
    return _run_steps(alpha, cc, TS_MODE, d, steps)


def _run_steps(alpha, cc, mode, d0, steps) -> ProofCertificate:
    ver = BP_TS if mode == BPTS_MODE else DET_TS
    cls = AltClass((), ver, Fraction(d0))
    classes = [cls]
    for step in steps:
        cls, _ = apply_step(cls, step, alpha, cc, mode)
        classes.append(cls)
    assumption = expected_assumption(mode, any(s.rule == "grover" for s in steps))
    return ProofCertificate(alpha, cc, mode, assumption, classes, list(steps))


def good_proof_contradicts(alpha: Fraction, cc: Fraction, k: int) -> bool:
    """True iff the Good proof at (alpha, c, k) replays to a contradiction
    with every squiggle proper."""
    try:
        cert = good_proof(alpha, cc, k)
    except (ValueError, RuleError):
        return False
    report = verify_proof(cert)
    return (
        report.valid
        and report.contradiction
        and len(report.squiggles) == k
        and all(proper for _, _, proper in report.squiggles)
    )


def good_proof_best_c(alpha: Fraction, k: int, tol: Fraction = Fraction(1, 10**7)) -> Fraction:
    """Largest c (within tol) at which the Good proof of height k shows a
    proper contradiction, by grid scan plus bisection."""
    alpha = Fraction(alpha)
    tol = Fraction(tol)
    lo_base = max(Fraction(1), 1 / alpha)
    hi = (1 + alpha) / alpha
    span = hi - lo_base
    grid = 64
    lo = None
    prev = hi
    for i in range(1, grid + 1):
        c = hi - span * i / grid
        if c <= lo_base:
            break
        if good_proof_contradicts(alpha, c, k):
            lo = c
            break
        prev = c
    if lo is None:
        raise RuntimeError(f"no contradicting c found for alpha={alpha}, k={k}")
    hi = prev
    while hi - lo > tol:
        mid = _midpoint(lo, hi)
        if good_proof_contradicts(alpha, mid, k):
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def good_proof_limit(alpha: Fraction, tol: float = 1e-12) -> float:
    """k -> infinity limit of the Good-proof bound: largest root of P_alpha."""
    return largest_root_cubic(p_alpha(Fraction(alpha)), tol)


def bpts_proof(k: int, cc: Fraction, d: Fraction | None = None) -> ProofCertificate:
    """Certificate for the bpts annotation 1^k 0^(k+2) with geometric
    parameters x_i = ((1-eps)/c)^(i-1) * x_1, eps = 1/k.

    x_1 is d/c^3 when the speedups fit into d, otherwise scaled down just
    enough; d is auto-scaled above the constant floors."""
    cc = Fraction(cc)
    if k < 1:
        raise ValueError("k must be >= 1")
    if cc <= 1:
        raise ValueError(f"need c > 1: c={cc}")
    eps = Fraction(1, k)
    rho = (1 - eps) / cc
    s = sum(rho**i for i in range(k))
    c3 = cc**3
    scale = c3 if s < c3 else s + rho ** (k - 1) / 2
    min_d = 2 * scale / rho ** (k - 1)
    d = max(Fraction(d) if d is not None else Fraction(100), min_d)
    x1 = d / scale
    xs = [x1 * rho**i for i in range(k)]
    steps = [RuleStep("speedup_rand", xs[0])]
    steps += [RuleStep("speedup", x) for x in xs[1:]]
    steps += [RuleStep("slowdown")] * (k + 2)
    return _run_steps(Fraction(1), cc, BPTS_MODE, d, steps)


def bpts_grover_proof(cc: Fraction, d: Fraction | None = None) -> ProofCertificate:
    """Certificate for the repeated grover contraction on a randomized
    verifier: randomized speedup with x = 2d/3, two normal slowdowns, then
    grover steps while they shrink the exponent, then a final slowdown.
    Shows a contradiction exactly when c < 3/2."""
    cc = Fraction(cc)
    if cc <= 1:
        raise ValueError(f"need c > 1: c={cc}")
    d0 = max(Fraction(d) if d is not None else Fraction(10), Fraction(10))
    steps = [
        RuleStep("speedup_rand", Fraction(2, 3) * d0),
        RuleStep("slowdown"),
        RuleStep("slowdown"),
    ]
    cls = AltClass((), BP_TS, d0)
    classes = [cls]
    for step in steps:
        cls, _ = apply_step(cls, step, Fraction(1), cc, BPTS_MODE)
        classes.append(cls)
    for _ in range(10**5):
        if cc * cls.d <= d0:
            break  # the final slowdown already lands at or below d0
        nxt, _ = apply_step(cls, RuleStep("grover"), Fraction(1), cc, BPTS_MODE)
        if nxt.d >= cls.d:
            break  # no contraction at this c
        steps.append(RuleStep("grover"))
        cls = nxt
        classes.append(cls)
    steps.append(RuleStep("slowdown"))
    cls, _ = apply_step(cls, RuleStep("slowdown"), Fraction(1), cc, BPTS_MODE)
    classes.append(cls)
    assumption = expected_assumption(BPTS_MODE, any(s.rule == "grover" for s in steps))
    return ProofCertificate(Fraction(1), cc, BPTS_MODE, assumption, classes, steps)


# --- Optimality scan --------------------------------------------------------


@dataclass
class ScanEntry:
    annotation: str
    feasible: bool
    margin: Fraction | None
    replay_ok: bool


@dataclass
class ScanReport:
    alpha: Fraction
    c: Fraction
    mode: str
    max_len: int
    use_grover: bool
    entries: list[ScanEntry] = field(default_factory=list)

    @property
    def total(self) -> int:
        return len(self.entries)

    @property
    def feasible_entries(self) -> list[ScanEntry]:
        return [e for e in self.entries if e.feasible]

    def summary(self) -> str:
        n = len(self.feasible_entries)
        return (
            f"{n} feasible annotation{'s' if n != 1 else ''} of length <= {self.max_len} "
            f"at alpha={self.alpha}, c={self.c} ({self.total} annotations scanned)"
        )


def optimality_scan(
    alpha: Fraction,
    cc: Fraction,
    max_len: int,
    mode: str = TS_MODE,
    use_grover: bool = False,
    workers: int | None = None,
) -> ScanReport:
    """Run the feasibility relaxation on every valid complete annotation up to
    max_len; deterministic order."""
    alpha, cc = Fraction(alpha), Fraction(cc)
    report = ScanReport(alpha, cc, mode, max_len, use_grover)
    annotations = list(enumerate_annotations(max_len, mode))
    results = _map_jobs(
        _scan_job, [(a, alpha, cc, mode, use_grover) for a in annotations], workers
    )
    for f in results:
        report.entries.append(ScanEntry(f.annotation, f.feasible, f.margin, f.replay_ok))
    return report


def _scan_job(args):
    a, alpha, cc, mode, use_grover = args
    return feasible(a, alpha, cc, mode, use_grover)


def _map_jobs(fn, jobs, workers):
    if workers and workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, jobs, chunksize=16))
    return [fn(job) for job in jobs]
