"""Exact application of the inclusion rules and certificate verification.

Every rule is a pure function from an alternating class to a new one; all
arithmetic is exact rational.  A proof certificate is the initial class plus a
list of rule applications; the verifier re-derives every line and decides
whether the chain shows a contradiction (a return to a class of the same shape
with no larger exponents, using at least one speedup).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .kernel import (
    BP_TS,
    BPTS_MODE,
    DET_TS,
    EXISTS,
    FORALL,
    TS_MODE,
    AltClass,
    Block,
    _flip,
    format_class,
    format_rational,
    parse_class,
    parse_rational,
)

SQUIGGLE_ITERATION_CAP = 10**6

RULE_NAMES = ("speedup_first", "speedup", "speedup_rand", "slowdown", "grover", "squiggle")
ASSUMPTIONS = ("ntime", "ebqp", "ebp")


class RuleError(ValueError):
    """Rule precondition violated."""


class CertificateError(ValueError):
    """Malformed certificate file."""


def _require(cond: bool, message: str):
    if not cond:
        raise RuleError(message)


def speedup_first(c0: AltClass, x: Fraction) -> AltClass:
    """First speedup: guess n^x intermediate configurations of a quantifier-free
    deterministic computation.  TS[d] -> E(x, max(x,1)) A(0, 1) TS[d - x]."""
    x = Fraction(x)
    _require(not c0.blocks, "speedup_first needs a quantifier-free class")
    _require(c0.verifier == DET_TS, "speedup_first needs a deterministic verifier")
    _require(0 < x < c0.d, f"speedup parameter out of range: 0 < {x} < {c0.d} fails")
    blocks = (Block(EXISTS, x, max(x, Fraction(1))), Block(FORALL, Fraction(0), Fraction(1)))
    return AltClass(blocks, DET_TS, c0.d - x)


def speedup(c0: AltClass, x: Fraction) -> AltClass:
    """Usual speedup: merge the new guess into the last quantifier and append a
    log-width quantifier of the opposite kind.  d' = d - x."""
    x = Fraction(x)
    _require(len(c0.blocks) >= 1, "speedup needs at least one quantifier")
    _require(c0.verifier == DET_TS, "speedup needs a deterministic verifier")
    _require(0 < x < c0.d, f"speedup parameter out of range: 0 < {x} < {c0.d} fails")
    last = c0.blocks[-1]
    merged = Block(last.kind, max(last.a, x), max(last.b, x))
    appended = Block(_flip(last.kind), Fraction(0), last.b)
    return AltClass(c0.blocks[:-1] + (merged, appended), DET_TS, c0.d - x)


def speedup_randomized(c0: AltClass, x: Fraction) -> AltClass:
    """Randomized speedup: adds two quantifiers and derandomizes the verifier."""
    x = Fraction(x)
    _require(c0.verifier == BP_TS, "randomized speedup needs a randomized verifier")
    _require(0 < x < c0.d, f"speedup parameter out of range: 0 < {x} < {c0.d} fails")
    one = Fraction(1)
    if not c0.blocks:
        blocks = (
            Block(EXISTS, Fraction(0), one),
            Block(FORALL, x, max(x, one)),
            Block(EXISTS, Fraction(0), one),
        )
    else:
        last = c0.blocks[-1]
        blocks = c0.blocks + (
            Block(_flip(last.kind), x, max(last.b, x)),
            Block(last.kind, Fraction(0), last.b),
        )
    return AltClass(blocks, DET_TS, c0.d - x)


def slowdown_generic(
    c0: AltClass, alpha: Fraction, cc: Fraction, mode: str = TS_MODE
) -> AltClass:
    """Generic slowdown: remove the last quantifier at cost
    d' = cc * max(alpha*d, b_k, a_k, b_{k-1}, 1).  In bpts mode the output
    verifier is randomized (the assumed containment lands in BPTS)."""
    alpha, cc = Fraction(alpha), Fraction(cc)
    _require(len(c0.blocks) >= 1, "slowdown needs at least one quantifier")
    _require(0 < alpha <= 1 < cc, f"parameter range 0 < alpha <= 1 < c fails: alpha={alpha}, c={cc}")
    if mode == TS_MODE:
        _require(c0.verifier == DET_TS, "deterministic slowdown needs a deterministic verifier")
    last = c0.blocks[-1]
    b_prev = c0.blocks[-2].b if len(c0.blocks) >= 2 else Fraction(1)
    d_new = cc * max(alpha * c0.d, last.b, last.a, b_prev, Fraction(1))
    verifier = BP_TS if mode == BPTS_MODE else DET_TS
    return AltClass(c0.blocks[:-1], verifier, d_new)


def grover_collapse(c0: AltClass, cc: Fraction) -> AltClass:
    """Grover slowdown (deterministic verifier): remove the last quantifier via
    an internal speedup with x = 2d/3 and quantum search over the appended
    guesses.  d' = cc * max(a_k, b_k, b_{k-1}, 1, 2d/3)."""
    cc = Fraction(cc)
    _require(len(c0.blocks) >= 1, "grover collapse needs at least one quantifier")
    _require(c0.verifier == DET_TS, "grover collapse needs a deterministic verifier")
    _require(cc > 1, f"parameter range c > 1 fails: c={cc}")
    last = c0.blocks[-1]
    b_prev = c0.blocks[-2].b if len(c0.blocks) >= 2 else Fraction(1)
    d_new = cc * max(last.a, last.b, b_prev, Fraction(1), Fraction(2, 3) * c0.d)
    return AltClass(c0.blocks[:-1], DET_TS, d_new)


def grover_round(c0: AltClass, cc: Fraction) -> AltClass:
    """Grover step on a randomized verifier: randomized speedup with x = 2d/3,
    quantum search absorbing the log-width quantifier, then a randomized
    slowdown removing the appended quantifier.  The quantifier list is
    unchanged and d' = cc * max(2d/3, b_k, 1)."""
    cc = Fraction(cc)
    _require(len(c0.blocks) >= 1, "grover step needs at least one quantifier")
    _require(c0.verifier == BP_TS, "grover step needs a randomized verifier")
    _require(cc > 1, f"parameter range c > 1 fails: c={cc}")
    d_new = cc * max(Fraction(2, 3) * c0.d, c0.blocks[-1].b, Fraction(1))
    return AltClass(c0.blocks, BP_TS, d_new)


def squiggle(
    c0: AltClass, alpha: Fraction, cc: Fraction
) -> tuple[AltClass, int, bool]:
    """Squiggle rule: repeat (speedup with x = a_k, generic slowdown) while the
    verifier exponent strictly decreases.

    Proper iff the guard d < (alpha*c/(alpha*c - 1)) * a_k holds; then each
    iteration decrements d by c*alpha*a_k - (c*alpha - 1)*d > 0 and the loop
    lands on the fixed point c * max(a_k, b_k, 1).  Otherwise the class is
    returned unchanged.  Returns (class, iterations, proper)."""
    alpha, cc = Fraction(alpha), Fraction(cc)
    _require(len(c0.blocks) >= 1, "squiggle needs at least one quantifier")
    _require(c0.verifier == DET_TS, "squiggle needs a deterministic verifier")
    _require(alpha * cc > 1, f"parameter range alpha*c > 1 fails: alpha={alpha}, c={cc}")
    _require(
        cc < (1 + alpha) / alpha,
        f"parameter range c < (1+alpha)/alpha fails: c={cc}, bound={(1 + alpha) / alpha}",
    )
    a_k = c0.blocks[-1].a
    if a_k <= 0 or c0.d >= (alpha * cc / (alpha * cc - 1)) * a_k:
        return c0, 0, False
    # Analytic iteration bound: the decrement c*alpha*a_k - (c*alpha-1)*d is
    # positive under the guard and grows as d shrinks; d never drops below c*a_k.
    dec0 = cc * alpha * a_k - (cc * alpha - 1) * c0.d
    cap = SQUIGGLE_ITERATION_CAP
    if dec0 > 0:
        cap = min(cap, int((c0.d - cc * a_k) / dec0) + 2) if c0.d > cc * a_k else 1
    cur = c0
    n = 0
    while n <= cap:
        if cur.blocks[-1].a >= cur.d:
            break
        nxt = slowdown_generic(speedup(cur, a_k), alpha, cc, TS_MODE)
        if nxt.d >= cur.d:
            break
        cur = nxt
        n += 1
    else:
        raise RuntimeError(
            f"squiggle iteration cap exceeded (cap={cap}); analytic bound violated"
        )
    return cur, n, True


# --- Certificates ----------------------------------------------------------


@dataclass(frozen=True)
class RuleStep:
    rule: str
    x: Fraction | None = None

    def __post_init__(self):
        if self.rule not in RULE_NAMES:
            raise CertificateError(f"unknown rule {self.rule!r}")
        needs_x = self.rule in ("speedup_first", "speedup", "speedup_rand")
        if needs_x and self.x is None:
            raise CertificateError(f"rule {self.rule} needs a speedup parameter x")
        if not needs_x and self.x is not None:
            raise CertificateError(f"rule {self.rule} takes no parameter")


@dataclass
class ProofCertificate:
    alpha: Fraction
    c: Fraction
    mode: str
    assumption: str
    classes: list[AltClass]
    steps: list[RuleStep]

    def __post_init__(self):
        if self.mode not in (TS_MODE, BPTS_MODE):
            raise CertificateError(f"unknown mode {self.mode!r}")
        if self.assumption not in ASSUMPTIONS:
            raise CertificateError(f"unknown assumption {self.assumption!r}")
        if len(self.classes) != len(self.steps) + 1:
            raise CertificateError(
                f"{len(self.classes)} classes do not match {len(self.steps)} steps"
            )


@dataclass(frozen=True)
class ProofReport:
    valid: bool
    contradiction: bool
    first_error: tuple[int, str] | None
    final_exponent: Fraction | None
    squiggles: tuple[tuple[int, int, bool], ...] = ()  # (step index, iterations, proper)


def apply_step(
    c0: AltClass, step: RuleStep, alpha: Fraction, cc: Fraction, mode: str
) -> tuple[AltClass, tuple[int, bool] | None]:
    """Apply one certificate step; returns (class, squiggle (iterations, proper))."""
    if step.rule == "speedup_first":
        return speedup_first(c0, step.x), None
    if step.rule == "speedup":
        return speedup(c0, step.x), None
    if step.rule == "speedup_rand":
        return speedup_randomized(c0, step.x), None
    if step.rule == "slowdown":
        return slowdown_generic(c0, alpha, cc, mode), None
    if step.rule == "grover":
        if mode == BPTS_MODE:
            return grover_round(c0, cc), None
        return grover_collapse(c0, cc), None
    if step.rule == "squiggle":
        out, n, proper = squiggle(c0, alpha, cc)
        return out, (n, proper)
    raise CertificateError(f"unknown rule {step.rule!r}")


def expected_assumption(mode: str, uses_grover: bool) -> str:
    if uses_grover:
        return "ebqp"
    return "ntime" if mode == TS_MODE else "ebp"


def _matches_contradiction(first: AltClass, last: AltClass) -> bool:
    if first.verifier != last.verifier or len(first.blocks) != len(last.blocks):
        return False
    for fb, lb in zip(first.blocks, last.blocks):
        if fb.kind != lb.kind or lb.a > fb.a or lb.b > fb.b:
            return False
    return last.d <= first.d


def verify_proof(p: ProofCertificate) -> ProofReport:
    """Re-derive every line exactly and decide validity and contradiction."""
    squiggles: list[tuple[int, int, bool]] = []

    def fail(line: int, message: str) -> ProofReport:
        return ProofReport(False, False, (line, message), None, tuple(squiggles))

    if not (0 < p.alpha <= 1 < p.c):
        return fail(0, f"parameter range 0 < alpha <= 1 < c fails: alpha={p.alpha}, c={p.c}")
    uses_grover = any(s.rule == "grover" for s in p.steps)
    expected = expected_assumption(p.mode, uses_grover)
    if p.assumption != expected:
        return fail(0, f"assumption {p.assumption!r} inconsistent with mode/rules (expected {expected!r})")
    start_ver = BP_TS if p.mode == BPTS_MODE else DET_TS
    if p.classes[0].verifier != start_ver:
        return fail(0, f"initial class verifier {p.classes[0].verifier} does not match mode {p.mode}")
    cur = p.classes[0]
    used_speedup = False
    for i, step in enumerate(p.steps, start=1):
        try:
            cur, sq = apply_step(cur, step, p.alpha, p.c, p.mode)
        except (RuleError, ValueError) as exc:
            return fail(i, f"step {i} ({step.rule}): {exc}")
        if sq is not None:
            squiggles.append((i, sq[0], sq[1]))
            if sq[0] >= 1:
                used_speedup = True
        elif step.rule.startswith("speedup"):
            used_speedup = True
        if cur != p.classes[i]:
            return fail(
                i,
                f"class {i} mismatch: stated {format_class(p.classes[i])}, "
                f"derived {format_class(cur)}",
            )
    contradiction = (
        len(p.steps) >= 2
        and used_speedup
        and _matches_contradiction(p.classes[0], p.classes[-1])
    )
    return ProofReport(True, contradiction, None, cur.d, tuple(squiggles))


# --- Certificate file format ------------------------------------------------

_MAGIC = "atlb-proof v1"


def format_certificate(p: ProofCertificate) -> str:
    lines = [
        _MAGIC,
        f"alpha {format_rational(p.alpha)}   c {format_rational(p.c)}   "
        f"mode {p.mode}   assumption {p.assumption}",
        f"class 0: {format_class(p.classes[0])}",
    ]
    for i, step in enumerate(p.steps, start=1):
        if step.x is not None:
            lines.append(f"step {i}: {step.rule} x={format_rational(step.x)}")
        else:
            lines.append(f"step {i}: {step.rule}")
        lines.append(f"class {i}: {format_class(p.classes[i])}")
    return "\n".join(lines) + "\n"


def parse_certificate(text: str) -> ProofCertificate:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != _MAGIC:
        raise CertificateError(f"missing header line {_MAGIC!r}")
    if len(lines) < 3:
        raise CertificateError("truncated certificate")
    tokens = lines[1].split()
    if len(tokens) != 8 or tokens[0::2] != ["alpha", "c", "mode", "assumption"]:
        raise CertificateError(f"bad parameter line: {lines[1]!r}")
    try:
        alpha = parse_rational(tokens[1])
        cc = parse_rational(tokens[3])
    except ValueError as exc:
        raise CertificateError(str(exc)) from exc
    mode, assumption = tokens[5], tokens[7]
    classes: list[AltClass] = []
    steps: list[RuleStep] = []
    for lineno, line in enumerate(lines[2:], start=3):
        if line.startswith("class"):
            head, _, body = line.partition(":")
            idx = _parse_index(head, "class", lineno)
            if idx != len(classes):
                raise CertificateError(f"line {lineno}: expected class {len(classes)}, got {idx}")
            if len(classes) != len(steps):
                raise CertificateError(f"line {lineno}: class {idx} not preceded by step {idx}")
            try:
                classes.append(parse_class(body))
            except ValueError as exc:
                raise CertificateError(f"line {lineno}: {exc}") from exc
        elif line.startswith("step"):
            head, _, body = line.partition(":")
            idx = _parse_index(head, "step", lineno)
            if idx != len(steps) + 1 or len(classes) != len(steps) + 1:
                raise CertificateError(f"line {lineno}: step {idx} out of order")
            parts = body.split()
            if not parts:
                raise CertificateError(f"line {lineno}: empty step")
            x = None
            if len(parts) == 2 and parts[1].startswith("x="):
                try:
                    x = parse_rational(parts[1][2:])
                except ValueError as exc:
                    raise CertificateError(f"line {lineno}: {exc}") from exc
            elif len(parts) != 1:
                raise CertificateError(f"line {lineno}: bad step syntax {body!r}")
            try:
                steps.append(RuleStep(parts[0], x))
            except CertificateError as exc:
                raise CertificateError(f"line {lineno}: {exc}") from exc
        else:
            raise CertificateError(f"line {lineno}: expected 'class i:' or 'step i:', got {line!r}")
    try:
        return ProofCertificate(alpha, cc, mode, assumption, classes, steps)
    except CertificateError as exc:
        raise CertificateError(str(exc)) from exc


def _parse_index(head: str, kind: str, lineno: int) -> int:
    parts = head.split()
    if len(parts) != 2 or parts[0] != kind or not parts[1].isdigit():
        raise CertificateError(f"line {lineno}: bad {kind} header {head!r}")
    return int(parts[1])
