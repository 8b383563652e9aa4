"""Quantitative model of Grover search behind the alpha = 2/3 slowdown.

Success probabilities (closed form and an exact 2-dimensional simulator), the
random-iteration guarantee, and the time-bound cost bookkeeping that yields the
x = 2d/3 collapse parameter.  Double precision throughout; nothing here feeds
back into certificates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class SearchInstance:
    n: int
    marked: int

    def __post_init__(self):
        if not 1 <= self.marked <= self.n:
            raise ValueError(f"need 1 <= marked <= n, got marked={self.marked}, n={self.n}")

    @property
    def theta(self) -> float:
        return math.asin(math.sqrt(self.marked / self.n))


def success_probability(inst: SearchInstance, j: int) -> float:
    """Probability of measuring a marked item after j Grover iterations:
    sin^2((2j+1) * theta)."""
    if j < 0:
        raise ValueError("iteration count must be nonnegative")
    return math.sin((2 * j + 1) * inst.theta) ** 2


def simulate_grover(inst: SearchInstance, j: int) -> float:
    """Exact iteration in the 2-dimensional invariant subspace.

    Tracks the (uniform) amplitude on marked and unmarked items; each round is
    the oracle sign flip followed by inversion about the mean."""
    if j < 0:
        raise ValueError("iteration count must be nonnegative")
    n, m = inst.n, inst.marked
    amp_marked = amp_unmarked = 1 / math.sqrt(n)
    for _ in range(j):
        amp_marked = -amp_marked
        mean = (m * amp_marked + (n - m) * amp_unmarked) / n
        amp_marked = 2 * mean - amp_marked
        amp_unmarked = 2 * mean - amp_unmarked
    return m * amp_marked**2


def random_iteration_success(inst: SearchInstance) -> float:
    """Average success probability over a uniformly random iteration count
    j in {0, ..., K-1} with K = ceil(1/sin(2/sqrt(n))); always >= 1/4."""
    if inst.n < 2:
        raise ValueError("need n >= 2")
    k = math.ceil(1 / math.sin(2 / math.sqrt(inst.n)))
    return sum(success_probability(inst, j) for j in range(k)) / k


def grover_cost(m: float, t: float, s: float) -> float:
    """Time of Grover search over 2^m witnesses with a (t, s)-bounded
    classical verifier: 2^(m/2) * (t*s^2 + m)."""
    if min(t, s) <= 0 or m < 0:
        raise ValueError("need t, s > 0 and m >= 0")
    return 2 ** (m / 2) * (t * s * s + m)


def grover_exponent(d: float, x: float) -> float:
    """Polynomial exponent of Grover search over n^x witnesses with an
    n^d-time verifier (m = x log n, s polylog): d + x/2."""
    return d + x / 2


def collapse_exponent(d: float, x: float) -> float:
    """Exponent of the grover collapse at internal speedup parameter x:
    the speedup leaves an n^(d-x)-time verifier, so the collapsed stage costs
    max(x, (d - x) + x/2) = max(x, d - x/2); minimized at x = 2d/3."""
    return max(x, d - x / 2)


def collapse_argmin(d: float) -> float:
    return 2 * d / 3
