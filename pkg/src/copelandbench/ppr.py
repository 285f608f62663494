"""Sequential mode identification for a ternary distribution.

The test keeps counts (S1, S2, S3) of the three outcomes and watches the
prior-posterior ratio of the induced leader-vs-runner-up Bernoulli reduction
under a uniform prior.  With S_(1) >= S_(2) >= S_(3) the order statistics of
the counts, sampling stops as soon as

    f_Beta(1/2; S_(1)+1, S_(2)+1) <= delta / 4,

and the outcome with the largest count is declared the mode.  The error
budget delta is halved once for the two rival outcomes that could play the
runner-up and once more to stay conservative for the data-dependent choice
of the runner-up.  For a deterministic winner this fires after 13 straight
wins at delta=0.01 and after 14 at delta=0.005 (see the derivation in
log_beta_pdf_at_half: with k wins the density at 1/2 equals (k+1) * 2^-k).

The per-step density comparison is precomputed into an integer stop table
("boundary"): boundary[s2] is the smallest leader count that stops against
runner-up count s2.  Both the compiled and the pure-Python duel loops consume
that table, so their stopping decisions are identical by construction.
"""

from __future__ import annotations

import math
import os
from typing import Callable, Iterator, NamedTuple

import numpy as np

# Constants of the expected-sample bound t0 for the ternary mode test.
T0_C1 = 194.07
T0_C2 = 79.86

_LN2 = math.log(2.0)
# stop once log density <= log(delta) + _STOP_LOG_MARGIN
_STOP_LOG_MARGIN = -2.0 * _LN2


class TernaryCounts(NamedTuple):
    s1: int = 0
    s2: int = 0
    s3: int = 0

    @property
    def total(self) -> int:
        return self.s1 + self.s2 + self.s3

    def top_two(self) -> tuple[int, int]:
        """(largest, second largest) of the three counts."""
        a, b, c = sorted((self.s1, self.s2, self.s3), reverse=True)
        return a, b


class PprDecision(NamedTuple):
    stopped: bool
    mode_index: int | None
    samples_used: int


class BudgetExceeded(RuntimeError):
    """The sampling budget ran out before the stop rule fired.

    On a pair whose top two probabilities tie, the stop rule never fires;
    a budget turns that into a reportable condition.
    """

    def __init__(self, message: str, counts: TernaryCounts, samples_used: int):
        super().__init__(message)
        self.counts = counts
        self.samples_used = samples_used


class DegenerateGap(ValueError):
    """Raised when a bound needs a strict gap but the top probabilities tie."""


def log_beta_pdf_at_half(a: int, b: int) -> float:
    """Natural log of the Beta(a, b) density at 1/2.

    Equals ln(Gamma(a+b) / (Gamma(a) Gamma(b))) - (a+b-2) ln 2.  For b = 1
    this reduces to ln(a * 2^-(a-1)); e.g. (11, 1) -> ln(11/1024).
    """
    if a < 1 or b < 1:
        raise ValueError(f"shape parameters must be >= 1, got ({a}, {b})")
    return (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        - (a + b - 2) * _LN2
    )


def _stop_log_threshold(delta: float) -> float:
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0,1), got {delta}")
    return math.log(delta) + _STOP_LOG_MARGIN


def should_stop(counts: TernaryCounts, delta: float) -> bool:
    """Direct evaluation of the stop rule on a count state."""
    a, b = counts.top_two()
    return log_beta_pdf_at_half(a + 1, b + 1) <= _stop_log_threshold(delta)


_boundary_cache: dict[float, np.ndarray] = {}


def stop_boundary(delta: float, min_len: int = 64) -> np.ndarray:
    """Integer stop table: boundary[s2] = min leader count stopping against s2.

    The density at 1/2 is strictly decreasing in the leader count once it
    exceeds the runner-up count and increasing in the runner-up count, so the
    table is well defined, non-decreasing, and comparing counts against it is
    exactly equivalent to evaluating the density rule after every sample.
    """
    table = _boundary_cache.get(delta)
    if table is not None and len(table) >= min_len:
        return table
    length = 64
    while length < min_len:
        length *= 2
    thresh = _stop_log_threshold(delta)
    out = np.empty(length, dtype=np.int64)
    a = 1
    for s2 in range(length):
        if a < s2 + 1:
            a = s2 + 1
        while log_beta_pdf_at_half(a + 1, s2 + 1) > thresh:
            a += 1
        out[s2] = a
    _boundary_cache[delta] = out
    return out


def ppr_step(
    counts: TernaryCounts, outcome: int, delta: float
) -> tuple[TernaryCounts, PprDecision]:
    """Record one outcome (1|2|3) and evaluate the stop rule."""
    if outcome == 1:
        counts = TernaryCounts(counts.s1 + 1, counts.s2, counts.s3)
    elif outcome == 2:
        counts = TernaryCounts(counts.s1, counts.s2 + 1, counts.s3)
    elif outcome == 3:
        counts = TernaryCounts(counts.s1, counts.s2, counts.s3 + 1)
    else:
        raise ValueError(f"outcome must be 1, 2 or 3, got {outcome!r}")
    if should_stop(counts, delta):
        mode = 1 + max(range(3), key=lambda k: counts[k])
        return counts, PprDecision(True, mode, counts.total)
    return counts, PprDecision(False, None, counts.total)


def bernoulli_confidence_set_contains(
    s_success: int, s_fail: int, theta: float, delta: float
) -> bool:
    """Whether theta is inside the anytime-valid Bernoulli confidence set.

    With a uniform prior the prior-posterior ratio at theta is the reciprocal
    of the Beta(1+s_success, 1+s_fail) density there, so theta stays in the
    set while that density exceeds delta.
    """
    if s_success < 0 or s_fail < 0:
        raise ValueError("counts must be non-negative")
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta must be in [0,1], got {theta}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0,1), got {delta}")
    a, b = s_success + 1, s_fail + 1
    log_f = math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
    if a > 1:
        if theta == 0.0:
            return False
        log_f += (a - 1) * math.log(theta)
    if b > 1:
        if theta == 1.0:
            return False
        log_f += (b - 1) * math.log1p(-theta)
    return log_f > math.log(delta)


def t0_bound(triple, delta: float) -> float:
    """Expected-sample upper bound for the ternary mode test.

    t0((p1,p2,p3), delta) = c1 p_(1) ln(sqrt(2 c2 / delta) p_(1) / gap) / gap^2
    with gap = p_(1) - p_(2), c1 = 194.07, c2 = 79.86.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0,1), got {delta}")
    probs = triple.as_tuple() if hasattr(triple, "as_tuple") else tuple(triple)
    p1, p2, _ = sorted(probs, reverse=True)
    gap = p1 - p2
    if gap <= 0.0:
        raise DegenerateGap(f"top two probabilities tie in {probs}")
    return T0_C1 * p1 * math.log(math.sqrt(2.0 * T0_C2 / delta) * p1 / gap) / gap**2


# ---------------------------------------------------------------------------
# Duel loop backends.
#
# Both backends draw uniforms from a numpy BitGenerator one value per sample,
# so they walk the exact same stream; the stop table makes their stopping
# decisions identical.  Selection: compiled extension when available, pure
# Python otherwise; COPELANDBENCH_BACKEND={c,py} overrides.

from . import _duelpy

_requested = os.environ.get("COPELANDBENCH_BACKEND", "").strip().lower()
if _requested in ("", "auto", "c"):
    try:
        from . import _duelcore as _duelfast
    except ImportError:
        if _requested == "c":
            raise
        _duelfast = None
elif _requested == "py":
    _duelfast = None
else:
    raise ValueError(
        f"COPELANDBENCH_BACKEND must be 'c', 'py' or 'auto', got {_requested!r}"
    )

BACKEND = "c" if _duelfast is not None else "py"


def _run_duel(bit_generator, c1, c2, rev, counts, boundary, budget) -> int:
    if _duelfast is not None:
        return _duelfast.run_duel(bit_generator, c1, c2, rev, counts, boundary, budget)
    return _duelpy.run_duel(bit_generator, c1, c2, rev, counts, boundary, budget)


def _run_native(source, delta: float, budget: int | None) -> PprDecision:
    bit_generator, c1, c2, rev = source._native_source()
    counts = np.zeros(3, dtype=np.int64)
    limit = -1 if budget is None else int(budget)
    table_len = 256
    while True:
        boundary = stop_boundary(delta, table_len)
        status = _run_duel(bit_generator, c1, c2, rev, counts, boundary, limit)
        if status != 0:
            break
        table_len = 2 * len(boundary)  # runner-up outgrew the stop table
    total = int(counts.sum())
    source._advance(total)
    tern = TernaryCounts(int(counts[0]), int(counts[1]), int(counts[2]))
    if status < 0:
        raise BudgetExceeded(
            f"no decision after {total} samples (budget {budget})", tern, total
        )
    mode = 1 + int(np.argmax(counts))
    return PprDecision(True, mode, total)


def _run_generic(draw: Callable[[], int], delta: float, budget: int | None) -> PprDecision:
    boundary = stop_boundary(delta, 256)
    s = [0, 0, 0, 0]  # 1-based
    total = 0
    while True:
        if budget is not None and total >= budget:
            tern = TernaryCounts(s[1], s[2], s[3])
            raise BudgetExceeded(
                f"no decision after {total} samples (budget {budget})", tern, total
            )
        k = draw()
        if k not in (1, 2, 3):
            raise ValueError(f"outcome source yielded {k!r}, expected 1, 2 or 3")
        s[k] += 1
        total += 1
        a, b, _ = sorted((s[1], s[2], s[3]), reverse=True)
        if b >= len(boundary):
            boundary = stop_boundary(delta, 2 * len(boundary))
        if a >= boundary[b]:
            mode = 1 + max(range(3), key=lambda m: s[m + 1])
            return PprDecision(True, mode, total)


def ppr_1v1_run(pair_oracle, delta: float, budget: int | None = None) -> PprDecision:
    """Run the sequential mode test against an outcome source.

    The source may be an oracle pair channel (sampled natively through the
    selected backend), a zero-argument callable, or an iterator / iterable of
    outcomes in {1, 2, 3}.  Raises BudgetExceeded if a budget is given and
    runs out.
    """
    _stop_log_threshold(delta)  # validate delta early
    if hasattr(pair_oracle, "_native_source"):
        return _run_native(pair_oracle, delta, budget)
    if callable(pair_oracle):
        return _run_generic(pair_oracle, delta, budget)
    it: Iterator[int] = iter(pair_oracle)
    return _run_generic(lambda: next(it), delta, budget)
