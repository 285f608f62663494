"""Seeded feedback oracles and instance generators for the benchmark classes.

Randomness comes from counter-based Philox streams so that every draw is a
pure function of (seed, pair, draw index): each unordered pair {i, j} owns the
substream keyed by (seed, i << 32 | j), and instance generation uses the
reserved substream (seed, 0).  Streams are therefore reproducible bit for bit
and independent of how duels interleave across pairs.

Instance classes:
  P1   per-pair win probability uniform on [0, 0.4] u [0.6, 1], no congruence
  P2   win probability 1/2 +- gap with gap uniform on [0.05, 0.3], no congruence
  P1CW / P2CW   rejection-sampled until a Condorcet winner exists
plus a transitive generator (total preorder with indifference blocks) used by
the round-bound experiments.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .instance import PreferenceInstance, PreferenceTriple, validate

REJECTION_BUDGET = 10**6

_MASK64 = (1 << 64) - 1


class RejectionBudgetExceeded(RuntimeError):
    """Condorcet-winner rejection sampling hit the attempt budget."""


def _stream(seed: int, tag: int) -> np.random.Generator:
    key = np.array([seed & _MASK64, tag & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _pair_tag(i: int, j: int) -> int:
    return (i << 32) | j


class PairChannel:
    """Ordered view of one pair's outcome stream.

    Outcome 1 means "first arm of the query wins".  A reversed query (j, i)
    consumes the same canonical substream and flips outcomes 1 <-> 3, so both
    orders see one consistent feedback sequence.
    """

    __slots__ = ("_oracle", "_key", "_gen", "_bitgen", "c1", "c2", "rev")

    def __init__(self, oracle: "SeededOracle", i: int, j: int):
        a, b = (i, j) if i < j else (j, i)
        t = oracle.instance.triples[(a, b)]
        self._oracle = oracle
        self._key = (a, b)
        self._bitgen, self._gen = oracle._pair_state(a, b)
        self.c1 = t.p_succ
        self.c2 = t.p_succ + t.p_cong
        self.rev = i > j

    def draw(self) -> int:
        u = self._gen.random()
        if u < self.c1:
            k = 1
        elif u < self.c2:
            k = 2
        else:
            k = 3
        self._oracle._draws[self._key] += 1
        return 4 - k if self.rev else k

    __call__ = draw

    # Native-sampling protocol consumed by ppr.ppr_1v1_run.
    def _native_source(self):
        return self._bitgen, self.c1, self.c2, self.rev

    def _advance(self, ndraws: int) -> None:
        self._oracle._draws[self._key] += ndraws


class SeededOracle:
    """Stochastic ternary feedback for a fixed instance and seed."""

    def __init__(self, instance: PreferenceInstance, seed: int):
        self.instance = instance
        self.seed = int(seed)
        self._states: dict[tuple[int, int], tuple] = {}
        self._draws: dict[tuple[int, int], int] = {}

    def _pair_state(self, a: int, b: int):
        st = self._states.get((a, b))
        if st is None:
            bitgen = np.random.Philox(
                key=np.array([self.seed & _MASK64, _pair_tag(a, b)], dtype=np.uint64)
            )
            st = (bitgen, np.random.Generator(bitgen))
            self._states[(a, b)] = st
            self._draws[(a, b)] = 0
        return st

    def channel(self, i: int, j: int) -> PairChannel:
        if i == j:
            raise ValueError("a duel needs two distinct arms")
        return PairChannel(self, i, j)

    def sample_feedback(self, i: int, j: int) -> int:
        return self.channel(i, j).draw()

    def draws(self, i: int, j: int) -> int:
        a, b = (i, j) if i < j else (j, i)
        return self._draws.get((a, b), 0)

    def total_draws(self) -> int:
        return sum(self._draws.values())


def sample_feedback(oracle: SeededOracle, i: int, j: int) -> int:
    """One categorical draw for the ordered pair (i, j)."""
    return oracle.sample_feedback(i, j)


def _succ_only_instance(n: int, p_succ_flat: np.ndarray) -> PreferenceInstance:
    triples = {}
    idx = 0
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            p = float(p_succ_flat[idx])
            triples[(i, j)] = PreferenceTriple(p, 0.0, 1.0 - p)
            idx += 1
    return PreferenceInstance(n, triples)


def _has_condorcet_winner(n: int, p_succ_flat: np.ndarray) -> bool:
    m = np.zeros((n, n))
    iu = np.triu_indices(n, k=1)
    m[iu] = p_succ_flat
    m.T[iu] = 1.0 - p_succ_flat
    wins = (m > 0.5).sum(axis=1)
    return bool((wins == n - 1).any())


def _draw_p1(gen: np.random.Generator, npairs: int) -> np.ndarray:
    u = gen.random(npairs) * 0.8
    return np.where(u < 0.4, u, u + 0.2)


def _draw_p2(gen: np.random.Generator, npairs: int) -> np.ndarray:
    gaps = 0.05 + 0.25 * gen.random(npairs)
    signs = np.where(gen.random(npairs) < 0.5, 1.0, -1.0)
    return 0.5 + signs * gaps


def gen_class(class_id: str, n: int, seed: int) -> PreferenceInstance:
    """Draw an instance from one of the benchmark classes.

    Pairs are filled in lexicographic order from the generation substream;
    the CW variants redraw the whole matrix until a Condorcet winner exists,
    raising RejectionBudgetExceeded after REJECTION_BUDGET attempts.
    """
    cid = class_id.strip().lower()
    if n < 2:
        raise ValueError(f"need at least 2 arms, got n={n}")
    if cid not in ("p1", "p2", "p1cw", "p2cw"):
        raise ValueError(f"unknown class {class_id!r}")
    gen = _stream(seed, 0)
    npairs = n * (n - 1) // 2
    draw = _draw_p1 if cid.startswith("p1") else _draw_p2
    if cid in ("p1", "p2"):
        return _succ_only_instance(n, draw(gen, npairs))
    for _ in range(REJECTION_BUDGET):
        flat = draw(gen, npairs)
        if _has_condorcet_winner(n, flat):
            return _succ_only_instance(n, flat)
    raise RejectionBudgetExceeded(
        f"no Condorcet winner found for {class_id} n={n} seed={seed} "
        f"within {REJECTION_BUDGET} attempts"
    )


def gen_transitive(
    n: int,
    gap_range: tuple[float, float] = (0.1, 0.4),
    indiff_fraction: float = 0.0,
    seed: int = 0,
) -> PreferenceInstance:
    """Draw a transitive instance from a random total preorder.

    Arms are ranked by a random permutation and grouped into blocks: each
    arm after the first joins the previous arm's block with probability
    indiff_fraction.  Within a block the indifference outcome is the mode,
    across blocks the higher-ranked arm's win is the mode; the mode minus
    runner-up gap is drawn uniformly from gap_range, with the mode getting
    (1 + 2g)/3 and the other two outcomes (1 - g)/3 each.
    """
    lo, hi = gap_range
    if not (0.0 < lo <= hi < 2.0 / 3.0):
        raise ValueError(f"gap_range must lie inside (0, 2/3), got {gap_range}")
    if not 0.0 <= indiff_fraction <= 1.0:
        raise ValueError(f"indiff_fraction must be in [0,1], got {indiff_fraction}")
    if n < 2:
        raise ValueError(f"need at least 2 arms, got n={n}")
    gen = _stream(seed, 0)
    order = gen.permutation(n) + 1  # arms best to worst
    block = {int(order[0]): 0}
    nblocks = 1
    for arm in order[1:]:
        if gen.random() >= indiff_fraction:
            nblocks += 1
        block[int(arm)] = nblocks - 1
    triples = {}
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            g = lo + (hi - lo) * gen.random()
            main = (1.0 + 2.0 * g) / 3.0
            side = (1.0 - g) / 3.0
            if block[i] < block[j]:
                p1, p2 = main, side
            elif block[i] > block[j]:
                p1, p2 = side, side
                # p_prec gets the mode via the residual below
            else:
                p1, p2 = side, main
            triples[(i, j)] = PreferenceTriple(p1, p2, 1.0 - p1 - p2)
    return PreferenceInstance(n, triples)


def save_instance(inst: PreferenceInstance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(inst.to_json_dict(), fh, indent=1)
        fh.write("\n")


def load_instance(path) -> PreferenceInstance:
    """Load and validate an instance file; fatal findings raise ValueError."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    inst = PreferenceInstance.from_json_dict(data)
    report = validate(inst)
    if not report.ok:
        raise ValueError("invalid instance: " + "; ".join(report.fatal))
    return inst
