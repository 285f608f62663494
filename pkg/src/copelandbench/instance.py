"""Dueling-bandit instances with ternary feedback and their exact ground truth.

An instance assigns to every unordered arm pair {i, j} (1-based, i < j) a
ternary outcome distribution (p_succ, p_cong, p_prec): the probabilities that
a duel of i against j ends in "i wins", "indifference" or "j wins".  Ordered
access for (j, i) is derived by reversal, so p_succ(j, i) == p_prec(i, j) by
construction.

All ground-truth quantities (Copeland scores, gaps, relation sets,
transitivity) are computed exactly from the strict modes of the pair
distributions.  Copeland scores are half-integers and are stored as doubled
integers ("half-points") so that argmax and termination comparisons are free
of floating-point issues.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

# A pair whose top two probabilities are closer than this is treated as having
# no strict mode: it contributes to neither indicator of the Copeland score.
MODE_TIE_TOL = 1e-12

SIMPLEX_TOL = 1e-12

MODE_SUCC = 1
MODE_CONG = 2
MODE_PREC = 3
MODE_TIE = 0


@dataclass(frozen=True, slots=True)
class PreferenceTriple:
    """Outcome distribution of one ordered pair: (p_succ, p_cong, p_prec)."""

    p_succ: float
    p_cong: float
    p_prec: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.p_succ, self.p_cong, self.p_prec)

    def reversed(self) -> "PreferenceTriple":
        """The same pair seen from the other arm's side."""
        return PreferenceTriple(self.p_prec, self.p_cong, self.p_succ)

    def order_stats(self) -> tuple[float, float, float]:
        """Probabilities sorted in non-increasing order."""
        a, b, c = self.p_succ, self.p_cong, self.p_prec
        if a < b:
            a, b = b, a
        if b < c:
            b, c = c, b
            if a < b:
                a, b = b, a
        return (a, b, c)

    def gap(self) -> float:
        """Top probability minus second probability."""
        s = self.order_stats()
        return s[0] - s[1]

    def mode(self) -> int:
        """1, 2 or 3 for a strict mode, 0 when the top two are tied.

        Ties are detected within MODE_TIE_TOL; a tied pair scores zero in the
        Copeland count.
        """
        a, b, c = self.p_succ, self.p_cong, self.p_prec
        if a >= b:
            if a >= c:
                second = b if b >= c else c
                return MODE_SUCC if a - second > MODE_TIE_TOL else MODE_TIE
            return MODE_PREC if c - a > MODE_TIE_TOL else MODE_TIE
        if b >= c:
            second = a if a >= c else c
            return MODE_CONG if b - second > MODE_TIE_TOL else MODE_TIE
        return MODE_PREC if c - b > MODE_TIE_TOL else MODE_TIE


@dataclass(frozen=True, slots=True)
class PreferenceInstance:
    """A full instance: arm count n and one triple per unordered pair i < j.

    Construction enforces the structural invariant (exactly n*(n-1)/2 pairs
    with 1 <= i < j <= n); numeric properties are checked by validate().
    """

    n: int
    triples: dict[tuple[int, int], PreferenceTriple]

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"need at least 2 arms, got n={self.n}")
        expected = self.n * (self.n - 1) // 2
        if len(self.triples) != expected:
            raise ValueError(
                f"expected {expected} pairs for n={self.n}, got {len(self.triples)}"
            )
        for i, j in self.triples:
            if not (1 <= i < j <= self.n):
                raise ValueError(f"bad pair key ({i},{j}) for n={self.n}")

    def arms(self) -> range:
        return range(1, self.n + 1)

    def pairs(self) -> list[tuple[int, int]]:
        return sorted(self.triples)

    def triple(self, i: int, j: int) -> PreferenceTriple:
        """Ordered access; (j, i) returns the reversed stored triple."""
        if i == j:
            raise ValueError("a pair needs two distinct arms")
        if i < j:
            return self.triples[(i, j)]
        return self.triples[(j, i)].reversed()

    def reversed(self) -> "PreferenceInstance":
        """Instance with every pair's roles swapped."""
        return PreferenceInstance(
            self.n, {k: t.reversed() for k, t in self.triples.items()}
        )

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "pairs": [
                {
                    "i": i,
                    "j": j,
                    "p_succ": t.p_succ,
                    "p_cong": t.p_cong,
                    "p_prec": t.p_prec,
                }
                for (i, j), t in sorted(self.triples.items())
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "PreferenceInstance":
        try:
            n = int(data["n"])
            raw = data["pairs"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed instance document: {exc}") from exc
        triples: dict[tuple[int, int], PreferenceTriple] = {}
        for entry in raw:
            i, j = int(entry["i"]), int(entry["j"])
            if (i, j) in triples:
                raise ValueError(f"duplicate pair ({i},{j})")
            triples[(i, j)] = PreferenceTriple(
                float(entry["p_succ"]), float(entry["p_cong"]), float(entry["p_prec"])
            )
        return cls(n, triples)


@dataclass(frozen=True, slots=True)
class ValidationReport:
    fatal: tuple[str, ...]
    warnings: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.fatal


@dataclass(frozen=True, slots=True)
class CopelandProfile:
    """Scores and gaps in half-points (doubled integers), plus the winner set.

    scores2[k] is 2 * CP(arm k+1); gaps2[k] is 2 * d_{k+1}.
    """

    scores2: tuple[int, ...]
    copeland_set: frozenset[int]
    gaps2: tuple[int, ...]

    def score(self, arm: int) -> float:
        return self.scores2[arm - 1] / 2.0

    def gap(self, arm: int) -> float:
        return self.gaps2[arm - 1] / 2.0


@dataclass(frozen=True, slots=True)
class RelationSets:
    """Per-arm strict-mode relations: L(j), I(j) and the dominated set."""

    superior: dict[int, frozenset[int]]
    indifferent: dict[int, frozenset[int]]
    dominated: dict[int, frozenset[int]]


@dataclass(frozen=True, slots=True)
class TransitivityReport:
    transitive: bool
    # (axiom id 1..4, i, j, k) for the first violated ordered triple, else None
    witness: tuple[int, int, int, int] | None = field(default=None)


def validate(inst: PreferenceInstance) -> ValidationReport:
    """Check numeric invariants of an instance.

    Simplex violations and out-of-range probabilities are fatal.  A pair whose
    top two probabilities tie within MODE_TIE_TOL only triggers a warning: the
    instance is usable but no identification guarantee covers it.
    """
    fatal: list[str] = []
    warnings: list[str] = []
    for (i, j), t in sorted(inst.triples.items()):
        s = t.p_succ + t.p_cong + t.p_prec
        if not math.isfinite(s) or abs(s - 1.0) > SIMPLEX_TOL:
            fatal.append(f"pair ({i},{j}): probabilities sum to {s!r}, not 1")
        for name, v in (("p_succ", t.p_succ), ("p_cong", t.p_cong), ("p_prec", t.p_prec)):
            if not (0.0 <= v <= 1.0):
                fatal.append(f"pair ({i},{j}): {name}={v!r} outside [0,1]")
        if t.mode() == MODE_TIE:
            warnings.append(f"pair ({i},{j}): mode tie, top two probabilities equal")
    return ValidationReport(tuple(fatal), tuple(warnings))


def copeland_profile(inst: PreferenceInstance) -> CopelandProfile:
    """Exact Copeland scores: one point per dominated opponent, half a point
    per opponent whose strict mode is indifference.  Tied-mode pairs score
    zero on both sides."""
    n = inst.n
    scores2 = [0] * (n + 1)
    for (i, j), t in inst.triples.items():
        m = t.mode()
        if m == MODE_SUCC:
            scores2[i] += 2
        elif m == MODE_CONG:
            scores2[i] += 1
            scores2[j] += 1
        elif m == MODE_PREC:
            scores2[j] += 2
    scores2 = scores2[1:]
    best = max(scores2)
    copeland_set = frozenset(k + 1 for k, s in enumerate(scores2) if s == best)
    gaps2 = tuple(best - s for s in scores2)
    return CopelandProfile(tuple(scores2), copeland_set, gaps2)


def relation_sets(inst: PreferenceInstance) -> RelationSets:
    n = inst.n
    sup: dict[int, set[int]] = {a: set() for a in inst.arms()}
    ind: dict[int, set[int]] = {a: set() for a in inst.arms()}
    dom: dict[int, set[int]] = {a: set() for a in inst.arms()}
    for (i, j), t in inst.triples.items():
        m = t.mode()
        if m == MODE_SUCC:
            dom[i].add(j)
            sup[j].add(i)
        elif m == MODE_CONG:
            ind[i].add(j)
            ind[j].add(i)
        elif m == MODE_PREC:
            dom[j].add(i)
            sup[i].add(j)
    return RelationSets(
        superior={a: frozenset(sup[a]) for a in inst.arms()},
        indifferent={a: frozenset(ind[a]) for a in inst.arms()},
        dominated={a: frozenset(dom[a]) for a in inst.arms()},
    )


def _mode_matrix(inst: PreferenceInstance) -> list[list[int]]:
    """m[i][j] = strict mode of the ordered pair (i, j), 0 on ties."""
    n = inst.n
    m = [[MODE_TIE] * (n + 1) for _ in range(n + 1)]
    for (i, j), t in inst.triples.items():
        k = t.mode()
        m[i][j] = k
        m[j][i] = MODE_TIE if k == MODE_TIE else 4 - k  # succ <-> prec, cong fixed
    return m


def check_transitivity(inst: PreferenceInstance) -> TransitivityReport:
    """Check the four transitivity axioms over all ordered distinct triples.

    Axiom 1: i>j and j>k imply i>k.      Axiom 2: i~j and j>k imply i>k.
    Axiom 3: i>j and j~k imply i>k.      Axiom 4: i~j and j~k imply i~k.
    Here > and ~ denote strict preference resp. indifference modes.  Returns
    the first violated (axiom, i, j, k) in lexicographic order, if any.
    """
    n = inst.n
    m = _mode_matrix(inst)
    for i in inst.arms():
        for j in inst.arms():
            if j == i:
                continue
            mij = m[i][j]
            if mij != MODE_SUCC and mij != MODE_CONG:
                continue
            for k in inst.arms():
                if k == i or k == j:
                    continue
                mjk = m[j][k]
                mik = m[i][k]
                if mij == MODE_SUCC:
                    if mjk == MODE_SUCC and mik != MODE_SUCC:
                        return TransitivityReport(False, (1, i, j, k))
                    if mjk == MODE_CONG and mik != MODE_SUCC:
                        return TransitivityReport(False, (3, i, j, k))
                else:  # mij == MODE_CONG
                    if mjk == MODE_SUCC and mik != MODE_SUCC:
                        return TransitivityReport(False, (2, i, j, k))
                    if mjk == MODE_CONG and mik != MODE_CONG:
                        return TransitivityReport(False, (4, i, j, k))
    return TransitivityReport(True, None)


def min_gap(inst: PreferenceInstance) -> float:
    """Smallest top-minus-second probability gap over all pairs."""
    return min(t.gap() for t in inst.triples.values())
