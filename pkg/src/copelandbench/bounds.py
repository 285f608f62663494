"""Sample-complexity bounds for Copeland-winner identification.

The lower bounds hold for every algorithm that identifies the winner with
confidence 1 - delta; they need a unique winner and come in three flavours:

  lower_bound_no_indiff   closed-form ratios for instances without congruence
                          mass, scaled by the hardest reversal KL per arm
  lower_bound_simple      the headline-theorem form: same closed form when
                          there is no congruence mass, otherwise a single
                          binomial-ratio maximum that may degenerate to 0
  lower_bound_detailed    the refined form whose three binomial-ratio maxima
                          keep the bound strictly positive on every strictly
                          positive instance

`lower_bound_natural` is the per-pair 1/D sum reported for comparison only; it
carries no guarantee here.  The upper bounds plug per-pair stopping-time
caps into the union-bound confidence splits used by the two solvers.  Binomial
ratios are evaluated exactly in rational arithmetic; the candidate sets are
tiny, at most (|I|+1)(|L|+1) index pairs per arm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Optional

from .instance import (
    PreferenceInstance,
    PreferenceTriple,
    check_transitivity,
    copeland_profile,
    relation_sets,
)
from .ppr import DegenerateGap, t0_bound


class NotApplicable(ValueError):
    """The bound's preconditions fail for this instance; message says why."""


class PreconditionViolated(ValueError):
    pass


class ParameterOutOfRange(ValueError):
    pass


# ---------------------------------------------------------------------------
# KL toolbox


def _xlogx_ratio(p: float, q: float) -> float:
    # p * ln(p/q) with the 0 * ln 0 = 0 convention
    if p == 0.0:
        return 0.0
    if q == 0.0:
        return math.inf
    return p * math.log(p / q)


def kl_bernoulli(p: float, q: float) -> float:
    """KL(Ber(p) || Ber(q)); +inf on support mismatch."""
    if not (0.0 <= p <= 1.0 and 0.0 <= q <= 1.0):
        raise ValueError(f"probabilities required, got p={p}, q={q}")
    return _xlogx_ratio(p, q) + _xlogx_ratio(1.0 - p, 1.0 - q)


def kl_categorical3(p, q) -> float:
    """KL between two 3-category distributions; +inf on support mismatch."""
    ps = p.as_tuple() if isinstance(p, PreferenceTriple) else tuple(p)
    qs = q.as_tuple() if isinstance(q, PreferenceTriple) else tuple(q)
    return sum(_xlogx_ratio(pi, qi) for pi, qi in zip(ps, qs))


def d_jk(inst: PreferenceInstance, j: int, k: int) -> float:
    """Hardest of the two outcome-swap perturbations of pair (j, k).

    Max of the KLs from P^(j,k) to the triple with success and congruence
    masses swapped and to the triple with success and precedence swapped.
    """
    t = inst.triple(j, k)
    if min(t.as_tuple()) <= 0.0:
        raise PreconditionViolated(
            f"pair ({j}, {k}) must be strictly positive in all components, got {t.as_tuple()}"
        )
    s, c, p = t.as_tuple()
    return max(kl_categorical3(t, (c, s, p)), kl_categorical3(t, (p, c, s)))


# ---------------------------------------------------------------------------
# Lower bounds


def _winner_context(inst: PreferenceInstance):
    profile = copeland_profile(inst)
    if len(profile.copeland_set) != 1:
        raise NotApplicable(
            f"no unique Copeland winner (set is {sorted(profile.copeland_set)})"
        )
    winner = next(iter(profile.copeland_set))
    return profile, relation_sets(inst), winner


@dataclass(frozen=True, slots=True)
class PsiSets:
    """Index-pair sets feeding the binomial-ratio maxima for one arm."""

    psi: frozenset
    psi_prime: frozenset
    psi_double_prime: frozenset


def _psi_from_sizes(n_i: int, n_l: int, d2: int) -> PsiSets:
    # d2 is the doubled score gap, so the thresholds i + 2l >= 2*d_j + 1,
    # 2*d_j - 1, 2*d_j - 3 stay in exact integer arithmetic.
    psi = frozenset(
        (i, l)
        for i in range(n_i + 1)
        for l in range(n_l + 1)
        if i + 2 * l >= d2 + 1
    )
    psi_p = frozenset(
        (i, l)
        for i in range(n_i)
        for l in range(n_l + 1)
        if i + 2 * l >= d2 - 1
    )
    psi_pp = frozenset(
        (i, l)
        for i in range(n_i + 1)
        for l in range(n_l)
        if i + 2 * l >= d2 - 3
    )
    return PsiSets(psi, psi_p, psi_pp)


def psi_sets(inst: PreferenceInstance, j: int) -> PsiSets:
    """The three feasible index-pair sets for arm j (requires a unique winner)."""
    profile, rels, winner = _winner_context(inst)
    if j == winner:
        raise NotApplicable(f"arm {j} is the Copeland winner; no gap to certify")
    return _psi_from_sizes(
        len(rels.indifferent[j]), len(rels.superior[j]), profile.gaps2[j - 1]
    )


def _ratio_c(n_i: int, n_l: int, pair) -> Fraction:
    i, l = pair
    num = comb(n_i, i) * comb(n_l, l)
    den = 0
    if i >= 1:
        den += comb(n_i - 1, i - 1) * comb(n_l, l)
    if l >= 1:
        den += comb(n_i, i) * comb(n_l - 1, l - 1)
    return Fraction(num, den)


def _ratio_c_prime(n_i: int, n_l: int, pair) -> Fraction:
    i, l = pair
    num = comb(n_i - 1, i) * comb(n_l, l)
    den = num
    if i >= 1:
        den += comb(n_i - 2, i - 1) * comb(n_l, l)
    if l >= 1:
        den += comb(n_i - 1, i) * comb(n_l - 1, l - 1)
    return Fraction(num, den)


def _ratio_c_double_prime(n_i: int, n_l: int, pair) -> Fraction:
    i, l = pair
    num = comb(n_i, i) * comb(n_l - 1, l)
    den = num
    if i >= 1:
        den += comb(n_i - 1, i - 1) * comb(n_l - 1, l)
    if l >= 1:
        den += comb(n_i, i) * comb(n_l - 2, l - 1)
    return Fraction(num, den)


def _max_ratio(ratio, n_i: int, n_l: int, pairs) -> Fraction:
    best = Fraction(0)
    for pair in pairs:
        val = ratio(n_i, n_l, pair)
        if val > best:
            best = val
    return best


def binomial_ratio_maxima(n_i: int, n_l: int, d2: int) -> tuple[Fraction, Fraction, Fraction]:
    """Exact maxima of the three feasibility ratios for set sizes (|I|, |L|)
    and doubled gap d2; an empty candidate set yields 0."""
    sets_ = _psi_from_sizes(n_i, n_l, d2)
    return (
        _max_ratio(_ratio_c, n_i, n_l, sets_.psi),
        _max_ratio(_ratio_c_prime, n_i, n_l, sets_.psi_prime),
        _max_ratio(_ratio_c_double_prime, n_i, n_l, sets_.psi_double_prime),
    )


@dataclass(frozen=True, slots=True)
class BoundTerm:
    """One lower-bound evaluation: total, per-arm split, and skip notes."""

    value: float
    per_arm: dict
    flags: tuple


def _log_factor(delta: float) -> float:
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    return math.log(1.0 / (2.4 * delta))


def _is_no_indiff(inst: PreferenceInstance) -> bool:
    return all(t.p_cong == 0.0 for t in inst.triples.values())


def _is_strictly_positive(inst: PreferenceInstance) -> bool:
    return all(min(t.as_tuple()) > 0.0 for t in inst.triples.values())


def _no_indiff_arm_ratio(n_l: int, d2: int, winner_superior: bool) -> float:
    # closed-form maximum for congruence-free instances; the second ratio is
    # 1 by convention when d_j = 1 (the literal expression is 0/0 at |L| = 1)
    d = d2 // 2
    first = n_l / (d + 1) if n_l >= d + 1 else 0.0
    if winner_superior:
        second = 1.0 if d == 1 else (n_l - 1) / (n_l + d - 2)
    else:
        second = 0.0
    return max(first, second)


def lower_bound_no_indiff(inst: PreferenceInstance, delta: float) -> BoundTerm:
    """Closed-form lower bound for instances without congruence mass."""
    if not _is_no_indiff(inst):
        raise NotApplicable("instance has congruence mass on some pair")
    for (i, j), t in inst.triples.items():
        if not 0.0 < t.p_succ < 1.0:
            raise NotApplicable(
                f"pair ({i}, {j}) needs a success probability strictly inside (0, 1)"
            )
    profile, rels, winner = _winner_context(inst)
    lf = _log_factor(delta)
    per_arm = {}
    for j in inst.arms():
        if j == winner:
            continue
        sup = rels.superior[j]
        if not sup:
            per_arm[j] = 0.0
            continue
        d2 = profile.gaps2[j - 1]
        if d2 % 2 != 0:
            raise NotApplicable(
                f"arm {j} has a half-integer score gap; expected integer gaps "
                "without congruence mass"
            )
        ratio = _no_indiff_arm_ratio(len(sup), d2, winner in sup)
        kappa = max(
            kl_bernoulli(inst.triple(j, z).p_succ, 1.0 - inst.triple(j, z).p_succ)
            for z in sup
        )
        per_arm[j] = lf * ratio / kappa
    return BoundTerm(sum(per_arm.values()), per_arm, ())


def _positive_arm_factor(inst, rels, j, flags) -> Optional[float]:
    # min over rivals of 1/D is 1/max D; rivals with D = 0 never attain the
    # max, so they only matter when every rival is fully symmetric
    rivals = sorted(rels.superior[j] | rels.indifferent[j])
    if not rivals:
        flags.append(f"arm {j} skipped: no superior or indifferent rival")
        return None
    d_vals = {z: d_jk(inst, j, z) for z in rivals}
    zeros = [z for z, v in d_vals.items() if v == 0.0]
    for z in zeros:
        flags.append(f"pair ({j}, {z}) is swap-symmetric (D = 0); excluded from the min")
    best = max(d_vals.values(), default=0.0)
    if best == 0.0:
        flags.append(f"arm {j} skipped: every rival pair is swap-symmetric")
        return None
    return 1.0 / best


def lower_bound_simple(inst: PreferenceInstance, delta: float) -> BoundTerm:
    """Headline-theorem lower bound; may be 0 when the feasibility set is empty."""
    if _is_no_indiff(inst):
        return lower_bound_no_indiff(inst, delta)
    if not _is_strictly_positive(inst):
        raise NotApplicable(
            "instance needs all-zero congruence mass or strictly positive triples"
        )
    profile, rels, winner = _winner_context(inst)
    lf = _log_factor(delta)
    per_arm = {}
    flags: list = []
    for j in inst.arms():
        if j == winner:
            continue
        n_i, n_l = len(rels.indifferent[j]), len(rels.superior[j])
        c_j, _, _ = binomial_ratio_maxima(n_i, n_l, profile.gaps2[j - 1])
        factor = _positive_arm_factor(inst, rels, j, flags)
        per_arm[j] = 0.0 if factor is None else lf * float(c_j) * factor
    return BoundTerm(sum(per_arm.values()), per_arm, tuple(flags))


def lower_bound_detailed(inst: PreferenceInstance, delta: float) -> BoundTerm:
    """Refined lower bound; strictly positive on strictly positive instances."""
    if _is_no_indiff(inst):
        return lower_bound_no_indiff(inst, delta)
    if not _is_strictly_positive(inst):
        raise NotApplicable(
            "instance needs all-zero congruence mass or strictly positive triples"
        )
    profile, rels, winner = _winner_context(inst)
    lf = _log_factor(delta)
    per_arm = {}
    flags: list = []
    for j in inst.arms():
        if j == winner:
            continue
        n_i, n_l = len(rels.indifferent[j]), len(rels.superior[j])
        c_j, c_p, c_pp = binomial_ratio_maxima(n_i, n_l, profile.gaps2[j - 1])
        best = c_j
        if winner in rels.indifferent[j] and c_p > best:
            best = c_p
        if winner in rels.superior[j] and c_pp > best:
            best = c_pp
        factor = _positive_arm_factor(inst, rels, j, flags)
        per_arm[j] = 0.0 if factor is None else lf * float(best) * factor
    return BoundTerm(sum(per_arm.values()), per_arm, tuple(flags))


def lower_bound_natural(inst: PreferenceInstance, delta: float) -> BoundTerm:
    """Per-rival 1/D sum analogous to classic bandit lower bounds.

    Reported for orientation only; the identification guarantee proved here
    is for the max-ratio forms above, not for this sum.
    """
    no_indiff = _is_no_indiff(inst)
    if not no_indiff and not _is_strictly_positive(inst):
        raise NotApplicable(
            "instance needs all-zero congruence mass or strictly positive triples"
        )
    _, rels, winner = _winner_context(inst)
    lf = _log_factor(delta)
    per_arm = {}
    flags: list = []
    for j in inst.arms():
        if j == winner:
            continue
        total = 0.0
        for z in sorted(rels.superior[j] | rels.indifferent[j]):
            if no_indiff:
                p = inst.triple(j, z).p_succ
                if not 0.0 < p < 1.0:
                    flags.append(f"pair ({j}, {z}) skipped: success probability at the boundary")
                    continue
                d = kl_bernoulli(p, 1.0 - p)
            else:
                d = d_jk(inst, j, z)
            if d == 0.0:
                flags.append(f"pair ({j}, {z}) skipped: swap-symmetric (D = 0)")
                continue
            total += 1.0 / d
        per_arm[j] = lf * total
    return BoundTerm(sum(per_arm.values()), per_arm, tuple(flags))


# ---------------------------------------------------------------------------
# Upper bounds


def upper_bound_pocowista(inst: PreferenceInstance, delta: float) -> float:
    """Sum of per-pair stopping caps at the pairwise confidence delta / C(n,2)."""
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    degenerate = [pair for pair, t in sorted(inst.triples.items()) if t.gap() <= 0.0]
    if degenerate:
        raise DegenerateGap(
            "cannot bound pairs with tied top outcome probabilities: "
            + ", ".join(str(p) for p in degenerate)
        )
    per_pair_delta = delta / comb(inst.n, 2)
    return sum(t0_bound(t, per_pair_delta) for t in inst.triples.values())


def upper_bound_tra_from_trace(inst: PreferenceInstance, trace, delta: float) -> float:
    """Post-hoc cap for a transitive-solver trace: per-duel caps at delta / n."""
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    if trace.rounds > inst.n and check_transitivity(inst).transitive:
        raise AssertionError(
            f"trace has {trace.rounds} rounds on a transitive instance with n={inst.n}"
        )
    per_duel_delta = delta / inst.n
    return sum(t0_bound(inst.triple(d.i, d.j), per_duel_delta) for d in trace.duels)


# ---------------------------------------------------------------------------
# Worst-case construction


def worst_case_instance(
    n: int,
    delta_gap: float,
    f_n: int,
    with_indifferences: bool = False,
) -> PreferenceInstance:
    """Hard instance family: arm 1 wins with score ceil(n/2 + f_n), the rest
    alternate by index parity, and the last n - 1 - ceil(n/2 + f_n) arms beat
    arm 1.  Margins are 1/2 +- delta_gap, or 1/3 + 2*delta_gap versus
    1/3 - delta_gap with constant congruence mass 1/3 - delta_gap."""
    if n < 4:
        raise ParameterOutOfRange(f"need n >= 4, got n={n}")
    if not 0.0 < delta_gap < 1.0 / 6.0:
        raise ParameterOutOfRange(
            f"delta_gap must lie strictly inside (0, 1/6), got {delta_gap}"
        )
    if not (isinstance(f_n, int) and 1 <= f_n and 2 * f_n <= n - 2):
        raise ParameterOutOfRange(
            f"f_n must be an integer with 1 <= f_n <= n/2 - 1, got {f_n}"
        )
    winner_score = (n + 2 * f_n + 1) // 2  # ceil(n/2 + f_n)
    n_losses = n - 1 - winner_score
    beats_one = set(range(n - n_losses + 1, n + 1))

    def p_first(win: bool) -> PreferenceTriple:
        if with_indifferences:
            s = 1.0 / 3.0 + 2.0 * delta_gap if win else 1.0 / 3.0 - delta_gap
            c = 1.0 / 3.0 - delta_gap
            return PreferenceTriple(s, c, 1.0 - s - c)
        s = 0.5 + delta_gap if win else 0.5 - delta_gap
        return PreferenceTriple(s, 0.0, 1.0 - s)

    triples = {}
    for y in range(2, n + 1):
        triples[(1, y)] = p_first(y not in beats_one)
    for x in range(2, n + 1):
        for y in range(x + 1, n + 1):
            triples[(x, y)] = p_first((x + y) % 2 == 0)
    return PreferenceInstance(n, triples)


# ---------------------------------------------------------------------------
# Aggregate report


@dataclass(frozen=True, slots=True)
class BoundReport:
    """All bounds for one (instance, delta), with reasons for absent entries."""

    n: int
    delta: float
    lower_simple: Optional[float]
    lower_detailed: Optional[float]
    lower_natural: Optional[float]
    upper_pocowista: Optional[float]
    per_arm_terms: dict
    reasons: dict
    flags: tuple

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "delta": self.delta,
            "lower_simple": self.lower_simple,
            "lower_detailed": self.lower_detailed,
            "lower_natural": self.lower_natural,
            "upper_pocowista": self.upper_pocowista,
            "per_arm_terms": {str(k): v for k, v in sorted(self.per_arm_terms.items())},
            "reasons": dict(sorted(self.reasons.items())),
            "flags": list(self.flags),
        }


def bound_report(inst: PreferenceInstance, delta: float) -> BoundReport:
    """Evaluate every bound, recording a reason instead of a value where the
    instance falls outside a bound's preconditions."""
    values: dict = {}
    reasons: dict = {}
    flags: list = []
    per_arm: dict = {}

    def attempt(name, fn):
        try:
            result = fn()
        except (NotApplicable, DegenerateGap, PreconditionViolated) as exc:
            values[name] = None
            reasons[name] = str(exc)
            return
        if isinstance(result, BoundTerm):
            values[name] = result.value
            flags.extend(result.flags)
            if name == "lower_detailed":
                per_arm.update(result.per_arm)
        else:
            values[name] = result

    attempt("lower_simple", lambda: lower_bound_simple(inst, delta))
    attempt("lower_detailed", lambda: lower_bound_detailed(inst, delta))
    attempt("lower_natural", lambda: lower_bound_natural(inst, delta))
    attempt("upper_pocowista", lambda: upper_bound_pocowista(inst, delta))
    return BoundReport(
        n=inst.n,
        delta=delta,
        lower_simple=values["lower_simple"],
        lower_detailed=values["lower_detailed"],
        lower_natural=values["lower_natural"],
        upper_pocowista=values["upper_pocowista"],
        per_arm_terms=per_arm,
        reasons=reasons,
        flags=tuple(flags),
    )
