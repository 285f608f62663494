"""Sequential Copeland-winner identification from pairwise ternary duels.

Both solvers keep, per arm, a lower score (points already banked from resolved
duels) and an optimistic score (lower score plus one point for every arm not
yet accounted for), stopping as soon as some arm's lower score dominates every
rival's optimistic score.  Scores are stored doubled so the half points from
indifferences stay exact integers.

`pocowista` resolves one pair per round.  `tra_pocowista` additionally
propagates what each duel implies under transitive preferences (beaten arms
inherit losses, indifference merges the two arms' records), which caps the
round count at the number of arms on transitive instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

from . import ppr
from .ppr import PprDecision


class RoundOverflow(RuntimeError):
    """Transitive solver exceeded its round guarantee on a supposedly transitive instance."""

    def __init__(self, msg: str, partial_trace: "RunTrace"):
        super().__init__(msg)
        self.partial_trace = partial_trace


class BudgetExceeded(RuntimeError):
    """A solver run stopped early because one duel ran out of sampling budget.

    Carries the trace built so far (returned_arm is None); the duel-level
    cause is chained as __cause__.
    """

    def __init__(self, msg: str, partial_trace: "RunTrace"):
        super().__init__(msg)
        self.partial_trace = partial_trace


@dataclass(frozen=True, slots=True)
class SolverState:
    """Arm bookkeeping; all per-arm tuples are indexed by arm-1.

    compared[a]     arms accounted for in a+1's score bounds, itself included
    defeated[a]     arms known inferior to a+1 (transitive solver only)
    indifferent[a]  arms known indifferent to a+1 (transitive solver only)
    superior[a]     arms known superior to a+1 (transitive solver only)
    cp_hat2[a]      doubled lower Copeland estimate
    cp_bar2[a]      doubled optimistic estimate: cp_hat2 + 2*(n - |compared|)
    """

    n: int
    compared: tuple[frozenset, ...]
    defeated: tuple[frozenset, ...]
    indifferent: tuple[frozenset, ...]
    superior: tuple[frozenset, ...]
    cp_hat2: tuple[int, ...]
    cp_bar2: tuple[int, ...]

    @classmethod
    def fresh(cls, n: int) -> "SolverState":
        if n < 2:
            raise ValueError(f"need at least 2 arms, got n={n}")
        empty = tuple(frozenset() for _ in range(n))
        return cls(
            n=n,
            compared=tuple(frozenset({a}) for a in range(1, n + 1)),
            defeated=empty,
            indifferent=empty,
            superior=empty,
            cp_hat2=tuple(0 for _ in range(n)),
            cp_bar2=tuple(2 * (n - 1) for _ in range(n)),
        )

    def cp_hat(self, arm: int) -> float:
        return self.cp_hat2[arm - 1] / 2.0

    def cp_bar(self, arm: int) -> float:
        return self.cp_bar2[arm - 1] / 2.0

    def _with(self, **kw) -> "SolverState":
        data = {
            "n": self.n,
            "compared": self.compared,
            "defeated": self.defeated,
            "indifferent": self.indifferent,
            "superior": self.superior,
            "cp_hat2": self.cp_hat2,
            "cp_bar2": self.cp_bar2,
        }
        data.update(kw)
        return SolverState(**data)


def _replace(tup: tuple, updates: dict) -> tuple:
    lst = list(tup)
    for idx, val in updates.items():
        lst[idx] = val
    return tuple(lst)


def _rebound(state: SolverState, arms: tuple[int, ...]) -> SolverState:
    opt = {
        a - 1: state.cp_hat2[a - 1] + 2 * (state.n - len(state.compared[a - 1]))
        for a in arms
    }
    return state._with(cp_bar2=_replace(state.cp_bar2, opt))


def _check_duel_args(state: SolverState, i: int, j: int) -> None:
    if not (1 <= i <= state.n and 1 <= j <= state.n) or i == j:
        raise ValueError(f"invalid duel pair ({i}, {j}) for n={state.n}")
    if j in state.compared[i - 1]:
        raise ValueError(f"arm {j} is already accounted for by arm {i}")


def scores_update(state: SolverState, i: int, j: int, outcome: int) -> SolverState:
    """Bank one resolved duel: win = 1 point, indifference = 1/2 each."""
    _check_duel_args(state, i, j)
    ii, jj = i - 1, j - 1
    sc = dict()
    if outcome == 1:
        sc[ii] = state.cp_hat2[ii] + 2
    elif outcome == 2:
        sc[ii] = state.cp_hat2[ii] + 1
        sc[jj] = state.cp_hat2[jj] + 1
    elif outcome == 3:
        sc[jj] = state.cp_hat2[jj] + 2
    else:
        raise ValueError(f"outcome must be 1, 2 or 3, got {outcome}")
    state = state._with(
        cp_hat2=_replace(state.cp_hat2, sc),
        compared=_replace(
            state.compared,
            {ii: state.compared[ii] | {j}, jj: state.compared[jj] | {i}},
        ),
    )
    return _rebound(state, (i, j))


def transitive_scores_update(
    state: SolverState, i: int, j: int, outcome: int
) -> SolverState:
    """Bank a duel plus everything it implies under transitive preferences.

    A win over j also banks wins against every arm tied with or beaten by j;
    an indifference merges the two arms' defeated/indifferent/superior records
    (each side also banks the other's wins and half points for its ties).
    Only the two dueled arms' sets change; third arms learn nothing.
    """
    _check_duel_args(state, i, j)
    if outcome == 2:
        ii, jj = i - 1, j - 1
        w_i, w_j = state.defeated[ii], state.defeated[jj]
        t_i, t_j = state.indifferent[ii], state.indifferent[jj]
        merged_w = w_i | w_j
        merged_l = state.superior[ii] | state.superior[jj]
        merged_d = state.compared[ii] | state.compared[jj] | {i, j}
        state = state._with(
            cp_hat2=_replace(
                state.cp_hat2,
                {
                    ii: state.cp_hat2[ii] + 2 * len(w_j) + 1 + len(t_j),
                    jj: state.cp_hat2[jj] + 2 * len(w_i) + 1 + len(t_i),
                },
            ),
            defeated=_replace(state.defeated, {ii: merged_w, jj: merged_w}),
            superior=_replace(state.superior, {ii: merged_l, jj: merged_l}),
            indifferent=_replace(
                state.indifferent, {ii: t_i | t_j | {j}, jj: t_j | t_i | {i}}
            ),
            compared=_replace(state.compared, {ii: merged_d, jj: merged_d}),
        )
    elif outcome in (1, 3):
        win, lose = (i, j) if outcome == 1 else (j, i)
        ww, ll = win - 1, lose - 1
        gain2 = 2 * (len(state.defeated[ll] | state.indifferent[ll]) + 1)
        swallowed = state.defeated[ll] | state.indifferent[ll] | {lose}
        climbed = state.superior[ww] | state.indifferent[ww] | {win}
        state = state._with(
            cp_hat2=_replace(state.cp_hat2, {ww: state.cp_hat2[ww] + gain2}),
            defeated=_replace(state.defeated, {ww: state.defeated[ww] | swallowed}),
            superior=_replace(state.superior, {ll: state.superior[ll] | climbed}),
            compared=_replace(
                state.compared,
                {ww: state.compared[ww] | swallowed, ll: state.compared[ll] | climbed},
            ),
        )
    else:
        raise ValueError(f"outcome must be 1, 2 or 3, got {outcome}")
    return _rebound(state, (i, j))


def termination_check(state: SolverState) -> Optional[int]:
    """Lowest arm whose banked score dominates every rival's optimistic score."""
    for i in range(1, state.n + 1):
        s = state.cp_hat2[i - 1]
        if all(s >= state.cp_bar2[j] for j in range(state.n) if j != i - 1):
            return i
    return None


def _argmax_arm(values: tuple[int, ...], allowed=None) -> int:
    best, best_v = 0, None
    for a in range(1, len(values) + 1):
        if allowed is not None and a not in allowed:
            continue
        v = values[a - 1]
        if best_v is None or v > best_v:
            best, best_v = a, v
    return best


@dataclass(frozen=True, slots=True)
class DuelRecord:
    round: int
    i: int
    j: int
    samples: int
    outcome: int


@dataclass(frozen=True, slots=True)
class RunTrace:
    """Full record of one solver run; returned_arm is None on a partial trace."""

    duels: tuple[DuelRecord, ...]
    returned_arm: Optional[int]
    total_samples: int
    rounds: int

    def to_json_dict(self) -> dict:
        return {
            "duels": [
                {
                    "round": d.round,
                    "i": d.i,
                    "j": d.j,
                    "samples": d.samples,
                    "outcome": d.outcome,
                }
                for d in self.duels
            ],
            "returned_arm": self.returned_arm,
            "total_samples": self.total_samples,
            "rounds": self.rounds,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "RunTrace":
        duels = tuple(
            DuelRecord(
                round=int(d["round"]),
                i=int(d["i"]),
                j=int(d["j"]),
                samples=int(d["samples"]),
                outcome=int(d["outcome"]),
            )
            for d in data["duels"]
        )
        arm = data["returned_arm"]
        return cls(
            duels=duels,
            returned_arm=None if arm is None else int(arm),
            total_samples=int(data["total_samples"]),
            rounds=int(data["rounds"]),
        )


def _identify(
    n: int,
    oracle,
    delta: float,
    per_duel_delta: float,
    update: Callable[[SolverState, int, int, int], SolverState],
    budget: Optional[int],
    observer,
    max_rounds: Optional[int],
) -> RunTrace:
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    state = SolverState.fresh(n)
    duels: list[DuelRecord] = []
    total = 0

    def partial() -> RunTrace:
        return RunTrace(tuple(duels), None, total, len(duels))

    while termination_check(state) is None:
        i_t = _argmax_arm(state.cp_bar2)
        allowed = [a for a in range(1, n + 1) if a not in state.compared[i_t - 1]]
        if not allowed:
            raise RuntimeError("no eligible opponent before termination; state is inconsistent")
        j_t = _argmax_arm(state.cp_hat2, allowed)
        try:
            decision: PprDecision = ppr.ppr_1v1_run(
                oracle.channel(i_t, j_t), per_duel_delta, budget=budget
            )
        except ppr.BudgetExceeded as exc:
            total += exc.samples_used
            raise BudgetExceeded(
                f"duel ({i_t}, {j_t}) exhausted its budget of {budget}", partial()
            ) from exc
        total += decision.samples_used
        duels.append(
            DuelRecord(len(duels) + 1, i_t, j_t, decision.samples_used, decision.mode_index)
        )
        state = update(state, i_t, j_t, decision.mode_index)
        if observer is not None:
            observer(len(duels), state)
        if max_rounds is not None and len(duels) > max_rounds:
            raise RoundOverflow(
                f"used more than {max_rounds} rounds on an instance declared transitive",
                partial(),
            )
    winner = _argmax_arm(state.cp_hat2)
    return RunTrace(tuple(duels), winner, total, len(duels))


def pocowista(
    n: int,
    oracle,
    delta: float,
    budget: Optional[int] = None,
    observer=None,
) -> RunTrace:
    """Identify a Copeland winner with error probability at most delta.

    Each duel gets confidence delta / C(n, 2): a union bound over the at most
    C(n, 2) pairwise comparisons the run can perform.
    """
    per_duel = delta / math.comb(n, 2)
    return _identify(n, oracle, delta, per_duel, scores_update, budget, observer, None)


def tra_pocowista(
    n: int,
    oracle,
    delta: float,
    budget: Optional[int] = None,
    observer=None,
    expect_transitive: bool = False,
) -> RunTrace:
    """Copeland winner identification with transitive score propagation.

    Each duel gets confidence delta / n; on transitive instances at most n
    duels are ever performed (enforced when expect_transitive is set).
    """
    per_duel = delta / n
    max_rounds = n if expect_transitive else None
    return _identify(
        n, oracle, delta, per_duel, transitive_scores_update, budget, observer, max_rounds
    )
