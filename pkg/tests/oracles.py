"""Independent reference implementations used to pin expected values.

Everything here is deliberately written from the stated rules, not by calling
the production code, so tests can cross-check the two paths against each other.
"""

from __future__ import annotations

from typing import Optional, Sequence

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def splitmix_jury(seed: int, ordinal: int, pool: Sequence[str], k: int) -> list[str]:
    """Plain-loop splitmix64 + Fisher-Yates over the sorted pool, first k taken."""
    state = (seed + _GAMMA * ordinal) & _MASK

    def next_u64() -> int:
        nonlocal state
        state = (state + _GAMMA) & _MASK
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return (z ^ (z >> 31)) & _MASK

    def below(n: int) -> int:
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            v = next_u64()
            if v < limit:
                return v % n

    xs = sorted(pool)
    for i in range(len(xs) - 1, 0, -1):
        j = below(i + 1)
        xs[i], xs[j] = xs[j], xs[i]
    return xs[:k]


def irv(candidates: Sequence[str], rankings: Sequence[Sequence[str]]) -> tuple[str, int]:
    """Exhaustive-elimination instant runoff; ties eliminate the smallest id."""
    active = sorted(candidates)
    rounds = 0
    while True:
        rounds += 1
        counts = {c: 0 for c in active}
        total = 0
        for ranking in rankings:
            for choice in ranking:
                if choice in counts:
                    counts[choice] += 1
                    total += 1
                    break
        for c in active:
            if counts[c] * 2 > total:
                return c, rounds
        if len(active) == 1:
            return active[0], rounds
        fewest = min(counts.values())
        active.remove(min(c for c in active if counts[c] == fewest))


def liquid_weights(ballots: dict[str, object], eligible: Sequence[str]) -> tuple[int, int, int]:
    """Per-voter path following: (yes, no, discarded) weights.

    Ballot values are True/False for direct votes or a user id for delegation;
    missing voters abstain.
    """
    yes = no = discarded = 0
    for voter in eligible:
        seen: set[str] = set()
        current: Optional[str] = voter
        outcome: Optional[bool] = None
        while True:
            if current in seen:
                break  # cycle
            seen.add(current)
            ballot = ballots.get(current)
            if ballot is None:
                break  # abstainer sink
            if isinstance(ballot, bool):
                outcome = ballot
                break
            current = ballot
        if outcome is None:
            discarded += 1
        elif outcome:
            yes += 1
        else:
            no += 1
    return yes, no, discarded
