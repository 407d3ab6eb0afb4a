"""Round-robin block balancing of a sorted sequence.

Given d_1 >= ... >= d_N >= 0 with N = l*m, a permutation assigns each of m
rounds of l consecutive values to the l blocks so that, within every round,
larger values go to the blocks with smaller partial sums.  The resulting
block sums differ by at most d_1, exactly, with the same invariant holding
after every round.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class BalanceInstance:
    d: tuple
    l: int
    m: int

    def __post_init__(self):
        object.__setattr__(self, "d", tuple(self.d))
        if self.l < 1 or self.m < 1 or len(self.d) != self.l * self.m:
            raise ValueError(f"need len(d) = l*m, got {len(self.d)} != "
                             f"{self.l}*{self.m}")
        if any(a < b for a, b in zip(self.d, self.d[1:])):
            raise ValueError("d must be nonincreasing (input is not sorted)")
        if self.d and self.d[-1] < 0:
            raise ValueError("d must be nonnegative")


@dataclass(frozen=True)
class BalanceResult:
    sigma: tuple        # slot (j-1)m + k holds the value index sigma[...] (1-based)
    blocks: tuple       # final block sums b_1..b_l
    spread: object      # max_ij |b_i - b_j|
    bound_ok: bool      # spread <= d_1
    round_partials: tuple  # block sums after each round (for the invariant)


def balance_permutation(inst: BalanceInstance) -> BalanceResult:
    d, l, m = inst.d, inst.l, inst.m
    sigma = [0] * (l * m)
    partial = [0] * l
    history = []
    for k in range(1, m + 1):
        # blocks with smaller partial sums receive the larger remaining values;
        # ties break on ascending block index
        order = sorted(range(l), key=lambda j: (partial[j], j))
        for pos, j in enumerate(order):
            idx = (k - 1) * l + pos + 1
            sigma[j * m + (k - 1)] = idx
            partial[j] = partial[j] + d[idx - 1]
        history.append(tuple(partial))
    spread = max(partial) - min(partial)
    d1 = d[0] if d else 0
    return BalanceResult(tuple(sigma), tuple(partial), spread,
                         spread <= d1, tuple(history))


def verify_balance(inst: BalanceInstance, res: BalanceResult) -> bool:
    """Exact re-check: sigma is a bijection, block sums match, and the
    spread bound holds after every round."""
    n = inst.l * inst.m
    if sorted(res.sigma) != list(range(1, n + 1)):
        return False
    d1 = inst.d[0] if inst.d else 0
    for k, snapshot in enumerate(res.round_partials, start=1):
        recomputed = tuple(
            sum(inst.d[res.sigma[j * inst.m + i] - 1] for i in range(k))
            for j in range(inst.l))
        if recomputed != snapshot:
            return False
        if max(snapshot) - min(snapshot) > d1:
            return False
    return res.blocks == res.round_partials[-1]
