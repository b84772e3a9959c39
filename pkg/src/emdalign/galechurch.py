"""Length-based Gale-Church sentence alignment.

Used both as the splitter for oversized alignment groups and as a standalone
baseline aligner. Lengths are token counts, not characters; the classic cost
model otherwise applies: a Gaussian on the standardized length difference
plus a prior per alignment pattern, combined as negative log-probabilities
and minimized by dynamic programming over prefix pairs.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

from .corpus import AlignmentSet, Link
from .errors import ConfigError

#: Supported alignment patterns mapped to (source, target) sentence counts,
#: in tie-break preference order: 1-1 first, then fewer sentences consumed.
PATTERNS: dict[str, tuple[int, int]] = {
    "1-1": (1, 1),
    "1-0": (1, 0),
    "0-1": (0, 1),
    "2-1": (2, 1),
    "1-2": (1, 2),
    "2-2": (2, 2),
}

DEFAULT_PRIORS: dict[str, float] = {
    "1-1": 0.89,
    "1-0": 0.0099,
    "0-1": 0.0099,
    "2-1": 0.089 / 2,
    "1-2": 0.089 / 2,
    "2-2": 0.011,
}

# Floor for the two-sided tail probability; erfc underflows near |delta| ~ 38.
_MIN_TAIL = 1e-300


@dataclass(frozen=True)
class GCParams:
    """Gale-Church model parameters (token-length variant)."""

    c: float = 1.0
    s2: float = 6.8
    priors: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_PRIORS))

    def __post_init__(self) -> None:
        if self.c <= 0:
            raise ConfigError("GCParams.c must be > 0")
        if self.s2 <= 0:
            raise ConfigError("GCParams.s2 must be > 0")
        if set(self.priors) != set(PATTERNS):
            raise ConfigError(f"priors must cover exactly the patterns {sorted(PATTERNS)}")
        if any(p <= 0 for p in self.priors.values()):
            raise ConfigError("priors must be positive")
        if sum(self.priors.values()) > 1.0 + 1e-9:
            raise ConfigError("priors must sum to <= 1")


def gc_cost(len_src_tokens: int, len_tgt_tokens: int, pattern: str, params: GCParams) -> float:
    """Cost of aligning segments of the given token lengths under a pattern.

    The cost is -log prior(pattern) - log of the two-sided tail probability
    of delta = (len_tgt - len_src*c) / sqrt(max(len_src, 1) * s2) under a
    standard normal. For 1-0 / 0-1 the unconsumed side's length is ignored.
    """
    if pattern not in PATTERNS:
        raise ValueError(f"unknown alignment pattern {pattern!r}")
    n_src, n_tgt = PATTERNS[pattern]
    ls = len_src_tokens if n_src > 0 else 0
    lt = len_tgt_tokens if n_tgt > 0 else 0
    if ls < 0 or lt < 0:
        raise ValueError("lengths must be >= 0")
    if ls == 0 and lt == 0 and n_src > 0 and n_tgt > 0:
        raise ValueError(f"pattern {pattern} requires a non-empty segment")
    delta = (lt - ls * params.c) / math.sqrt(max(ls, 1) * params.s2)
    # Two-sided tail 2*(1 - Phi(|delta|)) computed via erfc for accuracy.
    tail = max(math.erfc(abs(delta) / math.sqrt(2.0)), _MIN_TAIL)
    return -math.log(params.priors[pattern]) - math.log(tail)


def gc_align(
    src_lengths: Sequence[int],
    tgt_lengths: Sequence[int],
    params: GCParams | None = None,
) -> AlignmentSet:
    """Optimal monotone alignment of two token-length sequences.

    Dynamic program over prefix pairs with moves {1-1, 1-0, 0-1, 2-1, 1-2,
    2-2}; ties prefer 1-1, then the move consuming fewer sentences. Every
    input sentence ends up in exactly one link (1-0 / 0-1 included).
    """
    if params is None:
        params = GCParams()
    if not src_lengths or not tgt_lengths:
        raise ValueError("both length lists must be non-empty")
    n, m = len(src_lengths), len(tgt_lengths)
    moves = list(PATTERNS.items())
    inf = math.inf
    cost = [[inf] * (m + 1) for _ in range(n + 1)]
    back: list[list[str | None]] = [[None] * (m + 1) for _ in range(n + 1)]
    cost[0][0] = 0.0
    for i in range(n + 1):
        for j in range(m + 1):
            if i == 0 and j == 0:
                continue
            best = inf
            best_move = None
            for pattern, (a, b) in moves:
                if i < a or j < b:
                    continue
                prev = cost[i - a][j - b]
                if prev == inf:
                    continue
                ls = sum(src_lengths[i - a : i])
                lt = sum(tgt_lengths[j - b : j])
                total = prev + gc_cost(ls, lt, pattern, params)
                if total < best:
                    best = total
                    best_move = pattern
            cost[i][j] = best
            back[i][j] = best_move
    links: list[Link] = []
    i, j = n, m
    while i > 0 or j > 0:
        pattern = back[i][j]
        assert pattern is not None
        a, b = PATTERNS[pattern]
        links.append(Link(src=tuple(range(i - a, i)), tgt=tuple(range(j - b, j))))
        i -= a
        j -= b
    links.reverse()
    return AlignmentSet(links=tuple(links))


def gc_total_cost(
    src_lengths: Sequence[int],
    tgt_lengths: Sequence[int],
    params: GCParams | None = None,
) -> float:
    """Total cost of the optimal DP path (exposed for oracle comparisons)."""
    if params is None:
        params = GCParams()
    aset = gc_align(src_lengths, tgt_lengths, params)
    total = 0.0
    for link in aset.links:
        pattern = f"{len(link.src)}-{len(link.tgt)}"
        ls = sum(src_lengths[i] for i in link.src)
        lt = sum(tgt_lengths[j] for j in link.tgt)
        total += gc_cost(ls, lt, pattern, params)
    return total
