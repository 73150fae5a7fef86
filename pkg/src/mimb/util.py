"""Small shared helpers."""

from __future__ import annotations

import itertools
from typing import Iterator, Sequence


def iter_subsets(
    pool: Sequence[str],
    max_size: int,
    containing: str | None = None,
    min_size: int = 1,
) -> Iterator[tuple[str, ...]]:
    """Non-empty subsets of pool, smallest first, positions lexicographic.

    With ``containing`` set, only subsets that include that member are
    produced (the pool must not contain it twice).
    """
    items = tuple(pool)
    upper = min(max_size, len(items))
    for size in range(max(min_size, 1), upper + 1):
        for combo in itertools.combinations(items, size):
            if containing is not None and containing not in combo:
                continue
            yield combo
