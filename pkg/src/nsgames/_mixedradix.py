"""Mixed-radix encoding of index tuples into dense row-major tables.

Convention used everywhere in the package: the *last* component varies
fastest, i.e. ``encode((v0, .., vk), (r0, .., rk)) = ((v0*r1 + v1)*r2 + ..)``.
"""

from __future__ import annotations

import math
from collections.abc import Sequence


def table_size(radii: Sequence[int]) -> int:
    return math.prod(radii)


def encode(values: Sequence[int], radii: Sequence[int]) -> int:
    idx = 0
    for value, radix in zip(values, radii, strict=True):
        idx = idx * radix + value
    return idx


def decode(index: int, radii: Sequence[int]) -> tuple[int, ...]:
    out = [0] * len(radii)
    for pos in range(len(radii) - 1, -1, -1):
        index, out[pos] = divmod(index, radii[pos])
    return tuple(out)


def all_tuples(radii: Sequence[int]) -> list[tuple[int, ...]]:
    """All index tuples in encoding order (last component fastest)."""
    return [decode(i, radii) for i in range(table_size(radii))]


def integer_nth_root(value: int, n: int) -> int | None:
    """The integer s with s**n == value, or None if value is not a perfect power."""
    if value <= 0 or n <= 0:
        return None
    root = round(value ** (1.0 / n))
    for candidate in (root - 1, root, root + 1):
        if candidate >= 1 and candidate**n == value:
            return candidate
    return None
